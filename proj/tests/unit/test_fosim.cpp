#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "fodof/errors.hpp"
#include "fodof/fosim.hpp"
#include "fodof/stability.hpp"
#include "test_support.hpp"

using namespace fodof;
using fodof::testing::mat;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no fodof::Error thrown";
  return Errc::kInvalidArgument;
}

double max_error(const Trajectory& tr, int comp, auto&& exact) {
  double worst = 0.0;
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    worst = std::max(worst, std::abs(tr.states[k](comp) - exact(tr.times[k])));
  }
  return worst;
}

}  // namespace

TEST(GlWeights, Examples) {
  const auto w = gl_weights(0.5, 4);
  ASSERT_EQ(w.size(), 4u);
  EXPECT_DOUBLE_EQ(w[0], 1.0);
  EXPECT_DOUBLE_EQ(w[1], -0.5);
  EXPECT_DOUBLE_EQ(w[2], -0.125);
  EXPECT_DOUBLE_EQ(w[3], -0.0625);

  const auto one = gl_weights(1.0, 5);
  EXPECT_EQ(one, (std::vector<double>{1, -1, 0, 0, 0}));

  // (1 - z)^alpha at z = 1 is 0: partial sums tend to zero.
  const auto many = gl_weights(0.7, 200000);
  double sum = 0.0;
  for (double v : many) sum += v;
  EXPECT_LT(std::abs(sum), 1e-3);
}

TEST(MittagLeffler, Examples) {
  EXPECT_NEAR(mittag_leffler(1.0, -1.0), std::exp(-1.0), 1e-12);
  EXPECT_NEAR(mittag_leffler(0.5, -1.0), 0.4275835761558070, 1e-7);
  EXPECT_EQ(mittag_leffler(0.75, 0.0), 1.0);
  EXPECT_NEAR(mittag_leffler(2.0 - 1e-12, -4.0), std::cos(2.0), 1e-6);
  // E_{1/2}(z) = exp(z^2) erfc(-z).
  for (double z : {-0.3, -2.0, -6.0, -20.0}) {
    EXPECT_NEAR(mittag_leffler(0.5, z), std::exp(z * z) * std::erfc(-z), 1e-9 * (1.0 + std::exp(z * z) * std::erfc(-z)));
  }
  for (double z : {-30.0, -10.0, 3.0}) EXPECT_NEAR(mittag_leffler(1.0, z), std::exp(z), 1e-9 * std::exp(z) + 1e-14);
}

TEST(MittagLeffler, Errors) {
  EXPECT_EQ(code_of([] { mittag_leffler(0.5, 51.0); }), Errc::kDomainTooLarge);
  EXPECT_EQ(code_of([] { mittag_leffler(0.0, 1.0); }), Errc::kAlphaOutOfRange);
}

TEST(Simulate, FirstOrderMatchesExponential) {
  const Trajectory tr = simulate(mat({{-1}}), 1.0, Vector::Ones(1), 5.0, 0.001);
  ASSERT_EQ(tr.times.size(), 5001u);
  EXPECT_NEAR(tr.times.back(), 5.0, 1e-12);
  EXPECT_LT(max_error(tr, 0, [](double t) { return std::exp(-t); }), 1e-3);
}

TEST(Simulate, DiagonalMatchesMittagLeffler) {
  for (double alpha : {0.5, 0.75, 1.2, 1.8}) {
    const Matrix a = mat({{-1, 0}, {0, -0.3}});
    const Trajectory tr = simulate(a, alpha, Vector::Ones(2), 4.0, 1e-3);
    for (int c = 0; c < 2; ++c) {
      const double lam = a(c, c);
      const double err = max_error(tr, c, [&](double t) { return mittag_leffler(alpha, lam * std::pow(t, alpha)); });
      EXPECT_LT(err, 5e-3) << "alpha " << alpha << " comp " << c;
    }
  }
}

TEST(Simulate, FirstStepFollowsRecursion) {
  // y_1 = (1 - h^a lam)^-1 h^a lam x0 for the scalar case.
  for (double alpha : {0.5, 1.5}) {
    const double lam = -2.0, h = 1e-3, ha = std::pow(h, alpha);
    const Trajectory tr = simulate(mat({{lam}}), alpha, Vector::Ones(1), 2 * h, h);
    EXPECT_NEAR(tr.states[1](0), 1.0 + ha * lam / (1.0 - ha * lam), 1e-15);
    const double y2 = (ha * lam - gl_weights(alpha, 2)[1] * (tr.states[1](0) - 1.0)) / (1.0 - ha * lam);
    EXPECT_NEAR(tr.states[2](0), 1.0 + y2, 1e-15);
  }
}

TEST(Simulate, OrderOneConvergence) {
  const Matrix a = mat({{-1}});
  auto err = [&](double h) {
    const Trajectory tr = simulate(a, 0.6, Vector::Ones(1), 2.0, h);
    return std::abs(tr.states.back()(0) - mittag_leffler(0.6, -std::pow(2.0, 0.6)));
  };
  const double e1 = err(0.01), e2 = err(0.005);
  EXPECT_LT(e2, e1);
  EXPECT_GT(e1 / e2, 1.6);
}

TEST(Simulate, Linearity) {
  const Matrix a = mat({{-1, 2}, {-2, -1}});
  const Vector x1 = (Vector(2) << 1, 0).finished(), x2 = (Vector(2) << 0.5, -2).finished();
  const Trajectory t1 = simulate(a, 0.8, x1, 2.0, 0.01);
  const Trajectory t2 = simulate(a, 0.8, x2, 2.0, 0.01);
  const Trajectory t3 = simulate(a, 0.8, 2.0 * x1 - 3.0 * x2, 2.0, 0.01);
  for (std::size_t k = 0; k < t3.states.size(); ++k) {
    EXPECT_LE((t3.states[k] - (2.0 * t1.states[k] - 3.0 * t2.states[k])).norm(), 1e-10);
  }
}

TEST(Simulate, StabilityIsReflected) {
  const Matrix rot = mat({{0.1, 1}, {-1, 0.1}});  // arg ~ 84 degrees
  const Vector x0 = Vector::Ones(2);
  ASSERT_TRUE(sector_margin(rot, 0.5).stable);
  ASSERT_FALSE(sector_margin(rot, 1.5).stable);
  const Trajectory s = simulate(rot, 0.5, x0, 40.0, 0.02);
  EXPECT_LT(s.states.back().norm(), 0.5 * x0.norm());
  const Trajectory u = simulate(rot, 1.5, x0, 40.0, 0.02);
  EXPECT_GT(u.states.back().norm(), 10.0 * x0.norm());
}

TEST(Simulate, Errors) {
  const Matrix a = mat({{-1}});
  const Vector x0 = Vector::Ones(1);
  EXPECT_EQ(code_of([&] { simulate(a, 2.0, x0, 1.0, 0.1); }), Errc::kAlphaOutOfRange);
  EXPECT_EQ(code_of([&] { simulate(a, 0.5, x0, 1.0, 0.0); }), Errc::kInvalidArgument);
  EXPECT_EQ(code_of([&] { simulate(a, 0.5, x0, -1.0, 0.1); }), Errc::kInvalidArgument);
  EXPECT_EQ(code_of([&] { simulate(a, 0.5, Vector::Ones(2), 1.0, 0.1); }), Errc::kShapeMismatch);
  EXPECT_EQ(code_of([&] { simulate(mat({{-1e7}}), 0.5, x0, 1.0, 0.1); }), Errc::kStepTooLarge);
  EXPECT_EQ(code_of([&] { simulate(mat({{1}}), 1.0, x0, 1.0, 1.0); }), Errc::kSingularStep);
  EXPECT_EQ(code_of([&] { simulate(a, 0.5, x0, 1e4, 1e-3); }), Errc::kInvalidArgument);
}

TEST(TrajectoryCsv, Format) {
  const Trajectory tr = simulate(mat({{-1, 0}, {0, -2}}), 1.0, Vector::Ones(2), 0.2, 0.1);
  std::ostringstream os;
  write_trajectory_csv(os, tr);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "t,x1,x2");
  std::getline(is, line);
  EXPECT_EQ(line, "0,1,1");
  int rows = 1;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 3);
  EXPECT_EQ(os.str().find('\r'), std::string::npos);
}

// Center closed loop of example1 with the controller in
// controllers/table1_nc1.json. Reference |x(10)|/|x(0)| from an independent
// high-precision matrix Mittag-Leffler evaluation: 0.011804.
TEST(Simulate, Example1FirstOrderControllerDecay) {
  const UncertaintyFactors f = decompose(fodof::testing::example1());
  const DynamicController k{1, mat({{-5.55}}), mat({{-0.43}}), mat({{-1.25}}), mat({{-26.55}})};
  const Matrix acl = closed_loop(f.a0, f.b0, mat({{1, 0, 1}}), k);
  const Vector x0 = (Vector(4) << 1, 1, 1, 0).finished();
  const Trajectory tr = simulate(acl, 0.75, x0, 10.0, 0.01);
  const double ratio = tr.states.back().norm() / x0.norm();
  EXPECT_NEAR(ratio, 0.011804, 2e-4);
}
