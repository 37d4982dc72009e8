#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "fodof/errors.hpp"
#include "fodof/stability.hpp"
#include "test_support.hpp"

using namespace fodof;
using fodof::testing::mat;

namespace {

constexpr double kPi = std::numbers::pi;

Matrix random_matrix(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = g(rng);
  return m;
}

}  // namespace

TEST(SectorMargin, Examples) {
  const SectorReport a = sector_margin(mat({{-1}}), 0.75);
  EXPECT_NEAR(a.margin, kPi - 0.375 * kPi, 1e-14);
  EXPECT_TRUE(a.stable);

  const Matrix rot = mat({{0, 1}, {-1, 0}});
  const SectorReport b = sector_margin(rot, 0.75);
  EXPECT_NEAR(b.margin, kPi / 2 - 0.375 * kPi, 1e-12);
  EXPECT_TRUE(b.stable);
  EXPECT_FALSE(sector_margin(rot, 1.2).stable);
  EXPECT_LT(sector_margin(rot, 1.2).margin, 0.0);

  const UncertaintyFactors f2 = decompose(fodof::testing::example2());
  EXPECT_FALSE(sector_margin(f2.a0, 1.2).stable);
}

TEST(SectorMargin, ZeroEigenvalueIsUnstable) {
  const SectorReport r = sector_margin(mat({{0, 0}, {0, -1}}), 0.5);
  EXPECT_FALSE(r.stable);
  EXPECT_NEAR(r.margin, -0.25 * kPi, 1e-14);
}

TEST(SectorMargin, Errors) {
  EXPECT_THROW(sector_margin(Matrix::Zero(2, 3), 0.5), Error);
  EXPECT_THROW(sector_margin(mat({{-1}}), 0.0), Error);
  EXPECT_THROW(sector_margin(mat({{-1}}), 2.0), Error);
}

TEST(RotatedRealPart, MatchesComplexIdentity) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix re0 = random_matrix(rng, 3), im0 = random_matrix(rng, 3);
    const Matrix re = re0 + re0.transpose(), im = im0 - im0.transpose();
    const double theta = 0.1 * trial;
    const Complex r = std::polar(1.0, theta);
    const ComplexMatrix x = re.cast<Complex>() + Complex(0, 1) * im.cast<Complex>();
    const ComplexMatrix direct = r * x + std::conj(r) * x.conjugate();
    EXPECT_LE(direct.imag().norm(), 1e-12);
    EXPECT_TRUE(direct.real().isApprox(rotated_real_part(re, im, theta), 1e-12));
  }
}

TEST(Lemma2, ScalarExamples) {
  const LemmaCertificate ok = lemma2_feasible(mat({{-1}}), 0.5);
  EXPECT_TRUE(ok.feasible);
  EXPECT_GT(ok.x_re(0, 0), 0.0);
  EXPECT_LT(lemma2_matrix(mat({{-1}}), ok.x_re, ok.x_im, 0.5)(0, 0), 0.0);
  EXPECT_FALSE(lemma2_feasible(mat({{1}}), 0.5).feasible);
  EXPECT_THROW(lemma2_feasible(mat({{-1}}), 1.0), Error);
  EXPECT_THROW(lemma2_feasible(Matrix::Zero(2, 3), 0.5), Error);
}

TEST(Lemma3, ScalarAndRotationExamples) {
  EXPECT_TRUE(lemma3_feasible(mat({{-1}}), 1.5).feasible);
  EXPECT_FALSE(lemma3_feasible(mat({{0, 1}, {-1, 0}}), 1.2).feasible);
  EXPECT_TRUE(lemma3_feasible(mat({{-1}}), 1.0).feasible);
  EXPECT_THROW(lemma3_feasible(mat({{-1}}), 0.9), Error);
}

TEST(AnalysisLmi, CertificateValidityAndScaling) {
  const SolverConfig cfg;
  const Matrix a = mat({{-2, 0.5, 0}, {-0.5, -2, 0}, {0, 1, -0.5}});  // args 166 and 180 degrees
  for (double alpha : {0.3, 0.75}) {
    const LemmaCertificate c = lemma2_feasible(a, alpha, cfg);
    ASSERT_TRUE(c.feasible);
    const Matrix e = hermitian_real_embedding(c.x_re.cast<Complex>() + Complex(0, 1) * c.x_im.cast<Complex>());
    EXPECT_TRUE(is_positive_definite(e, cfg.eps_margin * 0.99));
    EXPECT_LE(max_symmetric_eigenvalue(lemma2_matrix(a, c.x_re, c.x_im, alpha)), -cfg.eps_margin);
    for (double s : {0.5, 3.0}) {
      EXPECT_LT(max_symmetric_eigenvalue(lemma2_matrix(a, s * c.x_re, s * c.x_im, alpha)), 0.0);
    }
  }
  for (double alpha : {1.2, 1.8}) {
    const LemmaCertificate c = lemma3_feasible(a, alpha, cfg);
    ASSERT_TRUE(c.feasible);
    EXPECT_TRUE(is_positive_definite(c.x_re, cfg.eps_margin * 0.99));
    EXPECT_LE(max_symmetric_eigenvalue(lemma3_matrix(a, c.x_re, alpha)), -cfg.eps_margin);
    for (double s : {0.5, 3.0}) EXPECT_LT(max_symmetric_eigenvalue(lemma3_matrix(a, s * c.x_re, alpha)), 0.0);
  }
}

// Smaller version of the acceptance sweep; the full 200-per-order run lives
// in the acceptance suite.
TEST(AnalysisLmi, AgreesWithSectorOracle) {
  std::mt19937_64 rng(99);
  for (double alpha : {0.3, 0.75, 1.2, 1.8}) {
    int checked = 0;
    for (int trial = 0; trial < 40; ++trial) {
      const Matrix a = random_matrix(rng, 3);
      const double margin = sector_margin(a, alpha).margin;
      if (std::abs(margin) <= 1e-3) continue;
      ++checked;
      EXPECT_EQ(analysis_lmi_feasible(a, alpha).feasible, margin > 0.0) << "alpha " << alpha << " margin " << margin;
    }
    EXPECT_GT(checked, 30);
  }
}

TEST(ClosedLoop, BlockStructure) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 1.0);
  auto rnd = [&](int r, int c) {
    Matrix m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = g(rng);
    return m;
  };
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3, l = 2, m = 2, nc = trial % 3;
    const Matrix a = rnd(n, n), b = rnd(n, l), c = rnd(m, n);
    DynamicController k{nc, rnd(nc, nc), rnd(nc, m), rnd(l, nc), rnd(l, m)};
    const Matrix cl = closed_loop(a, b, c, k);
    ASSERT_EQ(cl.rows(), n + nc);
    Matrix expect(n + nc, n + nc);
    if (nc > 0) {
      expect << a + b * k.d_c * c, b * k.c_c, k.b_c * c, k.a_c;
    } else {
      expect = a + b * k.d_c * c;
    }
    EXPECT_TRUE(cl.isApprox(expect, 1e-14));
  }
  const Matrix a = mat({{1, 2}, {3, 4}});
  EXPECT_EQ(closed_loop(a, mat({{1}, {0}}), mat({{1, 1}}), DynamicController::static_gain(mat({{0}}))), a);
  EXPECT_THROW(closed_loop(a, mat({{1}, {0}}), mat({{1, 1}}), DynamicController::static_gain(mat({{0, 0}}))), Error);
}

TEST(ClosedLoop, FixtureControllersOnExample1Center) {
  const UncertaintyFactors f = decompose(fodof::testing::example1());
  const Matrix c = mat({{1, 0, 1}});
  EXPECT_GT(sector_margin(closed_loop(f.a0, f.b0, c, DynamicController::static_gain(mat({{-24.86}}))), 0.75).margin, 0.0);
  const DynamicController k1{1, mat({{-5.55}}), mat({{-0.43}}), mat({{-1.25}}), mat({{-26.55}})};
  EXPECT_GT(sector_margin(closed_loop(f.a0, f.b0, c, k1), 0.75).margin, 0.0);
}
