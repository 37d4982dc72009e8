#include "fodof/interval_model.hpp"

#include <cmath>
#include <random>
#include <string>

#include "fodof/errors.hpp"

namespace fodof {

IntervalMatrix::IntervalMatrix(Matrix lo, Matrix hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.rows() != upper.rows() || lower.cols() != upper.cols()) {
    throw Error(Errc::kShapeMismatch, "interval bounds have different shapes");
  }
  if (!lower.allFinite() || !upper.allFinite()) {
    throw Error(Errc::kInvalidArgument, "interval bounds must be finite");
  }
}

bool IntervalMatrix::contains(const Matrix& m, double tol) const {
  if (m.rows() != rows() || m.cols() != cols()) return false;
  return ((m - lower).array() >= -tol).all() && ((upper - m).array() >= -tol).all();
}

UncertainFoltiSystem::UncertainFoltiSystem(double alpha_, IntervalMatrix a_, IntervalMatrix b_,
                                           Matrix c_)
    : alpha(alpha_), a(std::move(a_)), b(std::move(b_)), c(std::move(c_)) {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw Error(Errc::kAlphaOutOfRange, "alpha must lie in (0, 2), got " + std::to_string(alpha));
  }
  if (a.rows() < 1 || a.rows() != a.cols()) throw Error(Errc::kShapeMismatch, "A must be square");
  if (b.rows() != a.rows() || b.cols() < 1) {
    throw Error(Errc::kShapeMismatch, "B must have as many rows as A");
  }
  if (c.cols() != a.rows() || c.rows() < 1) {
    throw Error(Errc::kShapeMismatch, "C must have as many columns as A");
  }
}

namespace {

struct Factor {
  Matrix center, radius, m, r;
};

// m, r close to sqrt(g) with fl(m * r) == g, so that the factor product
// reproduces the radius bit for bit.
std::pair<double, double> exact_split(double g) {
  if (g == 0.0) return {0.0, 0.0};
  double m = std::sqrt(g);
  for (int outer = 0; outer < 8; ++outer) {
    double r = g / m;
    for (int k = 0; k < 4; ++k) {
      if (m * r == g) return {m, r};
      r = std::nextafter(r, m * r < g ? INFINITY : 0.0);
    }
    m = std::nextafter(m, outer % 2 ? INFINITY : 0.0);
  }
  return {g, 1.0};
}

// n x k interval -> center, radius, m (n x nk), r (nk x k).
Factor factor(const IntervalMatrix& iv, const char* name) {
  if (((iv.upper - iv.lower).array() < 0.0).any()) {
    throw Error(Errc::kBoundViolation, std::string(name) + ": lower bound exceeds upper bound");
  }
  const Eigen::Index n = iv.rows();
  const Eigen::Index k = iv.cols();
  Factor f;
  f.center = 0.5 * (iv.lower + iv.upper);
  f.radius = 0.5 * (iv.upper - iv.lower);
  f.m = Matrix::Zero(n, n * k);
  f.r = Matrix::Zero(n * k, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      const auto [mi, ri] = exact_split(f.radius(i, j));
      f.m(i, i * k + j) = mi;
      f.r(i * k + j, j) = ri;
    }
  }
  return f;
}

Matrix apply(const Matrix& center, const Matrix& m, const std::vector<double>& d, const Matrix& r,
             const IntervalMatrix& bounds) {
  Eigen::Map<const Vector> diag(d.data(), static_cast<Eigen::Index>(d.size()));
  Matrix out = center + m * diag.asDiagonal() * r;
  const Eigen::Index cols = out.cols();
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double f = d[static_cast<std::size_t>(i * cols + j)];
      if (f == 1.0) out(i, j) = bounds.upper(i, j);
      if (f == -1.0) out(i, j) = bounds.lower(i, j);
    }
  }
  return out;
}

void check_unit_box(const std::vector<double>& v, std::size_t expected, const char* name) {
  if (v.size() != expected) {
    throw Error(Errc::kLengthMismatch, std::string(name) + " has " + std::to_string(v.size()) +
                                           " entries, expected " + std::to_string(expected));
  }
  for (double x : v) {
    if (!(std::abs(x) <= 1.0)) throw Error(Errc::kOutOfUnitBox, std::string(name) + " entry outside [-1, 1]");
  }
}

}  // namespace

UncertaintyFactors decompose(const UncertainFoltiSystem& sys) {
  Factor fa = factor(sys.a, "A");
  Factor fb = factor(sys.b, "B");
  return {std::move(fa.center), std::move(fa.radius), std::move(fa.m), std::move(fa.r),
          std::move(fb.center), std::move(fb.radius), std::move(fb.m), std::move(fb.r),
          sys.a,              sys.b};
}

RealizedPlant realize(const UncertaintyFactors& f, const UncertaintyRealization& u) {
  check_unit_box(u.f_a, static_cast<std::size_t>(f.m_a.cols()), "f_a");
  check_unit_box(u.f_b, static_cast<std::size_t>(f.m_b.cols()), "f_b");
  return {apply(f.a0, f.m_a, u.f_a, f.r_a, f.a_bounds), apply(f.b0, f.m_b, u.f_b, f.r_b, f.b_bounds)};
}

int uncertain_entry_count(const UncertaintyFactors& f) {
  return static_cast<int>((f.delta_a.array() > 0.0).count() + (f.delta_b.array() > 0.0).count());
}

std::uint64_t vertex_count(const UncertaintyFactors& f) {
  const int k = uncertain_entry_count(f);
  if (k > kMaxVertexBits) {
    throw Error(Errc::kTooManyVertices,
                std::to_string(k) + " uncertain entries exceed the 2^" +
                    std::to_string(kMaxVertexBits) + " vertex cap");
  }
  return std::uint64_t{1} << k;
}

UncertaintyRealization vertex(const UncertaintyFactors& f, std::uint64_t index) {
  UncertaintyRealization u;
  u.f_a.assign(static_cast<std::size_t>(f.delta_a.size()), 0.0);
  u.f_b.assign(static_cast<std::size_t>(f.delta_b.size()), 0.0);
  int bit = 0;
  auto fill = [&](const Matrix& radius, std::vector<double>& out) {
    for (Eigen::Index i = 0; i < radius.rows(); ++i) {
      for (Eigen::Index j = 0; j < radius.cols(); ++j) {
        if (radius(i, j) > 0.0) {
          out[static_cast<std::size_t>(i * radius.cols() + j)] = ((index >> bit) & 1U) ? 1.0 : -1.0;
          ++bit;
        }
      }
    }
  };
  fill(f.delta_a, u.f_a);
  fill(f.delta_b, u.f_b);
  return u;
}

std::vector<UncertaintyRealization> enumerate_vertices(const UncertaintyFactors& f) {
  const std::uint64_t count = vertex_count(f);
  std::vector<UncertaintyRealization> out;
  out.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) out.push_back(vertex(f, i));
  return out;
}

std::vector<UncertaintyRealization> sample_uniform(const UncertaintyFactors& f, int count,
                                                   std::uint64_t seed) {
  if (count < 1) throw Error(Errc::kInvalidArgument, "sample count must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<UncertaintyRealization> out(static_cast<std::size_t>(count));
  for (auto& u : out) {
    u.f_a.resize(static_cast<std::size_t>(f.delta_a.size()));
    u.f_b.resize(static_cast<std::size_t>(f.delta_b.size()));
    for (double& x : u.f_a) x = unit(rng);
    for (double& x : u.f_b) x = unit(rng);
  }
  return out;
}

}  // namespace fodof
