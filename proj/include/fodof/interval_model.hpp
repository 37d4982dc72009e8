#pragma once

#include <cstdint>
#include <vector>

#include "fodof/matrix_core.hpp"

namespace fodof {

// Elementwise bounds [lower, upper]. Shapes are checked on construction;
// ordering of the bounds is checked by decompose().
struct IntervalMatrix {
  Matrix lower;
  Matrix upper;

  IntervalMatrix() = default;
  IntervalMatrix(Matrix lo, Matrix hi);
  static IntervalMatrix point(const Matrix& m) { return {m, m}; }

  Eigen::Index rows() const { return lower.rows(); }
  Eigen::Index cols() const { return lower.cols(); }
  bool contains(const Matrix& m, double tol = 0.0) const;
};

// D^alpha x = A x + B u, y = C x with A in a, B in b, C certain.
struct UncertainFoltiSystem {
  double alpha = 0.0;
  IntervalMatrix a;
  IntervalMatrix b;
  Matrix c;

  UncertainFoltiSystem() = default;
  UncertainFoltiSystem(double alpha, IntervalMatrix a, IntervalMatrix b, Matrix c);

  int states() const { return static_cast<int>(a.rows()); }
  int inputs() const { return static_cast<int>(b.cols()); }
  int outputs() const { return static_cast<int>(c.rows()); }
};

// Midpoint/radius split of A and B together with the rank-one factors
// A = a0 + m_a * F_A * r_a, F_A = diag(f) with |f| <= 1. Column/row k of
// m_a/r_a belongs to entry (i, j) with k = i * cols + j.
struct UncertaintyFactors {
  Matrix a0, delta_a, m_a, r_a;
  Matrix b0, delta_b, m_b, r_b;
  // Original bounds; realize() returns them verbatim for f = +-1.
  IntervalMatrix a_bounds, b_bounds;

  int states() const { return static_cast<int>(a0.rows()); }
  int inputs() const { return static_cast<int>(b0.cols()); }
};

struct UncertaintyRealization {
  std::vector<double> f_a;  // n*n entries, row-major over (i, j)
  std::vector<double> f_b;  // n*l entries
};

UncertaintyFactors decompose(const UncertainFoltiSystem& sys);

struct RealizedPlant {
  Matrix a;
  Matrix b;
};

RealizedPlant realize(const UncertaintyFactors& f, const UncertaintyRealization& u);

// Number of uncertain (strictly positive radius) entries of A and B.
int uncertain_entry_count(const UncertaintyFactors& f);

inline constexpr int kMaxVertexBits = 24;

// 2^k for k = uncertain_entry_count(f); throws kTooManyVertices past 2^24.
std::uint64_t vertex_count(const UncertaintyFactors& f);

// Vertex number `index`: bit b selects the sign of the b-th uncertain entry
// (A entries first, row-major, then B); set bit means +1. Zero-radius entries
// stay at 0.
UncertaintyRealization vertex(const UncertaintyFactors& f, std::uint64_t index);

std::vector<UncertaintyRealization> enumerate_vertices(const UncertaintyFactors& f);

// i.i.d. uniform draws on [-1, 1]; deterministic for a given seed.
std::vector<UncertaintyRealization> sample_uniform(const UncertaintyFactors& f, int count,
                                                   std::uint64_t seed);

}  // namespace fodof
