#pragma once

#include <vector>

#include "fodof/controller.hpp"
#include "fodof/lmi.hpp"
#include "fodof/matrix_core.hpp"

namespace fodof {

// Eigenvalue sector test for D^alpha x = A x: stable iff every eigenvalue
// satisfies |arg(lambda)| > alpha*pi/2.
struct SectorReport {
  double alpha = 0.0;
  std::vector<Complex> eigenvalues;
  double margin = 0.0;  // radians, min |arg(lambda)| - alpha*pi/2
  bool stable = false;
};

// Eigenvalues with modulus below this count as zero (arg taken as 0).
inline constexpr double kZeroEigenvalue = 1e-12;

SectorReport sector_margin(const Matrix& a, double alpha);

// Result of an analysis LMI. For the 0 < alpha < 1 test the certificate is
// the Hermitian X = x_re + i*x_im; for 1 <= alpha < 2 x_im is empty.
struct LemmaCertificate {
  bool feasible = false;
  Matrix x_re;
  Matrix x_im;
  SdpSolution solution;
};

// theta = (1 - alpha)*pi/2 for the fractional-below-one test.
double theta_below_one(double alpha);
// theta = pi - alpha*pi/2 for the 1 <= alpha < 2 test.
double theta_above_one(double alpha);

// Real image rX + conj(r)conj(X) = 2cos(theta) X_re - 2sin(theta) X_im of a
// Hermitian X with r = exp(i*theta).
Matrix rotated_real_part(const Matrix& x_re, const Matrix& x_im, double theta);

// Left-hand sides of the two analysis inequalities at a given certificate.
Matrix lemma2_matrix(const Matrix& a, const Matrix& x_re, const Matrix& x_im, double alpha);
Matrix lemma3_matrix(const Matrix& a, const Matrix& x, double alpha);

/// 0 < alpha < 1: exists Hermitian X > 0 with Q^T A^T + A Q < 0, Q the real
/// image of rX + conj(r X). Throws kAlphaOutOfRange, kNonSquare, and
/// kSolverFailure when the solver cannot decide.
LemmaCertificate lemma2_feasible(const Matrix& a, double alpha, const SolverConfig& cfg = {});

/// 1 <= alpha < 2: exists symmetric X > 0 with
/// [[(A^T X + X A) s, (X A - A^T X) c], [*, (A^T X + X A) s]] < 0.
LemmaCertificate lemma3_feasible(const Matrix& a, double alpha, const SolverConfig& cfg = {});

// Dispatches on alpha (alpha = 1 goes to the lemma3 form).
LemmaCertificate analysis_lmi_feasible(const Matrix& a, double alpha, const SolverConfig& cfg = {});

// [[A + B Dc C, B Cc], [Bc C, Ac]]; just A + B Dc C when n_c = 0.
Matrix closed_loop(const Matrix& a, const Matrix& b, const Matrix& c, const DynamicController& k);

}  // namespace fodof
