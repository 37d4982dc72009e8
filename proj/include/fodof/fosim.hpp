#pragma once

#include <iosfwd>
#include <vector>

#include "fodof/matrix_core.hpp"

namespace fodof {

// Uniformly sampled solution of D^alpha x = A_cl x starting at times[0] = 0.
struct Trajectory {
  double alpha = 0.0;
  double step_h = 0.0;
  std::vector<double> times;
  std::vector<Vector> states;
};

// Coefficients of (1 - z)^alpha: w_0 = 1, w_j = w_{j-1} * (1 - (alpha + 1)/j).
std::vector<double> gl_weights(double alpha, int count);

// Largest step count simulate() accepts; the full-memory sum is O(steps^2).
inline constexpr int kMaxSimulationSteps = 200000;

/// Caputo D^alpha x = a_cl x, 0 < alpha < 2, by the implicit Grunwald-Letnikov
/// scheme on y = x - x0 (for 1 < alpha < 2 the initial velocity is zero).
///
/// Memory is never truncated. Throws kAlphaOutOfRange, kInvalidArgument for
/// bad h / t_end / x0, kSingularStep when I - h^alpha a_cl is singular, and
/// kStepTooLarge when h^alpha * rho(a_cl) > kMaxStepSpectralRadius.
Trajectory simulate(const Matrix& a_cl, double alpha, const Vector& x0, double t_end, double h);

inline constexpr double kMaxStepSpectralRadius = 1e3;

/// E_alpha(z) = sum_k z^k / Gamma(alpha k + 1) for 0 < alpha < 2, |z| <= 50.
///
/// Power series in extended precision when cancellation is mild; for negative
/// z with heavy cancellation the Laplace-inversion integral representation is
/// used instead. Throws kDomainTooLarge outside |z| <= 50 or on overflow.
double mittag_leffler(double alpha, double z);

inline constexpr double kMittagLefflerDomain = 50.0;

// Header "t,x1,...,xN", one row per sample, 9 significant digits, LF endings.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace fodof
