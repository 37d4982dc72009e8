#include "fodof/fosim.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "fodof/errors.hpp"

namespace fodof {

std::vector<double> gl_weights(double alpha, int count) {
  if (count < 1) throw Error(Errc::kInvalidArgument, "weight count must be >= 1");
  std::vector<double> w(static_cast<std::size_t>(count));
  w[0] = 1.0;
  for (std::size_t j = 1; j < w.size(); ++j) {
    w[j] = w[j - 1] * (1.0 - (alpha + 1.0) / static_cast<double>(j));
  }
  return w;
}

Trajectory simulate(const Matrix& a_cl, double alpha, const Vector& x0, double t_end, double h) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw Error(Errc::kAlphaOutOfRange, "alpha must lie in (0, 2)");
  if (a_cl.rows() != a_cl.cols()) throw Error(Errc::kNonSquare, "closed-loop matrix must be square");
  if (x0.size() != a_cl.rows()) throw Error(Errc::kShapeMismatch, "x0 length does not match the system");
  if (!(h > 0.0) || !std::isfinite(h)) throw Error(Errc::kInvalidArgument, "step h must be positive");
  if (!(t_end >= h) || !std::isfinite(t_end)) throw Error(Errc::kInvalidArgument, "t_end must be >= h");
  const double steps_real = std::round(t_end / h);
  if (steps_real > kMaxSimulationSteps) {
    throw Error(Errc::kInvalidArgument, "horizon needs more than " + std::to_string(kMaxSimulationSteps) + " steps");
  }
  const auto steps = static_cast<std::size_t>(steps_real);
  const Eigen::Index n = a_cl.rows();
  const double ha = std::pow(h, alpha);

  double rho = 0.0;
  for (const Complex& l : eig_general(a_cl)) rho = std::max(rho, std::abs(l));
  if (ha * rho > kMaxStepSpectralRadius) {
    throw Error(Errc::kStepTooLarge, "h^alpha * spectral radius = " + std::to_string(ha * rho));
  }

  const Matrix step_matrix = Matrix::Identity(n, n) - ha * a_cl;
  Eigen::PartialPivLU<Matrix> lu(step_matrix);
  if (!(condition_number(step_matrix) < 1e12)) {
    throw Error(Errc::kSingularStep, "I - h^alpha A_cl is numerically singular");
  }

  const std::vector<double> w = gl_weights(alpha, static_cast<int>(steps) + 1);
  const Vector forcing = ha * (a_cl * x0);

  // Column k of y holds x(t_k) - x0.
  Matrix y = Matrix::Zero(n, static_cast<Eigen::Index>(steps) + 1);
  Vector memory(n);
  for (std::size_t k = 1; k <= steps; ++k) {
    memory.setZero();
    for (std::size_t j = 1; j <= k; ++j) memory += w[j] * y.col(static_cast<Eigen::Index>(k - j));
    y.col(static_cast<Eigen::Index>(k)) = lu.solve(forcing - memory);
  }

  Trajectory traj;
  traj.alpha = alpha;
  traj.step_h = h;
  traj.times.resize(steps + 1);
  traj.states.resize(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    traj.times[k] = static_cast<double>(k) * h;
    traj.states[k] = y.col(static_cast<Eigen::Index>(k)) + x0;
  }
  return traj;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const std::size_t dim = traj.states.empty() ? 0 : static_cast<std::size_t>(traj.states.front().size());
  os << "t";
  for (std::size_t i = 1; i <= dim; ++i) os << ",x" << i;
  os << '\n';
  char buf[32];
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.9g", traj.times[k]);
    os << buf;
    for (Eigen::Index i = 0; i < traj.states[k].size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.9g", traj.states[k](i));
      os << ',' << buf;
    }
    os << '\n';
  }
}

}  // namespace fodof
