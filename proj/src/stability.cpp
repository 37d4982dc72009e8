#include "fodof/stability.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fodof/errors.hpp"

namespace fodof {

void DynamicController::validate(int inputs, int outputs) const {
  auto shape = [](const Matrix& m, Eigen::Index r, Eigen::Index c, const char* name) {
    if (m.rows() != r || m.cols() != c) {
      throw Error(Errc::kShapeMismatch, std::string(name) + " is " + std::to_string(m.rows()) + "x" +
                                            std::to_string(m.cols()) + ", expected " +
                                            std::to_string(r) + "x" + std::to_string(c));
    }
    if (!m.allFinite()) throw Error(Errc::kInvalidArgument, std::string(name) + " has non-finite entries");
  };
  if (n_c < 0) throw Error(Errc::kShapeMismatch, "negative controller order");
  shape(a_c, n_c, n_c, "A_c");
  shape(b_c, n_c, outputs, "B_c");
  shape(c_c, inputs, n_c, "C_c");
  shape(d_c, inputs, outputs, "D_c");
}

SectorReport sector_margin(const Matrix& a, double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw Error(Errc::kAlphaOutOfRange, "alpha must lie in (0, 2)");
  SectorReport r;
  r.alpha = alpha;
  r.eigenvalues = eig_general(a);
  const double boundary = alpha * std::numbers::pi / 2.0;
  r.margin = std::numeric_limits<double>::infinity();
  for (const Complex& l : r.eigenvalues) {
    const double arg = std::abs(l) < kZeroEigenvalue ? 0.0 : std::abs(std::arg(l));
    r.margin = std::min(r.margin, arg - boundary);
  }
  r.stable = r.margin > 0.0;
  return r;
}

double theta_below_one(double alpha) { return (1.0 - alpha) * std::numbers::pi / 2.0; }
double theta_above_one(double alpha) { return std::numbers::pi - alpha * std::numbers::pi / 2.0; }

Matrix rotated_real_part(const Matrix& x_re, const Matrix& x_im, double theta) {
  return 2.0 * std::cos(theta) * x_re - 2.0 * std::sin(theta) * x_im;
}

Matrix lemma2_matrix(const Matrix& a, const Matrix& x_re, const Matrix& x_im, double alpha) {
  const Matrix q = rotated_real_part(x_re, x_im, theta_below_one(alpha));
  return q.transpose() * a.transpose() + a * q;
}

Matrix lemma3_matrix(const Matrix& a, const Matrix& x, double alpha) {
  const double th = theta_above_one(alpha);
  const Matrix s = (a.transpose() * x + x * a) * std::sin(th);
  const Matrix k = (x * a - a.transpose() * x) * std::cos(th);
  const Eigen::Index n = a.rows();
  Matrix out(2 * n, 2 * n);
  out << s, k, k.transpose(), s;
  return out;
}

namespace {

void require_square(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) throw Error(Errc::kNonSquare, "analysis matrix must be square");
}

void require_decided(const SdpSolution& sol) {
  if (sol.status == SolveStatus::kIndeterminate) {
    throw Error(Errc::kSolverFailure, "analysis LMI undecided after " + std::to_string(sol.iterations) +
                                          " iterations");
  }
}

}  // namespace

LemmaCertificate lemma2_feasible(const Matrix& a, double alpha, const SolverConfig& cfg) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::kAlphaOutOfRange, "lemma2 needs 0 < alpha < 1");
  require_square(a);
  const int n = static_cast<int>(a.rows());
  const double th = theta_below_one(alpha);

  LmiProblem p;
  const MatrixVariable x = p.declare_symmetric(n, "X");
  const MatrixVariable y = p.declare_skew(n, "Y");
  const AffineExpr q = 2.0 * std::cos(th) * x.expr - 2.0 * std::sin(th) * y.expr;
  p.add_constraint(q.transpose() * Matrix(a.transpose()) + a * q, Sense::kNegativeDefinite, "lyapunov");
  p.add_constraint(AffineExpr::blocks({{x.expr, -y.expr}, {y.expr, x.expr}}), Sense::kPositiveDefinite,
                   "hermitian_pd");

  LemmaCertificate out;
  out.solution = solve_feasibility(p, cfg);
  require_decided(out.solution);
  out.feasible = out.solution.status == SolveStatus::kFeasible;
  out.x_re = x.value(out.solution.values);
  out.x_im = y.value(out.solution.values);
  return out;
}

LemmaCertificate lemma3_feasible(const Matrix& a, double alpha, const SolverConfig& cfg) {
  if (!(alpha >= 1.0 && alpha < 2.0)) throw Error(Errc::kAlphaOutOfRange, "lemma3 needs 1 <= alpha < 2");
  require_square(a);
  const int n = static_cast<int>(a.rows());
  const double th = theta_above_one(alpha);

  LmiProblem p;
  const MatrixVariable x = p.declare_symmetric(n, "X");
  const Matrix at = a.transpose();
  const AffineExpr s = (at * x.expr + x.expr * a) * std::sin(th);
  const AffineExpr k = (x.expr * a - at * x.expr) * std::cos(th);
  p.add_constraint(AffineExpr::blocks({{s, k}, {k.transpose(), s}}), Sense::kNegativeDefinite, "sector");
  p.add_constraint(x.expr, Sense::kPositiveDefinite, "x_pd");

  LemmaCertificate out;
  out.solution = solve_feasibility(p, cfg);
  require_decided(out.solution);
  out.feasible = out.solution.status == SolveStatus::kFeasible;
  out.x_re = x.value(out.solution.values);
  return out;
}

LemmaCertificate analysis_lmi_feasible(const Matrix& a, double alpha, const SolverConfig& cfg) {
  return alpha < 1.0 ? lemma2_feasible(a, alpha, cfg) : lemma3_feasible(a, alpha, cfg);
}

Matrix closed_loop(const Matrix& a, const Matrix& b, const Matrix& c, const DynamicController& k) {
  if (a.rows() != a.cols() || b.rows() != a.rows() || c.cols() != a.rows()) {
    throw Error(Errc::kShapeMismatch, "plant matrices do not fit together");
  }
  k.validate(static_cast<int>(b.cols()), static_cast<int>(c.rows()));
  const Eigen::Index n = a.rows();
  const Eigen::Index nc = k.n_c;
  Matrix out(n + nc, n + nc);
  out.topLeftCorner(n, n) = a + b * k.d_c * c;
  if (nc > 0) {
    out.topRightCorner(n, nc) = b * k.c_c;
    out.bottomLeftCorner(nc, n) = k.b_c * c;
    out.bottomRightCorner(nc, nc) = k.a_c;
  }
  return out;
}

}  // namespace fodof
