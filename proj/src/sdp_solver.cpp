// Log-barrier path following for
//
//   minimize t  s.t.  G_k(x) <= t*I  (k = 1..K),  |x_i| <= box,
//
// where G_k is constraint k oriented so that "negative definite" is the goal.
// Each centering step is a damped Newton iteration on
//
//   tau*t - sum_k logdet(t*I - G_k(x)) - sum_i log(box^2 - x_i^2),
//
// and after centering the duality gap is nu/tau with nu the barrier degree.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <spdlog/spdlog.h>

#include "fodof/errors.hpp"
#include "fodof/lmi.hpp"

namespace fodof {
namespace {

constexpr double kCenteringTol = 1e-9;   // Newton decrement^2 / 2
constexpr double kRelativeGap = 1e-6;    // stop once gap <= kRelativeGap * |t|
constexpr double kTauGrowth = 10.0;
constexpr double kArmijo = 0.25;
constexpr int kMaxBacktracks = 60;

struct Oriented {
  Matrix g0;
  std::vector<int> vars;
  std::vector<Matrix> g;  // parallel to vars
};

class BarrierSolver {
 public:
  BarrierSolver(const LmiProblem& p, const SolverConfig& cfg) : cfg_(cfg), n_(p.num_vars()) {
    for (const auto& c : p.constraints()) {
      const double s = c.sense == Sense::kNegativeDefinite ? 1.0 : -1.0;
      Oriented o;
      o.g0 = s * c.constant;
      for (const auto& [k, m] : c.coeffs) {
        o.vars.push_back(k);
        o.g.push_back(s * m);
      }
      nu_ += static_cast<double>(c.dim());
      blocks_.push_back(std::move(o));
    }
    nu_ += 2.0 * n_;
  }

  SdpSolution run() {
    SdpSolution sol;
    Vector z = initial_point();
    Vector grad, newton;
    Matrix hess;

    if (!barrier_derivatives(z, grad, hess)) {
      throw Error(Errc::kSolverFailure, "initial point is not strictly feasible");
    }
    double tau = initial_tau(grad, hess, z(n_));
    int iter = 0;
    bool converged = false;
    SolveStatus status = SolveStatus::kIndeterminate;

    while (iter < cfg_.max_iter) {
      // Centering.
      bool centered = false;
      while (iter < cfg_.max_iter) {
        if (!barrier_derivatives(z, grad, hess)) {
          spdlog::debug("sdp: derivative evaluation failed at iter {}", iter);
          break;
        }
        grad(n_) += tau;
        if (!solve_newton(hess, grad, newton)) {
          spdlog::debug("sdp: Newton system failed at iter {}", iter);
          break;
        }
        const double decrement = -grad.dot(newton);
        if (decrement / 2.0 <= kCenteringTol) {
          centered = true;
          break;
        }
        ++iter;
        if (!line_search(z, newton, grad, tau)) {
          spdlog::debug("sdp: line search stalled at iter {} (decrement {:.3e})", iter, decrement);
          break;
        }
      }
      if (!centered) break;

      const double t = z(n_);
      const double gap = nu_ / tau;
      sol.lower_bound = t - gap;
      spdlog::debug("sdp: iter={} tau={:.3e} t={:.6e} gap={:.3e}", iter, tau, t, gap);
      if (t - gap > -cfg_.eps_margin) {
        status = SolveStatus::kInfeasible;
        converged = true;
        break;
      }
      if (t <= -cfg_.eps_margin && gap <= std::max(kRelativeGap * std::abs(t), cfg_.tol)) {
        status = SolveStatus::kFeasible;
        converged = true;
        break;
      }
      tau *= kTauGrowth;
    }

    sol.t = z(n_);
    sol.iterations = iter;
    sol.values.assign(z.data(), z.data() + n_);
    if (!converged) {
      // Out of iterations or numerically stuck: a strictly feasible iterate is
      // still a valid answer; t that has not come down to tol counts as
      // infeasible; only the band in between is undecided.
      if (sol.t <= -cfg_.eps_margin) {
        status = SolveStatus::kFeasible;
      } else if (sol.t >= cfg_.tol) {
        status = SolveStatus::kInfeasible;
      } else {
        status = SolveStatus::kIndeterminate;
      }
    }
    sol.status = status;
    return sol;
  }

 private:
  Vector initial_point() const {
    Vector z(n_ + 1);
    std::mt19937_64 rng(cfg_.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const double spread = std::min(1e-3, 0.5 * cfg_.box);
    for (int i = 0; i < n_; ++i) z(i) = spread * unit(rng);
    double lam = -std::numeric_limits<double>::infinity();
    for (const auto& b : blocks_) lam = std::max(lam, max_symmetric_eigenvalue(assemble(b, z)));
    if (!std::isfinite(lam)) lam = 0.0;
    z(n_) = lam + 1.0 + 0.1 * std::abs(lam);
    return z;
  }

  double initial_tau(const Vector& grad, const Matrix& hess, double t0) const {
    Vector e = Vector::Zero(n_ + 1);
    e(n_) = 1.0;
    Vector hg, he;
    if (solve_newton(hess, -grad, hg) && solve_newton(hess, -e, he)) {
      const double tau = -e.dot(hg) / e.dot(he);
      if (std::isfinite(tau) && tau > 0.0) return tau;
    }
    return nu_ / (1.0 + std::abs(t0));
  }

  Matrix assemble(const Oriented& b, const Vector& z) const {
    Matrix g = b.g0;
    for (std::size_t j = 0; j < b.vars.size(); ++j) g += z(b.vars[j]) * b.g[j];
    return g;
  }

  // Slack t*I - G(x) for block b; false if not positive definite.
  bool slack_cholesky(const Oriented& b, const Vector& z, Eigen::LLT<Matrix>& llt) const {
    Matrix s = -assemble(b, z);
    s.diagonal().array() += z(n_);
    llt.compute(s);
    return llt.info() == Eigen::Success;
  }

  bool inside_box(const Vector& z) const {
    for (int i = 0; i < n_; ++i) {
      if (!(std::abs(z(i)) < cfg_.box)) return false;
    }
    return std::isfinite(z(n_));
  }

  // Objective value, +inf outside the domain.
  double objective(const Vector& z, double tau) const {
    if (!inside_box(z)) return std::numeric_limits<double>::infinity();
    double f = tau * z(n_);
    Eigen::LLT<Matrix> llt;
    for (const auto& b : blocks_) {
      if (!slack_cholesky(b, z, llt)) return std::numeric_limits<double>::infinity();
      const Matrix& l = llt.matrixLLT();
      for (Eigen::Index i = 0; i < l.rows(); ++i) f -= 2.0 * std::log(l(i, i));
    }
    for (int i = 0; i < n_; ++i) f -= std::log(cfg_.box - z(i)) + std::log(cfg_.box + z(i));
    return f;
  }

  bool barrier_derivatives(const Vector& z, Vector& grad, Matrix& hess) const {
    if (!inside_box(z)) return false;
    grad = Vector::Zero(n_ + 1);
    hess = Matrix::Zero(n_ + 1, n_ + 1);
    Eigen::LLT<Matrix> llt;
    std::vector<Matrix> u;
    for (const auto& b : blocks_) {
      if (!slack_cholesky(b, z, llt)) return false;
      const Eigen::Index d = b.g0.rows();
      const Matrix w = llt.solve(Matrix::Identity(d, d));
      u.resize(b.vars.size());
      for (std::size_t j = 0; j < b.vars.size(); ++j) u[j].noalias() = w * b.g[j];
      grad(n_) -= w.trace();
      hess(n_, n_) += w.squaredNorm();
      for (std::size_t a = 0; a < b.vars.size(); ++a) {
        const int ia = b.vars[a];
        grad(ia) += u[a].trace();
        const double cross = -(u[a].cwiseProduct(w)).sum();  // -tr(U_a W), W symmetric
        hess(ia, n_) += cross;
        hess(n_, ia) += cross;
        for (std::size_t c = a; c < b.vars.size(); ++c) {
          const double h = u[a].cwiseProduct(u[c].transpose()).sum();
          hess(ia, b.vars[c]) += h;
          if (c != a) hess(b.vars[c], ia) += h;
        }
      }
    }
    for (int i = 0; i < n_; ++i) {
      const double lo = cfg_.box + z(i);
      const double hi = cfg_.box - z(i);
      grad(i) += 1.0 / hi - 1.0 / lo;
      hess(i, i) += 1.0 / (hi * hi) + 1.0 / (lo * lo);
    }
    return grad.allFinite() && hess.allFinite();
  }

  // Solves hess * step = -rhs with symmetric diagonal scaling.
  bool solve_newton(const Matrix& hess, const Vector& rhs, Vector& step) const {
    const Vector d = hess.diagonal().cwiseMax(std::numeric_limits<double>::min()).cwiseSqrt().cwiseInverse();
    const Matrix scaled = d.asDiagonal() * hess * d.asDiagonal();
    // The scaled diagonal is 1; near-singular systems get a growing ridge.
    for (const double ridge : {0.0, 1e-12, 1e-10, 1e-8, 1e-6}) {
      Eigen::LDLT<Matrix> ldlt(scaled + ridge * Matrix::Identity(scaled.rows(), scaled.cols()));
      if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) continue;
      step = d.asDiagonal() * ldlt.solve(-(d.asDiagonal() * rhs));
      if (step.allFinite() && rhs.dot(step) < 0.0) return true;
    }
    return false;
  }

  bool line_search(Vector& z, const Vector& step, const Vector& grad, double tau) const {
    const double f0 = objective(z, tau);
    const double slope = grad.dot(step);
    double s = 1.0;
    for (int k = 0; k < kMaxBacktracks; ++k, s *= 0.5) {
      const Vector trial = z + s * step;
      const double f = objective(trial, tau);
      if (std::isfinite(f) && f <= f0 + kArmijo * s * slope) {
        z = trial;
        return true;
      }
    }
    return false;
  }

  SolverConfig cfg_;
  int n_;
  double nu_ = 0.0;
  std::vector<Oriented> blocks_;
};

}  // namespace

SdpSolution solve_feasibility(const LmiProblem& p, const SolverConfig& cfg) {
  if (p.constraints().empty()) throw Error(Errc::kIllFormedProblem, "problem has no constraints");
  if (!(cfg.eps_margin >= 0.0) || !(cfg.box > 0.0) || cfg.max_iter < 1 || !(cfg.tol > 0.0)) {
    throw Error(Errc::kIllFormedProblem, "invalid solver configuration");
  }
  for (const auto& c : p.constraints()) {
    if (!c.constant.allFinite()) throw Error(Errc::kIllFormedProblem, "non-finite constant in '" + c.name + "'");
    for (const auto& [k, m] : c.coeffs) {
      if (!m.allFinite()) throw Error(Errc::kIllFormedProblem, "non-finite coefficient in '" + c.name + "'");
    }
  }

  SdpSolution sol = BarrierSolver(p, cfg).run();

  sol.achieved_margin = std::numeric_limits<double>::infinity();
  for (const auto& c : p.constraints()) {
    sol.achieved_margin = std::min(sol.achieved_margin, evaluate_constraint(p, c, sol.values).margin);
  }
  // Self-audit: a FEASIBLE answer must hold up under direct substitution.
  if (sol.status == SolveStatus::kFeasible && !(sol.achieved_margin >= cfg.eps_margin)) {
    spdlog::warn("sdp: feasible iterate failed the margin audit ({:.3e} < {:.3e})", sol.achieved_margin,
                 cfg.eps_margin);
    sol.status = SolveStatus::kIndeterminate;
  }
  return sol;
}

}  // namespace fodof
