#include "fodof/synthesis.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <spdlog/spdlog.h>

#include "fodof/errors.hpp"

namespace fodof {
namespace {

void require_plant(const UncertaintyFactors& f, const Matrix& c, int n_c) {
  if (n_c < 0) throw Error(Errc::kInvalidArgument, "controller order must be >= 0");
  if (c.cols() != f.a0.rows() || c.rows() == 0) throw Error(Errc::kShapeMismatch, "C does not fit A");
}

bool has_uncertainty(const UncertaintyFactors& f) {
  return f.delta_a.cwiseAbs().maxCoeff() > 0.0 ||
         (f.delta_b.size() > 0 && f.delta_b.cwiseAbs().maxCoeff() > 0.0);
}

// M~ = [[M_A, M_B], [0, 0]], N x (n^2 + n l).
Matrix stacked_m(const UncertaintyFactors& f, int n_c) {
  const Eigen::Index n = f.a0.rows();
  const Eigen::Index ka = f.m_a.cols(), kb = f.m_b.cols();
  Matrix out = Matrix::Zero(n + n_c, ka + kb);
  out.topLeftCorner(n, ka) = f.m_a;
  out.topRightCorner(n, kb) = f.m_b;
  return out;
}

// R~ = [[R_A Q_S, 0], [R_B T4, R_B T3]], (n^2 + n l) x N.
AffineExpr stacked_r(const UncertaintyFactors& f, const AffineExpr& qs, const MatrixVariable& t3,
                     const MatrixVariable& t4, int n_c) {
  const Eigen::Index ka = f.r_a.rows();
  return AffineExpr::blocks({{f.r_a * qs, AffineExpr::zero(ka, n_c)},
                             {f.r_b * t4.expr, f.r_b * t3.expr}});
}

void declare_common(SynthesisLmi& s, int n, int l, int m, int n_c) {
  s.t1 = s.problem.declare_full(n_c, n_c, "T1");
  s.t2 = s.problem.declare_full(n_c, n, "T2");
  s.t3 = s.problem.declare_full(l, n_c, "T3");
  s.t4 = s.problem.declare_full(l, n, "T4");
  s.n = n;
  s.l = l;
  s.m = m;
  s.n_c = n_c;
}

// [[sigma + eta M M^T, R^T], [R, -eta I]] < 0 and eta > 0, or sigma < 0 alone.
void add_main_constraint(SynthesisLmi& s, const AffineExpr& sigma, const Matrix& mbig, const AffineExpr& rbig) {
  if (!s.robust) {
    s.problem.add_constraint(sigma, Sense::kNegativeDefinite, "sigma");
    return;
  }
  s.eta = s.problem.declare_scalar("eta");
  const Eigen::Index k = rbig.rows();
  const AffineExpr top_left = sigma + s.eta.expr.scale(mbig * mbig.transpose());
  const AffineExpr big = AffineExpr::blocks(
      {{top_left, rbig.transpose()}, {rbig, s.eta.expr.scale(-Matrix::Identity(k, k))}});
  s.problem.add_constraint(big, Sense::kNegativeDefinite, "robust_sigma");
  s.problem.add_constraint(s.eta.expr, Sense::kPositiveDefinite, "eta_pos");
}

Matrix right_divide(const Matrix& x, const Matrix& q) {
  // x * q^{-1}
  if (q.rows() == 0) return x;
  return q.transpose().partialPivLu().solve(x.transpose()).transpose();
}

double checked_condition(const Matrix& q, const char* name) {
  if (q.rows() == 0) return 1.0;
  const double cond = condition_number(q);
  if (!(cond <= kMaxCertificateCondition)) {
    throw Error(Errc::kSingularCertificate, std::string(name) + " condition number " + std::to_string(cond));
  }
  return cond;
}

DynamicController recover(const SynthesisCertificate& cert, const Matrix& qs, const Matrix& qc, const Matrix& c) {
  checked_condition(qs, "Q_S");
  checked_condition(qc, "Q_C");
  const Matrix c_pinv = pinv(c);
  DynamicController k;
  k.n_c = static_cast<int>(qc.rows());
  k.a_c = right_divide(cert.t1, qc);
  k.b_c = right_divide(cert.t2, qs) * c_pinv;
  k.c_c = right_divide(cert.t3, qc);
  k.d_c = right_divide(cert.t4, qs) * c_pinv;
  return k;
}

}  // namespace

SynthesisCertificate SynthesisLmi::extract(const SdpSolution& sol) const {
  SynthesisCertificate c;
  c.ps_re = ps_re.value(sol.values);
  c.pc_re = pc_re.value(sol.values);
  if (regime == Regime::kBelowOne) {
    c.ps_im = ps_im.value(sol.values);
    c.pc_im = pc_im.value(sol.values);
  }
  c.t1 = t1.value(sol.values);
  c.t2 = t2.value(sol.values);
  c.t3 = t3.value(sol.values);
  c.t4 = t4.value(sol.values);
  c.eta = robust ? eta.value(sol.values)(0, 0) : 0.0;
  return c;
}

SynthesisLmi assemble_theorem1(const UncertaintyFactors& f, const Matrix& c, double alpha, int n_c) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::kAlphaOutOfRange, "assemble_theorem1 needs 0 < alpha < 1");
  require_plant(f, c, n_c);
  const int n = f.states(), l = f.inputs(), m = static_cast<int>(c.rows());

  SynthesisLmi s;
  s.regime = Regime::kBelowOne;
  s.alpha = alpha;
  s.theta = theta_below_one(alpha);
  s.robust = has_uncertainty(f);
  s.ps_re = s.problem.declare_symmetric(n, "PS_re");
  s.ps_im = s.problem.declare_skew(n, "PS_im");
  s.pc_re = s.problem.declare_symmetric(n_c, "PC_re");
  s.pc_im = s.problem.declare_skew(n_c, "PC_im");
  declare_common(s, n, l, m, n_c);

  const double cs = 2.0 * std::cos(s.theta), sn = 2.0 * std::sin(s.theta);
  const AffineExpr qs = cs * s.ps_re.expr - sn * s.ps_im.expr;

  const AffineExpr s11 = sym(f.a0 * qs) + sym(f.b0 * s.t4.expr);
  const AffineExpr s12 = f.b0 * s.t3.expr + s.t2.expr.transpose();
  const AffineExpr s22 = sym(s.t1.expr);
  const AffineExpr sigma = AffineExpr::blocks({{s11, s12}, {s12.transpose(), s22}});

  add_main_constraint(s, sigma, stacked_m(f, n_c), stacked_r(f, qs, s.t3, s.t4, n_c));
  s.problem.add_constraint(AffineExpr::blocks({{s.ps_re.expr, -s.ps_im.expr}, {s.ps_im.expr, s.ps_re.expr}}),
                           Sense::kPositiveDefinite, "ps_pd");
  if (n_c > 0) {
    s.problem.add_constraint(
        AffineExpr::blocks({{s.pc_re.expr, -s.pc_im.expr}, {s.pc_im.expr, s.pc_re.expr}}),
        Sense::kPositiveDefinite, "pc_pd");
  }
  return s;
}

SynthesisLmi assemble_theorem2(const UncertaintyFactors& f, const Matrix& c, double alpha, int n_c) {
  if (!(alpha >= 1.0 && alpha < 2.0)) throw Error(Errc::kAlphaOutOfRange, "assemble_theorem2 needs 1 <= alpha < 2");
  require_plant(f, c, n_c);
  const int n = f.states(), l = f.inputs(), m = static_cast<int>(c.rows());

  SynthesisLmi s;
  s.regime = Regime::kAboveOne;
  s.alpha = alpha;
  s.theta = theta_above_one(alpha);
  s.robust = has_uncertainty(f);
  s.ps_re = s.problem.declare_symmetric(n, "PS");
  s.pc_re = s.problem.declare_symmetric(n_c, "PC");
  declare_common(s, n, l, m, n_c);

  const double sn = std::sin(s.theta), cs = std::cos(s.theta);
  const AffineExpr g = AffineExpr::blocks({{f.a0 * s.ps_re.expr + f.b0 * s.t4.expr, f.b0 * s.t3.expr},
                                           {s.t2.expr, s.t1.expr}});
  const AffineExpr gs = (g + g.transpose()) * sn;
  const AffineExpr gk = (g - g.transpose()) * cs;
  const AffineExpr sigma = AffineExpr::blocks({{gs, gk}, {-gk, gs}});

  const Matrix mt = stacked_m(f, n_c);
  Matrix mbig(2 * mt.rows(), 2 * mt.cols());
  mbig << mt * sn, mt * cs, -mt * cs, mt * sn;
  const AffineExpr rt = stacked_r(f, s.ps_re.expr, s.t3, s.t4, n_c);
  const AffineExpr rbig = AffineExpr::blocks(
      {{rt, AffineExpr::zero(rt.rows(), rt.cols())}, {AffineExpr::zero(rt.rows(), rt.cols()), rt}});

  add_main_constraint(s, sigma, mbig, rbig);
  s.problem.add_constraint(s.ps_re.expr, Sense::kPositiveDefinite, "ps_pd");
  if (n_c > 0) s.problem.add_constraint(s.pc_re.expr, Sense::kPositiveDefinite, "pc_pd");
  return s;
}

Matrix certificate_q(const Matrix& p_re, const Matrix& p_im, Regime regime, double alpha) {
  if (regime == Regime::kAboveOne) return p_re;
  return rotated_real_part(p_re, p_im, theta_below_one(alpha));
}

DynamicController recover_theorem1(const SynthesisCertificate& cert, const Matrix& c, double alpha) {
  const Matrix qs = certificate_q(cert.ps_re, cert.ps_im, Regime::kBelowOne, alpha);
  const Matrix qc = certificate_q(cert.pc_re, cert.pc_im, Regime::kBelowOne, alpha);
  return recover(cert, qs, qc, c);
}

DynamicController recover_theorem2(const SynthesisCertificate& cert, const Matrix& c) {
  return recover(cert, cert.ps_re, cert.pc_re, c);
}

CertificationReport certify(const UncertainFoltiSystem& sys, const DynamicController& k, const CertifyConfig& cfg) {
  const UncertaintyFactors f = decompose(sys);
  k.validate(sys.inputs(), sys.outputs());

  CertificationReport r;
  r.min_sector_margin = std::numeric_limits<double>::infinity();
  auto visit = [&](const UncertaintyRealization& u) {
    const RealizedPlant p = realize(f, u);
    const double margin = sector_margin(closed_loop(p.a, p.b, sys.c, k), sys.alpha).margin;
    if (margin < r.min_sector_margin) {
      r.min_sector_margin = margin;
      r.worst_realization = u;
    }
  };

  try {
    r.vertex_count = vertex_count(f);
  } catch (const Error& e) {
    if (e.code() != Errc::kTooManyVertices) throw;
    r.vertices_skipped = true;
    spdlog::warn("certify: {}; checking samples only", e.what());
  }
  for (std::uint64_t i = 0; i < r.vertex_count; ++i) visit(vertex(f, i));
  if (cfg.sample_count > 0) {
    for (const auto& u : sample_uniform(f, cfg.sample_count, cfg.seed)) visit(u);
    r.sample_count = cfg.sample_count;
  }

  const Matrix a_nominal = closed_loop(f.a0, f.b0, sys.c, k);
  try {
    r.nominal_lmi_ok = analysis_lmi_feasible(a_nominal, sys.alpha, cfg.nominal_solver).feasible;
  } catch (const Error& e) {
    if (e.code() != Errc::kSolverFailure) throw;
    spdlog::warn("certify: nominal analysis LMI undecided");
    r.nominal_lmi_ok = false;
  }
  r.passed = r.min_sector_margin > 0.0 && r.nominal_lmi_ok;
  return r;
}

namespace {

SynthesisResult solve_once(const UncertaintyFactors& f, const UncertainFoltiSystem& sys, int n_c,
                           const SolverConfig& solver) {
  const SynthesisLmi lmi = sys.alpha < 1.0 ? assemble_theorem1(f, sys.c, sys.alpha, n_c)
                                           : assemble_theorem2(f, sys.c, sys.alpha, n_c);
  spdlog::debug("synthesis: {} variables, {} constraints, eps {}", lmi.problem.num_vars(),
                lmi.problem.constraints().size(), solver.eps_margin);
  const SdpSolution sol = solve_feasibility(lmi.problem, solver);
  if (sol.status == SolveStatus::kInfeasible) {
    throw Error(Errc::kInfeasible, "synthesis LMI infeasible (bound " + std::to_string(sol.lower_bound) + ")");
  }
  if (sol.status == SolveStatus::kIndeterminate) {
    throw Error(Errc::kSolverFailure, "synthesis LMI undecided after " + std::to_string(sol.iterations) +
                                          " iterations");
  }

  SynthesisResult res;
  res.certificate = lmi.extract(sol);
  res.regime = lmi.regime;
  res.robust = lmi.robust;
  res.controller = lmi.regime == Regime::kBelowOne ? recover_theorem1(res.certificate, sys.c, sys.alpha)
                                                   : recover_theorem2(res.certificate, sys.c);
  res.solver_status = sol.status;
  res.iterations = sol.iterations;
  res.achieved_margin = sol.achieved_margin;
  res.eps_margin = solver.eps_margin;
  const Matrix qs = certificate_q(res.certificate.ps_re, res.certificate.ps_im, res.regime, sys.alpha);
  const Matrix qc = certificate_q(res.certificate.pc_re, res.certificate.pc_im, res.regime, sys.alpha);
  res.q_s_condition = qs.rows() ? condition_number(qs) : 1.0;
  res.q_c_condition = qc.rows() ? condition_number(qc) : 1.0;
  return res;
}

}  // namespace

SynthesisOutcome synthesize(const UncertainFoltiSystem& sys, int n_c, const SynthesisConfig& cfg) {
  const UncertaintyFactors f = decompose(sys);
  SynthesisOutcome out;
  out.result = solve_once(f, sys, n_c, cfg.solver);
  out.result.attempts = 1;
  out.report = certify(sys, out.result.controller, cfg.certify);
  if (out.report.passed) return out;

  spdlog::info("synthesis: certification failed (margin {:.4g}); retrying with 10x eps_margin",
               out.report.min_sector_margin);
  SolverConfig retry = cfg.solver;
  retry.eps_margin *= 10.0;
  try {
    SynthesisOutcome second;
    second.result = solve_once(f, sys, n_c, retry);
    second.result.attempts = 2;
    second.report = certify(sys, second.result.controller, cfg.certify);
    return second;
  } catch (const Error& e) {
    spdlog::info("synthesis: retry failed: {}", e.what());
    out.result.attempts = 2;
    return out;
  }
}

}  // namespace fodof
