#include "fodof/commands.hpp"

#include <chrono>
#include <fstream>

#include <spdlog/spdlog.h>

#include "fodof/errors.hpp"
#include "fodof/stability.hpp"

namespace fodof {
namespace {

class Stopwatch {
 public:
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

RunReport base_report(const char* command, const ProblemConfig& cfg) {
  RunReport r;
  r.command = command;
  r.config = config_to_json(cfg);
  return r;
}

void set_status(RunReport& r, ExitCode code, std::string message = {}) {
  switch (code) {
    case ExitCode::kPass: r.status = "PASS"; break;
    case ExitCode::kUsage: r.status = "ERROR"; break;
    case ExitCode::kInfeasible: r.status = "INFEASIBLE"; break;
    case ExitCode::kCertificationFailed: r.status = "CERTIFICATION_FAILED"; break;
    case ExitCode::kSolverError: r.status = "SOLVER_ERROR"; break;
  }
  r.exit_code = static_cast<int>(code);
  r.message = std::move(message);
}

void dump_problem(const ProblemConfig& cfg, const std::filesystem::path& path) {
  const UncertaintyFactors f = decompose(cfg.system());
  const SynthesisLmi lmi = cfg.alpha < 1.0 ? assemble_theorem1(f, cfg.c, cfg.alpha, cfg.n_c)
                                           : assemble_theorem2(f, cfg.c, cfg.alpha, cfg.n_c);
  std::ofstream out(path);
  if (!out) throw Error(Errc::kInvalidArgument, "cannot write " + path.string());
  write_problem_dump(out, lmi.problem);
}

}  // namespace

ProblemConfig apply_overrides(ProblemConfig cfg, const RunOptions& opts) {
  if (opts.n_c) {
    if (*opts.n_c < 0) throw Error(Errc::kValidationError, "--nc must be >= 0");
    cfg.n_c = *opts.n_c;
  }
  if (opts.seed) {
    cfg.solver.seed = *opts.seed;
    cfg.certify.seed = *opts.seed;
  }
  if (opts.samples) {
    if (*opts.samples < 0) throw Error(Errc::kValidationError, "--samples must be >= 0");
    cfg.certify.sample_count = *opts.samples;
  }
  cfg.certify.nominal_solver = cfg.solver;
  return cfg;
}

RunReport cmd_synth(const ProblemConfig& cfg_in, const RunOptions& opts) {
  const ProblemConfig cfg = apply_overrides(cfg_in, opts);
  RunReport r = base_report("synth", cfg);
  if (!opts.dump_lmi.empty()) dump_problem(cfg, opts.dump_lmi);

  Stopwatch total;
  SynthesisOutcome out;
  try {
    out = synthesize(cfg.system(), cfg.n_c, SynthesisConfig{cfg.solver, cfg.certify});
  } catch (const Error& e) {
    r.timings_ms["total"] = total.elapsed_ms();
    switch (e.code()) {
      case Errc::kInfeasible: set_status(r, ExitCode::kInfeasible, e.what()); return r;
      case Errc::kSolverFailure:
      case Errc::kSingularCertificate: set_status(r, ExitCode::kSolverError, e.what()); return r;
      default: throw;
    }
  }
  r.timings_ms["total"] = total.elapsed_ms();

  SynthesisSummary s;
  s.controller = out.result.controller;
  s.eta = out.result.certificate.eta;
  s.solver_status = std::string(to_string(out.result.solver_status));
  s.regime = out.result.regime == Regime::kBelowOne ? "theorem1" : "theorem2";
  s.robust = out.result.robust;
  s.iterations = out.result.iterations;
  s.achieved_margin = out.result.achieved_margin;
  s.eps_margin = out.result.eps_margin;
  s.attempts = out.result.attempts;
  s.q_s_condition = out.result.q_s_condition;
  s.q_c_condition = out.result.q_c_condition;
  r.synthesis = s;
  r.certification = out.report;
  if (out.report.passed) {
    set_status(r, ExitCode::kPass);
  } else {
    set_status(r, ExitCode::kCertificationFailed, "recovered controller failed certification");
  }
  return r;
}

RunReport cmd_check(const ProblemConfig& cfg_in, const DynamicController& k, const RunOptions& opts) {
  const ProblemConfig cfg = apply_overrides(cfg_in, opts);
  RunReport r = base_report("check", cfg);
  Stopwatch total;
  const CertificationReport rep = certify(cfg.system(), k, cfg.certify);
  r.timings_ms["total"] = total.elapsed_ms();
  r.certification = rep;
  if (rep.passed) {
    set_status(r, ExitCode::kPass);
  } else {
    set_status(r, ExitCode::kCertificationFailed,
               rep.nominal_lmi_ok ? "negative sector margin" : "nominal analysis LMI infeasible");
  }
  return r;
}

SimulateRun cmd_simulate(const ProblemConfig& cfg, const DynamicController& k) {
  if (!cfg.simulate) throw Error(Errc::kValidationError, "config has no simulate block");
  const SimulateConfig& sim = *cfg.simulate;
  if (!(sim.h > 0.0)) throw Error(Errc::kValidationError, "simulate.h must be positive");

  const UncertaintyFactors f = decompose(cfg.system());
  const Matrix a_cl = closed_loop(f.a0, f.b0, cfg.c, k);
  const Eigen::Index dim = a_cl.rows();
  Vector x0 = Vector::Zero(dim);
  if (sim.x0.size() == f.a0.rows() || sim.x0.size() == dim) {
    x0.head(sim.x0.size()) = sim.x0;
  } else {
    throw Error(Errc::kShapeMismatch, "simulate.x0 has " + std::to_string(sim.x0.size()) +
                                          " entries, expected " + std::to_string(f.a0.rows()) + " or " +
                                          std::to_string(dim));
  }

  SimulateRun run;
  run.report = base_report("simulate", cfg);
  Stopwatch total;
  run.trajectory = simulate(a_cl, cfg.alpha, x0, sim.t_end, sim.h);
  run.report.timings_ms["total"] = total.elapsed_ms();

  SimulationSummary s;
  s.t_end = run.trajectory.times.back();
  s.h = sim.h;
  s.steps = run.trajectory.times.size() - 1;
  s.initial_norm = x0.norm();
  s.final_norm = run.trajectory.states.back().norm();
  s.ratio = s.initial_norm > 0.0 ? s.final_norm / s.initial_norm : 0.0;
  run.report.simulation = s;
  set_status(run.report, ExitCode::kPass);
  return run;
}

RunReport cmd_decompose(const ProblemConfig& cfg) {
  RunReport r = base_report("decompose", cfg);
  const UncertaintyFactors f = decompose(cfg.system());
  nlohmann::json d;
  d["a0"] = matrix_to_json(f.a0);
  d["delta_a"] = matrix_to_json(f.delta_a);
  d["m_a"] = matrix_to_json(f.m_a);
  d["r_a"] = matrix_to_json(f.r_a);
  d["b0"] = matrix_to_json(f.b0);
  d["delta_b"] = matrix_to_json(f.delta_b);
  d["m_b"] = matrix_to_json(f.m_b);
  d["r_b"] = matrix_to_json(f.r_b);
  d["uncertain_entries"] = uncertain_entry_count(f);
  try {
    d["vertex_count"] = vertex_count(f);
  } catch (const Error& e) {
    if (e.code() != Errc::kTooManyVertices) throw;
    d["vertex_count"] = nullptr;
  }
  d["open_loop_sector_margin"] = sector_margin(f.a0, cfg.alpha).margin;
  r.decomposition = std::move(d);
  set_status(r, ExitCode::kPass);
  return r;
}

}  // namespace fodof
