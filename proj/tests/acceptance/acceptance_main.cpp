// Acceptance suite. Prints one "AC<n> PASS|FAIL <detail>" line per criterion
// and exits nonzero if any selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "fodof/config.hpp"
#include "fodof/errors.hpp"
#include "fodof/fosim.hpp"
#include "fodof/interval_model.hpp"
#include "fodof/stability.hpp"
#include "fodof/synthesis.hpp"

using namespace fodof;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    pass = false;
    note(why);
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fixture(const std::string& name) { return std::string(FODOF_FIXTURE_DIR) + "/" + name; }

ProblemConfig load(const std::string& name) { return parse_config(fixture(name)); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel(const Matrix& a, const Matrix& b) {
  if (a.size() == 0) return 0.0;
  return (a - b).norm() / std::max(1.0, b.norm());
}

void check_controller(Outcome& out, const ProblemConfig& cfg, const std::string& file, std::uint64_t vertices,
                      double budget_s) {
  const auto t0 = std::chrono::steady_clock::now();
  const CertificationReport r = certify(cfg.system(), load_controller(fixture(file)), cfg.certify);
  const double dt = seconds_since(t0);
  out.note(fmt("%s: vertices %llu samples %d margin %.4g lmi %s %.2fs", file.c_str(),
               static_cast<unsigned long long>(r.vertex_count), r.sample_count, r.min_sector_margin,
               r.nominal_lmi_ok ? "ok" : "infeasible", dt));
  if (r.vertex_count != vertices) out.fail(fmt("expected %llu vertices", static_cast<unsigned long long>(vertices)));
  if (r.sample_count != 500) out.fail("expected 500 samples");
  if (!(r.min_sector_margin > 0.0)) out.fail("margin not positive");
  if (!r.passed) out.fail("certification failed");
  if (dt >= budget_s) out.fail(fmt("over %.0fs budget", budget_s));
}

Outcome ac1() {
  Outcome out;
  const ProblemConfig cfg = load("example1.json");
  check_controller(out, cfg, "controllers/table1_nc0.json", 2048, 30.0);
  check_controller(out, cfg, "controllers/table1_nc1.json", 2048, 30.0);
  return out;
}

Outcome ac2() {
  Outcome out;
  check_controller(out, load("example2.json"), "controllers/table2_nc0.json", 4096, 60.0);
  return out;
}

struct Synthesized {
  std::string name;
  int n_c = 0;
  ProblemConfig cfg;
  SynthesisOutcome outcome;
};

// Criterion 3 runs; shared with criterion 8.
std::vector<Synthesized> synthesize_all(Outcome& out) {
  std::vector<Synthesized> done;
  for (const char* name : {"example1.json", "example2.json"}) {
    const ProblemConfig cfg = load(name);
    for (int n_c = 0; n_c <= 3; ++n_c) {
      const auto t0 = std::chrono::steady_clock::now();
      try {
        SynthesisConfig sc{cfg.solver, cfg.certify};
        SynthesisOutcome o = synthesize(cfg.system(), n_c, sc);
        const double dt = seconds_since(t0);
        out.note(fmt("%s n_c=%d: %s margin %.4g attempts %d %.2fs", name, n_c, o.report.passed ? "certified" : "NOT certified",
                     o.report.min_sector_margin, o.result.attempts, dt));
        if (o.result.solver_status != SolveStatus::kFeasible) out.fail("solver not FEASIBLE");
        if (!o.report.passed) out.fail(fmt("%s n_c=%d certification failed", name, n_c));
        if (dt >= 120.0) out.fail("over 120s budget");
        done.push_back({name, n_c, cfg, std::move(o)});
      } catch (const Error& e) {
        out.fail(fmt("%s n_c=%d: %s", name, n_c, e.what()));
      }
    }
  }
  return done;
}

Outcome ac3() {
  Outcome out;
  synthesize_all(out);
  return out;
}

Outcome ac4() {
  Outcome out;
  for (const char* name : {"example1.json", "example2.json"}) {
    const ProblemConfig cfg = load(name);
    const UncertaintyFactors f = decompose(cfg.system());
    const double m = sector_margin(f.a0, cfg.alpha).margin;
    out.note(fmt("%s alpha %.2f margin %.4g", name, cfg.alpha, m));
    if (!(m < 0.0)) out.fail("center margin not negative");
  }
  return out;
}

Outcome ac5() {
  Outcome out;
  std::mt19937_64 rng(20240501);
  std::normal_distribution<double> g(0.0, 1.0);
  for (double alpha : {0.3, 0.75, 1.2, 1.8}) {
    int checked = 0, agree = 0;
    for (int trial = 0; trial < 200; ++trial) {
      Matrix a(3, 3);
      for (int i = 0; i < 9; ++i) a(i / 3, i % 3) = g(rng);
      const double margin = sector_margin(a, alpha).margin;
      if (std::abs(margin) <= 1e-3) continue;
      ++checked;
      bool feasible = false;
      try {
        feasible = analysis_lmi_feasible(a, alpha).feasible;
      } catch (const Error&) {
        feasible = !(margin > 0.0);  // undecided counts as disagreement
      }
      if (feasible == (margin > 0.0)) ++agree;
    }
    out.note(fmt("alpha %.2f: %d/%d agree", alpha, agree, checked));
    if (agree != checked) out.fail(fmt("alpha %.2f disagreement", alpha));
  }
  return out;
}

Outcome ac6() {
  Outcome out;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const char* name : {"example1.json", "example2.json"}) {
    const UncertainFoltiSystem sys = load(name).system();
    const UncertaintyFactors f = decompose(sys);
    if (f.m_a * f.r_a != f.delta_a) out.fail(fmt("%s m_a r_a != delta_a", name));
    if (f.m_b * f.r_b != f.delta_b) out.fail(fmt("%s m_b r_b != delta_b", name));
    const std::size_t na = f.delta_a.size(), nb = f.delta_b.size();
    const RealizedPlant hi = realize(f, {std::vector<double>(na, 1.0), std::vector<double>(nb, 1.0)});
    const RealizedPlant lo = realize(f, {std::vector<double>(na, -1.0), std::vector<double>(nb, -1.0)});
    if (hi.a != sys.a.upper || hi.b != sys.b.upper) out.fail(fmt("%s +1 vertex != upper bounds", name));
    if (lo.a != sys.a.lower || lo.b != sys.b.lower) out.fail(fmt("%s -1 vertex != lower bounds", name));
    const Eigen::Index n = f.delta_a.rows();
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      Vector fa(static_cast<Eigen::Index>(na));
      for (Eigen::Index k = 0; k < fa.size(); ++k) fa(k) = u(rng);
      const Matrix p = f.m_a * fa.asDiagonal() * f.r_a;
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) worst = std::max(worst, std::abs(p(i, j) - fa(n * i + j) * f.delta_a(i, j)));
    }
    out.note(fmt("%s entrywise max error %.3g", name, worst));
    if (worst > 1e-15) out.fail("entrywise identity");
  }
  return out;
}

Outcome ac7() {
  Outcome out;
  const double h = 1e-3, t_end = 5.0;
  const Matrix a = (Vector(3) << -0.1, -1.0, -2.0).finished().asDiagonal();  // ends of [-2, -0.1]
  const Vector x0 = Vector::Ones(3);
  for (double alpha : {0.5, 0.75, 1.2, 1.5}) {
    const Trajectory tr = simulate(a, alpha, x0, t_end, h);
    double worst = 0.0;
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
      for (int c = 0; c < 3; ++c) {
        const double exact = mittag_leffler(alpha, a(c, c) * std::pow(tr.times[k], alpha));
        worst = std::max(worst, std::abs(tr.states[k](c) - exact));
      }
    }
    out.note(fmt("alpha %.2f max err %.3g", alpha, worst));
    if (worst > 5e-3) out.fail(fmt("alpha %.2f error above 5e-3", alpha));
  }
  const Trajectory tr = simulate(a, 1.0, x0, t_end, h);
  double worst = 0.0;
  for (std::size_t k = 0; k < tr.times.size(); ++k)
    for (int c = 0; c < 3; ++c) worst = std::max(worst, std::abs(tr.states[k](c) - std::exp(a(c, c) * tr.times[k])));
  out.note(fmt("alpha 1 vs exp max err %.3g", worst));
  if (worst > 1e-3) out.fail("alpha 1 error above 1e-3");
  return out;
}

Outcome ac8() {
  Outcome out;
  Outcome synth;
  int simulated = 0;
  for (const Synthesized& s : synthesize_all(synth)) {
    if (!s.outcome.report.passed) continue;
    ++simulated;
    const UncertaintyFactors f = decompose(s.cfg.system());
    const DynamicController& k = s.outcome.result.controller;
    const Matrix acl = closed_loop(f.a0, f.b0, s.cfg.c, k);
    Vector x0 = Vector::Zero(acl.rows());
    x0.head(f.a0.rows()).setOnes();
    const Trajectory tr = simulate(acl, s.cfg.alpha, x0, 10.0, 0.01);
    const double ratio = tr.states.back().norm() / x0.norm();
    out.note(fmt("%s n_c=%d ratio %.5g", s.name.c_str(), s.n_c, ratio));
    if (!(ratio < 0.01)) out.fail(fmt("%s n_c=%d ratio >= 0.01", s.name.c_str(), s.n_c));
  }
  if (simulated == 0) out.fail("no certified controllers");
  return out;
}

Outcome ac9() {
  Outcome out;
  for (const char* name : {"example1.json", "example2.json"}) {
    const ProblemConfig cfg = load(name);
    const UncertainFoltiSystem sys = cfg.system();
    const UncertaintyFactors f = decompose(sys);
    for (int n_c = 0; n_c <= 3; ++n_c) {
      const SynthesisLmi lmi =
          sys.alpha < 1.0 ? assemble_theorem1(f, sys.c, sys.alpha, n_c) : assemble_theorem2(f, sys.c, sys.alpha, n_c);
      const SdpSolution sol = solve_feasibility(lmi.problem, cfg.solver);
      if (sol.status != SolveStatus::kFeasible) {
        out.note(fmt("%s n_c=%d not solved", name, n_c));
        continue;
      }
      const SynthesisCertificate cert = lmi.extract(sol);
      const DynamicController k =
          lmi.regime == Regime::kBelowOne ? recover_theorem1(cert, sys.c, sys.alpha) : recover_theorem2(cert, sys.c);
      const Matrix qc = certificate_q(cert.pc_re, cert.pc_im, lmi.regime, sys.alpha);
      const double e1 = rel(k.a_c * qc, cert.t1), e3 = rel(k.c_c * qc, cert.t3);
      double min_margin = INFINITY;
      for (const auto& c : lmi.problem.constraints()) {
        min_margin = std::min(min_margin, evaluate_constraint(lmi.problem, c, sol.values).margin);
      }
      out.note(fmt("%s n_c=%d T1 %.2g T3 %.2g margin %.3g", name, n_c, e1, e3, min_margin));
      if (e1 > 1e-8 || e3 > 1e-8) out.fail(fmt("%s n_c=%d round trip", name, n_c));
      if (min_margin < cfg.solver.eps_margin) out.fail(fmt("%s n_c=%d certificate margin below eps", name, n_c));
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fodof acceptance suite"};
  std::vector<int> selected;
  app.add_option("--criterion", selected, "criterion numbers to run (default all)")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::warn);
  if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8, 9};

  const std::vector<std::function<Outcome()>> criteria{ac1, ac2, ac3, ac4, ac5, ac6, ac7, ac8, ac9};
  int failures = 0;
  for (int n : selected) {
    Outcome o;
    try {
      o = criteria[static_cast<std::size_t>(n - 1)]();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    std::printf("AC%d %s %s\n", n, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
