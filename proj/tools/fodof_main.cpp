#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "fodof/commands.hpp"
#include "fodof/errors.hpp"

namespace {

using fodof::RunReport;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("fodof");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("FODOF_LOG")) spdlog::set_level(spdlog::level::from_str(env));
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw fodof::Error(fodof::Errc::kInvalidArgument, "cannot write " + path);
  out << text;
}

// Report to --out (or stdout), one summary line to stderr.
int emit(const RunReport& r, const std::string& out_path) {
  const std::string text = fodof::format_json(fodof::report_to_json(r));
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text(out_path, text);
  }
  std::string line = r.command + ": " + r.status;
  if (r.certification) {
    line += " vertices=" + std::to_string(r.certification->vertex_count) +
            " samples=" + std::to_string(r.certification->sample_count) +
            " min_margin=" + std::to_string(r.certification->min_sector_margin) +
            " nominal_lmi=" + (r.certification->nominal_lmi_ok ? "ok" : "fail");
  }
  if (!r.message.empty()) line += " (" + r.message + ")";
  std::cerr << line << '\n';
  return r.exit_code;
}

std::string default_controller_path(const std::string& out) {
  if (out.empty()) return {};
  std::filesystem::path p(out);
  p.replace_extension();
  p += ".controller.json";
  return p.string();
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"Robust output feedback synthesis for interval fractional-order systems"};
  app.require_subcommand(1);

  std::string config_path, controller_path, out_path, controller_out, dump_lmi, report_path;
  std::optional<int> n_c, samples;
  std::optional<std::uint64_t> seed;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "problem file (JSON)")->required();
    sub->add_option("--seed", seed, "seed for solver start and certification samples");
    sub->add_option("--samples", samples, "random interior samples for certification");
  };

  CLI::App* synth = app.add_subcommand("synth", "synthesize and certify a controller");
  add_common(synth);
  synth->add_option("--nc", n_c, "controller order");
  synth->add_option("--out", out_path, "report path (default stdout)");
  synth->add_option("--controller-out", controller_out, "controller path (default <out>.controller.json)");
  synth->add_option("--dump-lmi", dump_lmi, "write the assembled LMI problem");

  CLI::App* check = app.add_subcommand("check", "certify a given controller");
  add_common(check);
  check->add_option("controller", controller_path, "controller or report file")->required();
  check->add_option("--out", out_path, "report path (default stdout)");

  CLI::App* sim = app.add_subcommand("simulate", "simulate the center closed loop");
  sim->add_option("config", config_path, "problem file with a simulate block")->required();
  sim->add_option("controller", controller_path, "controller or report file")->required();
  sim->add_option("--out", out_path, "trajectory CSV path (default stdout)");
  sim->add_option("--report", report_path, "run report path");

  CLI::App* dec = app.add_subcommand("decompose", "print the midpoint/radius factors");
  dec->add_option("config", config_path, "problem file (JSON)")->required();
  dec->add_option("--out", out_path, "report path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(fodof::ExitCode::kUsage);
  }

  try {
    const fodof::ProblemConfig cfg = fodof::parse_config(config_path);
    fodof::RunOptions opts{n_c, seed, samples, dump_lmi};

    if (synth->parsed()) {
      const RunReport r = fodof::cmd_synth(cfg, opts);
      const std::string kpath = controller_out.empty() ? default_controller_path(out_path) : controller_out;
      if (r.synthesis && !kpath.empty()) {
        write_text(kpath, fodof::format_json(fodof::controller_to_json(r.synthesis->controller)));
      }
      return emit(r, out_path);
    }
    if (check->parsed()) {
      return emit(fodof::cmd_check(cfg, fodof::load_controller(controller_path), opts), out_path);
    }
    if (sim->parsed()) {
      const fodof::SimulateRun run = fodof::cmd_simulate(cfg, fodof::load_controller(controller_path));
      if (out_path.empty()) {
        fodof::write_trajectory_csv(std::cout, run.trajectory);
      } else {
        std::ofstream csv(out_path, std::ios::binary);
        if (!csv) throw fodof::Error(fodof::Errc::kInvalidArgument, "cannot write " + out_path);
        fodof::write_trajectory_csv(csv, run.trajectory);
      }
      if (!report_path.empty()) write_text(report_path, fodof::format_json(fodof::report_to_json(run.report)));
      const auto& s = *run.report.simulation;
      std::fprintf(stderr, "simulate: |x(%.6g)|/|x(0)| = %.6g\n", s.t_end, s.ratio);
      return run.report.exit_code;
    }
    return emit(fodof::cmd_decompose(cfg), out_path);
  } catch (const fodof::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.code()) {
      case fodof::Errc::kInfeasible: return static_cast<int>(fodof::ExitCode::kInfeasible);
      case fodof::Errc::kSolverFailure: return static_cast<int>(fodof::ExitCode::kSolverError);
      default: return static_cast<int>(fodof::ExitCode::kUsage);
    }
  }
}
