#pragma once

// JSON problem, controller and report files.
//
// Problem schema (matrices are row-major nested arrays):
//   {
//     "alpha": 0.75,
//     "a_lower": [[...]], "a_upper": [[...]],
//     "b_lower": [[...]], "b_upper": [[...]],
//     "c": [[...]],
//     "n_c": 0,                                        // optional, default 0
//     "solver":  {"eps_margin", "tol", "max_iter", "seed", "box"},   // optional
//     "certify": {"sample_count", "seed"},                           // optional
//     "simulate": {"x0": [...], "t_end": 10, "h": 0.01}              // optional
//   }
// Controller schema: {"n_c": k, "a_c": [[...]], "b_c": ..., "c_c": ..., "d_c": ...}.
// Empty blocks may be written as [] or omitted when n_c = 0.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "fodof/controller.hpp"
#include "fodof/fosim.hpp"
#include "fodof/interval_model.hpp"
#include "fodof/lmi.hpp"
#include "fodof/synthesis.hpp"

namespace fodof {

struct SimulateConfig {
  Vector x0;
  double t_end = 10.0;
  double h = 0.01;
};

struct ProblemConfig {
  double alpha = 0.0;
  Matrix a_lower, a_upper, b_lower, b_upper, c;
  int n_c = 0;
  SolverConfig solver;
  CertifyConfig certify;
  std::optional<SimulateConfig> simulate;

  UncertainFoltiSystem system() const;
};

// A missing path without extension is retried with ".json" appended, so
// "fixtures/example1" names fixtures/example1.json.
std::filesystem::path resolve_input_path(const std::filesystem::path& p);

/// Throws kParseError (with line, or with the offending field) on malformed
/// JSON or wrong types, kValidationError on violated invariants such as
/// "interval bound", alpha outside (0, 2) or h <= 0.
ProblemConfig parse_config(const std::filesystem::path& path);
ProblemConfig parse_config_text(std::string_view text, std::string_view origin = "<string>");

nlohmann::json config_to_json(const ProblemConfig& cfg);

nlohmann::json matrix_to_json(const Matrix& m);
// Throws kParseError naming `field` on non-rectangular or non-numeric input.
Matrix matrix_from_json(const nlohmann::json& j, std::string_view field);

nlohmann::json controller_to_json(const DynamicController& k);
DynamicController controller_from_json(const nlohmann::json& j);

// Accepts a controller file or a run report carrying synthesis.controller.
DynamicController load_controller(const std::filesystem::path& path);

struct SynthesisSummary {
  DynamicController controller;
  double eta = 0.0;
  std::string solver_status;
  std::string regime;  // "theorem1" | "theorem2"
  bool robust = true;
  int iterations = 0;
  double achieved_margin = 0.0;
  double eps_margin = 0.0;
  int attempts = 0;
  double q_s_condition = 1.0;
  double q_c_condition = 1.0;
};

struct SimulationSummary {
  double t_end = 0.0;
  double h = 0.0;
  std::uint64_t steps = 0;
  double initial_norm = 0.0;
  double final_norm = 0.0;
  double ratio = 0.0;
};

struct RunReport {
  std::string command;
  std::string status;  // PASS | INFEASIBLE | CERTIFICATION_FAILED | SOLVER_ERROR | ERROR
  int exit_code = 0;
  std::string message;
  nlohmann::json config;
  std::optional<SynthesisSummary> synthesis;
  std::optional<CertificationReport> certification;
  std::optional<SimulationSummary> simulation;
  nlohmann::json decomposition;  // null unless the decompose command ran
  std::map<std::string, double> timings_ms;
};

nlohmann::json report_to_json(const RunReport& r);

// Indented JSON with arrays of scalars kept on one line; ends with a newline.
std::string format_json(const nlohmann::json& j);
RunReport report_from_json(const nlohmann::json& j);

}  // namespace fodof
