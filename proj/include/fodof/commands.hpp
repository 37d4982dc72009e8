#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "fodof/config.hpp"

namespace fodof {

// Process exit codes of the command-line front end.
enum class ExitCode : int {
  kPass = 0,
  kUsage = 1,  // bad arguments, parse or validation errors
  kInfeasible = 2,
  kCertificationFailed = 3,
  kSolverError = 4,
};

struct RunOptions {
  std::optional<int> n_c;
  std::optional<std::uint64_t> seed;  // overrides solver.seed and certify.seed
  std::optional<int> samples;         // overrides certify.sample_count
  std::filesystem::path dump_lmi;     // synth only; empty = no dump
};

ProblemConfig apply_overrides(ProblemConfig cfg, const RunOptions& opts);

/// Synthesize and certify. INFEASIBLE, SOLVER_ERROR and CERTIFICATION_FAILED
/// are reported through status/exit_code; other errors propagate.
RunReport cmd_synth(const ProblemConfig& cfg, const RunOptions& opts = {});

/// Certify a given controller against the interval plant.
RunReport cmd_check(const ProblemConfig& cfg, const DynamicController& k, const RunOptions& opts = {});

struct SimulateRun {
  RunReport report;
  Trajectory trajectory;
};

/// Simulate the center closed loop from the config's simulate block. An x0
/// of length n is padded with zeros for the controller states.
SimulateRun cmd_simulate(const ProblemConfig& cfg, const DynamicController& k);

/// Midpoint/radius split and factor matrices of the configured plant.
RunReport cmd_decompose(const ProblemConfig& cfg);

}  // namespace fodof
