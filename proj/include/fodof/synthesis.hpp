#pragma once

// Fixed-order dynamic output feedback synthesis for interval FO-LTI plants.
//
// The bilinear closed-loop conditions are made linear by the substitutions
//   T1 = A_c Q_C,  T2 = B_c C Q_S,  T3 = C_c Q_C,  T4 = D_c C Q_S,
// where Q = P for 1 <= alpha < 2 and Q = rP + conj(rP) (real) for
// 0 < alpha < 1. The interval uncertainty is absorbed by one scalar eta > 0
// through a Schur complement. When every radius is zero the uncertainty block
// is left out and only Sigma < 0 (plus P > 0) is imposed.

#include <cstdint>
#include <string>

#include "fodof/controller.hpp"
#include "fodof/interval_model.hpp"
#include "fodof/lmi.hpp"
#include "fodof/stability.hpp"

namespace fodof {

enum class Regime { kBelowOne, kAboveOne };

// Solved certificate blocks. For kAboveOne the imaginary parts are empty.
struct SynthesisCertificate {
  Matrix ps_re, ps_im;
  Matrix pc_re, pc_im;
  Matrix t1, t2, t3, t4;
  double eta = 0.0;  // 0 when the uncertainty block was omitted
};

struct SynthesisLmi {
  LmiProblem problem;
  Regime regime = Regime::kBelowOne;
  double alpha = 0.0;
  double theta = 0.0;
  bool robust = true;
  int n = 0, l = 0, m = 0, n_c = 0;
  MatrixVariable ps_re, ps_im, pc_re, pc_im;
  MatrixVariable t1, t2, t3, t4;
  MatrixVariable eta;

  SynthesisCertificate extract(const SdpSolution& sol) const;
};

/// 0 < alpha < 1, theta = (1 - alpha) pi / 2. Variables: Hermitian P_S, P_C
/// (symmetric real part + skew imaginary part), T1..T4, eta.
SynthesisLmi assemble_theorem1(const UncertaintyFactors& f, const Matrix& c, double alpha, int n_c);

/// 1 <= alpha < 2, theta = pi - alpha pi / 2. Variables: symmetric P_S, P_C,
/// T1..T4, eta.
SynthesisLmi assemble_theorem2(const UncertaintyFactors& f, const Matrix& c, double alpha, int n_c);

// Q_S / Q_C of a certificate: rotated real part (kBelowOne) or P itself.
Matrix certificate_q(const Matrix& p_re, const Matrix& p_im, Regime regime, double alpha);

// Certificates whose Q blocks have a 2-norm condition number above this are
// rejected with kSingularCertificate.
inline constexpr double kMaxCertificateCondition = 1e12;

DynamicController recover_theorem1(const SynthesisCertificate& cert, const Matrix& c, double alpha);
DynamicController recover_theorem2(const SynthesisCertificate& cert, const Matrix& c);

struct CertifyConfig {
  int sample_count = 500;
  std::uint64_t seed = 1;
  SolverConfig nominal_solver;
};

struct CertificationReport {
  std::uint64_t vertex_count = 0;
  int sample_count = 0;
  double min_sector_margin = 0.0;
  UncertaintyRealization worst_realization;
  bool nominal_lmi_ok = false;
  bool vertices_skipped = false;  // too many vertices; samples only
  bool passed = false;
};

/// Sector margin of the closed loop at every vertex (when at most 2^24) and at
/// sample_count seeded interior draws, plus the nominal analysis LMI on the
/// center closed loop. passed iff every margin > 0 and the LMI is feasible.
CertificationReport certify(const UncertainFoltiSystem& sys, const DynamicController& k,
                            const CertifyConfig& cfg = {});

struct SynthesisConfig {
  SolverConfig solver;
  CertifyConfig certify;
};

struct SynthesisResult {
  DynamicController controller;
  SynthesisCertificate certificate;
  Regime regime = Regime::kBelowOne;
  bool robust = true;
  SolveStatus solver_status = SolveStatus::kIndeterminate;
  int iterations = 0;
  double achieved_margin = 0.0;
  double eps_margin = 0.0;  // margin of the accepted solve
  int attempts = 0;
  double q_s_condition = 1.0;
  double q_c_condition = 1.0;
};

struct SynthesisOutcome {
  SynthesisResult result;
  CertificationReport report;
};

/// Assemble, solve, recover and certify. A controller that fails
/// certification triggers one re-solve with 10x eps_margin; if that still
/// fails the outcome is returned with report.passed = false. Throws
/// kInfeasible when the LMI is infeasible and kSolverFailure when undecided.
SynthesisOutcome synthesize(const UncertainFoltiSystem& sys, int n_c, const SynthesisConfig& cfg = {});

}  // namespace fodof
