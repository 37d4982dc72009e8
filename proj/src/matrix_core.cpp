#include "fodof/matrix_core.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "fodof/errors.hpp"

namespace fodof {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::kNonSquare: return "NonSquare";
    case Errc::kConvergenceFailure: return "ConvergenceFailure";
    case Errc::kNotSymmetric: return "NotSymmetric";
    case Errc::kNotHermitian: return "NotHermitian";
    case Errc::kShapeMismatch: return "ShapeMismatch";
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kBoundViolation: return "BoundViolation";
    case Errc::kOutOfUnitBox: return "OutOfUnitBox";
    case Errc::kTooManyVertices: return "TooManyVertices";
    case Errc::kAlphaOutOfRange: return "AlphaOutOfRange";
    case Errc::kSolverFailure: return "SolverFailure";
    case Errc::kIllFormedProblem: return "IllFormedProblem";
    case Errc::kLengthMismatch: return "LengthMismatch";
    case Errc::kSingularCertificate: return "SingularCertificate";
    case Errc::kInfeasible: return "Infeasible";
    case Errc::kSingularStep: return "SingularStep";
    case Errc::kStepTooLarge: return "StepTooLarge";
    case Errc::kDomainTooLarge: return "DomainTooLarge";
    case Errc::kParseError: return "ParseError";
    case Errc::kValidationError: return "ValidationError";
  }
  return "Unknown";
}

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw Error(Errc::kNonSquare, std::string(what) + ": matrix is " + std::to_string(m.rows()) +
                                      "x" + std::to_string(m.cols()));
  }
}

void require_symmetric(const Matrix& m) {
  require_square(m, "symmetric test");
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (m.size() > 0 && asym > 1e-10 * (1.0 + norm_scale(m))) {
    throw Error(Errc::kNotSymmetric, "asymmetry " + std::to_string(asym));
  }
}

}  // namespace

double norm_scale(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

std::vector<Complex> eig_general(const Matrix& m) {
  require_square(m, "eig_general");
  if (m.rows() > kMaxEigenDimension) {
    throw Error(Errc::kConvergenceFailure,
                "dimension " + std::to_string(m.rows()) + " exceeds cap " +
                    std::to_string(kMaxEigenDimension));
  }
  if (m.rows() == 0) return {};
  if (!m.allFinite()) throw Error(Errc::kInvalidArgument, "eig_general: non-finite entries");
  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw Error(Errc::kConvergenceFailure, "eig_general: QR iteration did not converge");
  }
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

Matrix pinv(const Matrix& m) {
  if (m.size() == 0) return Matrix::Zero(m.cols(), m.rows());
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cutoff = 1e-10 * (s.size() > 0 ? s(0) : 0.0);
  Vector inv = Vector::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff && s(i) > 0.0) inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

bool is_positive_definite(const Matrix& m, double margin) {
  require_symmetric(m);
  if (m.rows() == 0) return true;
  Matrix sym = 0.5 * (m + m.transpose());
  sym.diagonal().array() -= margin;
  Eigen::LLT<Matrix> llt(sym);
  return llt.info() == Eigen::Success;
}

bool is_negative_definite(const Matrix& m, double margin) {
  return is_positive_definite(-m, margin);
}

Matrix hermitian_real_embedding(const ComplexMatrix& p) {
  if (p.rows() != p.cols()) throw Error(Errc::kNonSquare, "hermitian_real_embedding");
  const Matrix x = p.real();
  const Matrix y = p.imag();
  const double scale = 1.0 + norm_scale(x) + norm_scale(y);
  if (p.size() > 0 && ((x - x.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale ||
                       (y + y.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)) {
    throw Error(Errc::kNotHermitian, "real part must be symmetric and imaginary part skew");
  }
  const Eigen::Index n = p.rows();
  Matrix out(2 * n, 2 * n);
  out << x, -y, y, x;
  return out;
}

double max_symmetric_eigenvalue(const Matrix& m) {
  if (m.rows() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double min_symmetric_eigenvalue(const Matrix& m) {
  if (m.rows() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double condition_number(const Matrix& m) {
  if (m.size() == 0) return 1.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

}  // namespace fodof
