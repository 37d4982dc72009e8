#pragma once

// Strict-LMI modeling layer: affine matrix expressions over scalar decision
// variables, and a self-contained feasibility solver for systems of them.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fodof/matrix_core.hpp"

namespace fodof {

// constant + sum_k x_k * coeffs[k]; every coefficient has the constant's shape.
class AffineExpr {
 public:
  AffineExpr() = default;
  explicit AffineExpr(Matrix constant) : constant_(std::move(constant)) {}
  static AffineExpr zero(Eigen::Index rows, Eigen::Index cols) {
    return AffineExpr(Matrix::Zero(rows, cols));
  }
  static AffineExpr variable(int index, Matrix coeff);

  Eigen::Index rows() const { return constant_.rows(); }
  Eigen::Index cols() const { return constant_.cols(); }
  const Matrix& constant() const { return constant_; }
  const std::map<int, Matrix>& terms() const { return terms_; }

  AffineExpr transpose() const;
  Matrix evaluate(std::span<const double> values) const;

  AffineExpr& operator+=(const AffineExpr& other);
  AffineExpr& operator-=(const AffineExpr& other);
  AffineExpr& operator*=(double s);

  friend AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
  friend AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
  friend AffineExpr operator-(AffineExpr a) { return a *= -1.0; }
  friend AffineExpr operator*(double s, AffineExpr a) { return a *= s; }
  friend AffineExpr operator*(AffineExpr a, double s) { return a *= s; }
  friend AffineExpr operator*(const Matrix& left, const AffineExpr& e);
  friend AffineExpr operator*(const AffineExpr& e, const Matrix& right);

  // Scalar (1x1) expression times a constant matrix: s * m.
  AffineExpr scale(const Matrix& m) const;

  // Block concatenation; blocks in a row share a height, blocks in a column
  // share a width.
  static AffineExpr blocks(const std::vector<std::vector<AffineExpr>>& grid);

 private:
  Matrix constant_;
  std::map<int, Matrix> terms_;
};

// X + X^T.
inline AffineExpr sym(const AffineExpr& x) { return x + x.transpose(); }

enum class Sense { kNegativeDefinite, kPositiveDefinite };

struct AffineMatrixConstraint {
  Matrix constant;
  std::map<int, Matrix> coeffs;
  Sense sense = Sense::kNegativeDefinite;
  std::string name;

  Eigen::Index dim() const { return constant.rows(); }
};

enum class BlockKind { kSymmetric, kSkew, kFull, kScalar };

// Handle returned by the declare_* calls: the variables [first, first+count)
// and the affine map from them to the matrix entries.
struct MatrixVariable {
  BlockKind kind = BlockKind::kFull;
  int first = 0;
  int count = 0;
  int rows = 0;
  int cols = 0;
  std::string name;
  AffineExpr expr;

  Matrix value(std::span<const double> values) const { return expr.evaluate(values); }
  bool empty() const { return rows == 0 || cols == 0; }
};

class LmiProblem {
 public:
  MatrixVariable declare_symmetric(int dim, const std::string& name);
  MatrixVariable declare_skew(int dim, const std::string& name);
  MatrixVariable declare_full(int rows, int cols, const std::string& name);
  MatrixVariable declare_scalar(const std::string& name);

  // Requires a square, symmetric (to 1e-9 relative) expression; the stored
  // matrices are exactly symmetrized. Throws kIllFormedProblem otherwise.
  void add_constraint(const AffineExpr& expr, Sense sense, const std::string& name = {});

  int num_vars() const { return static_cast<int>(var_names_.size()); }
  const std::vector<std::string>& var_names() const { return var_names_; }
  const std::vector<AffineMatrixConstraint>& constraints() const { return constraints_; }

 private:
  int add_var(std::string name);

  std::vector<std::string> var_names_;
  std::vector<AffineMatrixConstraint> constraints_;
};

struct SolverConfig {
  double eps_margin = 1e-6;
  double tol = 1e-8;
  int max_iter = 200;
  std::uint64_t seed = 0;
  double box = 1e6;
};

enum class SolveStatus { kFeasible, kInfeasible, kIndeterminate };

std::string_view to_string(SolveStatus s);

struct SdpSolution {
  SolveStatus status = SolveStatus::kIndeterminate;
  std::vector<double> values;
  // min over constraints of -(largest eigenvalue) of the oriented constraint.
  double achieved_margin = 0.0;
  // Epigraph value t at the final iterate and a certified lower bound on its
  // optimum.
  double t = 0.0;
  double lower_bound = 0.0;
  int iterations = 0;
};

struct ConstraintValue {
  Matrix value;
  // Largest eigenvalue for negative-definite constraints, smallest for
  // positive-definite ones.
  double extreme_eigenvalue = 0.0;
  // Distance into the feasible side: -max eig (NEG) or min eig (POS).
  double margin = 0.0;
};

ConstraintValue evaluate_constraint(const LmiProblem& p, const AffineMatrixConstraint& c,
                                    std::span<const double> values);

/// Decides strict feasibility of every constraint with margin eps_margin.
///
/// Solves min t s.t. every oriented constraint <= t*I and |x_i| <= box by a
/// log-barrier path-following method. FEASIBLE is returned only after the
/// final values pass evaluate_constraint with margin >= eps_margin on every
/// constraint; INFEASIBLE only when the duality bound proves t* > -eps_margin.
SdpSolution solve_feasibility(const LmiProblem& p, const SolverConfig& cfg = {});

// Structured-text dump: dimensions, constant blocks and per-variable
// coefficient blocks as (row, col, value) triplets of the upper triangle.
void write_problem_dump(std::ostream& os, const LmiProblem& p);

}  // namespace fodof
