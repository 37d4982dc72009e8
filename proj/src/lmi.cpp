#include "fodof/lmi.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include <json.hpp>

#include "fodof/errors.hpp"

namespace fodof {

AffineExpr AffineExpr::variable(int index, Matrix coeff) {
  AffineExpr e(Matrix::Zero(coeff.rows(), coeff.cols()));
  e.terms_.emplace(index, std::move(coeff));
  return e;
}

AffineExpr AffineExpr::transpose() const {
  AffineExpr out(constant_.transpose());
  for (const auto& [k, m] : terms_) out.terms_.emplace(k, m.transpose());
  return out;
}

Matrix AffineExpr::evaluate(std::span<const double> values) const {
  Matrix out = constant_;
  for (const auto& [k, m] : terms_) {
    if (k < 0 || static_cast<std::size_t>(k) >= values.size()) {
      throw Error(Errc::kLengthMismatch, "value vector does not cover variable " + std::to_string(k));
    }
    out += values[static_cast<std::size_t>(k)] * m;
  }
  return out;
}

AffineExpr& AffineExpr::operator+=(const AffineExpr& other) {
  if (rows() != other.rows() || cols() != other.cols()) {
    throw Error(Errc::kShapeMismatch, "affine sum of " + std::to_string(rows()) + "x" +
                                          std::to_string(cols()) + " and " +
                                          std::to_string(other.rows()) + "x" +
                                          std::to_string(other.cols()));
  }
  constant_ += other.constant_;
  for (const auto& [k, m] : other.terms_) {
    auto it = terms_.find(k);
    if (it == terms_.end()) {
      terms_.emplace(k, m);
    } else {
      it->second += m;
    }
  }
  return *this;
}

AffineExpr& AffineExpr::operator-=(const AffineExpr& other) { return *this += -1.0 * other; }

AffineExpr& AffineExpr::operator*=(double s) {
  constant_ *= s;
  for (auto& [k, m] : terms_) m *= s;
  return *this;
}

AffineExpr operator*(const Matrix& left, const AffineExpr& e) {
  if (left.cols() != e.rows()) throw Error(Errc::kShapeMismatch, "left product shape mismatch");
  AffineExpr out(left * e.constant_);
  for (const auto& [k, m] : e.terms_) out.terms_.emplace(k, left * m);
  return out;
}

AffineExpr operator*(const AffineExpr& e, const Matrix& right) {
  if (e.cols() != right.rows()) throw Error(Errc::kShapeMismatch, "right product shape mismatch");
  AffineExpr out(e.constant_ * right);
  for (const auto& [k, m] : e.terms_) out.terms_.emplace(k, m * right);
  return out;
}

AffineExpr AffineExpr::scale(const Matrix& m) const {
  if (rows() != 1 || cols() != 1) throw Error(Errc::kShapeMismatch, "scale() needs a 1x1 expression");
  AffineExpr out(constant_(0, 0) * m);
  for (const auto& [k, c] : terms_) out.terms_.emplace(k, c(0, 0) * m);
  return out;
}

AffineExpr AffineExpr::blocks(const std::vector<std::vector<AffineExpr>>& grid) {
  if (grid.empty() || grid.front().empty()) return {};
  const std::size_t ncols = grid.front().size();
  std::vector<Eigen::Index> heights(grid.size()), widths(ncols);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i].size() != ncols) throw Error(Errc::kShapeMismatch, "ragged block grid");
    heights[i] = grid[i][0].rows();
    for (std::size_t j = 0; j < ncols; ++j) {
      if (i == 0) widths[j] = grid[0][j].cols();
      if (grid[i][j].rows() != heights[i] || grid[i][j].cols() != widths[j]) {
        throw Error(Errc::kShapeMismatch, "block (" + std::to_string(i) + "," + std::to_string(j) +
                                              ") does not fit the grid");
      }
    }
  }
  Eigen::Index total_rows = 0, total_cols = 0;
  for (auto h : heights) total_rows += h;
  for (auto w : widths) total_cols += w;

  AffineExpr out = zero(total_rows, total_cols);
  Eigen::Index r0 = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Eigen::Index c0 = 0;
    for (std::size_t j = 0; j < ncols; ++j) {
      const AffineExpr& b = grid[i][j];
      if (b.rows() > 0 && b.cols() > 0) {
        out.constant_.block(r0, c0, b.rows(), b.cols()) = b.constant_;
        for (const auto& [k, m] : b.terms_) {
          auto it = out.terms_.find(k);
          if (it == out.terms_.end()) {
            it = out.terms_.emplace(k, Matrix::Zero(total_rows, total_cols)).first;
          }
          it->second.block(r0, c0, b.rows(), b.cols()) = m;
        }
      }
      c0 += widths[j];
    }
    r0 += heights[i];
  }
  return out;
}

int LmiProblem::add_var(std::string name) {
  var_names_.push_back(std::move(name));
  return static_cast<int>(var_names_.size()) - 1;
}

MatrixVariable LmiProblem::declare_symmetric(int dim, const std::string& name) {
  if (dim < 0) throw Error(Errc::kInvalidArgument, "negative block dimension");
  MatrixVariable v{BlockKind::kSymmetric, num_vars(), 0, dim, dim, name, AffineExpr::zero(dim, dim)};
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) {
      Matrix c = Matrix::Zero(dim, dim);
      c(i, j) = 1.0;
      c(j, i) = 1.0;
      v.expr += AffineExpr::variable(add_var(name + "[" + std::to_string(i) + "," + std::to_string(j) + "]"), c);
      ++v.count;
    }
  }
  return v;
}

MatrixVariable LmiProblem::declare_skew(int dim, const std::string& name) {
  if (dim < 0) throw Error(Errc::kInvalidArgument, "negative block dimension");
  MatrixVariable v{BlockKind::kSkew, num_vars(), 0, dim, dim, name, AffineExpr::zero(dim, dim)};
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      Matrix c = Matrix::Zero(dim, dim);
      c(i, j) = 1.0;
      c(j, i) = -1.0;
      v.expr += AffineExpr::variable(add_var(name + "[" + std::to_string(i) + "," + std::to_string(j) + "]"), c);
      ++v.count;
    }
  }
  return v;
}

MatrixVariable LmiProblem::declare_full(int rows, int cols, const std::string& name) {
  if (rows < 0 || cols < 0) throw Error(Errc::kInvalidArgument, "negative block dimension");
  MatrixVariable v{BlockKind::kFull, num_vars(), 0, rows, cols, name, AffineExpr::zero(rows, cols)};
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      Matrix c = Matrix::Zero(rows, cols);
      c(i, j) = 1.0;
      v.expr += AffineExpr::variable(add_var(name + "[" + std::to_string(i) + "," + std::to_string(j) + "]"), c);
      ++v.count;
    }
  }
  return v;
}

MatrixVariable LmiProblem::declare_scalar(const std::string& name) {
  MatrixVariable v{BlockKind::kScalar, num_vars(), 1, 1, 1, name, {}};
  v.expr = AffineExpr::variable(add_var(name), Matrix::Ones(1, 1));
  return v;
}

void LmiProblem::add_constraint(const AffineExpr& expr, Sense sense, const std::string& name) {
  if (expr.rows() == 0) return;
  if (expr.rows() != expr.cols()) {
    throw Error(Errc::kIllFormedProblem, "constraint '" + name + "' is not square");
  }
  auto check_sym = [&](const Matrix& m) {
    const double scale = 1.0 + norm_scale(m);
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
      throw Error(Errc::kIllFormedProblem, "constraint '" + name + "' is not symmetric");
    }
    return Matrix(0.5 * (m + m.transpose()));
  };
  AffineMatrixConstraint c;
  c.constant = check_sym(expr.constant());
  for (const auto& [k, m] : expr.terms()) {
    if (k < 0 || k >= num_vars()) {
      throw Error(Errc::kIllFormedProblem, "constraint '" + name + "' references undeclared variable");
    }
    Matrix s = check_sym(m);
    if (s.cwiseAbs().maxCoeff() > 0.0) c.coeffs.emplace(k, std::move(s));
  }
  c.sense = sense;
  c.name = name;
  constraints_.push_back(std::move(c));
}

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kFeasible: return "FEASIBLE";
    case SolveStatus::kInfeasible: return "INFEASIBLE";
    case SolveStatus::kIndeterminate: return "INDETERMINATE";
  }
  return "UNKNOWN";
}

ConstraintValue evaluate_constraint(const LmiProblem& p, const AffineMatrixConstraint& c,
                                    std::span<const double> values) {
  if (values.size() != static_cast<std::size_t>(p.num_vars())) {
    throw Error(Errc::kLengthMismatch, "expected " + std::to_string(p.num_vars()) + " values, got " +
                                           std::to_string(values.size()));
  }
  ConstraintValue out;
  out.value = c.constant;
  for (const auto& [k, m] : c.coeffs) out.value += values[static_cast<std::size_t>(k)] * m;
  if (c.sense == Sense::kNegativeDefinite) {
    out.extreme_eigenvalue = max_symmetric_eigenvalue(out.value);
    out.margin = -out.extreme_eigenvalue;
  } else {
    out.extreme_eigenvalue = min_symmetric_eigenvalue(out.value);
    out.margin = out.extreme_eigenvalue;
  }
  return out;
}

void write_problem_dump(std::ostream& os, const LmiProblem& p) {
  using nlohmann::json;
  auto triplets = [](const Matrix& m) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = i; j < m.cols(); ++j) {
        if (m(i, j) != 0.0) out.push_back({i, j, m(i, j)});
      }
    }
    return out;
  };
  json constraints = json::array();
  for (const auto& c : p.constraints()) {
    json coeffs = json::array();
    for (const auto& [k, m] : c.coeffs) coeffs.push_back({{"var", k}, {"entries", triplets(m)}});
    constraints.push_back({{"name", c.name},
                           {"dim", c.dim()},
                           {"sense", c.sense == Sense::kNegativeDefinite ? "NEGATIVE_DEFINITE" : "POSITIVE_DEFINITE"},
                           {"constant", triplets(c.constant)},
                           {"coeffs", std::move(coeffs)}});
  }
  const json doc = {{"num_vars", p.num_vars()}, {"var_names", p.var_names()}, {"constraints", std::move(constraints)}};
  os << doc.dump() << '\n';
}

}  // namespace fodof
