#pragma once

// Dense real/complex kernel shared by every other module. Storage is Eigen;
// this header fixes the handful of decompositions the rest of the code relies
// on and the tolerances they use.

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace fodof {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

inline constexpr int kMaxEigenDimension = 64;

/// All eigenvalues of a real square matrix, with multiplicity.
///
/// Hessenberg reduction followed by shifted QR. The returned order is the
/// solver's (deterministic for a given input). Throws kNonSquare, or
/// kConvergenceFailure when the QR iteration does not converge or the
/// dimension exceeds kMaxEigenDimension.
std::vector<Complex> eig_general(const Matrix& m);

/// Moore-Penrose pseudo-inverse via one-sided Jacobi SVD. Singular values
/// below 1e-10 * sigma_max count as zero.
Matrix pinv(const Matrix& m);

Matrix kron(const Matrix& a, const Matrix& b);

// Infinity-norm based scale used by the relative tolerances below.
double norm_scale(const Matrix& m);

/// True iff m - margin*I admits a Cholesky factorization. The symmetric part
/// (m + m^T)/2 is tested. Throws kNotSymmetric when m is not symmetric to
/// 1e-10 * (1 + |m|).
bool is_positive_definite(const Matrix& m, double margin = 0.0);

/// Negative definiteness as is_positive_definite(-m, margin).
bool is_negative_definite(const Matrix& m, double margin = 0.0);

/// Real symmetric 2n x 2n image [[X, -Y], [Y, X]] of a Hermitian p = X + iY.
/// p > 0 iff the image is > 0; each eigenvalue of p appears twice.
Matrix hermitian_real_embedding(const ComplexMatrix& p);

// Largest / smallest eigenvalue of the symmetric part of m.
double max_symmetric_eigenvalue(const Matrix& m);
double min_symmetric_eigenvalue(const Matrix& m);

// 2-norm condition number; infinity for singular input.
double condition_number(const Matrix& m);

}  // namespace fodof
