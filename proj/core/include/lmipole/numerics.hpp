#pragma once

// Dense kernels for small matrices (n <= ~20, SDP blocks <= ~200).
// All functions are pure; none keep state between calls.

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace lmipole {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Complex = std::complex<double>;

inline Matrix transpose(const Matrix& a) { return a.transpose(); }

namespace numerics {

/// All eigenvalues of a real square matrix, with multiplicity. Complex
/// eigenvalues come in exact conjugate pairs. Output is sorted by real part,
/// then imaginary part, so results are reproducible.
std::vector<Complex> eig_general(const Matrix& m);

/// Solves A X = B with partial pivoting. Throws SingularMatrixError when a
/// pivot falls below `pivot_rtol * max|pivot|`.
Matrix solve_linear(const Matrix& a, const Matrix& b, double pivot_rtol = 1e-13);

/// Lower-triangular L with L L^T = (S + S^T)/2, or nullopt when the
/// symmetrized matrix is not positive definite.
std::optional<Matrix> cholesky(const Matrix& s);

Vector singular_values(const Matrix& m);

/// Number of singular values above rtol * sigma_max * max(rows, cols).
int matrix_rank(const Matrix& m, double rtol = 1e-9);

/// X with A X + X A^T + Q = 0. A must be Hurwitz (NotHurwitzError otherwise).
Matrix lyapunov_solve(const Matrix& a, const Matrix& q);

/// Symmetric PSD square root. Throws NotPsdError when an eigenvalue is below
/// -1e-8 * ||S||; tiny negative eigenvalues are clipped to zero.
Matrix sqrtm_psd(const Matrix& s);

/// Ascending real spectrum of the Hermitian matrix re + i*im, computed from
/// the real embedding [[re, -im], [im, re]] (whose eigenvalues are doubled).
std::vector<double> eig_hermitian_complex(const Matrix& re, const Matrix& im);

/// Smallest eigenvalue of (S + S^T)/2.
double min_eig_sym(const Matrix& s);
/// Largest eigenvalue of (S + S^T)/2.
double max_eig_sym(const Matrix& s);

inline Matrix symmetrize(const Matrix& s) { return 0.5 * (s + s.transpose()); }

bool is_hurwitz(const Matrix& a);

Matrix kron(const Matrix& a, const Matrix& b);

/// Right null-space basis (orthonormal columns) using the same relative
/// tolerance convention as matrix_rank.
Matrix null_space(const Matrix& m, double rtol = 1e-9);

}  // namespace numerics
}  // namespace lmipole
