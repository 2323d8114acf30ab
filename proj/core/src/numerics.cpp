#include "lmipole/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "lmipole/errors.hpp"

namespace lmipole::numerics {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(what) + ": expected a square matrix, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw Error(std::string(what) + ": non-finite entries");
}

}  // namespace

std::vector<Complex> eig_general(const Matrix& m) {
  require_square(m, "eig_general");
  require_finite(m, "eig_general");
  const auto n = m.rows();
  std::vector<Complex> out;
  if (n == 0) return out;

  // Hessenberg reduction followed by shifted (Francis) QR on the real Schur form.
  Eigen::EigenSolver<Matrix> solver;
  solver.setMaxIterations(static_cast<Eigen::Index>(100 * n));
  solver.compute(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("eig_general: QR iteration did not converge");
  }
  const auto& values = solver.eigenvalues();
  out.reserve(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) out.push_back(values(i));
  std::sort(out.begin(), out.end(), [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return out;
}

Matrix solve_linear(const Matrix& a, const Matrix& b, double pivot_rtol) {
  require_square(a, "solve_linear");
  if (b.rows() != a.rows()) {
    throw DimensionError("solve_linear: right-hand side has " + std::to_string(b.rows()) +
                         " rows, expected " + std::to_string(a.rows()));
  }
  if (a.rows() == 0) return Matrix(0, b.cols());
  Eigen::PartialPivLU<Matrix> lu(a);
  const Vector pivots = lu.matrixLU().diagonal().cwiseAbs();
  const double largest = std::max(pivots.maxCoeff(), a.cwiseAbs().maxCoeff());
  if (!(pivots.minCoeff() > pivot_rtol * largest)) {
    throw SingularMatrixError("solve_linear: matrix is singular to working precision (pivot " +
                              std::to_string(pivots.minCoeff()) + ")");
  }
  return lu.solve(b);
}

std::optional<Matrix> cholesky(const Matrix& s) {
  require_square(s, "cholesky");
  if (s.rows() == 0) return Matrix(0, 0);
  Eigen::LLT<Matrix> llt(symmetrize(s));
  if (llt.info() != Eigen::Success) return std::nullopt;
  Matrix l = llt.matrixL();
  if (!l.allFinite() || (l.diagonal().array() <= 0.0).any()) return std::nullopt;
  return l;
}

Vector singular_values(const Matrix& m) {
  if (m.size() == 0) return Vector(0);
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues();
}

int matrix_rank(const Matrix& m, double rtol) {
  if (m.size() == 0) return 0;
  const Vector sv = singular_values(m);
  const double cutoff = rtol * sv(0) * static_cast<double>(std::max(m.rows(), m.cols()));
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++rank;
  }
  return rank;
}

bool is_hurwitz(const Matrix& a) {
  for (const auto& lambda : eig_general(a)) {
    if (!(lambda.real() < 0.0)) return false;
  }
  return true;
}

Matrix lyapunov_solve(const Matrix& a, const Matrix& q) {
  require_square(a, "lyapunov_solve");
  require_square(q, "lyapunov_solve");
  if (q.rows() != a.rows()) throw DimensionError("lyapunov_solve: Q and A sizes differ");
  if (!is_hurwitz(a)) throw NotHurwitzError("lyapunov_solve: A is not Hurwitz");
  const auto n = a.rows();
  if (n == 0) return Matrix(0, 0);

  // Bartels-Stewart on the complex Schur form A = U T U^H:
  //   T Y + Y T^H = -U^H Q U,  X = U Y U^H.
  Eigen::ComplexSchur<Matrix> schur(a);
  const Eigen::MatrixXcd& t = schur.matrixT();
  const Eigen::MatrixXcd& u = schur.matrixU();
  const Eigen::MatrixXcd c = -(u.adjoint() * q.cast<Complex>() * u);
  Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, n);
  const Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(n, n);
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    Eigen::VectorXcd rhs = c.col(j);
    for (Eigen::Index k = j + 1; k < n; ++k) rhs -= std::conj(t(j, k)) * y.col(k);
    const Eigen::MatrixXcd lhs = t + std::conj(t(j, j)) * identity;
    y.col(j) = lhs.triangularView<Eigen::Upper>().solve(rhs);
  }
  const Matrix x = (u * y * u.adjoint()).real();
  return symmetrize(x);
}

Matrix sqrtm_psd(const Matrix& s) {
  require_square(s, "sqrtm_psd");
  if (s.rows() == 0) return Matrix(0, 0);
  const Matrix sym = symmetrize(s);
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success) throw ConvergenceError("sqrtm_psd: eigensolver failed");
  const double scale = std::max(1.0, sym.norm());
  Vector values = es.eigenvalues();
  if (values.minCoeff() < -1e-8 * scale) {
    throw NotPsdError("sqrtm_psd: matrix has eigenvalue " + std::to_string(values.minCoeff()));
  }
  values = values.cwiseMax(0.0).cwiseSqrt();
  const Matrix& v = es.eigenvectors();
  return symmetrize(v * values.asDiagonal() * v.transpose());
}

std::vector<double> eig_hermitian_complex(const Matrix& re, const Matrix& im) {
  require_square(re, "eig_hermitian_complex");
  if (im.rows() != re.rows() || im.cols() != re.cols()) {
    throw DimensionError("eig_hermitian_complex: real and imaginary parts differ in size");
  }
  const auto n = re.rows();
  if (n == 0) return {};
  const double scale = std::max({1.0, re.cwiseAbs().maxCoeff(), im.cwiseAbs().maxCoeff()});
  if ((re - re.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale ||
      (im + im.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error("eig_hermitian_complex: input is not Hermitian");
  }
  Matrix embed(2 * n, 2 * n);
  embed << re, -im, im, re;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(embed), Eigen::EigenvaluesOnly);
  const Vector& values = es.eigenvalues();
  std::vector<double> out;
  out.reserve(static_cast<size_t>(n));
  // Each eigenvalue of the Hermitian matrix appears twice in the embedding.
  for (Eigen::Index i = 0; i < n; ++i) out.push_back(0.5 * (values(2 * i) + values(2 * i + 1)));
  return out;
}

double min_eig_sym(const Matrix& s) {
  require_square(s, "min_eig_sym");
  if (s.rows() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(s), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double max_eig_sym(const Matrix& s) {
  require_square(s, "max_eig_sym");
  if (s.rows() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(s), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(s.rows() - 1);
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

Matrix null_space(const Matrix& m, double rtol) {
  const auto cols = m.cols();
  if (m.rows() == 0) return Matrix::Identity(cols, cols);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  const double cutoff = sv.size() > 0
                            ? rtol * sv(0) * static_cast<double>(std::max(m.rows(), m.cols()))
                            : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++rank;
  }
  return svd.matrixV().rightCols(cols - rank);
}

}  // namespace lmipole::numerics
