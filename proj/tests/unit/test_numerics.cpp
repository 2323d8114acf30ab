#include <doctest.h>

#include <algorithm>

#include "lmipole/errors.hpp"
#include "lmipole/numerics.hpp"
#include "lmipole/random.hpp"
#include "lmipole/serialize.hpp"
#include "oracles.hpp"

using namespace lmipole;
using numerics::eig_general;

namespace {

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

Matrix random_symmetric(Rng& rng, Eigen::Index n) {
  const Matrix a = rng.uniform_matrix(n, n, -1.0, 1.0);
  return 0.5 * (a + a.transpose());
}

}  // namespace

TEST_CASE("eig_general on diagonal and rotation matrices") {
  const auto d = eig_general(Vector(Vector::LinSpaced(3, -3.0, -1.0)).asDiagonal().toDenseMatrix());
  REQUIRE(d.size() == 3);
  CHECK(d[0].real() == doctest::Approx(-3.0));
  CHECK(d[1].real() == doctest::Approx(-2.0));
  CHECK(d[2].real() == doctest::Approx(-1.0));
  for (const auto& l : d) CHECK(l.imag() == 0.0);

  const auto r = eig_general(mat({{0, 1}, {-1, 0}}));
  REQUIRE(r.size() == 2);
  CHECK(std::abs(r[0].real()) < 1e-12);
  CHECK(std::abs(r[0].imag() + 1.0) < 1e-12);
  CHECK(std::abs(r[1].imag() - 1.0) < 1e-12);
}

TEST_CASE("reference plant has two unstable eigenvalues") {
  int unstable = 0;
  for (const auto& l : eig_general(io::reference_plant().A)) unstable += l.real() > 0.0;
  CHECK(unstable == 2);
}

TEST_CASE("eig_general rejects non-square input") {
  CHECK_THROWS_AS(eig_general(Matrix::Zero(2, 3)), DimensionError);
}

TEST_CASE("eig_general is similarity invariant") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = rng.uniform_matrix(4, 4, -1.0, 1.0);
    const Matrix t = Matrix::Identity(4, 4) + 0.3 * rng.uniform_matrix(4, 4, -1.0, 1.0);
    const Matrix b = t * a * t.inverse();
    const auto ea = eig_general(a);
    auto eb = eig_general(b);
    for (const auto& l : ea) {
      auto it = std::min_element(eb.begin(), eb.end(),
                                 [&](Complex x, Complex y) { return std::abs(x - l) < std::abs(y - l); });
      CHECK(std::abs(*it - l) < 1e-6);
      eb.erase(it);
    }
  }
}

TEST_CASE("solve_linear") {
  Rng rng(3);
  const Matrix b = rng.uniform_matrix(3, 2, -1.0, 1.0);
  CHECK((numerics::solve_linear(Matrix::Identity(3, 3), b) - b).norm() == doctest::Approx(0.0));
  const Matrix x = numerics::solve_linear(mat({{2, 0}, {0, 4}}), mat({{2}, {4}}));
  CHECK(x(0, 0) == doctest::Approx(1.0));
  CHECK(x(1, 0) == doctest::Approx(1.0));

  const Matrix a = Matrix::Identity(5, 5) * 3.0 + rng.uniform_matrix(5, 5, -1.0, 1.0);
  const Matrix rhs = rng.uniform_matrix(5, 3, -1.0, 1.0);
  const Matrix sol = numerics::solve_linear(a, rhs);
  CHECK((a * sol - rhs).norm() <= 1e-10 * rhs.norm());

  CHECK_THROWS_AS(numerics::solve_linear(mat({{1, 2}, {2, 4}}), mat({{1}, {1}})), SingularMatrixError);
  CHECK_THROWS_AS(numerics::solve_linear(Matrix::Identity(2, 2), Matrix::Zero(3, 1)), DimensionError);
}

TEST_CASE("cholesky") {
  const auto eye = numerics::cholesky(Matrix::Identity(3, 3));
  REQUIRE(eye);
  CHECK((*eye - Matrix::Identity(3, 3)).norm() == doctest::Approx(0.0));

  const auto l = numerics::cholesky(mat({{4, 2}, {2, 2}}));
  REQUIRE(l);
  CHECK(((*l) - mat({{2, 0}, {1, 1}})).norm() < 1e-14);

  CHECK_FALSE(numerics::cholesky(mat({{1, 2}, {2, 1}})));
  CHECK_THROWS_AS(numerics::cholesky(Matrix::Zero(2, 3)), DimensionError);
}

TEST_CASE("cholesky succeeds exactly when the spectrum is positive") {
  Rng rng(11);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix s = random_symmetric(rng, 4) + 0.4 * Matrix::Identity(4, 4);
    const double lo = Eigen::SelfAdjointEigenSolver<Matrix>(s).eigenvalues()(0);
    if (std::abs(lo) < 1e-10) continue;
    CHECK(numerics::cholesky(s).has_value() == (lo > 0.0));
    ++checked;
  }
  CHECK(checked > 90);
}

TEST_CASE("matrix_rank") {
  CHECK(numerics::matrix_rank(Matrix::Zero(3, 4)) == 0);
  CHECK(numerics::matrix_rank(Matrix::Identity(5, 5)) == 5);
  Rng rng(5);
  const Vector u = rng.uniform_vector(4, 0.5, 1.0), v = rng.uniform_vector(6, 0.5, 1.0);
  const Matrix outer = u * v.transpose();
  CHECK(numerics::matrix_rank(outer) == 1);

  const Matrix m = rng.uniform_matrix(4, 3, -1.0, 1.0) * rng.uniform_matrix(3, 6, -1.0, 1.0);
  Eigen::PermutationMatrix<Eigen::Dynamic> pr(4), pc(6);
  pr.indices() << 2, 0, 3, 1;
  pc.indices() << 5, 3, 1, 0, 2, 4;
  CHECK(numerics::matrix_rank(m) == 3);
  CHECK(numerics::matrix_rank(pr * m * pc) == 3);
}

TEST_CASE("lyapunov_solve closed-form cases") {
  const Matrix x = numerics::lyapunov_solve(-Matrix::Identity(2, 2), Matrix::Identity(2, 2));
  CHECK((x - 0.5 * Matrix::Identity(2, 2)).norm() < 1e-14);
  const Matrix y = numerics::lyapunov_solve(mat({{-1, 0}, {0, -2}}), mat({{2, 0}, {0, 4}}));
  CHECK((y - Matrix::Identity(2, 2)).norm() < 1e-14);
  CHECK_THROWS_AS(numerics::lyapunov_solve(Matrix::Identity(2, 2), Matrix::Identity(2, 2)), NotHurwitzError);
}

TEST_CASE("lyapunov_solve agrees with the Kronecker oracle") {
  Rng rng(2024);
  for (int trial = 0; trial < 30; ++trial) {
    const Matrix a = oracle::random_stable(rng, 3);
    const Matrix g = rng.uniform_matrix(3, 3, -1.0, 1.0);
    const Matrix q = g * g.transpose();
    const Matrix x = numerics::lyapunov_solve(a, q);
    const Matrix ref = oracle::kron_lyapunov(a, q);
    CHECK((x - ref).norm() <= 1e-9 * std::max(1.0, ref.norm()));
    CHECK((x - x.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, x.norm()));
    CHECK((a * x + x * a.transpose() + q).norm() <= 1e-9 * (a.norm() * x.norm() + q.norm()));
  }
}

TEST_CASE("sqrtm_psd") {
  CHECK((numerics::sqrtm_psd(Matrix::Identity(3, 3)) - Matrix::Identity(3, 3)).norm() < 1e-14);
  const Matrix r = numerics::sqrtm_psd(mat({{4, 0}, {0, 9}}));
  CHECK((r - mat({{2, 0}, {0, 3}})).norm() < 1e-14);
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix b = rng.uniform_matrix(4, 4, -1.0, 1.0);
    const Matrix s = b.transpose() * b;
    const Matrix m = numerics::sqrtm_psd(s);
    CHECK((m * m - s).norm() <= 1e-10 * std::max(1.0, s.norm()));
    // sqrtm(M M) = M for symmetric PSD M.
    CHECK((numerics::sqrtm_psd(m * m) - m).norm() <= 1e-8);
  }
  CHECK_THROWS_AS(numerics::sqrtm_psd(mat({{1, 0}, {0, -1}})), NotPsdError);
}

TEST_CASE("eig_hermitian_complex") {
  const auto real = numerics::eig_hermitian_complex(mat({{-1, 0}, {0, -2}}), Matrix::Zero(2, 2));
  REQUIRE(real.size() == 2);
  CHECK(real[0] == doctest::Approx(-2.0));
  CHECK(real[1] == doctest::Approx(-1.0));

  // [[0, -i], [i, 0]]
  const auto pauli = numerics::eig_hermitian_complex(Matrix::Zero(2, 2), mat({{0, -1}, {1, 0}}));
  REQUIRE(pauli.size() == 2);
  CHECK(pauli[0] == doctest::Approx(-1.0));
  CHECK(pauli[1] == doctest::Approx(1.0));

  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix re = random_symmetric(rng, 4);
    const Matrix g = rng.uniform_matrix(4, 4, -1.0, 1.0);
    const Matrix im = 0.5 * (g - g.transpose());
    const auto ev = numerics::eig_hermitian_complex(re, im);
    double sum = 0.0;
    for (double v : ev) sum += v;
    CHECK(std::abs(sum - re.trace()) < 1e-10);
    CHECK(std::is_sorted(ev.begin(), ev.end()));
  }
  CHECK_THROWS(numerics::eig_hermitian_complex(mat({{0, 1}, {0, 0}}), Matrix::Zero(2, 2)));
}

TEST_CASE("null_space and kron") {
  const Matrix a = mat({{1, -1, 0}});
  const Matrix n = numerics::null_space(a);
  CHECK(n.cols() == 2);
  CHECK((a * n).norm() < 1e-14);
  CHECK((n.transpose() * n - Matrix::Identity(2, 2)).norm() < 1e-12);
  const Matrix k = numerics::kron(mat({{1, 2}}), mat({{1}, {3}}));
  CHECK((k - mat({{1, 2}, {3, 6}})).norm() == 0.0);
}
