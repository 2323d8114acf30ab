#include <doctest.h>

#include <sstream>

#include "lmipole/errors.hpp"
#include "lmipole/random.hpp"
#include "lmipole/sdp.hpp"

using namespace lmipole;
using namespace lmipole::sdp;

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

// minimize t s.t. [[t, 1], [1, t]] >= 0
SdpProblem tight_pair() {
  SdpProblem p;
  p.num_vars = 1;
  p.objective = Vector::Ones(1);
  LmiBlock b;
  b.name = "pair";
  b.constant = mat({{0, 1}, {1, 0}});
  b.coeffs.emplace_back(0, Matrix::Identity(2, 2));
  p.blocks.push_back(b);
  return p;
}

// minimize trace X s.t. X - M >= 0, X symmetric n x n (upper-triangle variables).
SdpProblem trace_min(const Matrix& m) {
  const auto n = m.rows();
  SdpProblem p;
  LmiBlock b;
  b.name = "x_minus_m";
  b.constant = -m;
  int k = 0;
  std::vector<double> c;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j, ++k) {
      Matrix e = Matrix::Zero(n, n);
      e(i, j) = e(j, i) = 1.0;
      b.coeffs.emplace_back(k, e);
      c.push_back(i == j ? 1.0 : 0.0);
    }
  }
  p.num_vars = k;
  p.objective = Eigen::Map<Vector>(c.data(), k);
  p.blocks.push_back(b);
  return p;
}

}  // namespace

TEST_CASE("analytic problem t* = 1") {
  const SdpSolution sol = solve(tight_pair());
  REQUIRE(sol.status == Status::kOptimal);
  CHECK(std::abs(sol.y(0) - 1.0) <= 1e-6);
  CHECK(std::abs(sol.objective_value - 1.0) <= 1e-6);
  CHECK(sol.block_min_eig[0] >= -1e-8);
}

TEST_CASE("trace minimization returns M") {
  Rng rng(17);
  const Matrix g = rng.uniform_matrix(3, 3, -1.0, 1.0);
  const Matrix m = g * g.transpose() - 0.5 * Matrix::Identity(3, 3);
  const SdpProblem p = trace_min(m);
  const SdpSolution sol = solve(p);
  REQUIRE(sol.status == Status::kOptimal);
  CHECK(std::abs(sol.objective_value - m.trace()) <= 1e-6);
  Matrix x(3, 3);
  int k = 0;
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j, ++k) x(i, j) = x(j, i) = sol.y(k);
  }
  CHECK((x - m).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("outer objectives decrease monotonically") {
  Rng rng(3);
  const Matrix g = rng.uniform_matrix(4, 4, -1.0, 1.0);
  const SdpSolution sol = solve(trace_min(g * g.transpose()));
  REQUIRE(sol.status == Status::kOptimal);
  REQUIRE(sol.outer_objectives.size() > 2);
  for (size_t i = 1; i < sol.outer_objectives.size(); ++i) {
    CHECK(sol.outer_objectives[i] <= sol.outer_objectives[i - 1] + 1e-12);
  }
}

TEST_CASE("constant negative block with no variables is infeasible") {
  SdpProblem p;
  p.num_vars = 0;
  p.objective = Vector::Zero(0);
  LmiBlock b;
  b.name = "neg";
  b.constant = -Matrix::Identity(2, 2);
  p.blocks.push_back(b);
  CHECK(solve(p).status == Status::kInfeasible);
}

TEST_CASE("Phase I detects infeasibility") {
  // y >= 1 and -y >= 0 cannot both hold.
  SdpProblem p;
  p.num_vars = 1;
  p.objective = Vector::Zero(1);
  LmiBlock a{"lower", -Matrix::Identity(1, 1), {{0, Matrix::Identity(1, 1)}}};
  LmiBlock b{"upper", Matrix::Zero(1, 1), {{0, -Matrix::Identity(1, 1)}}};
  p.blocks = {a, b};
  const SdpSolution sol = solve(p);
  CHECK(sol.status == Status::kInfeasible);
  CHECK(sol.phase1_margin < 0.0);
}

TEST_CASE("unbounded objective is reported, not looped on") {
  SdpProblem p;
  p.num_vars = 2;
  p.objective = mat({{0}, {1}});
  LmiBlock b{"only_first", Matrix::Identity(1, 1), {{0, Matrix::Identity(1, 1)}}};
  p.blocks = {b};
  const SdpSolution sol = solve(p);
  CHECK(sol.status == Status::kNumericalFailure);
}

TEST_CASE("equality elimination") {
  SdpProblem none = tight_pair();
  const ReducedProblem r0 = eliminate_equalities(none);
  CHECK(r0.back_map.basis.isIdentity());
  CHECK(r0.back_map.offset.isZero());

  SdpProblem two;
  two.num_vars = 2;
  two.objective = Vector::Ones(2);
  two.equalities.push_back({mat({{1}, {-1}}), 0.0});
  const ReducedProblem r1 = eliminate_equalities(two);
  CHECK(r1.problem.num_vars == 1);
  const Vector y = r1.back_map.apply(Vector::Constant(1, 0.7));
  CHECK(std::abs(y(0) - y(1)) < 1e-14);

  Rng rng(8);
  SdpProblem big;
  big.num_vars = 6;
  big.objective = Vector::Zero(6);
  const Matrix a = rng.uniform_matrix(3, 6, -1.0, 1.0);
  const Vector b = rng.uniform_vector(3, -1.0, 1.0);
  for (int k = 0; k < 3; ++k) big.equalities.push_back({a.row(k).transpose(), b(k)});
  const ReducedProblem r2 = eliminate_equalities(big);
  CHECK(r2.consistent);
  CHECK(r2.problem.num_vars == 3);
  for (int trial = 0; trial < 5; ++trial) {
    const Vector yy = r2.back_map.apply(rng.uniform_vector(3, -5.0, 5.0));
    CHECK((a * yy - b).norm() <= 1e-12 * std::max(1.0, yy.norm()));
  }

  SdpProblem bad = two;
  bad.equalities.push_back({mat({{1}, {-1}}), 1.0});
  CHECK_FALSE(eliminate_equalities(bad).consistent);
  bad.blocks.push_back({"pos", Matrix::Identity(1, 1), {{0, Matrix::Identity(1, 1)}}});
  CHECK(solve(bad).status == Status::kInfeasible);
}

TEST_CASE("solutions honor the original equalities") {
  // minimize y0 + y1 s.t. y0 = 2 y1 and [[y0, 1], [1, y1]] >= 0.
  SdpProblem p;
  p.num_vars = 2;
  p.objective = Vector::Ones(2);
  Matrix e00 = Matrix::Zero(2, 2), e11 = Matrix::Zero(2, 2);
  e00(0, 0) = 1.0;
  e11(1, 1) = 1.0;
  p.blocks.push_back({"b", mat({{0, 1}, {1, 0}}), {{0, e00}, {1, e11}}});
  p.equalities.push_back({mat({{1}, {-2}}), 0.0});
  const SdpSolution sol = solve(p);
  REQUIRE(sol.status == Status::kOptimal);
  CHECK(std::abs(sol.y(0) - 2.0 * sol.y(1)) <= 1e-10);
  // y1 = 1/sqrt(2), optimum 3/sqrt(2).
  CHECK(std::abs(sol.objective_value - 3.0 / std::sqrt(2.0)) <= 1e-6);
}

TEST_CASE("check_solution") {
  const SdpProblem p = tight_pair();
  const SdpSolution sol = solve(p);
  CHECK(check_solution(p, sol.y, 1e-6).pass);
  Vector worse = sol.y;
  worse(0) -= 1.0;
  CHECK_FALSE(check_solution(p, worse, 1e-6).pass);

  SdpProblem empty;
  empty.objective = Vector::Zero(0);
  CHECK(check_solution(empty, Vector::Zero(0), 1e-6).pass);
}

TEST_CASE("solver is deterministic") {
  Rng rng(99);
  const Matrix g = rng.uniform_matrix(3, 3, -1.0, 1.0);
  const SdpProblem p = trace_min(g * g.transpose());
  const SdpSolution a = solve(p), b = solve(p);
  CHECK(a.iterations == b.iterations);
  CHECK(a.y == b.y);
}

TEST_CASE("iteration cap yields max_iter") {
  SolveOptions opts;
  opts.max_iter = 3;
  CHECK(solve(tight_pair(), opts).status == Status::kMaxIter);
}

TEST_CASE("malformed problems are rejected") {
  SdpProblem p = tight_pair();
  p.blocks[0].coeffs[0].second(0, 1) = 5.0;
  CHECK_THROWS_AS(p.validate(), DimensionError);
  p = tight_pair();
  p.blocks[0].coeffs[0].first = 3;
  CHECK_THROWS_AS(solve(p), DimensionError);
}

TEST_CASE("SDPA export") {
  std::ostringstream os;
  write_sdpa(tight_pair(), os);
  const std::string text = os.str();
  CHECK(text.find("1 = mDIM") != std::string::npos);
  CHECK(text.find("1 = nBLOCK") != std::string::npos);
  CHECK(text.find("0 1 1 2 -1") != std::string::npos);
  CHECK(text.find("1 1 1 1 1") != std::string::npos);
}
