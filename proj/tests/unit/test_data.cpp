#include <doctest.h>

#include "lmipole/data.hpp"
#include "lmipole/errors.hpp"
#include "lmipole/serialize.hpp"
#include "oracles.hpp"

using namespace lmipole;

namespace {

SystemModel integrator(Eigen::Index n) {
  SystemModel sys;
  sys.A = Matrix::Zero(n, n);
  sys.B1 = Matrix::Identity(n, n);
  sys.B2 = Matrix::Identity(n, n);
  sys.C1 = Matrix::Identity(n, n);
  sys.D11 = Matrix::Zero(n, n);
  sys.D12 = Matrix::Zero(n, n);
  sys.Qx = Matrix::Identity(n, n);
  sys.R = Matrix::Identity(n, n);
  return sys;
}

}  // namespace

TEST_CASE("required sample count") {
  CHECK(required_samples(3, 2) == 11);
  CHECK(required_samples(2, 1) == 5);
}

TEST_CASE("excitation respects bounds and is seed-determined") {
  ExcitationConfig cfg;
  const Excitation a = generate_excitation(cfg, 2, 3);
  const Excitation b = generate_excitation(cfg, 2, 3);
  CHECK(a.u.rows() == 2);
  CHECK(a.u.cols() == 15);
  CHECK(a.w.rows() == 3);
  CHECK(a.u == b.u);
  CHECK(a.w == b.w);
  CHECK(a.u.cwiseAbs().maxCoeff() <= 0.5);
  for (Eigen::Index k = 0; k < a.w.cols(); ++k) CHECK(a.w.col(k).norm() <= 0.05);

  cfg.seed = 2;
  CHECK(generate_excitation(cfg, 2, 3).u != a.u);

  cfg.w_ball_radius = 0.0;
  CHECK(generate_excitation(cfg, 2, 3).w.isZero(0.0));
}

TEST_CASE("input stream does not depend on disturbance dimension") {
  ExcitationConfig cfg;
  CHECK(generate_excitation(cfg, 2, 1).u == generate_excitation(cfg, 2, 4).u);
}

TEST_CASE("ball samples fill the ball uniformly in radius") {
  Rng rng(77);
  constexpr int kDraws = 20000;
  int inner = 0;
  for (int i = 0; i < kDraws; ++i) {
    const double r = rng.uniform_in_ball(3, 1.0).norm();
    CHECK(r <= 1.0);
    inner += r <= 0.5;
  }
  // P(r <= 1/2) = 1/8 in three dimensions.
  CHECK(static_cast<double>(inner) / kDraws == doctest::Approx(0.125).epsilon(0.1));
}

TEST_CASE("pure integrator rollout is exact") {
  const SystemModel sys = integrator(2);
  ExcitationConfig cfg;
  cfg.T = 6;
  cfg.delta = 0.25;
  Excitation ex{Matrix::Constant(2, 6, 0.3), Matrix::Zero(2, 6)};
  ex.u.row(1).setConstant(-0.2);
  const Trajectory traj = simulate_rollout(sys, cfg, Vector::Zero(2), ex);
  for (Eigen::Index k = 0; k < 6; ++k) {
    CHECK(traj.states(0, k) == doctest::Approx(k * 0.25 * 0.3));
    CHECK(traj.states(1, k) == doctest::Approx(-k * 0.25 * 0.2));
    CHECK(traj.derivatives(0, k) == doctest::Approx(0.3));
    CHECK(traj.times(k) == doctest::Approx(0.25 * k));
  }
}

TEST_CASE("scalar decay follows the trapezoidal recurrence") {
  SystemModel sys = integrator(1);
  sys.A(0, 0) = -1.0;
  ExcitationConfig cfg;
  cfg.T = 11;
  cfg.delta = 0.1;
  const Excitation ex{Matrix::Zero(1, 11), Matrix::Zero(1, 11)};
  const Trajectory traj = simulate_rollout(sys, cfg, Vector::Ones(1), ex);
  const double ratio = (1.0 - 0.05) / (1.0 + 0.05);
  for (Eigen::Index k = 0; k < 11; ++k) {
    CHECK(traj.states(0, k) == doctest::Approx(std::pow(ratio, static_cast<double>(k))).epsilon(1e-12));
    CHECK(std::abs(traj.states(0, k) - std::exp(-0.1 * k)) < 1e-3);
  }
}

TEST_CASE("singular implicit step is reported") {
  SystemModel sys = integrator(1);
  sys.A(0, 0) = 20.0;
  ExcitationConfig cfg;
  cfg.delta = 0.1;
  CHECK_THROWS_AS(simulate_rollout(sys, cfg, Vector::Zero(1)), SingularMatrixError);
}

TEST_CASE("reference rollout shape and exact derivatives") {
  const SystemModel sys = io::reference_plant();
  ExcitationConfig cfg;
  const Trajectory traj = simulate_rollout(sys, cfg, default_initial_state(cfg, 3));
  CHECK(traj.samples() == 15);
  CHECK(traj.n() == 3);
  CHECK(traj.m() == 2);
  CHECK(traj.d() == 3);
  double worst = 0.0;
  for (Eigen::Index k = 0; k < 15; ++k) {
    const Vector f = sys.A * traj.states.col(k) + sys.B1 * traj.disturbances.col(k) + sys.B2 * traj.inputs.col(k);
    worst = std::max(worst, (traj.derivatives.col(k) - f).cwiseAbs().maxCoeff());
  }
  CHECK(worst == 0.0);
  const Vector x0 = default_initial_state(cfg, 3);
  CHECK(x0.cwiseAbs().maxCoeff() <= 1.0);
}

TEST_CASE("central-difference derivative mode approximates the vector field") {
  const SystemModel sys = io::reference_plant();
  ExcitationConfig cfg;
  cfg.derivatives = DerivativeMode::kCentralDifference;
  const Trajectory fd = simulate_rollout(sys, cfg, default_initial_state(cfg, 3));
  cfg.derivatives = DerivativeMode::kExact;
  const Trajectory exact = simulate_rollout(sys, cfg, default_initial_state(cfg, 3));
  CHECK(fd.states == exact.states);
  CHECK((fd.derivatives - exact.derivatives).norm() > 0.0);
  CHECK((fd.derivatives - exact.derivatives).norm() < 0.5 * exact.derivatives.norm());
}

TEST_CASE("build_hankel") {
  Matrix s(1, 4);
  s << 1, 2, 3, 4;
  const Matrix row = build_hankel(s.leftCols(3), 0, 1, 3);
  CHECK(row == Matrix(s.leftCols(3)));
  Matrix expect(2, 3);
  expect << 1, 2, 3, 2, 3, 4;
  CHECK(build_hankel(s, 0, 2, 3) == expect);
  CHECK_THROWS(build_hankel(s, 0, 2, 4));

  Rng rng(1);
  const Matrix seq = rng.uniform_matrix(2, 9, -1.0, 1.0);
  for (int i = 0; i < 3; ++i) {
    for (int L = 1; L <= 3; ++L) {
      for (int N = 1; i + L + N - 2 <= 8; ++N) {
        const Matrix h = build_hankel(seq, i, L, N);
        REQUIRE(h.rows() == 2 * L);
        REQUIRE(h.cols() == N);
        for (int r = 0; r < L; ++r) {
          for (int c = 0; c < N; ++c) CHECK(h.block(2 * r, c, 2, 1) == seq.col(i + r + c));
        }
      }
    }
  }
  CHECK(build_hankel(rng.uniform_matrix(2, 15, -1, 1), 0, 1, 15).rows() == 2);
}

TEST_CASE("data matrices from the reference rollout") {
  const SystemModel sys = io::reference_plant();
  ExcitationConfig cfg;
  const Trajectory traj = simulate_rollout(sys, cfg, default_initial_state(cfg, 3));
  const DataMatrices dm = build_data_matrices(traj, sys.B1);
  CHECK(dm.X0T.rows() == 3);
  CHECK(dm.X0T.cols() == 15);
  CHECK(dm.U01T.rows() == 2);
  CHECK(dm.T == 15);
  CHECK(dm.delta == doctest::Approx(0.1));
  CHECK((dm.Xtilde1T - (dm.X1T - sys.B1 * dm.W0T)).norm() == 0.0);
  // Column k recomputed from the hidden model.
  for (Eigen::Index k = 0; k < 15; ++k) {
    const Vector f = sys.A * dm.X0T.col(k) + sys.B1 * dm.W0T.col(k) + sys.B2 * dm.U01T.col(k);
    CHECK((dm.X1T.col(k) - f).norm() == 0.0);
    CHECK((dm.Xtilde1T.col(k) - sys.A * dm.X0T.col(k) - sys.B2 * dm.U01T.col(k)).norm() < 1e-14);
  }
  CHECK_THROWS_AS(build_data_matrices(traj, Matrix::Identity(3, 2)), DimensionError);

  cfg.w_ball_radius = 0.0;
  const DataMatrices quiet = build_data_matrices(simulate_rollout(sys, cfg, Vector::Zero(3)), sys.B1);
  CHECK(quiet.Xtilde1T == quiet.X1T);
}

TEST_CASE("persistency check") {
  const SystemModel sys = io::reference_plant();
  ExcitationConfig cfg;
  const DataMatrices dm = build_data_matrices(simulate_rollout(sys, cfg, default_initial_state(cfg, 3)), sys.B1);
  const PersistencyReport rep = check_persistency(dm, 3, 2);
  CHECK(rep.pass);
  CHECK(rep.rank == 5);
  CHECK(rep.required_rank == 5);
  CHECK(rep.required_T == 11);
  CHECK(rep.actual_T == 15);

  Matrix stacked(5, 15);
  stacked << dm.U01T, dm.X0T;
  CHECK(rep.rank == Eigen::JacobiSVD<Matrix>(stacked).setThreshold(1e-9 * 15).rank());

  DataMatrices zero = dm;
  zero.U01T.setZero();
  zero.X0T.setZero();
  const PersistencyReport bad = check_persistency(zero, 3, 2);
  CHECK_FALSE(bad.pass);
  CHECK(bad.rank == 0);

  ExcitationConfig short_cfg;
  short_cfg.T = 5;
  const DataMatrices few =
      build_data_matrices(simulate_rollout(sys, short_cfg, default_initial_state(short_cfg, 3)), sys.B1);
  CHECK_FALSE(check_persistency(few, 3, 2).pass);
}

TEST_CASE("persistency holds on nearly every seed") {
  const SystemModel sys = io::reference_plant();
  int passes = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    ExcitationConfig cfg;
    cfg.seed = seed;
    passes += check_persistency(build_data_matrices(simulate_rollout(sys, cfg, default_initial_state(cfg, 3)), sys.B1),
                                3, 2)
                  .pass;
  }
  CHECK(passes >= 19);
}

TEST_CASE("trapezoidal integration is second order") {
  Rng rng(31);
  const Matrix a = oracle::random_stable(rng, 3, 0.3);
  SystemModel sys = integrator(3);
  sys.A = a;
  sys.B2 = rng.uniform_matrix(3, 3, -1.0, 1.0);
  const Vector x0 = rng.uniform_vector(3, -1.0, 1.0);
  const Vector u = rng.uniform_vector(3, -0.5, 0.5);
  const double horizon = 2.0;
  auto terminal_error = [&](int steps) {
    ExcitationConfig cfg;
    cfg.T = steps + 1;
    cfg.delta = horizon / steps;
    Excitation ex{u.replicate(1, steps + 1), Matrix::Zero(3, steps + 1)};
    const Trajectory traj = simulate_rollout(sys, cfg, x0, ex);
    return (traj.states.col(steps) - oracle::zoh_state(a, sys.B2, x0, u, horizon)).norm();
  };
  const double ratio = terminal_error(20) / terminal_error(40);
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}

TEST_CASE("invalid excitation config") {
  ExcitationConfig cfg;
  cfg.delta = 0.0;
  CHECK_THROWS(cfg.validate());
  cfg = {};
  cfg.u_bound = -1.0;
  CHECK_THROWS(cfg.validate());
  cfg = {};
  cfg.w_ball_radius = -0.1;
  CHECK_THROWS(cfg.validate());
}

TEST_CASE("data digest changes with the data") {
  const SystemModel sys = io::reference_plant();
  ExcitationConfig cfg;
  DataMatrices dm = build_data_matrices(simulate_rollout(sys, cfg, default_initial_state(cfg, 3)), sys.B1);
  const std::string d0 = data_digest(dm);
  CHECK(d0 == data_digest(dm));
  dm.U01T(0, 0) += 1e-12;
  CHECK(d0 != data_digest(dm));
}
