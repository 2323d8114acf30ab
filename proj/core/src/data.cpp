#include "lmipole/data.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>

#include "lmipole/errors.hpp"
#include "lmipole/random.hpp"

namespace lmipole {

namespace {

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw DimensionError(std::string(name) + ": expected " + std::to_string(rows) + "x" +
                         std::to_string(cols) + ", got " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
}

// Separate streams so adding disturbance channels never changes the inputs.
constexpr std::uint64_t kInputStream = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kDisturbanceStream = 0xbf58476d1ce4e5b9ULL;
constexpr std::uint64_t kInitialStateStream = 0x94d049bb133111ebULL;

}  // namespace

Matrix SystemModel::C2() const {
  Matrix c2 = Matrix::Zero(n() + m(), n());
  c2.topRows(n()) = numerics::sqrtm_psd(Qx);
  return c2;
}

Matrix SystemModel::D22() const {
  Matrix d22 = Matrix::Zero(n() + m(), m());
  d22.bottomRows(m()) = numerics::sqrtm_psd(R);
  return d22;
}

void SystemModel::validate() const {
  const auto nn = A.rows();
  if (nn == 0) throw DimensionError("system.A: empty");
  require_shape(A, nn, nn, "system.A");
  if (B2.rows() != nn || B2.cols() == 0) throw DimensionError("system.B2: expected n rows");
  if (B1.rows() != nn || B1.cols() == 0) throw DimensionError("system.B1: expected n rows");
  const auto p1 = C1.rows();
  if (p1 == 0) throw DimensionError("system.C1: empty");
  require_shape(C1, p1, nn, "system.C1");
  require_shape(D11, p1, d(), "system.D11");
  require_shape(D12, p1, m(), "system.D12");
  require_shape(Qx, nn, nn, "system.Qx");
  require_shape(R, m(), m(), "system.R");
  for (const Matrix* mat : {&A, &B1, &B2, &C1, &D11, &D12, &Qx, &R}) {
    if (!mat->allFinite()) throw Error("system: non-finite entries");
  }
  const double qscale = std::max(1.0, Qx.norm());
  if ((Qx - Qx.transpose()).cwiseAbs().maxCoeff() > 1e-12 * qscale ||
      numerics::min_eig_sym(Qx) < -1e-10 * qscale) {
    throw NotPsdError("system.Qx: must be symmetric positive semidefinite");
  }
  if ((R - R.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, R.norm()) ||
      !numerics::cholesky(R)) {
    throw NotPsdError("system.R: must be symmetric positive definite");
  }
}

void ExcitationConfig::validate() const {
  if (T < 1) throw Error("excitation.T: must be at least 1");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw Error("excitation.delta: must be positive");
  if (!(u_bound > 0.0) || !std::isfinite(u_bound)) {
    throw Error("excitation.u_bound: must be positive");
  }
  if (!(w_ball_radius >= 0.0) || !std::isfinite(w_ball_radius)) {
    throw Error("excitation.w_ball_radius: must be non-negative");
  }
}

int required_samples(Eigen::Index n, Eigen::Index m) {
  return static_cast<int>((m + 1) * n + m);
}

Excitation generate_excitation(const ExcitationConfig& cfg, Eigen::Index m, Eigen::Index d) {
  cfg.validate();
  Excitation ex{Matrix(m, cfg.T), Matrix(d, cfg.T)};
  Rng input_rng(cfg.seed ^ kInputStream);
  for (int k = 0; k < cfg.T; ++k) {
    for (Eigen::Index i = 0; i < m; ++i) ex.u(i, k) = input_rng.uniform(-cfg.u_bound, cfg.u_bound);
  }
  Rng disturbance_rng(cfg.seed ^ kDisturbanceStream);
  for (int k = 0; k < cfg.T; ++k) ex.w.col(k) = disturbance_rng.uniform_in_ball(d, cfg.w_ball_radius);
  return ex;
}

Vector default_initial_state(const ExcitationConfig& cfg, Eigen::Index n) {
  if (cfg.x0) {
    if (cfg.x0->size() != n) throw DimensionError("excitation.x0: expected n entries");
    return *cfg.x0;
  }
  Rng rng(cfg.seed ^ kInitialStateStream);
  return rng.uniform_vector(n, -1.0, 1.0);
}

Trajectory simulate_rollout(const SystemModel& sys, const ExcitationConfig& cfg, const Vector& x0) {
  return simulate_rollout(sys, cfg, x0, generate_excitation(cfg, sys.m(), sys.d()));
}

Trajectory simulate_rollout(const SystemModel& sys, const ExcitationConfig& cfg, const Vector& x0,
                            const Excitation& excitation) {
  cfg.validate();
  const auto n = sys.n();
  if (x0.size() != n) throw DimensionError("simulate_rollout: x0 has wrong size");
  require_shape(excitation.u, sys.m(), cfg.T, "simulate_rollout: inputs");
  require_shape(excitation.w, sys.d(), cfg.T, "simulate_rollout: disturbances");

  const Matrix identity = Matrix::Identity(n, n);
  const double h = cfg.delta;
  const Matrix lhs = identity - 0.5 * h * sys.A;
  const Matrix rhs = identity + 0.5 * h * sys.A;
  Eigen::PartialPivLU<Matrix> lu(lhs);
  {
    const Vector pivots = lu.matrixLU().diagonal().cwiseAbs();
    if (!(pivots.minCoeff() > 1e-10 * std::max(1.0, pivots.maxCoeff()))) {
      throw SingularMatrixError("simulate_rollout: I - (delta/2) A is singular; use a smaller delta");
    }
  }

  // One extra state so central differences have a right neighbour.
  const int steps = cfg.T + (cfg.derivatives == DerivativeMode::kCentralDifference ? 1 : 0);
  Matrix states(n, steps);
  states.col(0) = x0;
  for (int k = 0; k + 1 < steps; ++k) {
    const int kin = std::min(k, cfg.T - 1);
    const Vector forcing = h * (sys.B1 * excitation.w.col(kin) + sys.B2 * excitation.u.col(kin));
    states.col(k + 1) = lu.solve(rhs * states.col(k) + forcing);
  }

  Trajectory traj;
  traj.times.resize(cfg.T);
  for (int k = 0; k < cfg.T; ++k) traj.times(k) = k * h;
  traj.states = states.leftCols(cfg.T);
  traj.inputs = excitation.u;
  traj.disturbances = excitation.w;
  traj.derivatives.resize(n, cfg.T);
  if (cfg.derivatives == DerivativeMode::kExact) {
    for (int k = 0; k < cfg.T; ++k) {
      const Vector x = traj.states.col(k);
      const Vector w = traj.disturbances.col(k);
      const Vector u = traj.inputs.col(k);
      traj.derivatives.col(k) = sys.A * x + sys.B1 * w + sys.B2 * u;
    }
  } else {
    traj.derivatives.col(0) = (states.col(1) - states.col(0)) / h;
    for (int k = 1; k < cfg.T; ++k) {
      traj.derivatives.col(k) = (states.col(k + 1) - states.col(k - 1)) / (2.0 * h);
    }
  }
  return traj;
}

Matrix build_hankel(const Matrix& sequence, int i, int block_rows, int cols) {
  const auto p = sequence.rows();
  const auto length = sequence.cols();
  if (i < 0 || block_rows < 1 || cols < 1) throw Error("build_hankel: invalid index arguments");
  if (i + block_rows + cols - 2 > length - 1) {
    throw Error("build_hankel: sequence of length " + std::to_string(length) +
                " is too short for " + std::to_string(block_rows) + " block rows and " +
                std::to_string(cols) + " columns starting at " + std::to_string(i));
  }
  Matrix h(p * block_rows, cols);
  for (int r = 0; r < block_rows; ++r) {
    for (int c = 0; c < cols; ++c) h.block(r * p, c, p, 1) = sequence.col(i + r + c);
  }
  return h;
}

DataMatrices build_data_matrices(const Trajectory& traj, const Matrix& b1) {
  const auto n = traj.n();
  const auto samples = traj.samples();
  if (samples == 0) throw Error("build_data_matrices: empty trajectory");
  require_shape(traj.states, n, samples, "trajectory.states");
  require_shape(traj.derivatives, n, samples, "trajectory.derivatives");
  if (traj.inputs.cols() != samples || traj.disturbances.cols() != samples) {
    throw DimensionError("build_data_matrices: series lengths differ");
  }
  if (b1.rows() != n || b1.cols() != traj.d()) {
    throw DimensionError("build_data_matrices: B1 is " + std::to_string(b1.rows()) + "x" +
                         std::to_string(b1.cols()) + " but W0T has " +
                         std::to_string(traj.d()) + " rows and the state has " +
                         std::to_string(n));
  }
  const int t = static_cast<int>(samples);
  DataMatrices dm;
  dm.U01T = build_hankel(traj.inputs, 0, 1, t);
  dm.X0T = build_hankel(traj.states, 0, 1, t);
  dm.X1T = traj.derivatives;
  dm.W0T = traj.d() > 0 ? build_hankel(traj.disturbances, 0, 1, t) : Matrix(0, t);
  dm.B1 = b1;
  dm.Xtilde1T = dm.X1T - b1 * dm.W0T;
  dm.T = t;
  dm.delta = samples > 1 ? traj.times(1) - traj.times(0) : 0.0;
  return dm;
}

PersistencyReport check_persistency(const DataMatrices& dm, Eigen::Index n, Eigen::Index m) {
  PersistencyReport rep;
  rep.required_T = required_samples(n, m);
  rep.actual_T = dm.T;
  rep.required_rank = static_cast<int>(n + m);
  if (dm.U01T.rows() != m || dm.X0T.rows() != n) {
    rep.pass = false;
    return rep;
  }
  Matrix stacked(m + n, dm.T);
  stacked << dm.U01T, dm.X0T;
  rep.rank = numerics::matrix_rank(stacked);
  const int order = static_cast<int>(n + 1);
  rep.input_hankel_required = static_cast<int>(m) * order;
  if (dm.T - order + 1 >= 1) {
    rep.input_hankel_rank =
        numerics::matrix_rank(build_hankel(dm.U01T, 0, order, dm.T - order + 1));
  }
  rep.pass = rep.rank == rep.required_rank && rep.actual_T >= rep.required_T;
  return rep;
}

std::string data_digest(const DataMatrices& dm) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto feed = [&hash](const Matrix& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        const double v = m(r, c);
        unsigned char bytes[sizeof(double)];
        std::memcpy(bytes, &v, sizeof(double));
        for (unsigned char b : bytes) {
          hash ^= b;
          hash *= 0x100000001b3ULL;
        }
      }
    }
  };
  feed(dm.U01T);
  feed(dm.X0T);
  feed(dm.X1T);
  feed(dm.W0T);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace lmipole
