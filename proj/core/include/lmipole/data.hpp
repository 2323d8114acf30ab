#pragma once

// Identification experiments on the (hidden) plant and the data matrices
// built from them.

#include <cstdint>
#include <optional>
#include <string>

#include "lmipole/numerics.hpp"

namespace lmipole {

/// Plant dx/dt = A x + B1 w + B2 u with regulated outputs
///   z1 = C1 x + D11 w + D12 u,   z2 = C2 x + D22 u,
/// where C2 = [Qx^(1/2); 0] and D22 = [0; R^(1/2)].
struct SystemModel {
  Matrix A, B1, B2;
  Matrix C1, D11, D12;
  Matrix Qx, R;

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index m() const { return B2.cols(); }
  Eigen::Index d() const { return B1.cols(); }

  Matrix C2() const;
  Matrix D22() const;

  /// Throws DimensionError / NotPsdError on inconsistent data.
  void validate() const;
};

enum class DerivativeMode { kExact, kCentralDifference };

struct ExcitationConfig {
  int T = 15;
  double delta = 0.1;
  double u_bound = 0.5;
  double w_ball_radius = 0.05;
  std::uint64_t seed = 1;
  /// When unset the initial state is drawn uniformly from [-1, 1]^n.
  std::optional<Vector> x0;
  DerivativeMode derivatives = DerivativeMode::kExact;

  /// Throws Error for T < 1, delta <= 0, u_bound <= 0 or a negative radius.
  void validate() const;
};

/// Smallest sample count for which the rank condition can hold: (m+1)n + m.
int required_samples(Eigen::Index n, Eigen::Index m);

struct Excitation {
  Matrix u;  ///< m x T
  Matrix w;  ///< d x T
};

/// Input samples i.i.d. uniform on [-u_bound, u_bound]; disturbance samples
/// uniform on the 2-norm ball. Only the seed determines the result.
Excitation generate_excitation(const ExcitationConfig& cfg, Eigen::Index m, Eigen::Index d);

/// Initial state used when the config leaves x0 unset.
Vector default_initial_state(const ExcitationConfig& cfg, Eigen::Index n);

struct Trajectory {
  Vector times;        ///< T
  Matrix states;       ///< n x T
  Matrix derivatives;  ///< n x T
  Matrix inputs;       ///< m x T
  Matrix disturbances; ///< d x T

  Eigen::Index samples() const { return times.size(); }
  Eigen::Index n() const { return states.rows(); }
  Eigen::Index m() const { return inputs.rows(); }
  Eigen::Index d() const { return disturbances.rows(); }
};

/// Implicit trapezoidal rollout under zero-order-hold inputs. Derivative
/// samples are the exact vector field at each sample unless the config asks
/// for central differences.
Trajectory simulate_rollout(const SystemModel& sys, const ExcitationConfig& cfg, const Vector& x0);

/// Same as above with an explicit excitation (used for sensitivity studies
/// and integrator checks).
Trajectory simulate_rollout(const SystemModel& sys, const ExcitationConfig& cfg, const Vector& x0,
                            const Excitation& excitation);

/// Block Hankel matrix of a p x T sequence: block (r, c) = s(i + r + c),
/// L block rows and N columns.
Matrix build_hankel(const Matrix& sequence, int i, int block_rows, int cols);

struct DataMatrices {
  Matrix U01T;       ///< m x T
  Matrix X0T;        ///< n x T
  Matrix X1T;        ///< n x T, derivative samples
  Matrix W0T;        ///< d x T
  Matrix B1;         ///< n x d, known disturbance channel
  Matrix Xtilde1T;   ///< X1T - B1 W0T
  int T = 0;
  double delta = 0.0;

  Eigen::Index n() const { return X0T.rows(); }
  Eigen::Index m() const { return U01T.rows(); }
};

DataMatrices build_data_matrices(const Trajectory& traj, const Matrix& b1);

struct PersistencyReport {
  int required_T = 0;
  int actual_T = 0;
  int rank = 0;
  int required_rank = 0;
  /// Rank of the order-(n+1) input Hankel matrix, and the full rank m(n+1).
  int input_hankel_rank = 0;
  int input_hankel_required = 0;
  bool pass = false;
};

PersistencyReport check_persistency(const DataMatrices& dm, Eigen::Index n, Eigen::Index m);

/// FNV-1a digest over the data matrices, used for provenance records.
std::string data_digest(const DataMatrices& dm);

}  // namespace lmipole
