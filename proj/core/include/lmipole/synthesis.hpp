#pragma once

// State-feedback synthesis programs: D-stability and mixed H2/H-infinity,
// written either over measured data (decision variable Q, T x n) or over
// the plant model (decision variables Y = K X and X).

#include <optional>
#include <string>
#include <variant>

#include "lmipole/analysis.hpp"
#include "lmipole/data.hpp"
#include "lmipole/errors.hpp"
#include "lmipole/region.hpp"
#include "lmipole/sdp.hpp"

namespace lmipole {

enum class DesignMode { kDstabOnly, kMixedOptGamma, kMixedFixedGamma };

std::string to_string(DesignMode mode);
DesignMode parse_design_mode(const std::string& text);

struct SynthesisSpec {
  LmiRegion region = LmiRegion::conic_alpha(2.0);
  Matrix Qx, R;
  Matrix C1, D11, D12;
  Matrix B1;
  DesignMode mode = DesignMode::kMixedOptGamma;
  double gamma_bar = 0.0;
  /// Base strictness margin; the effective margin is epsilon * (1 + ||data||_F).
  double epsilon = 1e-6;
  /// Put X1T (not X1T - B1 W0T) in the pole-placement block.
  bool literal_paper_lmis = false;
  /// false drops the pole-placement block (ablation).
  bool pole_constraint = true;

  /// Throws Error on inconsistent dimensions, gamma_bar <= 0 in fixed mode,
  /// or epsilon <= 0.
  void validate(Eigen::Index n, Eigen::Index m) const;
};

/// Design knowledge taken from a plant model (B1, C1, D11, D12, Qx, R).
SynthesisSpec spec_from_model(const SystemModel& sys, const LmiRegion& region, DesignMode mode);

/// Index bookkeeping for the decision vector.
struct VariableLayout {
  int num_vars = 0;
  int q_offset = -1;       ///< data route: Q row-major, T x n
  int y_offset = -1;       ///< model route: Y row-major, m x n
  int x_offset = -1;       ///< model route: upper triangle of X
  int s_offset = -1;       ///< upper triangle of S (m x m)
  int gamma_index = -1;
  Eigen::Index T = 0, n = 0, m = 0;
};

struct AssembledProgram {
  sdp::SdpProblem problem;
  VariableLayout layout;
  double epsilon = 0.0;          ///< effective strictness margin
  Vector column_scale;           ///< data route: Q = diag(column_scale) Q'
};

class SynthesisError : public Error {
 public:
  SynthesisError(const std::string& what, sdp::Status status) : Error(what), status_(status) {}
  sdp::Status status() const { return status_; }

 private:
  sdp::Status status_;
};

class PersistencyError : public Error {
 public:
  PersistencyError(const std::string& what, PersistencyReport report)
      : Error(what), report_(report) {}
  const PersistencyReport& report() const { return report_; }

 private:
  PersistencyReport report_;
};

class RecoveryError : public Error {
 public:
  using Error::Error;
};

AssembledProgram assemble_dstab_data(const DataMatrices& dm, const LmiRegion& region, double epsilon);
AssembledProgram assemble_mixed_data(const DataMatrices& dm, const SynthesisSpec& spec);
AssembledProgram assemble_mixed_model(const SystemModel& sys, const SynthesisSpec& spec);
/// Model-based D-stability feasibility program (Y, X only).
AssembledProgram assemble_dstab_model(const SystemModel& sys, const LmiRegion& region, double epsilon);

struct GainRecovery {
  Matrix K;
  Matrix X;
};

/// X = sym(X0T Q), K = U01T Q X^{-1}. Throws RecoveryError when X0T Q is
/// near singular.
GainRecovery recover_gain_data(const Matrix& q, const DataMatrices& dm);

struct SolverDiagnostics {
  std::string status;
  std::string message;
  int iterations = 0;
  int phase1_iterations = 0;
  double duality_measure = 0.0;
  double epsilon = 0.0;
  std::vector<double> block_min_eig;
  std::vector<std::string> block_names;
  double max_equality_residual = 0.0;
};

struct Provenance {
  std::string route;  ///< "data" or "model"
  DesignMode mode = DesignMode::kMixedOptGamma;
  std::optional<std::uint64_t> seed;
  std::string data_digest;
};

struct ControllerResult {
  Matrix K, X, S;
  std::optional<Matrix> Q;  ///< data route only
  std::optional<double> gamma;
  double objective = 0.0;
  SolverDiagnostics diagnostics;
  Provenance provenance;
  analysis::VerificationReport report;
};

using DesignSource = std::variant<DataMatrices, SystemModel>;

/// Checks persistency (data route), assembles, solves, recovers the gain and
/// attaches the verification report. Throws PersistencyError,
/// SynthesisError (solver status other than optimal) or RecoveryError.
ControllerResult design(const SynthesisSpec& spec, const DesignSource& source,
                        const sdp::SolveOptions& opts = {});

/// Largest eigenvalue of the model-based pole-placement block and of the
/// bounded-real block at (K, X, gamma) for the true (A, B2). Certificates
/// transfer when both are negative.
struct CertificateCheck {
  double pole_block_max_eig = 0.0;
  double kyp_block_max_eig = 0.0;
  double x_min_eig = 0.0;
};

CertificateCheck check_model_certificate(const SystemModel& sys, const SynthesisSpec& spec,
                                         const Matrix& k, const Matrix& x, double gamma);

}  // namespace lmipole
