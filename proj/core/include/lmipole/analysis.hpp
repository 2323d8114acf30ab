#pragma once

// Ground-truth checks of a designed gain: closed-loop poles, region
// membership, and H2 / H-infinity norms computed without any SDP.

#include <optional>
#include <string>
#include <vector>

#include "lmipole/data.hpp"
#include "lmipole/numerics.hpp"
#include "lmipole/region.hpp"

namespace lmipole {

struct ControllerResult;
struct SynthesisSpec;

namespace analysis {

/// |margin| at or below this counts as "on the boundary".
inline constexpr double kBoundaryBand = 1e-9;
/// Hamiltonian eigenvalues with |Re| below this count as imaginary.
inline constexpr double kImaginaryAxisTol = 1e-7;
inline constexpr double kHinfRelTol = 1e-4;

std::vector<Complex> closed_loop_eigs(const SystemModel& sys, const Matrix& k);

struct Membership {
  bool member = false;
  bool boundary = false;
  double margin = 0.0;  ///< max eigenvalue of psi(lambda); negative inside
};

/// General-form test: max eigenvalue of alpha + z beta + conj(z) beta^T.
Membership region_membership(Complex lambda, const LmiRegion& region);
/// Closed-form sector test |Im| * alpha < -Re for conic regions.
bool conic_fast_member(Complex lambda, double alpha);

/// sqrt(trace(C Wc C^T)), Wc the controllability Gramian of (A, B).
double h2_norm(const Matrix& a, const Matrix& b, const Matrix& c);

/// Bisection on the Hamiltonian imaginary-axis test, relative width tol.
double hinf_norm(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d,
                 double tol = kHinfRelTol);

/// Closed-loop realization used by verification. Built either from the true
/// plant or from data (Xtilde1T G equals A + B2 K under the rank condition).
struct ClosedLoop {
  Matrix A;     ///< A + B2 K
  Matrix B1;
  Matrix C1;    ///< C1 + D12 K
  Matrix D11;
  Matrix C2;    ///< C2 + D22 K
  std::string source;  ///< "model" or "data"
};

ClosedLoop closed_loop_from_model(const SystemModel& sys, const Matrix& k);
/// Recovers A + B2 K = Xtilde1T Q (X0T Q)^{-1} from data, so no plant
/// matrices other than the known design matrices are used.
ClosedLoop closed_loop_from_data(const DataMatrices& dm, const Matrix& q, const Matrix& k,
                                 const SynthesisSpec& spec);

struct PoleReport {
  Complex pole;
  Membership membership;
};

struct VerificationReport {
  std::vector<PoleReport> poles;
  bool stable = false;
  bool all_members = false;
  std::optional<double> h2_norm;
  std::optional<double> hinf_norm;
  std::optional<double> gamma_claimed;
  /// hinf_norm <= gamma_claimed + allowance; true when no gamma is claimed.
  bool hinf_within_gamma = true;
  double hinf_allowance = 0.0;
  std::string region;
  std::string closed_loop_source;
  double hinf_tol = kHinfRelTol;
  double boundary_band = kBoundaryBand;
  std::vector<std::string> notes;

  bool pass() const { return stable && all_members && hinf_within_gamma; }
};

VerificationReport verify_closed_loop(const ClosedLoop& cl, const LmiRegion& region,
                                      std::optional<double> gamma_claimed);

VerificationReport verify_design(const SystemModel& sys, const ControllerResult& result,
                                 const SynthesisSpec& spec);

double compare_gains(const Matrix& k1, const Matrix& k2);

}  // namespace analysis
}  // namespace lmipole
