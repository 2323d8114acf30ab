#pragma once

// Small dense semidefinite programs:
//
//   minimize    c^T y
//   subject to  F0_j + sum_i y_i F_ij  >= 0   (each block j, PSD order)
//               a_k^T y = b_k
//
// solved with a log-det barrier method (Phase I for a strictly feasible
// start, Phase II path following).

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "lmipole/numerics.hpp"

namespace lmipole::sdp {

/// Affine symmetric matrix function y -> constant + sum_i y_i coeffs[i].
/// Variables with a zero coefficient are simply not listed.
struct LmiBlock {
  std::string name;
  Matrix constant;
  std::vector<std::pair<int, Matrix>> coeffs;

  Eigen::Index dim() const { return constant.rows(); }
  Matrix evaluate(const Vector& y) const;
};

struct Equality {
  Vector a;
  double b = 0.0;
};

struct SdpProblem {
  int num_vars = 0;
  Vector objective;
  std::vector<LmiBlock> blocks;
  std::vector<Equality> equalities;
  std::vector<std::string> var_names;

  /// Throws DimensionError when block coefficients are not square/symmetric
  /// or refer to variables out of range.
  void validate() const;
  int total_block_dim() const;
};

enum class Status { kOptimal, kInfeasible, kMaxIter, kNumericalFailure };

std::string to_string(Status s);

struct SolveOptions {
  double feas_tol = 1e-8;
  double obj_tol = 1e-7;
  int max_iter = 200;
  /// Phase I searches the ball |w| < phase1_radius in reduced coordinates.
  double phase1_radius = 1e4;
  bool verbose = false;
};

struct SdpSolution {
  Vector y;
  double objective_value = 0.0;
  Status status = Status::kNumericalFailure;
  std::string message;
  std::vector<double> block_min_eig;
  int iterations = 0;          ///< Newton steps, both phases
  int phase1_iterations = 0;
  double final_mu = 0.0;
  double duality_measure = 0.0;  ///< mu * total block dimension at termination
  double phase1_margin = 0.0;    ///< best t found by Phase I (t* < 0 means infeasible)
  /// Objective at the end of each Phase II centering step.
  std::vector<double> outer_objectives;
};

/// y = offset + basis * z.
struct AffineMap {
  Vector offset;
  Matrix basis;

  Vector apply(const Vector& z) const { return offset + basis * z; }
};

struct ReducedProblem {
  SdpProblem problem;
  AffineMap back_map;
  bool consistent = true;
  double residual = 0.0;
};

/// Parameterizes {y : A y = b} as y0 + N z and substitutes into every block.
/// `consistent` is false when the equalities have no solution.
ReducedProblem eliminate_equalities(const SdpProblem& p);

SdpSolution solve(const SdpProblem& p, const SolveOptions& opts = {});

struct ResidualReport {
  std::vector<double> block_min_eig;
  std::vector<double> equality_residuals;
  double objective_value = 0.0;
  bool pass = true;
};

ResidualReport check_solution(const SdpProblem& p, const Vector& y, double tol);

/// Writes the problem in SDPA sparse format (".dat-s"). Equalities become a
/// diagonal (LP) block holding a^T y - b >= 0 and b - a^T y >= 0.
void write_sdpa(const SdpProblem& p, std::ostream& out);

}  // namespace lmipole::sdp
