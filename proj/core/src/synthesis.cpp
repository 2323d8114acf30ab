#include "lmipole/synthesis.hpp"

#include <cmath>

#include "lmipole/affine.hpp"
#include "lmipole/errors.hpp"

namespace lmipole {

std::string to_string(DesignMode mode) {
  switch (mode) {
    case DesignMode::kDstabOnly: return "dstab_only";
    case DesignMode::kMixedOptGamma: return "mixed_opt_gamma";
    case DesignMode::kMixedFixedGamma: return "mixed_fixed_gamma";
  }
  return "unknown";
}

DesignMode parse_design_mode(const std::string& text) {
  if (text == "dstab_only" || text == "dstab") return DesignMode::kDstabOnly;
  if (text == "mixed_opt_gamma" || text == "mixed") return DesignMode::kMixedOptGamma;
  if (text == "mixed_fixed_gamma" || text == "mixed-fixed-gamma") return DesignMode::kMixedFixedGamma;
  throw Error("unknown design mode '" + text + "'");
}

void SynthesisSpec::validate(Eigen::Index n, Eigen::Index m) const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw Error("spec.epsilon: must be positive");
  if (mode == DesignMode::kMixedFixedGamma && !(gamma_bar > 0.0)) {
    throw Error("spec.gamma_bar: must be positive in mixed_fixed_gamma mode");
  }
  if (mode == DesignMode::kDstabOnly) return;
  const auto d = B1.cols();
  const auto p1 = C1.rows();
  if (B1.rows() != n || d == 0) throw DimensionError("spec.B1: expected n rows");
  if (C1.cols() != n || p1 == 0) throw DimensionError("spec.C1: expected n columns");
  if (D11.rows() != p1 || D11.cols() != d) throw DimensionError("spec.D11: expected p1 x d");
  if (D12.rows() != p1 || D12.cols() != m) throw DimensionError("spec.D12: expected p1 x m");
  if (Qx.rows() != n || Qx.cols() != n) throw DimensionError("spec.Qx: expected n x n");
  if (R.rows() != m || R.cols() != m) throw DimensionError("spec.R: expected m x m");
  if (numerics::min_eig_sym(Qx) < -1e-10 * std::max(1.0, Qx.norm())) {
    throw NotPsdError("spec.Qx: must be positive semidefinite");
  }
  if (!numerics::cholesky(R)) throw NotPsdError("spec.R: must be positive definite");
}

SynthesisSpec spec_from_model(const SystemModel& sys, const LmiRegion& region, DesignMode mode) {
  SynthesisSpec spec;
  spec.region = region;
  spec.Qx = sys.Qx;
  spec.R = sys.R;
  spec.C1 = sys.C1;
  spec.D11 = sys.D11;
  spec.D12 = sys.D12;
  spec.B1 = sys.B1;
  spec.mode = mode;
  return spec;
}

namespace {

int triangle_index(int offset, Eigen::Index size, Eigen::Index r, Eigen::Index c) {
  if (r > c) std::swap(r, c);
  // Row-major upper triangle.
  const Eigen::Index before = r * size - r * (r - 1) / 2;
  return offset + static_cast<int>(before + (c - r));
}

AffineMatrix symmetric_variable(int offset, Eigen::Index size, int nv) {
  return AffineMatrix::variables(size, size, nv, [&](Eigen::Index r, Eigen::Index c) {
    return triangle_index(offset, size, r, c);
  });
}

AffineMatrix identity_times(double s, Eigen::Index size, int nv) {
  return AffineMatrix::constant(s * Matrix::Identity(size, size), nv);
}

// Ingredients shared by the data-driven and model-based programs. All
// quantities are affine in the decision vector:
//   x    : Lyapunov matrix (symmetric part is used)
//   ax_pole, ax_hinf : closed-loop product (A + B2 K) X
//   kx   : K X
struct ProgramParts {
  AffineMatrix x;
  AffineMatrix ax_pole;
  AffineMatrix ax_hinf;
  AffineMatrix kx;
  std::optional<AffineMatrix> s;
  std::optional<AffineMatrix> gamma_identity_d;  // gamma * I_d
  std::optional<AffineMatrix> gamma_identity_p;  // gamma * I_p1
  int gamma_index = -1;
  int nv = 0;
};

void add_pole_block(sdp::SdpProblem& p, const ProgramParts& parts, const LmiRegion& region,
                    double eps) {
  const AffineMatrix xs = 0.5 * (parts.x + parts.x.transpose());
  const AffineMatrix psi = region_substitute_product(region, parts.ax_pole, xs);
  p.blocks.push_back((-psi - identity_times(eps, psi.rows(), parts.nv)).to_block("pole_placement"));
}

void add_mixed_blocks(sdp::SdpProblem& p, const ProgramParts& parts, const SynthesisSpec& spec,
                      double eps) {
  const int nv = parts.nv;
  const auto d = spec.B1.cols();
  const auto p1 = spec.C1.rows();
  const AffineMatrix xs = 0.5 * (parts.x + parts.x.transpose());

  // Bounded-real block; the (1,3) entry is the transpose of the (3,1) entry.
  const AffineMatrix z = spec.C1 * xs + spec.D12 * parts.kx;
  AffineMatrix gd, gp;
  if (spec.mode == DesignMode::kMixedFixedGamma) {
    gd = identity_times(spec.gamma_bar, d, nv);
    gp = identity_times(spec.gamma_bar, p1, nv);
  } else {
    gd = *parts.gamma_identity_d;
    gp = *parts.gamma_identity_p;
  }
  const AffineMatrix hinf = AffineMatrix::blocks({
      {parts.ax_hinf + parts.ax_hinf.transpose(), AffineMatrix::constant(spec.B1, nv), z.transpose()},
      {AffineMatrix::constant(spec.B1.transpose(), nv), -gd, AffineMatrix::constant(spec.D11.transpose(), nv)},
      {z, AffineMatrix::constant(spec.D11, nv), -gp},
  });
  p.blocks.push_back((-hinf - identity_times(eps, hinf.rows(), nv)).to_block("hinf_bounded_real"));

  // H2 Schur block [[S, R^(1/2) K X], [., X]] >= 0.
  const Matrix r_half = numerics::sqrtm_psd(spec.R);
  const AffineMatrix rk = r_half * parts.kx;
  const AffineMatrix schur = AffineMatrix::blocks({{*parts.s, rk}, {rk.transpose(), xs}});
  p.blocks.push_back(schur.to_block("h2_schur"));

  // Objective trace(Qx X) + trace(S) [+ gamma].
  for (int k = 0; k < nv; ++k) {
    double v = (spec.Qx * xs.coeff(k)).trace() + parts.s->coeff(k).trace();
    if (k == parts.gamma_index) v += 1.0;
    p.objective(k) = v;
  }
}

void add_lyapunov_blocks(sdp::SdpProblem& p, const ProgramParts& parts, double eps, bool normalize) {
  const AffineMatrix xs = 0.5 * (parts.x + parts.x.transpose());
  p.blocks.push_back((xs - identity_times(eps, xs.rows(), parts.nv)).to_block("lyapunov_pd"));
  if (normalize) {
    // Feasible sets of pure D-stability programs are cones; X <= I picks a
    // bounded slice so the analytic center exists.
    p.blocks.push_back((identity_times(1.0, xs.rows(), parts.nv) - xs).to_block("normalization"));
  }
}

void add_symmetry_equalities(sdp::SdpProblem& p, const AffineMatrix& x) {
  const auto n = x.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      sdp::Equality eq;
      eq.a = Vector::Zero(p.num_vars);
      for (int k = 0; k < p.num_vars; ++k) {
        const Matrix c = x.coeff(k);
        eq.a(k) = c(i, j) - c(j, i);
      }
      eq.b = -(x.constant_part()(i, j) - x.constant_part()(j, i));
      p.equalities.push_back(std::move(eq));
    }
  }
}

struct ScaledData {
  Matrix U, X0, Xt, X1;
  Vector scale;
};

// Column balancing: Q = diag(scale) Q', so each sample column of [U; X0]
// enters with unit norm.
ScaledData balance_columns(const DataMatrices& dm) {
  ScaledData s;
  s.scale = Vector::Ones(dm.T);
  for (int k = 0; k < dm.T; ++k) {
    const double norm = std::sqrt(dm.U01T.col(k).squaredNorm() + dm.X0T.col(k).squaredNorm());
    if (norm > 0.0) s.scale(k) = 1.0 / norm;
  }
  s.U = dm.U01T * s.scale.asDiagonal();
  s.X0 = dm.X0T * s.scale.asDiagonal();
  s.Xt = dm.Xtilde1T * s.scale.asDiagonal();
  s.X1 = dm.X1T * s.scale.asDiagonal();
  return s;
}

double data_epsilon(const DataMatrices& dm, double base) {
  const double norm = std::sqrt(dm.U01T.squaredNorm() + dm.X0T.squaredNorm() + dm.Xtilde1T.squaredNorm());
  return base * (1.0 + norm);
}

double model_epsilon(const SystemModel& sys, double base) {
  return base * (1.0 + std::sqrt(sys.A.squaredNorm() + sys.B2.squaredNorm()));
}

void require_persistency(const DataMatrices& dm) {
  const auto rep = check_persistency(dm, dm.n(), dm.m());
  if (!rep.pass) {
    throw PersistencyError("persistency of excitation fails: rank " + std::to_string(rep.rank) +
                               " (need " + std::to_string(rep.required_rank) + "), T = " +
                               std::to_string(rep.actual_T) + " (need >= " +
                               std::to_string(rep.required_T) + ")",
                           rep);
  }
}

struct DataVariables {
  VariableLayout layout;
  ProgramParts parts;
  ScaledData scaled;
};

DataVariables data_variables(const DataMatrices& dm, bool mixed, bool fixed_gamma, bool literal,
                             Eigen::Index d, Eigen::Index p1) {
  DataVariables v;
  v.scaled = balance_columns(dm);
  auto& L = v.layout;
  L.T = dm.T;
  L.n = dm.n();
  L.m = dm.m();
  L.q_offset = 0;
  int next = static_cast<int>(L.T * L.n);
  if (mixed) {
    L.s_offset = next;
    next += static_cast<int>(L.m * (L.m + 1) / 2);
    if (!fixed_gamma) L.gamma_index = next++;
  }
  L.num_vars = next;

  const int nv = L.num_vars;
  const AffineMatrix q = AffineMatrix::variables(L.T, L.n, nv, [&](Eigen::Index r, Eigen::Index c) {
    return L.q_offset + static_cast<int>(r * L.n + c);
  });
  auto& parts = v.parts;
  parts.nv = nv;
  parts.x = v.scaled.X0 * q;
  parts.ax_hinf = v.scaled.Xt * q;
  parts.ax_pole = literal ? v.scaled.X1 * q : parts.ax_hinf;
  parts.kx = v.scaled.U * q;
  if (mixed) {
    parts.s = symmetric_variable(L.s_offset, L.m, nv);
    if (!fixed_gamma) {
      parts.gamma_index = L.gamma_index;
      auto diag = [&](Eigen::Index size) {
        return AffineMatrix::variables(size, size, nv, [&](Eigen::Index r, Eigen::Index c) {
          return r == c ? L.gamma_index : -1;
        });
      };
      parts.gamma_identity_d = diag(d);
      parts.gamma_identity_p = diag(p1);
    }
  }
  return v;
}

}  // namespace

AssembledProgram assemble_dstab_data(const DataMatrices& dm, const LmiRegion& region, double epsilon) {
  require_persistency(dm);
  if (!(epsilon > 0.0)) throw Error("assemble_dstab_data: epsilon must be positive");
  DataVariables v = data_variables(dm, false, false, false, 0, 0);
  AssembledProgram out;
  out.layout = v.layout;
  out.column_scale = v.scaled.scale;
  out.epsilon = data_epsilon(dm, epsilon);
  auto& p = out.problem;
  p.num_vars = v.layout.num_vars;
  p.objective = Vector::Zero(p.num_vars);
  add_pole_block(p, v.parts, region, out.epsilon);
  add_lyapunov_blocks(p, v.parts, out.epsilon, /*normalize=*/true);
  add_symmetry_equalities(p, v.parts.x);
  for (int i = 0; i < p.num_vars; ++i) p.var_names.push_back("q" + std::to_string(i));
  return out;
}

AssembledProgram assemble_mixed_data(const DataMatrices& dm, const SynthesisSpec& spec) {
  require_persistency(dm);
  if (spec.mode == DesignMode::kDstabOnly) throw Error("assemble_mixed_data: mode is dstab_only");
  spec.validate(dm.n(), dm.m());
  if (spec.B1.rows() != dm.B1.rows() || spec.B1.cols() != dm.B1.cols() ||
      (spec.B1 - dm.B1).cwiseAbs().maxCoeff() > 0.0) {
    throw DimensionError("assemble_mixed_data: spec.B1 differs from the B1 used to build Xtilde1T");
  }
  const bool fixed = spec.mode == DesignMode::kMixedFixedGamma;
  DataVariables v = data_variables(dm, true, fixed, spec.literal_paper_lmis, spec.B1.cols(), spec.C1.rows());
  AssembledProgram out;
  out.layout = v.layout;
  out.column_scale = v.scaled.scale;
  out.epsilon = data_epsilon(dm, spec.epsilon);
  auto& p = out.problem;
  p.num_vars = v.layout.num_vars;
  p.objective = Vector::Zero(p.num_vars);
  add_mixed_blocks(p, v.parts, spec, out.epsilon);
  if (spec.pole_constraint) add_pole_block(p, v.parts, spec.region, out.epsilon);
  add_lyapunov_blocks(p, v.parts, out.epsilon, /*normalize=*/false);
  add_symmetry_equalities(p, v.parts.x);
  for (int i = 0; i < p.num_vars; ++i) {
    if (i == v.layout.gamma_index) {
      p.var_names.push_back("gamma");
    } else if (v.layout.s_offset >= 0 && i >= v.layout.s_offset) {
      p.var_names.push_back("s" + std::to_string(i - v.layout.s_offset));
    } else {
      p.var_names.push_back("q" + std::to_string(i));
    }
  }
  return out;
}

namespace {

struct ModelVariables {
  VariableLayout layout;
  ProgramParts parts;
};

ModelVariables model_variables(const SystemModel& sys, bool mixed, bool fixed_gamma,
                               Eigen::Index d, Eigen::Index p1) {
  ModelVariables v;
  auto& L = v.layout;
  L.n = sys.n();
  L.m = sys.m();
  L.y_offset = 0;
  int next = static_cast<int>(L.m * L.n);
  L.x_offset = next;
  next += static_cast<int>(L.n * (L.n + 1) / 2);
  if (mixed) {
    L.s_offset = next;
    next += static_cast<int>(L.m * (L.m + 1) / 2);
    if (!fixed_gamma) L.gamma_index = next++;
  }
  L.num_vars = next;
  const int nv = next;
  auto& parts = v.parts;
  parts.nv = nv;
  const AffineMatrix y = AffineMatrix::variables(L.m, L.n, nv, [&](Eigen::Index r, Eigen::Index c) {
    return L.y_offset + static_cast<int>(r * L.n + c);
  });
  parts.x = symmetric_variable(L.x_offset, L.n, nv);
  parts.kx = y;
  parts.ax_hinf = sys.A * parts.x + sys.B2 * y;
  parts.ax_pole = parts.ax_hinf;
  if (mixed) {
    parts.s = symmetric_variable(L.s_offset, L.m, nv);
    if (!fixed_gamma) {
      parts.gamma_index = L.gamma_index;
      auto diag = [&](Eigen::Index size) {
        return AffineMatrix::variables(size, size, nv, [&](Eigen::Index r, Eigen::Index c) {
          return r == c ? L.gamma_index : -1;
        });
      };
      parts.gamma_identity_d = diag(d);
      parts.gamma_identity_p = diag(p1);
    }
  }
  return v;
}

void name_model_vars(sdp::SdpProblem& p, const VariableLayout& L) {
  for (int i = 0; i < p.num_vars; ++i) {
    if (i == L.gamma_index) {
      p.var_names.push_back("gamma");
    } else if (L.s_offset >= 0 && i >= L.s_offset) {
      p.var_names.push_back("s" + std::to_string(i - L.s_offset));
    } else if (i >= L.x_offset) {
      p.var_names.push_back("x" + std::to_string(i - L.x_offset));
    } else {
      p.var_names.push_back("y" + std::to_string(i));
    }
  }
}

}  // namespace

AssembledProgram assemble_mixed_model(const SystemModel& sys, const SynthesisSpec& spec) {
  sys.validate();
  if (spec.mode == DesignMode::kDstabOnly) throw Error("assemble_mixed_model: mode is dstab_only");
  spec.validate(sys.n(), sys.m());
  const bool fixed = spec.mode == DesignMode::kMixedFixedGamma;
  ModelVariables v = model_variables(sys, true, fixed, spec.B1.cols(), spec.C1.rows());
  AssembledProgram out;
  out.layout = v.layout;
  out.epsilon = model_epsilon(sys, spec.epsilon);
  auto& p = out.problem;
  p.num_vars = v.layout.num_vars;
  p.objective = Vector::Zero(p.num_vars);
  add_mixed_blocks(p, v.parts, spec, out.epsilon);
  if (spec.pole_constraint) add_pole_block(p, v.parts, spec.region, out.epsilon);
  add_lyapunov_blocks(p, v.parts, out.epsilon, /*normalize=*/false);
  name_model_vars(p, v.layout);
  return out;
}

AssembledProgram assemble_dstab_model(const SystemModel& sys, const LmiRegion& region, double epsilon) {
  if (sys.A.rows() == 0 || sys.A.rows() != sys.A.cols() || sys.B2.rows() != sys.A.rows()) {
    throw DimensionError("assemble_dstab_model: inconsistent A / B2");
  }
  if (!(epsilon > 0.0)) throw Error("assemble_dstab_model: epsilon must be positive");
  ModelVariables v = model_variables(sys, false, false, 0, 0);
  AssembledProgram out;
  out.layout = v.layout;
  out.epsilon = model_epsilon(sys, epsilon);
  auto& p = out.problem;
  p.num_vars = v.layout.num_vars;
  p.objective = Vector::Zero(p.num_vars);
  add_pole_block(p, v.parts, region, out.epsilon);
  add_lyapunov_blocks(p, v.parts, out.epsilon, /*normalize=*/true);
  name_model_vars(p, v.layout);
  return out;
}

GainRecovery recover_gain_data(const Matrix& q, const DataMatrices& dm) {
  if (q.rows() != dm.T || q.cols() != dm.n()) {
    throw DimensionError("recover_gain_data: Q must be T x n");
  }
  const Matrix x0q = dm.X0T * q;
  const Vector sv = numerics::singular_values(x0q);
  if (sv.size() == 0 || !(sv(sv.size() - 1) > 1e-8 * sv(0))) {
    throw RecoveryError("recover_gain_data: X0T Q is near singular (condition " +
                        std::to_string(sv.size() ? sv(0) / sv(sv.size() - 1) : 0.0) + ")");
  }
  GainRecovery out;
  out.X = numerics::symmetrize(x0q);
  const Matrix uq = dm.U01T * q;
  // K = U Q X^{-1}  <=>  X^T K^T = (U Q)^T
  out.K = numerics::solve_linear(out.X.transpose(), uq.transpose()).transpose();
  return out;
}

namespace {

Matrix symmetric_from(const Vector& y, int offset, Eigen::Index size) {
  Matrix out(size, size);
  for (Eigen::Index r = 0; r < size; ++r) {
    for (Eigen::Index c = 0; c < size; ++c) out(r, c) = y(triangle_index(offset, size, r, c));
  }
  return out;
}

SolverDiagnostics diagnostics_from(const AssembledProgram& prog, const sdp::SdpSolution& sol) {
  SolverDiagnostics diag;
  diag.status = sdp::to_string(sol.status);
  diag.message = sol.message;
  diag.iterations = sol.iterations;
  diag.phase1_iterations = sol.phase1_iterations;
  diag.duality_measure = sol.duality_measure;
  diag.epsilon = prog.epsilon;
  diag.block_min_eig = sol.block_min_eig;
  for (const auto& b : prog.problem.blocks) diag.block_names.push_back(b.name);
  const auto res = sdp::check_solution(prog.problem, sol.y, 1e-6);
  for (double r : res.equality_residuals) diag.max_equality_residual = std::max(diag.max_equality_residual, r);
  return diag;
}

}  // namespace

ControllerResult design(const SynthesisSpec& spec, const DesignSource& source,
                        const sdp::SolveOptions& opts) {
  ControllerResult result;
  result.provenance.mode = spec.mode;
  const bool mixed = spec.mode != DesignMode::kDstabOnly;

  if (const auto* dm = std::get_if<DataMatrices>(&source)) {
    require_persistency(*dm);
    result.provenance.route = "data";
    result.provenance.data_digest = data_digest(*dm);
    const AssembledProgram prog = mixed ? assemble_mixed_data(*dm, spec)
                                        : assemble_dstab_data(*dm, spec.region, spec.epsilon);
    const sdp::SdpSolution sol = sdp::solve(prog.problem, opts);
    result.diagnostics = diagnostics_from(prog, sol);
    if (sol.status != sdp::Status::kOptimal) {
      throw SynthesisError("synthesis failed: " + sdp::to_string(sol.status) + " (" + sol.message + ")",
                           sol.status);
    }
    const auto& L = prog.layout;
    Matrix q_scaled(L.T, L.n);
    for (Eigen::Index r = 0; r < L.T; ++r) {
      for (Eigen::Index c = 0; c < L.n; ++c) q_scaled(r, c) = sol.y(L.q_offset + static_cast<int>(r * L.n + c));
    }
    const Matrix q = prog.column_scale.asDiagonal() * q_scaled;
    const GainRecovery rec = recover_gain_data(q, *dm);
    result.K = rec.K;
    result.X = rec.X;
    result.Q = q;
    if (mixed) result.S = symmetric_from(sol.y, L.s_offset, L.m);
    if (L.gamma_index >= 0) result.gamma = sol.y(L.gamma_index);
    result.objective = sol.objective_value;
    std::optional<double> claimed = result.gamma;
    if (spec.mode == DesignMode::kMixedFixedGamma) claimed = spec.gamma_bar;
    SynthesisSpec verify_spec = spec;
    if (!mixed) {
      verify_spec.B1 = dm->B1;
    }
    result.report =
        analysis::verify_closed_loop(analysis::closed_loop_from_data(*dm, q, rec.K, verify_spec),
                                     spec.region, claimed);
    return result;
  }

  const auto& sys = std::get<SystemModel>(source);
  result.provenance.route = "model";
  const AssembledProgram prog = mixed ? assemble_mixed_model(sys, spec)
                                      : assemble_dstab_model(sys, spec.region, spec.epsilon);
  const sdp::SdpSolution sol = sdp::solve(prog.problem, opts);
  result.diagnostics = diagnostics_from(prog, sol);
  if (sol.status != sdp::Status::kOptimal) {
    throw SynthesisError("synthesis failed: " + sdp::to_string(sol.status) + " (" + sol.message + ")",
                         sol.status);
  }
  const auto& L = prog.layout;
  Matrix y(L.m, L.n);
  for (Eigen::Index r = 0; r < L.m; ++r) {
    for (Eigen::Index c = 0; c < L.n; ++c) y(r, c) = sol.y(L.y_offset + static_cast<int>(r * L.n + c));
  }
  result.X = symmetric_from(sol.y, L.x_offset, L.n);
  result.K = numerics::solve_linear(result.X.transpose(), y.transpose()).transpose();
  if (mixed) result.S = symmetric_from(sol.y, L.s_offset, L.m);
  if (L.gamma_index >= 0) result.gamma = sol.y(L.gamma_index);
  result.objective = sol.objective_value;
  result.report = analysis::verify_design(sys, result, spec);
  return result;
}

CertificateCheck check_model_certificate(const SystemModel& sys, const SynthesisSpec& spec,
                                         const Matrix& k, const Matrix& x, double gamma) {
  CertificateCheck out;
  const Matrix acl = sys.A + sys.B2 * k;
  const Matrix xs = numerics::symmetrize(x);
  out.x_min_eig = numerics::min_eig_sym(xs);
  out.pole_block_max_eig = numerics::max_eig_sym(region_substitute(spec.region, acl, xs));
  const auto n = sys.n();
  const auto d = spec.B1.cols();
  const auto p1 = spec.C1.rows();
  const Matrix z = (spec.C1 + spec.D12 * k) * xs;
  Matrix kyp(n + d + p1, n + d + p1);
  kyp << acl * xs + xs * acl.transpose(), spec.B1, z.transpose(),
      spec.B1.transpose(), -gamma * Matrix::Identity(d, d), spec.D11.transpose(),
      z, spec.D11, -gamma * Matrix::Identity(p1, p1);
  out.kyp_block_max_eig = numerics::max_eig_sym(kyp);
  return out;
}

}  // namespace lmipole
