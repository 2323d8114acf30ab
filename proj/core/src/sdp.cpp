#include "lmipole/sdp.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <ostream>

#include "lmipole/errors.hpp"

namespace lmipole::sdp {

Matrix LmiBlock::evaluate(const Vector& y) const {
  Matrix out = constant;
  for (const auto& [index, coeff] : coeffs) out += y(index) * coeff;
  return out;
}

void SdpProblem::validate() const {
  if (num_vars < 0) throw DimensionError("sdp: negative variable count");
  if (objective.size() != num_vars) throw DimensionError("sdp: objective size != num_vars");
  for (const auto& block : blocks) {
    const auto d = block.constant.rows();
    if (block.constant.cols() != d) throw DimensionError("sdp block " + block.name + ": not square");
    auto check_sym = [&](const Matrix& m) {
      const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
      if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw DimensionError("sdp block " + block.name + ": coefficient not symmetric");
      }
    };
    check_sym(block.constant);
    for (const auto& [index, coeff] : block.coeffs) {
      if (index < 0 || index >= num_vars) {
        throw DimensionError("sdp block " + block.name + ": variable index out of range");
      }
      if (coeff.rows() != d || coeff.cols() != d) {
        throw DimensionError("sdp block " + block.name + ": coefficient size mismatch");
      }
      check_sym(coeff);
    }
  }
  for (const auto& eq : equalities) {
    if (eq.a.size() != num_vars) throw DimensionError("sdp: equality row has wrong length");
  }
}

int SdpProblem::total_block_dim() const {
  int total = 0;
  for (const auto& b : blocks) total += static_cast<int>(b.dim());
  return total;
}

std::string to_string(Status s) {
  switch (s) {
    case Status::kOptimal: return "optimal";
    case Status::kInfeasible: return "infeasible";
    case Status::kMaxIter: return "max_iter";
    case Status::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

ReducedProblem eliminate_equalities(const SdpProblem& p) {
  p.validate();
  ReducedProblem out;
  const int n = p.num_vars;
  if (p.equalities.empty()) {
    out.problem = p;
    out.back_map = {Vector::Zero(n), Matrix::Identity(n, n)};
    return out;
  }
  const auto rows = static_cast<Eigen::Index>(p.equalities.size());
  Matrix a(rows, n);
  Vector b(rows);
  for (Eigen::Index k = 0; k < rows; ++k) {
    a.row(k) = p.equalities[static_cast<size_t>(k)].a.transpose();
    b(k) = p.equalities[static_cast<size_t>(k)].b;
  }
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
  cod.setThreshold(1e-12);
  const Vector y0 = cod.solve(b);
  out.residual = (a * y0 - b).norm();
  out.consistent = out.residual <= 1e-9 * std::max(1.0, b.norm());
  const Matrix basis = numerics::null_space(a, 1e-12);
  out.back_map = {y0, basis};

  SdpProblem& r = out.problem;
  r.num_vars = static_cast<int>(basis.cols());
  r.objective = basis.transpose() * p.objective;
  r.var_names.clear();
  for (int i = 0; i < r.num_vars; ++i) r.var_names.push_back("z" + std::to_string(i));
  for (const auto& block : p.blocks) {
    LmiBlock rb;
    rb.name = block.name;
    rb.constant = block.evaluate(y0);
    for (int j = 0; j < r.num_vars; ++j) {
      Matrix coeff = Matrix::Zero(block.dim(), block.dim());
      bool any = false;
      for (const auto& [index, f] : block.coeffs) {
        const double w = basis(index, j);
        if (w != 0.0) {
          coeff += w * f;
          any = true;
        }
      }
      if (any) rb.coeffs.emplace_back(j, numerics::symmetrize(coeff));
    }
    r.blocks.push_back(std::move(rb));
  }
  return out;
}

namespace {

// Dense working form in reduced coordinates: blocks F_j(w) = F0_j + sum_k w_k G_jk.
struct DenseProblem {
  std::vector<Matrix> constant;
  std::vector<std::vector<Matrix>> coeff;
  Vector c;
  /// When positive, adds the barrier -log(R^2 - |w_{0..ball_vars}|^2).
  double ball_radius = 0.0;
  int ball_vars = 0;
  int vars() const { return static_cast<int>(c.size()); }
  int total_dim() const {
    int t = 0;
    for (const auto& m : constant) t += static_cast<int>(m.rows());
    return t;
  }
  Matrix evaluate(size_t j, const Vector& w) const {
    Matrix out = constant[j];
    for (int k = 0; k < vars(); ++k) {
      if (w(k) != 0.0) out += w(k) * coeff[j][static_cast<size_t>(k)];
    }
    return out;
  }
};

struct BarrierEval {
  bool feasible = false;
  double logdet = 0.0;
};

// Sum of log det over blocks; infeasible when any block fails Cholesky.
BarrierEval barrier_logdet(const DenseProblem& dp, const Vector& w) {
  BarrierEval ev;
  if (dp.ball_radius > 0.0) {
    const double slack = dp.ball_radius * dp.ball_radius - w.head(dp.ball_vars).squaredNorm();
    if (!(slack > 0.0)) return ev;
    ev.logdet += std::log(slack);
  }
  for (size_t j = 0; j < dp.constant.size(); ++j) {
    Eigen::LLT<Matrix> llt(dp.evaluate(j, w));
    if (llt.info() != Eigen::Success) return ev;
    const Vector diag = Matrix(llt.matrixL()).diagonal();
    if ((diag.array() <= 0.0).any() || !diag.allFinite()) return ev;
    ev.logdet += 2.0 * diag.array().log().sum();
  }
  ev.feasible = true;
  return ev;
}

constexpr double kPhase1StartRadius = 10.0;

enum class CenterResult { kCentered, kStopped, kIterLimit, kStalled };

struct Centering {
  const SolveOptions& opts;
  int& iterations;
  int max_total;
  const char* phase;
};

// Damped Newton on tau c^T w - sum log det F_j(w). `stop` is checked after
// each accepted step (used by Phase I to exit once feasibility is reached).
template <typename Stop>
CenterResult center(const DenseProblem& dp, Vector& w, double tau, Centering& ctx, Stop&& stop) {
  const int nv = dp.vars();
  constexpr double kCenterTol = 1e-10;
  constexpr int kMaxCenteringSteps = 60;
  for (int local = 0;; ++local) {
    if (ctx.iterations >= ctx.max_total) return CenterResult::kIterLimit;
    if (local >= kMaxCenteringSteps) return CenterResult::kStalled;
    Vector grad = tau * dp.c;
    Matrix hess = Matrix::Zero(nv, nv);
    std::vector<Matrix> scaled(static_cast<size_t>(nv));
    for (size_t j = 0; j < dp.constant.size(); ++j) {
      Eigen::LLT<Matrix> llt(dp.evaluate(j, w));
      if (llt.info() != Eigen::Success) return CenterResult::kStalled;
      const auto lower = llt.matrixL();
      for (int k = 0; k < nv; ++k) {
        // L^{-1} G L^{-T}
        Matrix tmp = lower.solve(dp.coeff[j][static_cast<size_t>(k)]);
        scaled[static_cast<size_t>(k)] = lower.solve(tmp.transpose()).transpose();
        grad(k) -= scaled[static_cast<size_t>(k)].trace();
      }
      for (int k = 0; k < nv; ++k) {
        for (int l = 0; l <= k; ++l) {
          const double v = scaled[static_cast<size_t>(k)].cwiseProduct(scaled[static_cast<size_t>(l)]).sum();
          hess(k, l) += v;
          if (l != k) hess(l, k) += v;
        }
      }
    }
    if (dp.ball_radius > 0.0) {
      const auto head = w.head(dp.ball_vars);
      const double slack = dp.ball_radius * dp.ball_radius - head.squaredNorm();
      if (!(slack > 0.0)) return CenterResult::kStalled;
      grad.head(dp.ball_vars) += (2.0 / slack) * head;
      hess.topLeftCorner(dp.ball_vars, dp.ball_vars) +=
          (2.0 / slack) * Matrix::Identity(dp.ball_vars, dp.ball_vars) + (4.0 / (slack * slack)) * head * head.transpose();
    }
    Eigen::LLT<Matrix> hllt(hess);
    Vector step;
    if (hllt.info() == Eigen::Success) {
      step = hllt.solve(-grad);
    } else {
      const double reg = 1e-12 * std::max(1.0, hess.trace());
      step = (hess + reg * Matrix::Identity(nv, nv)).ldlt().solve(-grad);
    }
    const double decrement = -grad.dot(step);
    if (!std::isfinite(decrement)) return CenterResult::kStalled;
    if (decrement * 0.5 <= kCenterTol) return CenterResult::kCentered;

    const BarrierEval current = barrier_logdet(dp, w);
    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 80; ++ls, t *= 0.5) {
      const Vector trial = w + t * step;
      const BarrierEval ev = barrier_logdet(dp, trial);
      if (!ev.feasible) continue;
      const double change = tau * dp.c.dot(t * step) - (ev.logdet - current.logdet);
      if (change <= -0.25 * t * decrement) {
        w = trial;
        accepted = true;
        break;
      }
    }
    ++ctx.iterations;
    if (ctx.opts.verbose) {
      std::fprintf(stderr, "[sdp %s] iter %3d tau %.3e decrement %.3e step %.3e\n", ctx.phase,
                   ctx.iterations, tau, decrement, accepted ? t : 0.0);
    }
    if (!accepted) return decrement < 1e-6 ? CenterResult::kCentered : CenterResult::kStalled;
    if (!w.allFinite() || w.norm() > 1e14) return CenterResult::kStalled;
    if (stop(w)) return CenterResult::kStopped;
  }
}

void fill_block_eigs(const SdpProblem& p, SdpSolution& sol) {
  sol.block_min_eig.clear();
  for (const auto& block : p.blocks) sol.block_min_eig.push_back(numerics::min_eig_sym(block.evaluate(sol.y)));
}

}  // namespace

SdpSolution solve(const SdpProblem& p, const SolveOptions& opts) {
  p.validate();
  SdpSolution sol;
  sol.y = Vector::Zero(p.num_vars);

  const ReducedProblem reduced = eliminate_equalities(p);
  if (!reduced.consistent) {
    sol.status = Status::kInfeasible;
    sol.message = "equality constraints are inconsistent (residual " +
                  std::to_string(reduced.residual) + ")";
    sol.y = reduced.back_map.offset;
    fill_block_eigs(p, sol);
    return sol;
  }
  const SdpProblem& rp = reduced.problem;
  const int nz = rp.num_vars;

  // Restrict to directions that move at least one block; the rest only change
  // y along the null space of the block map.
  std::vector<Matrix> dense_z(rp.blocks.size());
  Eigen::Index entries = 0;
  for (const auto& b : rp.blocks) entries += b.dim() * (b.dim() + 1) / 2;
  Matrix range_map = Matrix::Zero(entries, nz);
  {
    Eigen::Index row = 0;
    for (const auto& b : rp.blocks) {
      for (const auto& [index, coeff] : b.coeffs) {
        Eigen::Index r = row;
        for (Eigen::Index i = 0; i < b.dim(); ++i) {
          for (Eigen::Index j = i; j < b.dim(); ++j, ++r) {
            range_map(r, index) = (i == j ? 1.0 : std::sqrt(2.0)) * coeff(i, j);
          }
        }
      }
      row += b.dim() * (b.dim() + 1) / 2;
    }
  }
  Matrix range_basis;
  if (nz == 0 || entries == 0) {
    range_basis = Matrix(nz, 0);
  } else {
    Eigen::JacobiSVD<Matrix> svd(range_map, Eigen::ComputeFullV);
    const Vector& sv = svd.singularValues();
    Eigen::Index rank = 0;
    const double cutoff = sv.size() > 0 ? 1e-11 * sv(0) : 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv(i) > cutoff) ++rank;
    }
    range_basis = svd.matrixV().leftCols(rank);
  }
  {
    const Vector c_perp = rp.objective - range_basis * (range_basis.transpose() * rp.objective);
    if (c_perp.norm() > 1e-10 * std::max(1.0, rp.objective.norm())) {
      sol.status = Status::kNumericalFailure;
      sol.message = "objective is unbounded along directions that leave every block unchanged";
      sol.y = reduced.back_map.offset;
      fill_block_eigs(p, sol);
      return sol;
    }
  }

  DenseProblem dp;
  const int nw = static_cast<int>(range_basis.cols());
  dp.c = range_basis.transpose() * rp.objective;
  for (const auto& b : rp.blocks) {
    dp.constant.push_back(b.constant);
    std::vector<Matrix> coeffs(static_cast<size_t>(nw), Matrix::Zero(b.dim(), b.dim()));
    for (const auto& [index, coeff] : b.coeffs) {
      for (int k = 0; k < nw; ++k) {
        const double weight = range_basis(index, k);
        if (weight != 0.0) coeffs[static_cast<size_t>(k)] += weight * coeff;
      }
    }
    dp.coeff.push_back(std::move(coeffs));
  }
  const int total_dim = dp.total_dim();

  auto finish = [&](const Vector& w, Status status, std::string message) {
    sol.status = status;
    sol.message = std::move(message);
    sol.y = reduced.back_map.apply(range_basis * w);
    sol.objective_value = p.objective.dot(sol.y);
    fill_block_eigs(p, sol);
    return sol;
  };

  Vector w = Vector::Zero(nw);
  if (dp.constant.empty()) return finish(w, Status::kOptimal, "no matrix blocks");

  // Phase I: maximize s subject to F_j(w) - s I >= 0.
  double start_margin = std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < dp.constant.size(); ++j) {
    start_margin = std::min(start_margin, numerics::min_eig_sym(dp.constant[j]));
  }
  sol.phase1_margin = start_margin;
  int iterations = 0;
  if (!(start_margin > 0.0)) {
    if (nw == 0) {
      sol.iterations = 0;
      return finish(w, Status::kInfeasible, "no free variables and the constant blocks are not PD");
    }
    DenseProblem aug;
    aug.c = Vector::Zero(nw + 1);
    aug.c(nw) = -1.0;
    aug.constant = dp.constant;
    aug.ball_vars = nw;
    for (size_t j = 0; j < dp.constant.size(); ++j) {
      auto coeffs = dp.coeff[j];
      coeffs.push_back(-Matrix::Identity(dp.constant[j].rows(), dp.constant[j].cols()));
      aug.coeff.push_back(std::move(coeffs));
    }
    Centering ctx{opts, iterations, opts.max_iter, "phase1"};
    auto reached = [&](const Vector& v) { return v(nw) > 0.0; };
    auto stop = [&](const Vector& ws, Status status, const std::string& message) {
      sol.phase1_margin = ws(nw);
      sol.phase1_iterations = iterations;
      sol.iterations = iterations;
      return finish(ws.head(nw), status, message);
    };
    // Search a small ball first and widen it only while the ball itself is
    // what blocks feasibility; this keeps the first feasible point moderate
    // when the feasible set is unbounded.
    bool feasible = false;
    Vector ws = Vector::Zero(nw + 1);
    for (double radius = std::min(kPhase1StartRadius, opts.phase1_radius); !feasible;
         radius = std::min(radius * 100.0, opts.phase1_radius)) {
      aug.ball_radius = radius;
      ws.setZero();
      ws(nw) = start_margin - 1.0;
      for (double tau = 1.0;; tau *= 10.0) {
        const CenterResult res = center(aug, ws, tau, ctx, reached);
        sol.phase1_margin = ws(nw);
        if (res == CenterResult::kStopped || ws(nw) > 0.0) {
          feasible = true;
          break;
        }
        if (res == CenterResult::kIterLimit) return stop(ws, Status::kMaxIter, "iteration limit reached in Phase I");
        if (res == CenterResult::kStalled) {
          return stop(ws, Status::kNumericalFailure, "Phase I Newton iteration stalled");
        }
        const double gap = static_cast<double>(total_dim + 1) / tau;
        if (ws(nw) + gap < 0.0 || gap < 1e-12 * std::max(1.0, std::abs(ws(nw)))) {
          const bool ball_active = ws.head(nw).norm() > 0.5 * radius;
          if (ball_active && radius < opts.phase1_radius) break;
          char buf[160];
          std::snprintf(buf, sizeof(buf),
                        "no strictly feasible point within radius %.1e: Phase I bound t* <= %.3e", radius,
                        ws(nw) + gap);
          return stop(ws, Status::kInfeasible, buf);
        }
      }
    }
    w = ws.head(nw);
  }
  sol.phase1_iterations = iterations;

  // Phase II.
  Centering ctx{opts, iterations, opts.max_iter, "phase2"};
  auto never = [](const Vector&) { return false; };
  if (dp.c.norm() == 0.0) {
    // Feasibility only: the feasible set may be an unbounded cone, so center
    // on its intersection with a ball around the origin that contains the
    // Phase I point.
    DenseProblem bounded = dp;
    bounded.ball_radius = 2.0 * std::max(1.0, w.norm());
    bounded.ball_vars = nw;
    Vector trial = w;
    int budget = 0;
    Centering limited{opts, budget, 100, "center"};
    const CenterResult res = center(bounded, trial, 1.0, limited, never);
    if (res == CenterResult::kCentered && barrier_logdet(dp, trial).feasible) w = trial;
    iterations += budget;
    sol.iterations = iterations;
    sol.final_mu = 0.0;
    sol.duality_measure = 0.0;
    return finish(w, Status::kOptimal, "feasible point (zero objective)");
  }

  // A large ball keeps every centering problem bounded even when the
  // feasible set has a recession direction the objective ignores.
  DenseProblem bounded = dp;
  bounded.ball_radius = std::max(opts.phase1_radius, 2.0 * w.norm());
  bounded.ball_vars = nw;
  const double stop_mu = opts.obj_tol / static_cast<double>(total_dim);
  for (double mu = 1.0;; mu /= 10.0) {
    const CenterResult res = center(bounded, w, 1.0 / mu, ctx, never);
    sol.final_mu = mu;
    sol.duality_measure = mu * total_dim;
    sol.iterations = iterations;
    if (res == CenterResult::kIterLimit) {
      return finish(w, Status::kMaxIter, "iteration limit reached in Phase II");
    }
    if (res == CenterResult::kStalled) {
      // The last iterate is still strictly feasible; report how close it is.
      if (sol.duality_measure < 10.0 * opts.obj_tol) {
        return finish(w, Status::kOptimal, "converged (final centering stalled)");
      }
      return finish(w, Status::kNumericalFailure, "Phase II Newton iteration stalled");
    }
    sol.outer_objectives.push_back(dp.c.dot(w) + p.objective.dot(reduced.back_map.offset));
    if (opts.verbose) {
      std::fprintf(stderr, "[sdp] mu %.3e objective %.10g\n", mu, sol.outer_objectives.back());
    }
    if (mu < stop_mu) break;
  }
  return finish(w, Status::kOptimal, "converged");
}

ResidualReport check_solution(const SdpProblem& p, const Vector& y, double tol) {
  ResidualReport rep;
  if (y.size() != p.num_vars) throw DimensionError("check_solution: y has wrong size");
  for (const auto& block : p.blocks) {
    const double e = numerics::min_eig_sym(block.evaluate(y));
    rep.block_min_eig.push_back(e);
    if (e < -tol) rep.pass = false;
  }
  for (const auto& eq : p.equalities) {
    const double r = std::abs(eq.a.dot(y) - eq.b);
    rep.equality_residuals.push_back(r);
    if (r > tol) rep.pass = false;
  }
  rep.objective_value = p.objective.size() == y.size() ? p.objective.dot(y) : 0.0;
  return rep;
}

void write_sdpa(const SdpProblem& p, std::ostream& out) {
  p.validate();
  const bool has_lp = !p.equalities.empty();
  const auto nblocks = p.blocks.size() + (has_lp ? 1 : 0);
  out << "\"lmipole sdp: min c^T y s.t. sum_i y_i F_i - F_0 >= 0\"\n";
  out << p.num_vars << " = mDIM\n";
  out << nblocks << " = nBLOCK\n";
  for (const auto& b : p.blocks) out << b.dim() << ' ';
  if (has_lp) out << -static_cast<long>(2 * p.equalities.size());
  out << " = bLOCKsTRUCT\n";
  out << std::setprecision(17);
  for (int i = 0; i < p.num_vars; ++i) out << (i ? " " : "") << p.objective(i);
  out << '\n';
  auto emit = [&out](int mat, size_t blk, const Matrix& m, double sign) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = i; j < m.cols(); ++j) {
        if (m(i, j) != 0.0) {
          out << mat << ' ' << blk << ' ' << i + 1 << ' ' << j + 1 << ' ' << sign * m(i, j) << '\n';
        }
      }
    }
  };
  for (size_t bi = 0; bi < p.blocks.size(); ++bi) {
    const auto& b = p.blocks[bi];
    emit(0, bi + 1, b.constant, -1.0);
    for (const auto& [index, coeff] : b.coeffs) emit(index + 1, bi + 1, coeff, 1.0);
  }
  if (has_lp) {
    const size_t blk = p.blocks.size() + 1;
    for (size_t k = 0; k < p.equalities.size(); ++k) {
      const auto& eq = p.equalities[k];
      const auto pos = 2 * k + 1;
      const auto neg = 2 * k + 2;
      if (eq.b != 0.0) {
        out << 0 << ' ' << blk << ' ' << pos << ' ' << pos << ' ' << eq.b << '\n';
        out << 0 << ' ' << blk << ' ' << neg << ' ' << neg << ' ' << -eq.b << '\n';
      }
      for (int i = 0; i < p.num_vars; ++i) {
        if (eq.a(i) != 0.0) {
          out << i + 1 << ' ' << blk << ' ' << pos << ' ' << pos << ' ' << eq.a(i) << '\n';
          out << i + 1 << ' ' << blk << ' ' << neg << ' ' << neg << ' ' << -eq.a(i) << '\n';
        }
      }
    }
  }
}

}  // namespace lmipole::sdp
