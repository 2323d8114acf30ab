#include "lmipole/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lmipole/errors.hpp"
#include "lmipole/synthesis.hpp"

namespace lmipole::analysis {

std::vector<Complex> closed_loop_eigs(const SystemModel& sys, const Matrix& k) {
  if (k.rows() != sys.m() || k.cols() != sys.n()) {
    throw DimensionError("closed_loop_eigs: K must be m x n");
  }
  return numerics::eig_general(sys.A + sys.B2 * k);
}

Membership region_membership(Complex lambda, const LmiRegion& region) {
  Matrix re, im;
  region.characteristic(lambda, re, im);
  const auto spectrum = numerics::eig_hermitian_complex(re, im);
  Membership out;
  out.margin = spectrum.back();
  out.boundary = std::abs(out.margin) <= kBoundaryBand;
  out.member = out.margin < 0.0;
  return out;
}

bool conic_fast_member(Complex lambda, double alpha) {
  return lambda.real() < 0.0 && alpha * std::abs(lambda.imag()) < std::abs(lambda.real());
}

double h2_norm(const Matrix& a, const Matrix& b, const Matrix& c) {
  if (a.rows() != a.cols() || b.rows() != a.rows() || c.cols() != a.rows()) {
    throw DimensionError("h2_norm: inconsistent dimensions");
  }
  const Matrix wc = numerics::lyapunov_solve(a, b * b.transpose());
  const double value = (c * wc * c.transpose()).trace();
  return std::sqrt(std::max(0.0, value));
}

namespace {

double sigma_max(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

double gain_at(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d, double omega) {
  const auto n = a.rows();
  const Eigen::MatrixXcd s_minus_a =
      Complex(0.0, omega) * Eigen::MatrixXcd::Identity(n, n) - a.cast<Complex>();
  const Eigen::MatrixXcd g = c.cast<Complex>() * s_minus_a.partialPivLu().solve(b.cast<Complex>()) +
                             d.cast<Complex>();
  return sigma_max(g);
}

// True when gamma exceeds the peak gain: the Hamiltonian has no eigenvalue on
// the imaginary axis.
bool above_peak(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d, double gamma) {
  const auto n = a.rows();
  const auto nin = b.cols();
  const auto nout = c.rows();
  const double g2 = gamma * gamma;
  const Matrix r = d.transpose() * d - g2 * Matrix::Identity(nin, nin);
  const Matrix s = d * d.transpose() - g2 * Matrix::Identity(nout, nout);
  const Matrix r_inv = r.partialPivLu().inverse();
  const Matrix s_inv = s.partialPivLu().inverse();
  Matrix h(2 * n, 2 * n);
  h << a - b * r_inv * d.transpose() * c, -gamma * b * r_inv * b.transpose(),
      gamma * c.transpose() * s_inv * c, -a.transpose() + c.transpose() * d * r_inv * b.transpose();
  for (const auto& lambda : numerics::eig_general(h)) {
    if (std::abs(lambda.real()) < kImaginaryAxisTol) return false;
  }
  return true;
}

}  // namespace

double hinf_norm(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d, double tol) {
  if (a.rows() != a.cols() || b.rows() != a.rows() || c.cols() != a.rows() ||
      d.rows() != c.rows() || d.cols() != b.cols()) {
    throw DimensionError("hinf_norm: inconsistent dimensions");
  }
  if (!(tol > 0.0)) throw Error("hinf_norm: tol must be positive");
  if (!numerics::is_hurwitz(a)) throw NotHurwitzError("hinf_norm: A is not Hurwitz");
  const double sigma_d = d.size() ? numerics::singular_values(d)(0) : 0.0;
  if (c.cwiseAbs().maxCoeff() == 0.0 || b.cwiseAbs().maxCoeff() == 0.0 || a.rows() == 0) {
    return sigma_d;
  }

  // Lower bound from the gain at DC and at the natural frequencies.
  double lo = std::max(sigma_d, gain_at(a, b, c, d, 0.0));
  for (const auto& lambda : numerics::eig_general(a)) {
    lo = std::max(lo, gain_at(a, b, c, d, std::abs(lambda.imag())));
    lo = std::max(lo, gain_at(a, b, c, d, std::abs(lambda)));
  }
  const double floor = sigma_d * (1.0 + 1e-9);
  auto passes = [&](double gamma) { return gamma > floor && above_peak(a, b, c, d, gamma); };

  double hi = std::max(2.0 * lo, 1e-12);
  for (int i = 0; !passes(hi); ++i) {
    lo = hi;
    hi *= 2.0;
    if (i > 200) throw ConvergenceError("hinf_norm: no upper bound found");
  }
  while (hi - lo > tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (passes(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return std::max(sigma_d, 0.5 * (lo + hi));
}

ClosedLoop closed_loop_from_model(const SystemModel& sys, const Matrix& k) {
  if (k.rows() != sys.m() || k.cols() != sys.n()) {
    throw DimensionError("closed_loop_from_model: K must be m x n");
  }
  ClosedLoop cl;
  cl.A = sys.A + sys.B2 * k;
  cl.B1 = sys.B1;
  cl.C1 = sys.C1 + sys.D12 * k;
  cl.D11 = sys.D11;
  cl.C2 = sys.C2() + sys.D22() * k;
  cl.source = "model";
  return cl;
}

ClosedLoop closed_loop_from_data(const DataMatrices& dm, const Matrix& q, const Matrix& k,
                                 const SynthesisSpec& spec) {
  const Matrix x0q = dm.X0T * q;
  // G = Q (X0T Q)^{-1}  =>  X0T G = I and U01T G = K.
  const Matrix g = numerics::solve_linear(x0q.transpose(), q.transpose()).transpose();
  ClosedLoop cl;
  cl.A = dm.Xtilde1T * g;
  cl.B1 = spec.B1.size() ? spec.B1 : dm.B1;
  const auto n = dm.n();
  const auto m = dm.m();
  if (spec.C1.size() != 0 && spec.D12.size() != 0) {
    cl.C1 = spec.C1 + spec.D12 * k;
    cl.D11 = spec.D11;
  }
  if (spec.Qx.size() != 0 && spec.R.size() != 0) {
    cl.C2 = Matrix::Zero(n + m, n);
    cl.C2.topRows(n) = numerics::sqrtm_psd(spec.Qx);
    cl.C2.bottomRows(m) = numerics::sqrtm_psd(spec.R) * k;
  }
  cl.source = "data";
  return cl;
}

VerificationReport verify_closed_loop(const ClosedLoop& cl, const LmiRegion& region,
                                      std::optional<double> gamma_claimed) {
  VerificationReport rep;
  rep.region = region.describe();
  rep.closed_loop_source = cl.source;
  rep.gamma_claimed = gamma_claimed;
  rep.stable = true;
  rep.all_members = true;
  for (const auto& lambda : numerics::eig_general(cl.A)) {
    PoleReport pr{lambda, region_membership(lambda, region)};
    if (!(lambda.real() < 0.0)) rep.stable = false;
    if (!pr.membership.member || pr.membership.boundary) rep.all_members = false;
    rep.poles.push_back(pr);
  }
  if (rep.stable) {
    if (cl.C2.size() != 0) rep.h2_norm = h2_norm(cl.A, cl.B1, cl.C2);
    if (cl.C1.size() != 0) {
      rep.hinf_norm = hinf_norm(cl.A, cl.B1, cl.C1, cl.D11, rep.hinf_tol);
      const double sigma_d = cl.D11.size() ? numerics::singular_values(cl.D11)(0) : 0.0;
      if (sigma_d > 0.0) {
        std::ostringstream os;
        os << "H-infinity bisection lower bound sigma_max(D11) = " << sigma_d;
        rep.notes.push_back(os.str());
      }
    }
  } else {
    rep.notes.push_back("closed loop is not Hurwitz; norms unavailable");
  }
  rep.hinf_allowance = std::max(1e-3, 10.0 * rep.hinf_tol);
  if (gamma_claimed) {
    rep.hinf_within_gamma = rep.hinf_norm && *rep.hinf_norm <= *gamma_claimed + rep.hinf_allowance;
  }
  return rep;
}

VerificationReport verify_design(const SystemModel& sys, const ControllerResult& result,
                                 const SynthesisSpec& spec) {
  std::optional<double> claimed = result.gamma;
  if (spec.mode == DesignMode::kMixedFixedGamma) claimed = spec.gamma_bar;
  return verify_closed_loop(closed_loop_from_model(sys, result.K), spec.region, claimed);
}

double compare_gains(const Matrix& k1, const Matrix& k2) {
  if (k1.rows() != k2.rows() || k1.cols() != k2.cols()) {
    throw DimensionError("compare_gains: shape mismatch");
  }
  return (k1 - k2).norm();
}

}  // namespace lmipole::analysis
