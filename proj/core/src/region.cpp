#include "lmipole/region.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "lmipole/errors.hpp"

namespace lmipole {

LmiRegion LmiRegion::conic_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error("region.alpha: must be positive");
  LmiRegion r;
  r.kind_ = Kind::kConicAlpha;
  r.alpha_ = alpha;
  r.alpha_mat_ = Matrix::Zero(2, 2);
  r.beta_mat_.resize(2, 2);
  r.beta_mat_ << 1.0, -alpha, alpha, 1.0;
  return r;
}

LmiRegion LmiRegion::conic_theta(double theta) {
  if (!(theta > 0.0 && theta < std::numbers::pi / 2)) {
    throw Error("region.theta: must lie in (0, pi/2)");
  }
  LmiRegion r;
  r.kind_ = Kind::kConicTheta;
  r.theta_ = theta;
  r.alpha_ = 1.0 / std::tan(theta);
  r.alpha_mat_ = Matrix::Zero(2, 2);
  r.beta_mat_.resize(2, 2);
  r.beta_mat_ << std::sin(theta), std::cos(theta), -std::cos(theta), std::sin(theta);
  return r;
}

LmiRegion LmiRegion::general(Matrix alpha_mat, Matrix beta_mat) {
  const auto k = alpha_mat.rows();
  if (k == 0 || alpha_mat.cols() != k || beta_mat.rows() != k || beta_mat.cols() != k) {
    throw DimensionError("region: alpha_mat and beta_mat must be k x k with k >= 1");
  }
  if (!alpha_mat.allFinite() || !beta_mat.allFinite()) throw Error("region: non-finite entries");
  if ((alpha_mat - alpha_mat.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * std::max(1.0, alpha_mat.cwiseAbs().maxCoeff())) {
    throw Error("region.alpha_mat: must be symmetric");
  }
  LmiRegion r;
  r.kind_ = Kind::kGeneral;
  r.alpha_mat_ = numerics::symmetrize(alpha_mat);
  r.beta_mat_ = std::move(beta_mat);
  return r;
}

void LmiRegion::characteristic(Complex z, Matrix& re, Matrix& im) const {
  re = alpha_mat_ + z.real() * (beta_mat_ + beta_mat_.transpose());
  im = z.imag() * (beta_mat_ - beta_mat_.transpose());
}

bool LmiRegion::is_nonempty() const {
  Matrix re, im;
  for (int e = -6; e <= 6; ++e) {
    for (int steps = 1; steps <= 9; ++steps) {
      const double mag = steps * std::pow(10.0, e);
      for (double x : {-mag, mag}) {
        characteristic(Complex(x, 0.0), re, im);
        if (numerics::max_eig_sym(re) < 0.0) return true;
      }
    }
  }
  characteristic(Complex(0.0, 0.0), re, im);
  return numerics::max_eig_sym(re) < 0.0;
}

std::string LmiRegion::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::kConicAlpha: os << "conic_alpha(alpha=" << alpha_ << ")"; break;
    case Kind::kConicTheta: os << "conic_theta(theta=" << theta_ << ")"; break;
    case Kind::kGeneral: os << "general(k=" << order() << ")"; break;
  }
  return os.str();
}

Matrix assemble_grid(const std::vector<std::vector<Matrix>>& cells) {
  if (cells.empty() || cells.front().empty()) return Matrix(0, 0);
  Eigen::Index rows = 0, cols = 0;
  for (const auto& row : cells) rows += row.front().rows();
  for (const auto& cell : cells.front()) cols += cell.cols();
  Matrix out(rows, cols);
  Eigen::Index r0 = 0;
  for (const auto& row : cells) {
    Eigen::Index c0 = 0;
    for (const auto& cell : row) {
      if (cell.rows() != row.front().rows()) throw DimensionError("assemble_grid: ragged row");
      out.block(r0, c0, cell.rows(), cell.cols()) = cell;
      c0 += cell.cols();
    }
    if (c0 != cols) throw DimensionError("assemble_grid: ragged grid");
    r0 += row.front().rows();
  }
  return out;
}

Matrix region_substitute(const LmiRegion& region, const Matrix& m, const Matrix& x) {
  if (m.rows() != m.cols() || x.rows() != x.cols() || m.cols() != x.rows()) {
    throw DimensionError("region_substitute: M and X must be n x n");
  }
  const Matrix mx = m * x;
  return region_substitute_product<Matrix>(region, mx, x);
}

}  // namespace lmipole
