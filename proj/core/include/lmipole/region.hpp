#pragma once

// LMI pole-placement regions {z : alpha + z beta + conj(z) beta^T < 0}.

#include <string>
#include <vector>

#include "lmipole/numerics.hpp"

namespace lmipole {

class LmiRegion {
 public:
  enum class Kind { kConicAlpha, kConicTheta, kGeneral };

  /// Sector |Im z| < |Re z| / alpha in the open left half-plane.
  static LmiRegion conic_alpha(double alpha);
  /// Same sector described by its half-angle theta in (0, pi/2) measured
  /// from the negative real axis: |Im z| < tan(theta) |Re z|.
  static LmiRegion conic_theta(double theta);
  /// k x k symmetric alpha_mat and arbitrary k x k beta_mat. Emptiness is
  /// not rejected here; see is_nonempty().
  static LmiRegion general(Matrix alpha_mat, Matrix beta_mat);

  Kind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double theta() const { return theta_; }
  const Matrix& alpha_mat() const { return alpha_mat_; }
  const Matrix& beta_mat() const { return beta_mat_; }
  Eigen::Index order() const { return alpha_mat_.rows(); }

  /// psi(z) split into real and imaginary parts.
  void characteristic(Complex z, Matrix& re, Matrix& im) const;

  /// Probes the real axis (every nonempty LMI region is convex and symmetric
  /// about it, so it meets the axis).
  bool is_nonempty() const;

  std::string describe() const;

 private:
  Kind kind_ = Kind::kGeneral;
  double alpha_ = 0.0;
  double theta_ = 0.0;
  Matrix alpha_mat_;
  Matrix beta_mat_;
};

Matrix assemble_grid(const std::vector<std::vector<Matrix>>& cells);

/// Block (i, j) = a_ij X + b_ij MX + b_ji MX^T, with the product MX = M X
/// supplied by the caller. Works for constant and affine matrices alike.
template <typename Mat>
Mat region_substitute_product(const LmiRegion& region, const Mat& mx, const Mat& x) {
  const auto k = region.order();
  const Mat mxt = transpose(mx);
  std::vector<std::vector<Mat>> cells(static_cast<size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      Mat cell = region.alpha_mat()(i, j) * x;
      cell += region.beta_mat()(i, j) * mx;
      cell += region.beta_mat()(j, i) * mxt;
      cells[static_cast<size_t>(i)].push_back(std::move(cell));
    }
  }
  return assemble_grid(cells);
}

/// psi with z -> M X and conj(z) -> X M^T, a (k n) x (k n) matrix.
Matrix region_substitute(const LmiRegion& region, const Matrix& m, const Matrix& x);

}  // namespace lmipole
