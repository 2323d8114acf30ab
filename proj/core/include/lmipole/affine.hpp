#pragma once

// Matrix-valued affine expressions in the SDP decision vector. Used to write
// LMI blocks in the same block notation as the control conditions.

#include <initializer_list>
#include <string>
#include <vector>

#include "lmipole/numerics.hpp"
#include "lmipole/sdp.hpp"

namespace lmipole {

class AffineMatrix {
 public:
  AffineMatrix() = default;
  AffineMatrix(Eigen::Index rows, Eigen::Index cols, int num_vars);

  static AffineMatrix constant(const Matrix& value, int num_vars);
  /// Entry (r, c) equals variable index(r, c); a negative index means zero.
  template <typename IndexFn>
  static AffineMatrix variables(Eigen::Index rows, Eigen::Index cols, int num_vars, IndexFn&& index) {
    AffineMatrix out(rows, cols, num_vars);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        const int k = index(r, c);
        if (k >= 0) out.coeff_ref(k)(r, c) = 1.0;
      }
    }
    return out;
  }

  Eigen::Index rows() const { return constant_.rows(); }
  Eigen::Index cols() const { return constant_.cols(); }
  int num_vars() const { return static_cast<int>(coeffs_.size()); }

  const Matrix& constant_part() const { return constant_; }
  /// Coefficient of variable k; a zero matrix when the variable is absent.
  Matrix coeff(int k) const;

  Matrix evaluate(const Vector& y) const;
  AffineMatrix transpose() const;

  AffineMatrix& operator+=(const AffineMatrix& other);
  AffineMatrix& operator-=(const AffineMatrix& other);
  AffineMatrix& operator*=(double s);

  friend AffineMatrix operator+(AffineMatrix a, const AffineMatrix& b) { return a += b; }
  friend AffineMatrix operator-(AffineMatrix a, const AffineMatrix& b) { return a -= b; }
  friend AffineMatrix operator-(AffineMatrix a) { return a *= -1.0; }
  friend AffineMatrix operator*(double s, AffineMatrix a) { return a *= s; }
  friend AffineMatrix operator*(const Matrix& m, const AffineMatrix& a);
  friend AffineMatrix operator*(const AffineMatrix& a, const Matrix& m);

  /// Block matrix assembly; all blocks in a row share a height and all
  /// blocks in a column share a width.
  static AffineMatrix blocks(std::initializer_list<std::initializer_list<AffineMatrix>> grid);

  /// Converts `expr >= 0` into an SDP block (symmetrized).
  sdp::LmiBlock to_block(std::string name) const;

 private:
  friend AffineMatrix assemble_grid(const std::vector<std::vector<AffineMatrix>>& cells);
  Matrix& coeff_ref(int k);

  Matrix constant_;
  // Lazily allocated: an empty matrix stands for a zero coefficient.
  std::vector<Matrix> coeffs_;
};

inline AffineMatrix transpose(const AffineMatrix& a) { return a.transpose(); }

AffineMatrix assemble_grid(const std::vector<std::vector<AffineMatrix>>& cells);

}  // namespace lmipole
