#include "lmipole/affine.hpp"

#include "lmipole/errors.hpp"

namespace lmipole {

AffineMatrix::AffineMatrix(Eigen::Index rows, Eigen::Index cols, int num_vars)
    : constant_(Matrix::Zero(rows, cols)), coeffs_(static_cast<size_t>(num_vars)) {}

AffineMatrix AffineMatrix::constant(const Matrix& value, int num_vars) {
  AffineMatrix out(value.rows(), value.cols(), num_vars);
  out.constant_ = value;
  return out;
}

Matrix& AffineMatrix::coeff_ref(int k) {
  Matrix& m = coeffs_.at(static_cast<size_t>(k));
  if (m.size() == 0) m = Matrix::Zero(rows(), cols());
  return m;
}

Matrix AffineMatrix::coeff(int k) const {
  const Matrix& m = coeffs_.at(static_cast<size_t>(k));
  return m.size() == 0 ? Matrix::Zero(rows(), cols()) : m;
}

Matrix AffineMatrix::evaluate(const Vector& y) const {
  if (y.size() != num_vars()) throw DimensionError("AffineMatrix::evaluate: wrong vector size");
  Matrix out = constant_;
  for (int k = 0; k < num_vars(); ++k) {
    if (coeffs_[static_cast<size_t>(k)].size() != 0) out += y(k) * coeffs_[static_cast<size_t>(k)];
  }
  return out;
}

AffineMatrix AffineMatrix::transpose() const {
  AffineMatrix out;
  out.constant_ = constant_.transpose();
  out.coeffs_.resize(coeffs_.size());
  for (size_t k = 0; k < coeffs_.size(); ++k) {
    if (coeffs_[k].size() != 0) out.coeffs_[k] = coeffs_[k].transpose();
  }
  return out;
}

AffineMatrix& AffineMatrix::operator+=(const AffineMatrix& other) {
  if (other.rows() != rows() || other.cols() != cols() || other.num_vars() != num_vars()) {
    throw DimensionError("AffineMatrix: shape mismatch in addition");
  }
  constant_ += other.constant_;
  for (int k = 0; k < num_vars(); ++k) {
    const Matrix& o = other.coeffs_[static_cast<size_t>(k)];
    if (o.size() != 0) coeff_ref(k) += o;
  }
  return *this;
}

AffineMatrix& AffineMatrix::operator-=(const AffineMatrix& other) {
  AffineMatrix neg = other;
  neg *= -1.0;
  return *this += neg;
}

AffineMatrix& AffineMatrix::operator*=(double s) {
  constant_ *= s;
  for (auto& m : coeffs_) {
    if (m.size() != 0) m *= s;
  }
  return *this;
}

AffineMatrix operator*(const Matrix& m, const AffineMatrix& a) {
  if (m.cols() != a.rows()) throw DimensionError("AffineMatrix: shape mismatch in left product");
  AffineMatrix out;
  out.constant_ = m * a.constant_;
  out.coeffs_.resize(a.coeffs_.size());
  for (size_t k = 0; k < a.coeffs_.size(); ++k) {
    if (a.coeffs_[k].size() != 0) out.coeffs_[k] = m * a.coeffs_[k];
  }
  return out;
}

AffineMatrix operator*(const AffineMatrix& a, const Matrix& m) {
  if (a.cols() != m.rows()) throw DimensionError("AffineMatrix: shape mismatch in right product");
  AffineMatrix out;
  out.constant_ = a.constant_ * m;
  out.coeffs_.resize(a.coeffs_.size());
  for (size_t k = 0; k < a.coeffs_.size(); ++k) {
    if (a.coeffs_[k].size() != 0) out.coeffs_[k] = a.coeffs_[k] * m;
  }
  return out;
}

AffineMatrix AffineMatrix::blocks(std::initializer_list<std::initializer_list<AffineMatrix>> grid) {
  std::vector<std::vector<AffineMatrix>> cells;
  for (const auto& row : grid) cells.emplace_back(row);
  return assemble_grid(cells);
}

AffineMatrix assemble_grid(const std::vector<std::vector<AffineMatrix>>& cells) {
  if (cells.empty() || cells.front().empty()) return {};
  const int nv = cells.front().front().num_vars();
  std::vector<Eigen::Index> heights, widths;
  for (const auto& row : cells) heights.push_back(row.front().rows());
  for (const auto& cell : cells.front()) widths.push_back(cell.cols());
  Eigen::Index total_rows = 0, total_cols = 0;
  for (auto h : heights) total_rows += h;
  for (auto w : widths) total_cols += w;

  AffineMatrix out(total_rows, total_cols, nv);
  Eigen::Index r0 = 0;
  for (size_t ri = 0; ri < cells.size(); ++ri) {
    const auto& row = cells[ri];
    if (row.size() != widths.size()) throw DimensionError("AffineMatrix::blocks: ragged grid");
    Eigen::Index c0 = 0;
    for (size_t ci = 0; ci < row.size(); ++ci) {
      const auto& cell = row[ci];
      if (cell.rows() != heights[ri] || cell.cols() != widths[ci] || cell.num_vars() != nv) {
        throw DimensionError("AffineMatrix::blocks: block shape mismatch");
      }
      out.constant_.block(r0, c0, cell.rows(), cell.cols()) = cell.constant_;
      for (int k = 0; k < nv; ++k) {
        const Matrix& m = cell.coeffs_[static_cast<size_t>(k)];
        if (m.size() != 0) out.coeff_ref(k).block(r0, c0, cell.rows(), cell.cols()) = m;
      }
      c0 += widths[ci];
    }
    r0 += heights[ri];
  }
  return out;
}

sdp::LmiBlock AffineMatrix::to_block(std::string name) const {
  if (rows() != cols()) throw DimensionError("AffineMatrix::to_block: " + name + " is not square");
  sdp::LmiBlock block;
  block.name = std::move(name);
  block.constant = numerics::symmetrize(constant_);
  for (int k = 0; k < num_vars(); ++k) {
    const Matrix& m = coeffs_[static_cast<size_t>(k)];
    if (m.size() != 0 && m.cwiseAbs().maxCoeff() > 0.0) {
      block.coeffs.emplace_back(k, numerics::symmetrize(m));
    }
  }
  return block;
}

}  // namespace lmipole
