#include "lmipole/random.hpp"

#include <cmath>
#include <numbers>

namespace lmipole {

double Rng::normal() {
  double u1 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vector Rng::uniform_vector(Eigen::Index size, double lo, double hi) {
  Vector v(size);
  for (Eigen::Index i = 0; i < size; ++i) v(i) = uniform(lo, hi);
  return v;
}

Matrix Rng::uniform_matrix(Eigen::Index rows, Eigen::Index cols, double lo, double hi) {
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = uniform(lo, hi);
  }
  return m;
}

Vector Rng::uniform_in_ball(Eigen::Index dim, double radius) {
  Vector v = Vector::Zero(dim);
  if (dim == 0 || radius == 0.0) return v;
  double norm = 0.0;
  while (norm == 0.0) {
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = normal();
    norm = v.norm();
  }
  const double rho = uniform01();
  const double r = radius * std::pow(rho, 1.0 / static_cast<double>(dim));
  // Guard against the last ulp pushing the sample outside the ball.
  return (r / norm) * v * (1.0 - 1e-15);
}

}  // namespace lmipole
