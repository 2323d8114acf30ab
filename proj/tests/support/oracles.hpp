#pragma once

// Reference computations used only by the tests. Each one takes a route
// that shares no code with the library path it checks.

#include <cmath>
#include <complex>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "lmipole/numerics.hpp"
#include "lmipole/random.hpp"

namespace oracle {

using lmipole::Matrix;
using lmipole::Vector;

/// Solves (I kron A + A kron I) vec(X) = -vec(Q) densely.
inline Matrix kron_lyapunov(const Matrix& a, const Matrix& q) {
  const auto n = a.rows();
  Matrix big = Matrix::Zero(n * n, n * n);
  const Matrix eye = Matrix::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      big.block(i * n, j * n, n, n) += eye(i, j) * a;
      big.block(i * n, j * n, n, n) += a(i, j) * eye;
    }
  }
  const Vector rhs = -Eigen::Map<const Vector>(q.data(), n * n);
  const Vector sol = big.fullPivLu().solve(rhs);
  return Eigen::Map<const Matrix>(sol.data(), n, n);
}

/// Squared H2 norm by RK4 propagation of the impulse response
/// Phi' = A Phi, Phi(0) = B, and Simpson quadrature of ||C Phi||_F^2.
inline double h2_squared_quadrature(const Matrix& a, const Matrix& b, const Matrix& c, double horizon,
                                    int steps) {
  if (steps % 2) ++steps;
  const double h = horizon / steps;
  Matrix phi = b;
  auto energy = [&](const Matrix& p) { return (c * p).squaredNorm(); };
  double sum = energy(phi);
  for (int k = 1; k <= steps; ++k) {
    const Matrix k1 = a * phi;
    const Matrix k2 = a * (phi + 0.5 * h * k1);
    const Matrix k3 = a * (phi + 0.5 * h * k2);
    const Matrix k4 = a * (phi + h * k3);
    phi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double w = (k == steps) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    sum += w * energy(phi);
  }
  return sum * h / 3.0;
}

inline double sigma_max_at(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d, double omega) {
  using C = std::complex<double>;
  const auto n = a.rows();
  const Eigen::MatrixXcd m = C(0.0, omega) * Eigen::MatrixXcd::Identity(n, n) - a.cast<C>();
  const Eigen::MatrixXcd g = c.cast<C>() * m.fullPivLu().solve(b.cast<C>()) + d.cast<C>();
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(g).singularValues()(0);
}

/// Peak gain over a log-spaced frequency grid, refined by golden-section
/// search around the best grid point.
inline double hinf_sweep(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d) {
  constexpr int kGrid = 4000;
  double best = sigma_max_at(a, b, c, d, 0.0);
  std::vector<double> grid(kGrid);
  for (int i = 0; i < kGrid; ++i) grid[static_cast<size_t>(i)] = std::pow(10.0, -4.0 + 8.0 * i / (kGrid - 1));
  int best_i = -1;
  for (int i = 0; i < kGrid; ++i) {
    const double v = sigma_max_at(a, b, c, d, grid[static_cast<size_t>(i)]);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  if (best_i >= 0) {
    double lo = grid[static_cast<size_t>(std::max(0, best_i - 1))];
    double hi = grid[static_cast<size_t>(std::min(kGrid - 1, best_i + 1))];
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 200; ++it) {
      const double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
      if (sigma_max_at(a, b, c, d, x1) > sigma_max_at(a, b, c, d, x2)) {
        hi = x2;
      } else {
        lo = x1;
      }
    }
    best = std::max(best, sigma_max_at(a, b, c, d, 0.5 * (lo + hi)));
  }
  return best;
}

/// Exact state after holding u and w constant for time t from x0.
inline Vector zoh_state(const Matrix& a, const Matrix& b, const Vector& x0, const Vector& input, double t) {
  const auto n = a.rows(), m = b.cols();
  Matrix aug = Matrix::Zero(n + m, n + m);
  aug.topLeftCorner(n, n) = a * t;
  aug.topRightCorner(n, m) = b * t;
  const Matrix e = aug.exp();
  return e.topLeftCorner(n, n) * x0 + e.topRightCorner(n, m) * input;
}

/// Random matrix with spectrum shifted into the open left half-plane.
inline Matrix random_stable(lmipole::Rng& rng, Eigen::Index n, double margin = 0.1) {
  Matrix a = rng.uniform_matrix(n, n, -1.0, 1.0);
  double max_re = -1e300;
  for (const auto& l : lmipole::numerics::eig_general(a)) max_re = std::max(max_re, l.real());
  return a - (max_re + margin) * Matrix::Identity(n, n);
}

}  // namespace oracle
