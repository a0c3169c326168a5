#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include <Eigen/Dense>

#include "escat/medium.hpp"

namespace escat {

/// Trigonometric-interpolation quadrature weights on the uniform periodic grid
/// sigma_j = pi j / n, j = 0..2n-1.
///
/// R[k] is the weight for the logarithmic kernel ln(4 sin^2((t-s)/2)) at grid
/// difference k; T[k] is the weight for the Cauchy kernel 1/sin(s-t) at grid
/// difference k (the principal-value rule). Both tables are 2n-periodic in k;
/// R is even and T is odd under k -> -k.
struct QuadratureWeights {
  int n;
  Eigen::VectorXd R;  // size 2n, indexed by (i-j) mod 2n
  Eigen::VectorXd T;  // size 2n, indexed by (i-j) mod 2n

  explicit QuadratureWeights(int n_) : n(n_) {
    if (n < 1) throw std::invalid_argument("QuadratureWeights: n >= 1 required");
    R.resize(2 * n);
    T.resize(2 * n);
    const int n_tilde = (n % 2 == 1) ? (n - 3) / 2 : n / 2 - 1;
    for (int k = 0; k < 2 * n; ++k) {
      double r = 0.0;
      for (int m = 1; m <= n - 1; ++m) r += std::cos(m * k * pi / n) / m;
      R[k] = -2.0 * pi / n * r - ((k % 2 == 0) ? 1.0 : -1.0) * pi / (n * n);
      double t = 0.0;
      for (int m = 0; m <= n_tilde; ++m) t += std::sin((2 * m + 1) * k * pi / n);
      T[k] = -2.0 * pi / n * t;
    }
  }

  double log_weight(int i, int j) const { return R[mod2n(i - j)]; }
  double cauchy_weight(int i, int j) const { return T[mod2n(i - j)]; }

  int mod2n(int k) const {
    const int p = 2 * n;
    int r = k % p;
    return r < 0 ? r + p : r;
  }

  /// Tables are precomputed once per n and cached.
  static const QuadratureWeights& get(int n) {
    static std::map<int, QuadratureWeights> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, QuadratureWeights(n)).first;
    return it->second;
  }
};

inline Eigen::VectorXd log_weights(int n) { return QuadratureWeights(n).R; }
inline Eigen::VectorXd cauchy_weights(int n) { return QuadratureWeights(n).T; }

/// Trapezoidal rule on [0, 2pi] with 2n periodic nodes: (pi/n) * sum.
template <typename Derived>
auto trapezoid(int n, const Eigen::MatrixBase<Derived>& samples) {
  return pi / n * samples.sum();
}

}  // namespace escat
