#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include "escat/medium.hpp"

namespace escat {

/// Bessel functions of integer order. Backed by the C++17 mathematical special
/// functions; the accuracy contract (series/asymptotic identities, Wronskian,
/// recurrences) is enforced by the test suite.
inline double bessel_j(int order, double x) {
  if (order < 0) throw std::domain_error("bessel_j: order must be >= 0");
  if (x < 0.0) throw std::domain_error("bessel_j: argument must be >= 0");
  return std::cyl_bessel_j(static_cast<double>(order), x);
}

inline double bessel_y(int order, double x) {
  if (order < 0) throw std::domain_error("bessel_y: order must be >= 0");
  if (x <= 0.0) throw std::domain_error("bessel_y: argument must be > 0");
  return std::cyl_neumann(static_cast<double>(order), x);
}

/// Hankel function of the first kind, H_n = J_n + i Y_n.
inline Complex hankel1(int order, double x) {
  return Complex(bessel_j(order, x), bessel_y(order, x));
}

/// H_n' via H_n' = H_{n-1} - (n/z) H_n (and H_0' = -H_1).
inline Complex hankel1_derivative(int order, double x) {
  if (order == 0) return -hankel1(1, x);
  return hankel1(order - 1, x) - static_cast<double>(order) / x * hankel1(order, x);
}

}  // namespace escat
