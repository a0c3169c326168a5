#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "escat/geometry.hpp"
#include "escat/special_functions.hpp"

namespace escat {

/// Parameterized integral kernels of the coupled system. The factor-2
/// convention of the boundary integral operators is absorbed into the kernels,
/// so the discrete systems transcribe the operator equations literally.

/// Single-layer kernel (i/2) H0(kappa |p(t)-p(s)|) for distinct points.
inline Complex single_layer_kernel(const CurveFrame& obs, const CurveFrame& src,
                                   double kappa) {
  const double dist = (obs.p - src.p).norm();
  if (dist < 1e-14) throw std::domain_error("single_layer_kernel: coincident points");
  return 0.5 * iu * hankel1(0, kappa * dist);
}

/// Normal-derivative kernel K~(t,s;kappa). Valid for distinct points, on the
/// same boundary or across boundaries (obs carries n(t), src carries p(s)).
inline Complex kernel_K(const CurveFrame& obs, const CurveFrame& src, double kappa) {
  const Vec2 diff = src.p - obs.p;
  const double dist = diff.norm();
  if (dist < 1e-14) throw std::domain_error("kernel_K: coincident points");
  return 0.5 * iu * kappa * obs.n.dot(diff) * hankel1(1, kappa * dist) / dist;
}

/// Tangential-derivative kernel H~(t,s;kappa).
inline Complex kernel_H(const CurveFrame& obs, const CurveFrame& src, double kappa) {
  const Vec2 diff = src.p - obs.p;
  const double dist = diff.norm();
  if (dist < 1e-14) throw std::domain_error("kernel_H: coincident points");
  return 0.5 * iu * kappa * obs.n_perp.dot(diff) * hankel1(1, kappa * dist) / dist;
}

/// Splitting K~ = K1 ln(4 sin^2((t-s)/2)) + K2 for same-boundary node pairs.
/// K2 is obtained by direct subtraction off the diagonal; the minimum node
/// spacing pi/n keeps the cancellation benign (pinned by a regression test at
/// adjacent-node distance).
inline std::pair<Complex, Complex> kernel_K_split(double t, double s,
                                                  const CurveFrame& obs,
                                                  const CurveFrame& src, double kappa,
                                                  bool diagonal) {
  if (diagonal) {
    const Complex K2 = obs.n.dot(obs.ddp) / (2.0 * pi * obs.G * obs.G);
    return {Complex(0.0), K2};
  }
  const Vec2 diff = obs.p - src.p;
  const double dist = diff.norm();
  const Complex K1 =
      kappa / (2.0 * pi) * obs.n.dot(diff) * bessel_j(1, kappa * dist) / dist;
  const double half = 0.5 * (t - s);
  const double log_term = std::log(4.0 * std::sin(half) * std::sin(half));
  const Complex K2 = kernel_K(obs, src, kappa) - K1 * log_term;
  return {K1, K2};
}

struct HSplit {
  Complex H1;  // coefficient of 1/sin(s-t)
  Complex H2;  // coefficient of ln(4 sin^2((t-s)/2))
  Complex H3;  // smooth remainder
};

/// Splitting H~ = H1 / sin(s-t) + H2 ln(4 sin^2((t-s)/2)) + H3 with diagonal
/// limits (1/pi, 0, 0).
inline HSplit kernel_H_split(double t, double s, const CurveFrame& obs,
                             const CurveFrame& src, double kappa, bool diagonal) {
  if (diagonal) return {Complex(1.0 / pi), Complex(0.0), Complex(0.0)};
  const Vec2 diff_st = src.p - obs.p;  // p(s) - p(t)
  const double dist = diff_st.norm();
  const double sin_st = std::sin(s - t);
  const Complex H1 = obs.n_perp.dot(diff_st) * sin_st / (pi * dist * dist);
  const Complex H2 =
      -kappa / (2.0 * pi) * obs.n_perp.dot(diff_st) * bessel_j(1, kappa * dist) / dist;
  const double half = 0.5 * (t - s);
  const double log_term = std::log(4.0 * std::sin(half) * std::sin(half));
  const Complex H3 = kernel_H(obs, src, kappa) - H1 / sin_st - H2 * log_term;
  return {H1, H2, H3};
}

}  // namespace escat
