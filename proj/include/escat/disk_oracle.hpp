#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "escat/forward.hpp"
#include "escat/medium.hpp"
#include "escat/special_functions.hpp"

namespace escat {

/// Analytic Fourier-Bessel solution of the coupled problem for a rigid disk of
/// radius R centered at the origin:
///   phi = sum a_m H_m(kp rho) e^{im theta},  psi = sum b_m H_m(ks rho) e^{im theta}.
/// Independent of the Nystrom path; used as the forward-solver oracle.
struct ModalSolution {
  double R = 1.0;
  int n_modes = 0;                  // modes m = -n_modes..n_modes
  std::vector<Complex> a, b;        // index m + n_modes
};

namespace oracle_detail {

inline Complex hankel1_signed(int m, double x) {
  // H_{-m} = (-1)^m H_m for integer order.
  const Complex h = hankel1(std::abs(m), x);
  return (m >= 0 || std::abs(m) % 2 == 0) ? h : -h;
}

inline Complex hankel1_derivative_signed(int m, double x) {
  if (m >= 0) return hankel1_derivative(m, x);
  const Complex h = hankel1_signed(m - 1, x) - static_cast<double>(m) / x * hankel1_signed(m, x);
  return h;
}

}  // namespace oracle_detail

inline ModalSolution disk_modal_solve(double R, const ElasticMedium& medium,
                                      const IncidentWave& wave) {
  const double kp = medium.kappa_p, ks = medium.kappa_s;
  const int grid = 1024;

  // Fourier coefficients of the boundary data f1 = -nu.u_inc, f2 = -tau.u_inc
  // on the circle, by trapezoid rule (spectrally exact for these analytic data).
  auto fourier = [&](int m_max) {
    Eigen::VectorXcd f1(2 * m_max + 1), f2(2 * m_max + 1);
    f1.setZero();
    f2.setZero();
    for (int j = 0; j < grid; ++j) {
      const double th = 2.0 * pi * j / grid;
      const Vec2 nu(std::cos(th), std::sin(th));
      const Vec2 tau(-std::sin(th), std::cos(th));
      const CVec2 u = incident_field(wave, medium, R * nu);
      const Complex v1 = -(nu.x() * u.x() + nu.y() * u.y());
      const Complex v2 = -(tau.x() * u.x() + tau.y() * u.y());
      for (int m = -m_max; m <= m_max; ++m) {
        const Complex e = std::exp(-iu * static_cast<double>(m) * th) / static_cast<double>(grid);
        f1[m + m_max] += v1 * e;
        f2[m + m_max] += v2 * e;
      }
    }
    return std::make_pair(f1, f2);
  };

  int n_modes = static_cast<int>(std::ceil(ks * R)) + 20;
  for (int attempt = 0; attempt < 5; ++attempt) {
    const auto [f1, f2] = fourier(n_modes);
    ModalSolution sol;
    sol.R = R;
    sol.n_modes = n_modes;
    sol.a.assign(2 * n_modes + 1, 0.0);
    sol.b.assign(2 * n_modes + 1, 0.0);
    for (int m = -n_modes; m <= n_modes; ++m) {
      // Boundary conditions d_rho phi + (1/R) d_theta psi = f1,
      // (1/R) d_theta phi - d_rho psi = f2, per Fourier mode.
      Eigen::Matrix2cd A;
      A(0, 0) = kp * oracle_detail::hankel1_derivative_signed(m, kp * R);
      A(0, 1) = iu * static_cast<double>(m) / R * oracle_detail::hankel1_signed(m, ks * R);
      A(1, 0) = iu * static_cast<double>(m) / R * oracle_detail::hankel1_signed(m, kp * R);
      A(1, 1) = -ks * oracle_detail::hankel1_derivative_signed(m, ks * R);
      if (std::abs(A.determinant()) < 1e-300)
        throw std::runtime_error("disk_modal_solve: modal matrix singular at m=" +
                                 std::to_string(m));
      const Eigen::Vector2cd rhs(f1[m + n_modes], f2[m + n_modes]);
      const Eigen::Vector2cd x = A.fullPivLu().solve(rhs);
      sol.a[m + n_modes] = x[0];
      sol.b[m + n_modes] = x[1];
    }
    double max_c = 0.0, tail = 0.0;
    for (int k = 0; k < 2 * n_modes + 1; ++k)
      max_c = std::max({max_c, std::abs(sol.a[k]), std::abs(sol.b[k])});
    tail = std::max({std::abs(sol.a.front()), std::abs(sol.a.back()),
                     std::abs(sol.b.front()), std::abs(sol.b.back())});
    if (tail <= 1e-14 * max_c) return sol;
    n_modes *= 2;
  }
  throw std::runtime_error("disk_modal_solve: truncation-not-converged");
}

/// Far field of the modal solution:
/// phi_inf = sqrt(2/(pi kp)) e^{-i pi/4} sum a_m (-i)^m e^{im theta}.
inline FarField disk_far_field(const ModalSolution& sol, const ElasticMedium& medium,
                               const Eigen::VectorXd& directions) {
  FarField ff;
  ff.directions = directions;
  const int N = static_cast<int>(directions.size());
  ff.phi_inf.resize(N);
  ff.psi_inf.resize(N);
  const Complex cp = std::sqrt(2.0 / (pi * medium.kappa_p)) * std::exp(-iu * pi / 4.0);
  const Complex cs = std::sqrt(2.0 / (pi * medium.kappa_s)) * std::exp(-iu * pi / 4.0);
  for (int i = 0; i < N; ++i) {
    const double th = directions[i];
    Complex sp = 0.0, ss = 0.0;
    for (int m = -sol.n_modes; m <= sol.n_modes; ++m) {
      const Complex rot = std::exp(iu * static_cast<double>(m) * (th - pi / 2.0));
      sp += sol.a[m + sol.n_modes] * rot;
      ss += sol.b[m + sol.n_modes] * rot;
    }
    ff.phi_inf[i] = cp * sp;
    ff.psi_inf[i] = cs * ss;
  }
  return ff;
}

/// Residual of the modal solution in the coupled boundary conditions, by direct
/// summation on boundary points. Used by the validation suite.
inline double disk_boundary_residual(const ModalSolution& sol,
                                     const ElasticMedium& medium,
                                     const IncidentWave& wave, int points = 256) {
  const double kp = medium.kappa_p, ks = medium.kappa_s, R = sol.R;
  double worst = 0.0;
  for (int j = 0; j < points; ++j) {
    const double th = 2.0 * pi * j / points;
    Complex dphi_r = 0.0, dphi_t = 0.0, dpsi_r = 0.0, dpsi_t = 0.0;
    for (int m = -sol.n_modes; m <= sol.n_modes; ++m) {
      const Complex e = std::exp(iu * static_cast<double>(m) * th);
      const Complex im_over_R = iu * static_cast<double>(m) / R;
      dphi_r += sol.a[m + sol.n_modes] * kp * oracle_detail::hankel1_derivative_signed(m, kp * R) * e;
      dphi_t += sol.a[m + sol.n_modes] * im_over_R * oracle_detail::hankel1_signed(m, kp * R) * e;
      dpsi_r += sol.b[m + sol.n_modes] * ks * oracle_detail::hankel1_derivative_signed(m, ks * R) * e;
      dpsi_t += sol.b[m + sol.n_modes] * im_over_R * oracle_detail::hankel1_signed(m, ks * R) * e;
    }
    const Vec2 nu(std::cos(th), std::sin(th));
    const Vec2 tau(-std::sin(th), std::cos(th));
    const CVec2 u = incident_field(wave, medium, R * nu);
    const Complex f1 = -(nu.x() * u.x() + nu.y() * u.y());
    const Complex f2 = -(tau.x() * u.x() + tau.y() * u.y());
    worst = std::max(worst, std::abs(dphi_r + dpsi_t - f1));
    worst = std::max(worst, std::abs(dphi_t - dpsi_r - f2));
  }
  return worst;
}

}  // namespace escat
