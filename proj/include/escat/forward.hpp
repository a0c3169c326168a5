#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "escat/geometry.hpp"
#include "escat/kernels.hpp"
#include "escat/medium.hpp"
#include "escat/quadrature.hpp"

namespace escat {

inline Complex gamma_factor(double kappa) {
  return std::exp(iu * pi / 4.0) / std::sqrt(8.0 * kappa * pi);
}

/// Jacobian-weighted single-layer densities (phi_1, phi_2) sampled at the 2n
/// Nystrom nodes of one boundary, together with the node frames.
struct BoundaryDensities {
  int n = 0;
  std::vector<CurveFrame> frames;  // at sigma_j = pi j / n
  Eigen::VectorXcd phi1;
  Eigen::VectorXcd phi2;
};

/// Far-field samples phi_inf, psi_inf at 2*n_bar uniform directions.
struct FarField {
  Eigen::VectorXd directions;
  Eigen::VectorXcd phi_inf;
  Eigen::VectorXcd psi_inf;
};

/// Elastic far-field patterns lifted from the potentials: v_p is longitudinal
/// (parallel to x_hat), v_s transversal (parallel to x_hat_perp).
struct ElasticFarField {
  Eigen::VectorXd directions;
  Eigen::Matrix2Xcd vp_inf;
  Eigen::Matrix2Xcd vs_inf;
};

inline std::vector<CurveFrame> node_frames(const ParametricCurve& curve, int n) {
  std::vector<CurveFrame> frames;
  frames.reserve(2 * n);
  for (int j = 0; j < 2 * n; ++j) frames.push_back(curve.frame(pi * j / n));
  return frames;
}

/// Dirichlet boundary data of the coupled problem in parameterized form:
/// w1 = -2 n(t).u_inc(p(t)), w2 = -2 n_perp(t).u_inc(p(t)).
inline void boundary_data(const IncidentWave& wave, const ElasticMedium& medium,
                          const std::vector<CurveFrame>& frames,
                          Eigen::VectorXcd& w1, Eigen::VectorXcd& w2) {
  const int N = static_cast<int>(frames.size());
  w1.resize(N);
  w2.resize(N);
  for (int j = 0; j < N; ++j) {
    if (frames[j].G <= 0.0) throw std::domain_error("boundary_data: degenerate curve");
    const CVec2 u = incident_field(wave, medium, frames[j].p);
    w1[j] = -2.0 * (frames[j].n.x() * u.x() + frames[j].n.y() * u.y());
    w2[j] = -2.0 * (frames[j].n_perp.x() * u.x() + frames[j].n_perp.y() * u.y());
  }
}

namespace detail {

/// Discrete self-interaction operator for K: entries
/// R_{|i-j|} K1 + (pi/n) K2 with diagonal limits substituted at i == j.
inline Eigen::MatrixXcd discrete_K(const std::vector<CurveFrame>& frames, double kappa,
                                   const QuadratureWeights& qw) {
  const int N = static_cast<int>(frames.size());
  const int n = qw.n;
  Eigen::MatrixXcd A(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const auto [K1, K2] = kernel_K_split(pi * i / n, pi * j / n, frames[i], frames[j],
                                           kappa, i == j);
      A(i, j) = qw.log_weight(i, j) * K1 + pi / n * K2;
    }
  return A;
}

/// Discrete self-interaction operator for H: entries
/// T_{i-j} H1 + R_{|i-j|} H2 + (pi/n) H3.
inline Eigen::MatrixXcd discrete_H(const std::vector<CurveFrame>& frames, double kappa,
                                   const QuadratureWeights& qw) {
  const int N = static_cast<int>(frames.size());
  const int n = qw.n;
  Eigen::MatrixXcd A(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const HSplit h = kernel_H_split(pi * i / n, pi * j / n, frames[i], frames[j],
                                      kappa, i == j);
      A(i, j) = qw.cauchy_weight(i, j) * h.H1 + qw.log_weight(i, j) * h.H2 +
                pi / n * h.H3;
    }
  return A;
}

/// Smooth cross-boundary blocks, plain trapezoid rule.
inline Eigen::MatrixXcd cross_K(const std::vector<CurveFrame>& obs,
                                const std::vector<CurveFrame>& src, double kappa,
                                int n) {
  Eigen::MatrixXcd A(obs.size(), src.size());
  for (int i = 0; i < static_cast<int>(obs.size()); ++i)
    for (int j = 0; j < static_cast<int>(src.size()); ++j)
      A(i, j) = pi / n * kernel_K(obs[i], src[j], kappa);
  return A;
}

inline Eigen::MatrixXcd cross_H(const std::vector<CurveFrame>& obs,
                                const std::vector<CurveFrame>& src, double kappa,
                                int n) {
  Eigen::MatrixXcd A(obs.size(), src.size());
  for (int i = 0; i < static_cast<int>(obs.size()); ++i)
    for (int j = 0; j < static_cast<int>(src.size()); ++j)
      A(i, j) = pi / n * kernel_H(obs[i], src[j], kappa);
  return A;
}

inline void check_solvable(const Eigen::PartialPivLU<Eigen::MatrixXcd>& lu) {
  const double rc = lu.rcond();
  if (!(rc > 1e-12))
    throw std::runtime_error(
        "singular-system: boundary integral system is near-singular (rcond=" +
        std::to_string(rc) + "); perturbing the frequency may avoid the resonance");
}

}  // namespace detail

/// Nystrom matrix of the single-obstacle coupled system, unknowns (phi1, phi2).
inline Eigen::MatrixXcd assemble_single(const ParametricCurve& curve,
                                        const ElasticMedium& medium, int n,
                                        std::vector<CurveFrame>* frames_out = nullptr) {
  const auto frames = node_frames(curve, n);
  const auto& qw = QuadratureWeights::get(n);
  const int N = 2 * n;
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(N, N);
  Eigen::MatrixXcd A(2 * N, 2 * N);
  A.block(0, 0, N, N) = -I + detail::discrete_K(frames, medium.kappa_p, qw);
  A.block(0, N, N, N) = detail::discrete_H(frames, medium.kappa_s, qw);
  A.block(N, 0, N, N) = detail::discrete_H(frames, medium.kappa_p, qw);
  A.block(N, N, N, N) = I - detail::discrete_K(frames, medium.kappa_s, qw);
  if (frames_out) *frames_out = frames;
  return A;
}

inline BoundaryDensities solve_single(const ParametricCurve& curve,
                                      const ElasticMedium& medium,
                                      const IncidentWave& wave, int n) {
  BoundaryDensities sol;
  sol.n = n;
  const Eigen::MatrixXcd A = assemble_single(curve, medium, n, &sol.frames);
  Eigen::VectorXcd w1, w2;
  boundary_data(wave, medium, sol.frames, w1, w2);
  Eigen::VectorXcd rhs(4 * n);
  rhs << w1, w2;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  detail::check_solvable(lu);
  const Eigen::VectorXcd x = lu.solve(rhs);
  sol.phi1 = x.head(2 * n);
  sol.phi2 = x.tail(2 * n);
  return sol;
}

struct TwoDomainSolution {
  BoundaryDensities obstacle;
  BoundaryDensities ball;
};

/// Coupled system for obstacle D plus reference ball B; self-blocks use the
/// singular splits, cross-blocks the plain trapezoid rule. Unknown ordering is
/// (phi1_D, phi2_D, phi1_B, phi2_B).
inline Eigen::MatrixXcd assemble_two_domain(const ParametricCurve& curveD,
                                            const CircleBoundary& ball,
                                            const ElasticMedium& medium, int n,
                                            std::vector<CurveFrame>* framesD_out = nullptr,
                                            std::vector<CurveFrame>* framesB_out = nullptr) {
  const auto fD = node_frames(curveD, n);
  const auto fB = node_frames(ball, n);
  // Boundary separation of at least a tenth of the shear wavelength keeps the
  // cross kernels resolvable by the trapezoid rule.
  const double min_sep = 0.1 * 2.0 * pi / medium.kappa_s;
  for (const auto& a : fD)
    for (const auto& b : fB)
      if ((a.p - b.p).norm() < min_sep)
        throw std::runtime_error("overlapping-boundaries: obstacle too close to ball");

  const auto& qw = QuadratureWeights::get(n);
  const int N = 2 * n;
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(N, N);
  const double kp = medium.kappa_p, ks = medium.kappa_s;

  Eigen::MatrixXcd A(4 * N, 4 * N);
  // Rows on Gamma_D.
  A.block(0, 0, N, N) = -I + detail::discrete_K(fD, kp, qw);
  A.block(0, N, N, N) = detail::discrete_H(fD, ks, qw);
  A.block(0, 2 * N, N, N) = detail::cross_K(fD, fB, kp, n);
  A.block(0, 3 * N, N, N) = detail::cross_H(fD, fB, ks, n);
  A.block(N, 0, N, N) = detail::discrete_H(fD, kp, qw);
  A.block(N, N, N, N) = I - detail::discrete_K(fD, ks, qw);
  A.block(N, 2 * N, N, N) = detail::cross_H(fD, fB, kp, n);
  A.block(N, 3 * N, N, N) = -detail::cross_K(fD, fB, ks, n);
  // Rows on Gamma_B.
  A.block(2 * N, 0, N, N) = detail::cross_K(fB, fD, kp, n);
  A.block(2 * N, N, N, N) = detail::cross_H(fB, fD, ks, n);
  A.block(2 * N, 2 * N, N, N) = -I + detail::discrete_K(fB, kp, qw);
  A.block(2 * N, 3 * N, N, N) = detail::discrete_H(fB, ks, qw);
  A.block(3 * N, 0, N, N) = detail::cross_H(fB, fD, kp, n);
  A.block(3 * N, N, N, N) = -detail::cross_K(fB, fD, ks, n);
  A.block(3 * N, 2 * N, N, N) = detail::discrete_H(fB, kp, qw);
  A.block(3 * N, 3 * N, N, N) = I - detail::discrete_K(fB, ks, qw);

  if (framesD_out) *framesD_out = fD;
  if (framesB_out) *framesB_out = fB;
  return A;
}

inline TwoDomainSolution solve_two_domain(const ParametricCurve& curveD,
                                          const CircleBoundary& ball,
                                          const ElasticMedium& medium,
                                          const IncidentWave& wave, int n) {
  TwoDomainSolution sol;
  sol.obstacle.n = sol.ball.n = n;
  const Eigen::MatrixXcd A =
      assemble_two_domain(curveD, ball, medium, n, &sol.obstacle.frames, &sol.ball.frames);
  Eigen::VectorXcd w1D, w2D, w1B, w2B;
  boundary_data(wave, medium, sol.obstacle.frames, w1D, w2D);
  boundary_data(wave, medium, sol.ball.frames, w1B, w2B);
  Eigen::VectorXcd rhs(8 * n);
  rhs << w1D, w2D, w1B, w2B;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  detail::check_solvable(lu);
  const Eigen::VectorXcd x = lu.solve(rhs);
  const int N = 2 * n;
  sol.obstacle.phi1 = x.segment(0, N);
  sol.obstacle.phi2 = x.segment(N, N);
  sol.ball.phi1 = x.segment(2 * N, N);
  sol.ball.phi2 = x.segment(3 * N, N);
  return sol;
}

/// Far-field patterns of the solved densities, summed over all boundaries and
/// evaluated at 2*n_bar uniform observation directions.
inline FarField far_field(const std::vector<const BoundaryDensities*>& boundaries,
                          const ElasticMedium& medium, int n_bar) {
  FarField ff;
  const int N = 2 * n_bar;
  ff.directions.resize(N);
  ff.phi_inf = Eigen::VectorXcd::Zero(N);
  ff.psi_inf = Eigen::VectorXcd::Zero(N);
  const Complex gp = gamma_factor(medium.kappa_p);
  const Complex gs = gamma_factor(medium.kappa_s);
  for (int i = 0; i < N; ++i) {
    const double t = pi * i / n_bar;
    ff.directions[i] = t;
    const Vec2 xhat(std::cos(t), std::sin(t));
    for (const BoundaryDensities* bd : boundaries) {
      Complex sp = 0.0, ss = 0.0;
      for (int j = 0; j < 2 * bd->n; ++j) {
        const double dot = xhat.dot(bd->frames[j].p);
        sp += std::exp(-iu * medium.kappa_p * dot) * bd->phi1[j];
        ss += std::exp(-iu * medium.kappa_s * dot) * bd->phi2[j];
      }
      const double h = pi / bd->n;
      ff.phi_inf[i] += gp * h * sp;
      ff.psi_inf[i] += gs * h * ss;
    }
  }
  return ff;
}

inline FarField far_field(const BoundaryDensities& sol, const ElasticMedium& medium,
                          int n_bar) {
  return far_field(std::vector<const BoundaryDensities*>{&sol}, medium, n_bar);
}

inline FarField far_field(const TwoDomainSolution& sol, const ElasticMedium& medium,
                          int n_bar) {
  return far_field({&sol.obstacle, &sol.ball}, medium, n_bar);
}

/// v_p_inf = i kp phi_inf x_hat, v_s_inf = -i ks psi_inf x_hat_perp.
inline ElasticFarField elastic_lift(const FarField& ff, const ElasticMedium& medium) {
  ElasticFarField e;
  const int N = static_cast<int>(ff.directions.size());
  e.directions = ff.directions;
  e.vp_inf.resize(2, N);
  e.vs_inf.resize(2, N);
  for (int i = 0; i < N; ++i) {
    const double t = ff.directions[i];
    const Vec2 xhat(std::cos(t), std::sin(t));
    const Vec2 xperp(-std::sin(t), std::cos(t));
    const Complex cp = iu * medium.kappa_p * ff.phi_inf[i];
    const Complex cs = -iu * medium.kappa_s * ff.psi_inf[i];
    e.vp_inf.col(i) = CVec2(cp * xhat.x(), cp * xhat.y());
    e.vs_inf.col(i) = CVec2(cs * xperp.x(), cs * xperp.y());
  }
  return e;
}

/// Single-layer potentials (phi, psi) at a strictly exterior point.
inline std::pair<Complex, Complex> near_field(
    const std::vector<const BoundaryDensities*>& boundaries,
    const ElasticMedium& medium, const Vec2& x) {
  Complex phi = 0.0, psi = 0.0;
  for (const BoundaryDensities* bd : boundaries) {
    for (int j = 0; j < 2 * bd->n; ++j) {
      const double dist = (x - bd->frames[j].p).norm();
      if (dist < 1e-12) throw std::domain_error("near_field: point on boundary");
      const double h = pi / bd->n;
      phi += 0.25 * iu * h * hankel1(0, medium.kappa_p * dist) * bd->phi1[j];
      psi += 0.25 * iu * h * hankel1(0, medium.kappa_s * dist) * bd->phi2[j];
    }
  }
  return {phi, psi};
}

/// Gradients of the potentials at an exterior point; grad phi is the
/// compressional component of the scattered field, curl psi the shear one.
inline std::pair<CVec2, CVec2> near_field_gradient(
    const std::vector<const BoundaryDensities*>& boundaries,
    const ElasticMedium& medium, const Vec2& x) {
  CVec2 grad_phi = CVec2::Zero();
  CVec2 curl_psi = CVec2::Zero();
  for (const BoundaryDensities* bd : boundaries) {
    for (int j = 0; j < 2 * bd->n; ++j) {
      const Vec2 diff = x - bd->frames[j].p;
      const double dist = diff.norm();
      const double h = pi / bd->n;
      // grad_x Phi = -(i kappa / 4) H1(kappa |x-y|) (x-y)/|x-y|
      const Complex cp = -0.25 * iu * medium.kappa_p * h *
                         hankel1(1, medium.kappa_p * dist) / dist * bd->phi1[j];
      grad_phi += cp * CVec2(diff.x(), diff.y());
      const Complex cs = -0.25 * iu * medium.kappa_s * h *
                         hankel1(1, medium.kappa_s * dist) / dist * bd->phi2[j];
      // curl psi = (d_y psi, -d_x psi)
      curl_psi += cs * CVec2(diff.y(), -diff.x());
    }
  }
  return {grad_phi, curl_psi};
}

}  // namespace escat
