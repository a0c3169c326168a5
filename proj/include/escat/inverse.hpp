#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "escat/forward.hpp"
#include "escat/geometry.hpp"
#include "escat/medium.hpp"

namespace escat {

/// Discrete L2 norm over observation directions with uniform weight 2 pi / N.
inline double direction_norm(const Eigen::VectorXcd& v) {
  return std::sqrt(2.0 * pi / v.size() * v.squaredNorm());
}
inline double direction_norm(const Eigen::VectorXd& v) {
  return std::sqrt(2.0 * pi / v.size() * v.squaredNorm());
}

struct ReconstructionConfig {
  int M = 6;
  int n = 64;
  int n_bar = 32;
  double rho = 0.9;
  double epsilon = 0.01;
  double delta = 0.0;
  int max_iters = 100;
  ModeFlags mode;
  std::optional<CircleBoundary> reference_ball;
  std::uint64_t rng_seed = 0;
  bool h2_penalty = true;  // switchable to a plain-identity penalty

  void validate() const {
    if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must be in (0,1]");
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (2 * M + 3 >= 4 * n_bar)
      throw std::invalid_argument("linearized system must be overdetermined (2M+3 << 4 n_bar)");
  }
};

struct IterationRecord {
  StarCurve curve;
  double E = 0.0;       // residual estimator
  double Err = -1.0;    // true error vs exact sampler, -1 when unavailable
  double lambda = 0.0;  // regularization parameter used for the step
};

struct IterationTrace {
  std::vector<IterationRecord> records;
  bool converged = false;
};

// ---------------------------------------------------------------------------
// Noise injection.
// ---------------------------------------------------------------------------

namespace rng {

/// Counter-based generator (splitmix64 over seed+counter): the k-th draw is a
/// pure function of (seed, k), so data files embedding the seed are exactly
/// reproducible.
inline double uniform_pm1(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (counter + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z = z ^ (z >> 31);
  return 2.0 * (static_cast<double>(z >> 11) * 0x1.0p-53) - 1.0;
}

}  // namespace rng

/// Multiplicative uniform noise u (1 + delta (eta1 + i eta2)), fresh draws per
/// data point, phi samples first then psi.
inline FarField inject_noise(const FarField& data, double delta, std::uint64_t seed) {
  if (delta < 0.0) throw std::invalid_argument("inject_noise: delta must be >= 0");
  FarField noisy = data;
  const int N = static_cast<int>(data.directions.size());
  for (int i = 0; i < N; ++i) {
    const Complex eta1(rng::uniform_pm1(seed, 4 * i),
                       rng::uniform_pm1(seed, 4 * i + 1));
    const Complex eta2(rng::uniform_pm1(seed, 4 * i + 2),
                       rng::uniform_pm1(seed, 4 * i + 3));
    noisy.phi_inf[i] *= 1.0 + delta * eta1;
    noisy.psi_inf[i] *= 1.0 + delta * eta2;
  }
  return noisy;
}

/// Squared-modulus (phaseless) data with noise |u|^2 (1 + delta eta).
struct PhaselessData {
  Eigen::VectorXd directions;
  Eigen::VectorXd phi_sq;
  Eigen::VectorXd psi_sq;
};

inline PhaselessData phaseless_data(const FarField& ff) {
  PhaselessData d;
  d.directions = ff.directions;
  d.phi_sq = ff.phi_inf.cwiseAbs2();
  d.psi_sq = ff.psi_inf.cwiseAbs2();
  return d;
}

inline PhaselessData inject_noise_phaseless(const PhaselessData& data, double delta,
                                            std::uint64_t seed) {
  if (delta < 0.0) throw std::invalid_argument("inject_noise: delta must be >= 0");
  PhaselessData noisy = data;
  const int N = static_cast<int>(data.directions.size());
  for (int i = 0; i < N; ++i) {
    noisy.phi_sq[i] *= 1.0 + delta * rng::uniform_pm1(seed, 2 * i);
    noisy.psi_sq[i] *= 1.0 + delta * rng::uniform_pm1(seed, 2 * i + 1);
  }
  return noisy;
}

// ---------------------------------------------------------------------------
// Frechet derivative and linearized systems.
// ---------------------------------------------------------------------------

/// Operator derivative of the far-field map, density held fixed:
/// (S_inf)'[p; phi] q by trapezoid rule at the given observation directions.
inline Eigen::VectorXcd frechet_far_field(const StarCurve& curve,
                                          const Eigen::VectorXcd& phi, double kappa,
                                          const ShapeUpdate& update,
                                          const Eigen::VectorXd& directions) {
  const int n = static_cast<int>(phi.size()) / 2;
  const Complex pref = -iu * kappa * gamma_factor(kappa) * pi / static_cast<double>(n);
  const Vec2 c = curve.center();
  Eigen::VectorXcd out(directions.size());
  for (int i = 0; i < directions.size(); ++i) {
    const double t = directions[i];
    Complex acc = 0.0;
    for (int j = 0; j < 2 * n; ++j) {
      const double s = pi * j / n;
      const double r = curve.radius(s)[0];
      const double phase_arg =
          c.x() * std::cos(t) + c.y() * std::sin(t) + r * std::cos(t - s);
      const double q_dot =
          update.dc.x() * std::cos(t) + update.dc.y() * std::sin(t) +
          update.delta_r(s) * std::cos(t - s);
      acc += std::exp(-iu * kappa * phase_arg) * q_dot * phi[j];
    }
    out[i] = pref * acc;
  }
  return out;
}

namespace detail {

/// Columns of the linearized far-field system for one wavenumber and density,
/// ordered (dc1, dc2, alpha_0..alpha_M, beta_1..beta_M).
inline Eigen::MatrixXcd frechet_columns(const StarCurve& curve,
                                        const Eigen::VectorXcd& phi, double kappa,
                                        int M, const Eigen::VectorXd& directions) {
  const int n = static_cast<int>(phi.size()) / 2;
  const int cols = 2 * M + 3;
  const Complex pref = -iu * kappa * gamma_factor(kappa) * pi / static_cast<double>(n);
  const Vec2 c = curve.center();
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(directions.size(), cols);
  for (int i = 0; i < directions.size(); ++i) {
    const double t = directions[i];
    const double ct = std::cos(t), st = std::sin(t);
    for (int j = 0; j < 2 * n; ++j) {
      const double s = pi * j / n;
      const double r = curve.radius(s)[0];
      const Complex e =
          pref * std::exp(-iu * kappa * (c.x() * ct + c.y() * st + r * std::cos(t - s))) *
          phi[j];
      const double cts = std::cos(t - s);
      B(i, 0) += e * ct;
      B(i, 1) += e * st;
      for (int m = 0; m <= M; ++m) B(i, 2 + m) += e * cts * std::cos(m * s);
      for (int m = 1; m <= M; ++m) B(i, 2 + M + m) += e * cts * std::sin(m * s);
    }
  }
  return B;
}

}  // namespace detail

struct LinearizedSystem {
  Eigen::MatrixXcd B;  // N x (2M+3); real-valued (stored complex) for phaseless
  Eigen::VectorXcd w;  // residual
};

/// Linearized phased data equation at the current iterate.
inline LinearizedSystem phased_jacobian(const StarCurve& curve,
                                        const BoundaryDensities& densities,
                                        const ElasticMedium& medium,
                                        const ModeFlags& mode, int M,
                                        const FarField& data) {
  LinearizedSystem sys;
  const Eigen::VectorXd& dirs = data.directions;
  sys.B = Eigen::MatrixXcd::Zero(dirs.size(), 2 * M + 3);
  if (mode.a_p)
    sys.B += static_cast<double>(mode.a_p) *
             detail::frechet_columns(curve, densities.phi1, medium.kappa_p, M, dirs);
  if (mode.a_s)
    sys.B += static_cast<double>(mode.a_s) *
             detail::frechet_columns(curve, densities.phi2, medium.kappa_s, M, dirs);
  const FarField model = far_field(densities, medium, static_cast<int>(dirs.size()) / 2);
  sys.w = static_cast<double>(mode.a_p) * (data.phi_inf - model.phi_inf) +
          static_cast<double>(mode.a_s) * (data.psi_inf - model.psi_inf);
  return sys;
}

/// Linearized phaseless data equation; the derivative is taken with respect to
/// the obstacle boundary only, the ball is known and fixed.
inline LinearizedSystem phaseless_jacobian(const StarCurve& curve,
                                           const TwoDomainSolution& densities,
                                           const ElasticMedium& medium,
                                           const ModeFlags& mode, int M,
                                           const PhaselessData& data) {
  LinearizedSystem sys;
  const Eigen::VectorXd& dirs = data.directions;
  const int N = static_cast<int>(dirs.size());
  const FarField model = far_field(densities, medium, N / 2);
  sys.B = Eigen::MatrixXcd::Zero(N, 2 * M + 3);
  if (mode.a_p) {
    const Eigen::MatrixXcd Bp = detail::frechet_columns(
        curve, densities.obstacle.phi1, medium.kappa_p, M, dirs);
    for (int i = 0; i < N; ++i)
      for (int c = 0; c < sys.B.cols(); ++c)
        sys.B(i, c) += mode.a_p * 2.0 * std::real(std::conj(model.phi_inf[i]) * Bp(i, c));
  }
  if (mode.a_s) {
    const Eigen::MatrixXcd Bs = detail::frechet_columns(
        curve, densities.obstacle.phi2, medium.kappa_s, M, dirs);
    for (int i = 0; i < N; ++i)
      for (int c = 0; c < sys.B.cols(); ++c)
        sys.B(i, c) += mode.a_s * 2.0 * std::real(std::conj(model.psi_inf[i]) * Bs(i, c));
  }
  Eigen::VectorXd w =
      static_cast<double>(mode.a_p) * (data.phi_sq - model.phi_inf.cwiseAbs2()) +
      static_cast<double>(mode.a_s) * (data.psi_sq - model.psi_inf.cwiseAbs2());
  sys.w = w.cast<Complex>();
  return sys;
}

// ---------------------------------------------------------------------------
// Tikhonov update, schedules, stopping criteria.
// ---------------------------------------------------------------------------

/// H2-penalty weight matrix diag{1, 1, 2 pi, pi (1+m^2)^2 ...} (or identity).
inline Eigen::VectorXd penalty_diagonal(int M, bool h2 = true) {
  Eigen::VectorXd d = Eigen::VectorXd::Ones(2 * M + 3);
  if (!h2) return d;
  d[2] = 2.0 * pi;
  for (int m = 1; m <= M; ++m) {
    const double w = pi * (1.0 + m * m) * (1.0 + m * m);
    d[2 + m] = w;
    d[2 + M + m] = w;
  }
  return d;
}

/// Solves (lambda I~ + Re(B* B)) xi = Re(B* w) and unpacks the coefficients.
inline ShapeUpdate tikhonov_update(const Eigen::MatrixXcd& B, const Eigen::VectorXcd& w,
                                   double lambda, int M, bool h2_penalty = true) {
  if (!(lambda > 0.0)) throw std::invalid_argument("tikhonov_update: lambda must be > 0");
  const Eigen::MatrixXd N = (B.adjoint() * B).real();
  const Eigen::VectorXd rhs = (B.adjoint() * w).real();
  Eigen::MatrixXd A = N;
  A.diagonal() += lambda * penalty_diagonal(M, h2_penalty);
  const Eigen::VectorXd xi = A.ldlt().solve(rhs);
  ShapeUpdate u = ShapeUpdate::zero(M);
  u.dc = Vec2(xi[0], xi[1]);
  u.dalpha = xi.segment(2, M + 1);
  u.dbeta = xi.segment(M + 3, M);
  return u;
}

/// lambda_k: discrete L2 norm of the phased residual at the previous iterate.
inline double lambda_schedule(double previous_residual_norm) {
  if (!(previous_residual_norm > 0.0))
    throw std::runtime_error("lambda_schedule: zero residual, iteration should have stopped");
  return previous_residual_norm;
}

inline double stopping_error_phased(const FarField& data, const FarField& model,
                                    const ModeFlags& mode) {
  const Eigen::VectorXcd num =
      static_cast<double>(mode.a_p) * (data.phi_inf - model.phi_inf) +
      static_cast<double>(mode.a_s) * (data.psi_inf - model.psi_inf);
  const Eigen::VectorXcd den = static_cast<double>(mode.a_p) * data.phi_inf +
                               static_cast<double>(mode.a_s) * data.psi_inf;
  const double d = direction_norm(den);
  if (d == 0.0) throw std::domain_error("stopping_error_phased: zero data");
  return direction_norm(num) / d;
}

inline double stopping_error_phaseless(const PhaselessData& data, const FarField& model,
                                       const ModeFlags& mode) {
  const Eigen::VectorXd num =
      static_cast<double>(mode.a_p) * (data.phi_sq - model.phi_inf.cwiseAbs2()) +
      static_cast<double>(mode.a_s) * (data.psi_sq - model.psi_inf.cwiseAbs2());
  const Eigen::VectorXd den = static_cast<double>(mode.a_p) * data.phi_sq +
                              static_cast<double>(mode.a_s) * data.psi_sq;
  const double d = direction_norm(den);
  if (d == 0.0) throw std::domain_error("stopping_error_phaseless: zero data");
  return direction_norm(num) / d;
}

// ---------------------------------------------------------------------------
// Full reconstruction loops.
// ---------------------------------------------------------------------------

namespace detail {

/// One rho-halving retry on a rejected (nonpositive-radius) step, then abort.
inline StarCurve guarded_update(const StarCurve& curve, const ShapeUpdate& u, double rho) {
  try {
    return apply_update(curve, u, rho);
  } catch (const std::domain_error&) {
    try {
      return apply_update(curve, u, 0.5 * rho);
    } catch (const std::domain_error&) {
      throw std::runtime_error(
          "rejected-step: update drives the radius nonpositive even at rho/2");
    }
  }
}

}  // namespace detail

/// Algorithm for the phased problem: regularized Newton-type iteration on the
/// field/data equation system.
inline IterationTrace run_algorithm_I(const ReconstructionConfig& config,
                                      const ElasticMedium& medium,
                                      const IncidentWave& wave, const FarField& data,
                                      const StarCurve& initial,
                                      const ParametricCurve* exact = nullptr) {
  config.validate();
  IterationTrace trace;
  StarCurve curve = initial;
  const int n_bar = static_cast<int>(data.directions.size()) / 2;
  for (int k = 0; k <= config.max_iters; ++k) {
    const BoundaryDensities dens = solve_single(curve, medium, wave, config.n);
    const FarField model = far_field(dens, medium, n_bar);
    IterationRecord rec{curve, 0.0, -1.0, 0.0};
    rec.E = stopping_error_phased(data, model, config.mode);
    if (exact) rec.Err = curve_l2_error(curve, *exact);
    const Eigen::VectorXcd residual =
        static_cast<double>(config.mode.a_p) * (data.phi_inf - model.phi_inf) +
        static_cast<double>(config.mode.a_s) * (data.psi_inf - model.psi_inf);
    rec.lambda = direction_norm(residual);
    trace.records.push_back(rec);
    if (rec.E < config.epsilon) {
      trace.converged = true;
      break;
    }
    if (k == config.max_iters) break;
    const LinearizedSystem sys =
        phased_jacobian(curve, dens, medium, config.mode, config.M, data);
    const double lambda = lambda_schedule(rec.lambda);
    const ShapeUpdate xi =
        tikhonov_update(sys.B, sys.w, lambda, config.M, config.h2_penalty);
    curve = detail::guarded_update(curve, xi, config.rho);
  }
  return trace;
}

/// Algorithm for the phaseless problem: same loop with the two-domain forward
/// solve and the modulus-squared data equation; the reference ball is fixed.
inline IterationTrace run_algorithm_II(const ReconstructionConfig& config,
                                       const ElasticMedium& medium,
                                       const IncidentWave& wave,
                                       const PhaselessData& data,
                                       const StarCurve& initial,
                                       const ParametricCurve* exact = nullptr) {
  config.validate();
  if (!config.reference_ball)
    throw std::invalid_argument(
        "run_algorithm_II: a reference ball is required; phaseless far-field data "
        "is translation invariant without it");
  const CircleBoundary& ball = *config.reference_ball;
  IterationTrace trace;
  StarCurve curve = initial;
  const int n_bar = static_cast<int>(data.directions.size()) / 2;
  for (int k = 0; k <= config.max_iters; ++k) {
    const TwoDomainSolution dens = solve_two_domain(curve, ball, medium, wave, config.n);
    const FarField model = far_field(dens, medium, n_bar);
    IterationRecord rec{curve, 0.0, -1.0, 0.0};
    rec.E = stopping_error_phaseless(data, model, config.mode);
    if (exact) rec.Err = curve_l2_error(curve, *exact);
    const Eigen::VectorXd residual =
        static_cast<double>(config.mode.a_p) * (data.phi_sq - model.phi_inf.cwiseAbs2()) +
        static_cast<double>(config.mode.a_s) * (data.psi_sq - model.psi_inf.cwiseAbs2());
    rec.lambda = direction_norm(residual);
    trace.records.push_back(rec);
    if (rec.E < config.epsilon) {
      trace.converged = true;
      break;
    }
    if (k == config.max_iters) break;
    const LinearizedSystem sys =
        phaseless_jacobian(curve, dens, medium, config.mode, config.M, data);
    const double lambda = lambda_schedule(rec.lambda);
    const ShapeUpdate xi =
        tikhonov_update(sys.B, sys.w, lambda, config.M, config.h2_penalty);
    curve = detail::guarded_update(curve, xi, config.rho);
  }
  return trace;
}

}  // namespace escat
