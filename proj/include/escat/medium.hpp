#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace escat {

using Complex = std::complex<double>;
using Vec2 = Eigen::Vector2d;
using CVec2 = Eigen::Vector2cd;

inline constexpr double pi = std::numbers::pi;
inline constexpr Complex iu{0.0, 1.0};

/// Homogeneous isotropic elastic background. Wavenumbers are derived once at
/// construction since every kernel evaluation needs them.
struct ElasticMedium {
  double lambda;
  double mu;
  double omega;
  double kappa_p;
  double kappa_s;

  ElasticMedium(double lambda_, double mu_, double omega_)
      : lambda(lambda_), mu(mu_), omega(omega_) {
    if (mu <= 0.0 || lambda + mu <= 0.0)
      throw std::invalid_argument("invalid-medium: require mu > 0 and lambda + mu > 0");
    if (omega <= 0.0)
      throw std::invalid_argument("invalid-medium: require omega > 0");
    kappa_p = omega / std::sqrt(lambda + 2.0 * mu);
    kappa_s = omega / std::sqrt(mu);
  }
};

enum class WaveKind { P, S };

/// Plane incident wave: d e^{i kp d.x} (compressional) or d_perp e^{i ks d.x}
/// (shear). The angle is normalized to [0, 2pi).
struct IncidentWave {
  WaveKind kind;
  double theta;
  Vec2 d;
  Vec2 d_perp;

  IncidentWave(WaveKind kind_, double theta_) : kind(kind_) {
    theta = std::fmod(theta_, 2.0 * pi);
    if (theta < 0.0) theta += 2.0 * pi;
    d = Vec2(std::cos(theta), std::sin(theta));
    d_perp = Vec2(-std::sin(theta), std::cos(theta));
  }
};

/// Selects which far-field component (compressional or shear) drives the data
/// equation: (a_p, a_s) is (1,0) or (0,1).
struct ModeFlags {
  int a_p = 1;
  int a_s = 0;

  ModeFlags() = default;
  ModeFlags(int ap, int as) : a_p(ap), a_s(as) {
    const bool ok = (a_p == 1 && a_s == 0) || (a_p == 0 && a_s == 1);
    if (!ok) throw std::invalid_argument("mode flags must be (1,0) or (0,1)");
  }
};

inline CVec2 incident_field(const IncidentWave& wave, const ElasticMedium& medium,
                            const Vec2& x) {
  if (wave.kind == WaveKind::P) {
    const Complex phase = std::exp(iu * medium.kappa_p * wave.d.dot(x));
    return CVec2(wave.d.x() * phase, wave.d.y() * phase);
  }
  const Complex phase = std::exp(iu * medium.kappa_s * wave.d.dot(x));
  return CVec2(wave.d_perp.x() * phase, wave.d_perp.y() * phase);
}

}  // namespace escat
