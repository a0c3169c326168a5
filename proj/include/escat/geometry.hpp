#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "escat/medium.hpp"

namespace escat {

/// Differential-geometric data of a boundary curve at one parameter value.
/// n is the (non-unit) outward normal for counterclockwise parametrization,
/// n_perp the tangent; both have length G = |p'|.
struct CurveFrame {
  Vec2 p;
  Vec2 dp;
  Vec2 ddp;
  Vec2 n;       // (p2', -p1')
  Vec2 n_perp;  // (p1', p2')
  double G;
};

class ParametricCurve {
 public:
  virtual ~ParametricCurve() = default;
  virtual CurveFrame frame(double t) const = 0;
  Vec2 point(double t) const { return frame(t).p; }
};

/// Curves of the form p(t) = c + r(t)(cos t, sin t). Subclasses supply
/// (r, r', r'') analytically; the frame is assembled without numerical
/// differentiation.
class RadialCurve : public ParametricCurve {
 public:
  virtual std::array<double, 3> radius(double t) const = 0;
  virtual Vec2 center() const = 0;

  CurveFrame frame(double t) const override {
    const auto [r, dr, ddr] = radius(t);
    const double ct = std::cos(t), st = std::sin(t);
    CurveFrame f;
    f.p = center() + r * Vec2(ct, st);
    f.dp = dr * Vec2(ct, st) + r * Vec2(-st, ct);
    f.ddp = (ddr - r) * Vec2(ct, st) + 2.0 * dr * Vec2(-st, ct);
    f.n = Vec2(f.dp.y(), -f.dp.x());
    f.n_perp = f.dp;
    f.G = f.dp.norm();
    return f;
  }
};

struct ShapeUpdate;

/// Star-shaped boundary with trigonometric radial expansion
/// r(t) = sum alpha_m cos(mt) + sum beta_m sin(mt) around center c.
class StarCurve : public RadialCurve {
 public:
  StarCurve(const Vec2& c, Eigen::VectorXd alpha, Eigen::VectorXd beta)
      : c_(c), alpha_(std::move(alpha)), beta_(std::move(beta)) {
    if (alpha_.size() != beta_.size() + 1)
      throw std::invalid_argument("StarCurve: alpha must have beta.size()+1 entries");
    check_positive_radius();
  }

  /// Circle of radius r0 represented in the truncation-M coefficient space.
  static StarCurve circle(const Vec2& c, double r0, int M) {
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(M + 1);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(M);
    alpha[0] = r0;
    return StarCurve(c, alpha, beta);
  }

  std::array<double, 3> radius(double t) const override {
    double r = alpha_[0], dr = 0.0, ddr = 0.0;
    for (int m = 1; m < alpha_.size(); ++m) {
      const double cmt = std::cos(m * t), smt = std::sin(m * t);
      r += alpha_[m] * cmt + beta_[m - 1] * smt;
      dr += m * (-alpha_[m] * smt + beta_[m - 1] * cmt);
      ddr += -m * m * (alpha_[m] * cmt + beta_[m - 1] * smt);
    }
    return {r, dr, ddr};
  }

  Vec2 center() const override { return c_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  const Eigen::VectorXd& beta() const { return beta_; }
  int truncation() const { return static_cast<int>(beta_.size()); }

 private:
  void check_positive_radius() const {
    const int samples = std::max<int>(256, 16 * static_cast<int>(alpha_.size()));
    for (int j = 0; j < samples; ++j) {
      const double t = 2.0 * pi * j / samples;
      if (radius(t)[0] <= 0.0)
        throw std::domain_error("nonpositive-radius: star curve radius <= 0 at t=" +
                                std::to_string(t));
    }
  }

  Vec2 c_;
  Eigen::VectorXd alpha_;
  Eigen::VectorXd beta_;
};

/// Rigid reference ball boundary: p(t) = b + R(cos t, sin t), Jacobian R.
class CircleBoundary : public RadialCurve {
 public:
  CircleBoundary(const Vec2& b, double R) : b_(b), R_(R) {
    if (R <= 0.0) throw std::invalid_argument("CircleBoundary: R must be positive");
  }

  std::array<double, 3> radius(double) const override { return {R_, 0.0, 0.0}; }
  Vec2 center() const override { return b_; }
  double R() const { return R_; }

 private:
  Vec2 b_;
  double R_;
};

/// Exact apple-shaped sampler. Kept as an analytic sampler, deliberately not
/// projected onto the trigonometric coefficient space used for reconstruction.
class AppleShape : public RadialCurve {
 public:
  explicit AppleShape(const Vec2& offset = Vec2::Zero()) : offset_(offset) {}

  std::array<double, 3> radius(double t) const override {
    const double u = 0.55 * (1.0 + 0.9 * std::cos(t) + 0.1 * std::sin(2.0 * t));
    const double du = 0.55 * (-0.9 * std::sin(t) + 0.2 * std::cos(2.0 * t));
    const double ddu = 0.55 * (-0.9 * std::cos(t) - 0.4 * std::sin(2.0 * t));
    const double v = 1.0 + 0.75 * std::cos(t);
    const double dv = -0.75 * std::sin(t);
    const double ddv = -0.75 * std::cos(t);
    const double r = u / v;
    const double dr = (du * v - u * dv) / (v * v);
    const double ddr = (ddu - 2.0 * dr * dv - r * ddv) / v;
    return {r, dr, ddr};
  }

  Vec2 center() const override { return offset_; }

 private:
  Vec2 offset_;
};

/// Exact peanut-shaped sampler: r(t) = 0.5 sqrt(0.25 cos^2 t + sin^2 t).
class PeanutShape : public RadialCurve {
 public:
  explicit PeanutShape(const Vec2& offset = Vec2::Zero()) : offset_(offset) {}

  std::array<double, 3> radius(double t) const override {
    const double q = 0.625 - 0.375 * std::cos(2.0 * t);
    const double dq = 0.75 * std::sin(2.0 * t);
    const double ddq = 1.5 * std::cos(2.0 * t);
    const double sq = std::sqrt(q);
    const double r = 0.5 * sq;
    const double dr = 0.25 * dq / sq;
    const double ddr = 0.25 * (ddq / sq - 0.5 * dq * dq / (q * sq));
    return {r, dr, ddr};
  }

  Vec2 center() const override { return offset_; }

 private:
  Vec2 offset_;
};

enum class BuiltinShape { apple, peanut };

inline std::unique_ptr<RadialCurve> builtin_shape(BuiltinShape name,
                                                  const Vec2& offset = Vec2::Zero()) {
  switch (name) {
    case BuiltinShape::apple:
      return std::make_unique<AppleShape>(offset);
    case BuiltinShape::peanut:
      return std::make_unique<PeanutShape>(offset);
  }
  throw std::invalid_argument("unknown builtin shape");
}

/// Boundary update q(t) = dc + dr(t)(cos t, sin t) with dr a trigonometric
/// polynomial of the same truncation as the curve it updates.
struct ShapeUpdate {
  Vec2 dc = Vec2::Zero();
  Eigen::VectorXd dalpha;  // M+1 entries
  Eigen::VectorXd dbeta;   // M entries

  static ShapeUpdate zero(int M) {
    ShapeUpdate u;
    u.dalpha = Eigen::VectorXd::Zero(M + 1);
    u.dbeta = Eigen::VectorXd::Zero(M);
    return u;
  }

  double delta_r(double t) const {
    double dr = dalpha[0];
    for (int m = 1; m < dalpha.size(); ++m)
      dr += dalpha[m] * std::cos(m * t) + dbeta[m - 1] * std::sin(m * t);
    return dr;
  }
};

inline StarCurve apply_update(const StarCurve& curve, const ShapeUpdate& update,
                              double scale) {
  if (update.dalpha.size() != curve.alpha().size() ||
      update.dbeta.size() != curve.beta().size())
    throw std::invalid_argument("apply_update: truncation mismatch");
  return StarCurve(curve.center() + scale * update.dc,
                   curve.alpha() + scale * update.dalpha,
                   curve.beta() + scale * update.dbeta);
}

/// Relative L2 distance between two curves compared at equal parameter values
/// on a fixed fine grid.
inline double curve_l2_error(const ParametricCurve& reconstructed,
                             const ParametricCurve& exact, int grid = 1024) {
  double num = 0.0, den = 0.0;
  for (int j = 0; j < grid; ++j) {
    const double t = 2.0 * pi * j / grid;
    const Vec2 pr = reconstructed.point(t);
    const Vec2 pe = exact.point(t);
    num += (pr - pe).squaredNorm();
    den += pe.squaredNorm();
  }
  return std::sqrt(num / den);
}

}  // namespace escat
