#pragma once
/**
 * @file hypgeo.hpp
 * @brief Exact geometry of the Poincare upper half-plane.
 *
 * Points live in {y > 0} with metric (dx^2 + dy^2) / y^2. Directions are
 * stored as an angle alpha in [0, 2pi) measured counterclockwise from the
 * positive x-axis; since the model is conformal the angle is the same for a
 * Euclidean and a hyperbolic observer.
 *
 * Everything here is a value type or a pure function.
 */

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <utility>

#include "hyperlorentz/errors.hpp"

namespace hyperlorentz {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wrap an angle into [0, 2pi).
inline double wrap_angle(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  // fmod of a value just below a multiple of 2pi can round up to 2pi.
  if (w >= kTwoPi) w = 0.0;
  return w;
}

class Point {
 public:
  Point(double x, double y) : x_(x), y_(y) {
    if (!std::isfinite(x) || !std::isfinite(y) || !(y > 0.0)) {
      std::ostringstream os;
      os << "Point must be finite with y > 0, got (" << x << ", " << y << ")";
      throw contract_error(os.str());
    }
  }

  double x() const { return x_; }
  double y() const { return y_; }
  std::complex<double> as_complex() const { return {x_, y_}; }

  friend bool operator==(const Point&, const Point&) = default;

 private:
  double x_;
  double y_;
};

class Direction {
 public:
  Direction() = default;
  explicit Direction(double alpha) : alpha_(wrap_angle(alpha)) {
    if (!std::isfinite(alpha)) throw contract_error("Direction angle must be finite");
  }

  /// Direction of a (not necessarily unit) Euclidean vector.
  static Direction from_vector(double vx, double vy) { return Direction(std::atan2(vy, vx)); }

  double alpha() const { return alpha_; }
  double cos() const { return std::cos(alpha_); }
  double sin() const { return std::sin(alpha_); }

  friend bool operator==(const Direction&, const Direction&) = default;

 private:
  double alpha_ = 0.0;
};

struct State {
  Point point;
  Direction dir;
};

/// Rotate a direction counterclockwise by beta.
inline Direction rotate_direction(Direction d, double beta) { return Direction(d.alpha() + beta); }

/// Smallest signed difference b - a of two angles, in (-pi, pi].
inline double angle_difference(double a, double b) {
  double d = wrap_angle(b - a);
  return d > kPi ? d - kTwoPi : d;
}

// ---------------------------------------------------------------------------
// Metric quantities

/// Hyperbolic cosine of the distance between two points; always >= 1.
inline double cosh_distance(const Point& p, const Point& q) {
  const double dx = p.x() - q.x();
  const double dy = p.y() - q.y();
  // 1 + |p - q|^2 / (2 y1 y2) is the same quantity as
  // ((x1-x2)^2 + y1^2 + y2^2) / (2 y1 y2) without the cancellation near p = q.
  return 1.0 + (dx * dx + dy * dy) / (2.0 * p.y() * q.y());
}

/// sinh(d/2) = |p - q| / (2 sqrt(y1 y2)), which keeps full relative accuracy
/// for nearly coincident points where arccosh(1 + tiny) would round to 0.
inline double hyp_distance(const Point& p, const Point& q) {
  const double chord = std::hypot(p.x() - q.x(), p.y() - q.y());
  return 2.0 * std::asinh(chord / (2.0 * std::sqrt(p.y() * q.y())));
}

/// Area of a hyperbolic disk of radius eta.
inline double ball_area(double eta) {
  if (!(eta >= 0.0)) throw contract_error("ball_area: radius must be >= 0");
  const double s = std::sinh(0.5 * eta);
  return 4.0 * kPi * s * s;
}

struct EuclideanCircle {
  double cx;
  double cy;
  double radius;
};

struct HypCircle {
  HypCircle(Point c, double r) : center(c), radius(r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw contract_error("HypCircle radius must be > 0");
  }
  Point center;
  double radius;
};

/// Euclidean center and radius of the circle of hyperbolic radius eta about c.
inline EuclideanCircle circle_to_euclidean(const Point& c, double eta) {
  return {c.x(), c.y() * std::cosh(eta), c.y() * std::sinh(eta)};
}

inline EuclideanCircle circle_to_euclidean(const HypCircle& c) {
  return circle_to_euclidean(c.center, c.radius);
}

// ---------------------------------------------------------------------------
// Geodesic flow

/// Position after moving a hyperbolic distance t (unit speed) from s.
inline Point geodesic_flow(const State& s, double t) {
  const double ch = std::cosh(t);
  const double sh = std::sinh(t);
  const double ca = s.dir.cos();
  const double sa = s.dir.sin();
  // cosh t - sin(alpha) sinh t >= e^{-|t|} > 0
  const double den = ch - sa * sh;
  return Point(s.point.x() + s.point.y() * sh * ca / den, s.point.y() / den);
}

/// Position and transported direction after time t.
inline State flow_state(const State& s, double t) {
  const double ch = std::cosh(t);
  const double sh = std::sinh(t);
  const double ca = s.dir.cos();
  const double sa = s.dir.sin();
  const double den = ch - sa * sh;
  Point p(s.point.x() + s.point.y() * sh * ca / den, s.point.y() / den);
  return State{p, Direction::from_vector(ca, -sh + sa * ch)};
}

// ---------------------------------------------------------------------------
// Mobius isometries z -> (az + b) / (cz + d), ad - bc = 1

class MobiusMap {
 public:
  MobiusMap() = default;

  /// Coefficients are rescaled to unit determinant; the determinant must be positive.
  MobiusMap(double a, double b, double c, double d) {
    const double det = a * d - b * c;
    if (!(det > 0.0) || !std::isfinite(det))
      throw contract_error("MobiusMap requires a positive finite determinant");
    const double k = 1.0 / std::sqrt(det);
    a_ = a * k;
    b_ = b * k;
    c_ = c * k;
    d_ = d * k;
  }

  static MobiusMap identity() { return {}; }
  static MobiusMap translation(double b) { return {1.0, b, 0.0, 1.0}; }
  static MobiusMap dilation(double k) { return {std::sqrt(k), 0.0, 0.0, 1.0 / std::sqrt(k)}; }
  /// Elliptic map fixing i, rotating tangent vectors there by theta.
  static MobiusMap rotation_about_i(double theta) {
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    return {c, s, -s, c};
  }

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double d() const { return d_; }
  double determinant() const { return a_ * d_ - b_ * c_; }

 private:
  double a_ = 1.0;
  double b_ = 0.0;
  double c_ = 0.0;
  double d_ = 1.0;
};

inline std::complex<double> mobius_apply(const MobiusMap& m, std::complex<double> z) {
  return (m.a() * z + m.b()) / (m.c() * z + m.d());
}

inline Point mobius_apply(const MobiusMap& m, const Point& p) {
  const std::complex<double> w = mobius_apply(m, p.as_complex());
  return Point(w.real(), w.imag());
}

/// Image of a state: the point is mapped and the direction is rotated by
/// arg f'(z) = arg 1/(cz + d)^2 = -2 arg(cz + d).
inline State mobius_transport(const MobiusMap& m, const State& s) {
  const std::complex<double> z = s.point.as_complex();
  const std::complex<double> den = m.c() * z + m.d();
  const std::complex<double> w = (m.a() * z + m.b()) / den;
  return State{Point(w.real(), w.imag()), rotate_direction(s.dir, -2.0 * std::arg(den))};
}

/// m1 after m2.
inline MobiusMap mobius_compose(const MobiusMap& m1, const MobiusMap& m2) {
  return {m1.a() * m2.a() + m1.b() * m2.c(), m1.a() * m2.b() + m1.b() * m2.d(),
          m1.c() * m2.a() + m1.d() * m2.c(), m1.c() * m2.b() + m1.d() * m2.d()};
}

inline MobiusMap mobius_inverse(const MobiusMap& m) { return {m.d(), -m.b(), -m.c(), m.a()}; }

/// The isometry sending s.point to i and the geodesic through s onto the
/// upward imaginary axis, so that geodesic_flow(s, u) maps to (0, e^u).
/// Built as rotation(pi/2 - alpha) o dilation(1/y0) o translation(-x0).
inline MobiusMap normalizing_map(const State& s) {
  const MobiusMap to_i =
      mobius_compose(MobiusMap::dilation(1.0 / s.point.y()), MobiusMap::translation(-s.point.x()));
  return mobius_compose(MobiusMap::rotation_about_i(0.5 * kPi - s.dir.alpha()), to_i);
}

// ---------------------------------------------------------------------------
// Disk model export

struct DiskPoint {
  double u;
  double v;
};

/// Cayley transform w = (iz + 1) / (z + i) onto the unit disk; i goes to 0.
inline DiskPoint cayley(const Point& p) {
  const std::complex<double> z = p.as_complex();
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> w = (i * z + 1.0) / (z + i);
  return {w.real(), w.imag()};
}

}  // namespace hyperlorentz
