#pragma once
/**
 * @file billiard.hpp
 * @brief Lorentz process: a point particle moving along geodesics among fixed
 * hyperbolic disks, reflecting specularly on contact.
 *
 * Collision solving is exact per obstacle. The particle state is first moved
 * to (i, pi/2) by normalizing_map, so its path becomes (0, e^u). An obstacle
 * whose center maps to (x, y) is touched when
 *
 *   (x^2 + w^2 + y^2) / (2 w y) = cosh r,   w = e^u,
 *
 * i.e. w^2 - 2 y cosh(r) w + x^2 + y^2 = 0, with discriminant
 * y^2 sinh^2 r - x^2 (up to a factor 4).
 *
 * Reflection uses the Euclidean realization of the obstacle: hyperbolic
 * circles are Euclidean circles and the model is conformal, so the mirror
 * across the Euclidean tangent is the hyperbolic specular reflection.
 */

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hyperlorentz/errors.hpp"
#include "hyperlorentz/hypgeo.hpp"
#include "hyperlorentz/obstacles.hpp"
#include "hyperlorentz/trajectory.hpp"

namespace hyperlorentz {

struct Obstacle {
  Obstacle(Point c, double r) : center(c), radius(r) {
    if (!(r > 0.0)) throw contract_error("Obstacle radius must be > 0");
  }
  Point center;
  double radius;
};

struct SimulateOptions {
  double grazing_tol = 1e-9;       // same-obstacle hits at or below this time after a reflection are dropped
  std::size_t max_events = 1'000'000;
};

inline constexpr double kStartClearance = 1e-9;
inline constexpr double kTangencyTol = 1e-12;

namespace detail {

/// Hit time for an obstacle whose center was already moved by the normalizing
/// map of the current state. Returns the smallest root u > min_time.
inline std::optional<double> normalized_hit_time(const Point& mapped_center, double cosh_r, double sinh_r,
                                                 double min_time) {
  const double x = mapped_center.x();
  const double y = mapped_center.y();
  const double disc = y * y * sinh_r * sinh_r - x * x;
  // tangency (and misses) are treated as no hit
  if (disc <= kTangencyTol * y * y) return std::nullopt;
  const double far = y * cosh_r + std::sqrt(disc);
  const double near = (x * x + y * y) / far;  // product of roots is x^2 + y^2
  const double u_near = std::log(near);
  if (u_near > min_time) return u_near;
  const double u_far = std::log(far);
  if (u_far > min_time) return u_far;
  return std::nullopt;
}

struct Hit {
  double time;
  std::size_t index;
};

/// Earliest collision strictly within `remaining` from `cur` among `centers`.
/// Obstacle `last` (the one just left) only counts beyond grazing_tol.
inline std::optional<Hit> next_hit(const State& cur, std::span<const Point> centers, double radius,
                                   double remaining, std::ptrdiff_t last, double grazing_tol) {
  const MobiusMap m = normalizing_map(cur);
  const double cosh_r = std::cosh(radius);
  const double sinh_r = std::sinh(radius);
  // Reachable within `remaining` only if d(cur, c) <= remaining + r.
  const double reach = std::cosh(remaining + radius);
  std::optional<Hit> best;
  double best_time = remaining;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    if (cosh_distance(cur.point, centers[i]) > reach) continue;
    const double min_time = static_cast<std::ptrdiff_t>(i) == last ? grazing_tol : 0.0;
    const auto t = normalized_hit_time(mobius_apply(m, centers[i]), cosh_r, sinh_r, min_time);
    if (t && *t < best_time) {
      best_time = *t;
      best = Hit{*t, i};
    }
  }
  return best;
}

inline Direction mirror(const Point& impact, Direction incoming, const Point& center, double radius) {
  const EuclideanCircle ec = circle_to_euclidean(center, radius);
  double nx = impact.x() - ec.cx;
  double ny = impact.y() - ec.cy;
  const double norm = std::hypot(nx, ny);
  nx /= norm;
  ny /= norm;
  const double vx = incoming.cos();
  const double vy = incoming.sin();
  const double dot = vx * nx + vy * ny;
  return Direction::from_vector(vx - 2.0 * dot * nx, vy - 2.0 * dot * ny);
}

inline void check_start(const State& s0, std::span<const Point> centers, double radius) {
  const double bound = std::cosh(radius + kStartClearance);
  for (const Point& c : centers)
    if (cosh_distance(s0.point, c) <= bound) throw contract_error("simulate: start point lies inside an obstacle");
}

inline void check_region(const State& s0, const ObstacleField& field, double t_max) {
  if (!(t_max > 0.0)) throw config_error("simulate: horizon must be > 0");
  const double needed = hyp_distance(s0.point, field.region.center) + t_max + field.radius;
  if (needed > field.region.outer * (1.0 + 1e-12) + 1e-12)
    throw config_error("simulate: field region radius " + std::to_string(field.region.outer) +
                       " is smaller than the reach " + std::to_string(needed) + " of the trajectory");
}

}  // namespace detail

/// Time at which the geodesic from s first touches the obstacle, if ever.
inline std::optional<double> first_hit(const State& s, const Obstacle& ob) {
  if (hyp_distance(s.point, ob.center) <= ob.radius + kStartClearance)
    throw contract_error("first_hit: state starts inside or on the obstacle");
  return detail::normalized_hit_time(mobius_apply(normalizing_map(s), ob.center), std::cosh(ob.radius),
                                     std::sinh(ob.radius), 0.0);
}

/// Specular reflection of `incoming` at a boundary point of the obstacle.
inline Direction reflect(const Point& impact, Direction incoming, const Obstacle& ob, double boundary_tol = 1e-8) {
  if (std::abs(hyp_distance(impact, ob.center) - ob.radius) > boundary_tol)
    throw contract_error("reflect: impact point is not on the obstacle boundary");
  return detail::mirror(impact, incoming, ob.center, ob.radius);
}

/// Event-driven billiard trajectory on [0, t_max].
inline Trajectory simulate(const State& s0, const ObstacleField& field, double t_max,
                           const SimulateOptions& opt = {}) {
  detail::check_region(s0, field, t_max);
  detail::check_start(s0, field.centers, field.radius);

  Trajectory traj{s0, t_max, {}, 0};
  std::vector<char> seen(field.centers.size(), 0);
  State cur = s0;
  double now = 0.0;
  std::ptrdiff_t last = -1;
  while (true) {
    const auto hit = detail::next_hit(cur, field.centers, field.radius, t_max - now, last, opt.grazing_tol);
    if (!hit) break;
    if (traj.events.size() >= opt.max_events)
      throw runtime_failure("simulate: more than " + std::to_string(opt.max_events) + " collisions");

    const State at = flow_state(cur, hit->time);
    const Point& center = field.centers[hit->index];
    const Direction out = detail::mirror(at.point, at.dir, center, field.radius);
    now += hit->time;
    traj.events.push_back(CollisionEvent{now, at.point, at.dir, out, wrap_angle(out.alpha() - at.dir.alpha()),
                                         static_cast<int>(hit->index)});
    if (seen[hit->index]) ++traj.recollisions;
    seen[hit->index] = 1;
    cur = State{at.point, out};
    last = static_cast<std::ptrdiff_t>(hit->index);
  }
  return traj;
}

/// The first collision before t_max, if any.
inline std::optional<CollisionEvent> first_collision(const State& s0, const ObstacleField& field, double t_max) {
  detail::check_region(s0, field, t_max);
  detail::check_start(s0, field.centers, field.radius);
  const auto hit = detail::next_hit(s0, field.centers, field.radius, t_max, -1, 0.0);
  if (!hit) return std::nullopt;
  const State at = flow_state(s0, hit->time);
  const Direction out = detail::mirror(at.point, at.dir, field.centers[hit->index], field.radius);
  return CollisionEvent{hit->time, at.point, at.dir, out, wrap_angle(out.alpha() - at.dir.alpha()),
                        static_cast<int>(hit->index)};
}

struct FreePath {
  double time;
  bool censored;
};

/// Time to the first collision, or (t_max, censored) when there is none.
inline FreePath free_path(const State& s0, const ObstacleField& field, double t_max) {
  detail::check_region(s0, field, t_max);
  detail::check_start(s0, field.centers, field.radius);
  const auto hit = detail::next_hit(s0, field.centers, field.radius, t_max, -1, 0.0);
  if (!hit) return {t_max, true};
  return {hit->time, false};
}

/// Hyperbolic distance from p to the geodesic segment {(0, e^s) : 0 <= s <= t}.
inline double distance_to_vertical_segment(const Point& p, double t) {
  // Geodesics orthogonal to the imaginary axis are circles about 0, so the
  // foot of the perpendicular from p is (0, |p|).
  const double s = 0.5 * std::log(p.x() * p.x() + p.y() * p.y());
  if (s < 0.0) return hyp_distance(p, Point(0.0, 1.0));
  if (s > t) return hyp_distance(p, Point(0.0, std::exp(t)));
  return std::asinh(std::abs(p.x()) / p.y());
}

/// Area of the set of points within r of a geodesic segment of length t.
inline double tube_area(double t, double r) {
  if (!(t >= 0.0) || !(r > 0.0)) throw contract_error("tube_area: need t >= 0 and r > 0");
  return ball_area(r) + 2.0 * t * std::sinh(r);
}

/// The standard annealed setup: a fresh field on the ball of radius t_max + r
/// about the start point, empty within r of the start.
inline Region billiard_region(const Point& start, double t_max, double r) {
  return Region{start, t_max + r, r};
}

}  // namespace hyperlorentz
