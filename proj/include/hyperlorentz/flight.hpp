#pragma once
/**
 * @file flight.hpp
 * @brief Markovian random flight on the half-plane: geodesic motion with
 * Exp(sigma) waiting times and i.i.d. deflections of density sin(beta/2)/4 on
 * [0, 2pi]. This is the small-obstacle limit of the billiard at fixed
 * sigma = 2 lambda sinh r.
 */

#include <cmath>
#include <cstddef>
#include <random>
#include <string>

#include "hyperlorentz/errors.hpp"
#include "hyperlorentz/hypgeo.hpp"
#include "hyperlorentz/random.hpp"
#include "hyperlorentz/trajectory.hpp"

namespace hyperlorentz {

struct FlightConfig {
  FlightConfig(double sigma_, double horizon_, std::size_t max_events_ = 1'000'000)
      : sigma(sigma_), horizon(horizon_), max_events(max_events_) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw config_error("FlightConfig: sigma must be > 0");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw config_error("FlightConfig: horizon must be > 0");
  }
  double sigma;
  double horizon;
  std::size_t max_events;
};

/// Inverse of the deflection CDF F(beta) = sin^2(beta / 4).
inline double deflection_quantile(double u) { return 4.0 * std::asin(std::sqrt(u)); }

/// CDF of the deflection law.
inline double deflection_cdf(double beta) {
  if (beta <= 0.0) return 0.0;
  if (beta >= kTwoPi) return 1.0;
  const double s = std::sin(0.25 * beta);
  return s * s;
}

inline double sample_deflection(Rng& rng) { return deflection_quantile(uniform01(rng)); }

inline Trajectory simulate_flight(const State& s0, const FlightConfig& cfg, Rng& rng) {
  std::exponential_distribution<double> wait(cfg.sigma);
  Trajectory traj{s0, cfg.horizon, {}, 0};
  State cur = s0;
  double now = 0.0;
  while (true) {
    const double gap = wait(rng);
    if (now + gap >= cfg.horizon) break;
    if (traj.events.size() >= cfg.max_events)
      throw runtime_failure("simulate_flight: more than " + std::to_string(cfg.max_events) + " events");
    const State at = flow_state(cur, gap);
    const double beta = sample_deflection(rng);
    const Direction out = rotate_direction(at.dir, beta);
    now += gap;
    traj.events.push_back(CollisionEvent{now, at.point, at.dir, out, wrap_angle(beta), -1});
    cur = State{at.point, out};
  }
  return traj;
}

/// Hyperbolic distance travelled from the start by time t.
inline double flight_displacement(const Trajectory& traj, double t) {
  return hyp_distance(traj.initial.point, position_at(traj, t).point);
}

}  // namespace hyperlorentz
