#pragma once
/**
 * @file obstacles.hpp
 * @brief Homogeneous Poisson fields on the half-plane.
 *
 * Uniform sampling is with respect to the hyperbolic area dx dy / y^2. Points
 * are drawn in geodesic polar coordinates about a region center: the angle
 * is uniform and the radial distance follows
 *
 *   F(eta) = (sinh^2(eta/2) - sinh^2(e/2)) / (sinh^2(R/2) - sinh^2(e/2))
 *
 * on an annulus e < eta <= R, which inverts in closed form. Conditioning a
 * field on an empty ball of radius e is the same as sampling only the annulus.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hyperlorentz/errors.hpp"
#include "hyperlorentz/hypgeo.hpp"
#include "hyperlorentz/random.hpp"

namespace hyperlorentz {

inline constexpr double kDefaultMaxExpectedCount = 1e8;

/// Annulus exclusion < d(p, center) <= outer.
struct Region {
  Point center;
  double outer;
  double exclusion = 0.0;

  double area() const { return ball_area(outer) - ball_area(exclusion); }
  bool contains(const Point& p) const {
    const double d = hyp_distance(p, center);
    return d > exclusion && d <= outer;
  }
};

struct ObstacleField {
  std::vector<Point> centers;
  double radius;     // common hyperbolic radius of the obstacles
  double intensity;  // points per unit hyperbolic area
  Region region;
};

/// Radial distance for the u-quantile of the area-uniform law on the annulus.
inline double annulus_radial_quantile(double u, double outer, double exclusion = 0.0) {
  const double si = std::sinh(0.5 * exclusion);
  const double so = std::sinh(0.5 * outer);
  const double lo = si * si;
  const double s2 = lo + u * (so * so - lo);
  return std::min(outer, 2.0 * std::asinh(std::sqrt(s2)));
}

inline Point sample_uniform_in_annulus(const Point& center, double outer, double exclusion, Rng& rng) {
  const double eta = annulus_radial_quantile(uniform01(rng), outer, exclusion);
  const double phi = kTwoPi * uniform01(rng);
  return geodesic_flow(State{center, Direction(phi)}, eta);
}

inline Point sample_uniform_in_ball(const Point& center, double outer, Rng& rng) {
  if (!(outer > 0.0)) throw contract_error("sample_uniform_in_ball: radius must be > 0");
  return sample_uniform_in_annulus(center, outer, 0.0, rng);
}

/// Poisson field of intensity lambda on the region, carrying obstacles of
/// hyperbolic radius obstacle_radius.
inline ObstacleField sample_field(double lambda, double obstacle_radius, const Region& region, Rng& rng,
                                  double max_expected_count = kDefaultMaxExpectedCount) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw config_error("sample_field: intensity must be > 0");
  if (!(obstacle_radius > 0.0)) throw config_error("sample_field: obstacle radius must be > 0");
  if (!(region.exclusion >= 0.0) || !(region.outer > region.exclusion))
    throw config_error("sample_field: need outer radius > exclusion radius >= 0");

  const double mean = lambda * region.area();
  if (!(mean <= max_expected_count))
    throw config_error("sample_field: expected obstacle count " + std::to_string(mean) + " exceeds cap " +
                       std::to_string(max_expected_count));

  const auto n = std::poisson_distribution<std::int64_t>(mean)(rng);
  ObstacleField field{{}, obstacle_radius, lambda, region};
  field.centers.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i)
    field.centers.push_back(sample_uniform_in_annulus(region.center, region.outer, region.exclusion, rng));
  return field;
}

/// Number of centers within hyperbolic distance eta of q.
inline std::size_t count_in_ball(std::span<const Point> centers, const Point& q, double eta) {
  const double bound = std::cosh(eta);
  return static_cast<std::size_t>(
      std::count_if(centers.begin(), centers.end(), [&](const Point& c) { return cosh_distance(c, q) <= bound; }));
}

/// Distance from q to the nearest center; +inf for an empty list.
inline double nearest_distance(std::span<const Point> centers, const Point& q) {
  double best = std::numeric_limits<double>::infinity();
  for (const Point& c : centers) best = std::min(best, cosh_distance(c, q));
  return std::isinf(best) ? best : std::acosh(std::max(1.0, best));
}

// ---------------------------------------------------------------------------
// Nearest-neighbour laws

/// Pr(T_k > eta) for the distance T_k to the k-th nearest point.
inline double nearest_neighbor_tail(double eta, double lambda, int k) {
  if (!(eta >= 0.0) || !(lambda > 0.0) || k < 1) throw contract_error("nearest_neighbor_tail: bad arguments");
  const double mu = lambda * ball_area(eta);
  double term = std::exp(-mu);
  double sum = term;
  for (int j = 1; j < k; ++j) {
    term *= mu / j;
    sum += term;
  }
  return std::min(1.0, sum);
}

/// E[T_1] = e^{2 pi lambda} K_0(2 pi lambda), evaluated as
/// integral_0^inf exp(-2 pi lambda (cosh t - 1)) dt so nothing overflows.
inline double expected_T1(double lambda) {
  if (!(lambda > 0.0)) throw contract_error("expected_T1: intensity must be > 0");
  const double z = kTwoPi * lambda;
  auto integrand = [z](double t) {
    // cosh t - 1 = 2 sinh^2(t/2), exact for small t
    const double s = std::sinh(0.5 * t);
    return std::exp(-2.0 * z * s * s);
  };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-12);
}

// ---------------------------------------------------------------------------
// Shot noise

struct PotentialProfile {
  double support_radius;
  std::function<double(double)> phi;

  double operator()(double eta) const { return eta > support_radius ? 0.0 : phi(eta); }

  /// phi(eta) = max(0, 1 - eta / support)
  static PotentialProfile tent(double support) {
    return {support, [support](double eta) { return std::max(0.0, 1.0 - eta / support); }};
  }
};

/// V(q) = sum_j phi(d(p_j, q)) over points within the profile support.
inline double shot_noise(std::span<const Point> points, const PotentialProfile& profile, const Point& q) {
  const double bound = std::cosh(profile.support_radius);
  double v = 0.0;
  for (const Point& p : points) {
    const double ch = cosh_distance(p, q);
    if (ch <= bound) v += profile(std::acosh(std::max(1.0, ch)));
  }
  return v;
}

}  // namespace hyperlorentz
