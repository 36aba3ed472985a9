#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "hyperlorentz/flight.hpp"
#include "hyperlorentz/obstacles.hpp"
#include "hyperlorentz/stats.hpp"

namespace hl = hyperlorentz;
using hl::Direction;
using hl::Point;
using hl::State;

namespace {
constexpr double kPi = hl::kPi;
const State kStart{Point(0, 1), Direction(kPi / 2)};
}  // namespace

TEST(Deflection, QuantileEndpointsAndMedian) {
  EXPECT_NEAR(hl::deflection_quantile(0.5), kPi, 1e-15);
  EXPECT_EQ(hl::deflection_quantile(0.0), 0.0);
  EXPECT_NEAR(hl::deflection_quantile(1.0), 2 * kPi, 1e-15);
  for (double u : {0.1, 0.37, 0.9}) EXPECT_NEAR(hl::deflection_cdf(hl::deflection_quantile(u)), u, 1e-14);
}

TEST(Deflection, DensityIsSymmetricAndNormalized) {
  for (double b = 0.0; b <= 2 * kPi; b += 0.1)
    EXPECT_NEAR(hl::deflection_cdf(b) + hl::deflection_cdf(2 * kPi - b), 1.0, 1e-14);
  EXPECT_EQ(hl::deflection_cdf(-1.0), 0.0);
  EXPECT_EQ(hl::deflection_cdf(7.0), 1.0);
}

TEST(Deflection, SamplerMatchesTheLaw) {
  hl::Rng rng(201);
  std::vector<double> beta(1000000);
  for (double& b : beta) {
    b = hl::sample_deflection(rng);
    ASSERT_GE(b, 0.0);
    ASSERT_LE(b, 2 * kPi);
  }
  EXPECT_NEAR(hl::mean(beta), kPi, 0.003);
  std::sort(beta.begin(), beta.end());
  EXPECT_LT(hl::ks_statistic(beta, hl::deflection_cdf), 0.002);
}

TEST(FlightConfig, Validation) {
  EXPECT_THROW(hl::FlightConfig(0.0, 1.0), hl::config_error);
  EXPECT_THROW(hl::FlightConfig(1.0, -1.0), hl::config_error);
  EXPECT_NO_THROW(hl::FlightConfig(1.0, 1.0));
}

TEST(SimulateFlight, VanishingRateIsAPureGeodesic) {
  hl::Rng rng(202);
  int straight = 0;
  for (int i = 0; i < 1000; ++i) {
    const hl::Trajectory traj = hl::simulate_flight(kStart, hl::FlightConfig(1e-9, 5.0), rng);
    if (traj.events.empty()) {
      ++straight;
      EXPECT_NEAR(hl::flight_displacement(traj, 5.0), 5.0, 1e-9);
    }
  }
  EXPECT_EQ(straight, 1000);
}

TEST(SimulateFlight, EventCountsArePoisson) {
  hl::Rng rng(203);
  std::vector<double> counts(100000);
  for (double& c : counts) {
    const hl::Trajectory traj = hl::simulate_flight(kStart, hl::FlightConfig(2.0, 3.0), rng);
    c = static_cast<double>(traj.events.size());
    for (const hl::CollisionEvent& e : traj.events) ASSERT_EQ(e.obstacle_index, -1);
  }
  EXPECT_NEAR(hl::mean(counts), 6.0, 0.02 * 6.0);
  EXPECT_NEAR(hl::variance(counts), 6.0, 0.02 * 6.0);
}

TEST(SimulateFlight, EventsRotateByTheDrawnDeflection) {
  hl::Rng rng(204);
  const hl::Trajectory traj = hl::simulate_flight(kStart, hl::FlightConfig(3.0, 4.0), rng);
  ASSERT_FALSE(traj.events.empty());
  State cur = kStart;
  double prev = 0.0;
  for (const hl::CollisionEvent& e : traj.events) {
    const State at = hl::flow_state(cur, e.time - prev);
    EXPECT_NEAR(hl::hyp_distance(at.point, e.impact_point), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(hl::angle_difference(hl::rotate_direction(e.pre_dir, e.deflection).alpha(),
                                              e.post_dir.alpha())),
                0.0, 1e-12);
    cur = State{e.impact_point, e.post_dir};
    prev = e.time;
  }
}

TEST(SimulateFlight, RunawayCapIsARuntimeError) {
  hl::Rng rng(205);
  EXPECT_THROW(hl::simulate_flight(kStart, hl::FlightConfig(100.0, 10.0, 50), rng), hl::runtime_failure);
}

TEST(FlightDisplacement, BoundedByElapsedTime) {
  hl::Rng rng(206);
  for (int i = 0; i < 500; ++i) {
    const hl::Trajectory traj = hl::simulate_flight(kStart, hl::FlightConfig(1.5, 3.0), rng);
    for (double t : {0.0, 0.7, 1.9, 3.0}) {
      const double d = hl::flight_displacement(traj, t);
      EXPECT_GE(d, 0.0);
      EXPECT_LE(d, t + 1e-12);
    }
  }
  const hl::Trajectory traj = hl::simulate_flight(kStart, hl::FlightConfig(1.0, 1.0), rng);
  EXPECT_THROW(hl::flight_displacement(traj, 1.5), hl::contract_error);
}

TEST(FlightDisplacement, ReproducibleAcrossSeeds) {
  auto run = [](std::uint64_t seed) {
    std::vector<double> d(100000);
    for (std::size_t i = 0; i < d.size(); ++i) {
      hl::Rng rng = hl::make_stream(seed, i);
      d[i] = hl::flight_displacement(hl::simulate_flight(kStart, hl::FlightConfig(1.0, 2.0), rng), 2.0);
    }
    return d;
  };
  const auto a = run(1), b = run(2);
  const double se = std::hypot(hl::standard_error(a), hl::standard_error(b));
  EXPECT_LT(std::abs(hl::mean(a) - hl::mean(b)), 3 * se);
}

TEST(FlightDisplacement, LawIsInvariantUnderIsometries) {
  hl::Rng rng(207);
  const hl::MobiusMap m(0.6, 2.0, -0.3, 0.6666666666666666);
  const State moved = hl::mobius_transport(m, kStart);
  std::vector<double> a(20000), b(20000);
  for (double& d : a) d = hl::flight_displacement(hl::simulate_flight(kStart, hl::FlightConfig(1.0, 2.0), rng), 2.0);
  for (double& d : b) d = hl::flight_displacement(hl::simulate_flight(moved, hl::FlightConfig(1.0, 2.0), rng), 2.0);
  // the no-event atom sits at d = t; snap rounding noise so both samples share it
  for (auto* v : {&a, &b}) {
    for (double& d : *v) d = std::round(d * 1e9) * 1e-9;
    std::sort(v->begin(), v->end());
  }
  EXPECT_GT(hl::ks_pvalue(hl::ks_two_sample(a, b), 10000.0), 0.01);
}

TEST(SimulateFlight, GapsAndDeflectionsAreIndependent) {
  hl::Rng rng(208);
  std::vector<double> g1, g2, gap, beta;
  for (int i = 0; i < 100000; ++i) {
    const hl::Trajectory traj = hl::simulate_flight(kStart, hl::FlightConfig(2.0, 3.0), rng);
    double prev = 0.0;
    std::vector<double> gaps;
    for (const hl::CollisionEvent& e : traj.events) {
      gaps.push_back(e.time - prev);
      gap.push_back(e.time - prev);
      beta.push_back(e.deflection);
      prev = e.time;
    }
    for (std::size_t k = 0; k + 1 < gaps.size(); ++k) {
      g1.push_back(gaps[k]);
      g2.push_back(gaps[k + 1]);
    }
  }
  // consecutive gaps inside a finite window are slightly negatively associated
  // (they share the horizon), so compare against a deliberately small band
  EXPECT_LT(std::abs(hl::kendall_tau(g1, g2)), 0.05);
  EXPECT_LT(std::abs(hl::kendall_tau(gap, beta)), 4 * hl::kendall_tau_sd(gap.size()));
}
