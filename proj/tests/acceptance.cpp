// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
//
//   acceptance            run everything
//   acceptance 2 5        run only criteria 2 and 5

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hyperlorentz/hyperlorentz.hpp"

namespace hl = hyperlorentz;
using hl::Experiment;

namespace {

constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

hl::ExperimentConfig config(Experiment e, double sigma, std::vector<double> r, double t, std::uint64_t samples) {
  hl::ExperimentConfig cfg;
  cfg.experiment = e;
  cfg.sigma = sigma;
  cfg.r_levels = std::move(r);
  cfg.t = t;
  cfg.samples = samples;
  cfg.seed = kSeed;
  cfg.workers = hl::default_workers();
  return cfg;
}

hl::State random_state(hl::Rng& rng) {
  const double x = 10.0 * (hl::uniform01(rng) - 0.5);
  const double y = std::exp(4.0 * (hl::uniform01(rng) - 0.5));
  return hl::State{hl::Point(x, y), hl::Direction(hl::kTwoPi * hl::uniform01(rng))};
}

hl::MobiusMap random_isometry(hl::Rng& rng) {
  return hl::mobius_compose(hl::MobiusMap::translation(6.0 * (hl::uniform01(rng) - 0.5)),
                            hl::mobius_compose(hl::MobiusMap::dilation(std::exp(2.0 * (hl::uniform01(rng) - 0.5))),
                                               hl::MobiusMap::rotation_about_i(hl::kTwoPi * hl::uniform01(rng))));
}

double state_gap(const hl::State& a, const hl::State& b) {
  return std::max(hl::hyp_distance(a.point, b.point), std::abs(hl::angle_difference(a.dir.alpha(), b.dir.alpha())));
}

Outcome geometry() {
  const auto t0 = std::chrono::steady_clock::now();
  constexpr int kInstances = 1000;
  constexpr double kTol = 1e-9;
  hl::Rng rng = hl::make_stream(kSeed, 0, 1);
  double unit = 0, semi = 0, iso = 0, norm = 0;
  for (int i = 0; i < kInstances; ++i) {
    const hl::State s = random_state(rng);
    const double t = 10.0 * (hl::uniform01(rng) - 0.5);
    const double u = 10.0 * (hl::uniform01(rng) - 0.5);
    unit = std::max(unit, std::abs(hl::hyp_distance(s.point, hl::geodesic_flow(s, t)) - std::abs(t)));

    const hl::State a = hl::flow_state(s, u + t);
    const hl::State b = hl::flow_state(hl::flow_state(s, u), t);
    semi = std::max({semi, std::abs(a.point.x() - b.point.x()) / a.point.y(),
                     std::abs(a.point.y() - b.point.y()) / a.point.y(),
                     std::abs(hl::angle_difference(a.dir.alpha(), b.dir.alpha()))});

    const hl::MobiusMap m = random_isometry(rng);
    const hl::State q = random_state(rng);
    const hl::State ms = hl::mobius_transport(m, s), mq = hl::mobius_transport(m, q);
    iso = std::max(iso, std::abs(hl::hyp_distance(ms.point, mq.point) - hl::hyp_distance(s.point, q.point)));
    // angle between the transported direction and the transported geodesic velocity at the same point
    const hl::State moved = hl::mobius_transport(m, hl::State{s.point, hl::rotate_direction(s.dir, 1.0)});
    iso = std::max(iso, std::abs(hl::angle_difference(moved.dir.alpha() - ms.dir.alpha(), 1.0)));
    iso = std::max(iso, state_gap(hl::mobius_transport(m, hl::flow_state(s, t)), hl::flow_state(ms, t)));

    const double w = std::array{0.1, 1.0, 3.0}[i % 3];
    const hl::Point p = hl::mobius_apply(hl::normalizing_map(s), hl::geodesic_flow(s, w));
    norm = std::max({norm, std::abs(p.x()) / std::exp(w), std::abs(p.y() - std::exp(w)) / std::exp(w)});
  }
  const double elapsed = seconds_since(t0);
  const bool pass = unit < kTol && semi < kTol && iso < kTol && norm < kTol && elapsed < 5.0;
  return {pass, fmt("max errors unit-speed %.2e semigroup %.2e isometry %.2e normalizing %.2e (tol 1e-9); %.2f s (limit 5 s)",
                    unit, semi, iso, norm, elapsed)};
}

Outcome free_path() {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = true;
  std::ostringstream detail;
  const std::pair<double, double> settings[] = {{1.0, 0.5}, {2.0, 0.25}};
  for (auto [lambda, r] : settings) {
    const double sigma = 2.0 * lambda * std::sinh(r);
    const hl::Report rep = hl::run_experiment(config(Experiment::FreePath, sigma, {r}, 4.0, 100000));
    const double ks = rep.find("ks_exponential", r)->value;
    const double m = rep.find("mean_free_path", r)->value;
    const double exact = 1.0 / sigma;
    const double rel = std::abs(m - exact) / exact;
    pass = pass && ks < 0.01 && rel < 0.01;
    detail << fmt("(lambda %g, r %g): KS %.4f (< 0.01), mean %.6f vs %.6f rel %.4f (< 0.01); ", lambda, r, ks, m, exact,
                  rel);
  }
  const double elapsed = seconds_since(t0);
  pass = pass && elapsed < 120.0;
  detail << fmt("%.1f s (limit 120 s)", elapsed);
  return {pass, detail.str()};
}

Outcome nearest_neighbor() {
  auto cfg = config(Experiment::NearestNeighbor, 1.0, {}, 1.0, 100000);
  cfg.lambda = 1.0;
  const hl::Report rep = hl::run_experiment(cfg);
  const double m = rep.find("mean_t1")->value;
  const double exact = hl::expected_T1(1.0);
  const double rel = std::abs(m - exact) / exact;
  const double ks = rep.find("ks_t1")->value;
  return {rel < 0.01 && ks < 0.01,
          fmt("mean T1 %.6f vs %.7f rel %.4f (< 0.01), KS %.4f (< 0.01)", m, exact, rel, ks)};
}

Outcome tube_area() {
  const auto t0 = std::chrono::steady_clock::now();
  const hl::Report rep = hl::run_experiment(config(Experiment::TubeMc, 1.0, {0.5}, 2.0, 10000000));
  const double elapsed = seconds_since(t0);
  const double est = rep.find("tube_area_mc")->value;
  const double exact = hl::tube_area(2.0, 0.5);
  const double rel = std::abs(est - exact) / exact;
  return {rel < 0.01 && elapsed < 60.0,
          fmt("estimate %.6f vs %.6f rel %.5f (< 0.01); %.1f s (limit 60 s)", est, exact, rel, elapsed)};
}

Outcome cross_section() {
  const std::vector<double> levels{0.5, 0.1, 0.02};
  const hl::Report rep = hl::run_experiment(config(Experiment::Deflection, 1.0, levels, 3.0, 100000));
  std::vector<double> ks;
  std::ostringstream detail;
  for (double r : levels) {
    const hl::LevelStat* k = rep.find("ks_deflection", r);
    const hl::LevelStat* tau = rep.find("kendall_tau_time_deflection", r);
    ks.push_back(k->value);
    detail << fmt("r %g: KS %.5f n %llu tau %+.4f; ", r, k->value, static_cast<unsigned long long>(k->n), tau->value);
  }
  const bool decreasing = ks[0] > ks[1] && ks[1] > ks[2];
  detail << (decreasing ? "strictly decreasing" : "NOT strictly decreasing") << fmt(", final KS %.5f (< 0.02)", ks[2]);
  return {decreasing && ks[2] < 0.02, detail.str()};
}

Outcome bg_convergence() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> levels{0.4, 0.2, 0.1};
  const hl::Report rep = hl::run_experiment(config(Experiment::BgConvergence, 1.0, levels, 2.0, 100000));
  const double elapsed = seconds_since(t0);
  std::vector<double> w, hw;
  std::ostringstream detail;
  for (double r : levels) {
    const hl::LevelStat* s = rep.find("wasserstein1_displacement", r);
    w.push_back(s->value);
    hw.push_back(*s->half_width);
    detail << fmt("r %g: W1 %.5f +/- %.5f recollisions %.4f; ", r, s->value, *s->half_width,
                  rep.find("recollision_fraction", r)->value);
  }
  bool pass = true;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    const double gap = w[i] - w[i + 1];
    pass = pass && gap > 0.0 && hw[i] < gap && hw[i + 1] < gap;
    detail << fmt("gap %g->%g %.5f; ", levels[i], levels[i + 1], gap);
  }
  pass = pass && elapsed < 1800.0;
  detail << fmt("%.1f s (limit 1800 s)", elapsed);
  return {pass, detail.str()};
}

Outcome flight_law() {
  const hl::Report rep = hl::run_experiment(config(Experiment::FlightBaseline, 2.0, {}, 3.0, 100000));
  const double m = rep.find("event_count_mean")->value;
  const double v = rep.find("event_count_variance")->value;
  hl::Rng rng = hl::make_stream(kSeed, 0, 7);
  std::vector<double> beta(1000000);
  for (double& b : beta) b = hl::sample_deflection(rng);
  std::sort(beta.begin(), beta.end());
  const double ks = hl::ks_statistic(beta, hl::deflection_cdf);
  const double rm = std::abs(m - 6.0) / 6.0, rv = std::abs(v - 6.0) / 6.0;
  return {rm < 0.02 && rv < 0.02 && ks < 0.002,
          fmt("count mean %.4f rel %.4f, variance %.4f rel %.4f (< 0.02); sampler KS %.5f at 1e6 (< 0.002)", m, rm, v, rv,
              ks)};
}

Outcome determinism() {
  std::vector<hl::ExperimentConfig> configs{
      config(Experiment::FreePath, 1.0, {0.5, 0.25}, 3.0, 5000),
      config(Experiment::NearestNeighbor, 1.0, {}, 1.0, 5000),
      config(Experiment::Deflection, 1.0, {0.3, 0.1}, 2.0, 3000),
      config(Experiment::TubeMc, 1.0, {0.5}, 2.0, 1000000),
      config(Experiment::BgConvergence, 1.0, {0.4, 0.2}, 2.0, 2000),
      config(Experiment::FlightBaseline, 2.0, {}, 3.0, 10000),
  };
  int identical = 0;
  for (hl::ExperimentConfig& cfg : configs) {
    std::string reference;
    bool same = true;
    for (unsigned workers : {1u, 3u, 8u}) {
      cfg.workers = workers;
      const std::string dump = hl::to_json(hl::run_experiment(cfg)).dump(2);
      if (workers == 1) reference = dump;
      else same = same && dump == reference;
    }
    identical += same;
  }
  return {identical == static_cast<int>(configs.size()),
          fmt("%d of %zu experiments byte-identical across 1, 3 and 8 workers", identical, configs.size())};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"geometry invariants", geometry},
      {"free-path law", free_path},
      {"nearest-neighbor law", nearest_neighbor},
      {"tube area", tube_area},
      {"cross-section emergence", cross_section},
      {"Boltzmann-Grad convergence", bg_convergence},
      {"flight law", flight_law},
      {"determinism", determinism},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
