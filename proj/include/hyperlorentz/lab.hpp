#pragma once
/**
 * @file lab.hpp
 * @brief Monte Carlo experiments, reports and trajectory export.
 *
 * Every replica draws from its own stream derived from (seed, level, replica
 * index), and results are stored by replica index before any reduction. A
 * report therefore does not depend on the number of workers.
 *
 * Output files in the output directory:
 *   report.json             {experiment, params, levels[], seed, elapsed_s}
 *   <experiment>_samples.csv  raw per-replica values (columns per experiment)
 */

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "hyperlorentz/billiard.hpp"
#include "hyperlorentz/errors.hpp"
#include "hyperlorentz/flight.hpp"
#include "hyperlorentz/hypgeo.hpp"
#include "hyperlorentz/obstacles.hpp"
#include "hyperlorentz/random.hpp"
#include "hyperlorentz/stats.hpp"

namespace hyperlorentz {

enum class Experiment { FreePath, NearestNeighbor, Deflection, TubeMc, BgConvergence, FlightBaseline };

inline std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::FreePath: return "free-path";
    case Experiment::NearestNeighbor: return "nearest-neighbor";
    case Experiment::Deflection: return "deflection";
    case Experiment::TubeMc: return "tube-mc";
    case Experiment::BgConvergence: return "bg-convergence";
    case Experiment::FlightBaseline: return "flight-baseline";
  }
  return "unknown";
}

inline Experiment parse_experiment(const std::string& name) {
  for (Experiment e : {Experiment::FreePath, Experiment::NearestNeighbor, Experiment::Deflection, Experiment::TubeMc,
                       Experiment::BgConvergence, Experiment::FlightBaseline})
    if (to_string(e) == name) return e;
  throw config_error("unknown experiment '" + name + "'");
}

inline bool uses_r_levels(Experiment e) {
  return e == Experiment::FreePath || e == Experiment::Deflection || e == Experiment::TubeMc ||
         e == Experiment::BgConvergence;
}

/// Obstacle intensity at collision rate sigma: lambda = sigma / (2 sinh r).
inline double intensity_for(double sigma, double r) { return sigma / (2.0 * std::sinh(r)); }

/// Worker count from HYPERLORENTZ_WORKERS, else the hardware concurrency.
inline unsigned default_workers() {
  if (const char* env = std::getenv("HYPERLORENTZ_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

struct ExperimentConfig {
  Experiment experiment = Experiment::FreePath;
  double sigma = 1.0;
  std::vector<double> r_levels;
  double t = 2.0;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::filesystem::path output_dir;
  double lambda = 1.0;                // nearest-neighbor only; billiard runs derive lambda from sigma
  std::size_t bootstrap_replicates = 200;  // bg-convergence
  bool record_time = false;
  bool quenched = false;  // one field shared by all replicas of a level

  void validate() const {
    if (samples < 1) throw config_error("samples must be >= 1");
    if (workers < 1) throw config_error("workers must be >= 1");
    if (!(t > 0.0) || !std::isfinite(t)) throw config_error("t must be > 0");
    if (experiment != Experiment::NearestNeighbor && experiment != Experiment::TubeMc &&
        (!(sigma > 0.0) || !std::isfinite(sigma)))
      throw config_error("sigma must be > 0");
    if (experiment == Experiment::NearestNeighbor && !(lambda > 0.0)) throw config_error("lambda must be > 0");
    if (uses_r_levels(experiment)) {
      if (r_levels.empty()) throw config_error(to_string(experiment) + " needs at least one r level");
      for (double r : r_levels)
        if (!(r > 0.0) || !std::isfinite(r)) throw config_error("r levels must be > 0");
    }
    if (experiment == Experiment::BgConvergence) {
      for (std::size_t i = 1; i < r_levels.size(); ++i)
        if (!(r_levels[i] < r_levels[i - 1])) throw config_error("bg-convergence r levels must be strictly decreasing");
      if (bootstrap_replicates < 2) throw config_error("bootstrap replicates must be >= 2");
    }
  }
};

/// One statistic at one parameter level.
struct LevelStat {
  std::optional<double> r;
  std::optional<double> lambda;
  std::string stat_name;
  double value;
  std::optional<double> half_width;  // 95% half-width when available
  std::uint64_t n;
};

struct Report {
  std::string experiment;
  nlohmann::ordered_json params;
  std::vector<LevelStat> levels;
  std::uint64_t seed = 0;
  std::optional<double> elapsed_s;

  /// First statistic with the given name at level r (or any level when r is absent).
  const LevelStat* find(const std::string& name, std::optional<double> r = std::nullopt) const {
    for (const LevelStat& l : levels)
      if (l.stat_name == name && (!r || (l.r && *l.r == *r))) return &l;
    return nullptr;
  }
};

inline nlohmann::ordered_json to_json(const Report& rep) {
  nlohmann::ordered_json j;
  j["experiment"] = rep.experiment;
  j["params"] = rep.params;
  j["levels"] = nlohmann::ordered_json::array();
  for (const LevelStat& l : rep.levels) {
    nlohmann::ordered_json e;
    e["r"] = l.r ? nlohmann::ordered_json(*l.r) : nlohmann::ordered_json(nullptr);
    e["lambda"] = l.lambda ? nlohmann::ordered_json(*l.lambda) : nlohmann::ordered_json(nullptr);
    e["stat_name"] = l.stat_name;
    e["value"] = l.value;
    e["half_width"] = l.half_width ? nlohmann::ordered_json(*l.half_width) : nlohmann::ordered_json(nullptr);
    e["n"] = l.n;
    e["seed"] = rep.seed;
    j["levels"].push_back(std::move(e));
  }
  j["seed"] = rep.seed;
  j["elapsed_s"] = rep.elapsed_s ? nlohmann::ordered_json(*rep.elapsed_s) : nlohmann::ordered_json(nullptr);
  return j;
}

// ---------------------------------------------------------------------------
// Deterministic replica-parallel map

/// results[i] = fn(i) for i in [0, n), computed by `workers` threads.
template <class T, class Fn>
std::vector<T> parallel_map(std::uint64_t n, unsigned workers, Fn&& fn) {
  std::vector<T> results(n);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  constexpr std::uint64_t kChunk = 256;
  auto work = [&] {
    try {
      for (std::uint64_t begin; (begin = next.fetch_add(kChunk)) < n;) {
        const std::uint64_t end = std::min(n, begin + kChunk);
        for (std::uint64_t i = begin; i < end; ++i) results[i] = fn(i);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(n);
    }
  };
  const unsigned count = static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, workers), (n + kChunk - 1) / kChunk));
  if (count <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(count);
    for (unsigned w = 0; w < count; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

// ---------------------------------------------------------------------------
// Sampling routines shared by the experiments and the acceptance suite

inline const Point kOrigin{0.0, 1.0};

/// Start state with a uniformly random direction at i.
inline State random_start(Rng& rng) { return State{kOrigin, Direction(kTwoPi * uniform01(rng))}; }

/// Calls fn with the field seen by a particle starting at s0: `shared` when
/// given (quenched), otherwise a fresh draw (annealed).
template <class Fn>
auto with_field(const State& s0, double lambda, double r, double horizon, Rng& rng, const ObstacleField* shared,
                Fn&& fn) {
  if (shared) return fn(*shared);
  return fn(sample_field(lambda, r, billiard_region(s0.point, horizon, r), rng));
}

/// Free path of a particle at i.
inline FreePath sample_free_path(double lambda, double r, double horizon, Rng& rng,
                                 const ObstacleField* shared = nullptr) {
  const State s0 = random_start(rng);
  return with_field(s0, lambda, r, horizon, rng, shared,
                    [&](const ObstacleField& f) { return free_path(s0, f, horizon); });
}

/// First collision, if it happens before the horizon.
inline std::optional<CollisionEvent> sample_first_collision(double lambda, double r, double horizon, Rng& rng,
                                                            const ObstacleField* shared = nullptr) {
  const State s0 = random_start(rng);
  return with_field(s0, lambda, r, horizon, rng, shared,
                    [&](const ObstacleField& f) { return first_collision(s0, f, horizon); });
}

/// Billiard trajectory from i.
inline Trajectory sample_lorentz(double lambda, double r, double horizon, Rng& rng,
                                 const ObstacleField* shared = nullptr) {
  const State s0 = random_start(rng);
  return with_field(s0, lambda, r, horizon, rng, shared,
                    [&](const ObstacleField& f) { return simulate(s0, f, horizon); });
}

inline Trajectory sample_flight(double sigma, double horizon, Rng& rng) {
  const State s0 = random_start(rng);
  return simulate_flight(s0, FlightConfig(sigma, horizon), rng);
}

/// Radius beyond which the nearest point lies with probability below e^-28.
inline double nearest_neighbor_region(double lambda) {
  return 2.0 * std::asinh(std::sqrt(28.0 / (4.0 * kPi * lambda)));
}

/// Distance from i to the nearest point of a Poisson field of intensity lambda.
inline double sample_nearest_distance(double lambda, Rng& rng) {
  const Region region{kOrigin, nearest_neighbor_region(lambda), 0.0};
  const ObstacleField field = sample_field(lambda, 1.0, region, rng);
  const double d = nearest_distance(field.centers, kOrigin);
  return std::isinf(d) ? region.outer : d;
}

/// Hits out of `draws` uniform points in the ball enclosing the tube of
/// radius r around (0, e^s), 0 <= s <= t.
inline std::uint64_t tube_hits(double t, double r, std::uint64_t draws, Rng& rng) {
  const Point mid(0.0, std::exp(0.5 * t));
  const double outer = 0.5 * t + r;
  std::uint64_t hits = 0;
  for (std::uint64_t k = 0; k < draws; ++k)
    if (distance_to_vertical_segment(sample_uniform_in_ball(mid, outer, rng), t) < r) ++hits;
  return hits;
}

inline double tube_enclosing_area(double t, double r) { return ball_area(0.5 * t + r); }

// ---------------------------------------------------------------------------
// Experiments

namespace detail {

constexpr double kZ95 = 1.959963984540054;

/// Stream family for a (experiment, level) pair.
inline std::uint64_t family(Experiment e, std::size_t level) {
  return (static_cast<std::uint64_t>(e) + 1) * 1000003ULL + level;
}

/// The shared field of a quenched level, or nothing for annealed runs.
inline std::optional<ObstacleField> shared_field(const ExperimentConfig& cfg, double lambda, double r,
                                                 std::size_t level) {
  if (!cfg.quenched) return std::nullopt;
  Rng rng = make_stream(cfg.seed, 0, family(cfg.experiment, level) ^ 0x9e11dULL);
  return sample_field(lambda, r, billiard_region(kOrigin, cfg.t, r), rng);
}

inline const ObstacleField* ptr(const std::optional<ObstacleField>& f) { return f ? &*f : nullptr; }

struct CsvWriter {
  explicit CsvWriter(const std::filesystem::path& path) : out(path) {
    if (!out) throw runtime_failure("cannot open " + path.string() + " for writing");
    out << std::setprecision(17);
  }
  std::ofstream out;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw runtime_failure("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw runtime_failure("failed writing " + path.string());
}

inline Report run_free_path(const ExperimentConfig& cfg, const std::filesystem::path& csv) {
  Report rep;
  CsvWriter w(csv);
  w.out << "r,lambda,replica,time,censored\n";
  for (std::size_t li = 0; li < cfg.r_levels.size(); ++li) {
    const double r = cfg.r_levels[li];
    const double lambda = intensity_for(cfg.sigma, r);
    const auto shared = shared_field(cfg, lambda, r, li);
    const auto paths = parallel_map<FreePath>(cfg.samples, cfg.workers, [&](std::uint64_t i) {
      Rng rng = make_stream(cfg.seed, i, family(cfg.experiment, li));
      return sample_free_path(lambda, r, cfg.t, rng, ptr(shared));
    });
    std::vector<double> observed;
    double exposure = 0.0;
    for (std::uint64_t i = 0; i < paths.size(); ++i) {
      exposure += paths[i].time;
      if (!paths[i].censored) observed.push_back(paths[i].time);
      w.out << r << ',' << lambda << ',' << i << ',' << paths[i].time << ',' << (paths[i].censored ? 1 : 0) << '\n';
    }
    std::sort(observed.begin(), observed.end());
    const double rate = 2.0 * lambda * std::sinh(r);
    const double ks = ks_statistic_censored(observed, paths.size(), cfg.t,
                                            [rate](double x) { return 1.0 - std::exp(-rate * x); });
    const auto k = static_cast<double>(observed.size());
    // censored-exponential MLE of the mean: exposure / number of collisions
    const double mle = k > 0 ? exposure / k : std::numeric_limits<double>::infinity();
    rep.levels.push_back({r, lambda, "ks_exponential", ks, std::nullopt, cfg.samples});
    rep.levels.push_back({r, lambda, "mean_free_path", mle, k > 0 ? std::optional(kZ95 * mle / std::sqrt(k)) : std::nullopt,
                          cfg.samples});
    rep.levels.push_back({r, lambda, "mean_free_path_exact", 1.0 / rate, std::nullopt, cfg.samples});
    rep.levels.push_back({r, lambda, "censored_fraction", 1.0 - k / static_cast<double>(paths.size()), std::nullopt,
                          cfg.samples});
  }
  return rep;
}

inline Report run_nearest_neighbor(const ExperimentConfig& cfg, const std::filesystem::path& csv) {
  Report rep;
  const auto dists = parallel_map<double>(cfg.samples, cfg.workers, [&](std::uint64_t i) {
    Rng rng = make_stream(cfg.seed, i, family(cfg.experiment, 0));
    return sample_nearest_distance(cfg.lambda, rng);
  });
  CsvWriter w(csv);
  w.out << "replica,t1\n";
  for (std::uint64_t i = 0; i < dists.size(); ++i) w.out << i << ',' << dists[i] << '\n';
  const std::vector<double> sorted = sorted_copy(dists);
  const double ks =
      ks_statistic(sorted, [&](double eta) { return 1.0 - nearest_neighbor_tail(eta, cfg.lambda, 1); });
  const double m = mean(dists);
  const double hw = cfg.samples > 1 ? kZ95 * standard_error(dists) : 0.0;
  rep.levels.push_back({std::nullopt, cfg.lambda, "mean_t1", m, hw, cfg.samples});
  rep.levels.push_back({std::nullopt, cfg.lambda, "mean_t1_exact", expected_T1(cfg.lambda), std::nullopt, cfg.samples});
  rep.levels.push_back({std::nullopt, cfg.lambda, "ks_t1", ks, std::nullopt, cfg.samples});
  return rep;
}

inline Report run_deflection(const ExperimentConfig& cfg, const std::filesystem::path& csv) {
  Report rep;
  CsvWriter w(csv);
  w.out << "r,lambda,replica,tau,beta\n";
  for (std::size_t li = 0; li < cfg.r_levels.size(); ++li) {
    const double r = cfg.r_levels[li];
    const double lambda = intensity_for(cfg.sigma, r);
    const auto shared = shared_field(cfg, lambda, r, li);
    const auto events = parallel_map<std::optional<CollisionEvent>>(cfg.samples, cfg.workers, [&](std::uint64_t i) {
      Rng rng = make_stream(cfg.seed, i, family(cfg.experiment, li));
      return sample_first_collision(lambda, r, cfg.t, rng, ptr(shared));
    });
    std::vector<double> taus, betas;
    for (std::uint64_t i = 0; i < events.size(); ++i) {
      if (!events[i]) continue;
      taus.push_back(events[i]->time);
      betas.push_back(events[i]->deflection);
      w.out << r << ',' << lambda << ',' << i << ',' << events[i]->time << ',' << events[i]->deflection << '\n';
    }
    const auto n = static_cast<std::uint64_t>(betas.size());
    if (n == 0) throw runtime_failure("deflection: no collisions observed at r = " + std::to_string(r));
    const double ks = ks_statistic(sorted_copy(betas), deflection_cdf);
    rep.levels.push_back({r, lambda, "ks_deflection", ks, std::nullopt, n});
    if (n >= 2) {
      rep.levels.push_back({r, lambda, "kendall_tau_time_deflection", kendall_tau(taus, betas),
                            kZ95 * kendall_tau_sd(n), n});
    }
  }
  return rep;
}

inline Report run_tube_mc(const ExperimentConfig& cfg, const std::filesystem::path& csv) {
  Report rep;
  CsvWriter w(csv);
  w.out << "r,t,draws,hits,estimate,exact\n";
  constexpr std::uint64_t kBlock = 1 << 16;
  for (std::size_t li = 0; li < cfg.r_levels.size(); ++li) {
    const double r = cfg.r_levels[li];
    const std::uint64_t blocks = (cfg.samples + kBlock - 1) / kBlock;
    const auto hits = parallel_map<std::uint64_t>(blocks, cfg.workers, [&](std::uint64_t b) {
      Rng rng = make_stream(cfg.seed, b, family(cfg.experiment, li));
      const std::uint64_t draws = std::min(kBlock, cfg.samples - b * kBlock);
      return tube_hits(cfg.t, r, draws, rng);
    });
    std::uint64_t total = 0;
    for (std::uint64_t h : hits) total += h;
    const double n = static_cast<double>(cfg.samples);
    const double p = static_cast<double>(total) / n;
    const double enclosing = tube_enclosing_area(cfg.t, r);
    const double estimate = p * enclosing;
    const double hw = kZ95 * enclosing * std::sqrt(p * (1.0 - p) / n);
    const double exact = tube_area(cfg.t, r);
    w.out << r << ',' << cfg.t << ',' << cfg.samples << ',' << total << ',' << estimate << ',' << exact << '\n';
    rep.levels.push_back({r, std::nullopt, "tube_area_mc", estimate, hw, cfg.samples});
    rep.levels.push_back({r, std::nullopt, "tube_area_exact", exact, std::nullopt, cfg.samples});
  }
  return rep;
}

inline Report run_bg_convergence(const ExperimentConfig& cfg, const std::filesystem::path& csv) {
  Report rep;
  const auto flight = parallel_map<double>(cfg.samples, cfg.workers, [&](std::uint64_t i) {
    Rng rng = make_stream(cfg.seed, i, family(Experiment::FlightBaseline, 999));
    return flight_displacement(sample_flight(cfg.sigma, cfg.t, rng), cfg.t);
  });
  CsvWriter w(csv);
  w.out << "r,lambda,replica,displacement,recollisions\n";
  for (std::uint64_t i = 0; i < flight.size(); ++i) w.out << "flight,," << i << ',' << flight[i] << ",0\n";
  rep.levels.push_back({std::nullopt, std::nullopt, "mean_displacement_flight", mean(flight),
                        cfg.samples > 1 ? std::optional(kZ95 * standard_error(flight)) : std::nullopt, cfg.samples});

  struct Sample {
    double displacement;
    std::size_t recollisions;
    std::size_t events;
  };
  for (std::size_t li = 0; li < cfg.r_levels.size(); ++li) {
    const double r = cfg.r_levels[li];
    const double lambda = intensity_for(cfg.sigma, r);
    const auto shared = shared_field(cfg, lambda, r, li);
    const auto runs = parallel_map<Sample>(cfg.samples, cfg.workers, [&](std::uint64_t i) {
      Rng rng = make_stream(cfg.seed, i, family(cfg.experiment, li));
      const Trajectory traj = sample_lorentz(lambda, r, cfg.t, rng, ptr(shared));
      return Sample{flight_displacement(traj, cfg.t), traj.recollisions, traj.events.size()};
    });
    std::vector<double> disp(runs.size());
    double recollisions = 0.0, events = 0.0;
    for (std::uint64_t i = 0; i < runs.size(); ++i) {
      disp[i] = runs[i].displacement;
      recollisions += static_cast<double>(runs[i].recollisions);
      events += static_cast<double>(runs[i].events);
      w.out << r << ',' << lambda << ',' << i << ',' << disp[i] << ',' << runs[i].recollisions << '\n';
    }
    const double w1 = wasserstein1(disp, flight);
    const double hw =
        bootstrap_w1_half_width(disp, flight, cfg.bootstrap_replicates, derive_seed(cfg.seed, li, 0xb5));
    rep.levels.push_back({r, lambda, "wasserstein1_displacement", w1, hw, cfg.samples});
    rep.levels.push_back({r, lambda, "mean_displacement_lorentz", mean(disp),
                          cfg.samples > 1 ? std::optional(kZ95 * standard_error(disp)) : std::nullopt, cfg.samples});
    rep.levels.push_back({r, lambda, "recollision_fraction", events > 0 ? recollisions / events : 0.0, std::nullopt,
                          cfg.samples});
  }
  return rep;
}

inline Report run_flight_baseline(const ExperimentConfig& cfg, const std::filesystem::path& csv) {
  Report rep;
  struct Sample {
    std::uint64_t count;
    std::vector<double> gaps;
    std::vector<double> betas;
  };
  const auto runs = parallel_map<Sample>(cfg.samples, cfg.workers, [&](std::uint64_t i) {
    Rng rng = make_stream(cfg.seed, i, family(cfg.experiment, 0));
    const Trajectory traj = sample_flight(cfg.sigma, cfg.t, rng);
    Sample s{traj.events.size(), {}, {}};
    double prev = 0.0;
    for (const CollisionEvent& e : traj.events) {
      s.gaps.push_back(e.time - prev);
      s.betas.push_back(e.deflection);
      prev = e.time;
    }
    return s;
  });
  CsvWriter w(csv);
  w.out << "replica,events\n";
  std::vector<double> counts(runs.size());
  std::vector<double> betas, gap_a, gap_b, tau_gap, tau_beta;
  for (std::uint64_t i = 0; i < runs.size(); ++i) {
    counts[i] = static_cast<double>(runs[i].count);
    w.out << i << ',' << runs[i].count << '\n';
    betas.insert(betas.end(), runs[i].betas.begin(), runs[i].betas.end());
    for (std::size_t k = 0; k + 1 < runs[i].gaps.size(); ++k) {
      gap_a.push_back(runs[i].gaps[k]);
      gap_b.push_back(runs[i].gaps[k + 1]);
    }
    for (std::size_t k = 0; k < runs[i].gaps.size(); ++k) {
      tau_gap.push_back(runs[i].gaps[k]);
      tau_beta.push_back(runs[i].betas[k]);
    }
  }
  const double expected = cfg.sigma * cfg.t;
  rep.levels.push_back({std::nullopt, std::nullopt, "event_count_mean", mean(counts),
                        cfg.samples > 1 ? std::optional(kZ95 * standard_error(counts)) : std::nullopt, cfg.samples});
  if (cfg.samples > 1)
    rep.levels.push_back({std::nullopt, std::nullopt, "event_count_variance", variance(counts), std::nullopt,
                          cfg.samples});
  rep.levels.push_back({std::nullopt, std::nullopt, "event_count_expected", expected, std::nullopt, cfg.samples});
  if (!betas.empty())
    rep.levels.push_back({std::nullopt, std::nullopt, "ks_deflection", ks_statistic(sorted_copy(betas), deflection_cdf),
                          std::nullopt, betas.size()});
  if (gap_a.size() >= 2)
    rep.levels.push_back({std::nullopt, std::nullopt, "kendall_tau_consecutive_gaps", kendall_tau(gap_a, gap_b),
                          kZ95 * kendall_tau_sd(gap_a.size()), gap_a.size()});
  if (tau_gap.size() >= 2)
    rep.levels.push_back({std::nullopt, std::nullopt, "kendall_tau_gap_deflection", kendall_tau(tau_gap, tau_beta),
                          kZ95 * kendall_tau_sd(tau_gap.size()), tau_gap.size()});
  return rep;
}

}  // namespace detail

/// Run one experiment and write report.json and the raw samples CSV into
/// cfg.output_dir (skipped when output_dir is empty).
inline Report run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto started = std::chrono::steady_clock::now();
  const bool write = !cfg.output_dir.empty();
  if (write) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec) throw runtime_failure("cannot create output directory " + cfg.output_dir.string() + ": " + ec.message());
  }
  const std::filesystem::path csv =
      write ? cfg.output_dir / (to_string(cfg.experiment) + "_samples.csv") : std::filesystem::path("/dev/null");

  Report rep;
  switch (cfg.experiment) {
    case Experiment::FreePath: rep = detail::run_free_path(cfg, csv); break;
    case Experiment::NearestNeighbor: rep = detail::run_nearest_neighbor(cfg, csv); break;
    case Experiment::Deflection: rep = detail::run_deflection(cfg, csv); break;
    case Experiment::TubeMc: rep = detail::run_tube_mc(cfg, csv); break;
    case Experiment::BgConvergence: rep = detail::run_bg_convergence(cfg, csv); break;
    case Experiment::FlightBaseline: rep = detail::run_flight_baseline(cfg, csv); break;
  }
  rep.experiment = to_string(cfg.experiment);
  rep.seed = cfg.seed;
  rep.params["sigma"] = cfg.sigma;
  rep.params["r_levels"] = cfg.r_levels;
  rep.params["t"] = cfg.t;
  rep.params["samples"] = cfg.samples;
  if (cfg.experiment == Experiment::NearestNeighbor) rep.params["lambda"] = cfg.lambda;
  if (cfg.experiment == Experiment::FreePath || cfg.experiment == Experiment::Deflection ||
      cfg.experiment == Experiment::BgConvergence)
    rep.params["environment"] = cfg.quenched ? "quenched" : "annealed";
  if (cfg.experiment == Experiment::BgConvergence) rep.params["bootstrap_replicates"] = cfg.bootstrap_replicates;
  if (cfg.record_time)
    rep.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  if (write) detail::write_text(cfg.output_dir / "report.json", to_json(rep).dump(2) + "\n");
  return rep;
}

// ---------------------------------------------------------------------------
// Trajectory export

enum class Model { HalfPlane, Disk };

inline Model parse_model(const std::string& name) {
  if (name == "halfplane") return Model::HalfPlane;
  if (name == "disk") return Model::Disk;
  throw config_error("unknown model '" + name + "' (expected halfplane or disk)");
}

/// Row values for a state in the chosen model. In the disk model the angle is
/// rotated by arg K'(z) = arg(-2 / (z + i)^2) of the Cayley map.
inline std::array<double, 3> model_coordinates(const State& s, Model model) {
  if (model == Model::HalfPlane) return {s.point.x(), s.point.y(), s.dir.alpha()};
  const DiskPoint w = cayley(s.point);
  const double turn = kPi - 2.0 * std::arg(s.point.as_complex() + std::complex<double>(0.0, 1.0));
  return {w.u, w.v, rotate_direction(s.dir, turn).alpha()};
}

/// CSV `t,x,y,alpha,event` on a uniform grid of `grid_points` intervals over
/// [0, horizon] merged with the exact event times (event = 1 on those rows).
inline std::string trajectory_csv(const Trajectory& traj, Model model, std::size_t grid_points = 200) {
  if (grid_points < 1) throw contract_error("trajectory_csv: need at least one grid interval");
  struct Row {
    double t;
    bool event;
  };
  std::vector<Row> rows;
  rows.reserve(grid_points + 1 + traj.events.size());
  for (std::size_t k = 0; k <= grid_points; ++k)
    rows.push_back({traj.horizon * static_cast<double>(k) / static_cast<double>(grid_points), false});
  for (const CollisionEvent& e : traj.events) rows.push_back({e.time, true});
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.t < b.t; });

  std::ostringstream out;
  out << std::setprecision(17) << "t,x,y,alpha,event\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    // a grid time that coincides with an event is written once, as the event
    if (i + 1 < rows.size() && rows[i + 1].t == rows[i].t && rows[i + 1].event && !rows[i].event) continue;
    const auto c = model_coordinates(position_at(traj, rows[i].t), model);
    out << rows[i].t << ',' << c[0] << ',' << c[1] << ',' << c[2] << ',' << (rows[i].event ? 1 : 0) << '\n';
  }
  return out.str();
}

inline void export_trajectory(const Trajectory& traj, Model model, const std::filesystem::path& dest,
                              std::size_t grid_points = 200) {
  detail::write_text(dest, trajectory_csv(traj, model, grid_points));
}

}  // namespace hyperlorentz
