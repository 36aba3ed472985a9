// hyperlorentz: command-line front end for the experiments and trajectory export.
//
//   hyperlorentz <experiment> --sigma F --r F[,F...] --t F --samples N --seed N --workers N --out DIR
//   hyperlorentz export --model halfplane|disk --seed N --out FILE
//
// Exit codes: 0 success, 2 validation error, 3 runtime error.

#include <chrono>
#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hyperlorentz/hyperlorentz.hpp"

namespace hl = hyperlorentz;

namespace {

constexpr int kValidationError = 2;
constexpr int kRuntimeError = 3;

struct ExportOptions {
  std::string model = "halfplane";
  std::string process = "lorentz";
  double sigma = 1.0;
  double r = 0.1;
  double t = 5.0;
  std::uint64_t seed = 1;
  std::size_t grid = 200;
  std::string out;
};

int run_export(const ExportOptions& opt) {
  const hl::Model model = hl::parse_model(opt.model);
  if (!(opt.t > 0.0)) throw hl::config_error("t must be > 0");
  hl::Rng rng = hl::make_stream(opt.seed, 0, 0xe4);
  hl::Trajectory traj = [&] {
    if (opt.process == "lorentz") {
      if (!(opt.r > 0.0)) throw hl::config_error("r must be > 0");
      if (!(opt.sigma > 0.0)) throw hl::config_error("sigma must be > 0");
      return hl::sample_lorentz(hl::intensity_for(opt.sigma, opt.r), opt.r, opt.t, rng);
    }
    if (opt.process == "flight") return hl::sample_flight(opt.sigma, opt.t, rng);
    throw hl::config_error("unknown process '" + opt.process + "' (expected lorentz or flight)");
  }();
  hl::export_trajectory(traj, model, opt.out, opt.grid);
  std::cerr << "wrote " << opt.out << " (" << traj.events.size() << " events)\n";
  return 0;
}

int run(const hl::ExperimentConfig& cfg) {
  const auto started = std::chrono::steady_clock::now();
  const hl::Report rep = hl::run_experiment(cfg);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  for (const hl::LevelStat& l : rep.levels) {
    std::cout << rep.experiment;
    if (l.r) std::cout << " r=" << *l.r;
    std::cout << ' ' << l.stat_name << '=' << l.value;
    if (l.half_width) std::cout << " +/- " << *l.half_width;
    std::cout << " n=" << l.n << '\n';
  }
  std::cerr << "elapsed " << elapsed << " s\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lorentz process and random flight on the hyperbolic half-plane"};
  app.require_subcommand(1);

  hl::ExperimentConfig cfg;
  cfg.workers = hl::default_workers();
  std::string out_dir;
  std::vector<CLI::App*> experiment_commands;
  for (const char* name :
       {"free-path", "nearest-neighbor", "deflection", "tube-mc", "bg-convergence", "flight-baseline"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
    sub->add_option("--sigma", cfg.sigma, "collision rate sigma = 2 lambda sinh r");
    sub->add_option("--r", cfg.r_levels, "obstacle radius levels")->delimiter(',');
    sub->add_option("--t", cfg.t, "time horizon");
    sub->add_option("--samples", cfg.samples, "independent replicas");
    sub->add_option("--seed", cfg.seed, "master seed");
    sub->add_option("--workers", cfg.workers, "worker threads (default $HYPERLORENTZ_WORKERS or all cores)");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--lambda", cfg.lambda, "field intensity (nearest-neighbor only)");
    sub->add_option("--bootstrap", cfg.bootstrap_replicates, "bootstrap replicates (bg-convergence)");
    sub->add_flag("--quenched", cfg.quenched, "share one obstacle field across replicas (billiard experiments)");
    sub->add_flag("--record-time", cfg.record_time, "store wall-clock seconds in report.json");
    experiment_commands.push_back(sub);
  }

  ExportOptions exp;
  CLI::App* export_cmd = app.add_subcommand("export", "write one trajectory as CSV");
  export_cmd->add_option("--model", exp.model, "halfplane or disk");
  export_cmd->add_option("--seed", exp.seed, "seed");
  export_cmd->add_option("--out", exp.out, "destination CSV")->required();
  export_cmd->add_option("--process", exp.process, "lorentz or flight");
  export_cmd->add_option("--sigma", exp.sigma, "collision rate");
  export_cmd->add_option("--r", exp.r, "obstacle radius (lorentz)");
  export_cmd->add_option("--t", exp.t, "time horizon");
  export_cmd->add_option("--grid", exp.grid, "uniform grid intervals");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kValidationError;
  }

  try {
    if (export_cmd->parsed()) return run_export(exp);
    for (CLI::App* sub : experiment_commands) {
      if (!sub->parsed()) continue;
      cfg.experiment = hl::parse_experiment(sub->get_name());
      cfg.output_dir = out_dir;
      return run(cfg);
    }
  } catch (const std::invalid_argument& e) {  // config_error, contract_error
    std::cerr << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kValidationError;
}
