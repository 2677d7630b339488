#include <CLI11.hpp>
#include <iostream>

#include "reserves/errors.hpp"
#include "reserves/pipeline.hpp"

namespace {

struct GlobalOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> engine;
};

reserves::AppConfig load(const GlobalOpts& g) {
  reserves::AppConfig cfg = reserves::load_config(g.config_path);
  if (g.seed) cfg.run.seed = *g.seed;
  if (g.threads) cfg.run.threads = *g.threads;
  if (g.engine) {
    if (*g.engine == "serial") cfg.run.engine = reserves::Engine::kSerial;
    else if (*g.engine == "parallel") cfg.run.engine = reserves::Engine::kParallel;
    else throw reserves::ConfigError("engine must be serial or parallel");
  }
  return cfg;
}

void add_globals(CLI::App* cmd, GlobalOpts& g) {
  cmd->add_option("--config", g.config_path, "run configuration file")->required();
  cmd->add_option("--out-dir", g.out_dir, "output directory");
  cmd->add_option("--seed", g.seed, "override the config seed");
  cmd->add_option("--threads", g.threads, "override the thread count");
  cmd->add_option("--engine", g.engine, "serial or parallel");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Currency-composition estimation for foreign exchange reserves"};
  app.require_subcommand(1);

  GlobalOpts g;
  std::string axis = "maturity";
  std::vector<std::string> sweep_values;
  std::vector<double> levels = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::string reported_path;

  CLI::App* estimate = app.add_subcommand("estimate", "run the particle filter");
  add_globals(estimate, g);

  CLI::App* sweep = app.add_subcommand("sweep", "sensitivity sweep");
  add_globals(sweep, g);
  sweep->add_option("--axis", axis, "maturity, prior_width, or distribution");
  sweep->add_option("--values", sweep_values, "sweep values (defaults per axis)")
      ->delimiter(',');

  CLI::App* calibrate = app.add_subcommand("calibrate", "coverage vs reported shares");
  add_globals(calibrate, g);
  calibrate->add_option("--levels", levels, "credible interval levels")
      ->delimiter(',');
  calibrate->add_option("--reported", reported_path, "override data.reported");

  CLI::App* baseline = app.add_subcommand("baseline", "rolling simplex least squares");
  add_globals(baseline, g);

  CLI::App* equity = app.add_subcommand("equity-share", "estimate the equity share only");
  add_globals(equity, g);

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  add_globals(synth, g);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // usage problems count as config errors
  }

  try {
    reserves::AppConfig cfg = load(g);
    if (estimate->parsed()) {
      reserves::cmd_estimate(cfg, g.out_dir, std::cout);
    } else if (sweep->parsed()) {
      reserves::SweepAxis ax = reserves::parse_sweep_axis(axis);
      if (sweep_values.empty()) {
        switch (ax) {
          case reserves::SweepAxis::kMaturity:
            sweep_values = {"2", "5", "7", "10"};
            break;
          case reserves::SweepAxis::kPriorWidth:
            sweep_values = {"0.5", "1", "2"};
            break;
          case reserves::SweepAxis::kDistribution:
            sweep_values = {"laplace", "normal", "cauchy"};
            break;
        }
      }
      reserves::cmd_sweep(cfg, ax, sweep_values, g.out_dir, std::cout);
    } else if (calibrate->parsed()) {
      if (!reported_path.empty()) cfg.paths.reported = reported_path;
      reserves::cmd_calibrate(cfg, levels, g.out_dir, std::cout);
    } else if (baseline->parsed()) {
      reserves::cmd_baseline(cfg, g.out_dir, std::cout);
    } else if (equity->parsed()) {
      reserves::cmd_equity_share(cfg, g.out_dir, std::cout);
    } else if (synth->parsed()) {
      reserves::cmd_synth(cfg, g.out_dir, std::cout);
    }
  } catch (const reserves::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const reserves::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const reserves::NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
