#include "reserves/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <set>

#include "reserves/accounting.hpp"
#include "reserves/csv.hpp"
#include "reserves/errors.hpp"
#include "reserves/synthetic.hpp"

namespace reserves {

namespace {

std::string prob_label(double p) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "p%g", p * 100.0);
  return buf;
}

struct PreparedInputs {
  RunConfig run;  // with the quarter range resolved
  CountryDataset dataset;
  ObservationSeries obs;
  ReturnPanel returns;
  EquityShareSeries equity;
  std::vector<double> equity_values;
  FilterData data;
};

/// Shared front half of every data-driven command: load, align, derive the
/// observables, and resolve the equity share series.
PreparedInputs prepare(const AppConfig& config) {
  PreparedInputs p;
  RunConfig& run = p.run;
  run = config.run;
  resolve_range(run, config.paths);
  run.validate();
  p.dataset = load_dataset(config.paths, run);
  p.returns = build_return_panel(p.dataset.market, run.currencies,
                                 run.maturity_years, run.bond_return_fallback);
  p.obs = build_observations(p.dataset.reserves, p.dataset.market,
                             run.sigma_floor);

  if (run.model.equity.mode == EquitySource::Mode::kFixed) {
    p.equity.start = p.obs.start;
    p.equity.x.assign(p.obs.size(), run.model.equity.fixed_value);
    p.equity.degenerate.assign(p.obs.size(), 0);
  } else {
    p.equity = estimate_equity_share(p.obs, normalize_rows(p.dataset.cofer),
                                     p.returns, run.equity_half_window);
  }
  p.equity_values = p.equity.x;

  p.data.obs = p.obs;
  p.data.returns = p.returns;
  p.data.equity_share = p.equity_values;
  p.data.prior = run.prior.resolve(run.currencies);
  return p;
}

RunConfig resolved_run(const AppConfig& config) {
  RunConfig run = config.run;
  resolve_range(run, config.paths);
  run.validate();
  return run;
}

void write_equity_csv(const std::filesystem::path& path,
                      const EquityShareSeries& series) {
  csv::Writer w(path, {"quarter", "equity_share", "degenerate_flag"});
  for (std::size_t t = 0; t < series.size(); ++t) {
    w.field(Quarter::from_index(series.start.index() + int(t)).str());
    w.field(series.x[t]);
    w.field(int(series.degenerate[t]));
    w.end_row();
  }
  w.close();
}

void write_calibration_csv(const std::filesystem::path& path,
                           const CalibrationCurve& curve,
                           const CurrencySet& ccy) {
  csv::Writer w(path, {"level", "currency", "coverage"});
  for (std::size_t li = 0; li < curve.levels.size(); ++li)
    for (std::size_t c = 0; c < ccy.size(); ++c) {
      w.field(curve.levels[li]);
      w.field(ccy.code(c));
      w.field(curve.at(li, c));
      w.end_row();
    }
  w.close();
}

void write_baseline_csv(const std::filesystem::path& path,
                        const BaselineSeries& series, const CurrencySet& ccy) {
  csv::Writer w(path, {"quarter", "currency", "share", "nonunique_flag", "sse"});
  for (std::size_t t = 0; t < series.size(); ++t) {
    Quarter q = Quarter::from_index(series.start.index() + int(t));
    for (std::size_t c = 0; c < ccy.size(); ++c) {
      w.field(q.str());
      w.field(ccy.code(c));
      w.field(series.shares[t * series.n_ccy + c]);
      w.field(int(series.nonunique[t]));
      w.field(series.sse[t]);
      w.end_row();
    }
  }
  w.close();
}

void print_final_quarter(std::ostream& log, const FilterSummary& summary,
                         const CurrencySet& ccy) {
  if (summary.size() == 0) return;
  auto find_prob = [&](double p) -> int {
    for (std::size_t i = 0; i < summary.probs.size(); ++i)
      if (std::abs(summary.probs[i] - p) < 1e-9) return int(i);
    return -1;
  };
  int p50 = find_prob(0.50), p25 = find_prob(0.25), p75 = find_prob(0.75);
  std::size_t t = summary.size() - 1;
  Quarter q = Quarter::from_index(summary.start.index() + int(t));
  log << "final quarter " << q.str() << ":\n";
  char buf[64];
  for (std::size_t c = 0; c < ccy.size(); ++c) {
    log << "  " << ccy.code(c);
    if (p50 >= 0) {
      std::snprintf(buf, sizeof buf, " median %.1f%%",
                    100.0 * summary.quantile(t, c, std::size_t(p50)));
      log << buf;
    }
    if (p25 >= 0 && p75 >= 0) {
      std::snprintf(buf, sizeof buf, " IQR %.1fpp",
                    100.0 * (summary.quantile(t, c, std::size_t(p75)) -
                             summary.quantile(t, c, std::size_t(p25))));
      log << buf;
    }
    log << "\n";
  }
}

}  // namespace

void write_summary_csv(const std::filesystem::path& path,
                       const FilterSummary& summary, const CurrencySet& ccy) {
  std::vector<std::string> header = {"quarter", "currency"};
  for (double p : summary.probs) header.push_back(prob_label(p));
  csv::Writer w(path, header);
  for (std::size_t t = 0; t < summary.size(); ++t) {
    Quarter q = Quarter::from_index(summary.start.index() + int(t));
    for (std::size_t c = 0; c < summary.n_ccy; ++c) {
      w.field(q.str());
      w.field(ccy.code(c));
      for (std::size_t p = 0; p < summary.probs.size(); ++p)
        w.field(summary.quantile(t, c, p));
      w.end_row();
    }
  }
  w.close();
}

void write_goodness_csv(const std::filesystem::path& path,
                        const FilterSummary& summary) {
  csv::Writer w(path, {"quarter", "y_observed", "y_predicted_median",
                       "sigma_obs", "ess"});
  for (std::size_t t = 0; t < summary.size(); ++t) {
    w.field(Quarter::from_index(summary.start.index() + int(t)).str());
    w.field(summary.y_obs[t]);
    w.field(summary.y_pred_median[t]);
    w.field(summary.sigma[t]);
    w.field(summary.ess[t]);
    w.end_row();
  }
  w.close();
}

void write_metadata_json(const std::filesystem::path& path,
                         const AppConfig& config,
                         const FilterSummary& summary) {
  RunConfig run = resolved_run(config);
  nlohmann::json j;
  j["version"] = kVersion;
  j["seed"] = run.seed;
  j["config"]["currencies"] = run.currencies.codes();
  j["config"]["start"] = run.start.str();
  j["config"]["end"] = run.end.str();
  j["config"]["n_particles"] = run.n_particles;
  j["config"]["gamma"] = run.model.usd_share_var;
  j["config"]["floor"] = run.model.share_floor;
  j["config"]["alpha_min"] = run.model.alpha_min;
  j["config"]["distribution"] = to_string(run.model.obs_dist);
  j["config"]["maturity_years"] = run.maturity_years;
  j["config"]["quantiles"] = run.quantile_probs;
  j["config"]["equity_share.mode"] =
      run.model.equity.mode == EquitySource::Mode::kFixed ? "fixed" : "estimated";
  if (run.model.equity.mode == EquitySource::Mode::kFixed)
    j["config"]["equity_share.value"] = run.model.equity.fixed_value;
  j["alpha_clamp_events"] = summary.alpha_clamp_events;
  j["quarters"] = summary.size();
  for (const auto& p : config.paths.all())
    j["inputs"][p.filename().string()] = csv::file_digest(p);
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

EstimateResult cmd_estimate(const AppConfig& config,
                            const std::filesystem::path& out_dir,
                            std::ostream& log) {
  std::filesystem::create_directories(out_dir);
  PreparedInputs p = prepare(config);
  FilterSummary summary = run_filter(p.run, p.data);

  write_summary_csv(out_dir / "summary.csv", summary, p.run.currencies);
  write_goodness_csv(out_dir / "goodness.csv", summary);
  write_equity_csv(out_dir / "equity_share.csv", p.equity);
  write_metadata_json(out_dir / "metadata.json", config, summary);
  print_final_quarter(log, summary, p.run.currencies);
  return {std::move(summary), std::move(p.equity)};
}

SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "maturity") return SweepAxis::kMaturity;
  if (name == "prior_width") return SweepAxis::kPriorWidth;
  if (name == "distribution") return SweepAxis::kDistribution;
  throw ConfigError("unknown sweep axis \"" + name +
                    "\" (expected maturity, prior_width, or distribution)");
}

void cmd_sweep(const AppConfig& config, SweepAxis axis,
               const std::vector<std::string>& values,
               const std::filesystem::path& out_dir, std::ostream& log) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  std::filesystem::create_directories(out_dir);

  std::string axis_name = axis == SweepAxis::kMaturity ? "maturity"
                          : axis == SweepAxis::kPriorWidth ? "prior_width"
                                                           : "distribution";
  std::vector<std::string> header = {axis_name, "quarter", "currency"};
  for (double p : config.run.quantile_probs) header.push_back(prob_label(p));
  csv::Writer stacked(out_dir / "sweep_summary.csv", header);

  for (const std::string& value : values) {
    AppConfig point = config;
    switch (axis) {
      case SweepAxis::kMaturity: {
        std::size_t used = 0;
        point.run.maturity_years = std::stod(value, &used);
        if (used != value.size())
          throw ConfigError("bad maturity value \"" + value + "\"");
        break;
      }
      case SweepAxis::kPriorWidth: {
        std::size_t used = 0;
        double factor = std::stod(value, &used);
        if (used != value.size() || !(factor > 0.0))
          throw ConfigError("bad prior width factor \"" + value + "\"");
        DirichletParams base = config.run.prior.resolve(config.run.currencies);
        PriorSpec wide;
        wide.mode = PriorSpec::Mode::kMeanStd;
        wide.mean = base.means();
        wide.usd_std = base.stddev(config.run.currencies.usd_index()) * factor;
        point.run.prior = wide;
        break;
      }
      case SweepAxis::kDistribution:
        point.run.model.obs_dist = parse_obs_dist(value);
        break;
    }
    std::filesystem::path point_dir = out_dir / (axis_name + "=" + value);
    log << "sweep point " << axis_name << " = " << value << "\n";
    EstimateResult result = cmd_estimate(point, point_dir, log);
    const FilterSummary& s = result.summary;
    for (std::size_t t = 0; t < s.size(); ++t) {
      Quarter q = Quarter::from_index(s.start.index() + int(t));
      for (std::size_t c = 0; c < s.n_ccy; ++c) {
        stacked.field(value);
        stacked.field(q.str());
        stacked.field(config.run.currencies.code(c));
        for (std::size_t p = 0; p < s.probs.size(); ++p)
          stacked.field(s.quantile(t, c, p));
        stacked.end_row();
      }
    }
  }
  stacked.close();
}

void cmd_calibrate(const AppConfig& config, std::span<const double> levels,
                   const std::filesystem::path& out_dir, std::ostream& log) {
  if (!config.paths.reported)
    throw ConfigError("calibrate requires data.reported");
  std::filesystem::create_directories(out_dir);

  AppConfig extended = config;
  std::set<double> probs(config.run.quantile_probs.begin(),
                         config.run.quantile_probs.end());
  for (double level : levels) {
    if (!(level > 0.0) || !(level < 1.0))
      throw ConfigError("calibration level out of (0, 1)");
    probs.insert((1.0 - level) / 2.0);
    probs.insert((1.0 + level) / 2.0);
  }
  extended.run.quantile_probs.assign(probs.begin(), probs.end());

  PreparedInputs p = prepare(extended);
  FilterSummary summary = run_filter(p.run, p.data);

  ReportedShares normalized;
  for (const auto& [q, row] : p.dataset.reported)
    normalized[q] = normalize_row(row);
  CalibrationCurve curve = calibration_curve(summary, normalized, levels);
  write_calibration_csv(out_dir / "calibration.csv", curve, p.run.currencies);
  log << "calibration over " << curve.n_reported << " reported quarters\n";
}

BaselineSeries cmd_baseline(const AppConfig& config,
                            const std::filesystem::path& out_dir,
                            std::ostream& log) {
  std::filesystem::create_directories(out_dir);
  PreparedInputs p = prepare(config);
  const RunConfig& run = p.run;
  int window = run.baseline_window > 0 ? run.baseline_window
                                       : int(run.currencies.size());
  BaselineSeries series =
      rolling_optimize(p.obs, p.returns, p.equity_values, window);
  write_baseline_csv(out_dir / "baseline.csv", series, run.currencies);
  std::size_t flagged = 0;
  for (auto f : series.nonunique) flagged += f;
  log << "baseline windows: " << series.size() << " (" << flagged
      << " non-unique)\n";
  return series;
}

EquityShareSeries cmd_equity_share(const AppConfig& config,
                                   const std::filesystem::path& out_dir,
                                   std::ostream& log) {
  std::filesystem::create_directories(out_dir);
  AppConfig estimated = config;  // the command's product is the estimate
  estimated.run.model.equity.mode = EquitySource::Mode::kEstimated;
  PreparedInputs p = prepare(estimated);
  write_equity_csv(out_dir / "equity_share.csv", p.equity);
  std::size_t flagged = 0;
  for (auto f : p.equity.degenerate) flagged += f;
  log << "equity share quarters: " << p.equity.size() << " (" << flagged
      << " degenerate)\n";
  return p.equity;
}

void cmd_synth(const AppConfig& config, const std::filesystem::path& out_dir,
               std::ostream& log) {
  RunConfig run = config.run;
  if (run.start.year == 0) run.start = Quarter{2004, 1};
  run.end = Quarter::from_index(run.start.index() + config.synth.quarters);
  run.validate();

  std::filesystem::path data_dir = out_dir / "data";
  std::filesystem::create_directories(data_dir);
  write_synthetic_dataset(data_dir, run, config.synth);

  // A ready-to-run config pointing at the generated files.
  std::ofstream cfg(out_dir / "synth_config.txt");
  if (!cfg) throw DataError("cannot write synth_config.txt");
  cfg << "currencies = ";
  for (std::size_t i = 0; i < run.currencies.size(); ++i)
    cfg << (i ? "," : "") << run.currencies.code(i);
  cfg << "\n";
  cfg << "start = " << run.start.str() << "\n";
  cfg << "end = " << run.end.str() << "\n";
  cfg << "n_particles = " << run.n_particles << "\n";
  cfg << "gamma = " << csv::format(run.model.usd_share_var) << "\n";
  cfg << "floor = " << csv::format(run.model.share_floor) << "\n";
  cfg << "distribution = " << to_string(run.model.obs_dist) << "\n";
  cfg << "maturity_years = " << csv::format(run.maturity_years) << "\n";
  cfg << "seed = " << run.seed << "\n";
  cfg << "equity_share.mode = fixed\n";
  cfg << "equity_share.value = " << csv::format(config.synth.equity_share) << "\n";
  if (run.prior.mode == PriorSpec::Mode::kTable) {
    cfg << "prior.params = ";
    for (std::size_t i = 0; i < run.prior.table.size(); ++i)
      cfg << (i ? "," : "") << csv::format(run.prior.table[i]);
    cfg << "\n";
  } else {
    cfg << "prior.mean = ";
    for (std::size_t i = 0; i < run.prior.mean.size(); ++i)
      cfg << (i ? "," : "") << csv::format(run.prior.mean[i]);
    cfg << "\nprior.usd_std = " << csv::format(run.prior.usd_std) << "\n";
  }
  for (const char* name : {"reserves", "rates", "yields", "equity"})
    cfg << "data." << name << " = " << (data_dir / (std::string(name) + ".csv")).string() << "\n";
  cfg << "data.sdr = " << (data_dir / "sdr_daily.csv").string() << "\n";
  cfg << "data.cofer = " << (data_dir / "cofer.csv").string() << "\n";
  cfg << "data.reported = " << (data_dir / "reported.csv").string() << "\n";
  cfg.close();
  log << "synthetic dataset written to " << data_dir.string() << "\n";
}

}  // namespace reserves
