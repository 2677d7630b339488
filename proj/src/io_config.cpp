#include "reserves/io_config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "reserves/accounting.hpp"
#include "reserves/csv.hpp"
#include "reserves/errors.hpp"

namespace reserves {

namespace {

bool range_unset(const Quarter& q) { return q.year == 0; }

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t comma = s.find(',', pos);
    std::string item = comma == std::string::npos ? s.substr(pos)
                                                  : s.substr(pos, comma - pos);
    std::size_t a = item.find_first_not_of(" \t");
    std::size_t b = item.find_last_not_of(" \t");
    if (a != std::string::npos) out.push_back(item.substr(a, b - a + 1));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad number for " + key + ": \"" + value + "\"");
  }
}

long to_long(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    long v = std::stol(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad integer for " + key + ": \"" + value + "\"");
  }
}

std::vector<double> to_double_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const std::string& item : split_list(value)) out.push_back(to_double(key, item));
  return out;
}

}  // namespace

std::vector<std::filesystem::path> DataPaths::all() const {
  std::vector<std::filesystem::path> out = {reserves, rates, yields,
                                            equity, sdr, cofer};
  if (reported) out.push_back(*reported);
  return out;
}

AppConfig parse_config(const std::string& text) {
  AppConfig cfg;
  cfg.run.currencies = CurrencySet({"USD", "EUR", "GBP", "JPY", "CAD", "AUD"});
  cfg.run.start = Quarter{0, 1};
  cfg.run.end = Quarter{0, 1};
  bool prior_mode_set = false;

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::size_t a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    auto trim = [](std::string s) {
      std::size_t x = s.find_first_not_of(" \t\r");
      if (x == std::string::npos) return std::string();
      std::size_t y = s.find_last_not_of(" \t\r");
      return s.substr(x, y - x + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": empty key or value");

    if (key == "currencies") {
      cfg.run.currencies = CurrencySet(split_list(value));
    } else if (key == "start") {
      cfg.run.start = Quarter::parse(value);
    } else if (key == "end") {
      cfg.run.end = Quarter::parse(value);
    } else if (key == "n_particles") {
      cfg.run.n_particles = int(to_long(key, value));
    } else if (key == "gamma") {
      cfg.run.model.usd_share_var = to_double(key, value);
    } else if (key == "floor") {
      cfg.run.model.share_floor = to_double(key, value);
    } else if (key == "alpha_min") {
      cfg.run.model.alpha_min = to_double(key, value);
    } else if (key == "distribution") {
      cfg.run.model.obs_dist = parse_obs_dist(value);
    } else if (key == "maturity_years") {
      cfg.run.maturity_years = to_double(key, value);
    } else if (key == "seed") {
      cfg.run.seed = std::uint64_t(to_long(key, value));
    } else if (key == "threads") {
      cfg.run.threads = int(to_long(key, value));
    } else if (key == "engine") {
      if (value == "serial") cfg.run.engine = Engine::kSerial;
      else if (value == "parallel") cfg.run.engine = Engine::kParallel;
      else throw ConfigError("engine must be serial or parallel");
    } else if (key == "quantiles") {
      cfg.run.quantile_probs = to_double_list(key, value);
    } else if (key == "sigma_floor") {
      cfg.run.sigma_floor = to_double(key, value);
    } else if (key == "equity_share.mode") {
      if (value == "estimated") cfg.run.model.equity.mode = EquitySource::Mode::kEstimated;
      else if (value == "fixed") cfg.run.model.equity.mode = EquitySource::Mode::kFixed;
      else throw ConfigError("equity_share.mode must be estimated or fixed");
    } else if (key == "equity_share.value") {
      cfg.run.model.equity.fixed_value = to_double(key, value);
    } else if (key == "equity_share.half_window") {
      cfg.run.equity_half_window = int(to_long(key, value));
    } else if (key == "baseline.window") {
      cfg.run.baseline_window = int(to_long(key, value));
    } else if (key == "prior.mode") {
      if (value == "table") cfg.run.prior.mode = PriorSpec::Mode::kTable;
      else if (value == "mean_std") cfg.run.prior.mode = PriorSpec::Mode::kMeanStd;
      else throw ConfigError("prior.mode must be table or mean_std");
      prior_mode_set = true;
    } else if (key == "prior.params") {
      cfg.run.prior.table = to_double_list(key, value);
      if (!prior_mode_set) cfg.run.prior.mode = PriorSpec::Mode::kTable;
    } else if (key == "prior.mean") {
      cfg.run.prior.mean = to_double_list(key, value);
      if (!prior_mode_set) cfg.run.prior.mode = PriorSpec::Mode::kMeanStd;
    } else if (key == "prior.usd_std") {
      cfg.run.prior.usd_std = to_double(key, value);
    } else if (key.rfind("bond_return.", 0) == 0) {
      cfg.run.bond_return_fallback[key.substr(12)] = to_double(key, value);
    } else if (key == "data.reserves") {
      cfg.paths.reserves = value;
    } else if (key == "data.rates") {
      cfg.paths.rates = value;
    } else if (key == "data.yields") {
      cfg.paths.yields = value;
    } else if (key == "data.equity") {
      cfg.paths.equity = value;
    } else if (key == "data.sdr") {
      cfg.paths.sdr = value;
    } else if (key == "data.cofer") {
      cfg.paths.cofer = value;
    } else if (key == "data.reported") {
      cfg.paths.reported = value;
    } else if (key == "synth.quarters") {
      cfg.synth.quarters = int(to_long(key, value));
    } else if (key == "synth.fx_vol") {
      cfg.synth.fx_vol = to_double(key, value);
    } else if (key == "synth.yield_level") {
      cfg.synth.yield_level = to_double(key, value);
    } else if (key == "synth.yield_vol") {
      cfg.synth.yield_vol = to_double(key, value);
    } else if (key == "synth.equity_drift") {
      cfg.synth.equity_drift = to_double(key, value);
    } else if (key == "synth.equity_vol") {
      cfg.synth.equity_vol = to_double(key, value);
    } else if (key == "synth.noise_sigma") {
      cfg.synth.noise_sigma = to_double(key, value);
    } else if (key == "synth.noise_mode") {
      if (value == "fixed") cfg.synth.noise_mode = SynthSpec::NoiseMode::kFixed;
      else if (value == "pipeline") cfg.synth.noise_mode = SynthSpec::NoiseMode::kPipeline;
      else throw ConfigError("synth.noise_mode must be fixed or pipeline");
    } else if (key == "synth.purchase_mean") {
      cfg.synth.purchase_mean = to_double(key, value);
    } else if (key == "synth.purchase_vol") {
      cfg.synth.purchase_vol = to_double(key, value);
    } else if (key == "synth.equity_share") {
      cfg.synth.equity_share = to_double(key, value);
    } else if (key == "synth.start_at_prior_mean") {
      if (value == "true") cfg.synth.start_at_prior_mean = true;
      else if (value == "false") cfg.synth.start_at_prior_mean = false;
      else throw ConfigError("synth.start_at_prior_mean must be true or false");
    } else {
      throw ConfigError("unknown config key \"" + key + "\"");
    }
  }

  // Neutral default prior: a flat Dirichlet over the configured currencies.
  if (cfg.run.prior.mode == PriorSpec::Mode::kTable && cfg.run.prior.table.empty())
    cfg.run.prior.table.assign(cfg.run.currencies.size(), 1.0);

  // Everything except the quarter range (possibly derived from data later)
  // can be validated immediately.
  if (!range_unset(cfg.run.start) && !range_unset(cfg.run.end)) {
    cfg.run.validate();
  } else {
    cfg.run.model.validate(cfg.run.currencies.size());
    cfg.run.prior.resolve(cfg.run.currencies);
  }
  return cfg;
}

AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

namespace {

struct ReservesRaw {
  std::map<Quarter, std::pair<double, double>> rows;  // W, C
};

ReservesRaw read_reserves(const std::filesystem::path& path) {
  csv::Table t = csv::read(path);
  std::size_t cq = t.column("quarter");
  std::size_t cw = t.column("W");
  std::size_t cc = t.column("C");
  ReservesRaw out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    Quarter q = Quarter::parse(t.rows[r][cq]);
    if (out.rows.count(q))
      throw DataError(path.string() + ": duplicate quarter " + q.str());
    out.rows[q] = {csv::parse_double(t, r, cw), csv::parse_double(t, r, cc)};
  }
  if (out.rows.empty()) throw DataError(path.string() + ": no data rows");
  return out;
}

}  // namespace

void resolve_range(RunConfig& config, const DataPaths& paths) {
  if (!range_unset(config.start) && !range_unset(config.end)) return;
  ReservesRaw raw = read_reserves(paths.reserves);
  if (range_unset(config.start)) config.start = raw.rows.begin()->first;
  if (range_unset(config.end)) config.end = raw.rows.rbegin()->first;
}

CountryDataset load_dataset(const DataPaths& paths, const RunConfig& config) {
  if (paths.reserves.empty()) throw ConfigError("data.reserves not set");
  if (paths.rates.empty()) throw ConfigError("data.rates not set");
  if (paths.yields.empty()) throw ConfigError("data.yields not set");
  if (paths.equity.empty()) throw ConfigError("data.equity not set");
  if (paths.sdr.empty()) throw ConfigError("data.sdr not set");
  if (paths.cofer.empty()) throw ConfigError("data.cofer not set");
  if (range_unset(config.start) || range_unset(config.end))
    throw ConfigError("quarter range is unresolved");

  CountryDataset ds;
  ds.currencies = config.currencies;
  ds.start = config.start;
  ds.end = config.end;
  const std::size_t n = ds.currencies.size();
  const std::size_t quarters = std::size_t(ds.end - ds.start) + 1;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  // Reserves, contiguous over the range.
  {
    ReservesRaw raw = read_reserves(paths.reserves);
    ds.reserves.start = ds.start;
    ds.reserves.stock.resize(quarters);
    ds.reserves.purchases.resize(quarters);
    for (std::size_t t = 0; t < quarters; ++t) {
      Quarter q = Quarter::from_index(ds.start.index() + int(t));
      auto it = raw.rows.find(q);
      if (it == raw.rows.end())
        throw DataError(paths.reserves.string() + ": missing quarter " + q.str());
      ds.reserves.stock[t] = it->second.first;
      ds.reserves.purchases[t] = it->second.second;
    }
    ds.reserves.validate();
  }

  ds.market.start = ds.start;
  ds.market.quarters = quarters;
  ds.market.n_ccy = n;
  ds.market.fx.assign(quarters * n, nan);
  ds.market.equity_index.assign(quarters * n, nan);

  auto cell = [&](Quarter q, std::size_t i) -> std::size_t {
    return std::size_t(q - ds.start) * n + i;
  };
  auto in_range = [&](Quarter q) { return q >= ds.start && q <= ds.end; };

  // Exchange rates.
  {
    csv::Table t = csv::read(paths.rates);
    std::size_t cq = t.column("quarter");
    std::size_t cc = t.column("currency");
    std::size_t ce = t.column("e");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      Quarter q = Quarter::parse(t.rows[r][cq]);
      auto idx = ds.currencies.find(t.rows[r][cc]);
      if (!idx || !in_range(q)) continue;
      double v = csv::parse_double(t, r, ce);
      if (!(v > 0.0))
        throw DataError(paths.rates.string() + ":" + std::to_string(r + 2) +
                        ": nonpositive rate for " + t.rows[r][cc]);
      ds.market.fx[cell(q, *idx)] = v;
    }
    for (std::size_t t = 0; t < quarters; ++t) {
      std::size_t usd = ds.currencies.usd_index();
      if (std::isnan(ds.market.fx[t * n + usd])) ds.market.fx[t * n + usd] = 1.0;
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t t = 0; t < quarters; ++t)
        if (std::isnan(ds.market.fx[t * n + i]))
          throw DataError(paths.rates.string() + ": missing rate for " +
                          ds.currencies.code(i) + " at " +
                          Quarter::from_index(ds.start.index() + int(t)).str());
  }

  // Yield curves by maturity.
  {
    csv::Table t = csv::read(paths.yields);
    std::size_t cq = t.column("quarter");
    std::size_t cc = t.column("currency");
    std::size_t cm = t.column("maturity_years");
    std::size_t cy = t.column("yield");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      Quarter q = Quarter::parse(t.rows[r][cq]);
      auto idx = ds.currencies.find(t.rows[r][cc]);
      if (!idx || !in_range(q)) continue;
      double m = csv::parse_double(t, r, cm);
      double y = csv::parse_double(t, r, cy);
      if (!(y > -1.0))
        throw DataError(paths.yields.string() + ":" + std::to_string(r + 2) +
                        ": yield must exceed -1");
      auto& curve = ds.market.yields[m];
      if (curve.empty()) curve.assign(quarters * n, nan);
      curve[cell(q, *idx)] = y;
    }
    // The configured maturity must be complete for every currency that has
    // no constant-return fallback.
    auto it = ds.market.yields.find(config.maturity_years);
    for (std::size_t i = 0; i < n; ++i) {
      const std::string& code = ds.currencies.code(i);
      if (config.bond_return_fallback.count(code)) continue;
      bool complete = it != ds.market.yields.end();
      if (complete)
        for (std::size_t t = 0; t < quarters; ++t)
          if (std::isnan(it->second[t * n + i])) complete = false;
      if (!complete)
        throw ConfigError("maturity " + csv::format(config.maturity_years) +
                          " has no complete yield series for " + code +
                          " and no bond_return." + code + " fallback");
    }
  }

  // Equity total-return indices.
  {
    csv::Table t = csv::read(paths.equity);
    std::size_t cq = t.column("quarter");
    std::size_t cc = t.column("currency");
    std::size_t ci = t.column("index_level");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      Quarter q = Quarter::parse(t.rows[r][cq]);
      auto idx = ds.currencies.find(t.rows[r][cc]);
      if (!idx || !in_range(q)) continue;
      double v = csv::parse_double(t, r, ci);
      if (!(v > 0.0))
        throw DataError(paths.equity.string() + ":" + std::to_string(r + 2) +
                        ": nonpositive index level");
      ds.market.equity_index[cell(q, *idx)] = v;
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t t = 0; t < quarters; ++t)
        if (std::isnan(ds.market.equity_index[t * n + i]))
          throw DataError(paths.equity.string() + ": missing index for " +
                          ds.currencies.code(i) + " at " +
                          Quarter::from_index(ds.start.index() + int(t)).str());
  }

  // Daily SDR series, strictly increasing dates, restricted to the range.
  {
    csv::Table t = csv::read(paths.sdr);
    std::size_t cd = t.column("date");
    std::size_t cv = t.column("sdr_usd");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      Date d = Date::parse(t.rows[r][cd]);
      if (!in_range(d.quarter())) continue;
      double v = csv::parse_double(t, r, cv);
      if (!(v > 0.0))
        throw DataError(paths.sdr.string() + ":" + std::to_string(r + 2) +
                        ": nonpositive SDR rate");
      if (!ds.market.sdr.dates.empty() && !(ds.market.sdr.dates.back() < d))
        throw DataError(paths.sdr.string() + ":" + std::to_string(r + 2) +
                        ": dates must be strictly increasing");
      ds.market.sdr.dates.push_back(d);
      ds.market.sdr.values.push_back(v);
    }
    if (ds.market.sdr.dates.empty())
      throw DataError(paths.sdr.string() + ": no in-range daily observations");
  }

  // COFER world shares, kept raw; residual currencies tallied per quarter.
  {
    csv::Table t = csv::read(paths.cofer);
    std::size_t cq = t.column("quarter");
    std::size_t cc = t.column("currency");
    std::size_t cs = t.column("share");
    ds.cofer.start = ds.start;
    ds.cofer.n_ccy = n;
    ds.cofer.values.assign(quarters * n, nan);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      Quarter q = Quarter::parse(t.rows[r][cq]);
      if (!in_range(q)) continue;
      double v = csv::parse_double(t, r, cs);
      if (!(v >= 0.0))
        throw DataError(paths.cofer.string() + ":" + std::to_string(r + 2) +
                        ": negative share");
      auto idx = ds.currencies.find(t.rows[r][cc]);
      if (idx) ds.cofer.values[cell(q, *idx)] = v;
    }
    for (std::size_t t2 = 0; t2 < quarters; ++t2) {
      Quarter q = Quarter::from_index(ds.start.index() + int(t2));
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double v = ds.cofer.values[t2 * n + i];
        if (std::isnan(v))
          throw DataError(paths.cofer.string() + ": missing share for " +
                          ds.currencies.code(i) + " at " + q.str());
        total += v;
      }
      if (!(total > 0.0))
        throw DataError(paths.cofer.string() + ": zero total share at " + q.str());
      ds.report.cofer_renorm[q] = 1.0 / total;
    }
  }

  // Optional sparse self-reported shares, kept raw over the model currencies.
  if (paths.reported) {
    csv::Table t = csv::read(*paths.reported);
    std::size_t cq = t.column("quarter");
    std::size_t cc = t.column("currency");
    std::size_t cs = t.column("share");
    if (t.rows.empty())
      throw DataError(paths.reported->string() + ": no data rows");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      Quarter q = Quarter::parse(t.rows[r][cq]);
      if (!in_range(q)) continue;
      auto idx = ds.currencies.find(t.rows[r][cc]);
      if (!idx) continue;
      auto& row = ds.reported[q];
      if (row.empty()) row.assign(n, nan);
      row[*idx] = csv::parse_double(t, r, cs);
    }
    for (auto& [q, row] : ds.reported)
      for (std::size_t i = 0; i < n; ++i)
        if (std::isnan(row[i]))
          throw DataError(paths.reported->string() + ": missing share for " +
                          ds.currencies.code(i) + " at " + q.str());
  }

  return ds;
}

std::vector<double> normalize_row(std::span<const double> raw) {
  double total = 0.0;
  for (double v : raw) total += v;
  if (!(total > 0.0)) throw DataError("cannot normalize a zero share row");
  std::vector<double> out(raw.begin(), raw.end());
  for (double& v : out) v /= total;
  return out;
}

SharesSeries normalize_rows(const SharesSeries& raw) {
  SharesSeries out = raw;
  for (std::size_t t = 0; t < raw.size(); ++t) {
    std::vector<double> row = normalize_row(raw.row(t));
    std::copy(row.begin(), row.end(), out.values.begin() + t * raw.n_ccy);
  }
  return out;
}

void write_dataset(const std::filesystem::path& dir, const CountryDataset& ds) {
  std::filesystem::create_directories(dir);
  const std::size_t n = ds.currencies.size();

  csv::Writer reserves(dir / "reserves.csv", {"quarter", "W", "C"});
  for (std::size_t t = 0; t < ds.reserves.size(); ++t) {
    reserves.field(ds.reserves.quarter(t).str());
    reserves.field(ds.reserves.stock[t]);
    reserves.field(ds.reserves.purchases[t]);
    reserves.end_row();
  }
  reserves.close();

  csv::Writer rates(dir / "rates.csv", {"quarter", "currency", "e"});
  csv::Writer equity(dir / "equity.csv", {"quarter", "currency", "index_level"});
  for (std::size_t t = 0; t < ds.market.quarters; ++t) {
    Quarter q = Quarter::from_index(ds.market.start.index() + int(t));
    for (std::size_t i = 0; i < n; ++i) {
      rates.field(q.str());
      rates.field(ds.currencies.code(i));
      rates.field(ds.market.fx_at(t, i));
      rates.end_row();
      equity.field(q.str());
      equity.field(ds.currencies.code(i));
      equity.field(ds.market.equity_at(t, i));
      equity.end_row();
    }
  }
  rates.close();
  equity.close();

  csv::Writer yields(dir / "yields.csv",
                     {"quarter", "currency", "maturity_years", "yield"});
  for (const auto& [maturity, curve] : ds.market.yields) {
    for (std::size_t t = 0; t < ds.market.quarters; ++t) {
      Quarter q = Quarter::from_index(ds.market.start.index() + int(t));
      for (std::size_t i = 0; i < n; ++i) {
        double v = curve[t * n + i];
        if (std::isnan(v)) continue;
        yields.field(q.str());
        yields.field(ds.currencies.code(i));
        yields.field(maturity);
        yields.field(v);
        yields.end_row();
      }
    }
  }
  yields.close();

  csv::Writer sdr(dir / "sdr_daily.csv", {"date", "sdr_usd"});
  for (std::size_t i = 0; i < ds.market.sdr.size(); ++i) {
    sdr.field(ds.market.sdr.dates[i].str());
    sdr.field(ds.market.sdr.values[i]);
    sdr.end_row();
  }
  sdr.close();

  if (!ds.cofer.values.empty()) {
    csv::Writer cofer(dir / "cofer.csv", {"quarter", "currency", "share"});
    for (std::size_t t = 0; t < ds.cofer.size(); ++t) {
      Quarter q = Quarter::from_index(ds.cofer.start.index() + int(t));
      for (std::size_t i = 0; i < n; ++i) {
        cofer.field(q.str());
        cofer.field(ds.currencies.code(i));
        cofer.field(ds.cofer.values[t * n + i]);
        cofer.end_row();
      }
    }
    cofer.close();
  }

  if (!ds.reported.empty()) {
    csv::Writer reported(dir / "reported.csv", {"quarter", "currency", "share"});
    for (const auto& [q, row] : ds.reported) {
      for (std::size_t i = 0; i < n; ++i) {
        reported.field(q.str());
        reported.field(ds.currencies.code(i));
        reported.field(row[i]);
        reported.end_row();
      }
    }
    reported.close();
  }
}

}  // namespace reserves
