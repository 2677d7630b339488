#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "reserves/errors.hpp"
#include "reserves/io_config.hpp"

using namespace reserves;
namespace fs = std::filesystem;

namespace {

struct FixtureDir {
  fs::path dir;

  explicit FixtureDir(const std::string& name) {
    dir = fs::temp_directory_path() / ("reserves_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~FixtureDir() { fs::remove_all(dir); }

  void write(const std::string& file, const std::string& text) const {
    std::ofstream out(dir / file);
    out << text;
  }
  fs::path p(const std::string& file) const { return dir / file; }
};

// Minimal three-quarter, two-currency fixture.
void write_minimal(const FixtureDir& f, bool drop_middle_quarter = false) {
  std::string reserves = "quarter,W,C\n2010Q1,100,0\n";
  if (!drop_middle_quarter) reserves += "2010Q2,105,2\n";
  reserves += "2010Q3,103,1\n";
  f.write("reserves.csv", reserves);

  f.write("rates.csv",
          "quarter,currency,e\n"
          "2010Q1,USD,1\n2010Q2,USD,1\n2010Q3,USD,1\n"
          "2010Q1,EUR,1.30\n2010Q2,EUR,1.25\n2010Q3,EUR,1.28\n");

  f.write("yields.csv",
          "quarter,currency,maturity_years,yield\n"
          "2010Q1,USD,7,0.030\n2010Q2,USD,7,0.032\n2010Q3,USD,7,0.031\n"
          "2010Q1,EUR,7,0.020\n2010Q2,EUR,7,0.021\n2010Q3,EUR,7,0.022\n");

  f.write("equity.csv",
          "quarter,currency,index_level\n"
          "2010Q1,USD,100\n2010Q2,USD,102\n2010Q3,USD,101\n"
          "2010Q1,EUR,200\n2010Q2,EUR,198\n2010Q3,EUR,205\n");

  std::string sdr = "date,sdr_usd\n";
  double level = 1.5;
  for (int month = 1; month <= 9; ++month)
    for (int day = 1; day <= 6; ++day) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "2010-%02d-%02d,%.6f\n", month, day, level);
      sdr += buf;
      level *= (day % 2 == 0) ? 1.004 : 0.997;
    }
  f.write("sdr_daily.csv", sdr);

  f.write("cofer.csv",
          "quarter,currency,share\n"
          "2010Q1,USD,0.60\n2010Q1,EUR,0.35\n2010Q1,OTH,0.05\n"
          "2010Q2,USD,0.60\n2010Q2,EUR,0.35\n2010Q2,OTH,0.05\n"
          "2010Q3,USD,0.60\n2010Q3,EUR,0.35\n2010Q3,OTH,0.05\n");

  f.write("reported.csv",
          "quarter,currency,share\n2010Q3,USD,0.6\n2010Q3,EUR,0.4\n");
}

DataPaths minimal_paths(const FixtureDir& f) {
  DataPaths paths;
  paths.reserves = f.p("reserves.csv");
  paths.rates = f.p("rates.csv");
  paths.yields = f.p("yields.csv");
  paths.equity = f.p("equity.csv");
  paths.sdr = f.p("sdr_daily.csv");
  paths.cofer = f.p("cofer.csv");
  paths.reported = f.p("reported.csv");
  return paths;
}

RunConfig minimal_config() {
  RunConfig cfg;
  cfg.currencies = CurrencySet({"USD", "EUR"});
  cfg.start = Quarter{2010, 1};
  cfg.end = Quarter{2010, 3};
  cfg.prior.table = {3.0, 2.0};
  return cfg;
}

}  // namespace

TEST_CASE("config defaults follow the model's published settings") {
  AppConfig cfg = parse_config("");
  CHECK(cfg.run.model.usd_share_var == doctest::Approx(0.015 * 0.015));
  CHECK(cfg.run.n_particles == 10000);
  CHECK(cfg.run.model.share_floor == 0.01);
  CHECK(cfg.run.model.obs_dist == ObsDist::kLaplace);
  CHECK(cfg.run.maturity_years == 7.0);
  CHECK(cfg.run.currencies.size() == 6);
  CHECK(cfg.run.quantile_probs == std::vector<double>{0.10, 0.25, 0.50, 0.75, 0.90});
}

TEST_CASE("config rejections name the offending field") {
  CHECK_THROWS_AS(parse_config("gamma = 0.3\nstart = 2004Q1\nend = 2010Q4"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("no_such_key = 1"), ConfigError);
  CHECK_THROWS_AS(parse_config("floor = 0.5\nstart = 2004Q1\nend = 2010Q4"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("distribution = student"), ConfigError);
  CHECK_THROWS_AS(parse_config("start = 2010Q1\nend = 2004Q1"), ConfigError);
  CHECK_THROWS_AS(parse_config("currencies = EUR,GBP"), ConfigError);

  try {
    parse_config("gamma = 0.3\nstart = 2004Q1\nend = 2010Q4");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("gamma") != std::string::npos);
  }
}

TEST_CASE("config round trip of explicit settings") {
  AppConfig cfg = parse_config(
      "currencies = USD,EUR,RMB\n"
      "start = 2017Q1\n"
      "end = 2022Q3\n"
      "n_particles = 5000\n"
      "gamma = 0.0001\n"
      "floor = 0.005\n"
      "distribution = cauchy\n"
      "maturity_years = 5\n"
      "seed = 99\n"
      "engine = serial\n"
      "quantiles = 0.05,0.5,0.95\n"
      "equity_share.mode = fixed\n"
      "equity_share.value = 0.1\n"
      "prior.mean = 0.6,0.3,0.1\n"
      "prior.usd_std = 0.05\n"
      "bond_return.RMB = 0.004\n");
  CHECK(cfg.run.currencies.code(2) == "RMB");
  CHECK(cfg.run.n_particles == 5000);
  CHECK(cfg.run.model.obs_dist == ObsDist::kCauchy);
  CHECK(cfg.run.engine == Engine::kSerial);
  CHECK(cfg.run.prior.mode == PriorSpec::Mode::kMeanStd);
  CHECK(cfg.run.model.equity.mode == EquitySource::Mode::kFixed);
  CHECK(cfg.run.bond_return_fallback.at("RMB") == 0.004);
  CHECK(cfg.run.seed == 99);
}

TEST_CASE("minimal fixture loads and aligns") {
  FixtureDir f("minimal");
  write_minimal(f);
  CountryDataset ds = load_dataset(minimal_paths(f), minimal_config());

  CHECK(ds.reserves.size() == 3);
  CHECK(ds.reserves.stock[1] == 105.0);
  CHECK(ds.market.quarters == 3);
  CHECK(ds.market.fx_at(1, 1) == 1.25);
  CHECK(ds.market.yields.at(7.0)[2 * 2 + 0] == 0.031);
  CHECK(ds.cofer.values[0] == 0.60);
  CHECK(ds.reported.size() == 1);
  CHECK(ds.reported.at(Quarter{2010, 3})[1] == 0.4);

  // COFER residual of 5% reported as a 1/0.95 factor.
  for (const auto& [q, factor] : ds.report.cofer_renorm)
    CHECK(factor == doctest::Approx(1.0 / 0.95).epsilon(1e-12));
}

TEST_CASE("gap in the reserve panel names the quarter") {
  FixtureDir f("gap");
  write_minimal(f, /*drop_middle_quarter=*/true);
  try {
    load_dataset(minimal_paths(f), minimal_config());
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("2010Q2") != std::string::npos);
  }
}

TEST_CASE("missing yield curve is rejected naming the currency") {
  FixtureDir f("badmaturity");
  write_minimal(f);
  RunConfig cfg = minimal_config();
  cfg.maturity_years = 5.0;  // the fixture only carries 7-year yields
  try {
    load_dataset(minimal_paths(f), cfg);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    CHECK(msg.find("USD") != std::string::npos);
  }
  // A constant-return fallback for every affected currency unblocks it.
  cfg.bond_return_fallback["USD"] = 0.005;
  cfg.bond_return_fallback["EUR"] = 0.004;
  CountryDataset ds = load_dataset(minimal_paths(f), cfg);
  CHECK(ds.reserves.size() == 3);
}

TEST_CASE("usd exchange rate is implied when absent") {
  FixtureDir f("usdimplied");
  write_minimal(f);
  f.write("rates.csv",
          "quarter,currency,e\n"
          "2010Q1,EUR,1.30\n2010Q2,EUR,1.25\n2010Q3,EUR,1.28\n");
  CountryDataset ds = load_dataset(minimal_paths(f), minimal_config());
  CHECK(ds.market.fx_at(0, 0) == 1.0);
  CHECK(ds.market.fx_at(2, 0) == 1.0);
}

TEST_CASE("ingestion is lossless and alignment idempotent") {
  FixtureDir f("roundtrip");
  write_minimal(f);
  CountryDataset first = load_dataset(minimal_paths(f), minimal_config());

  FixtureDir g("roundtrip_out");
  write_dataset(g.dir, first);
  DataPaths again;
  again.reserves = g.p("reserves.csv");
  again.rates = g.p("rates.csv");
  again.yields = g.p("yields.csv");
  again.equity = g.p("equity.csv");
  again.sdr = g.p("sdr_daily.csv");
  again.cofer = g.p("cofer.csv");
  again.reported = g.p("reported.csv");
  CountryDataset second = load_dataset(again, minimal_config());

  CHECK(second.reserves.stock == first.reserves.stock);
  CHECK(second.reserves.purchases == first.reserves.purchases);
  CHECK(second.market.fx == first.market.fx);
  CHECK(second.market.equity_index == first.market.equity_index);
  CHECK(second.market.yields.at(7.0) == first.market.yields.at(7.0));
  CHECK(second.market.sdr.values == first.market.sdr.values);
  CHECK(second.cofer.values == first.cofer.values);
  CHECK(second.reported == first.reported);
  CHECK(second.report.cofer_renorm == first.report.cofer_renorm);
}

TEST_CASE("empty reported file is a data error") {
  FixtureDir f("emptyreported");
  write_minimal(f);
  f.write("reported.csv", "quarter,currency,share\n");
  CHECK_THROWS_AS(load_dataset(minimal_paths(f), minimal_config()), DataError);
}

TEST_CASE("range resolution from the reserves file") {
  FixtureDir f("range");
  write_minimal(f);
  RunConfig cfg = minimal_config();
  cfg.start = Quarter{0, 1};
  cfg.end = Quarter{0, 1};
  resolve_range(cfg, minimal_paths(f));
  CHECK(cfg.start == Quarter{2010, 1});
  CHECK(cfg.end == Quarter{2010, 3});
}

TEST_CASE("normalize_rows puts weights on the simplex") {
  SharesSeries raw;
  raw.start = Quarter{2010, 1};
  raw.n_ccy = 2;
  raw.values = {0.6, 0.35, 0.57, 0.38};
  SharesSeries norm = normalize_rows(raw);
  CHECK(norm.values[0] == doctest::Approx(0.6 / 0.95));
  CHECK(norm.values[1] == doctest::Approx(0.35 / 0.95));
  CHECK(norm.values[2] + norm.values[3] == doctest::Approx(1.0));
}
