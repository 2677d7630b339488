#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "reserves/csv.hpp"
#include "reserves/errors.hpp"
#include "reserves/pipeline.hpp"

using namespace reserves;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path dir;
  explicit TempDir(const std::string& name) {
    dir = fs::temp_directory_path() / ("reserves_pipe_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~TempDir() { fs::remove_all(dir); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Generate a synthetic dataset and return a config bound to it.
AppConfig synth_bound_config(const TempDir& t, const std::string& extra = "") {
  AppConfig gen = parse_config(
      "start = 2004Q1\n"
      "n_particles = 1500\n"
      "seed = 424242\n"
      "synth.quarters = 40\n" +
      extra);
  std::ostringstream null;
  cmd_synth(gen, t.dir / "synth", null);
  return load_config(t.dir / "synth" / "synth_config.txt");
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(RESERVES_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("synth then estimate end to end, deterministic across engines") {
  TempDir t("estimate");
  AppConfig cfg = synth_bound_config(t);
  cfg.run.n_particles = 1500;

  std::ostringstream log_a, log_b;
  cfg.run.engine = Engine::kParallel;
  cfg.run.threads = 2;
  cmd_estimate(cfg, t.dir / "a", log_a);
  cfg.run.engine = Engine::kSerial;
  cmd_estimate(cfg, t.dir / "b", log_b);

  for (const char* name : {"summary.csv", "goodness.csv", "equity_share.csv",
                           "metadata.json"}) {
    CAPTURE(std::string(name));
    REQUIRE(fs::exists(t.dir / "a" / name));
    CHECK(slurp(t.dir / "a" / name) == slurp(t.dir / "b" / name));
  }
  CHECK(log_a.str() == log_b.str());
  CHECK(log_a.str().find("final quarter") != std::string::npos);
}

TEST_CASE("sweep at the default point reproduces the estimate outputs") {
  TempDir t("sweep");
  AppConfig cfg = synth_bound_config(t);

  std::ostringstream null;
  cmd_estimate(cfg, t.dir / "est", null);
  cmd_sweep(cfg, SweepAxis::kMaturity, {"7"}, t.dir / "sw", null);

  CHECK(slurp(t.dir / "est" / "summary.csv") ==
        slurp(t.dir / "sw" / "maturity=7" / "summary.csv"));
  CHECK(fs::exists(t.dir / "sw" / "sweep_summary.csv"));
}

TEST_CASE("maturity sweep is invariant when returns are maturity-invariant") {
  TempDir t("flat");
  // Constant yields: zero innovation vol makes every maturity equivalent.
  AppConfig cfg = synth_bound_config(t, "synth.yield_vol = 0\n");

  std::ostringstream null;
  cmd_sweep(cfg, SweepAxis::kMaturity, {"2", "5", "7", "10"}, t.dir / "sw", null);
  std::string base = slurp(t.dir / "sw" / "maturity=2" / "summary.csv");
  for (const char* point : {"maturity=5", "maturity=7", "maturity=10"})
    CHECK(base == slurp(t.dir / "sw" / point / "summary.csv"));
}

TEST_CASE("wider prior produces weakly wider first-quarter intervals") {
  TempDir t("width");
  AppConfig cfg = synth_bound_config(t);

  std::ostringstream null;
  cmd_sweep(cfg, SweepAxis::kPriorWidth, {"0.5", "2"}, t.dir / "sw", null);

  auto first_quarter_width = [&](const std::string& point) {
    csv::Table s = csv::read(t.dir / "sw" / point / "summary.csv");
    std::size_t cq = s.column("quarter");
    std::size_t cc = s.column("currency");
    std::size_t lo = s.column("p10");
    std::size_t hi = s.column("p90");
    std::string first = s.rows.front()[cq];
    for (std::size_t r = 0; r < s.rows.size(); ++r)
      if (s.rows[r][cq] == first && s.rows[r][cc] == "USD")
        return csv::parse_double(s, r, hi) - csv::parse_double(s, r, lo);
    FAIL("USD row not found");
    return 0.0;
  };
  CHECK(first_quarter_width("prior_width=0.5") <=
        first_quarter_width("prior_width=2") + 1e-12);
}

TEST_CASE("distribution sweep runs all three densities") {
  TempDir t("dist");
  AppConfig cfg = synth_bound_config(t, "synth.quarters = 16\n");
  std::ostringstream null;
  cmd_sweep(cfg, SweepAxis::kDistribution, {"laplace", "normal", "cauchy"},
            t.dir / "sw", null);
  std::string laplace = slurp(t.dir / "sw" / "distribution=laplace" / "summary.csv");
  std::string normal = slurp(t.dir / "sw" / "distribution=normal" / "summary.csv");
  std::string cauchy = slurp(t.dir / "sw" / "distribution=cauchy" / "summary.csv");
  CHECK(laplace != normal);
  CHECK(laplace != cauchy);
  csv::Table stacked = csv::read(t.dir / "sw" / "sweep_summary.csv");
  CHECK(stacked.header.front() == "distribution");
}

TEST_CASE("calibrate on self-consistent synthetic data") {
  TempDir t("calib");
  AppConfig cfg = synth_bound_config(
      t, "synth.quarters = 100\nsynth.noise_mode = pipeline\n");

  std::ostringstream log;
  std::vector<double> levels = {0.2, 0.5, 0.8};
  cmd_calibrate(cfg, levels, t.dir / "cal", log);

  csv::Table c = csv::read(t.dir / "cal" / "calibration.csv");
  std::size_t cl = c.column("level");
  std::size_t cc = c.column("currency");
  std::size_t cv = c.column("coverage");
  int checked = 0;
  for (std::size_t r = 0; r < c.rows.size(); ++r) {
    if (c.rows[r][cc] != "USD") continue;
    double level = csv::parse_double(c, r, cl);
    double cov = csv::parse_double(c, r, cv);
    CHECK(cov >= level - 0.2);
    CHECK(cov <= level + 0.2);
    ++checked;
  }
  CHECK(checked == 3);
}

TEST_CASE("baseline oscillates at least as much as the filter medians") {
  TempDir t("baseline");
  AppConfig cfg = synth_bound_config(t);

  std::ostringstream null;
  BaselineSeries baseline = cmd_baseline(cfg, t.dir / "base", null);
  EstimateResult est = cmd_estimate(cfg, t.dir / "est", null);
  REQUIRE(fs::exists(t.dir / "base" / "baseline.csv"));

  auto variance = [](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= double(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return ss / double(v.size());
  };
  std::vector<double> base_usd, filt_usd;
  for (std::size_t w = 0; w < baseline.size(); ++w)
    base_usd.push_back(baseline.shares[w * baseline.n_ccy]);
  std::size_t p50 = 2;
  for (std::size_t q = 0; q < est.summary.size(); ++q)
    filt_usd.push_back(est.summary.quantile(q, 0, p50));
  CHECK(variance(base_usd) >= variance(filt_usd));
}

TEST_CASE("equity share command writes the series") {
  TempDir t("equity");
  AppConfig cfg = synth_bound_config(t);
  std::ostringstream null;
  EquityShareSeries series = cmd_equity_share(cfg, t.dir / "eq", null);
  REQUIRE(fs::exists(t.dir / "eq" / "equity_share.csv"));
  csv::Table tab = csv::read(t.dir / "eq" / "equity_share.csv");
  CHECK(tab.rows.size() == series.size());
  for (double x : series.x) {
    CHECK(x >= 0.0);
    CHECK(x <= 1.0);
  }
}

TEST_CASE("cli exit codes follow the error taxonomy") {
  TempDir t("cli");
  // 2: unreadable config.
  CHECK(run_cli("estimate --config " + (t.dir / "missing.txt").string()) == 2);

  // 2: bad config value.
  {
    std::ofstream bad(t.dir / "bad.txt");
    bad << "gamma = 0.9\nstart = 2004Q1\nend = 2010Q4\n";
  }
  CHECK(run_cli("estimate --config " + (t.dir / "bad.txt").string()) == 2);

  // 3: config fine, data files missing.
  {
    std::ofstream cfg(t.dir / "nodata.txt");
    cfg << "start = 2004Q1\nend = 2010Q4\n"
        << "data.reserves = " << (t.dir / "none.csv").string() << "\n"
        << "data.rates = x\ndata.yields = x\ndata.equity = x\n"
        << "data.sdr = x\ndata.cofer = x\n";
  }
  CHECK(run_cli("estimate --config " + (t.dir / "nodata.txt").string()) == 3);

  // 0: a successful synth + estimate round trip.
  {
    std::ofstream cfg(t.dir / "synth.txt");
    cfg << "start = 2004Q1\nn_particles = 400\nsynth.quarters = 12\nseed = 5\n";
  }
  CHECK(run_cli("synth --config " + (t.dir / "synth.txt").string() +
                " --out-dir " + (t.dir / "out").string()) == 0);
  CHECK(run_cli("estimate --config " +
                (t.dir / "out" / "synth_config.txt").string() + " --out-dir " +
                (t.dir / "est").string()) == 0);
}
