// Times the serial reference kernels against the OpenMP kernels and checks
// they produce identical bits.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "reserves/filter_kernels.hpp"
#include "reserves/particle_filter.hpp"
#include "reserves/synthetic.hpp"

using namespace reserves;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  auto dt = std::chrono::steady_clock::now() - t0;
  return std::chrono::duration<double, std::milli>(dt).count();
}

RunConfig bench_config(int n_particles) {
  RunConfig cfg;
  cfg.currencies = CurrencySet({"USD", "EUR", "GBP", "JPY", "CAD", "AUD", "RMB"});
  cfg.start = Quarter{2004, 1};
  cfg.end = Quarter{2022, 3};
  cfg.n_particles = n_particles;
  cfg.prior.table = {22.3, 8.7, 0.7, 0.7, 0.3, 0.3, 0.3};
  cfg.seed = 20240915;
  return cfg;
}

void bench_step(int n_particles, int reps) {
  RunConfig cfg = bench_config(n_particles);
  SynthSpec spec;
  spec.quarters = 4;
  SynthPanel panel = simulate_panel(cfg, spec);
  FilterData data = panel.filter_data(cfg);

  const std::size_t n = std::size_t(n_particles);
  const std::size_t dim = cfg.currencies.size();
  ParticleEnsemble ens = init_particles(data.prior, n_particles, cfg.seed);
  std::vector<double> dst_serial(n * dim), dst_parallel(n * dim);
  std::vector<double> lw(n), mu(n);
  std::uint64_t clamps = 0;

  kernels::StepInputs in;
  in.y = data.obs.y[0];
  in.sigma = data.obs.sigma[0];
  in.equity_share = data.equity_share[0];
  in.r_eq = data.returns.eq_row(0);
  in.r_bd = data.returns.bond_row(0);
  in.de = data.returns.fx_row(0);
  in.model = &cfg.model;
  in.usd_index = cfg.currencies.usd_index();
  in.seed = cfg.seed;
  in.t = 0;

  auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r)
    kernels::propagate_and_weight_serial(ens.shares, dst_serial, lw, mu, clamps,
                                         in, n, dim);
  double serial_ms = ms_since(t0) / reps;

  t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r)
    kernels::propagate_and_weight_parallel(ens.shares, dst_parallel, lw, mu,
                                           clamps, in, n, dim, 0);
  double parallel_ms = ms_since(t0) / reps;

  bool identical = std::memcmp(dst_serial.data(), dst_parallel.data(),
                               n * dim * sizeof(double)) == 0;
  std::printf("propagate+weight  N=%-7d serial %8.2f ms  openmp %8.2f ms  "
              "speedup %.2fx  bit-identical %s\n",
              n_particles, serial_ms, parallel_ms, serial_ms / parallel_ms,
              identical ? "yes" : "NO");
}

void bench_full_run(int n_particles) {
  RunConfig cfg = bench_config(n_particles);
  SynthSpec spec;
  spec.quarters = 75;
  SynthPanel panel = simulate_panel(cfg, spec);
  FilterData data = panel.filter_data(cfg);

  cfg.engine = Engine::kSerial;
  auto t0 = std::chrono::steady_clock::now();
  FilterSummary serial = run_filter(cfg, data);
  double serial_ms = ms_since(t0);

  cfg.engine = Engine::kParallel;
  t0 = std::chrono::steady_clock::now();
  FilterSummary parallel = run_filter(cfg, data);
  double parallel_ms = ms_since(t0);

  bool identical = serial.quantiles == parallel.quantiles &&
                   serial.y_pred_median == parallel.y_pred_median &&
                   serial.ess == parallel.ess;
  std::printf("run_filter 75q    N=%-7d serial %8.2f ms  openmp %8.2f ms  "
              "speedup %.2fx  bit-identical %s\n",
              n_particles, serial_ms, parallel_ms, serial_ms / parallel_ms,
              identical ? "yes" : "NO");
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP max threads: %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP\n");
#endif
  bench_step(10000, 20);
  bench_step(100000, 5);
  bench_full_run(10000);
  bench_full_run(30000);
  return 0;
}
