#include "reserves/filter_kernels.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "reserves/errors.hpp"

namespace reserves::kernels {

namespace {

// Exceptions cannot cross an OpenMP join; capture the first one and rethrow
// on the calling thread.
class ExceptionRelay {
 public:
  template <typename F>
  void run(F&& f) noexcept {
    try {
      f();
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu_);
      if (!captured_) captured_ = std::current_exception();
    }
  }
  bool failed() const noexcept { return captured_ != nullptr; }
  void rethrow_if_failed() {
    if (captured_) std::rethrow_exception(captured_);
  }

 private:
  std::mutex mu_;
  std::exception_ptr captured_;
};

}  // namespace

StepResult particle_step(std::span<const double> src, std::span<double> dst,
                         const StepInputs& in, std::uint32_t particle) {
  rng::Stream rs(in.seed, particle, in.t, rng::StreamTag::kTransition);
  bool clamped = transition_sample(src, in.usd_index, *in.model, rs, dst);
  double mu = predict_observation(dst, in.equity_share, in.r_eq, in.r_bd, in.de);
  double lw = obs_loglik(in.y, mu, in.sigma, in.model->obs_dist);
  return {lw, mu, clamped};
}

void propagate_and_weight_serial(std::span<const double> src,
                                 std::span<double> dst,
                                 std::span<double> log_weight,
                                 std::span<double> mu,
                                 std::uint64_t& clamp_events,
                                 const StepInputs& in, std::size_t n,
                                 std::size_t dim) {
  std::uint64_t clamps = 0;
  for (std::size_t i = 0; i < n; ++i) {
    StepResult r = particle_step(src.subspan(i * dim, dim),
                                 dst.subspan(i * dim, dim), in,
                                 std::uint32_t(i));
    log_weight[i] = r.log_weight;
    mu[i] = r.mu;
    clamps += r.clamped ? 1 : 0;
  }
  clamp_events += clamps;
}

void propagate_and_weight_parallel(std::span<const double> src,
                                   std::span<double> dst,
                                   std::span<double> log_weight,
                                   std::span<double> mu,
                                   std::uint64_t& clamp_events,
                                   const StepInputs& in, std::size_t n,
                                   std::size_t dim, int threads) {
  std::uint64_t clamps = 0;
  ExceptionRelay relay;
  const std::int64_t count = std::int64_t(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(+ : clamps) \
    num_threads(threads > 0 ? threads : omp_get_max_threads())
#endif
  for (std::int64_t i = 0; i < count; ++i) {
    relay.run([&] {
      StepResult r = particle_step(src.subspan(std::size_t(i) * dim, dim),
                                   dst.subspan(std::size_t(i) * dim, dim), in,
                                   std::uint32_t(i));
      log_weight[std::size_t(i)] = r.log_weight;
      mu[std::size_t(i)] = r.mu;
      clamps += r.clamped ? 1 : 0;
    });
  }
  relay.rethrow_if_failed();
  clamp_events += clamps;
}

namespace {

inline void init_one(std::span<const double> shape, std::span<double> out,
                     std::uint64_t seed, std::uint32_t i) {
  rng::Stream rs(seed, i, 0, rng::StreamTag::kInit);
  rng::dirichlet(rs, shape, out);
}

}  // namespace

void init_particles_serial(std::span<const double> shape,
                           std::span<double> shares, std::uint64_t seed,
                           std::size_t n, std::size_t dim) {
  for (std::size_t i = 0; i < n; ++i)
    init_one(shape, shares.subspan(i * dim, dim), seed, std::uint32_t(i));
}

void init_particles_parallel(std::span<const double> shape,
                             std::span<double> shares, std::uint64_t seed,
                             std::size_t n, std::size_t dim, int threads) {
  ExceptionRelay relay;
  const std::int64_t count = std::int64_t(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) \
    num_threads(threads > 0 ? threads : omp_get_max_threads())
#endif
  for (std::int64_t i = 0; i < count; ++i)
    relay.run([&] {
      init_one(shape, shares.subspan(std::size_t(i) * dim, dim), seed,
               std::uint32_t(i));
    });
  relay.rethrow_if_failed();
}

void sorted_weighted_quantiles(std::vector<std::pair<double, double>>& pairs,
                               std::span<const double> probs,
                               std::span<double> out) {
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  double total = 0.0;
  for (const auto& [v, w] : pairs) total += w;
  double cum = 0.0;
  std::size_t pos = 0;
  for (std::size_t p = 0; p < probs.size(); ++p) {
    double target = probs[p] * total;
    while (pos < pairs.size() && cum + pairs[pos].second < target) {
      cum += pairs[pos].second;
      ++pos;
    }
    out[p] = pos < pairs.size() ? pairs[pos].first : pairs.back().first;
  }
}

namespace {

// Weighted quantiles of one column: sort (value, weight) by value, then take
// the smallest value whose cumulative weight reaches each probability.
void column_quantiles_one(std::span<const double> shares,
                          std::span<const double> weights, std::size_t n,
                          std::size_t dim, std::size_t ccy,
                          std::span<const double> probs,
                          std::span<double> out_row,
                          std::vector<std::pair<double, double>>& scratch) {
  scratch.clear();
  scratch.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    scratch.emplace_back(shares[i * dim + ccy], weights[i]);
  sorted_weighted_quantiles(scratch, probs, out_row);
}

}  // namespace

void column_quantiles_serial(std::span<const double> shares,
                             std::span<const double> weights, std::size_t n,
                             std::size_t dim, std::span<const double> probs,
                             std::span<double> out) {
  std::vector<std::pair<double, double>> scratch;
  for (std::size_t c = 0; c < dim; ++c)
    column_quantiles_one(shares, weights, n, dim, c, probs,
                         out.subspan(c * probs.size(), probs.size()), scratch);
}

void column_quantiles_parallel(std::span<const double> shares,
                               std::span<const double> weights, std::size_t n,
                               std::size_t dim, std::span<const double> probs,
                               std::span<double> out, int threads) {
  const std::int64_t count = std::int64_t(dim);
#ifdef _OPENMP
#pragma omp parallel num_threads(threads > 0 ? threads : omp_get_max_threads())
#endif
  {
    std::vector<std::pair<double, double>> scratch;
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
    for (std::int64_t c = 0; c < count; ++c)
      column_quantiles_one(shares, weights, n, dim, std::size_t(c), probs,
                           out.subspan(std::size_t(c) * probs.size(), probs.size()),
                           scratch);
  }
}

}  // namespace reserves::kernels
