#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "reserves/state_model.hpp"

namespace reserves::kernels {

// Hard cap on the currency count so per-particle scratch lives on the stack.
inline constexpr std::size_t kMaxCurrencies = 32;

/// Per-quarter inputs shared by every particle step.
struct StepInputs {
  double y = 0.0;
  double sigma = 1.0;
  double equity_share = 0.0;
  std::span<const double> r_eq;
  std::span<const double> r_bd;
  std::span<const double> de;
  const ModelParams* model = nullptr;
  std::size_t usd_index = 0;
  std::uint64_t seed = 0;
  std::uint32_t t = 0;  // filter step index, keys the RNG substreams
};

/// Advance one particle through the transition and score it against the
/// observation. Pure function of (src, inputs, particle index).
struct StepResult {
  double log_weight;
  double mu;
  bool clamped;
};

StepResult particle_step(std::span<const double> src, std::span<double> dst,
                         const StepInputs& in, std::uint32_t particle);

/// Drivers over the whole ensemble. The serial version is the reference
/// implementation; the parallel version must produce bit-identical output
/// for any thread count.
void propagate_and_weight_serial(std::span<const double> src,
                                 std::span<double> dst,
                                 std::span<double> log_weight,
                                 std::span<double> mu,
                                 std::uint64_t& clamp_events,
                                 const StepInputs& in, std::size_t n,
                                 std::size_t dim);

void propagate_and_weight_parallel(std::span<const double> src,
                                   std::span<double> dst,
                                   std::span<double> log_weight,
                                   std::span<double> mu,
                                   std::uint64_t& clamp_events,
                                   const StepInputs& in, std::size_t n,
                                   std::size_t dim, int threads);

/// Prior draws for ensemble initialization, one substream per particle.
void init_particles_serial(std::span<const double> shape,
                           std::span<double> shares, std::uint64_t seed,
                           std::size_t n, std::size_t dim);

void init_particles_parallel(std::span<const double> shape,
                             std::span<double> shares, std::uint64_t seed,
                             std::size_t n, std::size_t dim, int threads);

/// Shared quantile core: sorts the (value, weight) pairs in place and writes
/// the smallest value whose cumulative weight reaches each probability.
/// probs must be sorted ascending.
void sorted_weighted_quantiles(std::vector<std::pair<double, double>>& pairs,
                               std::span<const double> probs,
                               std::span<double> out);

/// Weighted quantiles of every currency column of the ensemble.
/// `out` has dim x probs entries. probs must be sorted ascending.
void column_quantiles_serial(std::span<const double> shares,
                             std::span<const double> weights, std::size_t n,
                             std::size_t dim, std::span<const double> probs,
                             std::span<double> out);

void column_quantiles_parallel(std::span<const double> shares,
                               std::span<const double> weights, std::size_t n,
                               std::size_t dim, std::span<const double> probs,
                               std::span<double> out, int threads);

}  // namespace reserves::kernels
