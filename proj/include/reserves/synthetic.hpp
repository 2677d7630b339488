#pragma once

#include <cstdint>
#include <filesystem>

#include "reserves/panels.hpp"
#include "reserves/particle_filter.hpp"

namespace reserves {

/// Knobs for the synthetic data generator.
struct SynthSpec {
  /// kFixed draws noise at a constant scale `noise_sigma`; kPipeline solves
  /// for the scale the SDR/IQR construction recovers from the finished
  /// series, making the emitted dataset self-consistent end to end.
  enum class NoiseMode { kFixed, kPipeline };

  int quarters = 75;           // observation quarters
  double fx_vol = 0.05;        // quarterly log-FX innovation std (non-USD)
  double yield_level = 0.03;   // long-run annual yield
  double yield_vol = 0.002;    // quarterly yield innovation std
  double equity_drift = 0.015; // quarterly
  double equity_vol = 0.08;    // quarterly
  NoiseMode noise_mode = NoiseMode::kFixed;
  double noise_sigma = 0.002;  // observation error scale (fixed mode)
  double purchase_mean = 0.01; // purchase rate mean
  double purchase_vol = 0.02;
  double equity_share = 0.05;  // true x
  bool start_at_prior_mean = true;  // otherwise draw beta_0 from the prior
};

/// A generated panel plus the hidden truth used to produce it.
struct SynthPanel {
  ReservePanel reserves;
  ObservationSeries obs;       // sigma = the exact generating scale
  ReturnPanel returns;
  SharesSeries true_shares;    // per observation quarter, the state behind y_t
  std::vector<double> equity_share;

  FilterData filter_data(const RunConfig& config) const;
};

/// Draw a share path from the transition, draw observation noise from the
/// configured distribution, and emit reserve stocks and purchase flows
/// consistent with the accounting identity. usd_share_var == 0 degenerates
/// to a constant path.
SynthPanel simulate_panel(const RunConfig& config, const SynthSpec& spec);

/// Write a complete loadable dataset (reserves, rates, yields, equity,
/// daily SDR, COFER, sparse reported truth, true path) under `dir`.
void write_synthetic_dataset(const std::filesystem::path& dir,
                             const RunConfig& config, const SynthSpec& spec);

}  // namespace reserves
