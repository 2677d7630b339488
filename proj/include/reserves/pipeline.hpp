#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "reserves/io_config.hpp"
#include "reserves/particle_filter.hpp"
#include "reserves/simplex_lsq.hpp"

namespace reserves {

inline constexpr const char* kVersion = "0.1.0";

/// End-to-end pipeline behind the CLI subcommands. Every command writes its
/// figure-ready files under `out_dir` and is deterministic given the config.

struct EstimateResult {
  FilterSummary summary;
  EquityShareSeries equity;
};

EstimateResult cmd_estimate(const AppConfig& config,
                            const std::filesystem::path& out_dir,
                            std::ostream& log);

enum class SweepAxis { kMaturity, kPriorWidth, kDistribution };

SweepAxis parse_sweep_axis(const std::string& name);

void cmd_sweep(const AppConfig& config, SweepAxis axis,
               const std::vector<std::string>& values,
               const std::filesystem::path& out_dir, std::ostream& log);

void cmd_calibrate(const AppConfig& config, std::span<const double> levels,
                   const std::filesystem::path& out_dir, std::ostream& log);

BaselineSeries cmd_baseline(const AppConfig& config,
                            const std::filesystem::path& out_dir,
                            std::ostream& log);

EquityShareSeries cmd_equity_share(const AppConfig& config,
                                   const std::filesystem::path& out_dir,
                                   std::ostream& log);

void cmd_synth(const AppConfig& config, const std::filesystem::path& out_dir,
               std::ostream& log);

/// Shared writers, exposed so tests can compare bytes.
void write_summary_csv(const std::filesystem::path& path,
                       const FilterSummary& summary, const CurrencySet& ccy);
void write_goodness_csv(const std::filesystem::path& path,
                        const FilterSummary& summary);
void write_metadata_json(const std::filesystem::path& path,
                         const AppConfig& config,
                         const FilterSummary& summary);

}  // namespace reserves
