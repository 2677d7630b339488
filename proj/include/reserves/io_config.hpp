#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "reserves/panels.hpp"
#include "reserves/particle_filter.hpp"
#include "reserves/synthetic.hpp"

namespace reserves {

struct DataPaths {
  std::filesystem::path reserves;
  std::filesystem::path rates;
  std::filesystem::path yields;
  std::filesystem::path equity;
  std::filesystem::path sdr;
  std::filesystem::path cofer;
  std::optional<std::filesystem::path> reported;

  std::vector<std::filesystem::path> all() const;
};

/// Fully parsed run configuration: model settings plus input locations.
struct AppConfig {
  RunConfig run;
  DataPaths paths;
  SynthSpec synth;
};

/// Per-load notes: COFER residual renormalization and similar adjustments.
struct LoadReport {
  std::map<Quarter, double> cofer_renorm;  // factor applied per quarter
  std::vector<std::string> notes;
};

/// All inputs aligned to the configured quarter grid and currency order.
/// COFER and reported shares are stored exactly as read (restricted to the
/// model currencies); normalize with `normalize_rows` before use. The
/// residual weight dropped from COFER is recorded in the load report.
struct CountryDataset {
  CurrencySet currencies;
  Quarter start;
  Quarter end;
  ReservePanel reserves;
  MarketPanel market;
  SharesSeries cofer;      // raw, covers start..end
  ReportedShares reported; // raw, sparse
  LoadReport report;
};

/// Parse and validate flat key-value config text. Unknown keys are an
/// error; absent keys take the model defaults.
AppConfig parse_config(const std::string& text);
AppConfig load_config(const std::filesystem::path& path);

/// Fill an unset quarter range from the reserves file's span.
void resolve_range(RunConfig& config, const DataPaths& paths);

/// Row-wise renormalization onto the simplex.
SharesSeries normalize_rows(const SharesSeries& raw);
std::vector<double> normalize_row(std::span<const double> raw);

/// Load, validate, and align every input panel. Errors name the file, row,
/// and field.
CountryDataset load_dataset(const DataPaths& paths, const RunConfig& config);

/// Serialize a dataset back to the input schemas (used by the synthetic
/// generator and the losslessness checks).
void write_dataset(const std::filesystem::path& dir, const CountryDataset& dataset);

}  // namespace reserves
