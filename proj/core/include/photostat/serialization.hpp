#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "photostat/analysis.hpp"
#include "photostat/correlator.hpp"

namespace photostat {

/// Provenance carried in every JSON sidecar.
struct HistogramMeta {
  std::string config_hash;
  std::optional<double> delta;  // interferometer delay the histogram was measured at
};

/// CSV columns tau_s,g2,sigma,counts.
std::string histogram_csv(const CorrelationHistogram& histogram);
/// JSON sidecar: bin_width, window, half_bins, rates, total_time, mode,
/// config_hash and delta.
std::string histogram_sidecar_json(const CorrelationHistogram& histogram,
                                   const HistogramMeta& meta);

/// Writes `<stem>.csv` and `<stem>.json` atomically.
void write_histogram(const std::filesystem::path& stem, const CorrelationHistogram& histogram,
                     const HistogramMeta& meta);

struct LoadedHistogram {
  CorrelationHistogram histogram;
  HistogramMeta meta;
};

/// Accepts either the CSV or the JSON path; the sibling is located by
/// extension. Counts come from the CSV, normalization from the sidecar.
LoadedHistogram read_histogram(const std::filesystem::path& path);

std::string fit_report_json(const FitReport& report, const std::string& config_hash = {});
FitReport parse_fit_report(const std::string& json_text);

}  // namespace photostat
