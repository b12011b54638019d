#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

#include "photostat/correlator.hpp"
#include "photostat/detector.hpp"
#include "photostat/field.hpp"
#include "photostat/interferometer.hpp"

namespace photostat {

struct CorrelatorConfig {
  double bin_width = 164e-12;
  double window = 0.0;  // 0: 4 * (delta + 5 * longest source correlation time)
};

struct RunConfig {
  double duration = 0.0;  // per realization, seconds
  double dt = 0.0;
  double flux = 1e8;      // photons per second entering the interferometer
  std::size_t realizations = 1;
  std::uint64_t master_seed = 0;
};

/// One full pipeline description. Per-realization seeds for the field, the
/// dither and both detectors are derived from run.master_seed; the seeds
/// stored in the sub-configs are ignored.
struct ExperimentConfig {
  SourceModel source;
  InterferometerConfig interferometer;
  std::array<DetectorConfig, 2> detectors{};
  CorrelatorConfig correlator;
  RunConfig run;
  std::string outputs = "photostat-out";

  double window() const;
  CorrelationMode mode() const noexcept;
  void validate() const;
};

/// Parses a JSON document. Missing keys take their defaults; unknown keys
/// are rejected.
ExperimentConfig parse_experiment_config(const std::string& json_text);
/// Canonical JSON form; parse(to_json(c)) reproduces c exactly.
std::string experiment_config_json(const ExperimentConfig& config);
/// FNV-1a over the canonical JSON with the output directory removed, as 16
/// hex digits.
std::string config_hash(const ExperimentConfig& config);

struct RealizationTags {
  TagStream a;
  TagStream b;
};

/// Field, interferometer and both detectors for realization `index`. Each
/// detector sees half of the source flux.
RealizationTags simulate_realization(const ExperimentConfig& config, std::size_t index);

struct ExperimentResult {
  CorrelationHistogram histogram;
  std::size_t tags_a = 0;
  std::size_t tags_b = 0;
};

/// Called from worker threads, once per realization, in no particular order.
using RealizationSink = std::function<void(std::size_t index, const RealizationTags& tags)>;

/// Runs every realization on `jobs` worker threads and merges the per-
/// realization histograms in index order, so the result does not depend on
/// `jobs`.
ExperimentResult run_experiment(const ExperimentConfig& config, unsigned jobs = 1,
                                const RealizationSink& sink = {});

/// Runs `task(i)` for i in [0, count) on up to `jobs` threads. The first
/// exception thrown by any task is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& task);

}  // namespace photostat
