#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "photostat/interferometer.hpp"

namespace photostat {

/// Photon-counting detector. Defaults are typical superconducting-nanowire
/// values; two such detectors give ~127 ps pair resolution.
struct DetectorConfig {
  double efficiency = 0.15;
  double jitter_sigma = 90e-12;  // seconds, Gaussian standard deviation
  double dead_time = 30e-9;      // seconds
  std::uint64_t seed = 0;

  static DetectorConfig ideal(std::uint64_t seed = 0) { return {1.0, 0.0, 0.0, seed}; }
  void validate() const;
};

/// Strictly increasing detection timestamps (seconds) in [0, duration].
struct TagStream {
  std::vector<double> tags;
  double duration = 0.0;
  std::uint32_t channel = 0;

  std::size_t size() const noexcept { return tags.size(); }
  double rate() const noexcept {
    return duration > 0.0 ? static_cast<double>(tags.size()) / duration : 0.0;
  }
  /// Throws kUnsorted if tags are not strictly increasing, kValidation if a
  /// tag lies outside [0, duration].
  void validate() const;
};

/// Bernoulli thinning of an intensity trace: sample i clicks with probability
///   p_i = efficiency * flux * intensity[i] * dt,
/// the click is placed uniformly inside the sample, jittered, re-sorted and
/// finally dead-time filtered. Throws RateTooHighError if any p_i >= 0.1.
TagStream detect(const IntensityTrace& intensity, double flux, const DetectorConfig& cfg,
                 std::uint32_t channel = 0);

/// Keeps a tag only if it is later than the previously kept tag by more than
/// dead_time (strictly later when dead_time is 0). Input must be sorted.
std::vector<double> apply_dead_time(std::span<const double> sorted_tags, double dead_time);

}  // namespace photostat
