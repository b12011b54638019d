#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "photostat/detector.hpp"
#include "photostat/field.hpp"

namespace photostat {

enum class CorrelationMode { kAuto, kCross };

std::string_view to_string(CorrelationMode mode);

/// Normalized pair-count histogram. Bin k (0 <= k < 2K+1) is centered on
/// tau_k = (k - K) * bin_width, so the histogram covers
/// [-(K + 1/2) bin_width, (K + 1/2) bin_width) with a bin centered on zero.
///
///   g2[k]    = counts[k] / (rate_a * rate_b * total_time * bin_width)
///   sigma[k] = g2[k] / sqrt(counts[k])      (0 for empty bins)
///
/// total_time is the span of reference (channel a) tags that were correlated,
/// i.e. the record length minus one histogram span at each end, so every
/// counted lag is fully covered by both records.
class CorrelationHistogram {
 public:
  CorrelationHistogram() = default;
  /// Empty histogram (no counts, zero total time).
  CorrelationHistogram(double bin_width, std::size_t half_bins, CorrelationMode mode);
  CorrelationHistogram(double bin_width, std::size_t half_bins, CorrelationMode mode,
                       std::vector<std::uint64_t> counts, double total_time, double rate_a,
                       double rate_b);

  double bin_width() const noexcept { return bin_width_; }
  std::size_t half_bins() const noexcept { return half_bins_; }
  double window() const noexcept { return static_cast<double>(half_bins_) * bin_width_; }
  /// Half-width of the covered lag range, (K + 1/2) * bin_width.
  double span() const noexcept { return (static_cast<double>(half_bins_) + 0.5) * bin_width_; }
  std::size_t size() const noexcept { return counts_.size(); }
  std::size_t center_index() const noexcept { return half_bins_; }
  double tau(std::size_t index) const noexcept {
    return (static_cast<double>(index) - static_cast<double>(half_bins_)) * bin_width_;
  }
  /// Index of the bin whose center is nearest to tau (clamped to range).
  std::size_t nearest_index(double tau) const noexcept;

  std::span<const std::uint64_t> counts() const noexcept { return counts_; }
  std::span<const double> g2() const noexcept { return g2_; }
  std::span<const double> sigma() const noexcept { return sigma_; }
  double total_time() const noexcept { return total_time_; }
  double rate_a() const noexcept { return rate_a_; }
  double rate_b() const noexcept { return rate_b_; }
  CorrelationMode mode() const noexcept { return mode_; }
  bool empty() const noexcept { return total_time_ == 0.0; }
  std::uint64_t total_pairs() const noexcept;

 private:
  void normalize();

  double bin_width_ = 0.0;
  std::size_t half_bins_ = 0;
  CorrelationMode mode_ = CorrelationMode::kCross;
  std::vector<std::uint64_t> counts_;
  std::vector<double> g2_;
  std::vector<double> sigma_;
  double total_time_ = 0.0;
  double rate_a_ = 0.0;
  double rate_b_ = 0.0;
};

/// K = round(window / bin_width); requires window >= 10 * bin_width.
std::size_t half_bins_for(double bin_width, double window);

/// Full multi-start correlation: every pair (t_a, t_b) with t_b - t_a inside
/// the histogram span is counted, for reference tags t_a at least one span
/// away from both record ends. Two-pointer sweep, O(N_a + N_b + pairs).
CorrelationHistogram cross_correlate(const TagStream& a, const TagStream& b, double bin_width,
                                     double window);

/// Same machinery for the two detectors behind one splitter (one arm
/// blocked); the result is tagged as an autocorrelation g2(tau) of the source.
CorrelationHistogram autocorrelate(const TagStream& a, const TagStream& b, double bin_width,
                                   double window);

/// Pools two histograms of identical shape: counts and total time add, rates
/// are re-derived so that rate_a * rate_b * total_time equals the sum of the
/// parts' normalizations.
CorrelationHistogram merge(const CorrelationHistogram& h1, const CorrelationHistogram& h2);

/// Dither-averaged cross-correlation evaluated directly on a field trace
/// from the six surviving terms of the four-fold field product:
///   1/4 [ G(tau) + G(tau) + G(tau + delta) + G(tau - delta)
///         - 2 Re<a*(t+delta) a*(t+tau) a(t+delta+tau) a(t)> ]
/// normalized by the product of the two mean port intensities, where
/// G(s) = <I(t) I(t+s)>. Every delay and tau must lie on the sample grid.
std::vector<double> oracle_six_terms(const FieldTrace& trace, double delta,
                                     std::span<const double> tau_grid);

/// Same as oracle_six_terms with delay and lags given in samples.
std::vector<double> oracle_six_terms_lags(const FieldTrace& trace, std::size_t delta_samples,
                                          std::span<const std::int64_t> lags);

}  // namespace photostat
