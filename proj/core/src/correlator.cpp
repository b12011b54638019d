#include "photostat/correlator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "photostat/error.hpp"

namespace photostat {

std::string_view to_string(CorrelationMode mode) {
  return mode == CorrelationMode::kAuto ? "auto" : "cross";
}

CorrelationHistogram::CorrelationHistogram(double bin_width, std::size_t half_bins,
                                           CorrelationMode mode)
    : CorrelationHistogram(bin_width, half_bins, mode,
                           std::vector<std::uint64_t>(2 * half_bins + 1, 0), 0.0, 0.0, 0.0) {}

CorrelationHistogram::CorrelationHistogram(double bin_width, std::size_t half_bins,
                                           CorrelationMode mode,
                                           std::vector<std::uint64_t> counts, double total_time,
                                           double rate_a, double rate_b)
    : bin_width_(bin_width),
      half_bins_(half_bins),
      mode_(mode),
      counts_(std::move(counts)),
      total_time_(total_time),
      rate_a_(rate_a),
      rate_b_(rate_b) {
  require(bin_width > 0.0 && std::isfinite(bin_width), "bin width must be positive");
  if (counts_.size() != 2 * half_bins + 1) {
    fail(ErrorKind::kShapeMismatch, "histogram counts do not match 2*half_bins+1 bins");
  }
  require(total_time >= 0.0 && rate_a >= 0.0 && rate_b >= 0.0,
          "histogram total time and rates must be non-negative");
  normalize();
}

void CorrelationHistogram::normalize() {
  g2_.assign(counts_.size(), 0.0);
  sigma_.assign(counts_.size(), 0.0);
  const double expected = rate_a_ * rate_b_ * total_time_ * bin_width_;
  if (!(expected > 0.0)) return;
  for (std::size_t k = 0; k < counts_.size(); ++k) {
    const auto c = static_cast<double>(counts_[k]);
    g2_[k] = c / expected;
    sigma_[k] = counts_[k] > 0 ? g2_[k] / std::sqrt(c) : 0.0;
  }
}

std::size_t CorrelationHistogram::nearest_index(double tau) const noexcept {
  const double k = std::round(tau / bin_width_) + static_cast<double>(half_bins_);
  if (k <= 0.0) return 0;
  return std::min(static_cast<std::size_t>(k), counts_.size() - 1);
}

std::uint64_t CorrelationHistogram::total_pairs() const noexcept {
  std::uint64_t sum = 0;
  for (const auto c : counts_) sum += c;
  return sum;
}

std::size_t half_bins_for(double bin_width, double window) {
  require(bin_width > 0.0 && std::isfinite(bin_width), "bin width must be positive");
  require(window >= 10.0 * bin_width * (1.0 - 1e-9), "window must be at least 10 bin widths");
  return static_cast<std::size_t>(std::llround(window / bin_width));
}

namespace {

CorrelationHistogram correlate(const TagStream& a, const TagStream& b, double bin_width,
                               double window, CorrelationMode mode) {
  const std::size_t half = half_bins_for(bin_width, window);
  a.validate();
  b.validate();
  const double duration = a.duration;
  if (std::abs(a.duration - b.duration) > 1e-9 * std::max(a.duration, b.duration)) {
    std::ostringstream os;
    os << "stream durations differ: " << a.duration << " s vs " << b.duration << " s";
    fail(ErrorKind::kDurationMismatch, os.str());
  }

  CorrelationHistogram shape(bin_width, half, mode);
  const double edge = shape.span();
  const double total_time = duration - 2.0 * edge;
  if (!(total_time > 0.0)) {
    std::ostringstream os;
    os << "record of " << duration << " s is shorter than two histogram spans (" << 2.0 * edge
       << " s)";
    fail(ErrorKind::kTraceTooShort, os.str());
  }

  std::vector<std::uint64_t> counts(2 * half + 1, 0);
  const double inv_width = 1.0 / bin_width;
  const double offset = static_cast<double>(half) + 0.5;
  const auto bins = static_cast<std::int64_t>(counts.size());
  // Candidate window is slightly wider than the span; the bin formula below
  // (shared with the brute-force reference) makes the final decision.
  const double reach = edge * (1.0 + 1e-9);

  const auto& ta = a.tags;
  const auto& tb = b.tags;
  const auto first = std::lower_bound(ta.begin(), ta.end(), edge);
  const auto last = std::upper_bound(first, ta.end(), duration - edge);
  std::size_t lo = 0;
  for (auto it = first; it != last; ++it) {
    const double t = *it;
    while (lo < tb.size() && tb[lo] < t - reach) ++lo;
    for (std::size_t j = lo; j < tb.size() && tb[j] <= t + reach; ++j) {
      const auto k = static_cast<std::int64_t>(std::floor((tb[j] - t) * inv_width + offset));
      if (k >= 0 && k < bins) ++counts[static_cast<std::size_t>(k)];
    }
  }

  const auto references = static_cast<double>(last - first);
  return CorrelationHistogram(bin_width, half, mode, std::move(counts), total_time,
                              references / total_time, b.rate());
}

}  // namespace

CorrelationHistogram cross_correlate(const TagStream& a, const TagStream& b, double bin_width,
                                     double window) {
  return correlate(a, b, bin_width, window, CorrelationMode::kCross);
}

CorrelationHistogram autocorrelate(const TagStream& a, const TagStream& b, double bin_width,
                                   double window) {
  return correlate(a, b, bin_width, window, CorrelationMode::kAuto);
}

CorrelationHistogram merge(const CorrelationHistogram& h1, const CorrelationHistogram& h2) {
  if (h1.bin_width() != h2.bin_width() || h1.half_bins() != h2.half_bins()) {
    fail(ErrorKind::kShapeMismatch, "cannot merge histograms with different bins");
  }
  if (h1.mode() != h2.mode()) {
    fail(ErrorKind::kShapeMismatch, "cannot merge auto- and cross-correlation histograms");
  }
  if (h2.empty() && h2.total_pairs() == 0) return h1;
  if (h1.empty() && h1.total_pairs() == 0) return h2;

  std::vector<std::uint64_t> counts(h1.size());
  for (std::size_t k = 0; k < counts.size(); ++k) counts[k] = h1.counts()[k] + h2.counts()[k];
  const double total_time = h1.total_time() + h2.total_time();
  const double refs = h1.rate_a() * h1.total_time() + h2.rate_a() * h2.total_time();
  const double norm = h1.rate_a() * h1.rate_b() * h1.total_time() +
                      h2.rate_a() * h2.rate_b() * h2.total_time();
  const double rate_a = refs / total_time;
  const double rate_b = refs > 0.0 ? norm / refs : 0.0;
  return CorrelationHistogram(h1.bin_width(), h1.half_bins(), h1.mode(), std::move(counts),
                              total_time, rate_a, rate_b);
}

}  // namespace photostat
