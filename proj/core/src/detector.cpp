#include "photostat/detector.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "photostat/error.hpp"
#include "photostat/rng.hpp"

namespace photostat {

void DetectorConfig::validate() const {
  require(efficiency > 0.0 && efficiency <= 1.0, "detector efficiency must lie in (0, 1]");
  require(jitter_sigma >= 0.0 && std::isfinite(jitter_sigma),
          "detector jitter must be finite and >= 0");
  require(dead_time >= 0.0 && std::isfinite(dead_time), "dead time must be finite and >= 0");
}

void TagStream::validate() const {
  require(duration > 0.0 && std::isfinite(duration), "tag stream duration must be positive");
  for (std::size_t i = 1; i < tags.size(); ++i) {
    if (!(tags[i] > tags[i - 1])) {
      std::ostringstream os;
      os << "channel " << channel << ": tag " << i << " (" << tags[i]
         << " s) does not follow tag " << i - 1 << " (" << tags[i - 1] << " s)";
      fail(ErrorKind::kUnsorted, os.str());
    }
  }
  if (!tags.empty()) {
    require(tags.front() >= 0.0 && tags.back() <= duration,
            "tag stream has timestamps outside [0, duration]");
  }
}

std::vector<double> apply_dead_time(std::span<const double> sorted_tags, double dead_time) {
  std::vector<double> kept;
  kept.reserve(sorted_tags.size());
  for (const double t : sorted_tags) {
    if (kept.empty() || t - kept.back() > dead_time) kept.push_back(t);
  }
  return kept;
}

TagStream detect(const IntensityTrace& intensity, double flux, const DetectorConfig& cfg,
                 std::uint32_t channel) {
  cfg.validate();
  require(intensity.dt > 0.0, "intensity trace dt must be positive");
  require(flux > 0.0 && std::isfinite(flux), "flux must be positive");

  const double dt = intensity.dt;
  const double scale = cfg.efficiency * flux * dt;
  NormalSource rng(cfg.seed);

  std::vector<double> tags;
  tags.reserve(static_cast<std::size_t>(scale * static_cast<double>(intensity.size()) * 1.1) + 16);
  const auto& samples = intensity.samples;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double p = scale * samples[i];
    if (p >= 0.1) throw RateTooHighError(i, p);
    if (rng.uniform() < p) tags.push_back((static_cast<double>(i) + rng.uniform()) * dt);
  }

  const double duration = intensity.duration();
  if (cfg.jitter_sigma > 0.0) {
    for (auto& t : tags) t += cfg.jitter_sigma * rng();
    std::sort(tags.begin(), tags.end());
    const auto first = std::lower_bound(tags.begin(), tags.end(), 0.0);
    const auto last = std::upper_bound(first, tags.end(), duration);
    tags.erase(last, tags.end());
    tags.erase(tags.begin(), first);
  }

  TagStream out{.tags = apply_dead_time(tags, cfg.dead_time), .duration = duration,
                .channel = channel};
  if (out.size() < 1000) {
    std::ostringstream os;
    os << "channel " << channel << " recorded only " << out.size() << " tags";
    warn(os.str());
  }
  return out;
}

}  // namespace photostat
