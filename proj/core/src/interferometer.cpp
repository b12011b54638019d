#include "photostat/interferometer.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <sstream>

#include "photostat/error.hpp"
#include "photostat/rng.hpp"

namespace photostat {

double IntensityTrace::mean() const {
  if (samples.empty()) return 0.0;
  return std::accumulate(samples.begin(), samples.end(), 0.0) /
         static_cast<double>(samples.size());
}

void InterferometerConfig::validate() const {
  require(delta >= 0.0 && std::isfinite(delta), "interferometer delta must be >= 0");
  if (dither.kind == DitherKind::kRandomPhase) {
    require(dither.segment_duration > 0.0, "dither segment duration must be positive");
  }
}

void InterferometerConfig::validate_against(const SourceModel& source, double duration) const {
  validate();
  if (dither.kind != DitherKind::kRandomPhase || split_mode == SplitMode::kBlockArm) return;
  const double longest = source.longest_correlation_time();
  if (!(dither.segment_duration > 50.0 * longest)) {
    std::ostringstream os;
    os << "dither segment " << dither.segment_duration
       << " s must exceed 50 source correlation times (" << 50.0 * longest << " s)";
    fail(ErrorKind::kValidation, os.str());
  }
  if (!(dither.segment_duration < duration / 100.0)) {
    std::ostringstream os;
    os << "dither segment " << dither.segment_duration << " s must be shorter than duration/100 ("
       << duration / 100.0 << " s)";
    fail(ErrorKind::kValidation, os.str());
  }
}

std::size_t delay_samples(double delta, double dt) {
  require(dt > 0.0, "dt must be positive");
  require(delta >= 0.0, "delta must be non-negative");
  const double steps = delta / dt;
  const double rounded = std::round(steps);
  if (std::abs(steps - rounded) > 1e-6 * std::max(1.0, rounded)) {
    std::ostringstream os;
    os << "delta=" << delta << " s is not a multiple of dt=" << dt << " s (" << steps
       << " samples)";
    fail(ErrorKind::kDeltaOffGrid, os.str());
  }
  return static_cast<std::size_t>(rounded);
}

std::vector<double> dither_phases(std::size_t segments, std::uint64_t seed, std::size_t stratum) {
  if (stratum == 0) stratum = std::max<std::size_t>(segments, 1);
  Engine engine = make_engine(seed);
  std::vector<double> phases(segments);
  std::vector<std::size_t> order(stratum);
  for (std::size_t start = 0; start < segments; start += stratum) {
    const double offset = uniform01(engine);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), engine);
    const std::size_t stop = std::min(segments, start + stratum);
    for (std::size_t i = start; i < stop; ++i) {
      const double slot = (static_cast<double>(order[i - start]) + offset) /
                          static_cast<double>(stratum);
      phases[i] = 2.0 * std::numbers::pi * slot;
    }
  }
  return phases;
}

IntensityTrace blocked_arm_intensity(const FieldTrace& input) {
  input.validate();
  IntensityTrace out{.samples = std::vector<double>(input.size()), .dt = input.dt};
  for (std::size_t i = 0; i < input.size(); ++i) out.samples[i] = 0.5 * std::norm(input.samples[i]);
  return out;
}

PortIntensities transform(const FieldTrace& input, const InterferometerConfig& cfg) {
  input.validate();
  cfg.validate();
  const std::size_t shift = delay_samples(cfg.delta, input.dt);
  if (shift >= input.size()) {
    std::ostringstream os;
    os << "trace of " << input.size() << " samples is too short for a delay of " << shift
       << " samples";
    fail(ErrorKind::kTraceTooShort, os.str());
  }
  const std::size_t n = input.size() - shift;

  if (cfg.split_mode == SplitMode::kBlockArm) {
    IntensityTrace port{.samples = std::vector<double>(n), .dt = input.dt};
    const std::size_t offset = cfg.blocked_arm == Arm::kLong ? 0 : shift;
    for (std::size_t i = 0; i < n; ++i) port.samples[i] = 0.5 * std::norm(input.samples[i + offset]);
    return {port, port};
  }

  std::size_t segment = n;
  std::vector<double> phases{0.0};
  if (cfg.dither.kind == DitherKind::kRandomPhase) {
    segment = static_cast<std::size_t>(std::llround(cfg.dither.segment_duration / input.dt));
    require(segment > 0, "dither segment shorter than one sample");
    if (!(cfg.dither.segment_duration < input.duration() / 100.0)) {
      std::ostringstream os;
      os << "dither segment " << cfg.dither.segment_duration
         << " s must be shorter than duration/100 (" << input.duration() / 100.0 << " s)";
      fail(ErrorKind::kValidation, os.str());
    }
    phases = dither_phases((n + segment - 1) / segment, cfg.dither_seed);
  }

  PortIntensities out{
      .a = {.samples = std::vector<double>(n), .dt = input.dt},
      .b = {.samples = std::vector<double>(n), .dt = input.dt},
  };
  const auto* a = input.samples.data();
  for (std::size_t seg = 0, start = 0; start < n; ++seg, start += segment) {
    const std::complex<double> rotor = std::polar(1.0, phases[seg]);
    const std::size_t stop = std::min(n, start + segment);
    for (std::size_t i = start; i < stop; ++i) {
      const std::complex<double> late = a[i + shift] * rotor;
      const std::complex<double> early = a[i];
      out.a.samples[i] = 0.5 * std::norm(late - early);
      out.b.samples[i] = 0.5 * std::norm(late + early);
    }
  }
  return out;
}

}  // namespace photostat
