#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "photostat/field.hpp"

namespace photostat {

/// Real-valued intensity trace on the same sample grid as its source field.
struct IntensityTrace {
  std::vector<double> samples;
  double dt = 0.0;

  std::size_t size() const noexcept { return samples.size(); }
  double duration() const noexcept { return static_cast<double>(samples.size()) * dt; }
  double mean() const;
};

enum class DitherKind { kNone, kRandomPhase };

/// Fringe dithering: a phase that is constant within each segment.
struct Dither {
  DitherKind kind = DitherKind::kNone;
  double segment_duration = 0.0;

  static Dither none() { return {}; }
  static Dither random_phase(double segment_duration) {
    return {DitherKind::kRandomPhase, segment_duration};
  }
};

enum class Arm { kShort, kLong };

enum class SplitMode { kBothArms, kBlockArm };

struct InterferometerConfig {
  double delta = 0.0;  // arm delay, seconds; must be a multiple of the trace dt
  Dither dither;
  SplitMode split_mode = SplitMode::kBothArms;
  Arm blocked_arm = Arm::kLong;  // used when split_mode == kBlockArm
  std::uint64_t dither_seed = 0;

  void validate() const;
  /// Checks the dither segment against the source correlation time and the
  /// trace duration: 50 * longest_tau < segment < duration / 100.
  void validate_against(const SourceModel& source, double duration) const;
};

struct PortIntensities {
  IntensityTrace a;
  IntensityTrace b;
};

/// Number of samples spanned by delta; throws kDeltaOffGrid if delta is not
/// an integer multiple of dt.
std::size_t delay_samples(double delta, double dt);

/// Dither phases for `segments` segments. Each phase is marginally uniform on
/// [0, 2pi); within every consecutive block of `stratum` segments (0: all of
/// them) the phases are a randomly rotated and shuffled set of equally spaced
/// angles, so the fringe terms cancel exactly rather than only in expectation.
std::vector<double> dither_phases(std::size_t segments, std::uint64_t seed,
                                  std::size_t stratum = 0);

/// Unbalanced Michelson outputs:
///   E_A(t) = (a(t+delta) e^{i phi(t)} - a(t)) / sqrt2
///   E_B(t) = (a(t+delta) e^{i phi(t)} + a(t)) / sqrt2
/// Output traces have input.size() - delta/dt samples. In kBlockArm mode both
/// ports carry blocked_arm_intensity() of the surviving arm.
PortIntensities transform(const FieldTrace& input, const InterferometerConfig& cfg);

/// One arm blocked: each output port sees |a(t)|^2 / 2.
IntensityTrace blocked_arm_intensity(const FieldTrace& input);

}  // namespace photostat
