#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace photostat {

/// SplitMix64 finalizer; the building block for counter-based seed splitting.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent stream seeds addressed by (realization, stream) so parallel
/// workers can derive their seeds without coordination.
enum class SeedStream : std::uint64_t { kField = 0, kDither = 1, kDetectorA = 2, kDetectorB = 3 };

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t realization,
                                    SeedStream stream) noexcept {
  return splitmix64(splitmix64(splitmix64(master) ^ realization) ^
                    (static_cast<std::uint64_t>(stream) + 0x5851F42D4C957F2DULL));
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed) {
  return Engine(splitmix64(seed));
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

/// Standard normal deviates via the Marsaglia polar method. Implemented here
/// rather than with std::normal_distribution so traces are bit-identical
/// across standard library implementations.
class NormalSource {
 public:
  explicit NormalSource(std::uint64_t seed) : engine_(make_engine(seed)) {}

  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
      u = 2.0 * uniform01(engine_) - 1.0;
      v = 2.0 * uniform01(engine_) - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * scale;
    has_spare_ = true;
    return u * scale;
  }

  double uniform() { return uniform01(engine_); }
  Engine& engine() { return engine_; }

 private:
  Engine engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace photostat
