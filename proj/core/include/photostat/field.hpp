#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace photostat {

/// One realization of the optical field as a uniformly sampled complex
/// envelope. Samples are normalized to unit mean intensity; `flux` carries
/// the photon rate (photons/s) that corresponds to |a|^2 = 1.
struct FieldTrace {
  std::vector<std::complex<double>> samples;
  double dt = 0.0;
  double flux = 1.0;

  std::size_t size() const noexcept { return samples.size(); }
  double duration() const noexcept { return static_cast<double>(samples.size()) * dt; }
  double mean_intensity() const;

  /// Throws a validation error unless samples are nonempty, dt > 0, flux > 0.
  void validate() const;
};

enum class SourceKind { kChaotic, kCoherentAm, kMixture };

/// How the intensity fluctuations of a coherent-AM source are realized.
///  kChiSquare:       I = c0 + sum_j y_j^2 with y_j independent real OU
///                    processes; mean 1, variance alpha, autocovariance
///                    alpha*exp(-2|t|/tau_amp), never negative.
///  kClampedGaussian: I = max(0, 1 + m) with m a Gaussian OU process of
///                    variance alpha; fails when more than 0.1% of samples
///                    need clamping.
enum class AmplitudeNoise { kChiSquare, kClampedGaussian };

/// How a coherent/chaotic mixture is composed.
///  kEnsemble:           the source emits either coherent (probability x) or
///                       chaotic light, switching between independent blocks.
///  kFieldSuperposition: sqrt(x)*exp(i*phi0) + sqrt(1-x)*a_chaotic(t).
enum class MixtureMode { kEnsemble, kFieldSuperposition };

struct SourceModel {
  SourceKind kind = SourceKind::kChaotic;
  double tau_c = 0.0;
  double tau_amp = 0.0;  // CoherentAm only
  double alpha = 0.0;    // CoherentAm only
  double x = 0.0;        // Mixture only
  std::uint64_t seed = 0;
  AmplitudeNoise amplitude_noise = AmplitudeNoise::kChiSquare;
  MixtureMode mixture_mode = MixtureMode::kEnsemble;
  double block_duration = 0.0;  // ensemble mixture block; 0 selects 200 * tau_c

  static SourceModel chaotic(double tau_c, std::uint64_t seed = 0);
  static SourceModel coherent_am(double tau_c, double tau_amp, double alpha,
                                 std::uint64_t seed = 0);
  static SourceModel mixture(double x, double tau_c, std::uint64_t seed = 0);

  /// Longest correlation time of the source (tau_amp for coherent-AM).
  double longest_correlation_time() const;
  void validate() const;
};

FieldTrace generate_chaotic(double tau_c, double duration, double dt, std::uint64_t seed,
                            double flux = 1.0);

FieldTrace generate_coherent_am(double tau_c, double tau_amp, double alpha, double duration,
                                double dt, std::uint64_t seed, double flux = 1.0,
                                AmplitudeNoise noise = AmplitudeNoise::kChiSquare);

FieldTrace generate_mixture(double x, double tau_c, double duration, double dt,
                            std::uint64_t seed, double flux = 1.0,
                            MixtureMode mode = MixtureMode::kEnsemble,
                            double block_duration = 0.0);

/// Dispatches on model.kind using model.seed.
FieldTrace generate(const SourceModel& model, double duration, double dt, double flux = 1.0);

}  // namespace photostat
