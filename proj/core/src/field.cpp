#include "photostat/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "photostat/error.hpp"
#include "photostat/rng.hpp"

namespace photostat {

namespace {

constexpr double kGridSlack = 1e-9;

std::size_t sample_count(double duration, double dt) {
  require(dt > 0.0 && std::isfinite(dt), "dt must be positive and finite");
  require(duration > 0.0 && std::isfinite(duration), "duration must be positive and finite");
  const auto n = static_cast<std::size_t>(std::llround(duration / dt));
  require(n > 0, "duration shorter than one sample");
  return n;
}

void check_sampling(double tau_c, double duration, double dt, double longest) {
  require(tau_c > 0.0 && std::isfinite(tau_c), "tau_c must be positive");
  if (dt > tau_c / 20.0 * (1.0 + kGridSlack)) {
    std::ostringstream os;
    os << "dt=" << dt << " s exceeds tau_c/20=" << tau_c / 20.0 << " s (aliasing)";
    fail(ErrorKind::kValidation, os.str());
  }
  if (duration < 1000.0 * longest * (1.0 - kGridSlack)) {
    std::ostringstream os;
    os << "duration=" << duration << " s is shorter than 1000 correlation times ("
       << 1000.0 * longest << " s)";
    fail(ErrorKind::kValidation, os.str());
  }
}

/// Complex Ornstein-Uhlenbeck process with <a*(t) a(t+s)> = exp(-|s|/tau_c),
/// advanced with the exact one-step transition.
class ChaoticProcess {
 public:
  ChaoticProcess(double tau_c, double dt, NormalSource& normal)
      : rho_(std::exp(-dt / tau_c)),
        kick_(std::sqrt((1.0 - rho_ * rho_) / 2.0)),
        normal_(normal) {
    restart();
  }

  void restart() {
    const double re = normal_() * std::numbers::sqrt2 / 2.0;
    const double im = normal_() * std::numbers::sqrt2 / 2.0;
    value_ = {re, im};
  }

  std::complex<double> next() {
    const std::complex<double> out = value_;
    const double re = normal_();
    const double im = normal_();
    value_ = rho_ * value_ + std::complex<double>(kick_ * re, kick_ * im);
    return out;
  }

 private:
  double rho_;
  double kick_;
  NormalSource& normal_;
  std::complex<double> value_;
};

/// Wiener phase with <exp(i(phi(t+s) - phi(t)))> = exp(-|s|/tau_c).
class PhaseDiffusion {
 public:
  PhaseDiffusion(double tau_c, double dt, NormalSource& normal)
      : step_(std::sqrt(2.0 * dt / tau_c)), normal_(normal) {
    restart();
  }

  void restart() { phase_ = 2.0 * std::numbers::pi * normal_.uniform(); }

  double next() {
    const double out = phase_;
    phase_ += step_ * normal_();
    return out;
  }

 private:
  double step_;
  NormalSource& normal_;
  double phase_ = 0.0;
};

}  // namespace

double FieldTrace::mean_intensity() const {
  if (samples.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& a : samples) sum += std::norm(a);
  return sum / static_cast<double>(samples.size());
}

void FieldTrace::validate() const {
  require(!samples.empty(), "field trace is empty");
  require(dt > 0.0 && std::isfinite(dt), "field trace dt must be positive");
  require(flux > 0.0 && std::isfinite(flux), "field trace flux must be positive");
}

SourceModel SourceModel::chaotic(double tau_c, std::uint64_t seed) {
  SourceModel m;
  m.kind = SourceKind::kChaotic;
  m.tau_c = tau_c;
  m.seed = seed;
  return m;
}

SourceModel SourceModel::coherent_am(double tau_c, double tau_amp, double alpha,
                                     std::uint64_t seed) {
  SourceModel m;
  m.kind = SourceKind::kCoherentAm;
  m.tau_c = tau_c;
  m.tau_amp = tau_amp;
  m.alpha = alpha;
  m.seed = seed;
  return m;
}

SourceModel SourceModel::mixture(double x, double tau_c, std::uint64_t seed) {
  SourceModel m;
  m.kind = SourceKind::kMixture;
  m.x = x;
  m.tau_c = tau_c;
  m.seed = seed;
  return m;
}

double SourceModel::longest_correlation_time() const {
  return kind == SourceKind::kCoherentAm ? std::max(tau_c, tau_amp) : tau_c;
}

void SourceModel::validate() const {
  require(tau_c > 0.0 && std::isfinite(tau_c), "tau_c must be positive");
  switch (kind) {
    case SourceKind::kChaotic:
      break;
    case SourceKind::kCoherentAm:
      require(tau_amp > tau_c, "coherent-AM source requires tau_amp > tau_c");
      require(alpha >= 0.0 && alpha < 1.0, "coherent-AM source requires 0 <= alpha < 1");
      break;
    case SourceKind::kMixture:
      require(x >= 0.0 && x <= 1.0, "mixture fraction x must lie in [0, 1]");
      require(block_duration >= 0.0, "mixture block duration must be non-negative");
      break;
  }
}

FieldTrace generate_chaotic(double tau_c, double duration, double dt, std::uint64_t seed,
                            double flux) {
  require(flux > 0.0, "flux must be positive");
  check_sampling(tau_c, duration, dt, tau_c);
  const std::size_t n = sample_count(duration, dt);

  NormalSource normal(seed);
  ChaoticProcess process(tau_c, dt, normal);
  FieldTrace trace{.samples = {}, .dt = dt, .flux = flux};
  trace.samples.resize(n);
  for (auto& a : trace.samples) a = process.next();
  return trace;
}

FieldTrace generate_coherent_am(double tau_c, double tau_amp, double alpha, double duration,
                                double dt, std::uint64_t seed, double flux,
                                AmplitudeNoise noise) {
  require(flux > 0.0, "flux must be positive");
  require(tau_amp > tau_c, "coherent-AM source requires tau_amp > tau_c");
  require(alpha >= 0.0 && alpha < 1.0, "coherent-AM source requires 0 <= alpha < 1");
  check_sampling(tau_c, duration, dt, tau_amp);
  const std::size_t n = sample_count(duration, dt);

  NormalSource normal(seed);
  PhaseDiffusion phase(tau_c, dt, normal);
  FieldTrace trace{.samples = {}, .dt = dt, .flux = flux};
  trace.samples.resize(n);

  if (alpha == 0.0) {
    for (auto& a : trace.samples) a = std::polar(1.0, phase.next());
    return trace;
  }

  if (noise == AmplitudeNoise::kClampedGaussian) {
    // m(t): variance alpha, correlation time tau_amp / 2.
    const double rho = std::exp(-2.0 * dt / tau_amp);
    const double kick = std::sqrt(alpha * (1.0 - rho * rho));
    double m = std::sqrt(alpha) * normal();
    std::size_t clamped = 0;
    for (auto& a : trace.samples) {
      double intensity = 1.0 + m;
      if (intensity < 0.0) {
        intensity = 0.0;
        ++clamped;
      }
      a = std::polar(std::sqrt(intensity), phase.next());
      m = rho * m + kick * normal();
    }
    if (static_cast<double>(clamped) > 1e-3 * static_cast<double>(n)) {
      std::ostringstream os;
      os << clamped << " of " << n << " samples ("
         << 100.0 * static_cast<double>(clamped) / static_cast<double>(n)
         << "%) needed intensity clamping; limit is 0.1%";
      fail(ErrorKind::kClampRate, os.str());
    }
    return trace;
  }

  // Sum of k squared OU processes with correlation time tau_amp: each y^2 has
  // autocovariance 2 s^4 exp(-2|t|/tau_amp). k <= 2/alpha keeps c0 >= 0.
  const int k = std::clamp(static_cast<int>(std::floor(2.0 / alpha)), 1, 4);
  const double s2 = std::sqrt(alpha / (2.0 * k));
  const double c0 = 1.0 - k * s2;
  const double s = std::sqrt(s2);
  const double rho = std::exp(-dt / tau_amp);
  const double kick = s * std::sqrt(1.0 - rho * rho);
  double y[4] = {0.0, 0.0, 0.0, 0.0};
  for (int j = 0; j < k; ++j) y[j] = s * normal();
  for (auto& a : trace.samples) {
    double intensity = c0;
    for (int j = 0; j < k; ++j) intensity += y[j] * y[j];
    a = std::polar(std::sqrt(intensity), phase.next());
    for (int j = 0; j < k; ++j) y[j] = rho * y[j] + kick * normal();
  }
  return trace;
}

FieldTrace generate_mixture(double x, double tau_c, double duration, double dt,
                            std::uint64_t seed, double flux, MixtureMode mode,
                            double block_duration) {
  require(flux > 0.0, "flux must be positive");
  require(x >= 0.0 && x <= 1.0, "mixture fraction x must lie in [0, 1]");
  check_sampling(tau_c, duration, dt, tau_c);
  const std::size_t n = sample_count(duration, dt);

  NormalSource normal(seed);
  FieldTrace trace{.samples = {}, .dt = dt, .flux = flux};
  trace.samples.resize(n);

  if (mode == MixtureMode::kFieldSuperposition) {
    const std::complex<double> coherent =
        std::polar(std::sqrt(x), 2.0 * std::numbers::pi * normal.uniform());
    const double chaotic_scale = std::sqrt(1.0 - x);
    ChaoticProcess chaotic(tau_c, dt, normal);
    for (auto& a : trace.samples) a = coherent + chaotic_scale * chaotic.next();
    return trace;
  }

  if (block_duration == 0.0) block_duration = 200.0 * tau_c;
  require(block_duration > 0.0, "mixture block duration must be positive");
  const auto block = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(block_duration / dt)));

  ChaoticProcess chaotic(tau_c, dt, normal);
  PhaseDiffusion phase(tau_c, dt, normal);
  for (std::size_t start = 0; start < n; start += block) {
    const std::size_t stop = std::min(n, start + block);
    if (normal.uniform() < x) {
      phase.restart();
      for (std::size_t i = start; i < stop; ++i) trace.samples[i] = std::polar(1.0, phase.next());
    } else {
      chaotic.restart();
      for (std::size_t i = start; i < stop; ++i) trace.samples[i] = chaotic.next();
    }
  }
  return trace;
}

FieldTrace generate(const SourceModel& model, double duration, double dt, double flux) {
  model.validate();
  switch (model.kind) {
    case SourceKind::kChaotic:
      return generate_chaotic(model.tau_c, duration, dt, model.seed, flux);
    case SourceKind::kCoherentAm:
      return generate_coherent_am(model.tau_c, model.tau_amp, model.alpha, duration, dt,
                                  model.seed, flux, model.amplitude_noise);
    case SourceKind::kMixture:
      return generate_mixture(model.x, model.tau_c, duration, dt, model.seed, flux,
                              model.mixture_mode, model.block_duration);
  }
  fail(ErrorKind::kValidation, "unknown source kind");
}

}  // namespace photostat
