#include "scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "photostat/models.hpp"

namespace photostat::cli {

namespace {

constexpr double kPs = 1e-12;
constexpr double kNs = 1e-9;
constexpr double kUs = 1e-6;

// Published values the canned runs are compared against.
constexpr double kLaserAlpha = 0.445;
constexpr double kLaserTauAmp = 2.76 * kNs;
constexpr double kChaoticTauC = 50 * kPs;
constexpr double kLaserTauC = 500 * kPs;
constexpr double kPairResolution = 180 * kPs;

/// Per-unit-intensity click probability used by every canned run.
constexpr double kClickScale = 0.004;

std::string fmt(const char* format, auto... args) {
  char buffer[256];
  std::snprintf(buffer, sizeof buffer, format, args...);
  return buffer;
}

Check within(std::string label, double value, double sigma, double target, double tolerance) {
  Check c;
  c.label = std::move(label);
  c.pass = std::abs(value - target) <= tolerance;
  c.detail = fmt("%.4f +- %.4f (target %.4f +- %.3f)", value, sigma, target, tolerance);
  return c;
}

ExperimentConfig base(double dt, double duration, std::size_t realizations, std::uint64_t seed) {
  ExperimentConfig c;
  c.run.dt = dt;
  c.run.duration = duration;
  c.run.realizations = realizations;
  c.run.master_seed = seed;
  c.detectors = {DetectorConfig::ideal(), DetectorConfig::ideal()};
  return c;
}

/// Blocked arm: each port carries |a|^2 / 2 at half the source flux.
void blocked(ExperimentConfig& c) {
  c.interferometer.split_mode = SplitMode::kBlockArm;
  c.run.flux = 4.0 * kClickScale / c.run.dt;
}

/// Both arms with dither: each port has unit mean intensity at half flux.
void interfering(ExperimentConfig& c, double delta, double segment) {
  c.interferometer.split_mode = SplitMode::kBothArms;
  c.interferometer.delta = delta;
  c.interferometer.dither = Dither::random_phase(segment);
  c.run.flux = 2.0 * kClickScale / c.run.dt;
}

double center(const CorrelationHistogram& h) { return h.g2()[h.center_index()]; }
double center_sigma(const CorrelationHistogram& h) { return h.sigma()[h.center_index()]; }

struct Average {
  double value = 0.0;
  double model = 0.0;  // same weighting applied to `reference`
  double sigma = std::numeric_limits<double>::infinity();
  double tau = 0.0;
  std::size_t bins = 0;
};

/// Inverse-variance weighted mean of g2 over bins with lo <= |tau| <= hi on
/// one side (sign > 0, < 0) or both (sign == 0).
Average weighted(const CorrelationHistogram& h, double lo, double hi, int sign = 0,
                 double (*reference)(double, const void*) = nullptr, const void* ctx = nullptr) {
  Average a;
  double sw = 0.0;
  double sv = 0.0;
  double st = 0.0;
  double sm = 0.0;
  const double slack = 1e-6 * h.bin_width();
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double tau = h.tau(k);
    if (h.counts()[k] == 0) continue;
    if ((sign > 0 && tau < 0) || (sign < 0 && tau > 0)) continue;
    if (std::abs(tau) < lo - slack || std::abs(tau) > hi + slack) continue;
    const double w = 1.0 / (h.sigma()[k] * h.sigma()[k]);
    sw += w;
    sv += w * h.g2()[k];
    st += w * std::abs(tau);
    if (reference != nullptr) sm += w * reference(tau, ctx);
    ++a.bins;
  }
  if (sw > 0.0) {
    a.value = sv / sw;
    a.sigma = 1.0 / std::sqrt(sw);
    a.tau = st / sw;
    a.model = sm / sw;
  }
  return a;
}

}  // namespace

bool all_pass(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

ExperimentConfig chaotic_auto_ideal(std::uint64_t seed) {
  auto c = base(1 * kPs, 12.5 * kUs, 22, seed);
  c.source = SourceModel::chaotic(kChaoticTauC);
  blocked(c);
  c.correlator = {10 * kPs, 500 * kPs};
  return c;
}

ExperimentConfig chaotic_auto_resolved(std::uint64_t seed) {
  auto c = base(2.5 * kPs, 25 * kUs, 28, seed);
  c.source = SourceModel::chaotic(kChaoticTauC);
  blocked(c);
  const DetectorConfig d{1.0, kPairResolution / std::sqrt(2.0), 0.0, 0};
  c.detectors = {d, d};
  c.correlator = {164 * kPs, 20 * 164 * kPs};
  return c;
}

double pair_resolution(const ExperimentConfig& c) {
  return std::hypot(c.detectors[0].jitter_sigma, c.detectors[1].jitter_sigma);
}

ExperimentConfig laser_auto(std::uint64_t seed) {
  auto c = base(12.5 * kPs, 30 * kUs, 76, seed);
  c.source = SourceModel::coherent_am(kLaserTauC, kLaserTauAmp, kLaserAlpha);
  blocked(c);
  c.run.flux *= 1.5;
  c.correlator = {50 * kPs, 15 * kNs};
  return c;
}

ExperimentConfig chaotic_cross(std::uint64_t seed) {
  auto c = base(2.5 * kPs, 25 * kUs, 28, seed);
  c.source = SourceModel::chaotic(kChaoticTauC);
  interfering(c, 550 * kPs, 10 * kNs);
  c.correlator = {10 * kPs, 1 * kNs};
  return c;
}

ExperimentConfig chaotic_cross_companion(std::uint64_t seed) {
  auto c = chaotic_cross(seed);
  c.interferometer = {};
  blocked(c);
  return c;
}

ExperimentConfig laser_cross(std::uint64_t seed) {
  auto c = base(12.5 * kPs, 30 * kUs, 120, seed);
  c.source = SourceModel::coherent_am(kLaserTauC, kLaserTauAmp, kLaserAlpha);
  interfering(c, 11 * kNs, 150 * kNs);
  c.correlator = {20 * kPs, 6 * kNs};
  return c;
}

ExperimentConfig mixture_cross(double x, std::uint64_t seed) {
  auto c = base(12.5 * kPs, 30 * kUs, 120, seed);
  c.source = SourceModel::mixture(x, kLaserTauC);
  interfering(c, 11 * kNs, 150 * kNs);
  c.correlator = {20 * kPs, 6 * kNs};
  return c;
}

std::vector<Check> check_chaotic_auto_ideal(const CorrelationHistogram& h, double tau_c) {
  std::vector<Check> out;
  out.push_back(within("g2(0)", center(h), center_sigma(h), 2.0, 0.05));
  out.back().detail += fmt("; bin-averaged Siegert model predicts %.4f",
                           ChaoticSiegertG2{tau_c, 0.0}(0.0, h.bin_width()));

  double worst = 0.0;
  double worst_tau = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double tau = h.tau(k);
    if (std::abs(tau) > 5.0 * tau_c * (1.0 + 1e-9)) continue;
    const double dev = std::abs(h.g2()[k] - 1.0 - std::exp(-2.0 * std::abs(tau) / tau_c));
    if (dev > worst) {
      worst = dev;
      worst_tau = tau;
    }
  }
  Check siegert;
  siegert.label = "max |g2 - 1 - exp(-2|tau|/tau_c)|, |tau| <= 5 tau_c";
  siegert.pass = worst < 0.05;
  siegert.detail = fmt("%.4f at tau = %.0f ps (limit 0.05)", worst, worst_tau / kPs);
  out.push_back(siegert);
  return out;
}

std::vector<Check> check_chaotic_auto_resolved(const CorrelationHistogram& h, double tau_c,
                                               double pair_resolution, FitReport* fit_out) {
  std::vector<Check> out;
  out.push_back(within("g2(0)", center(h), center_sigma(h), 1.25, 0.05));
  out.back().detail += fmt("; Siegert model with this resolution and bin predicts %.4f",
                           ChaoticSiegertG2{tau_c, pair_resolution}(0.0, h.bin_width()));
  const FitReport fit = fit_g2(h, G2ModelKind::kGaussianPeak);
  const double sigma = fit.param("sigma");
  Check c;
  c.label = "Gaussian fit sigma";
  c.pass = sigma >= 150 * kPs && sigma <= 210 * kPs;
  c.detail = fmt("%.1f +- %.1f ps (range [150, 210] ps)", sigma / kPs, fit.sigma("sigma") / kPs);
  out.push_back(c);
  if (fit_out != nullptr) *fit_out = fit;
  return out;
}

std::vector<Check> check_laser_auto(const CorrelationHistogram& h, FitReport* fit_out) {
  std::vector<Check> out;
  out.push_back(within("g2(0)", center(h), center_sigma(h), 1.0 + kLaserAlpha, 0.03));
  const FitReport fit = fit_g2(h, G2ModelKind::kCoherentAm);
  const double half = 0.5 * fit.param("tau_amp");
  Check c;
  c.label = "fitted decay constant tau_amp/2";
  c.pass = std::abs(half - 0.5 * kLaserTauAmp) <= 0.10 * 0.5 * kLaserTauAmp;
  c.detail = fmt("%.3f +- %.3f ns (target 1.38 ns +- 10%%), alpha = %.4f", half / kNs,
                 0.5 * fit.sigma("tau_amp") / kNs, fit.param("alpha"));
  out.push_back(c);
  if (fit_out != nullptr) *fit_out = fit;
  return out;
}

std::vector<Check> check_chaotic_cross(const CorrelationHistogram& cross,
                                       const CorrelationHistogram& companion, double delta) {
  std::vector<Check> out;
  out.push_back(within("g2x(0)", center(cross), center_sigma(cross), 1.0, 0.03));

  const Average baseline = weighted(cross, 0.25 * delta, 0.75 * delta);
  const double target = (center(companion) - 1.0) / 4.0;
  const double target_sigma = center_sigma(companion) / 4.0;
  for (int sign : {-1, +1}) {
    const std::size_t k = cross.nearest_index(sign * delta);
    const double height = cross.g2()[k] - baseline.value;
    const double sigma = std::hypot(cross.sigma()[k], baseline.sigma);
    Check c;
    c.label = fmt("replica height at tau = %+.0f ps", sign * delta / kPs);
    c.pass = std::abs(height - target) <= 0.03;
    c.detail = fmt("%.4f +- %.4f above baseline %.4f (target (g2(0)-1)/4 = %.4f +- %.4f, tol 0.03)",
                   height, sigma, baseline.value, target, target_sigma);
    out.push_back(c);
  }
  return out;
}

std::vector<Check> check_laser_cross(const CorrelationHistogram& h, const FitReport& fit,
                                     double alpha, double tau_amp) {
  std::vector<Check> out;
  out.push_back(within("dip minimum g2x(0)", center(h), center_sigma(h), 0.5 * (1.0 + alpha),
                       0.03));

  // Shoulder: compared on ~100 ps groups of bins so per-bin Poisson noise
  // does not dominate the 0.03 tolerance.
  const double tau_c_eff = fit.evidence ? fit.evidence->tau_c_eff : 0.0;
  const double lo = 3.0 * tau_c_eff;
  const double hi = tau_amp;
  const double b = h.bin_width();
  const double group = std::max(1.0, std::round(100 * kPs / b)) * b;
  double worst = 0.0;
  double worst_tau = 0.0;
  std::size_t groups = 0;
  const double params[2] = {alpha, tau_amp};
  const auto shoulder_model = [](double t, const void* ctx) {
    const auto* p = static_cast<const double*>(ctx);
    return 1.0 + 0.5 * p[0] * std::exp(-2.0 * std::abs(t) / p[1]);
  };
  for (int sign : {-1, +1}) {
    for (double start = lo; start < hi; start += group) {
      const Average a = weighted(h, start, std::min(start + group - 0.5 * b, hi), sign,
                                 shoulder_model, params);
      if (a.bins == 0) continue;
      ++groups;
      const double dev = std::abs(a.value - a.model);
      if (dev > worst) {
        worst = dev;
        worst_tau = sign * a.tau;
      }
    }
  }
  Check c;
  c.label = "shoulder 1 + (alpha/2) exp(-2|tau|/tau_amp), 3 tau_c_eff <= |tau| <= tau_amp";
  c.pass = groups > 0 && worst <= 0.03;
  c.detail = groups == 0 ? fmt("no bins in [%.0f, %.0f] ps", lo / kPs, hi / kPs)
                         : fmt("max deviation %.4f at tau = %.0f ps over %zu groups, tau_c_eff = %.0f ps",
                               worst, worst_tau / kPs, groups, tau_c_eff / kPs);
  out.push_back(c);
  return out;
}

std::vector<Check> check_mixture_cross(const CorrelationHistogram& h, const FitReport& fit,
                                       double x) {
  std::vector<Check> out;
  out.push_back(within("g2x(0)", center(h), center_sigma(h), 1.0 - 0.5 * x, 0.03));
  Check b;
  b.label = "background excess";
  const double excess = fit.evidence ? fit.evidence->background_excess : 0.0;
  const double excess_sigma = fit.evidence ? fit.evidence->background_excess_sigma : 0.0;
  b.pass = fit.evidence.has_value() && excess < 0.03;
  b.detail = fmt("%.4f +- %.4f (limit 0.03)", excess, excess_sigma);
  out.push_back(b);
  out.push_back(check_verdict(fit, Verdict::kMixture, "verdict"));
  if (fit.evidence) {
    const auto fraction = mixture_fraction(*fit.evidence);
    out.push_back(within("coherent fraction x = 2D", fraction.value, fraction.sigma, x, 0.05));
  }
  return out;
}

Check check_verdict(const FitReport& fit, Verdict expected, std::string_view label) {
  Check c;
  c.label = std::string(label);
  c.pass = fit.verdict == expected;
  const std::string got = fit.verdict ? std::string(to_string(*fit.verdict)) : "none";
  c.detail = got + " (expected " + std::string(to_string(expected)) + ")";
  if (fit.evidence) {
    const auto& e = *fit.evidence;
    c.detail += fmt("; D = %.4f +- %.4f, B = %.4f +- %.4f", e.dip_depth, e.dip_depth_sigma,
                    e.background_excess, e.background_excess_sigma);
  }
  return c;
}

std::optional<Figure> parse_figure(std::string_view name) {
  for (auto f : {Figure::kFig2, Figure::kFig3Top, Figure::kFig3Bottom}) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

std::string_view to_string(Figure figure) {
  switch (figure) {
    case Figure::kFig2: return "fig2";
    case Figure::kFig3Top: return "fig3-top";
    case Figure::kFig3Bottom: return "fig3-bottom";
  }
  return "unknown";
}

}  // namespace photostat::cli
