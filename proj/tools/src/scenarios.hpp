#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "photostat/analysis.hpp"
#include "photostat/correlator.hpp"
#include "photostat/experiment.hpp"

namespace photostat::cli {

struct Check {
  std::string label;
  bool pass = false;
  std::string detail;
};

bool all_pass(const std::vector<Check>& checks);

// Canned pipeline configurations. Rates are set so the largest per-sample
// click probability stays well below 0.1 while each channel collects about
// 10^6 tags.

/// Chaotic source, tau_c = 50 ps, blocked arm, ideal detectors, 10 ps bins.
ExperimentConfig chaotic_auto_ideal(std::uint64_t seed);
/// Same source with 180 ps pair timing resolution (127.3 ps per detector)
/// and 164 ps bins.
ExperimentConfig chaotic_auto_resolved(std::uint64_t seed);
/// Combined timing resolution of a configuration's two detectors.
double pair_resolution(const ExperimentConfig& config);
/// Coherent-AM source, alpha = 0.445, tau_amp = 2.76 ns, blocked arm.
ExperimentConfig laser_auto(std::uint64_t seed);
/// Chaotic source through the interferometer at delta = 550 ps, 10 ps bins.
ExperimentConfig chaotic_cross(std::uint64_t seed);
/// Blocked-arm companion of chaotic_cross with identical sampling and bins.
ExperimentConfig chaotic_cross_companion(std::uint64_t seed);
/// Coherent-AM source through the interferometer at delta = 11 ns.
ExperimentConfig laser_cross(std::uint64_t seed);
/// Mixture with coherent fraction x at delta = 11 ns.
ExperimentConfig mixture_cross(double x, std::uint64_t seed);

// Checks against the published values, one function per figure panel.

std::vector<Check> check_chaotic_auto_ideal(const CorrelationHistogram& h, double tau_c);
std::vector<Check> check_chaotic_auto_resolved(const CorrelationHistogram& h, double tau_c,
                                               double pair_resolution,
                                               FitReport* fit_out = nullptr);
std::vector<Check> check_laser_auto(const CorrelationHistogram& h, FitReport* fit_out = nullptr);
std::vector<Check> check_chaotic_cross(const CorrelationHistogram& cross,
                                       const CorrelationHistogram& companion, double delta);
std::vector<Check> check_laser_cross(const CorrelationHistogram& h, const FitReport& fit,
                                     double alpha, double tau_amp);
std::vector<Check> check_mixture_cross(const CorrelationHistogram& h, const FitReport& fit,
                                       double x);
Check check_verdict(const FitReport& fit, Verdict expected, std::string_view label);

enum class Figure { kFig2, kFig3Top, kFig3Bottom };
std::optional<Figure> parse_figure(std::string_view name);
std::string_view to_string(Figure figure);

}  // namespace photostat::cli
