#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "photostat/correlator.hpp"

namespace photostat {

enum class G2ModelKind { kChaoticSiegert, kCoherentAm, kGaussianPeak };
enum class G2xModelKind { kChaotic, kCoherentAm, kMixture };
enum class Verdict { kChaotic, kCoherentAm, kMixture, kInconclusive };

std::string_view to_string(G2ModelKind kind);
std::string_view to_string(G2xModelKind kind);
std::string_view to_string(Verdict verdict);
std::optional<G2ModelKind> parse_g2_model(std::string_view name);
std::optional<Verdict> parse_verdict(std::string_view name);

struct FitParameter {
  std::string name;
  double value = 0.0;
  double sigma = 0.0;
};

struct ModelFit {
  std::string model;
  std::vector<FitParameter> params;
  double chi2 = 0.0;
  std::size_t dof = 0;
  double chi2_reduced = 0.0;

  const FitParameter* find(std::string_view name) const;
};

/// Quantities the classifier decides on, with their standard errors.
///  dip_depth D          = 1 - g2x(0)
///  background_excess B  = weighted mean of g2x - 1 over 3 tau_c_eff <= |tau| <= 6 tau_c_eff
struct Evidence {
  double dip_depth = 0.0;
  double dip_depth_sigma = 0.0;
  double background_excess = 0.0;
  double background_excess_sigma = 0.0;
  double tau_c_eff = 0.0;
};

struct FitReport {
  std::string model;
  std::vector<FitParameter> params;
  double chi2_reduced = 0.0;
  std::vector<double> residual_tau;  // bin centers of the fitted region
  std::vector<double> residuals;     // (g2 - model) / sigma
  std::optional<Verdict> verdict;
  std::optional<Evidence> evidence;
  std::vector<ModelFit> candidates;
  std::optional<double> delta;
  double resolution_sigma = 0.0;

  const FitParameter* find(std::string_view name) const;
  /// Throws kValidation if the parameter is not part of the report.
  double param(std::string_view name) const;
  double sigma(std::string_view name) const;
};

struct FitOptions {
  /// Gaussian timing resolution convolved into every model with a fixed
  /// width. The ChaoticSiegert g2 model fits its own resolution instead.
  double resolution_sigma = 0.0;
  /// Only bins with |tau| <= fit_range enter g2 fits (0: all bins).
  double fit_range = 0.0;
  int max_iterations = 200;
  double threshold_sigmas = 3.0;
  /// A rule-based verdict is kept only if its model's reduced chi-square is
  /// within this fraction of the best candidate's.
  double chi2_margin = 0.10;
};

/// Weighted least-squares fit of an autocorrelation histogram.
FitReport fit_g2(const CorrelationHistogram& histogram, G2ModelKind kind,
                 const FitOptions& options = {});

/// Fits the three cross-correlation models on the central region
/// |tau| < delta/2, the replicas at +-delta on the rest, and classifies.
FitReport fit_g2x(const CorrelationHistogram& histogram, double delta,
                  const FitOptions& options = {});

/// Decision rules on the report's evidence (k = threshold_sigmas):
///   D <  k sigma_D and B <  k sigma_B  -> Chaotic
///   D >  k sigma_D and B >  k sigma_B  -> CoherentAm
///   D >  k sigma_D and B <  k sigma_B  -> Mixture (x = 2D)
///   otherwise                          -> Inconclusive
/// A verdict whose model fits worse than the best candidate by more than
/// chi2_margin (relative reduced chi-square) is downgraded to Inconclusive.
Verdict classify(const FitReport& report, double threshold_sigmas = 3.0,
                 double chi2_margin = 0.10);

/// Coherent fraction implied by the dip depth, x = 2D, with its sigma.
FitParameter mixture_fraction(const Evidence& evidence);

}  // namespace photostat
