#include "photostat/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "photostat/error.hpp"
#include "photostat/least_squares.hpp"
#include "photostat/models.hpp"

namespace photostat {

std::string_view to_string(G2ModelKind kind) {
  switch (kind) {
    case G2ModelKind::kChaoticSiegert: return "chaotic_siegert";
    case G2ModelKind::kCoherentAm: return "coherent_am";
    case G2ModelKind::kGaussianPeak: return "gaussian_peak";
  }
  return "unknown";
}

std::string_view to_string(G2xModelKind kind) {
  switch (kind) {
    case G2xModelKind::kChaotic: return "chaotic";
    case G2xModelKind::kCoherentAm: return "coherent_am";
    case G2xModelKind::kMixture: return "mixture";
  }
  return "unknown";
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::kChaotic: return "Chaotic";
    case Verdict::kCoherentAm: return "CoherentAM";
    case Verdict::kMixture: return "Mixture";
    case Verdict::kInconclusive: return "Inconclusive";
  }
  return "unknown";
}

std::optional<G2ModelKind> parse_g2_model(std::string_view name) {
  for (auto kind : {G2ModelKind::kChaoticSiegert, G2ModelKind::kCoherentAm,
                    G2ModelKind::kGaussianPeak}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

std::optional<Verdict> parse_verdict(std::string_view name) {
  for (auto v : {Verdict::kChaotic, Verdict::kCoherentAm, Verdict::kMixture,
                 Verdict::kInconclusive}) {
    if (to_string(v) == name) return v;
  }
  return std::nullopt;
}

const FitParameter* ModelFit::find(std::string_view name) const {
  for (const auto& p : params) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

const FitParameter* FitReport::find(std::string_view name) const {
  for (const auto& p : params) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

double FitReport::param(std::string_view name) const {
  const auto* p = find(name);
  if (p == nullptr) fail(ErrorKind::kValidation, "fit report has no parameter " + std::string(name));
  return p->value;
}

double FitReport::sigma(std::string_view name) const {
  const auto* p = find(name);
  if (p == nullptr) fail(ErrorKind::kValidation, "fit report has no parameter " + std::string(name));
  return p->sigma;
}

FitParameter mixture_fraction(const Evidence& evidence) {
  return {"x", 2.0 * evidence.dip_depth, 2.0 * evidence.dip_depth_sigma};
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Point {
  double tau;
  double value;
  double sigma;
};

using Model = std::function<double(std::span<const double>, double)>;

struct Candidate {
  std::vector<double> start;
};

struct Solved {
  LeastSquaresResult fit;
  bool ok = false;
};

std::vector<Point> select_points(const CorrelationHistogram& h,
                                 const std::function<bool(double)>& keep) {
  std::vector<Point> points;
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (h.counts()[k] == 0) continue;
    const double tau = h.tau(k);
    if (keep(tau)) points.push_back({tau, h.g2()[k], h.sigma()[k]});
  }
  return points;
}

void require_statistics(const CorrelationHistogram& h, const std::function<bool(double)>& keep) {
  std::size_t good = 0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (h.counts()[k] > 100 && keep(h.tau(k))) ++good;
  }
  if (good < 20) {
    std::ostringstream os;
    os << "only " << good << " bins with more than 100 counts in the fit window (need 20)";
    fail(ErrorKind::kInsufficientStatistics, os.str());
  }
}

/// Multi-start weighted least squares; keeps the lowest chi-square.
LeastSquaresResult solve(const std::vector<Point>& points, const Model& model,
                         const std::vector<std::vector<double>>& starts,
                         const std::vector<ParameterBounds>& bounds, const FitOptions& options,
                         std::string_view name) {
  const ResidualFunction residuals = [&](std::span<const double> p, std::span<double> r) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      r[i] = (points[i].value - model(p, points[i].tau)) / points[i].sigma;
    }
  };
  LeastSquaresOptions lm;
  lm.max_iterations = options.max_iterations;

  std::optional<LeastSquaresResult> best;
  int converged = 0;
  for (const auto& start : starts) {
    auto result = levenberg_marquardt(residuals, points.size(), start, bounds, lm);
    if (!std::isfinite(result.chi2)) continue;
    if (result.converged) ++converged;
    if (!best || result.chi2 < best->chi2) best = std::move(result);
  }
  if (!best || converged == 0) {
    std::ostringstream os;
    os << "model " << name << " did not converge within " << options.max_iterations
       << " iterations from " << starts.size() << " starting points";
    if (best) os << " (best chi2 " << best->chi2 << ")";
    fail(ErrorKind::kNonConvergence, os.str());
  }
  return *best;
}

ModelFit to_model_fit(std::string name, const std::vector<std::string>& names,
                      const LeastSquaresResult& result, std::size_t n_points) {
  ModelFit fit;
  fit.model = std::move(name);
  for (std::size_t i = 0; i < names.size(); ++i) {
    fit.params.push_back({names[i], result.params[i], result.sigmas[i]});
  }
  fit.chi2 = result.chi2;
  fit.dof = n_points > names.size() ? n_points - names.size() : 1;
  fit.chi2_reduced = fit.chi2 / static_cast<double>(fit.dof);
  return fit;
}

struct Moments {
  double height;  // g2(0) - 1
  double area;    // integral of g2 - 1
};

Moments peak_moments(const std::vector<Point>& points, double bin_width) {
  Moments m{0.0, 0.0};
  double nearest = kInf;
  for (const auto& p : points) {
    m.area += (p.value - 1.0) * bin_width;
    if (std::abs(p.tau) < nearest) {
      nearest = std::abs(p.tau);
      m.height = p.value - 1.0;
    }
  }
  return m;
}

void fill_residuals(FitReport& report, const std::vector<Point>& points,
                    const std::function<double(double)>& model) {
  report.residual_tau.clear();
  report.residuals.clear();
  for (const auto& p : points) {
    report.residual_tau.push_back(p.tau);
    report.residuals.push_back((p.value - model(p.tau)) / p.sigma);
  }
}

}  // namespace

FitReport fit_g2(const CorrelationHistogram& histogram, G2ModelKind kind,
                 const FitOptions& options) {
  const double range = options.fit_range > 0.0 ? options.fit_range : kInf;
  const auto keep = [range](double tau) { return std::abs(tau) <= range * (1.0 + 1e-12); };
  require_statistics(histogram, keep);
  const auto points = select_points(histogram, keep);
  const double b = histogram.bin_width();
  const Moments moments = peak_moments(points, b);
  const double height = std::max(moments.height, 1e-3);
  const double area = std::max(moments.area, height * b);
  const Response fixed{b, options.resolution_sigma};

  FitReport report;
  report.resolution_sigma = options.resolution_sigma;
  std::vector<std::string> names;
  Model model;
  std::vector<std::vector<double>> starts;
  std::vector<ParameterBounds> bounds;

  switch (kind) {
    case G2ModelKind::kCoherentAm: {
      names = {"alpha", "tau_amp"};
      model = [fixed](std::span<const double> p, double tau) {
        return CoherentAmG2{p[0], p[1]}(tau, fixed);
      };
      const double tau_amp = std::max(area / height, 2.0 * b);
      for (double f : {0.3, 1.0, 3.0}) starts.push_back({height, f * tau_amp});
      bounds = {{0.0, 1e3}, {1e-3 * b, kInf}};
      break;
    }
    case G2ModelKind::kChaoticSiegert: {
      names = {"tau_c", "resolution_sigma"};
      model = [b](std::span<const double> p, double tau) {
        return ChaoticSiegertG2{p[0], p[1]}(tau, b);
      };
      const double width = std::max(area / (height * std::sqrt(2.0 * std::numbers::pi)), 0.5 * b);
      for (double f : {0.5, 1.0, 2.0}) {
        starts.push_back({area, f * width});
        starts.push_back({f * area, 0.1 * width});
      }
      bounds = {{1e-3 * b, kInf}, {0.0, kInf}};
      break;
    }
    case G2ModelKind::kGaussianPeak: {
      names = {"amplitude", "sigma"};
      model = [fixed](std::span<const double> p, double tau) {
        return GaussianPeakG2{p[0], p[1]}(tau, fixed);
      };
      const double width = std::max(area / (height * std::sqrt(2.0 * std::numbers::pi)), 0.5 * b);
      for (double f : {0.5, 1.0, 2.0}) starts.push_back({height, f * width});
      bounds = {{0.0, 1e3}, {1e-3 * b, kInf}};
      break;
    }
  }

  const auto result = solve(points, model, starts, bounds, options, to_string(kind));
  auto fit = to_model_fit(std::string(to_string(kind)), names, result, points.size());
  report.model = fit.model;
  report.params = fit.params;
  report.chi2_reduced = fit.chi2_reduced;
  report.candidates.push_back(fit);
  const auto params = result.params;
  fill_residuals(report, points, [&](double tau) { return model(params, tau); });
  return report;
}

namespace {

Evidence gather_evidence(const CorrelationHistogram& h, double delta, double tau_c_eff) {
  Evidence e;
  const std::size_t center = h.center_index();
  e.dip_depth = 1.0 - h.g2()[center];
  e.dip_depth_sigma = h.counts()[center] > 0 ? h.sigma()[center] : kInf;
  e.tau_c_eff = tau_c_eff;

  const double b = h.bin_width();
  const double upper_limit = delta > 0.0 ? 0.5 * delta : h.window();
  const double lo = 3.0 * tau_c_eff;
  const double hi = std::min(6.0 * tau_c_eff, upper_limit);
  double sum_w = 0.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double t = std::abs(h.tau(k));
    if (h.counts()[k] == 0 || t < lo || t > std::max(hi, lo + b)) continue;
    const double w = 1.0 / (h.sigma()[k] * h.sigma()[k]);
    sum_w += w;
    sum += w * (h.g2()[k] - 1.0);
  }
  e.background_excess = sum_w > 0.0 ? sum / sum_w : 0.0;
  e.background_excess_sigma = sum_w > 0.0 ? 1.0 / std::sqrt(sum_w) : kInf;
  return e;
}

}  // namespace

FitReport fit_g2x(const CorrelationHistogram& histogram, double delta,
                  const FitOptions& options) {
  require(delta >= 0.0, "delta must be non-negative");
  const double b = histogram.bin_width();
  const double central_limit = delta > 0.0 ? 0.5 * delta : kInf;
  const auto central = [central_limit](double tau) { return std::abs(tau) < central_limit; };
  require_statistics(histogram, central);
  const auto points = select_points(histogram, central);
  const Response response{b, options.resolution_sigma};

  FitReport report;
  report.delta = delta;
  report.resolution_sigma = options.resolution_sigma;

  // Flat chaotic model, no free parameters.
  ModelFit flat;
  flat.model = std::string(to_string(G2xModelKind::kChaotic));
  for (const auto& p : points) flat.chi2 += std::pow((p.value - 1.0) / p.sigma, 2);
  flat.dof = points.size();
  flat.chi2_reduced = flat.chi2 / static_cast<double>(flat.dof);

  const std::size_t center = histogram.center_index();
  const double depth = 1.0 - histogram.g2()[center];
  const double max_tau = std::min(central_limit, histogram.window());
  std::vector<double> tau_grid;
  for (double f : {2.0, 5.0, 20.0, 80.0}) {
    if (f * b < max_tau) tau_grid.push_back(f * b);
  }
  if (tau_grid.empty()) tau_grid.push_back(b);

  // Mixture: x, tau_c.
  const Model mixture_model = [response](std::span<const double> p, double tau) {
    return MixtureG2x{p[0], p[1]}(tau, response);
  };
  std::vector<std::vector<double>> starts;
  const double x0 = std::clamp(2.0 * depth, 0.01, 1.0);
  for (double t : tau_grid) starts.push_back({x0, t});
  const std::vector<ParameterBounds> mixture_bounds = {{0.0, 1.0}, {1e-3 * b, kInf}};
  const auto mixture = solve(points, mixture_model, starts, mixture_bounds, options, "mixture");
  const auto mixture_fit = to_model_fit(std::string(to_string(G2xModelKind::kMixture)),
                                        {"x", "tau_c_eff"}, mixture, points.size());

  // Coherent-AM: alpha, tau_c, tau_amp = tau_c * ratio (ratio >= 1).
  const Model coherent_model = [response](std::span<const double> p, double tau) {
    return CoherentAmG2x{p[0], p[1] * p[2], p[1]}(tau, response);
  };
  starts.clear();
  const double alpha0 = std::clamp(1.0 - 2.0 * depth, 0.01, 2.0);
  for (double t : tau_grid) {
    for (double ratio : {3.0, 10.0, 30.0}) starts.push_back({alpha0, t, ratio});
  }
  const std::vector<ParameterBounds> coherent_bounds = {{0.0, 10.0}, {1e-3 * b, kInf}, {1.0, 1e4}};
  const auto coherent = solve(points, coherent_model, starts, coherent_bounds, options,
                              "coherent_am");
  ModelFit coherent_fit;
  coherent_fit.model = std::string(to_string(G2xModelKind::kCoherentAm));
  {
    const auto& p = coherent.params;
    const auto& c = coherent.covariance;
    // tau_amp = tau_c * ratio; first-order error propagation.
    const double var_amp = p[2] * p[2] * c[1 * 3 + 1] + p[1] * p[1] * c[2 * 3 + 2] +
                           2.0 * p[1] * p[2] * c[1 * 3 + 2];
    coherent_fit.params = {{"alpha", p[0], coherent.sigmas[0]},
                           {"tau_amp", p[1] * p[2], std::sqrt(std::max(var_amp, 0.0))},
                           {"tau_c_eff", p[1], coherent.sigmas[1]}};
    coherent_fit.chi2 = coherent.chi2;
    coherent_fit.dof = points.size() > 3 ? points.size() - 3 : 1;
    coherent_fit.chi2_reduced = coherent_fit.chi2 / static_cast<double>(coherent_fit.dof);
  }

  report.candidates = {flat, coherent_fit, mixture_fit};

  // Replicas at +-delta, fitted on the outer region when the window reaches them.
  std::optional<ModelFit> replica_fit;
  if (delta > 0.0 && histogram.window() > delta) {
    const auto outer = [central_limit](double tau) { return std::abs(tau) >= central_limit; };
    const auto outer_points = select_points(histogram, outer);
    if (outer_points.size() >= 10) {
      const Model replica_model = [response, delta](std::span<const double> p, double tau) {
        return ReplicaG2x{p[0], p[1], delta}(tau, response);
      };
      const double amp0 = std::max(histogram.g2()[histogram.nearest_index(delta)] - 1.0, 1e-3);
      starts.clear();
      for (double t : tau_grid) starts.push_back({amp0, 0.5 * t});
      const std::vector<ParameterBounds> replica_bounds = {{0.0, 1e3}, {1e-3 * b, kInf}};
      const auto replicas = solve(outer_points, replica_model, starts, replica_bounds, options,
                                  "replicas");
      replica_fit = to_model_fit("replicas", {"amplitude", "decay"}, replicas,
                                 outer_points.size());
      report.candidates.push_back(*replica_fit);
    }
  }

  // Best of the three central models by reduced chi-square.
  const ModelFit* best = &report.candidates[0];
  for (std::size_t i = 1; i < 3; ++i) {
    if (report.candidates[i].chi2_reduced < best->chi2_reduced) best = &report.candidates[i];
  }
  report.model = best->model;
  report.params = best->params;
  report.chi2_reduced = best->chi2_reduced;
  if (best->model == to_string(G2xModelKind::kChaotic)) {
    fill_residuals(report, points, [](double) { return 1.0; });
  } else if (best->model == to_string(G2xModelKind::kMixture)) {
    const auto params = mixture.params;
    fill_residuals(report, points, [&](double tau) { return mixture_model(params, tau); });
  } else {
    const auto params = coherent.params;
    fill_residuals(report, points, [&](double tau) { return coherent_model(params, tau); });
  }

  // Effective coherence time: from the dip when there is one, otherwise from
  // the replica width (the replicas carry |g1|^2 of the source).
  double tau_c_eff = 5.0 * b;
  const double dip_sigma = histogram.sigma()[center];
  if (depth > options.threshold_sigmas * dip_sigma) {
    tau_c_eff = coherent_fit.chi2_reduced < mixture_fit.chi2_reduced
                    ? coherent_fit.params[2].value
                    : mixture_fit.params[1].value;
  } else if (replica_fit && replica_fit->params[0].value > 0.0) {
    tau_c_eff = 2.0 * replica_fit->params[1].value;
  }
  report.evidence = gather_evidence(histogram, delta, tau_c_eff);
  report.verdict = classify(report, options.threshold_sigmas, options.chi2_margin);
  return report;
}

Verdict classify(const FitReport& report, double threshold_sigmas, double chi2_margin) {
  if (!report.evidence) return Verdict::kInconclusive;
  const Evidence& e = *report.evidence;
  const bool dip = e.dip_depth > threshold_sigmas * e.dip_depth_sigma;
  const bool background = e.background_excess > threshold_sigmas * e.background_excess_sigma;

  Verdict verdict = Verdict::kInconclusive;
  if (!dip && !background) {
    verdict = Verdict::kChaotic;
  } else if (dip && background) {
    verdict = Verdict::kCoherentAm;
  } else if (dip) {
    verdict = Verdict::kMixture;
  }
  if (verdict == Verdict::kInconclusive) return verdict;

  const auto model_name = [](Verdict v) -> std::string_view {
    switch (v) {
      case Verdict::kChaotic: return to_string(G2xModelKind::kChaotic);
      case Verdict::kCoherentAm: return to_string(G2xModelKind::kCoherentAm);
      case Verdict::kMixture: return to_string(G2xModelKind::kMixture);
      case Verdict::kInconclusive: break;
    }
    return {};
  };
  const ModelFit* chosen = nullptr;
  double best = kInf;
  for (const auto& c : report.candidates) {
    if (c.model == "replicas") continue;
    best = std::min(best, c.chi2_reduced);
    if (c.model == model_name(verdict)) chosen = &c;
  }
  if (chosen != nullptr && chosen->chi2_reduced > (1.0 + chi2_margin) * best) {
    return Verdict::kInconclusive;
  }
  return verdict;
}

}  // namespace photostat
