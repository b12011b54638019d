// Acceptance suite: one PASS/FAIL line per criterion, followed by the
// individual checks. Exit status is non-zero if any criterion fails.
//
//   photostat_acceptance [--only N[,M...]] [--seed S] [--jobs J]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "photostat/analysis.hpp"
#include "photostat/correlator.hpp"
#include "photostat/detector.hpp"
#include "photostat/error.hpp"
#include "photostat/experiment.hpp"
#include "photostat/field.hpp"
#include "photostat/interferometer.hpp"
#include "photostat/rng.hpp"
#include "scenarios.hpp"

namespace {

using namespace photostat;
using photostat::cli::Check;

constexpr double kPs = 1e-12;
constexpr std::size_t kMinTags = 1'000'000;

struct Options {
  std::set<int> only;
  std::uint64_t seed = 7;
  unsigned jobs = 1;
};

struct Outcome {
  int criterion;
  std::string title;
  std::vector<Check> checks;
  double seconds = 0.0;
};

std::string fmt(const char* format, auto... args) {
  char buffer[320];
  std::snprintf(buffer, sizeof buffer, format, args...);
  return buffer;
}

Check tag_check(const ExperimentResult& r) {
  Check c;
  c.label = "tags per channel";
  c.pass = r.tags_a >= kMinTags && r.tags_b >= kMinTags;
  c.detail = fmt("%zu / %zu (minimum %zu)", r.tags_a, r.tags_b, kMinTags);
  return c;
}

/// Pipeline runs shared between criteria 4, 5 and 6.
struct SharedRuns {
  const Options& options;
  std::optional<ExperimentResult> chaotic_cross;
  std::optional<ExperimentResult> chaotic_companion;
  std::optional<ExperimentResult> laser_cross;
  std::optional<FitReport> chaotic_fit;
  std::optional<FitReport> laser_fit;

  const ExperimentResult& chaotic() {
    if (!chaotic_cross) {
      const auto cfg = cli::chaotic_cross(options.seed + 4);
      chaotic_cross = run_experiment(cfg, options.jobs);
      chaotic_fit = fit_g2x(chaotic_cross->histogram, cfg.interferometer.delta);
    }
    return *chaotic_cross;
  }
  const ExperimentResult& companion() {
    if (!chaotic_companion) {
      chaotic_companion = run_experiment(cli::chaotic_cross_companion(options.seed + 5),
                                         options.jobs);
    }
    return *chaotic_companion;
  }
  const ExperimentResult& laser() {
    if (!laser_cross) {
      const auto cfg = cli::laser_cross(options.seed + 6);
      laser_cross = run_experiment(cfg, options.jobs);
      laser_fit = fit_g2x(laser_cross->histogram, cfg.interferometer.delta);
    }
    return *laser_cross;
  }
};

std::vector<Check> criterion1(const Options& o) {
  const auto cfg = cli::chaotic_auto_ideal(o.seed + 1);
  const auto r = run_experiment(cfg, o.jobs);
  auto checks = cli::check_chaotic_auto_ideal(r.histogram, cfg.source.tau_c);
  checks.push_back(tag_check(r));
  return checks;
}

std::vector<Check> criterion2(const Options& o) {
  const auto cfg = cli::chaotic_auto_resolved(o.seed + 2);
  const auto r = run_experiment(cfg, o.jobs);
  auto checks = cli::check_chaotic_auto_resolved(r.histogram, cfg.source.tau_c,
                                                 cli::pair_resolution(cfg));
  checks.push_back(tag_check(r));
  return checks;
}

std::vector<Check> criterion3(const Options& o) {
  const auto r = run_experiment(cli::laser_auto(o.seed + 3), o.jobs);
  auto checks = cli::check_laser_auto(r.histogram);
  checks.push_back(tag_check(r));
  return checks;
}

std::vector<Check> criterion4(SharedRuns& runs) {
  const auto& cross = runs.chaotic();
  const auto& companion = runs.companion();
  auto checks = cli::check_chaotic_cross(cross.histogram, companion.histogram,
                                         cli::chaotic_cross(0).interferometer.delta);
  checks.push_back(tag_check(cross));
  return checks;
}

std::vector<Check> criterion5(SharedRuns& runs) {
  const auto& r = runs.laser();
  const auto cfg = cli::laser_cross(0);
  auto checks = cli::check_laser_cross(r.histogram, *runs.laser_fit, cfg.source.alpha,
                                       cfg.source.tau_amp);
  checks.push_back(tag_check(r));
  return checks;
}

std::vector<Check> criterion6(SharedRuns& runs) {
  constexpr double kX = 0.5;
  const auto cfg = cli::mixture_cross(kX, runs.options.seed + 8);
  const auto r = run_experiment(cfg, runs.options.jobs);
  const auto fit = fit_g2x(r.histogram, cfg.interferometer.delta);
  auto checks = cli::check_mixture_cross(r.histogram, fit, kX);
  checks.push_back(tag_check(r));
  runs.laser();
  checks.push_back(cli::check_verdict(*runs.laser_fit, Verdict::kCoherentAm,
                                      "coherent-AM run (criterion 5) verdict"));
  runs.chaotic();
  checks.push_back(cli::check_verdict(*runs.chaotic_fit, Verdict::kChaotic,
                                      "chaotic run (criterion 4) verdict"));
  return checks;
}

// Criterion 7: the detected pipeline against the six-term oracle evaluated on
// the very same field trace. Sub-sample tag placement turns each histogram
// bin into a triangular-weighted sum over integer sample lags.
std::vector<Check> criterion7(const Options& o) {
  constexpr double kDt = 10 * kPs;
  constexpr std::size_t kSamples = 100'000;
  constexpr std::size_t kDelta = 120;       // samples
  constexpr std::size_t kBin = 20;          // samples
  constexpr std::size_t kWindow = 200;      // samples
  constexpr std::size_t kSegment = 900;     // samples, < record / 100
  constexpr int kRepeats = 200;
  constexpr double kClick = 0.006;          // click probability per unit intensity
  const double duration = kSamples * kDt;

  struct Source {
    const char* name;
    SourceModel model;
  };
  const Source sources[] = {
      {"chaotic", SourceModel::chaotic(20 * kDt)},
      {"coherent-AM", SourceModel::coherent_am(20 * kDt, 40 * kDt, 0.445)},
      {"mixture x=0.5", SourceModel::mixture(0.5, 20 * kDt)},
  };

  std::vector<Check> checks;
  int index = 0;
  for (const auto& source : sources) {
    SourceModel model = source.model;
    model.seed = derive_seed(o.seed + 70, index++, SeedStream::kField);
    const FieldTrace trace = generate(model, duration, kDt);

    InterferometerConfig ifm;
    ifm.delta = kDelta * kDt;
    ifm.dither = Dither::random_phase(kSegment * kDt);
    const double bin = kBin * kDt;
    const double window = kWindow * kDt;
    CorrelationHistogram h(bin, half_bins_for(bin, window), CorrelationMode::kCross);
    for (int r = 0; r < kRepeats; ++r) {
      ifm.dither_seed = derive_seed(o.seed + 71, r, SeedStream::kDither);
      const auto ports = transform(trace, ifm);
      const auto a = detect(ports.a, kClick / kDt,
                            DetectorConfig::ideal(derive_seed(o.seed + 72, r, SeedStream::kDetectorA)), 0);
      const auto b = detect(ports.b, kClick / kDt,
                            DetectorConfig::ideal(derive_seed(o.seed + 72, r, SeedStream::kDetectorB)), 1);
      h = merge(h, cross_correlate(a, b, bin, window));
    }

    const auto half = static_cast<std::int64_t>(h.half_bins());
    const auto width = static_cast<std::int64_t>(kBin);
    std::vector<std::int64_t> lags;
    for (std::int64_t L = -(half * width + width / 2 + 1); L <= half * width + width / 2 + 1; ++L) {
      lags.push_back(L);
    }
    const auto oracle = oracle_six_terms_lags(trace, kDelta, lags);

    double worst = 0.0;
    double worst_tau = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) {
      const double center = static_cast<double>((static_cast<std::int64_t>(k) - half) * width);
      const double lo = center - 0.5 * kBin;
      const double hi = center + 0.5 * kBin;
      double expected = 0.0;
      for (std::size_t i = 0; i < lags.size(); ++i) {
        expected += testing::triangular_bin_weight(lo, hi, static_cast<double>(lags[i])) * oracle[i];
      }
      expected /= static_cast<double>(kBin);
      const double z = std::abs(h.g2()[k] - expected) / h.sigma()[k];
      if (z > worst) {
        worst = z;
        worst_tau = h.tau(k);
      }
    }
    Check c;
    c.label = std::string(source.name) + ": max |pipeline - oracle| / sigma over all bins";
    c.pass = worst < 3.0;
    c.detail = fmt("%.2f sigma at tau = %.0f ps (%zu bins, %llu pairs; limit 3)", worst,
                   worst_tau / kPs, h.size(), static_cast<unsigned long long>(h.total_pairs()));
    checks.push_back(c);
  }
  return checks;
}

// Criterion 8: sweep correlator against brute-force counting.
std::vector<Check> criterion8(const Options& o) {
  std::mt19937_64 engine(o.seed + 80);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int identical = 0;
  std::size_t largest = 0;
  std::string first_mismatch;
  constexpr int kStreams = 100;
  for (int trial = 0; trial < kStreams; ++trial) {
    const double duration = 1e-3 * (1.0 + 9.0 * unit(engine));
    const std::size_t na = 100 + static_cast<std::size_t>(unit(engine) * 9900);
    const bool shared = trial % 5 == 1;
    std::size_t nb = 100 + static_cast<std::size_t>(unit(engine) * 9900);
    if (shared) nb = std::min(nb, 10'000 - na / 2);
    const double bin = duration / na * (0.01 + unit(engine));
    const auto half = static_cast<std::size_t>(10 + unit(engine) * 100);
    // Half the trials put every tag on a grid of bin/(4m) so that
    // differences land exactly on bin edges.
    const bool on_grid = trial % 2 == 0;
    const double m = std::ceil(static_cast<double>(std::max(na, nb)) * bin / duration);
    const double quantum = bin / (4.0 * m);
    const auto make = [&](std::size_t n, std::uint32_t channel) {
      std::set<double> unique;
      while (unique.size() < n) {
        double t = unit(engine) * duration;
        if (on_grid) t = std::floor(t / quantum) * quantum;
        unique.insert(t);
      }
      TagStream s;
      s.tags.assign(unique.begin(), unique.end());
      s.duration = duration;
      s.channel = channel;
      return s;
    };
    const TagStream a = make(na, 0);
    TagStream b = make(nb, 1);
    if (shared) {
      // Shared tags: zero-delay coincidences.
      std::set<double> merged(b.tags.begin(), b.tags.end());
      merged.insert(a.tags.begin(), a.tags.begin() + static_cast<std::ptrdiff_t>(na / 2));
      b.tags.assign(merged.begin(), merged.end());
    }
    largest = std::max({largest, a.size(), b.size()});
    const auto h = cross_correlate(a, b, bin, static_cast<double>(half) * bin);
    const auto naive = testing::naive_pair_counts(a, b, bin, half);
    const bool same = std::equal(naive.begin(), naive.end(), h.counts().begin(), h.counts().end());
    if (same) {
      ++identical;
    } else if (first_mismatch.empty()) {
      first_mismatch = fmt("first mismatch in trial %d", trial);
    }
  }
  Check c;
  c.label = "bit-identical counts against naive O(N^2) counting";
  c.pass = identical == kStreams && largest <= 10'000;
  c.detail = fmt("%d / %d streams identical, largest stream %zu tags%s%s", identical, kStreams,
                 largest, first_mismatch.empty() ? "" : "; ", first_mismatch.c_str());
  return {c};
}

// Criterion 9: runtime at fixed in-window pair density when N doubles.
std::vector<Check> criterion9(const Options& o) {
  constexpr double kRate = 1e6;                 // tags per second per channel
  constexpr double kBin = 10e-9;                // rate * bin = 1% occupancy per bin
  constexpr std::size_t kHalf = 500;            // 1001 bins, ~10 partners per reference
  constexpr std::size_t kLarge = 10'000'000;
  const double window = kHalf * kBin;

  const auto timed = [&](std::size_t n, std::uint64_t seed) {
    const double duration = static_cast<double>(n) / kRate;
    const TagStream a = testing::poisson_stream(kRate, duration, seed, 0);
    const TagStream b = testing::poisson_stream(kRate, duration, seed + 1, 1);
    double best = 1e300;
    std::uint64_t pairs = 0;
    for (int rep = 0; rep < 3; ++rep) {
      const auto start = std::chrono::steady_clock::now();
      const auto h = cross_correlate(a, b, kBin, window);
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      best = std::min(best, elapsed.count());
      pairs = h.total_pairs();
    }
    return std::pair{best, pairs};
  };
  const auto [t_half, p_half] = timed(kLarge / 2, o.seed + 90);
  const auto [t_full, p_full] = timed(kLarge, o.seed + 92);
  const double ratio = t_full / t_half;
  Check c;
  c.label = "runtime ratio t(2N)/t(N), N = 5e6 -> 1e7 tags per channel";
  c.pass = ratio >= 2.0 * 0.7 && ratio <= 2.0 * 1.3;
  c.detail = fmt("%.3f s -> %.3f s, ratio %.3f (limits [1.4, 2.6]); pairs %.3g -> %.3g", t_half,
                 t_full, ratio, static_cast<double>(p_half), static_cast<double>(p_full));
  return {c};
}

Options parse(int argc, char** argv) {
  Options o;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    const auto value = [&]() -> std::string {
      if (i + 1 >= argc) {
        std::fprintf(stderr, "missing value for %s\n", arg.c_str());
        std::exit(2);
      }
      return argv[++i];
    };
    if (arg == "--only") {
      std::stringstream list(value());
      std::string item;
      while (std::getline(list, item, ',')) o.only.insert(std::stoi(item));
    } else if (arg == "--seed") {
      o.seed = std::stoull(value());
    } else if (arg == "--jobs") {
      o.jobs = static_cast<unsigned>(std::stoul(value()));
    } else {
      std::fprintf(stderr, "usage: %s [--only N[,M...]] [--seed S] [--jobs J]\n", argv[0]);
      std::exit(2);
    }
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const Options options = parse(argc, argv);
  std::size_t suppressed = 0;
  photostat::set_warning_handler([&](std::string_view) { ++suppressed; });

  SharedRuns shared{options, {}, {}, {}, {}, {}};
  struct Criterion {
    int number;
    const char* title;
    std::function<std::vector<Check>()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "Siegert relation, chaotic g2 with ideal detectors", [&] { return criterion1(options); }},
      {2, "resolution-limited chaotic peak", [&] { return criterion2(options); }},
      {3, "coherent-AM autocorrelation", [&] { return criterion3(options); }},
      {4, "chaotic cross-correlation at delta = 550 ps", [&] { return criterion4(shared); }},
      {5, "coherent-AM cross-correlation at delta = 11 ns", [&] { return criterion5(shared); }},
      {6, "mixture discrimination", [&] { return criterion6(shared); }},
      {7, "pipeline against six-term oracle", [&] { return criterion7(options); }},
      {8, "correlator exactness", [&] { return criterion8(options); }},
      {9, "correlator scaling", [&] { return criterion9(options); }},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (!options.only.empty() && !options.only.count(c.number)) continue;
    const auto start = std::chrono::steady_clock::now();
    std::vector<Check> checks;
    try {
      checks = c.run();
    } catch (const std::exception& e) {
      checks.push_back({"run", false, std::string("error: ") + e.what()});
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    const bool pass = cli::all_pass(checks);
    failures += pass ? 0 : 1;
    std::printf("[%s] criterion %d: %s (%.1f s)\n", pass ? "PASS" : "FAIL", c.number, c.title,
                elapsed.count());
    for (const auto& check : checks) {
      std::printf("    %s %s: %s\n", check.pass ? "ok  " : "FAIL", check.label.c_str(),
                  check.detail.c_str());
    }
    std::fflush(stdout);
  }
  if (suppressed > 0) std::printf("(%zu detector warnings suppressed)\n", suppressed);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
