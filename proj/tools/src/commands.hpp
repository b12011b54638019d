#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace photostat::cli {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitChecksFailed = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitStatistics = 3;
inline constexpr int kExitIo = 4;

/// Overrides applied on top of a configuration file; flags win.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> bin_width;
  std::optional<double> window;
  std::optional<double> delta;
  std::optional<std::string> out_dir;
};

struct SimulateOptions {
  std::string config;
  Overrides overrides;
  unsigned jobs = 1;
};

struct CorrelateOptions {
  std::vector<std::string> inputs;  // manifest.json, a simulate directory, or PSTG pairs
  std::string config;
  Overrides overrides;
  std::string mode;  // "auto", "cross" or empty for the manifest's mode
  std::string name = "histogram";
  unsigned jobs = 1;
};

struct FitOptionsCli {
  std::string histogram;
  std::string model;  // empty: g2x for cross histograms, coherent_am for auto
  std::optional<double> delta;
  double resolution_sigma = 0.0;
  double fit_range = 0.0;
  std::string out;
};

struct ClassifyOptions {
  std::string report;
  double threshold = 3.0;
  double chi2_margin = 0.10;
};

struct ReproduceOptions {
  std::string figure = "all";
  std::uint64_t seed = 20120501;
  std::string out_dir = "photostat-reproduce";
  unsigned jobs = 1;
};

int cmd_simulate(const SimulateOptions& options, std::ostream& out);
int cmd_correlate(const CorrelateOptions& options, std::ostream& out);
int cmd_fit(const FitOptionsCli& options, std::ostream& out);
int cmd_classify(const ClassifyOptions& options, std::ostream& out);
int cmd_reproduce(const ReproduceOptions& options, std::ostream& out);

/// Parses the command line and dispatches. Library errors are reported on
/// `err` and mapped onto the exit codes above.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace photostat::cli
