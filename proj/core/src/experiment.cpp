#include "photostat/experiment.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <thread>
#include <vector>

#include <json.hpp>

#include "photostat/error.hpp"
#include "photostat/rng.hpp"

namespace photostat {

namespace {

using nlohmann::ordered_json;

template <typename Enum>
struct EnumName {
  Enum value;
  const char* name;
};

constexpr EnumName<SourceKind> kSourceKinds[] = {{SourceKind::kChaotic, "chaotic"},
                                                 {SourceKind::kCoherentAm, "coherent_am"},
                                                 {SourceKind::kMixture, "mixture"}};
constexpr EnumName<AmplitudeNoise> kNoiseKinds[] = {
    {AmplitudeNoise::kChiSquare, "chi_square"},
    {AmplitudeNoise::kClampedGaussian, "clamped_gaussian"}};
constexpr EnumName<MixtureMode> kMixtureModes[] = {
    {MixtureMode::kEnsemble, "ensemble"}, {MixtureMode::kFieldSuperposition, "superposition"}};
constexpr EnumName<DitherKind> kDitherKinds[] = {{DitherKind::kNone, "none"},
                                                 {DitherKind::kRandomPhase, "random_phase"}};
constexpr EnumName<SplitMode> kSplitModes[] = {{SplitMode::kBothArms, "both_arms"},
                                               {SplitMode::kBlockArm, "block_arm"}};
constexpr EnumName<Arm> kArms[] = {{Arm::kShort, "short"}, {Arm::kLong, "long"}};

template <typename Enum, std::size_t N>
const char* name_of(const EnumName<Enum> (&table)[N], Enum value) {
  for (const auto& e : table) {
    if (e.value == value) return e.name;
  }
  return "unknown";
}

template <typename Enum, std::size_t N>
Enum value_of(const EnumName<Enum> (&table)[N], const std::string& name, const char* what) {
  for (const auto& e : table) {
    if (name == e.name) return e.value;
  }
  std::string choices;
  for (const auto& e : table) choices += std::string(choices.empty() ? "" : ", ") + e.name;
  fail(ErrorKind::kValidation, std::string("unknown ") + what + " '" + name + "' (expected " +
                                   choices + ")");
}

/// Reads keys from one JSON object and rejects any it did not consume.
class Section {
 public:
  Section(const ordered_json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(ErrorKind::kValidation, path_ + " must be a JSON object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const ordered_json::exception&) {
      fail(ErrorKind::kValidation, path_ + "." + key + " has the wrong type");
    }
  }

  template <typename Enum, std::size_t N>
  void read_enum(const char* key, const EnumName<Enum> (&table)[N], Enum& out) {
    std::string name;
    read(key, name);
    if (!name.empty()) out = value_of(table, name, (path_ + "." + key).c_str());
  }

  std::optional<Section> child(const char* key) {
    seen_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return std::nullopt;
    return Section(j_.at(key), path_ + "." + key);
  }

  const ordered_json& raw(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }
  bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) fail(ErrorKind::kValidation, "unknown key " + path_ + "." + key);
    }
  }

 private:
  const ordered_json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_detector(Section s, DetectorConfig& d) {
  s.read("efficiency", d.efficiency);
  s.read("jitter_sigma", d.jitter_sigma);
  s.read("dead_time", d.dead_time);
  s.finish();
}

ordered_json detector_json(const DetectorConfig& d) {
  return {{"efficiency", d.efficiency}, {"jitter_sigma", d.jitter_sigma}, {"dead_time", d.dead_time}};
}

ordered_json to_json(const ExperimentConfig& c, bool with_outputs) {
  ordered_json j;
  const auto& s = c.source;
  j["source"] = {{"kind", name_of(kSourceKinds, s.kind)},
                 {"tau_c", s.tau_c},
                 {"tau_amp", s.tau_amp},
                 {"alpha", s.alpha},
                 {"x", s.x},
                 {"amplitude_noise", name_of(kNoiseKinds, s.amplitude_noise)},
                 {"mixture_mode", name_of(kMixtureModes, s.mixture_mode)},
                 {"block_duration", s.block_duration}};
  const auto& i = c.interferometer;
  j["interferometer"] = {{"delta", i.delta},
                         {"dither",
                          {{"kind", name_of(kDitherKinds, i.dither.kind)},
                           {"segment_duration", i.dither.segment_duration}}},
                         {"split_mode", name_of(kSplitModes, i.split_mode)},
                         {"blocked_arm", name_of(kArms, i.blocked_arm)}};
  j["detectors"] = {detector_json(c.detectors[0]), detector_json(c.detectors[1])};
  j["correlator"] = {{"bin_width", c.correlator.bin_width}, {"window", c.correlator.window}};
  j["run"] = {{"duration", c.run.duration},
              {"dt", c.run.dt},
              {"flux", c.run.flux},
              {"realizations", c.run.realizations},
              {"master_seed", c.run.master_seed}};
  if (with_outputs) j["outputs"] = c.outputs;
  return j;
}

}  // namespace

double ExperimentConfig::window() const {
  if (correlator.window > 0.0) return correlator.window;
  return 4.0 * (interferometer.delta + 5.0 * source.longest_correlation_time());
}

CorrelationMode ExperimentConfig::mode() const noexcept {
  return interferometer.split_mode == SplitMode::kBlockArm ? CorrelationMode::kAuto
                                                           : CorrelationMode::kCross;
}

void ExperimentConfig::validate() const {
  source.validate();
  interferometer.validate_against(source, run.duration);
  for (const auto& d : detectors) d.validate();
  require(run.duration > 0.0 && std::isfinite(run.duration), "run.duration must be positive");
  require(run.dt > 0.0 && std::isfinite(run.dt), "run.dt must be positive");
  require(run.flux > 0.0 && std::isfinite(run.flux), "run.flux must be positive");
  require(run.realizations >= 1, "run.realizations must be at least 1");
  require(correlator.bin_width > 0.0, "correlator.bin_width must be positive");
  half_bins_for(correlator.bin_width, window());
  delay_samples(interferometer.delta, run.dt);
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::exception& e) {
    fail(ErrorKind::kFormat, std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig c;
  Section root(j, "config");
  if (auto s = root.child("source")) {
    s->read_enum("kind", kSourceKinds, c.source.kind);
    s->read("tau_c", c.source.tau_c);
    s->read("tau_amp", c.source.tau_amp);
    s->read("alpha", c.source.alpha);
    s->read("x", c.source.x);
    s->read_enum("amplitude_noise", kNoiseKinds, c.source.amplitude_noise);
    s->read_enum("mixture_mode", kMixtureModes, c.source.mixture_mode);
    s->read("block_duration", c.source.block_duration);
    s->finish();
  }
  if (auto s = root.child("interferometer")) {
    s->read("delta", c.interferometer.delta);
    if (auto d = s->child("dither")) {
      d->read_enum("kind", kDitherKinds, c.interferometer.dither.kind);
      d->read("segment_duration", c.interferometer.dither.segment_duration);
      d->finish();
    }
    s->read_enum("split_mode", kSplitModes, c.interferometer.split_mode);
    s->read_enum("blocked_arm", kArms, c.interferometer.blocked_arm);
    s->finish();
  }
  if (root.has("detectors")) {
    const auto& d = root.raw("detectors");
    if (d.is_array()) {
      if (d.size() != 2) fail(ErrorKind::kValidation, "config.detectors must list two detectors");
      read_detector(Section(d[0], "config.detectors[0]"), c.detectors[0]);
      read_detector(Section(d[1], "config.detectors[1]"), c.detectors[1]);
    } else {
      read_detector(Section(d, "config.detectors"), c.detectors[0]);
      c.detectors[1] = c.detectors[0];
    }
  }
  if (auto s = root.child("correlator")) {
    s->read("bin_width", c.correlator.bin_width);
    s->read("window", c.correlator.window);
    s->finish();
  }
  if (auto s = root.child("run")) {
    s->read("duration", c.run.duration);
    s->read("dt", c.run.dt);
    s->read("flux", c.run.flux);
    s->read("realizations", c.run.realizations);
    s->read("master_seed", c.run.master_seed);
    s->finish();
  }
  root.read("outputs", c.outputs);
  root.finish();
  return c;
}

std::string experiment_config_json(const ExperimentConfig& config) {
  return to_json(config, true).dump(2) + "\n";
}

std::string config_hash(const ExperimentConfig& config) {
  const std::string canonical = to_json(config, false).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

RealizationTags simulate_realization(const ExperimentConfig& c, std::size_t index) {
  const std::uint64_t master = c.run.master_seed;
  SourceModel source = c.source;
  source.seed = derive_seed(master, index, SeedStream::kField);
  const FieldTrace field = generate(source, c.run.duration, c.run.dt, c.run.flux);

  InterferometerConfig ifm = c.interferometer;
  ifm.dither_seed = derive_seed(master, index, SeedStream::kDither);
  const PortIntensities ports = transform(field, ifm);

  DetectorConfig da = c.detectors[0];
  DetectorConfig db = c.detectors[1];
  da.seed = derive_seed(master, index, SeedStream::kDetectorA);
  db.seed = derive_seed(master, index, SeedStream::kDetectorB);
  const double port_flux = 0.5 * c.run.flux;
  return {detect(ports.a, port_flux, da, 0), detect(ports.b, port_flux, db, 1)};
}

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& task) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(jobs, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (!stop.load()) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) break;
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          stop = true;
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

ExperimentResult run_experiment(const ExperimentConfig& c, unsigned jobs,
                                const RealizationSink& sink) {
  c.validate();
  const double bin = c.correlator.bin_width;
  const double window = c.window();
  const auto mode = c.mode();
  std::vector<CorrelationHistogram> parts(c.run.realizations);
  std::vector<std::size_t> counts_a(c.run.realizations);
  std::vector<std::size_t> counts_b(c.run.realizations);

  parallel_for(c.run.realizations, jobs, [&](std::size_t i) {
    const RealizationTags tags = simulate_realization(c, i);
    if (sink) sink(i, tags);
    parts[i] = mode == CorrelationMode::kAuto ? autocorrelate(tags.a, tags.b, bin, window)
                                              : cross_correlate(tags.a, tags.b, bin, window);
    counts_a[i] = tags.a.size();
    counts_b[i] = tags.b.size();
  });

  ExperimentResult result;
  result.histogram = CorrelationHistogram(bin, half_bins_for(bin, window), mode);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    result.histogram = merge(result.histogram, parts[i]);
    result.tags_a += counts_a[i];
    result.tags_b += counts_b[i];
  }
  return result;
}

}  // namespace photostat
