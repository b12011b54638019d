#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "photostat/analysis.hpp"
#include "photostat/binary_io.hpp"
#include "photostat/error.hpp"
#include "photostat/experiment.hpp"
#include "photostat/serialization.hpp"
#include "scenarios.hpp"

namespace photostat::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string realization_file(std::size_t index, char channel) {
  std::ostringstream os;
  os << 'r' << std::setw(4) << std::setfill('0') << index << '_' << channel << ".pstg";
  return os.str();
}

/// Rounds delta onto the sample grid and reports the adjustment.
void snap_delta(ExperimentConfig& c, std::ostream& out) {
  if (c.run.dt <= 0.0) return;
  const double steps = c.interferometer.delta / c.run.dt;
  const double rounded = std::round(steps);
  if (std::abs(steps - rounded) > 1e-6 * std::max(1.0, rounded)) {
    const double snapped = rounded * c.run.dt;
    out << "note: delta " << c.interferometer.delta << " s rounded to " << snapped << " s ("
        << static_cast<long long>(rounded) << " samples of " << c.run.dt << " s)\n";
    c.interferometer.delta = snapped;
  }
}

void apply(const Overrides& o, ExperimentConfig& c) {
  if (o.seed) c.run.master_seed = *o.seed;
  if (o.bin_width) c.correlator.bin_width = *o.bin_width;
  if (o.window) c.correlator.window = *o.window;
  if (o.delta) c.interferometer.delta = *o.delta;
  if (o.out_dir) c.outputs = *o.out_dir;
}

ExperimentConfig load_config(const std::string& path, const Overrides& o, std::ostream& out) {
  ExperimentConfig c = parse_experiment_config(read_text_file(path));
  apply(o, c);
  snap_delta(c, out);
  return c;
}

CorrelationMode parse_mode(const std::string& s) {
  if (s == "auto") return CorrelationMode::kAuto;
  if (s == "cross") return CorrelationMode::kCross;
  fail(ErrorKind::kValidation, "--mode must be auto or cross, got '" + s + "'");
}

void print_summary(std::ostream& out, const CorrelationHistogram& h) {
  const auto c = h.center_index();
  out << "histogram: " << h.size() << " bins of " << h.bin_width() << " s, "
      << h.total_pairs() << " pairs, g2(0) = " << std::fixed << std::setprecision(4)
      << h.g2()[c] << " +- " << h.sigma()[c] << std::defaultfloat << "\n";
}

void print_checks(std::ostream& out, const std::string& title, const std::vector<Check>& checks) {
  for (const auto& c : checks) {
    out << (c.pass ? "PASS" : "FAIL") << "  " << title << ": " << c.label << ": " << c.detail
        << "\n";
  }
}

}  // namespace

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
  ExperimentConfig c = load_config(o.config, o.overrides, out);
  c.validate();
  const fs::path dir = c.outputs;
  fs::create_directories(dir);
  const std::string hash = config_hash(c);

  struct Entry {
    std::size_t tags_a = 0;
    std::size_t tags_b = 0;
    double duration = 0.0;
  };
  std::vector<Entry> entries(c.run.realizations);
  parallel_for(c.run.realizations, o.jobs, [&](std::size_t i) {
    const RealizationTags tags = simulate_realization(c, i);
    write_tag_stream(dir / realization_file(i, 'a'), tags.a);
    write_tag_stream(dir / realization_file(i, 'b'), tags.b);
    entries[i] = {tags.a.size(), tags.b.size(), tags.a.duration};
  });

  ordered_json manifest;
  manifest["config_hash"] = hash;
  manifest["config"] = ordered_json::parse(experiment_config_json(c));
  manifest["mode"] = std::string(to_string(c.mode()));
  manifest["delta"] = c.interferometer.delta;
  ordered_json list = ordered_json::array();
  std::size_t total_a = 0;
  std::size_t total_b = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    list.push_back({{"index", i},
                    {"duration", entries[i].duration},
                    {"a", {{"file", realization_file(i, 'a')}, {"tags", entries[i].tags_a}}},
                    {"b", {{"file", realization_file(i, 'b')}, {"tags", entries[i].tags_b}}}});
    total_a += entries[i].tags_a;
    total_b += entries[i].tags_b;
  }
  manifest["realizations"] = std::move(list);
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
  write_file_atomic(dir / "config.json", experiment_config_json(c));
  out << "simulated " << c.run.realizations << " realization(s): " << total_a << " tags on A, "
      << total_b << " tags on B -> " << dir.string() << " (config " << hash << ")\n";
  return kExitOk;
}

int cmd_correlate(const CorrelateOptions& o, std::ostream& out) {
  require(!o.inputs.empty(), "correlate needs a manifest, a simulate directory or tag files");

  std::vector<std::pair<fs::path, fs::path>> pairs;
  std::optional<ExperimentConfig> config;
  std::string hash;
  std::optional<double> delta;
  std::optional<CorrelationMode> mode;

  for (const auto& input : o.inputs) {
    if (!fs::exists(input)) fail(ErrorKind::kIo, input + ": no such file or directory");
  }
  fs::path first = o.inputs.front();
  if (o.inputs.size() == 1 && fs::is_directory(first)) first /= "manifest.json";
  if (o.inputs.size() == 1 && first.extension() == ".json") {
    ordered_json manifest;
    try {
      manifest = ordered_json::parse(read_text_file(first));
      config = parse_experiment_config(manifest.at("config").dump());
      hash = manifest.at("config_hash").get<std::string>();
      delta = manifest.at("delta").get<double>();
      mode = manifest.at("mode").get<std::string>() == "auto" ? CorrelationMode::kAuto
                                                              : CorrelationMode::kCross;
      const fs::path base = first.parent_path();
      for (const auto& r : manifest.at("realizations")) {
        pairs.emplace_back(base / r.at("a").at("file").get<std::string>(),
                           base / r.at("b").at("file").get<std::string>());
      }
    } catch (const ordered_json::exception& e) {
      fail(ErrorKind::kFormat, first.string() + ": " + e.what());
    }
  } else {
    if (o.inputs.size() % 2 != 0) {
      fail(ErrorKind::kValidation, "tag files must come in (A, B) pairs");
    }
    for (std::size_t i = 0; i < o.inputs.size(); i += 2) {
      pairs.emplace_back(o.inputs[i], o.inputs[i + 1]);
    }
  }
  if (!o.config.empty()) {
    config = parse_experiment_config(read_text_file(o.config));
    hash = config_hash(*config);
    delta = config->interferometer.delta;
    mode = config->mode();
  }

  double bin = config ? config->correlator.bin_width : CorrelatorConfig{}.bin_width;
  std::optional<double> window;
  if (config) window = config->window();
  if (o.overrides.bin_width) bin = *o.overrides.bin_width;
  if (o.overrides.window) window = *o.overrides.window;
  if (o.overrides.delta) delta = *o.overrides.delta;
  if (!o.mode.empty()) mode = parse_mode(o.mode);
  if (!window) fail(ErrorKind::kValidation, "--window is required without a config or manifest");
  const CorrelationMode m = mode.value_or(CorrelationMode::kCross);

  std::vector<CorrelationHistogram> parts(pairs.size());
  parallel_for(pairs.size(), o.jobs, [&](std::size_t i) {
    const TagStream a = read_tag_stream(pairs[i].first);
    const TagStream b = read_tag_stream(pairs[i].second);
    parts[i] = m == CorrelationMode::kAuto ? autocorrelate(a, b, bin, *window)
                                           : cross_correlate(a, b, bin, *window);
  });
  CorrelationHistogram h(bin, half_bins_for(bin, *window), m);
  for (const auto& p : parts) h = merge(h, p);

  const fs::path dir = o.overrides.out_dir ? fs::path(*o.overrides.out_dir)
                                           : (config ? fs::path(config->outputs) : fs::path("."));
  write_histogram(dir / o.name, h, {hash, delta});
  print_summary(out, h);
  out << "wrote " << (dir / o.name).string() << ".csv and .json\n";
  return kExitOk;
}

int cmd_fit(const FitOptionsCli& o, std::ostream& out) {
  const LoadedHistogram loaded = read_histogram(o.histogram);
  const auto& h = loaded.histogram;

  std::optional<double> delta = loaded.meta.delta;
  if (o.delta) {
    if (delta && std::abs(*delta - *o.delta) > 1e-6 * std::max(std::abs(*delta), 1e-15)) {
      std::ostringstream os;
      os << "--delta " << *o.delta << " s conflicts with the histogram's recorded delta "
         << *delta << " s";
      fail(ErrorKind::kValidation, os.str());
    }
    delta = o.delta;
  }

  FitOptions fo;
  fo.resolution_sigma = o.resolution_sigma;
  fo.fit_range = o.fit_range;
  std::string model = o.model;
  if (model.empty()) model = h.mode() == CorrelationMode::kCross ? "g2x" : "coherent_am";

  FitReport report;
  if (model == "g2x") {
    if (!delta) fail(ErrorKind::kValidation, "g2x fits need --delta (none recorded)");
    report = fit_g2x(h, *delta, fo);
  } else {
    const auto kind = parse_g2_model(model);
    if (!kind) {
      fail(ErrorKind::kValidation,
           "unknown model '" + model + "' (g2x, chaotic_siegert, coherent_am, gaussian_peak)");
    }
    report = fit_g2(h, *kind, fo);
    report.delta = delta;
  }

  fs::path target = o.out;
  if (target.empty()) {
    target = o.histogram;
    target.replace_extension(".fit.json");
  }
  write_file_atomic(target, fit_report_json(report, loaded.meta.config_hash));
  out << "model " << report.model << ", reduced chi2 " << report.chi2_reduced << "\n";
  for (const auto& p : report.params) {
    out << "  " << p.name << " = " << p.value << " +- " << p.sigma << "\n";
  }
  if (report.verdict) out << "verdict: " << to_string(*report.verdict) << "\n";
  out << "wrote " << target.string() << "\n";
  return kExitOk;
}

int cmd_classify(const ClassifyOptions& o, std::ostream& out) {
  const FitReport report = parse_fit_report(read_text_file(o.report));
  if (!report.evidence) {
    fail(ErrorKind::kValidation, o.report + " has no classification evidence (not a g2x fit)");
  }
  const Verdict v = classify(report, o.threshold, o.chi2_margin);
  out << to_string(v);
  if (v == Verdict::kMixture) {
    const auto x = mixture_fraction(*report.evidence);
    out << " x=" << std::fixed << std::setprecision(3) << x.value << "+-" << x.sigma;
  }
  out << "\n";
  return kExitOk;
}

int cmd_reproduce(const ReproduceOptions& o, std::ostream& out) {
  std::vector<Figure> figures;
  if (o.figure == "all") {
    figures = {Figure::kFig2, Figure::kFig3Top, Figure::kFig3Bottom};
  } else if (auto f = parse_figure(o.figure)) {
    figures = {*f};
  } else {
    fail(ErrorKind::kValidation, "unknown figure '" + o.figure + "' (fig2, fig3-top, fig3-bottom, all)");
  }

  bool ok = true;
  for (Figure f : figures) {
    const fs::path dir = fs::path(o.out_dir) / std::string(to_string(f));
    const auto run = [&](const ExperimentConfig& c, const std::string& name) {
      const auto result = run_experiment(c, o.jobs);
      write_histogram(dir / name, result.histogram,
                      {config_hash(c), c.mode() == CorrelationMode::kCross
                                           ? std::optional<double>(c.interferometer.delta)
                                           : std::nullopt});
      write_file_atomic(dir / (name + ".config.json"), experiment_config_json(c));
      out << name << ": " << result.tags_a << " / " << result.tags_b << " tags, ";
      print_summary(out, result.histogram);
      return result.histogram;
    };
    const auto save_fit = [&](const FitReport& r, const std::string& name) {
      write_file_atomic(dir / (name + ".fit.json"), fit_report_json(r));
    };
    std::vector<Check> checks;
    switch (f) {
      case Figure::kFig2: {
        FitReport chaotic_fit;
        FitReport laser_fit;
        const auto cfg = chaotic_auto_resolved(o.seed);
        const auto chaotic = run(cfg, "chaotic_g2");
        auto c1 = check_chaotic_auto_resolved(chaotic, cfg.source.tau_c, pair_resolution(cfg),
                                              &chaotic_fit);
        save_fit(chaotic_fit, "chaotic_g2");
        print_checks(out, "fig2 chaotic", c1);
        const auto laser = run(laser_auto(o.seed + 1), "laser_g2");
        auto c2 = check_laser_auto(laser, &laser_fit);
        save_fit(laser_fit, "laser_g2");
        print_checks(out, "fig2 laser", c2);
        checks = c1;
        checks.insert(checks.end(), c2.begin(), c2.end());
        break;
      }
      case Figure::kFig3Top: {
        const auto cfg = chaotic_cross(o.seed + 2);
        const auto cross = run(cfg, "chaotic_g2x");
        const auto companion = run(chaotic_cross_companion(o.seed + 3), "chaotic_g2_companion");
        const auto fit = fit_g2x(cross, cfg.interferometer.delta);
        save_fit(fit, "chaotic_g2x");
        checks = check_chaotic_cross(cross, companion, cfg.interferometer.delta);
        checks.push_back(check_verdict(fit, Verdict::kChaotic, "verdict"));
        print_checks(out, "fig3-top", checks);
        break;
      }
      case Figure::kFig3Bottom: {
        const auto cfg = laser_cross(o.seed + 4);
        const auto cross = run(cfg, "laser_g2x");
        const auto fit = fit_g2x(cross, cfg.interferometer.delta);
        save_fit(fit, "laser_g2x");
        checks = check_laser_cross(cross, fit, cfg.source.alpha, cfg.source.tau_amp);
        checks.push_back(check_verdict(fit, Verdict::kCoherentAm, "verdict"));
        print_checks(out, "fig3-bottom", checks);
        break;
      }
    }
    ok = ok && all_pass(checks);
  }
  out << (ok ? "all checks passed" : "some checks failed") << "\n";
  return ok ? kExitOk : kExitChecksFailed;
}

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Photon-correlation simulation and analysis", "photostat"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "photostat 0.1.0");

  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  const auto add_jobs = [&](CLI::App* sub) {
    sub->add_option("--jobs", jobs, "Worker threads")->envname("PHOTOSTAT_JOBS")
        ->check(CLI::PositiveNumber);
  };
  const auto add_overrides = [](CLI::App* sub, Overrides& o) {
    sub->add_option("--seed", o.seed, "Master seed");
    sub->add_option("--bin-width", o.bin_width, "Histogram bin width (s)");
    sub->add_option("--window", o.window, "Histogram half-span (s)");
    sub->add_option("--delta", o.delta, "Interferometer delay (s)");
    sub->add_option("--out-dir", o.out_dir, "Output directory");
  };

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Generate tag files from a configuration");
  simulate->add_option("--config", sim.config, "Experiment configuration (JSON)")->required();
  add_overrides(simulate, sim.overrides);
  add_jobs(simulate);

  CorrelateOptions cor;
  auto* correlate = app.add_subcommand("correlate", "Histogram tag files");
  correlate->add_option("inputs", cor.inputs, "manifest.json, simulate directory or A B tag files")
      ->required();
  correlate->add_option("--config", cor.config, "Configuration supplying bins and delta");
  correlate->add_option("--mode", cor.mode, "auto or cross");
  correlate->add_option("--name", cor.name, "Output file stem");
  add_overrides(correlate, cor.overrides);
  add_jobs(correlate);

  FitOptionsCli fit;
  auto* fitcmd = app.add_subcommand("fit", "Fit a histogram");
  fitcmd->add_option("histogram", fit.histogram, "Histogram CSV or JSON sidecar")->required();
  fitcmd->add_option("--model", fit.model, "g2x, chaotic_siegert, coherent_am, gaussian_peak");
  fitcmd->add_option("--delta", fit.delta, "Interferometer delay (s)");
  fitcmd->add_option("--resolution-sigma", fit.resolution_sigma, "Fixed Gaussian resolution (s)");
  fitcmd->add_option("--fit-range", fit.fit_range, "Fit only |tau| <= range (s)");
  fitcmd->add_option("--out", fit.out, "Report path");

  ClassifyOptions cls;
  auto* classifycmd = app.add_subcommand("classify", "Print the verdict of a g2x fit report");
  classifycmd->add_option("report", cls.report, "Fit report JSON")->required();
  classifycmd->add_option("--threshold", cls.threshold, "Decision threshold in sigmas");
  classifycmd->add_option("--chi2-margin", cls.chi2_margin, "Relative reduced-chi2 margin");

  ReproduceOptions rep;
  auto* reproduce = app.add_subcommand("reproduce", "Run the canned figure configurations");
  reproduce->add_option("figure", rep.figure, "fig2, fig3-top, fig3-bottom or all");
  reproduce->add_option("--seed", rep.seed, "Master seed");
  reproduce->add_option("--out-dir", rep.out_dir, "Output directory");
  add_jobs(reproduce);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << e.what() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "photostat: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (*simulate) {
      sim.jobs = jobs;
      return cmd_simulate(sim, out);
    }
    if (*correlate) {
      cor.jobs = jobs;
      return cmd_correlate(cor, out);
    }
    if (*fitcmd) return cmd_fit(fit, out);
    if (*classifycmd) return cmd_classify(cls, out);
    if (*reproduce) {
      rep.jobs = jobs;
      return cmd_reproduce(rep, out);
    }
  } catch (const Error& e) {
    err << "photostat: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "photostat: io: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "photostat: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace photostat::cli
