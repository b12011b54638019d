#include "photostat/serialization.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "photostat/binary_io.hpp"
#include "photostat/error.hpp"

namespace photostat {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

/// JSON has no infinities; non-finite numbers are written as null.
ordered_json number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(); }

double read_number(const ordered_json& j, const char* key) {
  if (!j.contains(key)) fail(ErrorKind::kFormat, std::string("missing field ") + key);
  const auto& v = j.at(key);
  if (v.is_null()) return std::numeric_limits<double>::infinity();
  if (!v.is_number()) fail(ErrorKind::kFormat, std::string("field ") + key + " is not a number");
  return v.get<double>();
}

CorrelationMode parse_mode(const std::string& s) {
  if (s == to_string(CorrelationMode::kAuto)) return CorrelationMode::kAuto;
  if (s == to_string(CorrelationMode::kCross)) return CorrelationMode::kCross;
  fail(ErrorKind::kFormat, "unknown correlation mode " + s);
}

ordered_json params_object(const std::vector<FitParameter>& params, bool sigmas) {
  ordered_json out = ordered_json::object();
  for (const auto& p : params) out[p.name] = number(sigmas ? p.sigma : p.value);
  return out;
}

std::vector<FitParameter> params_from(const ordered_json& values, const ordered_json& sigmas) {
  std::vector<FitParameter> out;
  for (const auto& [name, value] : values.items()) {
    FitParameter p;
    p.name = name;
    p.value = value.is_null() ? std::numeric_limits<double>::infinity() : value.get<double>();
    p.sigma = read_number(sigmas, name.c_str());
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

std::string histogram_csv(const CorrelationHistogram& h) {
  std::ostringstream os;
  os << std::setprecision(17) << "tau_s,g2,sigma,counts\n";
  for (std::size_t k = 0; k < h.size(); ++k) {
    os << h.tau(k) << ',' << h.g2()[k] << ',';
    if (h.counts()[k] > 0) {
      os << h.sigma()[k];
    } else {
      os << "nan";
    }
    os << ',' << h.counts()[k] << '\n';
  }
  return os.str();
}

std::string histogram_sidecar_json(const CorrelationHistogram& h, const HistogramMeta& meta) {
  ordered_json j;
  j["bin_width"] = h.bin_width();
  j["window"] = h.window();
  j["half_bins"] = h.half_bins();
  j["rates"] = {{"rate_a", h.rate_a()}, {"rate_b", h.rate_b()}};
  j["total_time"] = h.total_time();
  j["mode"] = std::string(to_string(h.mode()));
  j["config_hash"] = meta.config_hash;
  j["delta"] = meta.delta ? ordered_json(*meta.delta) : ordered_json();
  return j.dump(2) + "\n";
}

void write_histogram(const fs::path& stem, const CorrelationHistogram& h,
                     const HistogramMeta& meta) {
  fs::path csv = stem;
  csv += ".csv";
  fs::path json = stem;
  json += ".json";
  write_file_atomic(csv, histogram_csv(h));
  write_file_atomic(json, histogram_sidecar_json(h, meta));
}

LoadedHistogram read_histogram(const fs::path& path) {
  fs::path csv = path;
  fs::path json = path;
  csv.replace_extension(".csv");
  json.replace_extension(".json");

  ordered_json meta_json;
  try {
    meta_json = ordered_json::parse(read_text_file(json));
  } catch (const ordered_json::exception& e) {
    fail(ErrorKind::kFormat, json.string() + ": " + e.what());
  }

  std::vector<std::uint64_t> counts;
  {
    std::istringstream in(read_text_file(csv));
    std::string line;
    if (!std::getline(in, line) || line.rfind("tau_s,g2,sigma,counts", 0) != 0) {
      fail(ErrorKind::kFormat, csv.string() + ": missing histogram header");
    }
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto comma = line.rfind(',');
      if (comma == std::string::npos) fail(ErrorKind::kFormat, csv.string() + ": bad row");
      try {
        counts.push_back(std::stoull(line.substr(comma + 1)));
      } catch (const std::exception&) {
        fail(ErrorKind::kFormat, csv.string() + ": bad count in row '" + line + "'");
      }
    }
  }

  LoadedHistogram out;
  try {
    const double bin_width = read_number(meta_json, "bin_width");
    const auto half_bins = meta_json.at("half_bins").get<std::size_t>();
    if (counts.size() != 2 * half_bins + 1) {
      fail(ErrorKind::kFormat, csv.string() + ": row count does not match sidecar half_bins");
    }
    const auto& rates = meta_json.at("rates");
    out.histogram = CorrelationHistogram(
        bin_width, half_bins, parse_mode(meta_json.at("mode").get<std::string>()),
        std::move(counts), read_number(meta_json, "total_time"), read_number(rates, "rate_a"),
        read_number(rates, "rate_b"));
    out.meta.config_hash = meta_json.value("config_hash", std::string());
    if (meta_json.contains("delta") && !meta_json.at("delta").is_null()) {
      out.meta.delta = meta_json.at("delta").get<double>();
    }
  } catch (const ordered_json::exception& e) {
    fail(ErrorKind::kFormat, json.string() + ": " + e.what());
  }
  return out;
}

std::string fit_report_json(const FitReport& r, const std::string& config_hash) {
  ordered_json j;
  j["model"] = r.model;
  j["params"] = params_object(r.params, false);
  j["sigmas"] = params_object(r.params, true);
  j["chi2_reduced"] = number(r.chi2_reduced);
  j["verdict"] = r.verdict ? ordered_json(std::string(to_string(*r.verdict))) : ordered_json();
  if (r.evidence) {
    const auto& e = *r.evidence;
    j["evidence"] = {{"dip_depth", number(e.dip_depth)},
                     {"dip_depth_sigma", number(e.dip_depth_sigma)},
                     {"background_excess", number(e.background_excess)},
                     {"background_excess_sigma", number(e.background_excess_sigma)},
                     {"tau_c_eff", number(e.tau_c_eff)}};
    const auto x = mixture_fraction(e);
    j["mixture_fraction"] = {{"x", number(x.value)}, {"sigma", number(x.sigma)}};
  } else {
    j["evidence"] = nullptr;
  }
  j["delta"] = r.delta ? ordered_json(*r.delta) : ordered_json();
  j["resolution_sigma"] = r.resolution_sigma;
  ordered_json candidates = ordered_json::array();
  for (const auto& c : r.candidates) {
    candidates.push_back({{"model", c.model},
                          {"params", params_object(c.params, false)},
                          {"sigmas", params_object(c.params, true)},
                          {"chi2", number(c.chi2)},
                          {"dof", c.dof},
                          {"chi2_reduced", number(c.chi2_reduced)}});
  }
  j["candidates"] = std::move(candidates);
  j["residuals"] = {{"tau_s", r.residual_tau}, {"value", r.residuals}};
  j["config_hash"] = config_hash;
  return j.dump(2) + "\n";
}

FitReport parse_fit_report(const std::string& text) {
  FitReport r;
  try {
    const auto j = ordered_json::parse(text);
    r.model = j.at("model").get<std::string>();
    r.params = params_from(j.at("params"), j.at("sigmas"));
    r.chi2_reduced = read_number(j, "chi2_reduced");
    if (j.contains("verdict") && !j.at("verdict").is_null()) {
      const auto v = parse_verdict(j.at("verdict").get<std::string>());
      if (!v) fail(ErrorKind::kFormat, "unknown verdict in fit report");
      r.verdict = *v;
    }
    if (j.contains("evidence") && !j.at("evidence").is_null()) {
      const auto& e = j.at("evidence");
      r.evidence = Evidence{read_number(e, "dip_depth"), read_number(e, "dip_depth_sigma"),
                            read_number(e, "background_excess"),
                            read_number(e, "background_excess_sigma"),
                            read_number(e, "tau_c_eff")};
    }
    if (j.contains("delta") && !j.at("delta").is_null()) r.delta = j.at("delta").get<double>();
    r.resolution_sigma = j.value("resolution_sigma", 0.0);
    if (j.contains("candidates")) {
      for (const auto& c : j.at("candidates")) {
        ModelFit fit;
        fit.model = c.at("model").get<std::string>();
        fit.params = params_from(c.at("params"), c.at("sigmas"));
        fit.chi2 = read_number(c, "chi2");
        fit.dof = c.at("dof").get<std::size_t>();
        fit.chi2_reduced = read_number(c, "chi2_reduced");
        r.candidates.push_back(std::move(fit));
      }
    }
    if (j.contains("residuals")) {
      r.residual_tau = j.at("residuals").at("tau_s").get<std::vector<double>>();
      r.residuals = j.at("residuals").at("value").get<std::vector<double>>();
    }
  } catch (const ordered_json::exception& e) {
    fail(ErrorKind::kFormat, std::string("fit report: ") + e.what());
  }
  return r;
}

}  // namespace photostat
