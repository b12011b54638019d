#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "photostat/correlator.hpp"
#include "photostat/error.hpp"
#include "photostat/interferometer.hpp"

namespace photostat {

std::vector<double> oracle_six_terms_lags(const FieldTrace& trace, std::size_t delta_samples,
                                          std::span<const std::int64_t> lags) {
  trace.validate();
  const auto n = static_cast<std::int64_t>(trace.size());
  const auto d = static_cast<std::int64_t>(delta_samples);
  std::int64_t max_lag = 0;
  for (const auto lag : lags) max_lag = std::max(max_lag, std::abs(lag));
  if (n < 100 * (d + max_lag)) {
    std::ostringstream os;
    os << "oracle needs at least 100 * (delta + max|tau|) = " << 100 * (d + max_lag)
       << " samples, trace has " << n;
    fail(ErrorKind::kTraceTooShort, os.str());
  }

  const auto& a = trace.samples;
  std::vector<double> intensity(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) intensity[i] = std::norm(a[i]);

  std::vector<double> out;
  out.reserve(lags.size());
  for (const auto lag : lags) {
    // Indices t, t+d, t+lag, t+lag+d must all be inside the trace.
    const std::int64_t begin = std::max<std::int64_t>(0, -lag);
    const std::int64_t end = n - d - std::max<std::int64_t>(0, lag);
    double same = 0.0;       // I(t) I(t+lag) + I(t+d) I(t+d+lag)
    double forward = 0.0;    // I(t) I(t+lag+d)
    double backward = 0.0;   // I(t+d) I(t+lag)
    double interference = 0.0;
    double port_a = 0.0;
    double port_b = 0.0;
    for (std::int64_t t = begin; t < end; ++t) {
      const auto i0 = static_cast<std::size_t>(t);
      const auto i1 = static_cast<std::size_t>(t + d);
      const auto i2 = static_cast<std::size_t>(t + lag);
      const auto i3 = static_cast<std::size_t>(t + lag + d);
      same += intensity[i0] * intensity[i2] + intensity[i1] * intensity[i3];
      forward += intensity[i0] * intensity[i3];
      backward += intensity[i1] * intensity[i2];
      interference += (std::conj(a[i1]) * std::conj(a[i2]) * a[i3] * a[i0]).real();
      port_a += intensity[i0] + intensity[i1];
      port_b += intensity[i2] + intensity[i3];
    }
    const auto count = static_cast<double>(end - begin);
    const double mean_a = port_a / (2.0 * count);
    const double mean_b = port_b / (2.0 * count);
    const double numerator = (same + forward + backward - 2.0 * interference) / (4.0 * count);
    out.push_back(numerator / (mean_a * mean_b));
  }
  return out;
}

std::vector<double> oracle_six_terms(const FieldTrace& trace, double delta,
                                     std::span<const double> tau_grid) {
  trace.validate();
  const std::size_t d = delay_samples(delta, trace.dt);
  std::vector<std::int64_t> lags;
  lags.reserve(tau_grid.size());
  for (const double tau : tau_grid) {
    const double steps = tau / trace.dt;
    const double rounded = std::round(steps);
    if (std::abs(steps - rounded) > 1e-6 * std::max(1.0, std::abs(rounded))) {
      std::ostringstream os;
      os << "tau=" << tau << " s is not on the sample grid (dt=" << trace.dt << " s)";
      fail(ErrorKind::kDeltaOffGrid, os.str());
    }
    lags.push_back(static_cast<std::int64_t>(rounded));
  }
  return oracle_six_terms_lags(trace, d, lags);
}

}  // namespace photostat
