#include "photostat/models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace photostat {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// exp(A) * erfc(z) with A = z^2 - tau^2 / (2 sigma^2), the overflow-prone
// product in the exponential-Gaussian convolution.
double scaled_erfc(double tau, double decay, double sigma) {
  const double z = (sigma / decay - tau / sigma) * kInvSqrt2;
  if (z > 0.0) return std::exp(-tau * tau / (2.0 * sigma * sigma)) * erfcx(z);
  const double a = sigma * sigma / (2.0 * decay * decay) - tau / decay;
  return std::exp(a) * std::erfc(z);
}

// exp(-|tau|/decay) convolved with a unit-area Gaussian of width sigma.
double smoothed_cusp(double tau, double decay, double sigma) {
  if (sigma <= 0.0) return std::exp(-std::abs(tau) / decay);
  return 0.5 * (scaled_erfc(tau, decay, sigma) + scaled_erfc(-tau, decay, sigma));
}

// Integral of exp(-|s|/decay) over [lo, hi].
double cusp_integral(double lo, double hi, double decay) {
  if (lo >= 0.0) return decay * (std::exp(-lo / decay) - std::exp(-hi / decay));
  if (hi <= 0.0) return decay * (std::exp(hi / decay) - std::exp(lo / decay));
  return -decay * (std::expm1(lo / decay) + std::expm1(-hi / decay));
}

constexpr std::array<double, 4> kGaussNodes = {-0.86113631159405257522, -0.33998104358485626480,
                                               0.33998104358485626480, 0.86113631159405257522};
constexpr std::array<double, 4> kGaussWeights = {0.34785484513745385737, 0.65214515486254614263,
                                                 0.65214515486254614263, 0.34785484513745385737};

template <typename F>
double panel_integral(F&& f, double lo, double hi, int panels) {
  const double h = (hi - lo) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = lo + (p + 0.5) * h;
    for (std::size_t k = 0; k < kGaussNodes.size(); ++k) {
      sum += kGaussWeights[k] * f(mid + 0.5 * h * kGaussNodes[k]);
    }
  }
  return 0.5 * h * sum;
}

}  // namespace

double erfcx(double z) {
  if (z < 25.0) return std::exp(z * z) * std::erfc(z);
  // Asymptotic series sum_n (-1)^n (2n-1)!! / (2 z^2)^n; eight terms leave
  // a truncation error below 1e-18 for z >= 25.
  const double step = 0.5 / (z * z);
  double term = 1.0;
  double sum = 1.0;
  for (int n = 1; n <= 8; ++n) {
    term *= -(2.0 * n - 1.0) * step;
    sum += term;
  }
  return sum / (z * std::sqrt(std::numbers::pi));
}

double cusp_response(double tau, double decay, const Response& response) {
  const double b = response.bin_width;
  const double sigma = response.resolution_sigma;
  if (b <= 0.0) return smoothed_cusp(tau, decay, sigma);
  const double lo = tau - 0.5 * b;
  const double hi = tau + 0.5 * b;
  if (sigma <= 1e-3 * b) return cusp_integral(lo, hi, decay) / b;

  const auto f = [&](double s) { return smoothed_cusp(s, decay, sigma); };
  const int panels = std::clamp(static_cast<int>(std::ceil(2.0 * b / std::min(sigma, decay))), 2, 256);
  if (lo < 0.0 && hi > 0.0) {
    const int left = std::max(1, static_cast<int>(std::lround(panels * (-lo) / b)));
    const int right = std::max(1, static_cast<int>(std::lround(panels * hi / b)));
    return (panel_integral(f, lo, 0.0, left) + panel_integral(f, 0.0, hi, right)) / b;
  }
  return panel_integral(f, lo, hi, panels) / b;
}

double gaussian_response(double tau, double width, const Response& response) {
  const double s2 = width * width + response.resolution_sigma * response.resolution_sigma;
  const double s = std::sqrt(s2);
  const double gain = width / s;
  const double b = response.bin_width;
  if (b <= 0.0) return gain * std::exp(-tau * tau / (2.0 * s2));
  const double scale = s * std::numbers::sqrt2;
  const double area = std::erf((tau + 0.5 * b) / scale) - std::erf((tau - 0.5 * b) / scale);
  return gain * s * std::sqrt(std::numbers::pi / 2.0) * area / b;
}

double ChaoticSiegertG2::operator()(double tau, double bin_width) const {
  return 1.0 + cusp_response(tau, 0.5 * tau_c, {bin_width, resolution_sigma});
}

double CoherentAmG2::operator()(double tau, const Response& response) const {
  return 1.0 + alpha * cusp_response(tau, 0.5 * tau_amp, response);
}

double GaussianPeakG2::operator()(double tau, const Response& response) const {
  return 1.0 + amplitude * gaussian_response(tau, width, response);
}

double CoherentAmG2x::operator()(double tau, const Response& response) const {
  return 1.0 - 0.5 * cusp_response(tau, 0.5 * tau_c, response) +
         0.5 * alpha * cusp_response(tau, 0.5 * tau_amp, response);
}

double MixtureG2x::operator()(double tau, const Response& response) const {
  return 1.0 - 0.5 * x * cusp_response(tau, 0.5 * tau_c, response);
}

double ReplicaG2x::operator()(double tau, const Response& response) const {
  return 1.0 + amplitude * (cusp_response(tau - delta, decay, response) +
                            cusp_response(tau + delta, decay, response));
}

}  // namespace photostat
