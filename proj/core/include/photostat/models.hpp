#pragma once

namespace photostat {

/// Instrument response applied to every model before it is compared with a
/// histogram: a Gaussian timing resolution followed by averaging over the
/// histogram bin.
struct Response {
  double bin_width = 0.0;         // 0: point evaluation
  double resolution_sigma = 0.0;  // 0: ideal timing
};

/// exp(-|tau| / decay) convolved with the response, evaluated for the bin
/// centered on `tau`.
double cusp_response(double tau, double decay, const Response& response);

/// exp(-tau^2 / (2 width^2)) convolved with the response.
double gaussian_response(double tau, double width, const Response& response);

/// erfc(z) * exp(z^2), finite for large positive z.
double erfcx(double z);

// Second-order autocorrelation models g2(tau).

/// Chaotic light: Siegert relation with |g1|^2 = exp(-2|tau|/tau_c), blurred
/// by a free Gaussian resolution.
struct ChaoticSiegertG2 {
  double tau_c = 0.0;
  double resolution_sigma = 0.0;
  double operator()(double tau, double bin_width) const;
};

/// Coherent light with amplitude noise: 1 + alpha exp(-2|tau|/tau_amp).
struct CoherentAmG2 {
  double alpha = 0.0;
  double tau_amp = 0.0;
  double operator()(double tau, const Response& response) const;
};

/// Resolution-limited peak: 1 + amplitude * exp(-tau^2 / (2 width^2)).
struct GaussianPeakG2 {
  double amplitude = 0.0;
  double width = 0.0;
  double operator()(double tau, const Response& response) const;
};

// Interferometric cross-correlation models g2x(tau, delta) near tau = 0.

/// Coherent field with amplitude fluctuations: a dip to (1 + alpha)/2 on a
/// broad peak, 1 - exp(-2|tau|/tau_c)/2 + (alpha/2) exp(-2|tau|/tau_amp).
struct CoherentAmG2x {
  double alpha = 0.0;
  double tau_amp = 0.0;
  double tau_c = 0.0;
  double operator()(double tau, const Response& response) const;
};

/// Statistical mixture with coherent fraction x: 1 - (x/2) exp(-2|tau|/tau_c)
/// on a flat background.
struct MixtureG2x {
  double x = 0.0;
  double tau_c = 0.0;
  double operator()(double tau, const Response& response) const;
};

/// Replicas of the autocorrelation at tau = +-delta:
/// 1 + amplitude * [exp(-|tau - delta|/decay) + exp(-|tau + delta|/decay)].
struct ReplicaG2x {
  double amplitude = 0.0;
  double decay = 0.0;
  double delta = 0.0;
  double operator()(double tau, const Response& response) const;
};

}  // namespace photostat
