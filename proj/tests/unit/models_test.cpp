#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "photostat/least_squares.hpp"
#include "photostat/models.hpp"

namespace photostat {
namespace {

// Midpoint-rule double integral of exp(-|s - u|/decay) * N(u; 0, sigma)
// averaged over s in the bin. Slow, obvious, independent of the library.
double brute_cusp(double tau, double decay, double bin, double sigma) {
  const int ns = bin > 0.0 ? 400 : 1;
  const int nu = sigma > 0.0 ? 2000 : 1;
  double total = 0.0;
  for (int i = 0; i < ns; ++i) {
    const double s = bin > 0.0 ? tau - 0.5 * bin + (i + 0.5) * bin / ns : tau;
    double inner = 0.0;
    if (sigma > 0.0) {
      const double lo = -8.0 * sigma;
      const double h = 16.0 * sigma / nu;
      for (int j = 0; j < nu; ++j) {
        const double u = lo + (j + 0.5) * h;
        const double w = std::exp(-u * u / (2 * sigma * sigma)) / (sigma * std::sqrt(2 * std::numbers::pi));
        inner += w * std::exp(-std::abs(s - u) / decay) * h;
      }
    } else {
      inner = std::exp(-std::abs(s) / decay);
    }
    total += inner;
  }
  return total / ns;
}

TEST(Erfcx, KnownValues) {
  EXPECT_NEAR(erfcx(0.0), 1.0, 1e-15);
  EXPECT_NEAR(erfcx(1.0), 0.42758357615580700442, 1e-14);
  EXPECT_NEAR(erfcx(-1.0), 5.00898008076228346630, 1e-13);
  EXPECT_NEAR(erfcx(10.0), 0.05614099274382258586, 1e-15);
  EXPECT_NEAR(erfcx(100.0), 0.00564161378298943, 1e-16);
}

TEST(Erfcx, ContinuousAcrossAsymptoticSwitch) {
  const double below = erfcx(std::nextafter(25.0, 0.0));
  const double above = erfcx(25.0);
  EXPECT_NEAR(below, above, 1e-12 * above);
  EXPECT_TRUE(std::isfinite(erfcx(1e6)));
}

TEST(CuspResponse, MatchesNumericalConvolution) {
  struct Case { double tau, decay, bin, sigma; };
  const Case cases[] = {
      {0.0, 25e-12, 164e-12, 127e-12}, {300e-12, 25e-12, 164e-12, 127e-12},
      {0.0, 250e-12, 50e-12, 90e-12},  {-1e-9, 1.38e-9, 50e-12, 90e-12},
      {0.0, 25e-12, 10e-12, 0.0},      {12e-12, 25e-12, 10e-12, 0.0},
      {0.0, 50e-12, 0.0, 100e-12},     {400e-12, 50e-12, 0.0, 100e-12},
  };
  for (const auto& c : cases) {
    const double got = cusp_response(c.tau, c.decay, {c.bin, c.sigma});
    const double want = brute_cusp(c.tau, c.decay, c.bin, c.sigma);
    EXPECT_NEAR(got, want, 2e-4 * std::max(want, 1e-3))
        << "tau=" << c.tau << " decay=" << c.decay << " bin=" << c.bin << " sigma=" << c.sigma;
  }
}

TEST(CuspResponse, ReducesToBareCuspWithoutResponse) {
  for (double tau : {0.0, 1e-12, 1e-10, -3e-10}) {
    EXPECT_DOUBLE_EQ(cusp_response(tau, 1e-10, {}), std::exp(-std::abs(tau) / 1e-10));
  }
}

TEST(CuspResponse, FarTailsAreStable) {
  const double v = cusp_response(50e-9, 25e-12, {164e-12, 127e-12});
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_GE(v, 0.0);
  EXPECT_LT(v, 1e-12);
}

TEST(GaussianResponse, AddsWidthsInQuadrature) {
  const double w = 100e-12;
  const double s = 50e-12;
  const double total = std::hypot(w, s);
  EXPECT_NEAR(gaussian_response(0.0, w, {0.0, s}), w / total, 1e-12);
  EXPECT_NEAR(gaussian_response(80e-12, w, {0.0, s}),
              w / total * std::exp(-80e-12 * 80e-12 / (2 * total * total)), 1e-12);
  // A narrow bin approaches point evaluation.
  EXPECT_NEAR(gaussian_response(30e-12, w, {1e-15, s}), gaussian_response(30e-12, w, {0.0, s}),
              1e-9);
}

TEST(Models, DipAndPeakValues) {
  EXPECT_DOUBLE_EQ((ChaoticSiegertG2{50e-12, 0.0}(0.0, 0.0)), 2.0);
  EXPECT_NEAR((ChaoticSiegertG2{50e-12, 0.0}(25e-12, 0.0)), 1.0 + std::exp(-1.0), 1e-15);
  EXPECT_DOUBLE_EQ((CoherentAmG2{0.445, 2.76e-9}(0.0, {})), 1.445);
  EXPECT_DOUBLE_EQ((CoherentAmG2x{0.445, 2.76e-9, 500e-12}(0.0, {})), 0.7225);
  EXPECT_DOUBLE_EQ((MixtureG2x{0.6, 500e-12}(0.0, {})), 0.7);
  EXPECT_DOUBLE_EQ((GaussianPeakG2{0.3, 1e-10}(0.0, {})), 1.3);
  const ReplicaG2x replica{0.25, 25e-12, 550e-12};
  EXPECT_NEAR(replica(550e-12, {}), 1.25 + 0.25 * std::exp(-1100.0 / 25.0), 1e-15);
  EXPECT_NEAR(replica(0.0, {}), 1.0, 1e-9);
}

TEST(Models, CoherentDipIsTheMinimum) {
  const CoherentAmG2x m{0.445, 2.76e-9, 500e-12};
  const Response r{50e-12, 0.0};
  const double center = m(0.0, r);
  for (int k = 1; k < 200; ++k) EXPECT_GT(m(k * 50e-12, r), center);
  // Beyond the dip the shoulder exceeds one, the amplitude-noise bump.
  EXPECT_GT(m(2e-9, r), 1.0);
}

TEST(Models, MixtureRecoversFlatBackground) {
  const MixtureG2x m{0.5, 500e-12};
  EXPECT_NEAR(m(10e-9, {}), 1.0, 1e-12);
  EXPECT_LT(m(0.0, {50e-12, 90e-12}), 1.0);
  EXPECT_GT(m(0.0, {50e-12, 90e-12}), 0.75);
}

TEST(LevenbergMarquardt, RecoversExactParameters) {
  const std::vector<double> xs = [] {
    std::vector<double> v;
    for (int i = 0; i < 50; ++i) v.push_back(0.1 * i);
    return v;
  }();
  const auto model = [](double a, double k, double x) { return a * std::exp(-k * x); };
  const auto fn = [&](std::span<const double> p, std::span<double> r) {
    for (std::size_t i = 0; i < xs.size(); ++i) r[i] = model(2.5, 1.3, xs[i]) - model(p[0], p[1], xs[i]);
  };
  const std::vector<ParameterBounds> bounds(2, ParameterBounds{0.0, 10.0});
  const auto fit = levenberg_marquardt(fn, xs.size(), {1.0, 0.5}, bounds);
  ASSERT_TRUE(fit.converged);
  EXPECT_NEAR(fit.params[0], 2.5, 1e-7);
  EXPECT_NEAR(fit.params[1], 1.3, 1e-7);
  EXPECT_LT(fit.chi2, 1e-12);
}

TEST(LevenbergMarquardt, StraightLineCovarianceMatchesNormalEquations) {
  std::mt19937_64 engine(3);
  std::normal_distribution<double> noise(0.0, 0.1);
  std::vector<double> xs;
  std::vector<double> ys;
  for (int i = 0; i < 40; ++i) {
    xs.push_back(i * 0.25);
    ys.push_back(1.0 + 0.5 * xs.back() + noise(engine));
  }
  const double s = 0.1;
  const auto fn = [&](std::span<const double> p, std::span<double> r) {
    for (std::size_t i = 0; i < xs.size(); ++i) r[i] = (ys[i] - p[0] - p[1] * xs[i]) / s;
  };
  const std::vector<ParameterBounds> bounds(2);
  const auto fit = levenberg_marquardt(fn, xs.size(), {0.1, 0.1}, bounds);
  ASSERT_TRUE(fit.converged);

  double s0 = 0, s1 = 0, s2 = 0, sy = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    s0 += 1 / (s * s);
    s1 += xs[i] / (s * s);
    s2 += xs[i] * xs[i] / (s * s);
    sy += ys[i] / (s * s);
    sxy += xs[i] * ys[i] / (s * s);
  }
  const double det = s0 * s2 - s1 * s1;
  EXPECT_NEAR(fit.params[0], (s2 * sy - s1 * sxy) / det, 1e-8);
  EXPECT_NEAR(fit.params[1], (s0 * sxy - s1 * sy) / det, 1e-8);
  EXPECT_NEAR(fit.sigmas[0], std::sqrt(s2 / det), 1e-6 * std::sqrt(s2 / det));
  EXPECT_NEAR(fit.sigmas[1], std::sqrt(s0 / det), 1e-6 * std::sqrt(s0 / det));
  EXPECT_NEAR(fit.covariance[1], -s1 / det, 1e-6 * std::abs(s1 / det));
}

TEST(LevenbergMarquardt, StaysInsideBounds) {
  // Unconstrained optimum at p = -1; the box pins it to 0.
  const auto fn = [](std::span<const double> p, std::span<double> r) {
    r[0] = p[0] + 1.0;
    r[1] = 0.5 * (p[0] + 1.0);
  };
  const std::vector<ParameterBounds> bounds{{0.0, 5.0}};
  const auto fit = levenberg_marquardt(fn, 2, {3.0}, bounds);
  EXPECT_GE(fit.params[0], 0.0);
  EXPECT_NEAR(fit.params[0], 0.0, 1e-8);
}

}  // namespace
}  // namespace photostat
