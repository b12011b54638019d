#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "error_kind.hpp"
#include "oracles.hpp"
#include "photostat/correlator.hpp"
#include "photostat/error.hpp"
#include "photostat/field.hpp"

namespace photostat {
namespace {

constexpr double kPs = 1e-12;
constexpr double kNs = 1e-9;

TEST(Chaotic, ZeroDelayG2IsTwo) {
  const auto trace = generate_chaotic(50 * kPs, 1e-6, 1 * kPs, 11);
  EXPECT_NEAR(testing::g2_lagged(trace, 0), 2.0, 0.05);
}

TEST(Chaotic, UnitMeanIntensity) {
  const auto trace = generate_chaotic(50 * kPs, 1e-6, 1 * kPs, 12);
  EXPECT_NEAR(trace.mean_intensity(), 1.0, 0.05);
}

TEST(Chaotic, FirstOrderCoherenceAtTauC) {
  const auto trace = generate_chaotic(50 * kPs, 2e-6, 1 * kPs, 13);
  EXPECT_NEAR(testing::g1_lagged(trace, 50), std::exp(-1.0), 0.03);
}

TEST(Chaotic, SiegertRelationHolds) {
  const auto trace = generate_chaotic(50 * kPs, 2e-6, 2.5 * kPs, 14);
  for (std::size_t lag = 0; lag <= 100; lag += 5) {
    const double g1 = testing::g1_lagged(trace, lag);
    const double g2 = testing::g2_lagged(trace, lag);
    EXPECT_LT(std::abs(g2 - 1.0 - g1 * g1), 0.05) << "lag " << lag;
  }
}

TEST(Chaotic, QuadraturesAreGaussian) {
  const auto trace = generate_chaotic(20 * kPs, 4e-6, 1 * kPs, 15);
  std::vector<double> re(trace.size());
  std::vector<double> im(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    re[i] = trace.samples[i].real();
    im[i] = trace.samples[i].imag();
  }
  for (const auto& q : {re, im}) {
    const auto m = testing::moments(q);
    EXPECT_NEAR(m.variance, 0.5, 0.03);
    EXPECT_LT(std::abs(m.skewness), 0.05);
    EXPECT_LT(std::abs(m.excess_kurtosis), 0.1);
  }
}

TEST(Chaotic, RejectsCoarseSamplingAndShortRecords) {
  EXPECT_ERROR_KIND(generate_chaotic(50 * kPs, 1e-6, 3 * kPs, 1), ErrorKind::kValidation);
  EXPECT_ERROR_KIND(generate_chaotic(50 * kPs, 40 * kNs, 1 * kPs, 1), ErrorKind::kValidation);
  EXPECT_ERROR_KIND(generate_chaotic(-1.0, 1e-6, 1 * kPs, 1), ErrorKind::kValidation);
}

TEST(Generators, DeterministicForASeed) {
  const auto a = generate_chaotic(50 * kPs, 100 * kNs, 1 * kPs, 99);
  const auto b = generate_chaotic(50 * kPs, 100 * kNs, 1 * kPs, 99);
  const auto c = generate_chaotic(50 * kPs, 100 * kNs, 1 * kPs, 100);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_NE(a.samples, c.samples);

  const auto p = generate_coherent_am(500 * kPs, 2.76 * kNs, 0.445, 3e-6, 25 * kPs, 5);
  const auto q = generate_coherent_am(500 * kPs, 2.76 * kNs, 0.445, 3e-6, 25 * kPs, 5);
  EXPECT_EQ(p.samples, q.samples);

  const auto m = generate_mixture(0.4, 500 * kPs, 1e-6, 25 * kPs, 6);
  const auto n = generate_mixture(0.4, 500 * kPs, 1e-6, 25 * kPs, 6);
  EXPECT_EQ(m.samples, n.samples);
}

TEST(Generators, FluxIsCarriedSeparately) {
  const auto t = generate_chaotic(50 * kPs, 100 * kNs, 1 * kPs, 1, 3e7);
  EXPECT_DOUBLE_EQ(t.flux, 3e7);
  EXPECT_NEAR(t.mean_intensity(), 1.0, 0.2);
}

class CoherentAm : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    trace_ = new FieldTrace(
        generate_coherent_am(500 * kPs, 2.76 * kNs, 0.445, 20e-6, 25 * kPs, 21));
  }
  static void TearDownTestSuite() { delete trace_; }
  static FieldTrace* trace_;
};
FieldTrace* CoherentAm::trace_ = nullptr;

TEST_F(CoherentAm, ZeroDelayG2) { EXPECT_NEAR(testing::g2_lagged(*trace_, 0), 1.445, 0.03); }

TEST_F(CoherentAm, G2AtHalfAmplitudeTime) {
  const auto lag = static_cast<std::size_t>(std::lround(1.38 * kNs / (25 * kPs)));
  EXPECT_NEAR(testing::g2_lagged(*trace_, lag), 1.0 + 0.445 * std::exp(-1.0), 0.03);
}

TEST_F(CoherentAm, G2FollowsExponentialUpToTwoTauAmp) {
  const double dt = 25 * kPs;
  for (double tau = 0.0; tau <= 2 * 2.76 * kNs; tau += 0.25 * kNs) {
    const auto lag = static_cast<std::size_t>(std::lround(tau / dt));
    const double expected = 1.0 + 0.445 * std::exp(-2.0 * lag * dt / (2.76 * kNs));
    EXPECT_NEAR(testing::g2_lagged(*trace_, lag), expected, 0.03) << "tau " << tau;
  }
}

TEST_F(CoherentAm, UnitMeanIntensityAndPhaseCoherence) {
  EXPECT_NEAR(trace_->mean_intensity(), 1.0, 0.05);
  // |g1| decays on tau_c; amplitude noise lowers it only slightly.
  EXPECT_NEAR(testing::g1_lagged(*trace_, 20), std::exp(-1.0), 0.05);
}

TEST(CoherentAmNoise, ZeroAlphaIsPoissonian) {
  const auto t = generate_coherent_am(500 * kPs, 2.76 * kNs, 0.0, 3e-6, 25 * kPs, 3);
  for (std::size_t lag : {0u, 10u, 100u}) EXPECT_NEAR(testing::g2_lagged(t, lag), 1.0, 0.02);
}

TEST(CoherentAmNoise, ClampedGaussianReportsClampRate) {
  EXPECT_ERROR_KIND(generate_coherent_am(500 * kPs, 2.76 * kNs, 0.445, 3e-6, 25 * kPs, 3, 1.0,
                                   AmplitudeNoise::kClampedGaussian), ErrorKind::kClampRate);
  const auto small = generate_coherent_am(500 * kPs, 2.76 * kNs, 0.02, 6e-6, 25 * kPs, 3, 1.0,
                                          AmplitudeNoise::kClampedGaussian);
  EXPECT_NEAR(testing::g2_lagged(small, 0), 1.02, 0.01);
}

TEST(CoherentAmNoise, RejectsInvalidParameters) {
  EXPECT_ERROR_KIND(generate_coherent_am(3 * kNs, 2.76 * kNs, 0.4, 3e-5, 25 * kPs, 1), ErrorKind::kValidation);
  EXPECT_ERROR_KIND(generate_coherent_am(500 * kPs, 2.76 * kNs, 1.2, 3e-6, 25 * kPs, 1), ErrorKind::kValidation);
  EXPECT_ERROR_KIND(generate_coherent_am(500 * kPs, 2.76 * kNs, -0.1, 3e-6, 25 * kPs, 1), ErrorKind::kValidation);
  EXPECT_ERROR_KIND(generate_coherent_am(500 * kPs, 2.76 * kNs, 0.4, 2e-6, 25 * kPs, 1), ErrorKind::kValidation);
}

TEST(Mixture, PureLimits) {
  const auto coherent = generate_mixture(1.0, 50 * kPs, 1e-6, 1 * kPs, 31);
  for (std::size_t lag : {0u, 25u, 200u}) EXPECT_NEAR(testing::g2_lagged(coherent, lag), 1.0, 0.02);
  const auto chaotic = generate_mixture(0.0, 50 * kPs, 1e-6, 1 * kPs, 32);
  EXPECT_NEAR(testing::g2_lagged(chaotic, 0), 2.0, 0.05);
}

TEST(Mixture, UnitMeanIntensity) {
  const auto t = generate_mixture(0.3, 50 * kPs, 2e-6, 1 * kPs, 33);
  EXPECT_NEAR(t.mean_intensity(), 1.0, 0.05);
}

TEST(Mixture, CrossCorrelationDipIsOneMinusHalfX) {
  const auto t = generate_mixture(0.6, 20 * kPs, 20e-6, 1 * kPs, 34);
  const std::int64_t lags[] = {0};
  const auto v = oracle_six_terms_lags(t, 400, lags);
  EXPECT_NEAR(v[0], 0.70, 0.03);
}

TEST(Mixture, FieldSuperpositionGivesQuadraticDip) {
  // Coherent plus chaotic field with a fixed relative phase: the interference
  // terms leave 1 - x^2/2 rather than 1 - x/2.
  const auto t = generate_mixture(0.6, 20 * kPs, 20e-6, 1 * kPs, 35, 1.0,
                                  MixtureMode::kFieldSuperposition);
  const std::int64_t lags[] = {0};
  const auto v = oracle_six_terms_lags(t, 400, lags);
  EXPECT_NEAR(v[0], 1.0 - 0.36 / 2.0, 0.03);
  EXPECT_NEAR(t.mean_intensity(), 1.0, 0.05);
}

TEST(Mixture, RejectsFractionOutsideUnitInterval) {
  EXPECT_ERROR_KIND(generate_mixture(1.5, 50 * kPs, 1e-6, 1 * kPs, 1), ErrorKind::kValidation);
  EXPECT_ERROR_KIND(generate_mixture(-0.1, 50 * kPs, 1e-6, 1 * kPs, 1), ErrorKind::kValidation);
}

TEST(SourceModel, DispatchMatchesDirectGenerators) {
  auto m = SourceModel::coherent_am(500 * kPs, 2.76 * kNs, 0.3, 8);
  const auto a = generate(m, 3e-6, 25 * kPs);
  const auto b = generate_coherent_am(500 * kPs, 2.76 * kNs, 0.3, 3e-6, 25 * kPs, 8);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_DOUBLE_EQ(m.longest_correlation_time(), 2.76 * kNs);
  EXPECT_DOUBLE_EQ(SourceModel::chaotic(50 * kPs).longest_correlation_time(), 50 * kPs);
}

TEST(FieldTrace, ValidateRejectsEmptyOrBadScale) {
  FieldTrace t;
  EXPECT_THROW(t.validate(), Error);
  t.samples = {{1.0, 0.0}};
  t.dt = 0.0;
  EXPECT_THROW(t.validate(), Error);
  t.dt = 1e-12;
  t.flux = -1.0;
  EXPECT_THROW(t.validate(), Error);
}

}  // namespace
}  // namespace photostat
