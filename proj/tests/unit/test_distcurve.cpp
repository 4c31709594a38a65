#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "geoloc/distcurve.hpp"
#include "geoloc/error.hpp"

using namespace geoloc;

namespace {

struct TrueCurve {
  double p, q, n, m;
  double operator()(double x) const { return p * std::log(q * x + n) + m; }
};

std::vector<TrainingPair> sample(const TrueCurve& c, int count, double lo, double hi) {
  std::vector<TrainingPair> out;
  for (int i = 0; i < count; ++i) {
    const double x = lo + (hi - lo) * i / (count - 1);
    out.push_back({x, c(x), "lm", "t" + std::to_string(i)});
  }
  return out;
}

// Valid random curve whose distances are positive on [lo, hi].
TrueCurve random_curve(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> p(50.0, 2000.0), logq(std::log(0.01), std::log(10.0)), n(0.5, 2.0),
      m(-100.0, 100.0);
  while (true) {
    const TrueCurve c{p(rng), std::exp(logq(rng)), n(rng), m(rng)};
    if (c(lo) > 1.0 && c(hi) > c(lo)) return c;
  }
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no geoloc::Error thrown";
  return ErrorCode::ParseError;
}

}  // namespace

TEST(CorrectedLatency, Examples) {
  auto a = corrected_latency(10.0, 10);
  EXPECT_NEAR(a.ms, 4.34, 1e-12);
  EXPECT_FALSE(a.clamped);

  auto b = corrected_latency(0.22, 0);
  EXPECT_EQ(b.ms, 0.001);
  EXPECT_TRUE(b.clamped);

  EXPECT_NEAR(corrected_latency(20.0, 0).ms, 9.89, 1e-12);
}

TEST(CorrectedLatencyProperty, RoundTripIdentity) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> rtt(0.5, 200.0);
  std::uniform_int_distribution<int> hops(0, 30);
  for (int i = 0; i < 10000; ++i) {
    const double r = rtt(rng);
    const int h = hops(rng);
    const auto c = corrected_latency(r, h);
    if (c.clamped) {
      EXPECT_LE(r / 2 - 0.055 * h - 0.11, 0.0);
      EXPECT_EQ(c.ms, 0.001);
    } else {
      EXPECT_NEAR(c.ms + 0.055 * h + 0.11, r / 2, 1e-12);
    }
  }
}

TEST(FitCurve, RecoversKnownParameters) {
  const TrueCurve truth{800.0, 0.5, 1.0, 0.0};
  const auto data = sample(truth, 20, 1.0, 50.0);
  const auto fit = fit_curve(data, "lm");
  EXPECT_EQ(fit.landmark_id, "lm");
  EXPECT_EQ(fit.n, 1.0);
  EXPECT_NEAR(fit.p / 800.0, 1.0, 1e-3);
  EXPECT_NEAR(fit.q / 0.5, 1.0, 1e-3);
  EXPECT_NEAR(fit.m, 0.0, 0.8);  // 1e-3 of the smallest training distance
  EXPECT_LT(fit.residual, 1e-6);
}

TEST(FitCurve, TooFewPairs) {
  const auto data = sample({800.0, 0.5, 1.0, 0.0}, 3, 1.0, 50.0);
  EXPECT_EQ(code_of([&] { fit_curve(data); }), ErrorCode::InsufficientData);
}

TEST(FitCurve, EqualLatenciesAreDegenerate) {
  std::vector<TrainingPair> data;
  for (int i = 0; i < 6; ++i) data.push_back({5.0, 100.0 + i, "a", "b"});
  EXPECT_EQ(code_of([&] { fit_curve(data); }), ErrorCode::DegenerateData);
}

TEST(FitCurve, RejectsNonPositiveInputs) {
  auto data = sample({800.0, 0.5, 1.0, 0.0}, 6, 1.0, 50.0);
  data[2].distance_km = 0.0;
  EXPECT_EQ(code_of([&] { fit_curve(data); }), ErrorCode::ValidationError);
  data = sample({800.0, 0.5, 1.0, 0.0}, 6, 1.0, 50.0);
  data[3].latency_ms = -1.0;
  EXPECT_EQ(code_of([&] { fit_curve(data); }), ErrorCode::ValidationError);
}

TEST(FitCurve, DecreasingDataDoesNotYieldIncreasingFit) {
  std::vector<TrainingPair> data;
  for (int i = 0; i < 10; ++i) data.push_back({1.0 + i, 1000.0 - 90.0 * i, "a", "b"});
  EXPECT_EQ(code_of([&] { fit_curve(data); }), ErrorCode::FitDiverged);
}

TEST(FitCurve, NoisyDataStaysInsideThreeSigma) {
  const TrueCurve truth{800.0, 0.5, 1.0, 0.0};
  const double sigma = 5.0;
  int outside = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    auto data = sample(truth, 20, 1.0, 50.0);
    for (auto& pt : data) pt.distance_km += noise(rng);
    const auto fit = fit_curve(data);
    EXPECT_GT(fit.residual, 0.0);
    for (const auto& pt : data) {
      ++total;
      if (std::abs(fit.evaluate(pt.latency_ms) - truth(pt.latency_ms)) > 3.0 * sigma) ++outside;
    }
  }
  EXPECT_EQ(outside, 0) << outside << " of " << total;
}

TEST(FitCurveProperty, NoiselessSelfConsistency) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    const auto truth = random_curve(rng, 1.0, 50.0);
    const auto data = sample(truth, 10 + trial % 20, 1.0, 50.0);
    const auto fit = fit_curve(data);
    double total_sq = 0.0;
    for (const auto& pt : data) total_sq += pt.distance_km * pt.distance_km;
    EXPECT_LT(fit.residual, 1e-6 * total_sq) << "p=" << truth.p << " q=" << truth.q << " n=" << truth.n;
    EXPECT_GT(fit.p * fit.q, 0.0);
  }
}

TEST(LatencyToDistance, Examples) {
  LatencyDistanceCurve curve{"lm", 800.0, 0.5, 1.0, 0.0, 0.0};
  EXPECT_NEAR(latency_to_distance(curve, LcFactor(1.0), 2.0).km(), 800.0 * std::log(2.0), 1e-9);
  EXPECT_NEAR(latency_to_distance(curve, LcFactor(1.0), 2.0).km(), 554.52, 0.01);
  EXPECT_NEAR(latency_to_distance(curve, LcFactor(0.7), 2.0).km(), 388.16, 0.01);
  EXPECT_EQ(latency_to_distance(curve, LcFactor(1.0), 0.0).km(), 0.0);
}

TEST(LatencyToDistance, ClampsNegativeAndChecksDomain) {
  LatencyDistanceCurve curve{"lm", 100.0, 1.0, 1.0, -50.0, 0.0};
  EXPECT_EQ(latency_to_distance(curve, LcFactor(), 0.1).km(), 0.0);
  LatencyDistanceCurve shifted{"lm", 100.0, 1.0, -2.0, 0.0, 0.0};
  EXPECT_EQ(code_of([&] { latency_to_distance(shifted, LcFactor(), 1.0); }), ErrorCode::DomainError);
  EXPECT_NEAR(shifted.evaluate(3.0), 0.0, 1e-12);
}

TEST(LatencyToDistanceProperty, MonotoneAndLinearInLc) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> lc(0.05, 1.5), x(0.0, 100.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto t = random_curve(rng, 1.0, 50.0);
    const LatencyDistanceCurve curve{"lm", t.p, t.q, t.n, t.m, 0.0};
    const double f = lc(rng);
    double previous = -1.0;
    for (double l = 0.0; l <= 100.0; l += 0.5) {
      const double d = latency_to_distance(curve, LcFactor(1.0), l).km();
      EXPECT_GE(d, previous);
      previous = d;
    }
    const double at = x(rng);
    EXPECT_NEAR(latency_to_distance(curve, LcFactor(f), at).km(),
                f * latency_to_distance(curve, LcFactor(1.0), at).km(), 1e-9);
  }
}

TEST(LcFactor, Range) {
  EXPECT_EQ(LcFactor().value(), 1.0);
  EXPECT_EQ(LcFactor(1.5).value(), 1.5);
  EXPECT_THROW(LcFactor(0.0), Error);
  EXPECT_THROW(LcFactor(1.5000001), Error);
  EXPECT_THROW(LcFactor(-0.3), Error);
}

TEST(FitUniformLc, LeastSquaresRatio) {
  const std::vector<double> predicted{100.0, 200.0, 300.0};
  const std::vector<double> reference{70.0, 140.0, 210.0};
  EXPECT_NEAR(fit_uniform_lc(predicted, reference).value(), 0.7, 1e-12);
  // sum(p*r) / sum(p*p) for inconsistent data.
  const std::vector<double> r2{80.0, 140.0, 200.0};
  EXPECT_NEAR(fit_uniform_lc(predicted, r2).value(), (8000.0 + 28000.0 + 60000.0) / 140000.0, 1e-12);
  const std::vector<double> big{1000.0, 2000.0, 3000.0};
  EXPECT_EQ(fit_uniform_lc(predicted, big).value(), 1.5);
  EXPECT_EQ(fit_uniform_lc(std::vector<double>{}, std::vector<double>{}).value(), 1.0);
}
