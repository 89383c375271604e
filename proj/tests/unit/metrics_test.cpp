// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "tsgan/errors.hpp"
#include "tsgan/metrics.hpp"
#include "tsgan/random.hpp"

namespace tsgan {
namespace {

Histogram from_probabilities(std::vector<double> probs) {
  Histogram h;
  for (std::size_t i = 0; i <= probs.size(); ++i) h.edges.push_back(static_cast<double>(i));
  h.counts.assign(probs.size(), 0);
  h.probabilities = std::move(probs);
  return h;
}

TEST(HistogramTest, PointMass) {
  const std::vector<double> v(100, 0.35);
  const auto h = histogram_estimate(v, 10, 0.0, 1.0);
  EXPECT_EQ(h.counts[3], 100u);
  EXPECT_NEAR(h.probabilities[3], 1.0, 1e-10);
  for (std::size_t i = 0; i < 10; ++i) {
    if (i != 3) EXPECT_LT(h.probabilities[i], 1e-11);
    EXPECT_GT(h.probabilities[i], 0.0);
  }
  double sum = 0.0;
  for (double p : h.probabilities) sum += p;
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(HistogramTest, UpperEdgeAndDegenerateRange) {
  const std::vector<double> v{0.0, 1.0, 1.0};
  const auto h = histogram_estimate(v, 4, 0.0, 1.0);
  EXPECT_EQ(h.counts[0], 1u);
  EXPECT_EQ(h.counts[3], 2u);
  const std::vector<double> ones{1.0, 1.0};
  EXPECT_EQ(histogram_estimate(ones, 4, 1.0, 1.0).counts[0], 2u);
  EXPECT_THROW(histogram_estimate(v, 4, 0.0, 0.5), ContractError);
  EXPECT_THROW(histogram_estimate({}, 4, 0.0, 1.0), SizeError);
  EXPECT_THROW(histogram_estimate(v, 1, 0.0, 1.0), ContractError);
}

TEST(HistogramTest, UniformSampleWithinBinomialBounds) {
  Rng rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(1000000);
  for (double& x : v) x = u(rng);
  const auto h = histogram_estimate(v, 50, 0.0, 1.0);
  for (double p : h.probabilities) EXPECT_NEAR(p, 0.02, 0.005);
}

TEST(HistogramTest, PermutationInvariant) {
  Rng rng(8);
  std::vector<double> v = normal_tensor({500}, rng).to_vector();
  const auto a = histogram_estimate(v, 50, -5, 5);
  std::shuffle(v.begin(), v.end(), rng);
  const auto b = histogram_estimate(v, 50, -5, 5);
  EXPECT_EQ(a.counts, b.counts);
  EXPECT_EQ(a.probabilities, b.probabilities);
}

TEST(KldTest, HandComputedValues) {
  const auto p = from_probabilities({0.5, 0.5});
  const auto q = from_probabilities({0.25, 0.75});
  EXPECT_EQ(kld(p, p), 0.0);
  const double pq = 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0);
  const double qp = 0.25 * std::log(0.5) + 0.75 * std::log(1.5);
  EXPECT_NEAR(kld(p, q), pq, 1e-15);
  EXPECT_NEAR(kld(p, q), 0.1438, 5e-5);
  EXPECT_NEAR(kld(q, p), qp, 1e-15);
  EXPECT_NEAR(kld(q, p), 0.1308, 5e-5);
}

TEST(KldTest, MismatchedEdges) {
  auto p = from_probabilities({0.5, 0.5});
  auto q = from_probabilities({0.5, 0.5});
  q.edges[1] = 1.5;
  EXPECT_THROW(kld(p, q), ContractError);
}

TEST(KldTest, GibbsInequalityOnRandomPairs) {
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = normal_tensor({300}, rng, 0.0, 1.0).to_vector();
    const auto b = normal_tensor({300}, rng, 0.5, 1.5).to_vector();
    const auto p = histogram_estimate(a, 20, -20, 20);
    const auto q = histogram_estimate(b, 20, -20, 20);
    EXPECT_GE(kld(p, q), 0.0);
    EXPECT_EQ(kld(p, p), 0.0);
  }
}

TEST(JsdTest, IdenticalAndDisjoint) {
  Rng rng(10);
  const auto a = normal_tensor({1000}, rng).to_vector();
  EXPECT_LT(std::abs(jsd_points(a, a)), 1e-12);
  std::vector<double> lo(500), hi(500);
  for (std::size_t i = 0; i < 500; ++i) {
    lo[i] = static_cast<double>(i) * 1e-3;
    hi[i] = 10.0 + static_cast<double>(i) * 1e-3;
  }
  EXPECT_NEAR(jsd_points(lo, hi), std::numbers::ln2, 1e-8);
}

TEST(JsdTest, SymmetricAndBounded) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = normal_tensor({200}, rng, 0.0, 1.0).to_vector();
    const auto b = normal_tensor({150}, rng, 0.3 * trial, 1.0 + 0.1 * trial).to_vector();
    const double ab = jsd_points(a, b);
    EXPECT_NEAR(ab, jsd_points(b, a), 1e-12);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, std::numbers::ln2 + 1e-8);
  }
}

TEST(JsdTest, PerChannelReport) {
  WindowBatch real{Tensor({2, 2, 2}, {0, 0, 1, 0, 2, 0, 3, 0}), {"a", "b"}, {Provenance::Real, Provenance::Real}};
  WindowBatch fake = real;
  fake.data = Tensor({2, 2, 2}, {0, 5, 1, 5, 2, 5, 3, 5});
  const auto r = jsd(real, fake);
  ASSERT_EQ(r.per_channel.size(), 2u);
  EXPECT_LT(r.per_channel[0], 1e-12);
  EXPECT_NEAR(r.per_channel[1], std::numbers::ln2, 1e-8);
  EXPECT_NEAR(r.mean, 0.5 * (r.per_channel[0] + r.per_channel[1]), 1e-15);
  fake.channels = {"a", "c"};
  EXPECT_THROW(jsd(real, fake), ContractError);
}

TEST(MaeTest, Examples) {
  const std::vector<double> a{1, 2}, b{2, 4};
  EXPECT_EQ(mae(a, a), 0.0);
  EXPECT_EQ(mae(a, b), 1.5);
  const std::vector<double> shifted{1.25, 2.25};
  EXPECT_EQ(mae(shifted, a), 0.25);
  EXPECT_THROW(mae(a, std::vector<double>{1}), ShapeError);
}

TEST(QuantileTest, MatchesLinearInterpolation) {
  const std::vector<double> v{4, 1, 3, 2, 5};
  EXPECT_EQ(quantile(v, 0.0), 1.0);
  EXPECT_EQ(quantile(v, 1.0), 5.0);
  EXPECT_EQ(quantile(v, 0.5), 3.0);
  EXPECT_DOUBLE_EQ(quantile(v, 0.95), 4.8);
}

TEST(PeakTest, Examples) {
  const std::vector<double> obs{1, 1, 1, 1};
  const std::vector<double> pred{2, 0, 1, 1};
  const auto none = peak_event_metrics(pred, obs);
  EXPECT_FALSE(none.peak_mae.has_value());
  EXPECT_FALSE(none.peak_bias.has_value());
  EXPECT_EQ(*none.dry_mae, none.mae);

  std::vector<double> o, p;
  for (int i = 0; i < 100; ++i) {
    o.push_back(i);
    p.push_back(i);
  }
  const double threshold = quantile(o, 0.95);
  for (std::size_t i = 0; i < o.size(); ++i) {
    if (o[i] > threshold) p[i] -= 2.0;
  }
  const auto m = peak_event_metrics(p, o);
  EXPECT_EQ(*m.peak_bias, -2.0);
  EXPECT_EQ(*m.peak_mae, 2.0);
  EXPECT_EQ(*m.dry_mae, 0.0);
  EXPECT_EQ(m.peak_count + m.dry_count, o.size());
  EXPECT_EQ(m.peak_count, 5u);
}

}  // namespace
}  // namespace tsgan
