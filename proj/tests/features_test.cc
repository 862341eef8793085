// Copyright (c) 2026 The synthdetect Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "synthdetect/features.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.h"
#include "synthdetect/errors.h"

namespace synthdetect {
namespace {

TEST(Moments, DegenerateRule) {
  const auto m = moments(std::vector<double>{1, 1, 1});
  EXPECT_EQ(m.mean, 1.0);
  EXPECT_EQ(m.variance, 0.0);
  EXPECT_EQ(m.skewness, 0.0);
  EXPECT_EQ(m.kurtosis, 0.0);
}

TEST(Moments, HandEvaluatedCases) {
  const auto a = moments(std::vector<double>{0, 1});
  EXPECT_DOUBLE_EQ(a.mean, 0.5);
  EXPECT_DOUBLE_EQ(a.variance, 0.25);
  EXPECT_DOUBLE_EQ(a.skewness, 0.0);
  EXPECT_DOUBLE_EQ(a.kurtosis, 1.0);

  const auto b = moments(std::vector<double>{0, 0, 0, 1});
  EXPECT_DOUBLE_EQ(b.mean, 0.25);
  EXPECT_DOUBLE_EQ(b.variance, 0.1875);
  EXPECT_NEAR(b.skewness, 2.0 / std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(b.kurtosis, 7.0 / 3.0, 1e-12);
  EXPECT_THROW(moments(std::vector<double>{}), ConfigError);
}

TEST(Moments, MatchesBruteForceAndKurtosisBound) {
  std::mt19937_64 rng(31);
  for (std::size_t n : {2, 3, 10, 1000, 100000}) {
    std::gamma_distribution<double> g(2.0, 1.5);
    std::vector<double> x(n);
    for (auto& v : x) v = g(rng) + 3.0;
    const auto m = moments(x);
    const auto ref = oracle::brute_moments(x);
    EXPECT_NEAR(m.mean, ref.mean, 1e-12 * std::abs(ref.mean));
    EXPECT_NEAR(m.variance, ref.variance, 1e-12 * ref.variance);
    EXPECT_NEAR(m.skewness, ref.skewness, 1e-12 * std::max(1.0, std::abs(ref.skewness)));
    EXPECT_NEAR(m.kurtosis, ref.kurtosis, 1e-12 * ref.kurtosis);
    EXPECT_GE(m.kurtosis, m.skewness * m.skewness + 1.0 - 1e-12);
  }
}

TEST(Moments, AffineInvariance) {
  std::mt19937_64 rng(32);
  const auto x = oracle::uniform_vector(500, rng, 0.0, 1.0);
  std::vector<double> y(x.size());
  const auto mx = moments(x);
  for (const auto& [a, b] : std::vector<std::pair<double, double>>{{2.5, -1}, {-0.3, 7}, {-4, 0}}) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = a * x[i] + b;
    const auto my = moments(y);
    EXPECT_NEAR(my.skewness, (a > 0 ? 1 : -1) * mx.skewness, 1e-9);
    EXPECT_NEAR(my.kurtosis, mx.kurtosis, 1e-9);
  }
}

std::vector<double> voiced(std::size_t n, int rate, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.02);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    x[i] = 0.3 * std::sin(2 * oracle::kPi * 150 * t) + 0.2 * std::sin(2 * oracle::kPi * 300 * t) + g(rng);
  }
  return x;
}

TEST(ExtractFeatureVector, FourteenFiniteValuesAndDeterminism) {
  const AudioClip clip(voiced(16000, 16000, 1), 16000, 1, "v");
  const FeatureConfig cfg;
  const auto a = extract_feature_vector(clip, ClassLabel::kReplica, cfg);
  const auto b = extract_feature_vector(clip, ClassLabel::kReplica, cfg);
  EXPECT_EQ(a.values.size(), 14u);
  EXPECT_EQ(a.label, ClassLabel::kReplica);
  for (double v : a.values) EXPECT_TRUE(std::isfinite(v));
  EXPECT_EQ(a, b);
  for (std::size_t i = 0; i < 14; ++i)
    EXPECT_EQ(std::bit_cast<std::uint64_t>(a.values[i]), std::bit_cast<std::uint64_t>(b.values[i]));
  // Bicoherence moments come from [0,1] grids.
  EXPECT_GE(a.values[0], 0.0);
  EXPECT_LE(a.values[0], 1.0);
  EXPECT_GE(a.values[4], 0.0);
  EXPECT_LE(a.values[4], 1.0);
}

TEST(ExtractFeatureVector, SilencePropagatesZeros) {
  const AudioClip clip(std::vector<double>(16000, 0.0), 16000);
  const auto fv = extract_feature_vector(clip, ClassLabel::kHuman, FeatureConfig{});
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(fv.values[i], 0.0) << kFeatureNames[i];
  // Every frame identical: only the across-coefficient spread of the MFCC
  // matrix remains; deltas vanish.
  EXPECT_EQ(fv.values[10], 0.0);
  EXPECT_EQ(fv.values[11], 0.0);
  EXPECT_EQ(fv.values[12], 0.0);
  EXPECT_EQ(fv.values[13], 0.0);
}

TEST(ExtractFeatureVector, TooShortIsFeatureError) {
  EXPECT_THROW(extract_feature_vector(AudioClip(std::vector<double>(300, 0.1), 16000),
                                      ClassLabel::kHuman, FeatureConfig{}),
               FeatureError);
  // Long enough for one STFT frame but not for 100 segments of 128 samples.
  EXPECT_THROW(extract_feature_vector(AudioClip(std::vector<double>(5000, 0.1), 16000),
                                      ClassLabel::kHuman, FeatureConfig{}),
               FeatureError);
}

FeatureTable random_table(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 3.0);
  std::vector<FeatureVector> rows(n);
  for (auto& r : rows) {
    for (auto& v : r.values) v = g(rng);
    r.label = static_cast<ClassLabel>(rng() % 4);
  }
  return FeatureTable(rows);
}

TEST(SelectSubset, ColumnCounts) {
  const auto t = random_table(5, 1);
  EXPECT_EQ(select_subset(t, FeatureSubset::kAll).num_columns(), 14u);
  EXPECT_EQ(select_subset(t, FeatureSubset::kBicoMag).num_columns(), 4u);
  EXPECT_EQ(select_subset(t, FeatureSubset::kBicoPhase).num_columns(), 4u);
  EXPECT_EQ(select_subset(t, FeatureSubset::kMfcc).num_columns(), 2u);
  EXPECT_EQ(select_subset(t, FeatureSubset::kBicoAll).num_columns(), 8u);
  EXPECT_EQ(select_subset(t, FeatureSubset::kCepstralAll).num_columns(), 6u);
}

TEST(SelectSubset, IdempotentAndPreservesRowsAndLabels) {
  const auto t = random_table(20, 2);
  for (int s = 0; s <= static_cast<int>(FeatureSubset::kAll); ++s) {
    const auto subset = static_cast<FeatureSubset>(s);
    const auto once = select_subset(t, subset);
    const auto twice = select_subset(once, subset);
    EXPECT_EQ(once.labels(), t.labels());
    for (std::size_t i = 0; i < t.size(); ++i) {
      EXPECT_EQ(once.row_values(i), twice.row_values(i));
      const auto cols = subset_columns(subset);
      for (std::size_t c = 0; c < cols.size(); ++c)
        EXPECT_EQ(once.row_values(i)[c], t.rows()[i].values[cols[c]]);
    }
    EXPECT_EQ(parse_subset(subset_name(subset)), subset);
  }
}

TEST(FeatureCsv, HeaderAndRoundTrip) {
  const auto t = random_table(30, 3);
  std::stringstream ss;
  write_feature_csv(ss, t, {{"config_hash", "abc"}});
  const std::string text = ss.str();
  EXPECT_NE(text.find("bm_mean,bm_var,bm_skew,bm_kurt,bp_mean,bp_var,bp_skew,bp_kurt,"
                      "mfcc_mean,mfcc_var,d_mean,d_var,d2_mean,d2_var,label\n"),
            std::string::npos);
  const auto back = read_feature_csv(ss);
  ASSERT_EQ(back.table.size(), t.size());
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_EQ(back.table.rows()[i], t.rows()[i]);
  ASSERT_EQ(back.meta.size(), 1u);
  EXPECT_EQ(back.meta[0].second, "abc");
}

TEST(FeatureCsv, RejectsBadRows) {
  std::stringstream bad("bm_mean,label\n1,Human\n");
  EXPECT_THROW(read_feature_csv(bad), ManifestError);
}

}  // namespace
}  // namespace synthdetect
