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

#ifndef SYNTHDETECT_FEATURES_H_
#define SYNTHDETECT_FEATURES_H_

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "synthdetect/audio_io.h"
#include "synthdetect/bispectral.h"
#include "synthdetect/cepstral.h"

namespace synthdetect {

// Population moments; expectations are plain averages.
struct Moments {
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double kurtosis = 0.0;
};

// Skewness and kurtosis are 0 when the variance is 0.
Moments moments(std::span<const double> values);

inline constexpr std::size_t kNumFeatures = 14;

// Column order of the feature CSV (followed by `label`).
inline constexpr std::array<std::string_view, kNumFeatures> kFeatureNames = {
    "bm_mean",   "bm_var", "bm_skew", "bm_kurt", "bp_mean", "bp_var", "bp_skew",
    "bp_kurt",   "mfcc_mean", "mfcc_var", "d_mean", "d_var", "d2_mean", "d2_var"};

// 14 numeric entries plus the class label.
struct FeatureVector {
  std::array<double, kNumFeatures> values{};
  ClassLabel label = ClassLabel::kHuman;

  Moments bico_magnitude() const { return {values[0], values[1], values[2], values[3]}; }
  Moments bico_phase() const { return {values[4], values[5], values[6], values[7]}; }

  bool operator==(const FeatureVector&) const = default;
};

struct FeatureConfig {
  MfccConfig mfcc;
  BispectralConfig bispectral;
};

// Bicoherence moments on the [0,1]-normalised grids, then scalar mean and
// variance over every cell of the MFCC, delta and delta-delta matrices.
FeatureVector extract_feature_vector(const AudioClip& clip, ClassLabel label,
                                     const FeatureConfig& cfg);

enum class FeatureSubset {
  kBicoMag,
  kBicoPhase,
  kMfcc,
  kDelta,
  kDelta2,
  kBicoAll,
  kCepstralAll,
  kAll
};

std::string_view subset_name(FeatureSubset subset);
std::optional<FeatureSubset> parse_subset(std::string_view text);
std::vector<std::size_t> subset_columns(FeatureSubset subset);

// Rows keep all 14 values; the subset decides which columns models see.
class FeatureTable {
 public:
  FeatureTable() = default;
  explicit FeatureTable(std::vector<FeatureVector> rows,
                        FeatureSubset subset = FeatureSubset::kAll)
      : rows_(std::move(rows)), subset_(subset) {}

  const std::vector<FeatureVector>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  FeatureSubset subset() const { return subset_; }
  std::size_t num_columns() const { return subset_columns(subset_).size(); }

  // Active columns of one row.
  std::vector<double> row_values(std::size_t i) const;
  std::vector<ClassLabel> labels() const;

  void add(FeatureVector row) { rows_.push_back(std::move(row)); }

 private:
  std::vector<FeatureVector> rows_;
  FeatureSubset subset_ = FeatureSubset::kAll;
};

FeatureTable select_subset(const FeatureTable& table, FeatureSubset subset);

// Shortest round-trip decimal form of a double.
std::string format_double(double v);

// `# key=value` metadata lines, then the fixed header, then one row per
// vector. All 14 columns are written regardless of the active subset.
void write_feature_csv(std::ostream& out, const FeatureTable& table,
                       const std::vector<std::pair<std::string, std::string>>& meta = {});

struct FeatureCsv {
  FeatureTable table;
  std::vector<std::pair<std::string, std::string>> meta;
};

FeatureCsv read_feature_csv(std::istream& in);

}  // namespace synthdetect

#endif  // SYNTHDETECT_FEATURES_H_
