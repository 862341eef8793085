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

#ifndef SYNTHDETECT_CLASSICAL_ML_H_
#define SYNTHDETECT_CLASSICAL_ML_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "synthdetect/classifiers.h"
#include "synthdetect/features.h"

namespace synthdetect {

enum class Scenario { kBinary, kMulti };

std::string_view scenario_name(Scenario s);
std::optional<Scenario> parse_scenario(std::string_view text);

// Class names of the scenario in index order.
std::vector<std::string> scenario_classes(Scenario s);
// Index of a label within scenario_classes(s).
int scenario_target(ClassLabel label, Scenario s);

struct AlgoSpec {
  AlgoKind kind = AlgoKind::kRusBoostedTrees;
  int max_depth = 16;
  std::size_t min_leaf = 1;
  std::size_t k = 10;
  bool knn_standardize = true;
  std::size_t n_bags = 50;
  bool bootstrap = true;
  std::size_t boost_rounds = 50;
  int boost_depth = 4;
  double learning_rate = 0.1;
  std::size_t epochs = 500;
  double l2 = 1e-4;
  std::uint64_t seed = 0;
};

nlohmann::json algo_spec_to_json(const AlgoSpec& spec);
// Missing keys keep their defaults; unknown kind names are ConfigError.
AlgoSpec algo_spec_from_json(const nlohmann::json& j);

struct Prediction {
  std::size_t class_index = 0;
  std::string label;
  std::vector<double> scores;
};

class ClassifierModel {
 public:
  ClassifierModel(AlgoSpec spec, Scenario scenario, FeatureSubset subset,
                  std::vector<std::string> classes, std::size_t n_features,
                  std::shared_ptr<const Classifier> impl);

  const AlgoSpec& spec() const { return spec_; }
  Scenario scenario() const { return scenario_; }
  FeatureSubset subset() const { return subset_; }
  const std::vector<std::string>& classes() const { return classes_; }
  std::size_t num_features() const { return n_features_; }
  const Classifier& impl() const { return *impl_; }

  // x holds the active subset columns only.
  Prediction predict(std::span<const double> x) const;
  // Selects the model's subset from a full feature vector.
  Prediction predict(const FeatureVector& fv) const;

 private:
  AlgoSpec spec_;
  Scenario scenario_;
  FeatureSubset subset_;
  std::vector<std::string> classes_;
  std::size_t n_features_;
  std::shared_ptr<const Classifier> impl_;
};

// Fits on the table's active columns. The class list is the scenario's
// classes that occur in the table, in scenario order.
ClassifierModel train_classifier(const FeatureTable& table, const AlgoSpec& spec,
                                 Scenario scenario);

struct ConfusionMatrix {
  std::vector<std::string> classes;
  std::vector<std::vector<std::size_t>> counts;  // rows truth, columns prediction

  explicit ConfusionMatrix(std::vector<std::string> names = {});
  void add(std::size_t truth, std::size_t predicted) { ++counts.at(truth).at(predicted); }
  std::size_t total() const;
  std::size_t correct() const;
};

struct ClassMetrics {
  std::string name;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct MetricsReport {
  double accuracy = 0.0;
  std::vector<ClassMetrics> per_class;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  // Set when a positive class was named.
  std::optional<ClassMetrics> positive;
};

double precision_score(std::size_t tp, std::size_t fp);
double recall_score(std::size_t tp, std::size_t fn);
double f1_score(double precision, double recall);

MetricsReport metrics(const ConfusionMatrix& cm, std::optional<std::size_t> positive_class = {});

// Seeded shuffle of [0, n) cut into k contiguous folds; the first n % k
// folds are one longer.
std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed);

// Per class: shuffle, then deal round-robin into k folds.
std::vector<std::vector<std::size_t>> stratified_kfold(std::span<const int> targets, std::size_t k,
                                                       std::uint64_t seed);

struct CrossValidationResult {
  ConfusionMatrix confusion;
  MetricsReport metrics;
  std::vector<std::vector<std::size_t>> folds;
};

CrossValidationResult cross_validate(const FeatureTable& table, const AlgoSpec& spec,
                                     Scenario scenario, std::size_t k = 5);

// Keeps `per_class` rows of each source class present in the table, drawn
// by a seeded shuffle; row order of the original table is preserved.
FeatureTable balance_classes(const FeatureTable& table, std::size_t per_class, std::uint64_t seed);

nlohmann::json metrics_to_json(const MetricsReport& m);
nlohmann::json confusion_to_json(const ConfusionMatrix& cm);
ConfusionMatrix confusion_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const ClassifierModel& model, const std::string& config_hash = {},
                             const nlohmann::json& config = {});
ClassifierModel model_from_json(const nlohmann::json& j);

void save_model(const ClassifierModel& model, const std::filesystem::path& path,
                const std::string& config_hash = {}, const nlohmann::json& config = {});

struct LoadedModel {
  ClassifierModel model;
  std::string config_hash;
  nlohmann::json config;
};

LoadedModel load_model(const std::filesystem::path& path);

}  // namespace synthdetect

#endif  // SYNTHDETECT_CLASSICAL_ML_H_
