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

#ifndef SYNTHDETECT_CLASSIFIERS_H_
#define SYNTHDETECT_CLASSIFIERS_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "synthdetect/matrix.h"

namespace synthdetect {

enum class AlgoKind {
  kDecisionTree,
  kLda,
  kQda,
  kGaussianNb,
  kLogisticRegression,
  kWeightedKnn,
  kBaggedTrees,
  kRusBoostedTrees
};

std::string_view algo_name(AlgoKind kind);
std::optional<AlgoKind> parse_algo(std::string_view text);

// Dense design matrix with integer class targets in [0, n_classes).
struct TrainingSet {
  RealMatrix x;
  std::vector<int> y;
  std::size_t n_classes = 0;

  std::size_t rows() const { return x.rows(); }
  std::size_t cols() const { return x.cols(); }
};

class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual AlgoKind kind() const = 0;
  virtual std::size_t num_classes() const = 0;
  // One non-negative score per class, summing to 1.
  virtual std::vector<double> scores(std::span<const double> x) const = 0;
  virtual nlohmann::json to_json() const = 0;
};

std::unique_ptr<Classifier> classifier_from_json(AlgoKind kind, const nlohmann::json& j);

// Index of the largest score; the lowest index wins ties.
std::size_t argmax(std::span<const double> scores);

struct TreeParams {
  int max_depth = 16;
  std::size_t min_leaf = 1;
};

// CART with weighted Gini impurity and exhaustive threshold search.
class DecisionTree : public Classifier {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int label = 0;
    std::vector<double> distribution;
  };

  // rows selects (possibly repeated) training rows; empty means all rows.
  // weights is indexed by training row; empty means uniform.
  static DecisionTree fit(const TrainingSet& data, const TreeParams& params,
                          std::span<const std::size_t> rows = {},
                          std::span<const double> weights = {});

  AlgoKind kind() const override { return AlgoKind::kDecisionTree; }
  std::size_t num_classes() const override { return n_classes_; }
  std::vector<double> scores(std::span<const double> x) const override;
  nlohmann::json to_json() const override;
  static DecisionTree from_json(const nlohmann::json& j);

  int predict_label(std::span<const double> x) const { return nodes_[leaf_index(x)].label; }
  std::size_t leaf_index(std::span<const double> x) const;
  const std::vector<Node>& nodes() const { return nodes_; }
  int depth() const;

 private:
  std::vector<Node> nodes_;
  std::size_t n_classes_ = 0;
};

// Linear discriminant analysis with a pooled, diagonally loaded covariance.
class Lda : public Classifier {
 public:
  static Lda fit(const TrainingSet& data);
  AlgoKind kind() const override { return AlgoKind::kLda; }
  std::size_t num_classes() const override { return bias_.size(); }
  std::vector<double> scores(std::span<const double> x) const override;
  // Discriminant values before the softmax.
  std::vector<double> discriminants(std::span<const double> x) const;
  nlohmann::json to_json() const override;
  static Lda from_json(const nlohmann::json& j);

 private:
  std::vector<std::vector<double>> coef_;  // per class: inv(S) * mean
  std::vector<double> bias_;
};

class Qda : public Classifier {
 public:
  static Qda fit(const TrainingSet& data);
  AlgoKind kind() const override { return AlgoKind::kQda; }
  std::size_t num_classes() const override { return means_.size(); }
  std::vector<double> scores(std::span<const double> x) const override;
  nlohmann::json to_json() const override;
  static Qda from_json(const nlohmann::json& j);

 private:
  std::vector<std::vector<double>> means_;
  std::vector<std::vector<double>> precisions_;  // row-major d x d inverses
  std::vector<double> offsets_;                   // log prior - 0.5 log det
};

class GaussianNb : public Classifier {
 public:
  static constexpr double kVarianceFloor = 1e-9;
  static GaussianNb fit(const TrainingSet& data);
  AlgoKind kind() const override { return AlgoKind::kGaussianNb; }
  std::size_t num_classes() const override { return log_priors_.size(); }
  std::vector<double> scores(std::span<const double> x) const override;
  nlohmann::json to_json() const override;
  static GaussianNb from_json(const nlohmann::json& j);

 private:
  std::vector<std::vector<double>> means_;
  std::vector<std::vector<double>> variances_;
  std::vector<double> log_priors_;
};

struct LogisticParams {
  double learning_rate = 0.1;
  std::size_t epochs = 500;
  double l2 = 1e-4;
};

// Multinomial logistic regression on internally standardised features,
// trained by full-batch gradient descent from zero weights.
class LogisticRegression : public Classifier {
 public:
  static LogisticRegression fit(const TrainingSet& data, const LogisticParams& params);
  AlgoKind kind() const override { return AlgoKind::kLogisticRegression; }
  std::size_t num_classes() const override { return bias_.size(); }
  std::vector<double> scores(std::span<const double> x) const override;
  nlohmann::json to_json() const override;
  static LogisticRegression from_json(const nlohmann::json& j);

 private:
  std::vector<double> mean_, scale_;
  std::vector<std::vector<double>> weights_;
  std::vector<double> bias_;
};

struct KnnParams {
  std::size_t k = 10;
  bool standardize = true;
};

// Inverse-distance weighted vote of the k nearest training rows. Exact
// matches (distance 0) outvote everything else.
class WeightedKnn : public Classifier {
 public:
  static WeightedKnn fit(const TrainingSet& data, const KnnParams& params);
  AlgoKind kind() const override { return AlgoKind::kWeightedKnn; }
  std::size_t num_classes() const override { return n_classes_; }
  std::vector<double> scores(std::span<const double> x) const override;
  nlohmann::json to_json() const override;
  static WeightedKnn from_json(const nlohmann::json& j);

 private:
  std::size_t k_ = 1;
  std::size_t n_classes_ = 0;
  std::vector<double> mean_, scale_;
  RealMatrix points_;  // standardised
  std::vector<int> labels_;
};

struct BaggingParams {
  std::size_t n_bags = 50;
  bool bootstrap = true;
  TreeParams tree;
  std::uint64_t seed = 0;
};

// Majority vote of trees grown on bootstrap resamples.
class BaggedTrees : public Classifier {
 public:
  static BaggedTrees fit(const TrainingSet& data, const BaggingParams& params);
  AlgoKind kind() const override { return AlgoKind::kBaggedTrees; }
  std::size_t num_classes() const override { return n_classes_; }
  std::vector<double> scores(std::span<const double> x) const override;
  nlohmann::json to_json() const override;
  static BaggedTrees from_json(const nlohmann::json& j);
  const std::vector<DecisionTree>& trees() const { return trees_; }

 private:
  std::vector<DecisionTree> trees_;
  std::size_t n_classes_ = 0;
};

struct BoostingParams {
  std::size_t rounds = 50;
  TreeParams tree{4, 1};
  std::uint64_t seed = 0;
};

// AdaBoost.M1 where every round fits its weak tree on a random
// undersample holding the minority-class count of each class.
class RusBoostedTrees : public Classifier {
 public:
  static RusBoostedTrees fit(const TrainingSet& data, const BoostingParams& params);
  AlgoKind kind() const override { return AlgoKind::kRusBoostedTrees; }
  std::size_t num_classes() const override { return n_classes_; }
  std::vector<double> scores(std::span<const double> x) const override;
  nlohmann::json to_json() const override;
  static RusBoostedTrees from_json(const nlohmann::json& j);

  const std::vector<DecisionTree>& trees() const { return trees_; }
  const std::vector<double>& alphas() const { return alphas_; }
  // Per round, the per-class row counts of the undersample.
  const std::vector<std::vector<std::size_t>>& round_class_counts() const {
    return round_class_counts_;
  }

 private:
  std::vector<DecisionTree> trees_;
  std::vector<double> alphas_;
  std::vector<std::vector<std::size_t>> round_class_counts_;
  std::size_t n_classes_ = 0;
};

}  // namespace synthdetect

#endif  // SYNTHDETECT_CLASSIFIERS_H_
