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

#include "synthdetect/classical_ml.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <utility>

#include "synthdetect/errors.h"
#include "synthdetect/random.h"

namespace synthdetect {
namespace {

using nlohmann::json;

constexpr int kModelFormatVersion = 1;
constexpr std::string_view kModelFormat = "synthdetect-classifier";

TrainingSet make_training_set(const FeatureTable& table, std::span<const std::size_t> rows,
                              std::span<const int> targets, std::size_t n_classes) {
  TrainingSet ts;
  ts.n_classes = n_classes;
  ts.x = RealMatrix(rows.size(), table.num_columns());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto v = table.row_values(rows[i]);
    std::copy(v.begin(), v.end(), ts.x.row(i).begin());
    ts.y.push_back(targets[rows[i]]);
  }
  return ts;
}

std::shared_ptr<const Classifier> fit_impl(const TrainingSet& ts, const AlgoSpec& spec) {
  const TreeParams tree{spec.max_depth, spec.min_leaf};
  switch (spec.kind) {
    case AlgoKind::kDecisionTree:
      return std::make_shared<DecisionTree>(DecisionTree::fit(ts, tree));
    case AlgoKind::kLda:
      return std::make_shared<Lda>(Lda::fit(ts));
    case AlgoKind::kQda:
      return std::make_shared<Qda>(Qda::fit(ts));
    case AlgoKind::kGaussianNb:
      return std::make_shared<GaussianNb>(GaussianNb::fit(ts));
    case AlgoKind::kLogisticRegression:
      return std::make_shared<LogisticRegression>(
          LogisticRegression::fit(ts, {spec.learning_rate, spec.epochs, spec.l2}));
    case AlgoKind::kWeightedKnn:
      return std::make_shared<WeightedKnn>(WeightedKnn::fit(ts, {spec.k, spec.knn_standardize}));
    case AlgoKind::kBaggedTrees:
      return std::make_shared<BaggedTrees>(
          BaggedTrees::fit(ts, {spec.n_bags, spec.bootstrap, tree, spec.seed}));
    case AlgoKind::kRusBoostedTrees:
      return std::make_shared<RusBoostedTrees>(RusBoostedTrees::fit(
          ts, {spec.boost_rounds, TreeParams{spec.boost_depth, spec.min_leaf}, spec.seed}));
  }
  throw ConfigError("unknown algorithm");
}

std::vector<int> scenario_targets(const FeatureTable& table, Scenario s) {
  std::vector<int> t;
  t.reserve(table.size());
  for (const auto& r : table.rows()) t.push_back(scenario_target(r.label, s));
  return t;
}

// Scenario class indices that occur in targets, ascending.
std::vector<int> present_classes(std::span<const int> targets) {
  std::vector<int> present(targets.begin(), targets.end());
  std::sort(present.begin(), present.end());
  present.erase(std::unique(present.begin(), present.end()), present.end());
  return present;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  const auto it = j.find(key);
  return it == j.end() ? fallback : it->get<T>();
}

json class_metrics_json(const ClassMetrics& c) {
  return {{"name", c.name},
          {"precision", c.precision},
          {"recall", c.recall},
          {"f1", c.f1},
          {"support", c.support}};
}

}  // namespace

std::string_view scenario_name(Scenario s) {
  return s == Scenario::kBinary ? "binary" : "multi";
}

std::optional<Scenario> parse_scenario(std::string_view text) {
  if (text == "binary") return Scenario::kBinary;
  if (text == "multi") return Scenario::kMulti;
  return std::nullopt;
}

std::vector<std::string> scenario_classes(Scenario s) {
  std::vector<std::string> out;
  if (s == Scenario::kBinary) {
    for (auto b : {BinaryLabel::kHuman, BinaryLabel::kSynthetic}) out.emplace_back(label_name(b));
  } else {
    for (std::size_t i = 0; i < kNumClassLabels; ++i)
      out.emplace_back(label_name(static_cast<ClassLabel>(i)));
  }
  return out;
}

int scenario_target(ClassLabel label, Scenario s) {
  return s == Scenario::kBinary ? static_cast<int>(to_binary(label)) : static_cast<int>(label);
}

json algo_spec_to_json(const AlgoSpec& spec) {
  return {{"kind", algo_name(spec.kind)},
          {"max_depth", spec.max_depth},
          {"min_leaf", spec.min_leaf},
          {"k", spec.k},
          {"knn_standardize", spec.knn_standardize},
          {"n_bags", spec.n_bags},
          {"bootstrap", spec.bootstrap},
          {"boost_rounds", spec.boost_rounds},
          {"boost_depth", spec.boost_depth},
          {"learning_rate", spec.learning_rate},
          {"epochs", spec.epochs},
          {"l2", spec.l2},
          {"seed", spec.seed}};
}

AlgoSpec algo_spec_from_json(const json& j) {
  AlgoSpec s;
  try {
    if (j.contains("kind")) {
      const auto kind = parse_algo(j.at("kind").get<std::string>());
      if (!kind) throw ConfigError("unknown algorithm: " + j.at("kind").get<std::string>());
      s.kind = *kind;
    }
    s.max_depth = get_or(j, "max_depth", s.max_depth);
    s.min_leaf = get_or(j, "min_leaf", s.min_leaf);
    s.k = get_or(j, "k", s.k);
    s.knn_standardize = get_or(j, "knn_standardize", s.knn_standardize);
    s.n_bags = get_or(j, "n_bags", s.n_bags);
    s.bootstrap = get_or(j, "bootstrap", s.bootstrap);
    s.boost_rounds = get_or(j, "boost_rounds", s.boost_rounds);
    s.boost_depth = get_or(j, "boost_depth", s.boost_depth);
    s.learning_rate = get_or(j, "learning_rate", s.learning_rate);
    s.epochs = get_or(j, "epochs", s.epochs);
    s.l2 = get_or(j, "l2", s.l2);
    s.seed = get_or(j, "seed", s.seed);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad algorithm spec: ") + e.what());
  }
  return s;
}

ClassifierModel::ClassifierModel(AlgoSpec spec, Scenario scenario, FeatureSubset subset,
                                 std::vector<std::string> classes, std::size_t n_features,
                                 std::shared_ptr<const Classifier> impl)
    : spec_(spec),
      scenario_(scenario),
      subset_(subset),
      classes_(std::move(classes)),
      n_features_(n_features),
      impl_(std::move(impl)) {
  if (!impl_ || impl_->num_classes() != classes_.size())
    throw Error("classifier does not match its class list");
}

Prediction ClassifierModel::predict(std::span<const double> x) const {
  if (x.size() != n_features_)
    throw PredictError("model expects " + std::to_string(n_features_) + " features, got " +
                       std::to_string(x.size()));
  for (double v : x) {
    if (!std::isfinite(v)) throw PredictError("non-finite feature value");
  }
  Prediction p;
  p.scores = impl_->scores(x);
  p.class_index = argmax(p.scores);
  p.label = classes_[p.class_index];
  return p;
}

Prediction ClassifierModel::predict(const FeatureVector& fv) const {
  std::vector<double> x;
  for (auto c : subset_columns(subset_)) x.push_back(fv.values[c]);
  return predict(x);
}

ClassifierModel train_classifier(const FeatureTable& table, const AlgoSpec& spec,
                                 Scenario scenario) {
  const auto targets = scenario_targets(table, scenario);
  const auto present = present_classes(targets);
  if (present.size() < 2) throw TrainError("training needs at least two classes");
  const auto all_names = scenario_classes(scenario);
  std::vector<int> remap(all_names.size(), -1);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < present.size(); ++i) {
    remap[static_cast<std::size_t>(present[i])] = static_cast<int>(i);
    names.push_back(all_names[static_cast<std::size_t>(present[i])]);
  }
  std::vector<int> local(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i)
    local[i] = remap[static_cast<std::size_t>(targets[i])];
  const auto rows = iota_indices(table.size());
  const auto ts = make_training_set(table, rows, local, present.size());
  return ClassifierModel(spec, scenario, table.subset(), std::move(names), table.num_columns(),
                         fit_impl(ts, spec));
}

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> names)
    : classes(std::move(names)),
      counts(classes.size(), std::vector<std::size_t>(classes.size(), 0)) {}

std::size_t ConfusionMatrix::total() const {
  std::size_t t = 0;
  for (const auto& row : counts)
    for (auto c : row) t += c;
  return t;
}

std::size_t ConfusionMatrix::correct() const {
  std::size_t t = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
  return t;
}

double precision_score(std::size_t tp, std::size_t fp) {
  return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double recall_score(std::size_t tp, std::size_t fn) {
  return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
}

double f1_score(double precision, double recall) {
  const double s = precision + recall;
  return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

MetricsReport metrics(const ConfusionMatrix& cm, std::optional<std::size_t> positive_class) {
  const std::size_t c = cm.counts.size();
  MetricsReport r;
  const std::size_t total = cm.total();
  r.accuracy = total == 0 ? 0.0 : static_cast<double>(cm.correct()) / static_cast<double>(total);
  for (std::size_t k = 0; k < c; ++k) {
    std::size_t fp = 0, fn = 0;
    for (std::size_t j = 0; j < c; ++j) {
      if (j == k) continue;
      fp += cm.counts[j][k];
      fn += cm.counts[k][j];
    }
    const std::size_t tp = cm.counts[k][k];
    ClassMetrics m;
    m.name = k < cm.classes.size() ? cm.classes[k] : std::to_string(k);
    m.precision = precision_score(tp, fp);
    m.recall = recall_score(tp, fn);
    m.f1 = f1_score(m.precision, m.recall);
    m.support = tp + fn;
    r.macro_precision += m.precision;
    r.macro_recall += m.recall;
    r.macro_f1 += m.f1;
    r.per_class.push_back(std::move(m));
  }
  if (c > 0) {
    r.macro_precision /= static_cast<double>(c);
    r.macro_recall /= static_cast<double>(c);
    r.macro_f1 /= static_cast<double>(c);
  }
  if (positive_class) r.positive = r.per_class.at(*positive_class);
  return r;
}

std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, std::size_t k,
                                                  std::uint64_t seed) {
  if (k == 0) throw ConfigError("fold count must be positive");
  if (k > n) throw ConfigError("more folds than samples");
  auto perm = iota_indices(n);
  Rng rng(seed);
  shuffle(perm, rng);
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t len = n / k + (f < n % k ? 1 : 0);
    folds[f].assign(perm.begin() + static_cast<std::ptrdiff_t>(pos),
                    perm.begin() + static_cast<std::ptrdiff_t>(pos + len));
    pos += len;
  }
  return folds;
}

std::vector<std::vector<std::size_t>> stratified_kfold(std::span<const int> targets, std::size_t k,
                                                       std::uint64_t seed) {
  if (k < 2) throw ConfigError("stratified folds need k >= 2");
  const auto present = present_classes(targets);
  Rng rng(seed);
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t offset = 0;
  for (int c : present) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < targets.size(); ++i) {
      if (targets[i] == c) members.push_back(i);
    }
    if (members.size() < k)
      throw ConfigError("class has fewer members than folds; stratification infeasible");
    shuffle(members, rng);
    for (std::size_t i = 0; i < members.size(); ++i) folds[(offset + i) % k].push_back(members[i]);
    offset += members.size();
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

CrossValidationResult cross_validate(const FeatureTable& table, const AlgoSpec& spec,
                                     Scenario scenario, std::size_t k) {
  const auto targets = scenario_targets(table, scenario);
  const auto present = present_classes(targets);
  if (present.size() < 2) throw TrainError("cross-validation needs at least two classes");
  const auto all_names = scenario_classes(scenario);
  std::vector<std::string> names;
  for (int c : present) names.push_back(all_names[static_cast<std::size_t>(c)]);

  CrossValidationResult out;
  out.folds = stratified_kfold(targets, k, spec.seed);
  out.confusion = ConfusionMatrix(names);
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<FeatureVector> train_rows;
    for (std::size_t g = 0; g < k; ++g) {
      if (g == f) continue;
      for (auto i : out.folds[g]) train_rows.push_back(table.rows()[i]);
    }
    const FeatureTable train(std::move(train_rows), table.subset());
    const auto model = train_classifier(train, spec, scenario);
    for (auto i : out.folds[f]) {
      const auto p = model.predict(table.row_values(i));
      const auto pred = std::find(names.begin(), names.end(), p.label) - names.begin();
      const auto truth =
          std::find(present.begin(), present.end(), targets[i]) - present.begin();
      out.confusion.add(static_cast<std::size_t>(truth), static_cast<std::size_t>(pred));
    }
  }
  std::optional<std::size_t> positive;
  if (scenario == Scenario::kBinary) {
    const auto it = std::find(names.begin(), names.end(), label_name(BinaryLabel::kSynthetic));
    if (it != names.end()) positive = static_cast<std::size_t>(it - names.begin());
  }
  out.metrics = metrics(out.confusion, positive);
  return out;
}

FeatureTable balance_classes(const FeatureTable& table, std::size_t per_class,
                             std::uint64_t seed) {
  if (per_class == 0) throw ConfigError("balance count must be positive");
  Rng rng(seed);
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < kNumClassLabels; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (static_cast<std::size_t>(table.rows()[i].label) == c) members.push_back(i);
    }
    if (members.empty()) continue;
    if (members.size() < per_class)
      throw ConfigError("class " + std::string(label_name(static_cast<ClassLabel>(c))) + " has " +
                        std::to_string(members.size()) + " rows, fewer than " +
                        std::to_string(per_class));
    shuffle(members, rng);
    keep.insert(keep.end(), members.begin(),
                members.begin() + static_cast<std::ptrdiff_t>(per_class));
  }
  std::sort(keep.begin(), keep.end());
  std::vector<FeatureVector> rows;
  for (auto i : keep) rows.push_back(table.rows()[i]);
  return FeatureTable(std::move(rows), table.subset());
}

json metrics_to_json(const MetricsReport& m) {
  json per = json::array();
  for (const auto& c : m.per_class) per.push_back(class_metrics_json(c));
  json j = {{"accuracy", m.accuracy},
            {"macro_precision", m.macro_precision},
            {"macro_recall", m.macro_recall},
            {"macro_f1", m.macro_f1},
            {"per_class", per}};
  if (m.positive) j["positive"] = class_metrics_json(*m.positive);
  return j;
}

json confusion_to_json(const ConfusionMatrix& cm) {
  return {{"classes", cm.classes}, {"counts", cm.counts}};
}

ConfusionMatrix confusion_from_json(const json& j) {
  ConfusionMatrix cm(j.at("classes").get<std::vector<std::string>>());
  cm.counts = j.at("counts").get<std::vector<std::vector<std::size_t>>>();
  if (cm.counts.size() != cm.classes.size()) throw Error("confusion matrix shape mismatch");
  for (const auto& row : cm.counts) {
    if (row.size() != cm.classes.size()) throw Error("confusion matrix shape mismatch");
  }
  return cm;
}

json model_to_json(const ClassifierModel& model, const std::string& config_hash,
                   const json& config) {
  return {{"format", kModelFormat},
          {"version", kModelFormatVersion},
          {"kind", algo_name(model.spec().kind)},
          {"spec", algo_spec_to_json(model.spec())},
          {"scenario", scenario_name(model.scenario())},
          {"subset", subset_name(model.subset())},
          {"classes", model.classes()},
          {"n_features", model.num_features()},
          {"params", model.impl().to_json()},
          {"config_hash", config_hash},
          {"config", config}};
}

ClassifierModel model_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != kModelFormat)
      throw IoError("not a classifier model file");
    if (j.at("version").get<int>() != kModelFormatVersion)
      throw IoError("unsupported model version " + std::to_string(j.at("version").get<int>()));
    const AlgoSpec spec = algo_spec_from_json(j.at("spec"));
    const auto scenario = parse_scenario(j.at("scenario").get<std::string>());
    const auto subset = parse_subset(j.at("subset").get<std::string>());
    if (!scenario || !subset) throw IoError("bad scenario or subset in model file");
    const auto n_features = j.at("n_features").get<std::size_t>();
    if (n_features != subset_columns(*subset).size())
      throw IoError("model feature count does not match its subset");
    std::shared_ptr<const Classifier> impl = classifier_from_json(spec.kind, j.at("params"));
    return ClassifierModel(spec, *scenario, *subset, j.at("classes").get<std::vector<std::string>>(),
                           n_features, std::move(impl));
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const ClassifierModel& model, const std::filesystem::path& path,
                const std::string& config_hash, const json& config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << model_to_json(model, config_hash, config).dump(1) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

LoadedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw IoError("malformed model file " + path.string() + ": " + e.what());
  }
  auto model = model_from_json(j);
  return {std::move(model), j.value("config_hash", std::string()), j.value("config", json())};
}

}  // namespace synthdetect
