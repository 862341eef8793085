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

#include "synthdetect/classifiers.h"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "synthdetect/errors.h"
#include "synthdetect/random.h"

namespace synthdetect {
namespace {

using nlohmann::json;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr std::pair<AlgoKind, std::string_view> kAlgoNames[] = {
    {AlgoKind::kDecisionTree, "decision_tree"},
    {AlgoKind::kLda, "lda"},
    {AlgoKind::kQda, "qda"},
    {AlgoKind::kGaussianNb, "gaussian_nb"},
    {AlgoKind::kLogisticRegression, "logistic_regression"},
    {AlgoKind::kWeightedKnn, "weighted_knn"},
    {AlgoKind::kBaggedTrees, "bagged_trees"},
    {AlgoKind::kRusBoostedTrees, "rus_boosted_trees"},
};

void check_training_set(const TrainingSet& data) {
  if (data.rows() == 0 || data.cols() == 0) throw TrainError("empty training set");
  if (data.y.size() != data.rows()) throw TrainError("label count does not match rows");
  if (data.n_classes == 0) throw TrainError("no classes");
  for (int y : data.y) {
    if (y < 0 || static_cast<std::size_t>(y) >= data.n_classes)
      throw TrainError("label out of range");
  }
  for (double v : data.x.values()) {
    if (!std::isfinite(v)) throw TrainError("non-finite feature value");
  }
}

std::vector<std::size_t> class_counts(const TrainingSet& data) {
  std::vector<std::size_t> counts(data.n_classes, 0);
  for (int y : data.y) ++counts[static_cast<std::size_t>(y)];
  return counts;
}

void require_all_classes(const TrainingSet& data) {
  for (std::size_t c : class_counts(data)) {
    if (c == 0) throw TrainError("a class has no training rows");
  }
}

void check_dims(std::span<const double> x, std::size_t d) {
  if (x.size() != d)
    throw PredictError("expected " + std::to_string(d) + " features, got " +
                       std::to_string(x.size()));
}

std::vector<double> softmax(std::vector<double> z) {
  const double m = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - m);
    sum += v;
  }
  for (double& v : z) v /= sum;
  return z;
}

// Column means and standard deviations; zero deviations become 1.
void standardizer(const RealMatrix& x, std::vector<double>& mean, std::vector<double>& scale) {
  const std::size_t n = x.rows(), d = x.cols();
  mean.assign(d, 0.0);
  scale.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) mean[j] += x(i, j);
  for (double& m : mean) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) scale[j] += (x(i, j) - mean[j]) * (x(i, j) - mean[j]);
  for (double& s : scale) {
    s = std::sqrt(s / static_cast<double>(n));
    if (!(s > 0.0)) s = 1.0;
  }
}

// Cholesky of cov + lambda I, raising lambda until it factors.
Eigen::LLT<MatrixXd> regularized_llt(MatrixXd cov) {
  const auto d = cov.rows();
  double lambda = std::max(1e-6 * cov.trace() / static_cast<double>(d), 1e-12);
  for (int attempt = 0; attempt < 12; ++attempt) {
    MatrixXd m = cov;
    m.diagonal().array() += lambda;
    Eigen::LLT<MatrixXd> llt(m);
    if (llt.info() == Eigen::Success) return llt;
    lambda *= 10.0;
  }
  throw TrainError("covariance matrix is not positive definite");
}

json matrix_json(const RealMatrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()},
          {"data", std::vector<double>(m.values().begin(), m.values().end())}};
}

RealMatrix matrix_from_json(const json& j) {
  RealMatrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  const auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != m.size()) throw Error("matrix payload size mismatch");
  std::copy(data.begin(), data.end(), m.values().begin());
  return m;
}

}  // namespace

std::string_view algo_name(AlgoKind kind) {
  for (const auto& [k, name] : kAlgoNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<AlgoKind> parse_algo(std::string_view text) {
  for (const auto& [k, name] : kAlgoNames) {
    if (name == text) return k;
  }
  return std::nullopt;
}

std::size_t argmax(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

// ---------------------------------------------------------------------------
// DecisionTree

DecisionTree DecisionTree::fit(const TrainingSet& data, const TreeParams& params,
                               std::span<const std::size_t> rows,
                               std::span<const double> weights) {
  check_training_set(data);
  if (params.max_depth < 0) throw ConfigError("max_depth must be non-negative");
  if (params.min_leaf == 0) throw ConfigError("min_leaf must be positive");
  if (!weights.empty() && weights.size() != data.rows())
    throw TrainError("weight count does not match rows");

  std::vector<std::size_t> all;
  if (rows.empty()) {
    all = iota_indices(data.rows());
    rows = all;
  }
  for (std::size_t r : rows) {
    if (r >= data.rows()) throw TrainError("row index out of range");
  }
  auto weight = [&](std::size_t r) { return weights.empty() ? 1.0 : weights[r]; };

  const std::size_t nc = data.n_classes;
  const std::size_t d = data.cols();
  DecisionTree tree;
  tree.n_classes_ = nc;

  std::function<int(std::vector<std::size_t>, int)> grow =
      [&](std::vector<std::size_t> idx, int depth) -> int {
    std::vector<double> counts(nc, 0.0);
    double total = 0.0;
    for (std::size_t r : idx) {
      counts[static_cast<std::size_t>(data.y[r])] += weight(r);
      total += weight(r);
    }
    const int node_id = static_cast<int>(tree.nodes_.size());
    tree.nodes_.emplace_back();
    {
      Node& node = tree.nodes_.back();
      node.distribution.assign(nc, 1.0 / static_cast<double>(nc));
      if (total > 0.0) {
        for (std::size_t c = 0; c < nc; ++c) node.distribution[c] = counts[c] / total;
      }
      node.label = static_cast<int>(argmax(node.distribution));
    }

    std::size_t nonzero = 0;
    for (double c : counts) nonzero += c > 0.0 ? 1 : 0;
    if (depth >= params.max_depth || nonzero <= 1 || idx.size() < 2 * params.min_leaf ||
        total <= 0.0) {
      return node_id;
    }

    double parent_sq = 0.0;
    for (double c : counts) parent_sq += c * c;
    const double parent_impurity = total - parent_sq / total;

    double best_impurity = std::numeric_limits<double>::infinity();
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::size_t> order(idx);
    std::vector<double> left(nc);
    for (std::size_t f = 0; f < d; ++f) {
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double va = data.x(a, f), vb = data.x(b, f);
        return va < vb || (va == vb && a < b);
      });
      std::fill(left.begin(), left.end(), 0.0);
      double wl = 0.0;
      for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        const std::size_t r = order[i];
        left[static_cast<std::size_t>(data.y[r])] += weight(r);
        wl += weight(r);
        const double a = data.x(r, f), b = data.x(order[i + 1], f);
        if (!(a < b)) continue;
        if (i + 1 < params.min_leaf || order.size() - i - 1 < params.min_leaf) continue;
        const double wr = total - wl;
        double sl = 0.0, sr = 0.0;
        for (std::size_t c = 0; c < nc; ++c) {
          sl += left[c] * left[c];
          const double rc = counts[c] - left[c];
          sr += rc * rc;
        }
        const double impurity = (wl > 0.0 ? wl - sl / wl : 0.0) + (wr > 0.0 ? wr - sr / wr : 0.0);
        if (impurity < best_impurity) {
          best_impurity = impurity;
          best_feature = static_cast<int>(f);
          double thr = a + (b - a) / 2.0;
          if (!(thr >= a && thr < b)) thr = a;
          best_threshold = thr;
        }
      }
    }
    if (best_feature < 0 || !(parent_impurity - best_impurity > 1e-12 * total)) return node_id;

    std::vector<std::size_t> li, ri;
    for (std::size_t r : idx) {
      (data.x(r, static_cast<std::size_t>(best_feature)) <= best_threshold ? li : ri).push_back(r);
    }
    idx.clear();
    idx.shrink_to_fit();
    const int l = grow(std::move(li), depth + 1);
    const int rgt = grow(std::move(ri), depth + 1);
    Node& node = tree.nodes_[static_cast<std::size_t>(node_id)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = l;
    node.right = rgt;
    return node_id;
  };
  grow(std::vector<std::size_t>(rows.begin(), rows.end()), 0);
  return tree;
}

std::size_t DecisionTree::leaf_index(std::span<const double> x) const {
  std::size_t i = 0;
  while (nodes_[i].feature >= 0) {
    const Node& n = nodes_[i];
    const auto f = static_cast<std::size_t>(n.feature);
    if (f >= x.size()) throw PredictError("feature index out of range");
    i = static_cast<std::size_t>(x[f] <= n.threshold ? n.left : n.right);
  }
  return i;
}

std::vector<double> DecisionTree::scores(std::span<const double> x) const {
  return nodes_[leaf_index(x)].distribution;
}

int DecisionTree::depth() const {
  std::function<int(int)> rec = [&](int i) -> int {
    const Node& n = nodes_[static_cast<std::size_t>(i)];
    if (n.feature < 0) return 0;
    return 1 + std::max(rec(n.left), rec(n.right));
  };
  return nodes_.empty() ? 0 : rec(0);
}

json DecisionTree::to_json() const {
  json nodes = json::array();
  for (const Node& n : nodes_) {
    nodes.push_back({{"feature", n.feature},
                     {"threshold", n.threshold},
                     {"left", n.left},
                     {"right", n.right},
                     {"label", n.label},
                     {"distribution", n.distribution}});
  }
  return {{"n_classes", n_classes_}, {"nodes", nodes}};
}

DecisionTree DecisionTree::from_json(const json& j) {
  DecisionTree t;
  t.n_classes_ = j.at("n_classes").get<std::size_t>();
  for (const auto& n : j.at("nodes")) {
    Node node;
    node.feature = n.at("feature").get<int>();
    node.threshold = n.at("threshold").get<double>();
    node.left = n.at("left").get<int>();
    node.right = n.at("right").get<int>();
    node.label = n.at("label").get<int>();
    node.distribution = n.at("distribution").get<std::vector<double>>();
    t.nodes_.push_back(std::move(node));
  }
  const auto count = static_cast<int>(t.nodes_.size());
  if (count == 0) throw Error("tree has no nodes");
  for (const Node& n : t.nodes_) {
    if (n.distribution.size() != t.n_classes_) throw Error("tree distribution size mismatch");
    if (n.feature >= 0 && (n.left <= 0 || n.left >= count || n.right <= 0 || n.right >= count))
      throw Error("tree child index out of range");
  }
  return t;
}

// ---------------------------------------------------------------------------
// Lda

Lda Lda::fit(const TrainingSet& data) {
  check_training_set(data);
  require_all_classes(data);
  const std::size_t n = data.rows(), d = data.cols(), nc = data.n_classes;
  const auto counts = class_counts(data);
  std::vector<VectorXd> means(nc, VectorXd::Zero(static_cast<Eigen::Index>(d)));
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(data.y[i]);
    for (std::size_t j = 0; j < d; ++j) means[c](static_cast<Eigen::Index>(j)) += data.x(i, j);
  }
  for (std::size_t c = 0; c < nc; ++c) means[c] /= static_cast<double>(counts[c]);

  MatrixXd cov = MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  VectorXd diff(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(data.y[i]);
    for (std::size_t j = 0; j < d; ++j)
      diff(static_cast<Eigen::Index>(j)) = data.x(i, j) - means[c](static_cast<Eigen::Index>(j));
    cov.noalias() += diff * diff.transpose();
  }
  cov /= static_cast<double>(n > nc ? n - nc : 1);
  const auto llt = regularized_llt(cov);

  Lda lda;
  for (std::size_t c = 0; c < nc; ++c) {
    const VectorXd w = llt.solve(means[c]);
    lda.coef_.emplace_back(w.data(), w.data() + w.size());
    lda.bias_.push_back(-0.5 * means[c].dot(w) +
                        std::log(static_cast<double>(counts[c]) / static_cast<double>(n)));
  }
  return lda;
}

std::vector<double> Lda::discriminants(std::span<const double> x) const {
  check_dims(x, coef_.front().size());
  std::vector<double> z(bias_);
  for (std::size_t c = 0; c < z.size(); ++c)
    for (std::size_t j = 0; j < x.size(); ++j) z[c] += coef_[c][j] * x[j];
  return z;
}

std::vector<double> Lda::scores(std::span<const double> x) const {
  return softmax(discriminants(x));
}

json Lda::to_json() const { return {{"coef", coef_}, {"bias", bias_}}; }

Lda Lda::from_json(const json& j) {
  Lda m;
  m.coef_ = j.at("coef").get<std::vector<std::vector<double>>>();
  m.bias_ = j.at("bias").get<std::vector<double>>();
  if (m.coef_.size() != m.bias_.size() || m.coef_.empty()) throw Error("malformed lda payload");
  return m;
}

// ---------------------------------------------------------------------------
// Qda

Qda Qda::fit(const TrainingSet& data) {
  check_training_set(data);
  require_all_classes(data);
  const std::size_t n = data.rows(), d = data.cols(), nc = data.n_classes;
  const auto di = static_cast<Eigen::Index>(d);
  const auto counts = class_counts(data);
  Qda q;
  for (std::size_t c = 0; c < nc; ++c) {
    VectorXd mean = VectorXd::Zero(di);
    for (std::size_t i = 0; i < n; ++i) {
      if (static_cast<std::size_t>(data.y[i]) != c) continue;
      for (std::size_t j = 0; j < d; ++j) mean(static_cast<Eigen::Index>(j)) += data.x(i, j);
    }
    mean /= static_cast<double>(counts[c]);
    MatrixXd cov = MatrixXd::Zero(di, di);
    VectorXd diff(di);
    for (std::size_t i = 0; i < n; ++i) {
      if (static_cast<std::size_t>(data.y[i]) != c) continue;
      for (std::size_t j = 0; j < d; ++j)
        diff(static_cast<Eigen::Index>(j)) = data.x(i, j) - mean(static_cast<Eigen::Index>(j));
      cov.noalias() += diff * diff.transpose();
    }
    cov /= static_cast<double>(counts[c] > 1 ? counts[c] - 1 : 1);
    const auto llt = regularized_llt(cov);
    const MatrixXd prec = llt.solve(MatrixXd::Identity(di, di));
    const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    q.means_.emplace_back(mean.data(), mean.data() + d);
    std::vector<double> p(d * d);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b)
        p[a * d + b] = prec(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    q.precisions_.push_back(std::move(p));
    q.offsets_.push_back(std::log(static_cast<double>(counts[c]) / static_cast<double>(n)) -
                         0.5 * logdet);
  }
  return q;
}

std::vector<double> Qda::scores(std::span<const double> x) const {
  const std::size_t d = means_.front().size();
  check_dims(x, d);
  std::vector<double> z(means_.size());
  std::vector<double> diff(d);
  for (std::size_t c = 0; c < z.size(); ++c) {
    for (std::size_t j = 0; j < d; ++j) diff[j] = x[j] - means_[c][j];
    double quad = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      double row = 0.0;
      for (std::size_t b = 0; b < d; ++b) row += precisions_[c][a * d + b] * diff[b];
      quad += diff[a] * row;
    }
    z[c] = offsets_[c] - 0.5 * quad;
  }
  return softmax(std::move(z));
}

json Qda::to_json() const {
  return {{"means", means_}, {"precisions", precisions_}, {"offsets", offsets_}};
}

Qda Qda::from_json(const json& j) {
  Qda q;
  q.means_ = j.at("means").get<std::vector<std::vector<double>>>();
  q.precisions_ = j.at("precisions").get<std::vector<std::vector<double>>>();
  q.offsets_ = j.at("offsets").get<std::vector<double>>();
  if (q.means_.empty() || q.means_.size() != q.precisions_.size() ||
      q.means_.size() != q.offsets_.size())
    throw Error("malformed qda payload");
  for (std::size_t c = 0; c < q.means_.size(); ++c) {
    const std::size_t d = q.means_.front().size();
    if (q.means_[c].size() != d || q.precisions_[c].size() != d * d)
      throw Error("malformed qda payload");
  }
  return q;
}

// ---------------------------------------------------------------------------
// GaussianNb

GaussianNb GaussianNb::fit(const TrainingSet& data) {
  check_training_set(data);
  require_all_classes(data);
  const std::size_t n = data.rows(), d = data.cols(), nc = data.n_classes;
  const auto counts = class_counts(data);
  GaussianNb m;
  m.means_.assign(nc, std::vector<double>(d, 0.0));
  m.variances_.assign(nc, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(data.y[i]);
    for (std::size_t j = 0; j < d; ++j) m.means_[c][j] += data.x(i, j);
  }
  for (std::size_t c = 0; c < nc; ++c)
    for (double& v : m.means_[c]) v /= static_cast<double>(counts[c]);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(data.y[i]);
    for (std::size_t j = 0; j < d; ++j) {
      const double e = data.x(i, j) - m.means_[c][j];
      m.variances_[c][j] += e * e;
    }
  }
  for (std::size_t c = 0; c < nc; ++c) {
    for (double& v : m.variances_[c]) v = std::max(v / static_cast<double>(counts[c]), kVarianceFloor);
    m.log_priors_.push_back(std::log(static_cast<double>(counts[c]) / static_cast<double>(n)));
  }
  return m;
}

std::vector<double> GaussianNb::scores(std::span<const double> x) const {
  const std::size_t d = means_.front().size();
  check_dims(x, d);
  std::vector<double> z(log_priors_);
  for (std::size_t c = 0; c < z.size(); ++c) {
    for (std::size_t j = 0; j < d; ++j) {
      const double e = x[j] - means_[c][j];
      z[c] -= 0.5 * (std::log(2.0 * M_PI * variances_[c][j]) + e * e / variances_[c][j]);
    }
  }
  return softmax(std::move(z));
}

json GaussianNb::to_json() const {
  return {{"means", means_}, {"variances", variances_}, {"log_priors", log_priors_}};
}

GaussianNb GaussianNb::from_json(const json& j) {
  GaussianNb m;
  m.means_ = j.at("means").get<std::vector<std::vector<double>>>();
  m.variances_ = j.at("variances").get<std::vector<std::vector<double>>>();
  m.log_priors_ = j.at("log_priors").get<std::vector<double>>();
  if (m.means_.empty() || m.means_.size() != m.variances_.size() ||
      m.means_.size() != m.log_priors_.size())
    throw Error("malformed gaussian_nb payload");
  return m;
}

// ---------------------------------------------------------------------------
// LogisticRegression

LogisticRegression LogisticRegression::fit(const TrainingSet& data, const LogisticParams& params) {
  check_training_set(data);
  if (!(params.learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (params.l2 < 0.0) throw ConfigError("l2 penalty must be non-negative");
  const std::size_t n = data.rows(), d = data.cols(), nc = data.n_classes;
  LogisticRegression m;
  standardizer(data.x, m.mean_, m.scale_);
  RealMatrix z(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) z(i, j) = (data.x(i, j) - m.mean_[j]) / m.scale_[j];

  m.weights_.assign(nc, std::vector<double>(d, 0.0));
  m.bias_.assign(nc, 0.0);
  std::vector<std::vector<double>> gw(nc, std::vector<double>(d));
  std::vector<double> gb(nc), logits(nc);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    for (std::size_t c = 0; c < nc; ++c) {
      for (std::size_t j = 0; j < d; ++j) gw[c][j] = params.l2 * m.weights_[c][j];
      gb[c] = 0.0;
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < nc; ++c) {
        double s = m.bias_[c];
        for (std::size_t j = 0; j < d; ++j) s += m.weights_[c][j] * z(i, j);
        logits[c] = s;
      }
      const auto p = softmax(logits);
      for (std::size_t c = 0; c < nc; ++c) {
        const double e = (p[c] - (static_cast<std::size_t>(data.y[i]) == c ? 1.0 : 0.0)) * inv_n;
        gb[c] += e;
        for (std::size_t j = 0; j < d; ++j) gw[c][j] += e * z(i, j);
      }
    }
    for (std::size_t c = 0; c < nc; ++c) {
      m.bias_[c] -= params.learning_rate * gb[c];
      for (std::size_t j = 0; j < d; ++j) m.weights_[c][j] -= params.learning_rate * gw[c][j];
    }
  }
  return m;
}

std::vector<double> LogisticRegression::scores(std::span<const double> x) const {
  check_dims(x, mean_.size());
  std::vector<double> z(bias_);
  for (std::size_t c = 0; c < z.size(); ++c)
    for (std::size_t j = 0; j < x.size(); ++j)
      z[c] += weights_[c][j] * (x[j] - mean_[j]) / scale_[j];
  return softmax(std::move(z));
}

json LogisticRegression::to_json() const {
  return {{"mean", mean_}, {"scale", scale_}, {"weights", weights_}, {"bias", bias_}};
}

LogisticRegression LogisticRegression::from_json(const json& j) {
  LogisticRegression m;
  m.mean_ = j.at("mean").get<std::vector<double>>();
  m.scale_ = j.at("scale").get<std::vector<double>>();
  m.weights_ = j.at("weights").get<std::vector<std::vector<double>>>();
  m.bias_ = j.at("bias").get<std::vector<double>>();
  if (m.bias_.empty() || m.weights_.size() != m.bias_.size() || m.mean_.size() != m.scale_.size())
    throw Error("malformed logistic_regression payload");
  for (const auto& w : m.weights_) {
    if (w.size() != m.mean_.size()) throw Error("malformed logistic_regression payload");
  }
  return m;
}

// ---------------------------------------------------------------------------
// WeightedKnn

WeightedKnn WeightedKnn::fit(const TrainingSet& data, const KnnParams& params) {
  check_training_set(data);
  if (params.k == 0) throw ConfigError("k must be positive");
  WeightedKnn m;
  m.k_ = params.k;
  m.n_classes_ = data.n_classes;
  const std::size_t n = data.rows(), d = data.cols();
  if (params.standardize) {
    standardizer(data.x, m.mean_, m.scale_);
  } else {
    m.mean_.assign(d, 0.0);
    m.scale_.assign(d, 1.0);
  }
  m.points_ = RealMatrix(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) m.points_(i, j) = (data.x(i, j) - m.mean_[j]) / m.scale_[j];
  m.labels_ = data.y;
  return m;
}

std::vector<double> WeightedKnn::scores(std::span<const double> x) const {
  const std::size_t d = mean_.size();
  check_dims(x, d);
  const std::size_t n = points_.rows();
  std::vector<double> q(d);
  for (std::size_t j = 0; j < d; ++j) q[j] = (x[j] - mean_[j]) / scale_[j];
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double e = points_(i, j) - q[j];
      s += e * e;
    }
    dist[i] = {std::sqrt(s), i};
  }
  const std::size_t k = std::min(k_, n);
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
  std::vector<double> votes(n_classes_, 0.0);
  if (dist.front().first == 0.0) {
    for (std::size_t i = 0; i < k && dist[i].first == 0.0; ++i)
      votes[static_cast<std::size_t>(labels_[dist[i].second])] += 1.0;
  } else {
    for (std::size_t i = 0; i < k; ++i)
      votes[static_cast<std::size_t>(labels_[dist[i].second])] += 1.0 / dist[i].first;
  }
  const double total = std::accumulate(votes.begin(), votes.end(), 0.0);
  for (double& v : votes) v /= total;
  return votes;
}

json WeightedKnn::to_json() const {
  return {{"k", k_},          {"n_classes", n_classes_},         {"mean", mean_},
          {"scale", scale_},  {"points", matrix_json(points_)}, {"labels", labels_}};
}

WeightedKnn WeightedKnn::from_json(const json& j) {
  WeightedKnn m;
  m.k_ = j.at("k").get<std::size_t>();
  m.n_classes_ = j.at("n_classes").get<std::size_t>();
  m.mean_ = j.at("mean").get<std::vector<double>>();
  m.scale_ = j.at("scale").get<std::vector<double>>();
  m.points_ = matrix_from_json(j.at("points"));
  m.labels_ = j.at("labels").get<std::vector<int>>();
  if (m.k_ == 0 || m.points_.rows() == 0 || m.points_.cols() != m.mean_.size() ||
      m.labels_.size() != m.points_.rows())
    throw Error("malformed weighted_knn payload");
  for (int y : m.labels_) {
    if (y < 0 || static_cast<std::size_t>(y) >= m.n_classes_)
      throw Error("malformed weighted_knn payload");
  }
  return m;
}

// ---------------------------------------------------------------------------
// BaggedTrees

BaggedTrees BaggedTrees::fit(const TrainingSet& data, const BaggingParams& params) {
  check_training_set(data);
  if (params.n_bags == 0) throw ConfigError("n_bags must be positive");
  BaggedTrees m;
  m.n_classes_ = data.n_classes;
  const std::size_t n = data.rows();
  std::vector<std::size_t> rows(n);
  for (std::size_t b = 0; b < params.n_bags; ++b) {
    Rng rng(derive_seed(params.seed, b));
    if (params.bootstrap) {
      for (auto& r : rows) r = uniform_index(rng, n);
    } else {
      rows = iota_indices(n);
    }
    m.trees_.push_back(DecisionTree::fit(data, params.tree, rows));
  }
  return m;
}

std::vector<double> BaggedTrees::scores(std::span<const double> x) const {
  std::vector<double> votes(n_classes_, 0.0);
  for (const auto& t : trees_) votes[static_cast<std::size_t>(t.predict_label(x))] += 1.0;
  for (double& v : votes) v /= static_cast<double>(trees_.size());
  return votes;
}

json BaggedTrees::to_json() const {
  json trees = json::array();
  for (const auto& t : trees_) trees.push_back(t.to_json());
  return {{"n_classes", n_classes_}, {"trees", trees}};
}

BaggedTrees BaggedTrees::from_json(const json& j) {
  BaggedTrees m;
  m.n_classes_ = j.at("n_classes").get<std::size_t>();
  for (const auto& t : j.at("trees")) m.trees_.push_back(DecisionTree::from_json(t));
  if (m.trees_.empty()) throw Error("bagged_trees payload has no trees");
  return m;
}

// ---------------------------------------------------------------------------
// RusBoostedTrees

RusBoostedTrees RusBoostedTrees::fit(const TrainingSet& data, const BoostingParams& params) {
  check_training_set(data);
  if (params.rounds == 0) throw ConfigError("boosting rounds must be positive");
  const std::size_t n = data.rows(), nc = data.n_classes;
  std::vector<std::vector<std::size_t>> by_class(nc);
  for (std::size_t i = 0; i < n; ++i) by_class[static_cast<std::size_t>(data.y[i])].push_back(i);
  std::size_t minority = n;
  for (const auto& rows : by_class) {
    if (!rows.empty()) minority = std::min(minority, rows.size());
  }

  RusBoostedTrees m;
  m.n_classes_ = nc;
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  for (std::size_t t = 0; t < params.rounds; ++t) {
    Rng rng(derive_seed(params.seed, t));
    std::vector<std::size_t> sample;
    std::vector<std::size_t> counts(nc, 0);
    for (std::size_t c = 0; c < nc; ++c) {
      std::vector<std::size_t> rows = by_class[c];
      shuffle(rows, rng);
      const std::size_t take = std::min(minority, rows.size());
      sample.insert(sample.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(take));
      counts[c] = take;
    }
    std::sort(sample.begin(), sample.end());
    DecisionTree tree = DecisionTree::fit(data, params.tree, sample, w);

    std::vector<bool> wrong(n);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      wrong[i] = tree.predict_label(data.x.row(i)) != data.y[i];
      if (wrong[i]) err += w[i];
    }
    if (err >= 0.5) {
      if (m.trees_.empty()) {
        m.trees_.push_back(std::move(tree));
        m.alphas_.push_back(1.0);
        m.round_class_counts_.push_back(counts);
      }
      break;
    }
    const bool perfect = err <= 1e-10;
    err = std::max(err, 1e-10);
    const double alpha = std::log((1.0 - err) / err);
    m.trees_.push_back(std::move(tree));
    m.alphas_.push_back(alpha);
    m.round_class_counts_.push_back(counts);
    if (perfect) break;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (wrong[i]) w[i] *= std::exp(alpha);
      total += w[i];
    }
    for (double& v : w) v /= total;
  }
  return m;
}

std::vector<double> RusBoostedTrees::scores(std::span<const double> x) const {
  std::vector<double> votes(n_classes_, 0.0);
  double total = 0.0;
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    votes[static_cast<std::size_t>(trees_[t].predict_label(x))] += alphas_[t];
    total += alphas_[t];
  }
  for (double& v : votes) v /= total;
  return votes;
}

json RusBoostedTrees::to_json() const {
  json trees = json::array();
  for (const auto& t : trees_) trees.push_back(t.to_json());
  return {{"n_classes", n_classes_},
          {"trees", trees},
          {"alphas", alphas_},
          {"round_class_counts", round_class_counts_}};
}

RusBoostedTrees RusBoostedTrees::from_json(const json& j) {
  RusBoostedTrees m;
  m.n_classes_ = j.at("n_classes").get<std::size_t>();
  for (const auto& t : j.at("trees")) m.trees_.push_back(DecisionTree::from_json(t));
  m.alphas_ = j.at("alphas").get<std::vector<double>>();
  m.round_class_counts_ = j.at("round_class_counts").get<std::vector<std::vector<std::size_t>>>();
  if (m.trees_.empty() || m.alphas_.size() != m.trees_.size())
    throw Error("malformed rus_boosted_trees payload");
  return m;
}

// ---------------------------------------------------------------------------

std::unique_ptr<Classifier> classifier_from_json(AlgoKind kind, const json& j) {
  switch (kind) {
    case AlgoKind::kDecisionTree:
      return std::make_unique<DecisionTree>(DecisionTree::from_json(j));
    case AlgoKind::kLda:
      return std::make_unique<Lda>(Lda::from_json(j));
    case AlgoKind::kQda:
      return std::make_unique<Qda>(Qda::from_json(j));
    case AlgoKind::kGaussianNb:
      return std::make_unique<GaussianNb>(GaussianNb::from_json(j));
    case AlgoKind::kLogisticRegression:
      return std::make_unique<LogisticRegression>(LogisticRegression::from_json(j));
    case AlgoKind::kWeightedKnn:
      return std::make_unique<WeightedKnn>(WeightedKnn::from_json(j));
    case AlgoKind::kBaggedTrees:
      return std::make_unique<BaggedTrees>(BaggedTrees::from_json(j));
    case AlgoKind::kRusBoostedTrees:
      return std::make_unique<RusBoostedTrees>(RusBoostedTrees::from_json(j));
  }
  throw Error("unknown classifier kind");
}

}  // namespace synthdetect
