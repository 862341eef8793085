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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances are fixed below.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gradcheck.h"
#include "oracles.h"
#include "synthdetect/bispectral.h"
#include "synthdetect/cepstral.h"
#include "synthdetect/classical_ml.h"
#include "synthdetect/corpus.h"
#include "synthdetect/crnn.h"
#include "synthdetect/errors.h"
#include "synthdetect/features.h"
#include "synthdetect/pipeline.h"
#include "synthdetect/spectral.h"

namespace synthdetect {
namespace {

namespace fs = std::filesystem;

constexpr double kTransformTol = 1e-9;
constexpr double kTransformBudgetS = 30.0;
constexpr double kCoupledMin = 0.9;
constexpr double kRandomMax = 0.3;
constexpr std::size_t kBicoSegments = 100;
constexpr std::size_t kBicoTrials = 50;
constexpr double kBicoBudgetS = 60.0;
constexpr double kScaleTol = 1e-9;
constexpr std::size_t kPropertySignals = 100;
constexpr double kMomentRelTol = 1e-12;
constexpr double kAffineTol = 1e-9;
constexpr std::size_t kCorpusClips = 400;
constexpr double kCvAccuracyMin = 0.95;
constexpr double kCorpusBudgetS = 300.0;
constexpr double kF1Tol = 1e-9;
constexpr double kGradRelTol = 1e-4;
constexpr double kGradBudgetS = 120.0;
constexpr std::size_t kToyImages = 32;
constexpr std::size_t kToyEpochs = 200;
constexpr double kToyBudgetS = 180.0;
constexpr std::size_t kProbeClips = 20;

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail = what;
      pass = false;
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("synthdetect_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// Shared between the corpus criteria.
struct CorpusState {
  bool ready = false;
  FeatureTable table;
  double extract_seconds = 0.0;
  std::string error;
};

CorpusState& corpus() {
  static CorpusState state;
  if (state.ready || !state.error.empty()) return state;
  try {
    const auto t0 = Clock::now();
    CommandContext ctx;
    ctx.config.set_seed(2026);
    std::ostringstream sink;
    ctx.out = &sink;
    ctx.err = &sink;
    const fs::path dir = scratch_dir() / "corpus";
    if (cmd_synth(ctx, dir, kCorpusClips, 2) != 0) throw Error("synth failed: " + sink.str());
    if (cmd_extract(ctx, dir / "manifest.csv", dir / "features.csv") != 0) {
      throw Error("extract failed: " + sink.str());
    }
    std::ifstream f(dir / "features.csv");
    state.table = read_feature_csv(f).table;
    state.extract_seconds = seconds_since(t0);
    state.ready = true;
  } catch (const std::exception& e) {
    state.error = e.what();
  }
  return state;
}

Outcome c1_transforms() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<std::size_t> len(4, 1024);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = trial < 2 ? (trial == 0 ? 4 : 1024) : len(rng);
    const auto x = oracle::uniform_vector(n, rng);
    const auto fast = dft(x);
    const auto slow = oracle::naive_dft(x);
    for (std::size_t k = 0; k < n; ++k) worst = std::max(worst, std::abs(fast.bins[k] - slow[k]));
    const auto c = dct_ii(x);
    const auto cref = oracle::naive_dct(x);
    for (std::size_t k = 0; k < n; ++k) worst = std::max(worst, std::abs(c[k] - cref[k]));
  }
  const double t = seconds_since(t0);
  o.require(worst <= kTransformTol, "max abs error " + fmt("%.3e", worst));
  o.require(t < kTransformBudgetS, "runtime " + fmt("%.1f s", t));
  if (o.pass) o.detail = "max abs error " + fmt("%.2e", worst) + " over 200 vectors, " + fmt("%.1f s", t);
  return o;
}

// Normalized bicoherence at one cell: |sum_k B_k / |B_k|| / K.
double unit_bicoherence_at(const std::vector<std::vector<double>>& segs, std::size_t k1,
                           std::size_t k2, std::size_t grid) {
  Complex acc{};
  for (const auto& s : segs) {
    const Complex b = bispectrum_segment(s, grid)(k1, k2);
    if (std::abs(b) > 0.0) acc += b / std::abs(b);
  }
  return std::abs(acc) / static_cast<double>(segs.size());
}

Outcome c2_bicoherence() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(202);
  double min_coupled = 1.0, max_random = 0.0;
  for (std::size_t trial = 0; trial < kBicoTrials; ++trial) {
    const std::size_t k1 = 3 + trial % 7, k2 = 11 + trial % 5;
    const auto coupled = oracle::triad_segments(kBicoSegments, 128, k1, k2, true, rng);
    const auto random = oracle::triad_segments(kBicoSegments, 128, k1, k2, false, rng);
    min_coupled = std::min(min_coupled, unit_bicoherence_at(coupled, k1, k2, 32));
    max_random = std::max(max_random, unit_bicoherence_at(random, k1, k2, 32));
  }
  const double t = seconds_since(t0);
  o.require(min_coupled >= kCoupledMin, "min coupled " + fmt("%.4f", min_coupled));
  o.require(max_random < kRandomMax, "max randomised " + fmt("%.4f", max_random));
  o.require(t < kBicoBudgetS, "runtime " + fmt("%.1f s", t));
  if (o.pass) {
    o.detail = "coupled min " + fmt("%.4f", min_coupled) + ", randomised max " +
               fmt("%.4f", max_random) + " over 50 trials, " + fmt("%.1f s", t);
  }
  return o;
}

Outcome c3_grid_invariants() {
  Outcome o;
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<std::size_t> extra(0, 3000);
  BispectralConfig cfg;
  double worst_scale = 0.0;
  for (std::size_t s = 0; s < kPropertySignals; ++s) {
    const std::size_t n = cfg.segments * 2 * cfg.grid_size + extra(rng);
    std::vector<double> x = oracle::uniform_vector(n, rng);
    const auto a = normalized_bicoherence(AudioClip(x, 16000), cfg);
    // c = 2 is exact in binary; c = 0.3 exercises rounding as well.
    for (double c : {2.0, 0.3}) {
      std::vector<double> xc(x);
      for (auto& v : xc) v *= c;
      const auto b = normalized_bicoherence(AudioClip(xc, 16000), cfg);
      for (std::size_t i = 0; i < a.magnitude.size(); ++i) {
        worst_scale = std::max(worst_scale, std::abs(a.magnitude.values()[i] - b.magnitude.values()[i]));
      }
    }
    for (const RealMatrix* m : {&a.magnitude, &a.phase}) {
      for (double v : m->values()) o.require(v >= 0.0 && v <= 1.0, "value outside [0,1]");
      for (std::size_t k1 = 0; k1 < m->rows(); ++k1)
        for (std::size_t k2 = 0; k2 < k1; ++k2)
          o.require((*m)(k1, k2) == (*m)(k2, k1), "asymmetric cell");
    }
  }
  o.require(worst_scale <= kScaleTol, "scaling difference " + fmt("%.3e", worst_scale));
  if (o.pass) o.detail = "100 signals, worst scaling difference (c=2, 0.3) " + fmt("%.2e", worst_scale);
  return o;
}

Outcome c4_moments() {
  Outcome o;
  std::mt19937_64 rng(404);
  double worst_rel = 0.0;
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1.0); };
  for (std::size_t n : {2u, 3u, 5u, 17u, 100u, 1000u, 10000u, 100000u}) {
    std::gamma_distribution<double> g(2.0, 1.5);
    std::vector<double> x(n);
    for (auto& v : x) v = g(rng) - 1.0;
    const Moments m = moments(x);
    const auto ref = oracle::brute_moments(x);
    worst_rel = std::max({worst_rel, rel(m.mean, ref.mean), rel(m.variance, ref.variance),
                          rel(m.skewness, ref.skewness), rel(m.kurtosis, ref.kurtosis)});
  }
  o.require(worst_rel <= kMomentRelTol, "oracle relative error " + fmt("%.3e", worst_rel));

  double worst_affine = 0.0;
  const auto x = oracle::uniform_vector(777, rng, -2.0, 5.0);
  const Moments mx = moments(x);
  for (const auto& [a, b] : std::vector<std::pair<double, double>>{{2.0, 1.0}, {-3.5, 4.0}, {0.01, -9.0}}) {
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = a * x[i] + b;
    const Moments my = moments(y);
    worst_affine = std::max({worst_affine, std::abs(my.skewness - (a > 0 ? 1 : -1) * mx.skewness),
                             std::abs(my.kurtosis - mx.kurtosis)});
  }
  o.require(worst_affine <= kAffineTol, "affine difference " + fmt("%.3e", worst_affine));

  const Moments flat = moments(std::vector<double>(9, 3.25));
  o.require(flat.mean == 3.25 && flat.variance == 0.0 && flat.skewness == 0.0 && flat.kurtosis == 0.0,
            "constant input did not give zero variance, skewness and kurtosis");
  if (o.pass) {
    o.detail = "oracle rel " + fmt("%.2e", worst_rel) + ", affine " + fmt("%.2e", worst_affine) +
               ", sigma=0 rule holds";
  }
  return o;
}

Outcome c5_dimensionality() {
  Outcome o;
  const auto& c = corpus();
  o.require(c.ready, "corpus: " + c.error);
  if (!c.ready) return o;
  o.require(c.table.size() == kCorpusClips, "rows " + std::to_string(c.table.size()));
  for (const auto& row : c.table.rows()) {
    o.require(row.values.size() == kNumFeatures, "row width");
    for (double v : row.values) o.require(std::isfinite(v), "non-finite feature");
    o.require(row.label == ClassLabel::kHuman || row.label == ClassLabel::kNaturalReader, "label");
  }
  // Direct extraction on a few clips agrees with the table width.
  for (int i = 0; i < 3; ++i) {
    const auto fv = extract_feature_vector(synth_clip(static_cast<ClassLabel>(i), 77 + i), ClassLabel::kHuman,
                                           FeatureConfig{});
    o.require(fv.values.size() == 14, "direct extraction width");
  }
  std::ostringstream csv;
  write_feature_csv(csv, FeatureTable({c.table.rows().front()}));
  std::string header;
  std::istringstream in(csv.str());
  std::getline(in, header);
  o.require(std::count(header.begin(), header.end(), ',') == 14, "CSV header is not 14 values + label");
  if (o.pass) o.detail = std::to_string(c.table.size()) + " rows, 14 finite values + label each";
  return o;
}

Outcome c6_corpus_cv() {
  Outcome o;
  const auto& c = corpus();
  o.require(c.ready, "corpus: " + c.error);
  if (!c.ready) return o;
  const auto t0 = Clock::now();
  AlgoSpec spec;
  spec.kind = AlgoKind::kRusBoostedTrees;
  spec.seed = 2026;
  const auto cv = cross_validate(c.table, spec, Scenario::kBinary, 5);
  const double t = c.extract_seconds + seconds_since(t0);
  o.require(cv.confusion.total() == kCorpusClips, "confusion total");
  o.require(cv.metrics.accuracy >= kCvAccuracyMin, "accuracy " + fmt("%.4f", cv.metrics.accuracy));
  o.require(t < kCorpusBudgetS, "runtime " + fmt("%.1f s", t));
  if (o.pass) {
    o.detail = "5-fold rus_boosted_trees accuracy " + fmt("%.4f", cv.metrics.accuracy) + ", " +
               fmt("%.1f s", t) + " end to end";
  }
  return o;
}

Outcome c7_metrics() {
  Outcome o;
  const double f1 = f1_score(0.9, 0.95);
  o.require(std::abs(f1 - 1.71 / 1.85) <= kF1Tol, "F1(0.9, 0.95) = " + fmt("%.12f", f1));
  o.require(std::abs(f1 - 0.92432) <= 5e-6, "F1(0.9, 0.95) does not round to 0.92432");
  o.require(f1_score(0.95, 0.9) == f1, "F1 not symmetric");
  o.require(precision_score(0, 0) == 0.0, "precision 0/0");
  o.require(recall_score(0, 0) == 0.0, "recall 0/0");
  o.require(f1_score(0.0, 0.0) == 0.0, "F1 with p+r=0");
  o.require(precision_score(0, 4) == 0.0 && recall_score(0, 4) == 0.0, "TP=0 conventions");
  o.require(std::abs(precision_score(9, 1) - 0.9) <= kF1Tol, "precision 9/10");
  o.require(std::abs(recall_score(19, 1) - 0.95) <= kF1Tol, "recall 19/20");

  ConfusionMatrix diag({"Human", "Synthetic"});
  diag.counts = {{7, 0}, {0, 5}};
  const auto md = metrics(diag, 1);
  o.require(md.accuracy == 1.0 && md.macro_f1 == 1.0 && md.positive && md.positive->f1 == 1.0,
            "perfect matrix");

  ConfusionMatrix none({"Human", "Synthetic"});
  none.counts = {{0, 3}, {4, 0}};  // TP=0 with FP>0 and FN>0 for both classes
  const auto mn = metrics(none, 1);
  for (const auto& c : mn.per_class) {
    o.require(c.precision == 0.0 && c.recall == 0.0 && c.f1 == 0.0, "TP=0 matrix");
  }
  ConfusionMatrix absent({"Human", "Synthetic"});
  absent.counts = {{6, 0}, {0, 0}};  // class never present nor predicted
  const auto ma = metrics(absent, 1);
  o.require(ma.positive && ma.positive->precision == 0.0 && ma.positive->recall == 0.0 &&
                ma.positive->f1 == 0.0,
            "0/0 class");
  if (o.pass) o.detail = "F1(0.9, 0.95) = " + fmt("%.9f", f1) + ", zero conventions hold";
  return o;
}

Outcome c8_cv_contract() {
  Outcome o;
  for (std::size_t n : {5u, 23u, 100u, 401u}) {
    const auto folds = kfold_split(n, 5, 9);
    std::vector<int> seen(n, 0);
    std::size_t lo = n, hi = 0;
    for (const auto& f : folds) {
      lo = std::min(lo, f.size());
      hi = std::max(hi, f.size());
      for (auto i : f) ++seen.at(i);
    }
    o.require(folds.size() == 5, "fold count");
    o.require(std::all_of(seen.begin(), seen.end(), [](int v) { return v == 1; }), "not a partition");
    o.require(hi - lo <= 1, "fold sizes differ by more than 1");
    o.require(kfold_split(n, 5, 9) == folds, "kfold not deterministic");
  }
  std::mt19937_64 rng(808);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> targets;
    std::map<int, std::size_t> counts;
    const int classes = 2 + trial % 3;
    for (int c = 0; c < classes; ++c) {
      const std::size_t m = 5 + rng() % 60;
      counts[c] = m;
      targets.insert(targets.end(), m, c);
    }
    std::shuffle(targets.begin(), targets.end(), rng);
    const auto folds = stratified_kfold(targets, 5, 40 + trial);
    std::vector<int> seen(targets.size(), 0);
    std::size_t lo = targets.size(), hi = 0;
    for (const auto& f : folds) {
      lo = std::min(lo, f.size());
      hi = std::max(hi, f.size());
      std::map<int, std::size_t> in_fold;
      for (auto i : f) {
        ++seen.at(i);
        ++in_fold[targets[i]];
      }
      for (const auto& [c, m] : counts) {
        const double expected = static_cast<double>(m) / 5.0;
        o.require(std::abs(static_cast<double>(in_fold[c]) - expected) < 1.0, "class ratio drift");
      }
    }
    o.require(std::all_of(seen.begin(), seen.end(), [](int v) { return v == 1; }),
              "stratified folds not a partition");
    o.require(hi - lo <= 1, "stratified fold sizes differ by more than 1");
    o.require(stratified_kfold(targets, 5, 40 + trial) == folds, "stratified not deterministic");
  }
  bool threw = false;
  try {
    stratified_kfold(std::vector<int>{0, 0, 0, 0, 0, 1, 1}, 5, 1);
  } catch (const ConfigError&) {
    threw = true;
  }
  o.require(threw, "infeasible stratification accepted");
  if (o.pass) o.detail = "partition, size balance, class ratios and seeding hold";
  return o;
}

CrnnConfig tiny_crnn() {
  CrnnConfig c;
  c.conv1_filters = 2;
  c.conv2_filters = 3;
  c.lstm1_hidden = 3;
  c.lstm2_hidden = 2;
  c.dense_units = 4;
  c.zero_init_output = false;
  return c;
}

Outcome c9_gradients() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(909);
  const std::vector<std::pair<LayerSpec, Shape>> layers = {
      {LayerSpec::resize(5, 3), {2, 4, 6, 2}},
      {LayerSpec::normalize(), {2, 3, 3, 1}},
      {LayerSpec::conv(3, 3), {2, 6, 5, 2}},
      {LayerSpec::maxpool(2), {2, 4, 6, 2}},
      {LayerSpec::dropout(0.25), {2, 3, 3, 2}},
      {LayerSpec::squeeze_to_sequence(), {2, 3, 2, 2}},
      {LayerSpec::bilstm(3), {2, 4, 3}},
      {LayerSpec::flatten(), {2, 3, 4}},
      {LayerSpec::dense(4, Activation::kRelu), {2, 5}},
      {LayerSpec::dense(3), {2, 5}},
      {LayerSpec::softmax(), {2, 4}}};
  double worst_layer = 0.0;
  for (const auto& [spec, shape] : layers) {
    const auto r = gradcheck::check_layer(spec, shape, rng, true, 5);
    worst_layer = std::max(worst_layer, r.max_rel_error);
    o.require(r.checked > 0, std::string("nothing checked for ") + std::string(layer_kind_name(spec.kind)));
    o.require(r.max_rel_error < kGradRelTol, std::string(layer_kind_name(spec.kind)) + " rel error " +
                                                 fmt("%.3e", r.max_rel_error));
  }
  double worst_net = 0.0;
  std::size_t checked = 0;
  for (std::size_t nc : {2u, 4u}) {
    auto net = build_crnn32(nc, tiny_crnn(), 31 + nc);
    const Tensor x({2, 32, 32, 1}, gradcheck::random_values(2 * 32 * 32, rng, 0.5));
    const auto r = gradcheck::check_network(net, x, {0, static_cast<int>(nc) - 1}, 7, 1, rng);
    o.require(r.checked == net.num_params(), "tiny stack not fully checked");
    worst_net = std::max(worst_net, r.max_rel_error);
    checked += r.checked;
  }
  {
    CrnnConfig full;
    full.zero_init_output = false;
    auto net = build_crnn32(2, full, 37);
    const Tensor x({2, 32, 32, 1}, gradcheck::random_values(2 * 32 * 32, rng, 0.5));
    const auto r = gradcheck::check_network(net, x, {0, 1}, 8, 2999, rng);
    worst_net = std::max(worst_net, r.max_rel_error);
    checked += r.checked;
  }
  const double t = seconds_since(t0);
  o.require(worst_net < kGradRelTol, "network rel error " + fmt("%.3e", worst_net));
  o.require(t < kGradBudgetS, "runtime " + fmt("%.1f s", t));
  if (o.pass) {
    o.detail = "layers max " + fmt("%.2e", worst_layer) + ", stack max " + fmt("%.2e", worst_net) +
               " over " + std::to_string(checked) + " params, " + fmt("%.1f s", t);
  }
  return o;
}

Dataset toy_images(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> level(0.2, 0.8);
  Dataset d;
  d.images = Tensor({n, 32, 32, 1});
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    const double a = level(rng);
    for (std::size_t r = 0; r < 32; ++r)
      for (std::size_t c = 0; c < 32; ++c)
        d.images[(i * 32 + r) * 32 + c] = label == 0 ? a : ((r + c) % 2 == 0 ? 1.0 : 0.0);
    d.labels.push_back(label);
  }
  return d;
}

Outcome c10_capacity() {
  Outcome o;
  for (std::size_t nc : {2u, 4u}) {
    const auto net = build_crnn32(nc);
    const auto& s = net.shapes();
    o.require(net.input_shape() == Shape{32, 32, 1}, "input shape");
    o.require(s.at(0) == Shape{32, 32, 1}, "resize shape");
    o.require(s.at(2) == Shape{30, 30, 32}, "conv1 shape " + shape_string(s.at(2)));
    o.require(s.at(3) == Shape{28, 28, 64}, "conv2 shape " + shape_string(s.at(3)));
    o.require(s.at(4) == Shape{14, 14, 64}, "pool shape " + shape_string(s.at(4)));
    o.require(s.at(6).size() == 3 && s.at(6)[0] == 12 && s.at(6)[1] == 12, "conv3 shape");
    o.require(s.at(7).size() == 2 && s.at(7)[0] == 12, "sequence shape " + shape_string(s.at(7)));
    o.require(s.at(10).size() == 1, "flatten shape");
    o.require(s.back() == Shape{nc}, "output shape");
  }
  const auto t0 = Clock::now();
  const Dataset data = toy_images(kToyImages, 1010);
  TrainConfig cfg;
  cfg.epochs = kToyEpochs;
  cfg.batch_size = 8;
  cfg.seed = 1011;
  cfg.target_train_accuracy = 1.0;
  auto a = build_crnn32(2, {}, 1012);
  auto b = build_crnn32(2, {}, 1012);
  const auto ha = train(a, data, nullptr, cfg);
  const auto hb = train(b, data, nullptr, cfg);
  const double t = seconds_since(t0) / 2.0;
  const double acc = evaluate(a, data).accuracy;
  o.require(!ha.empty() && ha.size() <= kToyEpochs, "epoch count");
  o.require(acc == 1.0, "training accuracy " + fmt("%.4f", acc));
  o.require(a.param_hash() == b.param_hash() && ha.size() == hb.size(), "runs differ under one seed");
  o.require(t < kToyBudgetS, "runtime " + fmt("%.1f s", t));
  if (o.pass) {
    o.detail = "100% after " + std::to_string(ha.size()) + " epochs, repeat run identical, shape chain ok, " +
               fmt("%.1f s", t) + " per run";
  }
  return o;
}

Outcome c11_persistence() {
  Outcome o;
  const auto& c = corpus();
  o.require(c.ready, "corpus: " + c.error);
  if (!c.ready) return o;
  const fs::path dir = scratch_dir() / "probe";
  const auto entries = write_synth_corpus(dir, kProbeClips, 2, 1111);
  PipelineConfig cfg;
  std::vector<AudioClip> clips;
  FeatureTable probe;
  for (const auto& e : entries) {
    clips.push_back(read_wav_file(dir / e.path));
    probe.add(clip_features(clips.back(), e.label, cfg).at(0));
  }

  // Feature CSV.
  std::stringstream csv;
  write_feature_csv(csv, probe, {{"config_hash", config_hash(cfg)}});
  const FeatureCsv back = read_feature_csv(csv);
  o.require(back.table.rows() == probe.rows(), "feature CSV values differ after reload");

  // Classical model files, every algorithm.
  for (AlgoKind kind : {AlgoKind::kDecisionTree, AlgoKind::kLda, AlgoKind::kQda, AlgoKind::kGaussianNb,
                        AlgoKind::kLogisticRegression, AlgoKind::kWeightedKnn, AlgoKind::kBaggedTrees,
                        AlgoKind::kRusBoostedTrees}) {
    AlgoSpec spec;
    spec.kind = kind;
    spec.n_bags = 10;
    spec.epochs = 100;
    spec.seed = 1112;
    const auto model = train_classifier(c.table, spec, Scenario::kBinary);
    const fs::path file = dir / (std::string(algo_name(kind)) + ".json");
    save_model(model, file, config_hash(cfg), pipeline_config_to_json(cfg));
    const auto loaded = load_model(file);
    for (const auto& row : back.table.rows()) {
      const auto p = model.predict(row), q = loaded.model.predict(row);
      o.require(p.scores == q.scores && p.label == q.label,
                std::string(algo_name(kind)) + " prediction changed after reload");
    }
  }

  // Network file.
  Dataset images;
  std::vector<double> pixels;
  for (std::size_t i = 0; i < clips.size(); ++i) {
    const Tensor img = clip_image(clips[i], cfg.features.mfcc.spectral);
    pixels.insert(pixels.end(), img.data().begin(), img.data().end());
    images.labels.push_back(scenario_target(entries[i].label, Scenario::kBinary));
  }
  images.images = Tensor({clips.size(), 32, 32, 1}, std::move(pixels));
  auto net = build_crnn32(2, {}, 1113);
  TrainConfig tc;
  tc.epochs = 2;
  tc.batch_size = 5;
  train(net, images, nullptr, tc);
  save_network(net, dir / "net.bin", config_hash(cfg), pipeline_config_to_json(cfg));
  const auto loaded = load_network(dir / "net.bin");
  o.require(loaded.net.param_hash() == net.param_hash(), "network parameters changed");
  for (const auto& clip : clips) {
    const auto p = classify(net, clip, cfg.features.mfcc.spectral);
    const auto q = classify(loaded.net, clip, cfg.features.mfcc.spectral);
    o.require(p.scores == q.scores, "network prediction changed after reload");
  }
  if (o.pass) o.detail = "CSV, 8 classical models and the network reload bit-identically on 20 clips";
  return o;
}

}  // namespace
}  // namespace synthdetect

int main() {
  using namespace synthdetect;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"C1 transform oracles", c1_transforms},
      {"C2 bicoherence discrimination", c2_bicoherence},
      {"C3 bicoherence grid invariants", c3_grid_invariants},
      {"C4 moments", c4_moments},
      {"C5 feature dimensionality", c5_dimensionality},
      {"C6 synthetic corpus classification", c6_corpus_cv},
      {"C7 metrics arithmetic", c7_metrics},
      {"C8 cross-validation contract", c8_cv_contract},
      {"C9 gradient check", c9_gradients},
      {"C10 capacity and shape chain", c10_capacity},
      {"C11 persistence round trips", c11_persistence},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failures;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::error_code ec;
  fs::remove_all(scratch_dir(), ec);
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
