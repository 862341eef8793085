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

#include "synthdetect/crnn.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "synthdetect/errors.h"
#include "synthdetect/random.h"

namespace synthdetect {
namespace {

using nlohmann::json;

constexpr char kNetworkMagic[8] = {'S', 'D', 'C', 'R', 'N', 'N', '0', '1'};
constexpr int kNetworkVersion = 1;

// Salt separating dropout streams from shuffling streams.
constexpr std::uint64_t kDropoutStream = 0xD50F0u;

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  const auto it = j.find(key);
  return it == j.end() ? fallback : it->get<T>();
}

void glorot_fill(std::span<double> w, double fan_in, double fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  for (double& v : w) v = (2.0 * uniform_unit(rng) - 1.0) * limit;
}

void write_u32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                     static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
  out.write(b, 4);
}

std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw IoError("truncated network file");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_f64(std::ostream& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
  out.write(b, 8);
}

double read_f64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw IoError("truncated network parameters");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

std::vector<std::string> default_classes(std::size_t n) {
  return scenario_classes(n == 2 ? Scenario::kBinary : Scenario::kMulti);
}

}  // namespace

json crnn_config_to_json(const CrnnConfig& c) {
  return {{"input_rows", c.input_rows},       {"input_cols", c.input_cols},
          {"conv1_filters", c.conv1_filters}, {"conv2_filters", c.conv2_filters},
          {"conv3_filters", c.conv3_filters}, {"kernel", c.kernel},
          {"lstm1_hidden", c.lstm1_hidden},   {"lstm2_hidden", c.lstm2_hidden},
          {"dense_units", c.dense_units},     {"dropout_pool", c.dropout_pool},
          {"dropout_head", c.dropout_head},   {"zero_init_output", c.zero_init_output}};
}

CrnnConfig crnn_config_from_json(const json& j) {
  CrnnConfig c;
  try {
    c.input_rows = get_or(j, "input_rows", c.input_rows);
    c.input_cols = get_or(j, "input_cols", c.input_cols);
    c.conv1_filters = get_or(j, "conv1_filters", c.conv1_filters);
    c.conv2_filters = get_or(j, "conv2_filters", c.conv2_filters);
    c.conv3_filters = get_or(j, "conv3_filters", c.conv3_filters);
    c.kernel = get_or(j, "kernel", c.kernel);
    c.lstm1_hidden = get_or(j, "lstm1_hidden", c.lstm1_hidden);
    c.lstm2_hidden = get_or(j, "lstm2_hidden", c.lstm2_hidden);
    c.dense_units = get_or(j, "dense_units", c.dense_units);
    c.dropout_pool = get_or(j, "dropout_pool", c.dropout_pool);
    c.dropout_head = get_or(j, "dropout_head", c.dropout_head);
    c.zero_init_output = get_or(j, "zero_init_output", c.zero_init_output);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad crnn config: ") + e.what());
  }
  return c;
}

Network::Network(std::vector<LayerSpec> layers, Shape input_shape,
                 std::vector<std::string> classes)
    : layers_(std::move(layers)), input_shape_(std::move(input_shape)), classes_(std::move(classes)) {
  if (layers_.empty()) throw BuildError("network has no layers");
  Shape s = input_shape_;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    try {
      const std::size_t n = layer_param_count(layers_[i], s);
      params_.emplace_back(n, 0.0);
      s = layer_output_shape(layers_[i], s);
    } catch (const BuildError& e) {
      throw BuildError("layer " + std::to_string(i) + ": " + e.what());
    }
    shapes_.push_back(s);
  }
  if (layers_.back().kind != LayerKind::kSoftmax)
    throw BuildError("layer " + std::to_string(layers_.size() - 1) + ": last layer must be softmax");
  if (s.size() != 1 || s[0] != classes_.size())
    throw BuildError("output size " + shape_string(s) + " does not match " +
                     std::to_string(classes_.size()) + " classes");
  for (const auto& p : params_) {
    adam_m_.emplace_back(p.size(), 0.0);
    adam_v_.emplace_back(p.size(), 0.0);
  }
}

std::size_t Network::num_params() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.size();
  return n;
}

std::uint64_t Network::param_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& p : params_) {
    for (double v : p) {
      auto bits = std::bit_cast<std::uint64_t>(v);
      for (int i = 0; i < 8; ++i) {
        h ^= (bits >> (8 * i)) & 0xFF;
        h *= 0x100000001b3ull;
      }
    }
  }
  return h;
}

void Network::initialize(std::uint64_t seed, bool zero_init_output) {
  std::size_t last_dense = layers_.size();
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (layers_[i].kind == LayerKind::kDense) last_dense = i;
  }
  Shape in = input_shape_;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const LayerSpec& L = layers_[i];
    auto& p = params_[i];
    std::fill(p.begin(), p.end(), 0.0);
    Rng rng(derive_seed(seed, i));
    if (L.kind == LayerKind::kConv) {
      const double k2 = static_cast<double>(L.extent * L.extent);
      const std::size_t nw = L.extent * L.extent * in[2] * L.units;
      glorot_fill(std::span(p).first(nw), k2 * static_cast<double>(in[2]),
                  k2 * static_cast<double>(L.units), rng);
    } else if (L.kind == LayerKind::kDense) {
      if (!(zero_init_output && i == last_dense)) {
        glorot_fill(std::span(p).first(in[0] * L.units), static_cast<double>(in[0]),
                    static_cast<double>(L.units), rng);
      }
    } else if (L.kind == LayerKind::kBiLstm) {
      const std::size_t f = in[1], h = L.units, g4 = 4 * h;
      const std::size_t per_dir = g4 * (f + h + 1);
      for (std::size_t dir = 0; dir < 2; ++dir) {
        auto block = std::span(p).subspan(dir * per_dir, per_dir);
        glorot_fill(block.first(f * g4), static_cast<double>(f), static_cast<double>(g4), rng);
        glorot_fill(block.subspan(f * g4, h * g4), static_cast<double>(h), static_cast<double>(g4), rng);
        auto bias = block.subspan((f + h) * g4, g4);
        std::fill(bias.begin() + static_cast<std::ptrdiff_t>(h),
                  bias.begin() + static_cast<std::ptrdiff_t>(2 * h), 1.0);
      }
    }
    in = shapes_[i];
  }
  for (auto& m : adam_m_) std::fill(m.begin(), m.end(), 0.0);
  for (auto& v : adam_v_) std::fill(v.begin(), v.end(), 0.0);
  adam_t_ = 0;
}

ForwardResult Network::forward(const Tensor& batch, Mode mode, std::uint64_t dropout_seed) const {
  if (batch.rank() != input_shape_.size() + 1 ||
      !std::equal(input_shape_.begin(), input_shape_.end(), batch.shape().begin() + 1))
    throw ShapeError("network expects batches of " + shape_string(input_shape_) + ", got " +
                     shape_string(batch.shape()));
  if (batch.dim(0) == 0) throw ShapeError("empty batch");
  ForwardResult fr;
  fr.activations.reserve(layers_.size() + 1);
  fr.caches.resize(layers_.size());
  fr.activations.push_back(batch);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    fr.activations.push_back(layer_forward(layers_[i], params_[i], fr.activations.back(),
                                           mode == Mode::kTrain,
                                           derive_seed(dropout_seed ^ kDropoutStream, i),
                                           fr.caches[i]));
  }
  return fr;
}

double cross_entropy(const Tensor& probs, std::span<const int> labels) {
  const std::size_t b = probs.dim(0), nc = probs.dim(1);
  if (labels.size() != b) throw ShapeError("label count does not match batch");
  double loss = 0.0;
  for (std::size_t n = 0; n < b; ++n) {
    const auto y = static_cast<std::size_t>(labels[n]);
    if (y >= nc) throw ShapeError("label out of range");
    loss -= std::log(std::max(probs[n * nc + y], std::numeric_limits<double>::min()));
  }
  return loss / static_cast<double>(b);
}

Tensor cross_entropy_grad(const Tensor& probs, std::span<const int> labels) {
  const std::size_t b = probs.dim(0), nc = probs.dim(1);
  if (labels.size() != b) throw ShapeError("label count does not match batch");
  Tensor g = probs;
  for (std::size_t n = 0; n < b; ++n) {
    const auto y = static_cast<std::size_t>(labels[n]);
    if (y >= nc) throw ShapeError("label out of range");
    g[n * nc + y] -= 1.0;
  }
  for (double& v : g.data()) v /= static_cast<double>(b);
  return g;
}

Gradients Network::backward(const ForwardResult& fr, std::span<const int> labels) const {
  if (fr.activations.size() != layers_.size() + 1) throw ShapeError("forward result does not match network");
  Gradients g;
  g.loss = cross_entropy(fr.output(), labels);
  for (const auto& p : params_) g.layers.emplace_back(p.size(), 0.0);
  std::size_t first_param = layers_.size();
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (!params_[i].empty()) {
      first_param = i;
      break;
    }
  }
  // The softmax and the loss are differentiated together.
  Tensor d = cross_entropy_grad(fr.output(), labels);
  for (std::size_t i = layers_.size() - 1; i-- > 0 && i + 1 > first_param;) {
    d = layer_backward(layers_[i], params_[i], fr.activations[i], fr.activations[i + 1],
                       fr.caches[i], d, g.layers[i], i > first_param);
  }
  return g;
}

void Network::adam_step(const Gradients& grads, const AdamConfig& cfg) {
  if (grads.layers.size() != params_.size()) throw ShapeError("gradient layer count mismatch");
  ++adam_t_;
  const double t = static_cast<double>(adam_t_);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t l = 0; l < params_.size(); ++l) {
    auto& p = params_[l];
    auto& m = adam_m_[l];
    auto& v = adam_v_[l];
    const auto& g = grads.layers[l];
    if (g.size() != p.size()) throw ShapeError("gradient size mismatch");
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      p[i] -= cfg.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg.epsilon);
    }
  }
}

std::vector<LayerSpec> crnn32_layers(std::size_t num_classes, const CrnnConfig& c) {
  return {LayerSpec::resize(c.input_rows, c.input_cols),
          LayerSpec::normalize(),
          LayerSpec::conv(c.conv1_filters, c.kernel),
          LayerSpec::conv(c.conv2_filters, c.kernel),
          LayerSpec::maxpool(2),
          LayerSpec::dropout(c.dropout_pool),
          LayerSpec::conv(c.conv3_filters, c.kernel),
          LayerSpec::squeeze_to_sequence(),
          LayerSpec::bilstm(c.lstm1_hidden),
          LayerSpec::bilstm(c.lstm2_hidden),
          LayerSpec::flatten(),
          LayerSpec::dense(c.dense_units, Activation::kRelu),
          LayerSpec::dropout(c.dropout_head),
          LayerSpec::dense(num_classes),
          LayerSpec::softmax()};
}

Network build_crnn32(std::size_t num_classes, const CrnnConfig& cfg, std::uint64_t seed) {
  if (num_classes != 2 && num_classes != 4)
    throw BuildError("CRNN32 supports 2 or 4 classes, got " + std::to_string(num_classes));
  Network net(crnn32_layers(num_classes, cfg), {cfg.input_rows, cfg.input_cols, 1},
              default_classes(num_classes));
  net.initialize(seed, cfg.zero_init_output);
  return net;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  Shape s = images.shape();
  const std::size_t stride = shape_size(Shape(s.begin() + 1, s.end()));
  s[0] = rows.size();
  std::vector<double> data;
  data.reserve(rows.size() * stride);
  for (auto r : rows) {
    if (r >= size()) throw ShapeError("dataset row out of range");
    const auto src = images.data().subspan(r * stride, stride);
    data.insert(data.end(), src.begin(), src.end());
    out.labels.push_back(labels[r]);
  }
  out.images = Tensor(std::move(s), std::move(data));
  return out;
}

json train_config_to_json(const TrainConfig& c) {
  json j = {{"epochs", c.epochs},
            {"batch_size", c.batch_size},
            {"learning_rate", c.adam.learning_rate},
            {"beta1", c.adam.beta1},
            {"beta2", c.adam.beta2},
            {"epsilon", c.adam.epsilon},
            {"seed", c.seed},
            {"split", c.split}};
  if (c.target_train_accuracy) j["target_train_accuracy"] = *c.target_train_accuracy;
  return j;
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  try {
    c.epochs = get_or(j, "epochs", c.epochs);
    c.batch_size = get_or(j, "batch_size", c.batch_size);
    c.adam.learning_rate = get_or(j, "learning_rate", c.adam.learning_rate);
    c.adam.beta1 = get_or(j, "beta1", c.adam.beta1);
    c.adam.beta2 = get_or(j, "beta2", c.adam.beta2);
    c.adam.epsilon = get_or(j, "epsilon", c.adam.epsilon);
    c.seed = get_or(j, "seed", c.seed);
    c.split = get_or(j, "split", c.split);
    if (j.contains("target_train_accuracy"))
      c.target_train_accuracy = j.at("target_train_accuracy").get<double>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad training config: ") + e.what());
  }
  return c;
}

void write_history_csv(std::ostream& out, const TrainHistory& history) {
  out << "epoch,train_loss,train_acc,val_loss,val_acc\n";
  for (const auto& r : history) {
    out << r.epoch << ',' << format_double(r.train_loss) << ',' << format_double(r.train_acc)
        << ',' << format_double(r.val_loss) << ',' << format_double(r.val_acc) << '\n';
  }
}

std::array<Dataset, 3> split_dataset(const Dataset& data, const std::array<double, 3>& f,
                                     std::uint64_t seed) {
  for (double v : f) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("split fractions must lie in [0,1]");
  }
  if (std::abs(f[0] + f[1] + f[2] - 1.0) > 1e-9) throw ConfigError("split fractions must sum to 1");
  int max_label = -1;
  for (int y : data.labels) max_label = std::max(max_label, y);
  Rng rng(seed);
  std::array<std::vector<std::size_t>, 3> rows;
  for (int c = 0; c <= max_label; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data.labels[i] == c) members.push_back(i);
    }
    if (members.empty()) continue;
    shuffle(members, rng);
    const double n = static_cast<double>(members.size());
    const auto n_train = static_cast<std::size_t>(std::llround(f[0] * n));
    const auto n_val = std::min(members.size() - n_train,
                                static_cast<std::size_t>(std::llround(f[1] * n)));
    for (std::size_t i = 0; i < members.size(); ++i) {
      const std::size_t part = i < n_train ? 0 : (i < n_train + n_val ? 1 : 2);
      rows[part].push_back(members[i]);
    }
  }
  std::array<Dataset, 3> out;
  for (std::size_t s = 0; s < 3; ++s) {
    std::sort(rows[s].begin(), rows[s].end());
    if (f[s] > 0.0) {
      for (int c = 0; c <= max_label; ++c) {
        const bool in_data = std::find(data.labels.begin(), data.labels.end(), c) != data.labels.end();
        bool found = false;
        for (auto r : rows[s]) found = found || data.labels[r] == c;
        if (in_data && !found)
          throw ConfigError("split " + std::to_string(s) + " receives no sample of class " +
                            std::to_string(c));
      }
    }
    out[s] = data.subset(rows[s]);
  }
  return out;
}

Evaluation evaluate(const Network& net, const Dataset& data, std::size_t batch_size) {
  Evaluation ev;
  ev.confusion = ConfusionMatrix(net.classes());
  if (data.size() == 0) throw ConfigError("cannot evaluate an empty dataset");
  batch_size = std::max<std::size_t>(batch_size, 1);
  double loss = 0.0;
  for (std::size_t start = 0; start < data.size(); start += batch_size) {
    const std::size_t end = std::min(data.size(), start + batch_size);
    const Tensor probs = net.predict(data.images.slice(start, end));
    const std::span<const int> labels(data.labels.data() + start, end - start);
    loss += cross_entropy(probs, labels) * static_cast<double>(end - start);
    const std::size_t nc = net.num_classes();
    for (std::size_t n = 0; n < end - start; ++n) {
      const auto pred = argmax(probs.data().subspan(n * nc, nc));
      ev.confusion.add(static_cast<std::size_t>(labels[n]), pred);
    }
  }
  ev.loss = loss / static_cast<double>(data.size());
  ev.accuracy = static_cast<double>(ev.confusion.correct()) / static_cast<double>(data.size());
  return ev;
}

TrainHistory train(Network& net, const Dataset& train_set, const Dataset* val_set,
                   const TrainConfig& cfg) {
  if (train_set.size() == 0) throw ConfigError("empty training split");
  if (val_set && val_set->size() == 0) throw ConfigError("empty validation split");
  if (cfg.batch_size == 0) throw ConfigError("batch size must be positive");
  TrainHistory history;
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    auto order = iota_indices(train_set.size());
    Rng rng(derive_seed(cfg.seed, epoch));
    shuffle(order, rng);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const auto batch = train_set.subset(std::span(order).subspan(start, end - start));
      const auto fr = net.forward(batch.images, Mode::kTrain, derive_seed(cfg.seed, step++));
      net.adam_step(net.backward(fr, batch.labels), cfg.adam);
    }
    EpochRecord rec;
    rec.epoch = epoch + 1;
    const auto tr = evaluate(net, train_set);
    rec.train_loss = tr.loss;
    rec.train_acc = tr.accuracy;
    rec.val_loss = rec.val_acc = std::numeric_limits<double>::quiet_NaN();
    if (val_set) {
      const auto va = evaluate(net, *val_set);
      rec.val_loss = va.loss;
      rec.val_acc = va.accuracy;
    }
    history.push_back(rec);
    if (cfg.target_train_accuracy && rec.train_acc >= *cfg.target_train_accuracy) break;
  }
  return history;
}

Tensor image_tensor(const RealMatrix& image) {
  return Tensor({1, image.rows(), image.cols(), 1},
                std::vector<double>(image.values().begin(), image.values().end()));
}

Tensor clip_image(const AudioClip& clip, const SpectralConfig& cfg, std::size_t rows,
                  std::size_t cols) {
  return image_tensor(spectrogram_image(mel_spectrogram(to_mono(clip), cfg), rows, cols));
}

Prediction classify(const Network& net, const AudioClip& clip, const SpectralConfig& cfg) {
  const auto& in = net.input_shape();
  const Tensor probs = net.predict(clip_image(clip, cfg, in.at(0), in.at(1)));
  Prediction p;
  p.scores.assign(probs.data().begin(), probs.data().end());
  p.class_index = argmax(p.scores);
  p.label = net.classes()[p.class_index];
  return p;
}

void save_network(const Network& net, std::ostream& out, const std::string& config_hash,
                  const json& config) {
  json layers = json::array();
  for (const auto& l : net.layers()) layers.push_back(layer_spec_to_json(l));
  std::vector<std::size_t> counts;
  for (std::size_t i = 0; i < net.layers().size(); ++i) counts.push_back(net.layer_num_params(i));
  const json header = {{"version", kNetworkVersion},
                       {"input_shape", net.input_shape()},
                       {"layers", layers},
                       {"param_counts", counts},
                       {"classes", net.classes()},
                       {"config_hash", config_hash},
                       {"config", config}};
  const std::string text = header.dump();
  out.write(kNetworkMagic, sizeof kNetworkMagic);
  write_u32(out, static_cast<std::uint32_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    for (double v : net.params(i)) write_f64(out, v);
  }
  if (!out) throw IoError("failed writing network");
}

void save_network(const Network& net, const std::filesystem::path& path,
                  const std::string& config_hash, const json& config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  save_network(net, out, config_hash, config);
}

LoadedNetwork load_network(std::istream& in) {
  char magic[sizeof kNetworkMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kNetworkMagic, sizeof magic) != 0)
    throw IoError("not a network file");
  const std::uint32_t len = read_u32(in);
  std::string text(len, '\0');
  if (!in.read(text.data(), len)) throw IoError("truncated network header");
  json header;
  std::vector<LayerSpec> layers;
  try {
    header = json::parse(text);
    if (header.at("version").get<int>() != kNetworkVersion) throw IoError("unsupported network version");
    for (const auto& l : header.at("layers")) layers.push_back(layer_spec_from_json(l));
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed network header: ") + e.what());
  }
  Network net(std::move(layers), header.at("input_shape").get<Shape>(),
              header.at("classes").get<std::vector<std::string>>());
  const auto counts = header.at("param_counts").get<std::vector<std::size_t>>();
  if (counts.size() != net.layers().size()) throw IoError("network parameter table mismatch");
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    if (counts[i] != net.layer_num_params(i)) throw IoError("network parameter count mismatch");
    for (double& v : net.params(i)) v = read_f64(in);
  }
  if (in.peek() != std::char_traits<char>::eof()) throw IoError("trailing bytes after network parameters");
  return {std::move(net), header.value("config_hash", std::string()), header.value("config", json())};
}

LoadedNetwork load_network(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return load_network(in);
}

}  // namespace synthdetect
