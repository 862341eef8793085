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

#ifndef SYNTHDETECT_CRNN_H_
#define SYNTHDETECT_CRNN_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "synthdetect/audio_io.h"
#include "synthdetect/classical_ml.h"
#include "synthdetect/matrix.h"
#include "synthdetect/spectral.h"

namespace synthdetect {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);  // e.g. "30x30x32"

// Dense row-major tensor of doubles.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_.at(i); }
  std::size_t size() const { return data_.size(); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  Tensor reshaped(Shape shape) const;
  // Rows [begin, end) along the first axis.
  Tensor slice(std::size_t begin, std::size_t end) const;

  bool operator==(const Tensor&) const = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

enum class LayerKind {
  kResize,
  kNormalize,
  kConv,
  kMaxPool,
  kDropout,
  kSqueezeToSequence,
  kBiLstm,
  kFlatten,
  kDense,
  kSoftmax
};

enum class Activation { kNone, kRelu };

std::string_view layer_kind_name(LayerKind kind);

// Shapes below exclude the batch axis. Images are H x W x C with H the
// time axis of a spectrogram; sequences are T x F.
struct LayerSpec {
  LayerKind kind = LayerKind::kNormalize;
  std::size_t units = 0;   // resize rows, conv filters, pool size, LSTM hidden, dense units
  std::size_t extent = 0;  // resize cols, conv kernel
  double rate = 0.0;       // dropout
  Activation activation = Activation::kNone;

  static LayerSpec resize(std::size_t rows, std::size_t cols);
  static LayerSpec normalize();
  static LayerSpec conv(std::size_t filters, std::size_t kernel,
                        Activation act = Activation::kRelu);
  static LayerSpec maxpool(std::size_t size = 2);
  static LayerSpec dropout(double rate);
  static LayerSpec squeeze_to_sequence();
  static LayerSpec bilstm(std::size_t hidden);
  static LayerSpec flatten();
  static LayerSpec dense(std::size_t units, Activation act = Activation::kNone);
  static LayerSpec softmax();

  bool operator==(const LayerSpec&) const = default;
};

nlohmann::json layer_spec_to_json(const LayerSpec& spec);
LayerSpec layer_spec_from_json(const nlohmann::json& j);

// Per-sample output shape; BuildError when the input cannot feed the layer.
Shape layer_output_shape(const LayerSpec& spec, const Shape& in);
// Analytic parameter count for the given per-sample input shape.
std::size_t layer_param_count(const LayerSpec& spec, const Shape& in);

// Values a layer keeps from forward for its backward pass.
struct LayerCache {
  std::vector<double> aux;       // dropout mask, LSTM gate/state history
  std::vector<std::size_t> index;  // max-pool argmax positions
};

// x and the returned tensor carry the batch axis first. `seed` drives the
// dropout mask in training mode and is ignored otherwise.
Tensor layer_forward(const LayerSpec& spec, std::span<const double> params, const Tensor& x,
                     bool training, std::uint64_t seed, LayerCache& cache);

// Given dL/dy, accumulates dL/dparams into dparams (same layout as params)
// and returns dL/dx, or an empty tensor when need_dx is false.
Tensor layer_backward(const LayerSpec& spec, std::span<const double> params, const Tensor& x,
                      const Tensor& y, const LayerCache& cache, const Tensor& dy,
                      std::span<double> dparams, bool need_dx = true);

struct CrnnConfig {
  std::size_t input_rows = 32;
  std::size_t input_cols = 32;
  std::size_t conv1_filters = 32;
  std::size_t conv2_filters = 64;
  std::size_t conv3_filters = 1;
  std::size_t kernel = 3;
  std::size_t lstm1_hidden = 64;
  std::size_t lstm2_hidden = 64;
  std::size_t dense_units = 128;
  double dropout_pool = 0.25;
  double dropout_head = 0.5;
  // Output layer weights start at zero so every input scores uniformly.
  bool zero_init_output = true;
};

nlohmann::json crnn_config_to_json(const CrnnConfig& cfg);
CrnnConfig crnn_config_from_json(const nlohmann::json& j);

enum class Mode { kTrain, kEval };

struct ForwardResult {
  std::vector<Tensor> activations;  // [0] is the input, [i + 1] the output of layer i
  std::vector<LayerCache> caches;
  const Tensor& output() const { return activations.back(); }
};

struct Gradients {
  double loss = 0.0;
  std::vector<std::vector<double>> layers;  // same layout as Network::params
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Network {
 public:
  // Validates the shape chain; parameters start at zero.
  Network(std::vector<LayerSpec> layers, Shape input_shape, std::vector<std::string> classes);

  const std::vector<LayerSpec>& layers() const { return layers_; }
  const Shape& input_shape() const { return input_shape_; }
  // Output shape of every layer.
  const std::vector<Shape>& shapes() const { return shapes_; }
  const std::vector<std::string>& classes() const { return classes_; }
  std::size_t num_classes() const { return classes_.size(); }

  std::size_t num_params() const;
  std::size_t layer_num_params(std::size_t i) const { return params_.at(i).size(); }
  std::vector<double>& params(std::size_t i) { return params_.at(i); }
  const std::vector<double>& params(std::size_t i) const { return params_.at(i); }
  // FNV-1a over every parameter's bit pattern.
  std::uint64_t param_hash() const;

  // Glorot-uniform weights, zero biases, LSTM forget bias 1.
  void initialize(std::uint64_t seed, bool zero_init_output = true);

  // batch is B x input_shape. Dropout masks come from dropout_seed.
  ForwardResult forward(const Tensor& batch, Mode mode, std::uint64_t dropout_seed = 0) const;
  Tensor predict(const Tensor& batch) const { return forward(batch, Mode::kEval).output(); }

  // Mean cross-entropy of the forward pass and its parameter gradients.
  Gradients backward(const ForwardResult& fr, std::span<const int> labels) const;

  void adam_step(const Gradients& grads, const AdamConfig& cfg);
  std::size_t adam_steps() const { return adam_t_; }

 private:
  std::vector<LayerSpec> layers_;
  Shape input_shape_;
  std::vector<Shape> shapes_;
  std::vector<std::string> classes_;
  std::vector<std::vector<double>> params_;
  std::vector<std::vector<double>> adam_m_, adam_v_;
  std::size_t adam_t_ = 0;
};

// Layer list of the CRNN32 stack for the given configuration.
std::vector<LayerSpec> crnn32_layers(std::size_t num_classes, const CrnnConfig& cfg);
// num_classes must be 2 or 4; classes default to the scenario names.
Network build_crnn32(std::size_t num_classes, const CrnnConfig& cfg = {}, std::uint64_t seed = 0);

double cross_entropy(const Tensor& probs, std::span<const int> labels);
// (softmax - onehot) / B.
Tensor cross_entropy_grad(const Tensor& probs, std::span<const int> labels);

struct Dataset {
  Tensor images;  // N x H x W x C
  std::vector<int> labels;
  std::size_t size() const { return labels.size(); }
  Dataset subset(std::span<const std::size_t> rows) const;
};

struct TrainConfig {
  std::size_t epochs = 30;
  std::size_t batch_size = 32;
  AdamConfig adam;
  std::uint64_t seed = 0;
  std::array<double, 3> split{0.6, 0.2, 0.2};  // train / validation / test
  // Stop once eval-mode training accuracy reaches this value.
  std::optional<double> target_train_accuracy;
};

nlohmann::json train_config_to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& j);

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double train_acc = 0.0;
  double val_loss = 0.0;  // NaN without a validation set
  double val_acc = 0.0;
};

using TrainHistory = std::vector<EpochRecord>;

void write_history_csv(std::ostream& out, const TrainHistory& history);

// Stratified split by cfg.split. Every split with a positive fraction must
// receive each class at least once.
std::array<Dataset, 3> split_dataset(const Dataset& data, const std::array<double, 3>& fractions,
                                     std::uint64_t seed);

struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
  ConfusionMatrix confusion;
};

Evaluation evaluate(const Network& net, const Dataset& data, std::size_t batch_size = 64);

// Mini-batch Adam on shuffled batches; one record per completed epoch.
TrainHistory train(Network& net, const Dataset& train_set, const Dataset* val_set,
                   const TrainConfig& cfg);

// mel spectrogram -> [0,1] image of the network's input size, as a 1-sample batch.
Tensor clip_image(const AudioClip& clip, const SpectralConfig& cfg, std::size_t rows = 32,
                  std::size_t cols = 32);
Tensor image_tensor(const RealMatrix& image);
Prediction classify(const Network& net, const AudioClip& clip, const SpectralConfig& cfg);

// "SDCRNN01", u32 header length, JSON header, little-endian f64 parameters.
void save_network(const Network& net, std::ostream& out, const std::string& config_hash = {},
                  const nlohmann::json& config = {});
void save_network(const Network& net, const std::filesystem::path& path,
                  const std::string& config_hash = {}, const nlohmann::json& config = {});

struct LoadedNetwork {
  Network net;
  std::string config_hash;
  nlohmann::json config;
};

LoadedNetwork load_network(std::istream& in);
LoadedNetwork load_network(const std::filesystem::path& path);

}  // namespace synthdetect

#endif  // SYNTHDETECT_CRNN_H_
