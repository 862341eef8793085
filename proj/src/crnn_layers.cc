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

// Tensor primitives and the per-layer forward/backward kernels.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

#include "synthdetect/crnn.h"
#include "synthdetect/errors.h"
#include "synthdetect/random.h"

namespace synthdetect {
namespace {

using nlohmann::json;

constexpr std::pair<LayerKind, std::string_view> kLayerNames[] = {
    {LayerKind::kResize, "resize"},
    {LayerKind::kNormalize, "normalize"},
    {LayerKind::kConv, "conv"},
    {LayerKind::kMaxPool, "maxpool"},
    {LayerKind::kDropout, "dropout"},
    {LayerKind::kSqueezeToSequence, "squeeze_to_sequence"},
    {LayerKind::kBiLstm, "bilstm"},
    {LayerKind::kFlatten, "flatten"},
    {LayerKind::kDense, "dense"},
    {LayerKind::kSoftmax, "softmax"},
};

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

Shape sample_shape(const Tensor& x) { return Shape(x.shape().begin() + 1, x.shape().end()); }

Shape with_batch(std::size_t b, const Shape& s) {
  Shape out{b};
  out.insert(out.end(), s.begin(), s.end());
  return out;
}

[[noreturn]] void shape_fail(const LayerSpec& spec, const Shape& in, const std::string& why) {
  throw BuildError(std::string(layer_kind_name(spec.kind)) + " layer cannot take input " +
                   shape_string(in) + ": " + why);
}

// Source rows/weights for half-pixel-centre bilinear resampling.
std::vector<std::tuple<std::size_t, std::size_t, double>> resize_axis(std::size_t in,
                                                                      std::size_t out) {
  std::vector<std::tuple<std::size_t, std::size_t, double>> taps(out);
  const double scale = static_cast<double>(in) / static_cast<double>(out);
  for (std::size_t o = 0; o < out; ++o) {
    const double s = std::clamp((static_cast<double>(o) + 0.5) * scale - 0.5, 0.0,
                                static_cast<double>(in - 1));
    const auto i0 = static_cast<std::size_t>(std::floor(s));
    taps[o] = {i0, std::min(i0 + 1, in - 1), s - static_cast<double>(i0)};
  }
  return taps;
}

// --- conv (valid, stride 1, weights kh x kw x cin x cout then bias) --------

Tensor conv_forward(const LayerSpec& spec, std::span<const double> p, const Tensor& x) {
  const std::size_t b = x.dim(0), h = x.dim(1), w = x.dim(2), cin = x.dim(3);
  const std::size_t k = spec.extent, cout = spec.units;
  const std::size_t oh = h - k + 1, ow = w - k + 1;
  const std::size_t span_len = k * cin;  // contiguous input run per kernel row
  const double* bias = p.data() + k * k * cin * cout;
  Tensor y({b, oh, ow, cout});
  for (std::size_t n = 0; n < b; ++n) {
    const double* xs = x.data().data() + n * h * w * cin;
    double* ys = y.data().data() + n * oh * ow * cout;
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        double* out = ys + (oy * ow + ox) * cout;
        std::copy(bias, bias + cout, out);
        for (std::size_t ky = 0; ky < k; ++ky) {
          const double* in = xs + ((oy + ky) * w + ox) * cin;
          const double* wk = p.data() + ky * span_len * cout;
          for (std::size_t j = 0; j < span_len; ++j) {
            const double v = in[j];
            if (v == 0.0) continue;
            const double* wj = wk + j * cout;
            for (std::size_t c = 0; c < cout; ++c) out[c] += v * wj[c];
          }
        }
        if (spec.activation == Activation::kRelu) {
          for (std::size_t c = 0; c < cout; ++c) out[c] = std::max(out[c], 0.0);
        }
      }
    }
  }
  return y;
}

Tensor conv_backward(const LayerSpec& spec, std::span<const double> p, const Tensor& x,
                     const Tensor& y, Tensor dy, std::span<double> dp, bool need_dx) {
  const std::size_t b = x.dim(0), h = x.dim(1), w = x.dim(2), cin = x.dim(3);
  const std::size_t k = spec.extent, cout = spec.units;
  const std::size_t oh = h - k + 1, ow = w - k + 1;
  const std::size_t span_len = k * cin;
  if (spec.activation == Activation::kRelu) {
    for (std::size_t i = 0; i < dy.size(); ++i) {
      if (!(y[i] > 0.0)) dy[i] = 0.0;
    }
  }
  double* dbias = dp.data() + k * k * cin * cout;
  Tensor dx;
  if (need_dx) dx = Tensor(x.shape());
  for (std::size_t n = 0; n < b; ++n) {
    const double* xs = x.data().data() + n * h * w * cin;
    const double* gs = dy.data().data() + n * oh * ow * cout;
    double* dxs = need_dx ? dx.data().data() + n * h * w * cin : nullptr;
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        const double* g = gs + (oy * ow + ox) * cout;
        bool any = false;
        for (std::size_t c = 0; c < cout; ++c) {
          dbias[c] += g[c];
          any = any || g[c] != 0.0;
        }
        if (!any) continue;
        for (std::size_t ky = 0; ky < k; ++ky) {
          const std::size_t off = ((oy + ky) * w + ox) * cin;
          const double* in = xs + off;
          const double* wk = p.data() + ky * span_len * cout;
          double* dwk = dp.data() + ky * span_len * cout;
          for (std::size_t j = 0; j < span_len; ++j) {
            const double v = in[j];
            double* dwj = dwk + j * cout;
            if (v != 0.0) {
              for (std::size_t c = 0; c < cout; ++c) dwj[c] += v * g[c];
            }
            if (dxs) {
              const double* wj = wk + j * cout;
              double s = 0.0;
              for (std::size_t c = 0; c < cout; ++c) s += wj[c] * g[c];
              dxs[off + j] += s;
            }
          }
        }
      }
    }
  }
  return dx;
}

// --- bidirectional LSTM ----------------------------------------------------
// Per direction: W (F x 4h), U (h x 4h), b (4h); gate order i, f, g, o.
// Output features [0, h) come from the forward pass, [h, 2h) from the
// reversed one. The cache holds, per (sample, direction, step), the gate
// activations (4h), the cell state (h) and the hidden state (h).

struct LstmDims {
  std::size_t b, t, f, h;
  std::size_t dir_params() const { return 4 * h * (f + h + 1); }
  std::size_t step_cache() const { return 6 * h; }
};

Tensor bilstm_forward(const LstmDims& d, std::span<const double> p, const Tensor& x,
                      LayerCache& cache) {
  const std::size_t g4 = 4 * d.h;
  Tensor y({d.b, d.t, 2 * d.h});
  cache.aux.assign(d.b * 2 * d.t * d.step_cache(), 0.0);
  std::vector<double> z(g4), h_prev(d.h), c_prev(d.h);
  for (std::size_t dir = 0; dir < 2; ++dir) {
    const double* W = p.data() + dir * d.dir_params();
    const double* U = W + d.f * g4;
    const double* bias = U + d.h * g4;
    for (std::size_t n = 0; n < d.b; ++n) {
      std::fill(h_prev.begin(), h_prev.end(), 0.0);
      std::fill(c_prev.begin(), c_prev.end(), 0.0);
      for (std::size_t s = 0; s < d.t; ++s) {
        const std::size_t t = dir == 0 ? s : d.t - 1 - s;
        const double* xt = x.data().data() + (n * d.t + t) * d.f;
        std::copy(bias, bias + g4, z.begin());
        for (std::size_t j = 0; j < d.f; ++j) {
          const double v = xt[j];
          if (v == 0.0) continue;
          const double* wj = W + j * g4;
          for (std::size_t q = 0; q < g4; ++q) z[q] += v * wj[q];
        }
        for (std::size_t j = 0; j < d.h; ++j) {
          const double v = h_prev[j];
          if (v == 0.0) continue;
          const double* uj = U + j * g4;
          for (std::size_t q = 0; q < g4; ++q) z[q] += v * uj[q];
        }
        double* st = cache.aux.data() + ((n * 2 + dir) * d.t + s) * d.step_cache();
        double* gates = st;
        double* cell = st + g4;
        double* hid = cell + d.h;
        for (std::size_t j = 0; j < d.h; ++j) {
          const double i = sigmoid(z[j]);
          const double f = sigmoid(z[d.h + j]);
          const double g = std::tanh(z[2 * d.h + j]);
          const double o = sigmoid(z[3 * d.h + j]);
          gates[j] = i;
          gates[d.h + j] = f;
          gates[2 * d.h + j] = g;
          gates[3 * d.h + j] = o;
          cell[j] = f * c_prev[j] + i * g;
          hid[j] = o * std::tanh(cell[j]);
        }
        std::copy(cell, cell + d.h, c_prev.begin());
        std::copy(hid, hid + d.h, h_prev.begin());
        std::copy(hid, hid + d.h, y.data().data() + (n * d.t + t) * 2 * d.h + dir * d.h);
      }
    }
  }
  return y;
}

Tensor bilstm_backward(const LstmDims& d, std::span<const double> p, const Tensor& x,
                       const LayerCache& cache, const Tensor& dy, std::span<double> dp,
                       bool need_dx) {
  const std::size_t g4 = 4 * d.h;
  Tensor dx;
  if (need_dx) dx = Tensor(x.shape());
  std::vector<double> dz(g4), dh(d.h), dc(d.h), dh_next(d.h), dc_next(d.h);
  const std::vector<double> zeros(d.h, 0.0);
  for (std::size_t dir = 0; dir < 2; ++dir) {
    const double* W = p.data() + dir * d.dir_params();
    const double* U = W + d.f * g4;
    double* dW = dp.data() + dir * d.dir_params();
    double* dU = dW + d.f * g4;
    double* db = dU + d.h * g4;
    for (std::size_t n = 0; n < d.b; ++n) {
      std::fill(dh_next.begin(), dh_next.end(), 0.0);
      std::fill(dc_next.begin(), dc_next.end(), 0.0);
      for (std::size_t s = d.t; s-- > 0;) {
        const std::size_t t = dir == 0 ? s : d.t - 1 - s;
        const double* st = cache.aux.data() + ((n * 2 + dir) * d.t + s) * d.step_cache();
        const double* gates = st;
        const double* cell = st + g4;
        const double* c_prev =
            s == 0 ? zeros.data() : st - d.step_cache() + g4;
        const double* h_prev =
            s == 0 ? zeros.data() : st - d.step_cache() + g4 + d.h;
        const double* g_out = dy.data().data() + (n * d.t + t) * 2 * d.h + dir * d.h;
        for (std::size_t j = 0; j < d.h; ++j) {
          const double i = gates[j], f = gates[d.h + j], g = gates[2 * d.h + j],
                       o = gates[3 * d.h + j];
          const double tc = std::tanh(cell[j]);
          const double dhj = g_out[j] + dh_next[j];
          const double dcj = dhj * o * (1.0 - tc * tc) + dc_next[j];
          dz[j] = dcj * g * i * (1.0 - i);
          dz[d.h + j] = dcj * c_prev[j] * f * (1.0 - f);
          dz[2 * d.h + j] = dcj * i * (1.0 - g * g);
          dz[3 * d.h + j] = dhj * tc * o * (1.0 - o);
          dc_next[j] = dcj * f;
        }
        for (std::size_t q = 0; q < g4; ++q) db[q] += dz[q];
        const double* xt = x.data().data() + (n * d.t + t) * d.f;
        double* dxt = need_dx ? dx.data().data() + (n * d.t + t) * d.f : nullptr;
        for (std::size_t j = 0; j < d.f; ++j) {
          const double v = xt[j];
          double* dwj = dW + j * g4;
          if (v != 0.0) {
            for (std::size_t q = 0; q < g4; ++q) dwj[q] += v * dz[q];
          }
          if (dxt) {
            const double* wj = W + j * g4;
            double acc = 0.0;
            for (std::size_t q = 0; q < g4; ++q) acc += wj[q] * dz[q];
            dxt[j] += acc;
          }
        }
        for (std::size_t j = 0; j < d.h; ++j) {
          const double v = h_prev[j];
          double* duj = dU + j * g4;
          if (v != 0.0) {
            for (std::size_t q = 0; q < g4; ++q) duj[q] += v * dz[q];
          }
          const double* uj = U + j * g4;
          double acc = 0.0;
          for (std::size_t q = 0; q < g4; ++q) acc += uj[q] * dz[q];
          dh_next[j] = acc;
        }
      }
    }
  }
  return dx;
}

LstmDims lstm_dims(const LayerSpec& spec, const Tensor& x) {
  return {x.dim(0), x.dim(1), x.dim(2), spec.units};
}

void check_input(const LayerSpec& spec, const Tensor& x) {
  if (x.rank() < 2) throw ShapeError("layer input needs a batch axis");
  try {
    (void)layer_output_shape(spec, sample_shape(x));
  } catch (const BuildError& e) {
    throw ShapeError(e.what());
  }
}

}  // namespace

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::string s;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += 'x';
    s += std::to_string(shape[i]);
  }
  return s.empty() ? "scalar" : s;
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)), data_(shape_size(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != shape_size(shape_))
    throw ShapeError("tensor data length " + std::to_string(data_.size()) + " does not match shape " +
                     shape_string(shape_));
}

Tensor Tensor::reshaped(Shape shape) const {
  if (shape_size(shape) != data_.size())
    throw ShapeError("cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
  return Tensor(std::move(shape), data_);
}

Tensor Tensor::slice(std::size_t begin, std::size_t end) const {
  if (shape_.empty() || begin > end || end > shape_[0]) throw ShapeError("bad tensor slice");
  Shape s = shape_;
  s[0] = end - begin;
  const std::size_t stride = shape_[0] == 0 ? 0 : data_.size() / shape_[0];
  return Tensor(std::move(s), std::vector<double>(data_.begin() + static_cast<std::ptrdiff_t>(begin * stride),
                                                  data_.begin() + static_cast<std::ptrdiff_t>(end * stride)));
}

std::string_view layer_kind_name(LayerKind kind) {
  for (const auto& [k, name] : kLayerNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

LayerSpec LayerSpec::resize(std::size_t rows, std::size_t cols) {
  return {LayerKind::kResize, rows, cols, 0.0, Activation::kNone};
}
LayerSpec LayerSpec::normalize() { return {LayerKind::kNormalize, 0, 0, 0.0, Activation::kNone}; }
LayerSpec LayerSpec::conv(std::size_t filters, std::size_t kernel, Activation act) {
  return {LayerKind::kConv, filters, kernel, 0.0, act};
}
LayerSpec LayerSpec::maxpool(std::size_t size) {
  return {LayerKind::kMaxPool, size, 0, 0.0, Activation::kNone};
}
LayerSpec LayerSpec::dropout(double rate) {
  return {LayerKind::kDropout, 0, 0, rate, Activation::kNone};
}
LayerSpec LayerSpec::squeeze_to_sequence() {
  return {LayerKind::kSqueezeToSequence, 0, 0, 0.0, Activation::kNone};
}
LayerSpec LayerSpec::bilstm(std::size_t hidden) {
  return {LayerKind::kBiLstm, hidden, 0, 0.0, Activation::kNone};
}
LayerSpec LayerSpec::flatten() { return {LayerKind::kFlatten, 0, 0, 0.0, Activation::kNone}; }
LayerSpec LayerSpec::dense(std::size_t units, Activation act) {
  return {LayerKind::kDense, units, 0, 0.0, act};
}
LayerSpec LayerSpec::softmax() { return {LayerKind::kSoftmax, 0, 0, 0.0, Activation::kNone}; }

json layer_spec_to_json(const LayerSpec& spec) {
  return {{"kind", layer_kind_name(spec.kind)},
          {"units", spec.units},
          {"extent", spec.extent},
          {"rate", spec.rate},
          {"activation", spec.activation == Activation::kRelu ? "relu" : "none"}};
}

LayerSpec layer_spec_from_json(const json& j) {
  LayerSpec s;
  const auto name = j.at("kind").get<std::string>();
  bool found = false;
  for (const auto& [k, n] : kLayerNames) {
    if (n == name) {
      s.kind = k;
      found = true;
    }
  }
  if (!found) throw BuildError("unknown layer kind " + name);
  s.units = j.at("units").get<std::size_t>();
  s.extent = j.at("extent").get<std::size_t>();
  s.rate = j.at("rate").get<double>();
  const auto act = j.at("activation").get<std::string>();
  if (act != "relu" && act != "none") throw BuildError("unknown activation " + act);
  s.activation = act == "relu" ? Activation::kRelu : Activation::kNone;
  return s;
}

Shape layer_output_shape(const LayerSpec& spec, const Shape& in) {
  auto need_rank = [&](std::size_t r) {
    if (in.size() != r) shape_fail(spec, in, "expected rank " + std::to_string(r));
    for (auto d : in) {
      if (d == 0) shape_fail(spec, in, "zero-sized dimension");
    }
  };
  switch (spec.kind) {
    case LayerKind::kResize:
      need_rank(3);
      if (spec.units == 0 || spec.extent == 0) shape_fail(spec, in, "zero target size");
      return {spec.units, spec.extent, in[2]};
    case LayerKind::kNormalize:
    case LayerKind::kSoftmax:
      if (spec.kind == LayerKind::kSoftmax) need_rank(1);
      return in;
    case LayerKind::kDropout:
      if (!(spec.rate >= 0.0 && spec.rate < 1.0)) shape_fail(spec, in, "rate outside [0,1)");
      return in;
    case LayerKind::kConv:
      need_rank(3);
      if (spec.units == 0 || spec.extent == 0) shape_fail(spec, in, "zero filters or kernel");
      if (in[0] < spec.extent || in[1] < spec.extent) shape_fail(spec, in, "kernel larger than input");
      return {in[0] - spec.extent + 1, in[1] - spec.extent + 1, spec.units};
    case LayerKind::kMaxPool:
      need_rank(3);
      if (spec.units == 0) shape_fail(spec, in, "zero pool size");
      if (in[0] < spec.units || in[1] < spec.units) shape_fail(spec, in, "pool larger than input");
      return {in[0] / spec.units, in[1] / spec.units, in[2]};
    case LayerKind::kSqueezeToSequence:
      need_rank(3);
      return {in[0], in[1] * in[2]};
    case LayerKind::kBiLstm:
      need_rank(2);
      if (spec.units == 0) shape_fail(spec, in, "zero hidden size");
      return {in[0], 2 * spec.units};
    case LayerKind::kFlatten:
      if (in.empty()) shape_fail(spec, in, "nothing to flatten");
      return {shape_size(in)};
    case LayerKind::kDense:
      need_rank(1);
      if (spec.units == 0) shape_fail(spec, in, "zero units");
      return {spec.units};
  }
  shape_fail(spec, in, "unknown layer");
}

std::size_t layer_param_count(const LayerSpec& spec, const Shape& in) {
  (void)layer_output_shape(spec, in);
  switch (spec.kind) {
    case LayerKind::kConv:
      return spec.extent * spec.extent * in[2] * spec.units + spec.units;
    case LayerKind::kBiLstm:
      return 2 * 4 * spec.units * (in[1] + spec.units + 1);
    case LayerKind::kDense:
      return in[0] * spec.units + spec.units;
    default:
      return 0;
  }
}

Tensor layer_forward(const LayerSpec& spec, std::span<const double> params, const Tensor& x,
                     bool training, std::uint64_t seed, LayerCache& cache) {
  check_input(spec, x);
  const std::size_t b = x.dim(0);
  const Shape in = sample_shape(x);
  if (params.size() != layer_param_count(spec, in)) throw ShapeError("parameter count mismatch");
  const Shape out = layer_output_shape(spec, in);
  switch (spec.kind) {
    case LayerKind::kResize: {
      const std::size_t h = in[0], w = in[1], c = in[2];
      if (h == out[0] && w == out[1]) return x;
      const auto ty = resize_axis(h, out[0]);
      const auto tx = resize_axis(w, out[1]);
      Tensor y(with_batch(b, out));
      for (std::size_t n = 0; n < b; ++n) {
        const double* xs = x.data().data() + n * h * w * c;
        double* ys = y.data().data() + n * out[0] * out[1] * c;
        for (std::size_t r = 0; r < out[0]; ++r) {
          const auto [r0, r1, fy] = ty[r];
          for (std::size_t q = 0; q < out[1]; ++q) {
            const auto [q0, q1, fx] = tx[q];
            for (std::size_t ch = 0; ch < c; ++ch) {
              const double top = xs[(r0 * w + q0) * c + ch] * (1.0 - fx) + xs[(r0 * w + q1) * c + ch] * fx;
              const double bot = xs[(r1 * w + q0) * c + ch] * (1.0 - fx) + xs[(r1 * w + q1) * c + ch] * fx;
              ys[(r * out[1] + q) * c + ch] = top * (1.0 - fy) + bot * fy;
            }
          }
        }
      }
      return y;
    }
    case LayerKind::kNormalize: {
      Tensor y(x.shape());
      for (std::size_t i = 0; i < x.size(); ++i) y[i] = (x[i] - 0.5) / 0.5;
      return y;
    }
    case LayerKind::kConv:
      return conv_forward(spec, params, x);
    case LayerKind::kMaxPool: {
      const std::size_t h = in[0], w = in[1], c = in[2], k = spec.units;
      Tensor y(with_batch(b, out));
      cache.index.assign(y.size(), 0);
      std::size_t o = 0;
      for (std::size_t n = 0; n < b; ++n) {
        const std::size_t base = n * h * w * c;
        for (std::size_t r = 0; r < out[0]; ++r) {
          for (std::size_t q = 0; q < out[1]; ++q) {
            for (std::size_t ch = 0; ch < c; ++ch, ++o) {
              std::size_t best = base + ((r * k) * w + q * k) * c + ch;
              for (std::size_t dy = 0; dy < k; ++dy) {
                for (std::size_t dx = 0; dx < k; ++dx) {
                  const std::size_t idx = base + ((r * k + dy) * w + q * k + dx) * c + ch;
                  if (x[idx] > x[best]) best = idx;
                }
              }
              y[o] = x[best];
              cache.index[o] = best;
            }
          }
        }
      }
      return y;
    }
    case LayerKind::kDropout: {
      if (!training || spec.rate == 0.0) {
        cache.aux.clear();
        return x;
      }
      Rng rng(seed);
      const double keep = 1.0 - spec.rate;
      cache.aux.resize(x.size());
      Tensor y(x.shape());
      for (std::size_t i = 0; i < x.size(); ++i) {
        cache.aux[i] = uniform_unit(rng) < spec.rate ? 0.0 : 1.0 / keep;
        y[i] = x[i] * cache.aux[i];
      }
      return y;
    }
    case LayerKind::kSqueezeToSequence:
    case LayerKind::kFlatten:
      return x.reshaped(with_batch(b, out));
    case LayerKind::kBiLstm:
      return bilstm_forward(lstm_dims(spec, x), params, x, cache);
    case LayerKind::kDense: {
      const std::size_t ni = in[0], no = spec.units;
      const double* bias = params.data() + ni * no;
      Tensor y({b, no});
      for (std::size_t n = 0; n < b; ++n) {
        double* out_row = y.data().data() + n * no;
        std::copy(bias, bias + no, out_row);
        const double* xr = x.data().data() + n * ni;
        for (std::size_t j = 0; j < ni; ++j) {
          const double v = xr[j];
          if (v == 0.0) continue;
          const double* wj = params.data() + j * no;
          for (std::size_t c = 0; c < no; ++c) out_row[c] += v * wj[c];
        }
        if (spec.activation == Activation::kRelu) {
          for (std::size_t c = 0; c < no; ++c) out_row[c] = std::max(out_row[c], 0.0);
        }
      }
      return y;
    }
    case LayerKind::kSoftmax: {
      const std::size_t nc = in[0];
      Tensor y(x.shape());
      for (std::size_t n = 0; n < b; ++n) {
        const double* z = x.data().data() + n * nc;
        double* p = y.data().data() + n * nc;
        const double m = *std::max_element(z, z + nc);
        double sum = 0.0;
        for (std::size_t c = 0; c < nc; ++c) sum += (p[c] = std::exp(z[c] - m));
        for (std::size_t c = 0; c < nc; ++c) p[c] /= sum;
      }
      return y;
    }
  }
  throw ShapeError("unknown layer");
}

Tensor layer_backward(const LayerSpec& spec, std::span<const double> params, const Tensor& x,
                      const Tensor& y, const LayerCache& cache, const Tensor& dy,
                      std::span<double> dparams, bool need_dx) {
  if (dy.shape() != y.shape()) throw ShapeError("gradient shape does not match layer output");
  if (dparams.size() != params.size()) throw ShapeError("gradient buffer size mismatch");
  const std::size_t b = x.dim(0);
  const Shape in = sample_shape(x);
  switch (spec.kind) {
    case LayerKind::kResize: {
      if (!need_dx) return {};
      const std::size_t h = in[0], w = in[1], c = in[2];
      const Shape out = sample_shape(y);
      if (h == out[0] && w == out[1]) return dy;
      const auto ty = resize_axis(h, out[0]);
      const auto tx = resize_axis(w, out[1]);
      Tensor dx(x.shape());
      for (std::size_t n = 0; n < b; ++n) {
        double* dxs = dx.data().data() + n * h * w * c;
        const double* g = dy.data().data() + n * out[0] * out[1] * c;
        for (std::size_t r = 0; r < out[0]; ++r) {
          const auto [r0, r1, fy] = ty[r];
          for (std::size_t q = 0; q < out[1]; ++q) {
            const auto [q0, q1, fx] = tx[q];
            for (std::size_t ch = 0; ch < c; ++ch) {
              const double v = g[(r * out[1] + q) * c + ch];
              dxs[(r0 * w + q0) * c + ch] += v * (1.0 - fy) * (1.0 - fx);
              dxs[(r0 * w + q1) * c + ch] += v * (1.0 - fy) * fx;
              dxs[(r1 * w + q0) * c + ch] += v * fy * (1.0 - fx);
              dxs[(r1 * w + q1) * c + ch] += v * fy * fx;
            }
          }
        }
      }
      return dx;
    }
    case LayerKind::kNormalize: {
      if (!need_dx) return {};
      Tensor dx(x.shape());
      for (std::size_t i = 0; i < dx.size(); ++i) dx[i] = dy[i] / 0.5;
      return dx;
    }
    case LayerKind::kConv:
      return conv_backward(spec, params, x, y, dy, dparams, need_dx);
    case LayerKind::kMaxPool: {
      if (!need_dx) return {};
      Tensor dx(x.shape());
      for (std::size_t o = 0; o < dy.size(); ++o) dx[cache.index[o]] += dy[o];
      return dx;
    }
    case LayerKind::kDropout: {
      if (!need_dx) return {};
      if (cache.aux.empty()) return dy;
      Tensor dx(x.shape());
      for (std::size_t i = 0; i < dx.size(); ++i) dx[i] = dy[i] * cache.aux[i];
      return dx;
    }
    case LayerKind::kSqueezeToSequence:
    case LayerKind::kFlatten:
      return need_dx ? dy.reshaped(x.shape()) : Tensor();
    case LayerKind::kBiLstm:
      return bilstm_backward(lstm_dims(spec, x), params, x, cache, dy, dparams, need_dx);
    case LayerKind::kDense: {
      const std::size_t ni = in[0], no = spec.units;
      Tensor g = dy;
      if (spec.activation == Activation::kRelu) {
        for (std::size_t i = 0; i < g.size(); ++i) {
          if (!(y[i] > 0.0)) g[i] = 0.0;
        }
      }
      double* dbias = dparams.data() + ni * no;
      Tensor dx;
      if (need_dx) dx = Tensor(x.shape());
      for (std::size_t n = 0; n < b; ++n) {
        const double* gr = g.data().data() + n * no;
        const double* xr = x.data().data() + n * ni;
        for (std::size_t c = 0; c < no; ++c) dbias[c] += gr[c];
        for (std::size_t j = 0; j < ni; ++j) {
          double* dwj = dparams.data() + j * no;
          const double v = xr[j];
          if (v != 0.0) {
            for (std::size_t c = 0; c < no; ++c) dwj[c] += v * gr[c];
          }
          if (need_dx) {
            const double* wj = params.data() + j * no;
            double s = 0.0;
            for (std::size_t c = 0; c < no; ++c) s += wj[c] * gr[c];
            dx[n * ni + j] = s;
          }
        }
      }
      return dx;
    }
    case LayerKind::kSoftmax: {
      if (!need_dx) return {};
      const std::size_t nc = in[0];
      Tensor dx(x.shape());
      for (std::size_t n = 0; n < b; ++n) {
        const double* p = y.data().data() + n * nc;
        const double* g = dy.data().data() + n * nc;
        double dot = 0.0;
        for (std::size_t c = 0; c < nc; ++c) dot += p[c] * g[c];
        for (std::size_t c = 0; c < nc; ++c) dx[n * nc + c] = p[c] * (g[c] - dot);
      }
      return dx;
    }
  }
  throw ShapeError("unknown layer");
}

}  // namespace synthdetect
