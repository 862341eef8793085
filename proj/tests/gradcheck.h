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

// Central finite-difference checks for layer and network gradients.

#ifndef SYNTHDETECT_TESTS_GRADCHECK_H_
#define SYNTHDETECT_TESTS_GRADCHECK_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "synthdetect/crnn.h"

namespace gradcheck {

inline constexpr double kStep = 1e-4;
// Denominator floor so that gradients which are zero up to rounding do not
// turn round-off into large relative errors.
inline constexpr double kFloor = 1e-6;

inline double rel_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max({std::abs(analytic), std::abs(numeric), kFloor});
}

struct Result {
  double max_rel_error = 0.0;
  std::size_t checked = 0;

  void add(double analytic, double numeric) {
    max_rel_error = std::max(max_rel_error, rel_error(analytic, numeric));
    ++checked;
  }
};

inline std::vector<double> random_values(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// Checks one layer under the scalar loss L = sum(r * y) for a fixed random
// r, over every parameter and every input element.
inline Result check_layer(const synthdetect::LayerSpec& spec, const synthdetect::Shape& batch_shape,
                          std::mt19937_64& rng, bool training = true, std::uint64_t seed = 7) {
  using namespace synthdetect;
  Tensor x(batch_shape, random_values(shape_size(batch_shape), rng));
  const Shape in(batch_shape.begin() + 1, batch_shape.end());
  std::vector<double> params = random_values(layer_param_count(spec, in), rng, 0.5);
  LayerCache cache;
  const Tensor y = layer_forward(spec, params, x, training, seed, cache);
  const Tensor r(y.shape(), random_values(y.size(), rng));
  auto loss = [&](const std::vector<double>& p, const Tensor& xin) {
    LayerCache c;
    const Tensor out = layer_forward(spec, p, xin, training, seed, c);
    double s = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) s += r[i] * out[i];
    return s;
  };
  std::vector<double> dparams(params.size(), 0.0);
  const Tensor dx = layer_backward(spec, params, x, y, cache, r, dparams, true);

  Result res;
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params;
    p[i] = params[i] + kStep;
    const double up = loss(p, x);
    p[i] = params[i] - kStep;
    const double down = loss(p, x);
    res.add(dparams[i], (up - down) / (2.0 * kStep));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    Tensor xp = x;
    xp[i] = x[i] + kStep;
    const double up = loss(params, xp);
    xp[i] = x[i] - kStep;
    const double down = loss(params, xp);
    res.add(dx[i], (up - down) / (2.0 * kStep));
  }
  return res;
}

// True when two forward passes took different branches at some ReLU or
// max-pool, i.e. a finite difference between them straddles a kink.
inline bool crosses_kink(const synthdetect::Network& net, const synthdetect::ForwardResult& a,
                         const synthdetect::ForwardResult& b) {
  using namespace synthdetect;
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    const auto& spec = net.layers()[l];
    if (spec.kind == LayerKind::kMaxPool && a.caches[l].index != b.caches[l].index) return true;
    if (spec.activation == Activation::kRelu) {
      const auto& ya = a.activations[l + 1];
      const auto& yb = b.activations[l + 1];
      for (std::size_t i = 0; i < ya.size(); ++i) {
        if ((ya[i] > 0.0) != (yb[i] > 0.0)) return true;
      }
    }
  }
  return false;
}

// Checks the mean cross-entropy of a training-mode forward pass (fixed
// dropout masks). stride > 1 samples every stride-th parameter of each
// layer, starting at a random offset. Where the +-step pair straddles a
// kink the step is shrunk tenfold (down to 1e-8) until it does not.
inline Result check_network(synthdetect::Network& net, const synthdetect::Tensor& batch,
                            const std::vector<int>& labels, std::uint64_t dropout_seed,
                            std::size_t stride, std::mt19937_64& rng,
                            std::size_t* shrunk = nullptr) {
  using namespace synthdetect;
  const auto fr = net.forward(batch, Mode::kTrain, dropout_seed);
  const auto grads = net.backward(fr, labels);
  stride = std::max<std::size_t>(stride, 1);
  Result res;
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    auto& p = net.params(l);
    if (p.empty()) continue;
    const std::size_t start =
        stride > 1 ? std::uniform_int_distribution<std::size_t>(0, stride - 1)(rng) % p.size() : 0;
    for (std::size_t i = start; i < p.size(); i += stride) {
      const double orig = p[i];
      double numeric = 0.0;
      for (double h = kStep; h >= 1e-8; h /= 10.0) {
        p[i] = orig + h;
        const auto up = net.forward(batch, Mode::kTrain, dropout_seed);
        p[i] = orig - h;
        const auto down = net.forward(batch, Mode::kTrain, dropout_seed);
        numeric = (cross_entropy(up.output(), labels) - cross_entropy(down.output(), labels)) / (2.0 * h);
        if (!crosses_kink(net, up, down)) break;
        if (shrunk && h == kStep) ++*shrunk;
      }
      p[i] = orig;
      res.add(grads.layers[l][i], numeric);
    }
  }
  return res;
}

}  // namespace gradcheck

#endif  // SYNTHDETECT_TESTS_GRADCHECK_H_
