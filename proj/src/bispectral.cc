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

#include "synthdetect/bispectral.h"

#include <cmath>
#include <numbers>

#include "synthdetect/errors.h"

namespace synthdetect {

namespace {

void check_grid(std::size_t segment_len, std::size_t grid) {
  if (grid == 0) throw ConfigError("bispectral grid must have at least one bin");
  if (segment_len < 2 * grid)
    throw ConfigError("grid of " + std::to_string(grid) + " bins needs segments of at least " +
                      std::to_string(2 * grid) + " samples, got " +
                      std::to_string(segment_len));
}

}  // namespace

double wrap_phase(double radians) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  // Sums that are mathematically +-pi (real-valued DC bins) land within a few
  // ulps of the cut; they all map to +pi.
  constexpr double kCutTolerance = 1e-9;
  double w = std::remainder(radians, kTwoPi);
  if (w <= -std::numbers::pi + kCutTolerance) w += kTwoPi;
  return w;
}

std::vector<std::vector<double>> segment_signal(std::span<const double> signal,
                                                std::size_t k) {
  if (k == 0) throw ConfigError("segment count must be >= 1");
  if (signal.size() < k)
    throw ConfigError("signal of " + std::to_string(signal.size()) +
                      " samples cannot form " + std::to_string(k) + " segments");
  const std::size_t len = signal.size() / k;
  std::vector<std::vector<double>> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i)
    out.emplace_back(signal.begin() + i * len, signal.begin() + (i + 1) * len);
  return out;
}

std::vector<std::vector<double>> segment_signal(const AudioClip& clip, std::size_t k) {
  if (clip.channels() != 1) throw ConfigError("segment_signal expects a mono clip");
  return segment_signal(clip.samples(), k);
}

ComplexGrid bispectrum_segment(std::span<const double> segment, std::size_t grid) {
  check_grid(segment.size(), grid);
  const ComplexSpectrum y = dft(segment);
  ComplexGrid b;
  b.size = grid;
  b.values.resize(grid * grid);
  for (std::size_t k1 = 0; k1 < grid; ++k1)
    for (std::size_t k2 = 0; k2 < grid; ++k2)
      b.values[k1 * grid + k2] = y.bins[k1] * y.bins[k2] * std::conj(y.bins[k1 + k2]);
  return b;
}

BicoherenceGrid bicoherence_average(const std::vector<std::vector<double>>& segments,
                                    std::size_t grid) {
  if (segments.empty()) throw ConfigError("no segments to average");
  const std::size_t len = segments.front().size();
  for (const auto& s : segments)
    if (s.size() != len) throw ConfigError("segments differ in length");
  check_grid(len, grid);

  BicoherenceGrid out;
  out.magnitude = RealMatrix(grid, grid);
  out.phase = RealMatrix(grid, grid);
  out.grid_size = grid;
  out.k_segments = segments.size();

  const std::size_t used_bins = 2 * grid - 1;
  std::vector<double> mag(used_bins), arg(used_bins);
  for (const auto& segment : segments) {
    const ComplexSpectrum y = dft(segment);
    for (std::size_t k = 0; k < used_bins; ++k) {
      mag[k] = std::abs(y.bins[k]);
      // The angle of an empty bin is taken as 0.
      arg[k] = mag[k] == 0.0 ? 0.0 : std::arg(y.bins[k]);
    }
    for (std::size_t k1 = 0; k1 < grid; ++k1) {
      auto mrow = out.magnitude.row(k1);
      auto prow = out.phase.row(k1);
      for (std::size_t k2 = 0; k2 < grid; ++k2) {
        mrow[k2] += mag[k1] * mag[k2] * mag[k1 + k2];
        prow[k2] += wrap_phase(arg[k1] + arg[k2] - arg[k1 + k2]);
      }
    }
  }
  const double inv_k = 1.0 / static_cast<double>(segments.size());
  for (auto& v : out.magnitude.values()) v *= inv_k;
  for (auto& v : out.phase.values()) v *= inv_k;
  return out;
}

RealMatrix minmax_normalize(const RealMatrix& grid) { return minmax_scale(grid); }

BicoherenceGrid normalized_bicoherence(const AudioClip& clip, const BispectralConfig& cfg) {
  BicoherenceGrid g = bicoherence_average(segment_signal(clip, cfg.segments), cfg.grid_size);
  g.magnitude = minmax_normalize(g.magnitude);
  g.phase = minmax_normalize(g.phase);
  g.normalized = true;
  return g;
}

}  // namespace synthdetect
