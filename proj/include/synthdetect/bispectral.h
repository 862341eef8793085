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

#ifndef SYNTHDETECT_BISPECTRAL_H_
#define SYNTHDETECT_BISPECTRAL_H_

#include <cstddef>
#include <span>
#include <vector>

#include "synthdetect/audio_io.h"
#include "synthdetect/matrix.h"
#include "synthdetect/spectral.h"

namespace synthdetect {

// Square complex grid indexed by (k1, k2).
struct ComplexGrid {
  std::size_t size = 0;
  std::vector<Complex> values;

  Complex operator()(std::size_t k1, std::size_t k2) const { return values[k1 * size + k2]; }
};

// Segment-averaged bispectral magnitude and phase over the first
// grid_size nonnegative frequency bins of each axis.
struct BicoherenceGrid {
  RealMatrix magnitude;
  RealMatrix phase;  // radians in (-pi, pi] until normalised
  std::size_t grid_size = 0;
  std::size_t k_segments = 0;
  bool normalized = false;
};

struct BispectralConfig {
  std::size_t segments = 100;
  std::size_t grid_size = 64;
};

// K contiguous segments of floor(N/K) samples; the remainder is dropped.
std::vector<std::vector<double>> segment_signal(std::span<const double> signal,
                                                std::size_t k);
std::vector<std::vector<double>> segment_signal(const AudioClip& clip, std::size_t k);

// B[k1,k2] = Y[k1] Y[k2] conj(Y[k1+k2]) for k1, k2 < grid. Requires
// segment.size() >= 2 * grid.
ComplexGrid bispectrum_segment(std::span<const double> segment, std::size_t grid);

// Mean over segments of |Y1||Y2||Y12| and of the wrapped phase sum
// arg Y1 + arg Y2 - arg Y12. Summation runs in segment order.
BicoherenceGrid bicoherence_average(const std::vector<std::vector<double>>& segments,
                                    std::size_t grid);

// (x - min) / (max - min); all zeros for a constant matrix.
RealMatrix minmax_normalize(const RealMatrix& grid);

// segment_signal -> bicoherence_average -> minmax_normalize on both grids.
BicoherenceGrid normalized_bicoherence(const AudioClip& clip, const BispectralConfig& cfg);

// Wraps an angle into (-pi, pi].
double wrap_phase(double radians);

}  // namespace synthdetect

#endif  // SYNTHDETECT_BISPECTRAL_H_
