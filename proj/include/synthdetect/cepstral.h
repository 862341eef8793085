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

#ifndef SYNTHDETECT_CEPSTRAL_H_
#define SYNTHDETECT_CEPSTRAL_H_

#include <cstddef>
#include <span>
#include <vector>

#include "synthdetect/audio_io.h"
#include "synthdetect/matrix.h"
#include "synthdetect/spectral.h"

namespace synthdetect {

enum class CepstralKind { kMfcc, kDelta, kDelta2 };

struct CepstralMatrix {
  RealMatrix values;  // frames x coefficients
  CepstralKind kind = CepstralKind::kMfcc;
};

// Orthonormal DCT-II computed through an n-point FFT.
std::vector<double> dct_ii(std::span<const double> x);

// Orthonormal DCT-III, the inverse of dct_ii.
std::vector<double> dct_iii(std::span<const double> c);

struct MfccConfig {
  SpectralConfig spectral;
  std::size_t n_coeffs = 13;
};

// window -> power spectrum -> mel filterbank -> log -> DCT-II, first
// n_coeffs coefficients (c0 included).
CepstralMatrix mfcc(const AudioClip& clip, const MfccConfig& cfg);

// d[t] = c[t] - c[t-1], d[0] = 0. Applied to a delta matrix it yields the
// second difference.
CepstralMatrix delta(const CepstralMatrix& m);

}  // namespace synthdetect

#endif  // SYNTHDETECT_CEPSTRAL_H_
