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

#include "synthdetect/cepstral.h"

#include <cmath>
#include <numbers>

#include "synthdetect/errors.h"

namespace synthdetect {

std::vector<double> dct_ii(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) throw ConfigError("dct of an empty vector");

  // Even samples forward, odd samples reversed (Makhoul reordering).
  std::vector<Complex> v(n);
  for (std::size_t i = 0; 2 * i < n; ++i) v[i] = x[2 * i];
  for (std::size_t i = 0; 2 * i + 1 < n; ++i) v[n - 1 - i] = x[2 * i + 1];
  fft_inplace(v);

  const double nd = static_cast<double>(n);
  const double s0 = std::sqrt(1.0 / nd), sk = std::sqrt(2.0 / nd);
  std::vector<double> c(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Complex shift = std::polar(1.0, -std::numbers::pi * static_cast<double>(k) / (2.0 * nd));
    c[k] = (shift * v[k]).real() * (k == 0 ? s0 : sk);
  }
  return c;
}

std::vector<double> dct_iii(std::span<const double> c) {
  const std::size_t n = c.size();
  if (n == 0) throw ConfigError("dct of an empty vector");

  const double nd = static_cast<double>(n);
  const double s0 = std::sqrt(1.0 / nd), sk = std::sqrt(2.0 / nd);
  const auto unscaled = [&](std::size_t k) { return k == 0 ? c[0] / s0 : c[k] / sk; };

  // Rebuild the spectrum of the reordered sequence, then invert the FFT by
  // conjugation.
  std::vector<Complex> v(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double re = unscaled(k);
    const double im = k == 0 ? 0.0 : -unscaled(n - k);
    const Complex shift = std::polar(1.0, std::numbers::pi * static_cast<double>(k) / (2.0 * nd));
    v[k] = std::conj(shift * Complex(re, im));
  }
  fft_inplace(v);

  std::vector<double> x(n);
  for (std::size_t i = 0; 2 * i < n; ++i) x[2 * i] = v[i].real() / nd;
  for (std::size_t i = 0; 2 * i + 1 < n; ++i) x[2 * i + 1] = v[n - 1 - i].real() / nd;
  return x;
}

CepstralMatrix mfcc(const AudioClip& clip, const MfccConfig& cfg) {
  if (cfg.n_coeffs == 0 || cfg.n_coeffs > cfg.spectral.n_filters)
    throw ConfigError("n_coeffs must be in [1, n_filters]");
  const Spectrogram mel = mel_spectrogram(clip, cfg.spectral);

  CepstralMatrix out;
  out.kind = CepstralKind::kMfcc;
  out.values = RealMatrix(mel.frames.rows(), cfg.n_coeffs);
  for (std::size_t t = 0; t < mel.frames.rows(); ++t) {
    const auto coeffs = dct_ii(mel.frames.row(t));
    auto row = out.values.row(t);
    for (std::size_t k = 0; k < cfg.n_coeffs; ++k) row[k] = coeffs[k];
  }
  return out;
}

CepstralMatrix delta(const CepstralMatrix& m) {
  CepstralMatrix out;
  out.kind = m.kind == CepstralKind::kMfcc ? CepstralKind::kDelta : CepstralKind::kDelta2;
  out.values = RealMatrix(m.values.rows(), m.values.cols());
  for (std::size_t t = 1; t < m.values.rows(); ++t) {
    const auto cur = m.values.row(t);
    const auto prev = m.values.row(t - 1);
    auto d = out.values.row(t);
    for (std::size_t k = 0; k < d.size(); ++k) d[k] = cur[k] - prev[k];
  }
  return out;
}

}  // namespace synthdetect
