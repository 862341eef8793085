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

#ifndef SYNTHDETECT_SPECTRAL_H_
#define SYNTHDETECT_SPECTRAL_H_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "synthdetect/audio_io.h"
#include "synthdetect/matrix.h"

namespace synthdetect {

using Complex = std::complex<double>;

struct ComplexSpectrum {
  std::vector<Complex> bins;
  std::size_t n() const { return bins.size(); }
};

// In-place forward DFT of any length. Radix-2 for powers of two,
// Bluestein's chirp-z otherwise.
void fft_inplace(std::vector<Complex>& data);

// Y[k] = sum_t y[t] exp(-2*pi*i*k*t/n), full length n.
ComplexSpectrum dft(std::span<const double> signal);

// |Y[k]|^2 per bin.
std::vector<double> power_spectrum(const ComplexSpectrum& spec);

std::size_t next_pow2(std::size_t n);

enum class Window { kRectangular, kHann };

// Periodic window of the given length.
std::vector<double> make_window(Window window, std::size_t length);

enum class SpectrogramScale { kPower, kMelLog };

struct Spectrogram {
  RealMatrix frames;  // time x frequency
  std::size_t frame_len = 0;
  std::size_t hop = 0;
  SpectrogramScale scale = SpectrogramScale::kPower;
};

// Frame t covers samples [t*hop, t*hop + frame_len). Each frame is windowed,
// zero-padded to next_pow2(frame_len) and reduced to the one-sided power
// spectrum (n_fft/2 + 1 bins).
Spectrogram stft(const AudioClip& clip, std::size_t frame_len, std::size_t hop,
                 Window window = Window::kHann);

double hz_to_mel(double hz);
double mel_to_hz(double mel);

struct MelFilterbank {
  RealMatrix weights;  // n_filters x (n_fft/2 + 1)
  std::vector<double> centers_hz;
  double f_min = 0.0;
  double f_max = 0.0;
};

// Triangular filters with centres equally spaced on the mel scale. f_max <= 0
// selects the Nyquist frequency.
MelFilterbank mel_filterbank(std::size_t n_filters, std::size_t n_fft,
                             int sample_rate, double f_min = 0.0,
                             double f_max = 0.0);

inline constexpr double kLogFloor = 1e-10;

// Frame geometry and filterbank shared by mel spectrograms and MFCCs.
struct SpectralConfig {
  double frame_ms = 25.0;
  double hop_ms = 10.0;
  Window window = Window::kHann;
  std::size_t n_filters = 26;
  double f_min = 0.0;
  double f_max = 0.0;  // <= 0: Nyquist

  std::size_t frame_len(int sample_rate) const;
  std::size_t hop(int sample_rate) const;
};

// log(filterbank * power + kLogFloor) per frame; rows are frames.
Spectrogram mel_spectrogram(const AudioClip& clip, const SpectralConfig& cfg);

// Half-pixel-centre bilinear resampling.
RealMatrix bilinear_resize(const RealMatrix& in, std::size_t rows, std::size_t cols);

// (x - min) / (max - min); all zeros when max == min.
RealMatrix minmax_scale(const RealMatrix& in);

// Fixed-size [0,1] image for the CRNN: min-max scaled, then resized.
RealMatrix spectrogram_image(const Spectrogram& spec, std::size_t rows = 32,
                             std::size_t cols = 32);

}  // namespace synthdetect

#endif  // SYNTHDETECT_SPECTRAL_H_
