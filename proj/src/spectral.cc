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

#include "synthdetect/spectral.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "synthdetect/errors.h"

namespace synthdetect {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void fft_radix2(std::vector<Complex>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  // Twiddles evaluated directly per index; a running product loses ~1e-13
  // at n = 4096.
  std::vector<Complex> twiddle(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k)
    twiddle[k] = std::polar(1.0, -2.0 * kPi * static_cast<double>(k) / static_cast<double>(n));
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    const std::size_t half = len / 2;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const Complex u = a[i + k];
        const Complex v = a[i + k + half] * twiddle[k * stride];
        a[i + k] = u + v;
        a[i + k + half] = u - v;
      }
    }
  }
}

void fft_bluestein(std::vector<Complex>& x) {
  const std::size_t n = x.size();
  const std::size_t m = next_pow2(2 * n - 1);
  // k^2 reduced mod 2n keeps the chirp argument small.
  std::vector<Complex> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t k2 = (k * k) % (2 * n);
    chirp[k] = std::polar(1.0, -kPi * static_cast<double>(k2) / static_cast<double>(n));
  }
  std::vector<Complex> a(m), b(m);
  for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
  b[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) b[k] = b[m - k] = std::conj(chirp[k]);
  fft_radix2(a);
  fft_radix2(b);
  for (std::size_t i = 0; i < m; ++i) a[i] *= b[i];
  // Inverse via conjugation.
  for (auto& v : a) v = std::conj(v);
  fft_radix2(a);
  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < n; ++k) x[k] = std::conj(a[k]) * scale * chirp[k];
}

}  // namespace

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft_inplace(std::vector<Complex>& data) {
  if (data.size() <= 1) return;
  if (is_pow2(data.size())) fft_radix2(data);
  else fft_bluestein(data);
}

ComplexSpectrum dft(std::span<const double> signal) {
  if (signal.empty()) throw ConfigError("dft of an empty signal");
  ComplexSpectrum spec;
  spec.bins.assign(signal.begin(), signal.end());
  fft_inplace(spec.bins);
  return spec;
}

std::vector<double> power_spectrum(const ComplexSpectrum& spec) {
  std::vector<double> p(spec.n());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::norm(spec.bins[k]);
  return p;
}

std::vector<double> make_window(Window window, std::size_t length) {
  std::vector<double> w(length, 1.0);
  if (window == Window::kHann) {
    for (std::size_t i = 0; i < length; ++i)
      w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(length));
  }
  return w;
}

Spectrogram stft(const AudioClip& clip, std::size_t frame_len, std::size_t hop,
                 Window window) {
  if (frame_len == 0 || hop == 0) throw ConfigError("frame length and hop must be >= 1");
  if (clip.channels() != 1) throw ConfigError("stft expects a mono clip");
  const auto x = clip.samples();
  if (x.size() < frame_len)
    throw EmptyResult("clip shorter than one frame (" + std::to_string(frame_len) +
                      " samples)");

  const std::size_t n_frames = (x.size() - frame_len) / hop + 1;
  const std::size_t n_fft = next_pow2(frame_len);
  const std::size_t n_bins = n_fft / 2 + 1;
  const auto w = make_window(window, frame_len);

  Spectrogram out;
  out.frames = RealMatrix(n_frames, n_bins);
  out.frame_len = frame_len;
  out.hop = hop;
  out.scale = SpectrogramScale::kPower;

  std::vector<Complex> buf(n_fft);
  for (std::size_t t = 0; t < n_frames; ++t) {
    std::fill(buf.begin(), buf.end(), Complex{});
    for (std::size_t i = 0; i < frame_len; ++i) buf[i] = x[t * hop + i] * w[i];
    fft_inplace(buf);
    auto row = out.frames.row(t);
    for (std::size_t k = 0; k < n_bins; ++k) row[k] = std::norm(buf[k]);
  }
  return out;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterbank mel_filterbank(std::size_t n_filters, std::size_t n_fft,
                             int sample_rate, double f_min, double f_max) {
  if (n_filters == 0) throw ConfigError("mel filterbank needs at least one filter");
  if (!is_pow2(n_fft)) throw ConfigError("n_fft must be a power of two");
  if (sample_rate <= 0) throw ConfigError("sample rate must be positive");
  const double nyquist = sample_rate / 2.0;
  if (f_max <= 0.0) f_max = nyquist;
  if (f_max > nyquist) throw ConfigError("f_max exceeds the Nyquist frequency");
  if (f_min < 0.0 || f_min >= f_max) throw ConfigError("need 0 <= f_min < f_max");

  const std::size_t n_bins = n_fft / 2 + 1;
  const double mel_lo = hz_to_mel(f_min);
  const double mel_hi = hz_to_mel(f_max);

  // n_filters + 2 edge points; filter m rises over [p[m], p[m+1]] and falls
  // over [p[m+1], p[m+2]].
  std::vector<std::size_t> points(n_filters + 2);
  MelFilterbank fb;
  fb.f_min = f_min;
  fb.f_max = f_max;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double mel = mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                    static_cast<double>(n_filters + 1);
    const double hz = mel_to_hz(mel);
    points[i] = std::min<std::size_t>(
        static_cast<std::size_t>(std::floor(static_cast<double>(n_fft) * hz / sample_rate)),
        n_bins - 1);
    if (i > 0 && i <= n_filters) fb.centers_hz.push_back(hz);
  }
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i] <= points[i - 1])
      throw ConfigError("too many mel filters for n_fft=" + std::to_string(n_fft) +
                        ": adjacent filter points share FFT bin " +
                        std::to_string(points[i]));
  }

  fb.weights = RealMatrix(n_filters, n_bins);
  for (std::size_t m = 0; m < n_filters; ++m) {
    const std::size_t lo = points[m], mid = points[m + 1], hi = points[m + 2];
    for (std::size_t k = lo; k <= mid; ++k)
      fb.weights(m, k) = static_cast<double>(k - lo) / static_cast<double>(mid - lo);
    for (std::size_t k = mid; k <= hi; ++k)
      fb.weights(m, k) = static_cast<double>(hi - k) / static_cast<double>(hi - mid);
  }
  return fb;
}

std::size_t SpectralConfig::frame_len(int sample_rate) const {
  return static_cast<std::size_t>(std::llround(frame_ms * 1e-3 * sample_rate));
}

std::size_t SpectralConfig::hop(int sample_rate) const {
  return static_cast<std::size_t>(std::llround(hop_ms * 1e-3 * sample_rate));
}

Spectrogram mel_spectrogram(const AudioClip& clip, const SpectralConfig& cfg) {
  const std::size_t frame_len = cfg.frame_len(clip.sample_rate());
  const Spectrogram power = stft(clip, frame_len, cfg.hop(clip.sample_rate()), cfg.window);
  const MelFilterbank fb = mel_filterbank(cfg.n_filters, next_pow2(frame_len),
                                          clip.sample_rate(), cfg.f_min, cfg.f_max);

  Spectrogram out;
  out.frames = RealMatrix(power.frames.rows(), cfg.n_filters);
  out.frame_len = power.frame_len;
  out.hop = power.hop;
  out.scale = SpectrogramScale::kMelLog;
  for (std::size_t t = 0; t < power.frames.rows(); ++t) {
    const auto p = power.frames.row(t);
    for (std::size_t m = 0; m < cfg.n_filters; ++m) {
      const auto w = fb.weights.row(m);
      double energy = 0.0;
      for (std::size_t k = 0; k < p.size(); ++k) energy += w[k] * p[k];
      out.frames(t, m) = std::log(energy + kLogFloor);
    }
  }
  return out;
}

RealMatrix bilinear_resize(const RealMatrix& in, std::size_t rows, std::size_t cols) {
  if (in.empty() || rows == 0 || cols == 0) throw ConfigError("cannot resize an empty matrix");
  RealMatrix out(rows, cols);
  const double sy = static_cast<double>(in.rows()) / static_cast<double>(rows);
  const double sx = static_cast<double>(in.cols()) / static_cast<double>(cols);
  const auto source = [](std::size_t i, double scale, std::size_t n) {
    const double s = std::clamp((static_cast<double>(i) + 0.5) * scale - 0.5, 0.0,
                                static_cast<double>(n - 1));
    const auto i0 = static_cast<std::size_t>(std::floor(s));
    const std::size_t i1 = std::min(i0 + 1, n - 1);
    return std::tuple{i0, i1, s - static_cast<double>(i0)};
  };
  for (std::size_t r = 0; r < rows; ++r) {
    const auto [r0, r1, fy] = source(r, sy, in.rows());
    for (std::size_t c = 0; c < cols; ++c) {
      const auto [c0, c1, fx] = source(c, sx, in.cols());
      const double top = in(r0, c0) * (1.0 - fx) + in(r0, c1) * fx;
      const double bottom = in(r1, c0) * (1.0 - fx) + in(r1, c1) * fx;
      out(r, c) = top * (1.0 - fy) + bottom * fy;
    }
  }
  return out;
}

RealMatrix minmax_scale(const RealMatrix& in) {
  if (in.empty()) throw ConfigError("cannot normalise an empty matrix");
  const auto [lo, hi] = std::minmax_element(in.values().begin(), in.values().end());
  const double min = *lo, range = *hi - *lo;
  RealMatrix out(in.rows(), in.cols());
  if (range > 0.0) {
    auto o = out.values();
    const auto v = in.values();
    for (std::size_t i = 0; i < v.size(); ++i) o[i] = std::clamp((v[i] - min) / range, 0.0, 1.0);
  }
  return out;
}

RealMatrix spectrogram_image(const Spectrogram& spec, std::size_t rows, std::size_t cols) {
  if (spec.frames.empty()) throw ConfigError("empty spectrogram");
  return bilinear_resize(minmax_scale(spec.frames), rows, cols);
}

}  // namespace synthdetect
