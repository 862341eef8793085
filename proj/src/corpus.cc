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

#include "synthdetect/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <string>

#include "synthdetect/errors.h"
#include "synthdetect/random.h"

namespace synthdetect {
namespace {

// Box-Muller on the portable uniform draw, so corpora match across
// standard libraries.
double gaussian(Rng& rng) {
  const double u1 = 1.0 - uniform_unit(rng);
  const double u2 = uniform_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform_unit(rng); }

}  // namespace

double class_tilt(ClassLabel label) {
  switch (label) {
    case ClassLabel::kHuman:
      return 1.0;
    case ClassLabel::kNaturalReader:
      return 0.4;
    case ClassLabel::kSpikAI:
      return 1.6;
    case ClassLabel::kReplica:
      return 0.7;
  }
  return 1.0;
}

AudioClip synth_clip(ClassLabel label, std::uint64_t seed, const SynthOptions& opts) {
  if (opts.sample_rate <= 0 || !(opts.duration_s > 0.0) || opts.harmonics == 0)
    throw ConfigError("invalid synthesis options");
  Rng rng(seed);
  const auto n = static_cast<std::size_t>(std::llround(opts.duration_s * opts.sample_rate));
  const double f0 = uniform(rng, opts.f0_min, opts.f0_max);
  const double gain = uniform(rng, 0.3, 0.8);
  const double tilt = class_tilt(label);
  const bool coupled = label != ClassLabel::kHuman;
  const std::size_t H = opts.harmonics;
  const double w0 = 2.0 * std::numbers::pi * f0 / opts.sample_rate;

  std::vector<double> amp(H), offset(H);
  double amp_sum = 0.0;
  for (std::size_t h = 0; h < H; ++h) {
    amp[h] = std::pow(static_cast<double>(h + 1), -tilt);
    amp_sum += amp[h];
    offset[h] = uniform(rng, -std::numbers::pi, std::numbers::pi);
  }
  // Coupled clips share one walk scaled by the harmonic number.
  std::vector<double> walk(coupled ? 1 : H, 0.0);
  std::vector<double> samples(n);
  for (std::size_t t = 0; t < n; ++t) {
    for (double& w : walk) w += opts.phase_walk * gaussian(rng);
    double s = 0.0;
    for (std::size_t h = 0; h < H; ++h) {
      const double k = static_cast<double>(h + 1);
      const double phase = coupled ? k * (w0 * static_cast<double>(t) + walk[0] + offset[0])
                                   : k * w0 * static_cast<double>(t) + walk[h] + offset[h];
      s += amp[h] * std::cos(phase);
    }
    samples[t] = std::clamp(gain * s / amp_sum + opts.noise * gaussian(rng), -1.0, 1.0);
  }
  return AudioClip(std::move(samples), opts.sample_rate, 1,
                   std::string(label_name(label)) + "-" + std::to_string(seed));
}

std::vector<SynthCorpusEntry> write_synth_corpus(const std::filesystem::path& dir,
                                                 std::size_t n_clips, std::size_t n_classes,
                                                 std::uint64_t seed, const SynthOptions& opts) {
  if (n_classes != 2 && n_classes != 4) throw ConfigError("synthetic corpus needs 2 or 4 classes");
  if (n_clips == 0) throw ConfigError("synthetic corpus needs at least one clip");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  std::vector<SynthCorpusEntry> entries;
  std::ofstream manifest(dir / "manifest.csv");
  if (!manifest) throw IoError("cannot write " + (dir / "manifest.csv").string());
  manifest << "# path,label\n";
  for (std::size_t i = 0; i < n_clips; ++i) {
    const auto label = static_cast<ClassLabel>(i % n_classes);
    char name[32];
    std::snprintf(name, sizeof name, "clip_%05zu.wav", i);
    const AudioClip clip = synth_clip(label, derive_seed(seed, i), opts);
    write_wav_file(dir / name, clip);
    manifest << name << ',' << label_name(label) << '\n';
    entries.push_back({name, label});
  }
  if (!manifest) throw IoError("failed writing manifest");
  return entries;
}

}  // namespace synthdetect
