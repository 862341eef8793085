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

#ifndef SYNTHDETECT_CORPUS_H_
#define SYNTHDETECT_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "synthdetect/audio_io.h"

namespace synthdetect {

// Seeded harmonic test signals. Human clips get an independent random-walk
// phase on every harmonic; the synthetic sources lock every harmonic's
// phase to a multiple of the fundamental's (quadratic phase coupling) and
// differ from each other and from Human in spectral tilt.
struct SynthOptions {
  int sample_rate = 16000;
  double duration_s = 4.5;
  std::size_t harmonics = 12;
  double f0_min = 100.0;
  double f0_max = 200.0;
  double phase_walk = 0.05;  // radians per sample, std of the random walk
  double noise = 0.005;
};

// Amplitude of harmonic h is h^-tilt.
double class_tilt(ClassLabel label);

AudioClip synth_clip(ClassLabel label, std::uint64_t seed, const SynthOptions& opts = {});

struct SynthCorpusEntry {
  std::filesystem::path path;  // relative to the corpus directory
  ClassLabel label;
};

// n_clips spread round-robin over the classes: Human and NaturalReader for
// two classes, all four sources otherwise. Writes PCM16 WAV files and a
// manifest.csv with relative paths into dir.
std::vector<SynthCorpusEntry> write_synth_corpus(const std::filesystem::path& dir,
                                                 std::size_t n_clips, std::size_t n_classes,
                                                 std::uint64_t seed,
                                                 const SynthOptions& opts = {});

}  // namespace synthdetect

#endif  // SYNTHDETECT_CORPUS_H_
