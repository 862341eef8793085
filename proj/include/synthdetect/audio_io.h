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

#ifndef SYNTHDETECT_AUDIO_IO_H_
#define SYNTHDETECT_AUDIO_IO_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace synthdetect {

// Source classes of the corpus. Order is the class index used by every
// multi-class model.
enum class ClassLabel { kHuman = 0, kNaturalReader, kSpikAI, kReplica };

inline constexpr int kNumClassLabels = 4;

enum class BinaryLabel { kHuman = 0, kSynthetic };

constexpr BinaryLabel to_binary(ClassLabel label) {
  return label == ClassLabel::kHuman ? BinaryLabel::kHuman
                                     : BinaryLabel::kSynthetic;
}

std::string_view label_name(ClassLabel label);
std::string_view label_name(BinaryLabel label);

// Case-insensitive; accepts the canonical names printed by label_name.
std::optional<ClassLabel> parse_label(std::string_view text);

// Decoded PCM audio. Samples are interleaved when channels() > 1.
// Immutable once constructed.
class AudioClip {
 public:
  AudioClip() = default;
  AudioClip(std::vector<double> samples, int sample_rate, int channels = 1,
            std::string source_id = {});

  std::span<const double> samples() const { return samples_; }
  int sample_rate() const { return sample_rate_; }
  int channels() const { return channels_; }
  const std::string& source_id() const { return source_id_; }

  std::size_t frames() const {
    return channels_ > 0 ? samples_.size() / channels_ : 0;
  }
  double duration_seconds() const {
    return static_cast<double>(frames()) / sample_rate_;
  }
  bool empty() const { return samples_.empty(); }

 private:
  std::vector<double> samples_;
  int sample_rate_ = 0;
  int channels_ = 1;
  std::string source_id_;
};

// Parses a RIFF/WAVE container holding 16-bit PCM or 32-bit IEEE float.
// PCM16 is scaled by 1/32768; float samples are clamped to [-1, 1].
AudioClip decode_wav(std::span<const std::uint8_t> bytes,
                     std::string source_id = {});

// Reads and decodes a file; the path becomes the clip's source id.
AudioClip read_wav_file(const std::filesystem::path& path);

enum class WavEncoding { kPcm16, kFloat32 };

std::vector<std::uint8_t> encode_wav(const AudioClip& clip,
                                     WavEncoding encoding = WavEncoding::kPcm16);

void write_wav_file(const std::filesystem::path& path, const AudioClip& clip,
                    WavEncoding encoding = WavEncoding::kPcm16);

// Equal-weight downmix of a stereo clip. Mono clips are returned unchanged.
AudioClip to_mono(const AudioClip& clip);

// Splits a mono clip into consecutive max_s segments. A trailing remainder
// is kept only when it lasts at least min_s.
std::vector<AudioClip> trim_segments(const AudioClip& clip, double min_s = 4.0,
                                     double max_s = 5.0);

enum class SplitHint { kTrain, kVal, kTest };

struct ManifestEntry {
  std::string path;
  ClassLabel label = ClassLabel::kHuman;
  std::optional<SplitHint> split_hint;
};

// Newline-delimited `path,label[,split]` records. Blank lines and lines
// starting with '#' are ignored; line numbers in errors are 1-based.
std::vector<ManifestEntry> parse_manifest(std::string_view text);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

}  // namespace synthdetect

#endif  // SYNTHDETECT_AUDIO_IO_H_
