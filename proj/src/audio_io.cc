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

#include "synthdetect/audio_io.h"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "synthdetect/errors.h"

namespace synthdetect {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint32_t read_u32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) |
         (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) |
         (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

bool tag_is(std::span<const std::uint8_t> b, std::size_t at, const char* tag) {
  return std::memcmp(b.data() + at, tag, 4) == 0;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view label_name(ClassLabel label) {
  switch (label) {
    case ClassLabel::kHuman: return "Human";
    case ClassLabel::kNaturalReader: return "NaturalReader";
    case ClassLabel::kSpikAI: return "SpikAI";
    case ClassLabel::kReplica: return "Replica";
  }
  return "?";
}

std::string_view label_name(BinaryLabel label) {
  return label == BinaryLabel::kHuman ? "Human" : "Synthetic";
}

std::optional<ClassLabel> parse_label(std::string_view text) {
  const std::string key = lower(trim(text));
  for (int i = 0; i < kNumClassLabels; ++i) {
    const auto label = static_cast<ClassLabel>(i);
    if (key == lower(label_name(label))) return label;
  }
  return std::nullopt;
}

AudioClip::AudioClip(std::vector<double> samples, int sample_rate, int channels,
                     std::string source_id)
    : samples_(std::move(samples)),
      sample_rate_(sample_rate),
      channels_(channels),
      source_id_(std::move(source_id)) {
  if (sample_rate_ <= 0) throw ConfigError("sample rate must be positive");
  if (channels_ <= 0) throw ConfigError("channel count must be positive");
  if (samples_.size() % static_cast<std::size_t>(channels_) != 0)
    throw ConfigError("sample count is not a multiple of the channel count");
}

AudioClip decode_wav(std::span<const std::uint8_t> bytes, std::string source_id) {
  if (bytes.size() < 12 || !tag_is(bytes, 0, "RIFF") || !tag_is(bytes, 8, "WAVE"))
    throw DecodeError("not a RIFF/WAVE container");

  std::optional<std::uint16_t> format;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
  std::optional<std::span<const std::uint8_t>> data;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t size = read_u32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    const std::size_t available = bytes.size() - body;
    if (tag_is(bytes, pos, "fmt ")) {
      if (size < 16 || size > available) throw DecodeError("truncated fmt chunk");
      format = read_u16(bytes, body);
      channels = read_u16(bytes, body + 2);
      sample_rate = read_u32(bytes, body + 4);
      bits = read_u16(bytes, body + 14);
      if (*format == kFormatExtensible) {
        if (size < 26) throw DecodeError("truncated WAVE_FORMAT_EXTENSIBLE header");
        // First two bytes of the sub-format GUID carry the real format tag.
        format = read_u16(bytes, body + 24);
      }
    } else if (tag_is(bytes, pos, "data")) {
      // Streaming writers sometimes leave the size unset; clamp to the file.
      data = bytes.subspan(body, std::min<std::size_t>(size, available));
      if (format) break;
    }
    if (size > available) break;
    pos = body + size + (size & 1u);
  }

  if (!format) throw DecodeError("missing fmt chunk");
  if (!data) throw DecodeError("missing data chunk");
  if (channels == 0) throw DecodeError("zero channels");
  if (sample_rate == 0) throw DecodeError("zero sample rate");

  std::vector<double> samples;
  if (*format == kFormatPcm && bits == 16) {
    const std::size_t n = data->size() / 2;
    samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto raw = static_cast<std::int16_t>(read_u16(*data, 2 * i));
      samples[i] = raw / 32768.0;
    }
  } else if (*format == kFormatFloat && bits == 32) {
    const std::size_t n = data->size() / 4;
    samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const float v = std::bit_cast<float>(read_u32(*data, 4 * i));
      if (!std::isfinite(v)) throw DecodeError("non-finite float sample");
      samples[i] = std::clamp(static_cast<double>(v), -1.0, 1.0);
    }
  } else {
    throw UnsupportedFormat("unsupported WAV encoding: format " +
                            std::to_string(*format) + ", " + std::to_string(bits) +
                            " bits");
  }

  samples.resize(samples.size() - samples.size() % channels);
  if (samples.empty()) throw DecodeError("empty data chunk");
  return AudioClip(std::move(samples), static_cast<int>(sample_rate), channels,
                   std::move(source_id));
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return bytes;
}

AudioClip read_wav_file(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return decode_wav(bytes, path.string());
}

std::vector<std::uint8_t> encode_wav(const AudioClip& clip, WavEncoding encoding) {
  const bool pcm = encoding == WavEncoding::kPcm16;
  const std::uint16_t bits = pcm ? 16 : 32;
  const std::uint16_t block = static_cast<std::uint16_t>(clip.channels() * bits / 8);
  const auto data_size = static_cast<std::uint32_t>(clip.samples().size() * (bits / 8));

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_size);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, pcm ? kFormatPcm : kFormatFloat);
  put_u16(out, static_cast<std::uint16_t>(clip.channels()));
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate()));
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate()) * block);
  put_u16(out, block);
  put_u16(out, bits);
  put_tag(out, "data");
  put_u32(out, data_size);
  for (double s : clip.samples()) {
    if (pcm) {
      const double scaled = std::round(std::clamp(s, -1.0, 1.0) * 32768.0);
      const auto v = static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
      put_u16(out, static_cast<std::uint16_t>(v));
    } else {
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(s)));
    }
  }
  return out;
}

void write_wav_file(const std::filesystem::path& path, const AudioClip& clip,
                    WavEncoding encoding) {
  const auto bytes = encode_wav(clip, encoding);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

AudioClip to_mono(const AudioClip& clip) {
  if (clip.channels() == 1) return clip;
  if (clip.channels() != 2)
    throw UnsupportedFormat("cannot downmix " + std::to_string(clip.channels()) +
                            " channels");
  const auto in = clip.samples();
  std::vector<double> mono(clip.frames());
  for (std::size_t i = 0; i < mono.size(); ++i)
    mono[i] = 0.5 * (in[2 * i] + in[2 * i + 1]);
  return AudioClip(std::move(mono), clip.sample_rate(), 1, clip.source_id());
}

std::vector<AudioClip> trim_segments(const AudioClip& clip, double min_s,
                                     double max_s) {
  if (!(min_s > 0.0) || min_s > max_s)
    throw ConfigError("trim range requires 0 < min_s <= max_s");
  if (clip.channels() != 1) throw ConfigError("trim_segments expects a mono clip");

  const auto rate = static_cast<double>(clip.sample_rate());
  const auto max_len = static_cast<std::size_t>(std::llround(max_s * rate));
  const auto min_len = static_cast<std::size_t>(std::llround(min_s * rate));
  const auto in = clip.samples();
  if (in.size() < min_len)
    throw EmptyResult("clip shorter than " + std::to_string(min_s) + " s");

  std::vector<AudioClip> out;
  std::size_t start = 0;
  while (start < in.size()) {
    const std::size_t len = std::min(max_len, in.size() - start);
    if (len < min_len) break;
    out.emplace_back(std::vector<double>(in.begin() + start, in.begin() + start + len),
                     clip.sample_rate(), 1,
                     clip.source_id() + "#" + std::to_string(out.size()));
    start += len;
  }
  return out;
}

std::vector<ManifestEntry> parse_manifest(std::string_view text) {
  std::vector<ManifestEntry> entries;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    line = trim(line);
    if (line.empty() || line.front() == '#') continue;

    std::vector<std::string_view> fields;
    std::size_t from = 0;
    while (true) {
      const auto comma = line.find(',', from);
      fields.push_back(trim(line.substr(from, comma - from)));
      if (comma == std::string_view::npos) break;
      from = comma + 1;
    }
    if (fields.size() < 2 || fields.size() > 3)
      throw ManifestError(line_no, "expected path,label[,split]");
    if (fields[0].empty()) throw ManifestError(line_no, "empty path");

    ManifestEntry entry;
    entry.path = std::string(fields[0]);
    const auto label = parse_label(fields[1]);
    if (!label) throw ManifestError(line_no, "unknown label '" + std::string(fields[1]) + "'");
    entry.label = *label;
    if (fields.size() == 3 && !fields[2].empty()) {
      const std::string split = lower(fields[2]);
      if (split == "train") entry.split_hint = SplitHint::kTrain;
      else if (split == "val") entry.split_hint = SplitHint::kVal;
      else if (split == "test") entry.split_hint = SplitHint::kTest;
      else throw ManifestError(line_no, "unknown split '" + std::string(fields[2]) + "'");
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return parse_manifest(std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                         bytes.size()));
}

}  // namespace synthdetect
