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

#ifndef SYNTHDETECT_PIPELINE_H_
#define SYNTHDETECT_PIPELINE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "synthdetect/audio_io.h"
#include "synthdetect/classical_ml.h"
#include "synthdetect/crnn.h"
#include "synthdetect/features.h"

namespace synthdetect {

enum class ModelType { kClassical, kCrnn };

struct PipelineConfig {
  FeatureConfig features;
  double trim_min_s = 4.0;
  double trim_max_s = 5.0;
  Scenario scenario = Scenario::kBinary;
  FeatureSubset subset = FeatureSubset::kAll;
  ModelType model = ModelType::kClassical;
  AlgoSpec algo;
  CrnnConfig crnn;
  TrainConfig train;
  std::uint64_t seed = 0;
  std::size_t kfold = 5;
  std::optional<std::size_t> balance;

  // Copies seed into the algorithm and training records.
  void set_seed(std::uint64_t s);
};

nlohmann::json pipeline_config_to_json(const PipelineConfig& cfg);
// Missing keys keep defaults; unknown keys and bad values are ConfigError.
PipelineConfig pipeline_config_from_json(const nlohmann::json& j);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

// The part of the configuration that shapes extracted features.
nlohmann::json feature_geometry_json(const PipelineConfig& cfg);
// 16 hex digits of FNV-1a-64 over feature_geometry_json(cfg).dump().
std::string config_hash(const PipelineConfig& cfg);

struct RunReport {
  std::string command;
  std::string evaluation;  // cross_validation, test_split or dataset
  nlohmann::json config;
  std::string config_hash;
  ConfusionMatrix confusion;
  MetricsReport metrics;
  std::size_t rows = 0;
  double seconds = 0.0;
  std::map<std::string, std::string> artifacts;
};

// Positive class for binary matrices ("Synthetic" when present).
std::optional<std::size_t> positive_class(const ConfusionMatrix& cm);

nlohmann::json run_report_to_json(const RunReport& r);
// Recomputes the metrics from the stored confusion matrix and rejects the
// report when they disagree.
RunReport run_report_from_json(const nlohmann::json& j);

struct ExtractedFeatures {
  FeatureTable table;
  std::vector<std::string> skipped;  // "path: reason"
};

// One row per trimmed segment of every readable clip; relative manifest
// paths resolve against base_dir. Entries run on `workers` threads and are
// merged in manifest order.
ExtractedFeatures extract_features(const std::vector<ManifestEntry>& entries,
                                   const std::filesystem::path& base_dir,
                                   const PipelineConfig& cfg, std::size_t workers = 1);

// Feature row for every trimmed segment of one clip.
std::vector<FeatureVector> clip_features(const AudioClip& clip, ClassLabel label,
                                         const PipelineConfig& cfg);

struct CommandContext {
  PipelineConfig config;
  bool config_given = false;  // --config was passed explicitly
  std::size_t workers = 1;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
};

enum class RelicKind { kBicoherence, kPhase, kMelspec };

std::optional<RelicKind> parse_relic_kind(std::string_view text);

// Exit codes: 0 success, 1 failure or partial failure, 2 configuration or
// usage error. Errors are reported on ctx.err.
int cmd_extract(const CommandContext& ctx, const std::filesystem::path& manifest,
                const std::filesystem::path& out_csv);
int cmd_train(const CommandContext& ctx, const std::filesystem::path& input,
              const std::filesystem::path& model_out, const std::filesystem::path& report_out);
int cmd_predict(const CommandContext& ctx, const std::filesystem::path& model,
                const std::vector<std::filesystem::path>& audio);
int cmd_relics(const CommandContext& ctx, const std::filesystem::path& audio, RelicKind kind,
               const std::filesystem::path& out_prefix);
int cmd_synth(const CommandContext& ctx, const std::filesystem::path& out_dir,
              std::size_t n_clips, std::size_t n_classes);
int cmd_eval(const CommandContext& ctx, const std::filesystem::path& model,
             const std::filesystem::path& input, const std::filesystem::path& report_out);

// Binary P5 image of a [0,1] matrix, values rounded to 0..255.
void write_pgm(const std::filesystem::path& path, const RealMatrix& image);
void write_matrix_csv(const std::filesystem::path& path, const RealMatrix& m);

}  // namespace synthdetect

#endif  // SYNTHDETECT_PIPELINE_H_
