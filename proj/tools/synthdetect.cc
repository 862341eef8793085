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

// synthdetect command-line front end.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "synthdetect/errors.h"
#include "synthdetect/pipeline.h"

namespace fs = std::filesystem;
using namespace synthdetect;

namespace {

std::size_t workers_from_env() {
  const char* v = std::getenv("SYNTHDETECT_WORKERS");
  if (!v || !*v) return 1;
  try {
    const long n = std::stol(v);
    if (n >= 1) return static_cast<std::size_t>(n);
  } catch (const std::exception&) {
  }
  throw ConfigError(std::string("SYNTHDETECT_WORKERS must be a positive integer, got '") + v + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic speech detection from bispectral and cepstral features"};
  app.require_subcommand(1);

  std::string config_path, scenario, algo, model_type;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> balance, kfold;
  app.add_option("--config", config_path, "Pipeline configuration (JSON)")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--scenario", scenario, "binary or multi")->check(CLI::IsMember({"binary", "multi"}));
  app.add_option("--algo", algo, "Classical algorithm kind");
  app.add_option("--balance", balance, "Rows kept per class for training");
  app.add_option("--kfold", kfold, "Cross-validation folds");

  std::string manifest, out, input, model, report, audio, kind = "bicoherence";
  std::vector<std::string> audio_files;
  std::size_t n_clips = 400, n_classes = 2;

  auto* extract = app.add_subcommand("extract", "Extract feature vectors from a manifest");
  extract->add_option("manifest", manifest, "Manifest CSV (path,label)")->required();
  extract->add_option("-o,--out", out, "Output feature CSV")->required();

  auto* train = app.add_subcommand("train", "Train a model from features or a manifest");
  train->add_option("input", input, "Feature CSV or manifest")->required();
  train->add_option("-o,--out", model, "Model file")->required();
  train->add_option("--report", report, "Run report (JSON)");
  train->add_option("--model", model_type, "classical or crnn")
      ->check(CLI::IsMember({"classical", "crnn"}));

  auto* predict = app.add_subcommand("predict", "Label audio files with a trained model");
  predict->add_option("model", model, "Model file")->required();
  predict->add_option("audio", audio_files, "WAV files")->required();

  auto* relics = app.add_subcommand("relics", "Export a bicoherence or mel spectrogram grid");
  relics->add_option("audio", audio, "WAV file")->required();
  relics->add_option("--kind", kind, "bicoherence, phase or melspec")
      ->check(CLI::IsMember({"bicoherence", "phase", "melspec"}));
  relics->add_option("-o,--out", out, "Output prefix (.pgm and .csv are appended)")->required();

  auto* synth = app.add_subcommand("synth", "Write the seeded synthetic corpus");
  synth->add_option("dir", out, "Output directory")->required();
  synth->add_option("--clips", n_clips, "Number of clips");
  synth->add_option("--classes", n_classes, "2 or 4")->check(CLI::IsMember({2, 4}));

  auto* eval = app.add_subcommand("eval", "Evaluate a model on features or a manifest");
  eval->add_option("model", model, "Model file")->required();
  eval->add_option("input", input, "Feature CSV or manifest")->required();
  eval->add_option("--report", report, "Run report (JSON)");

  for (auto* sub : {extract, train, predict, relics, synth, eval}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CommandContext ctx;
  try {
    if (!config_path.empty()) {
      ctx.config = load_pipeline_config(config_path);
      ctx.config_given = true;
    }
    if (seed) ctx.config.set_seed(*seed);
    if (!scenario.empty()) ctx.config.scenario = *parse_scenario(scenario);
    if (!algo.empty()) {
      const auto k = parse_algo(algo);
      if (!k) throw ConfigError("unknown algorithm '" + algo + "'");
      ctx.config.algo.kind = *k;
    }
    if (balance) {
      if (*balance == 0) throw ConfigError("--balance must be positive");
      ctx.config.balance = balance;
    }
    if (kfold) {
      if (*kfold < 2) throw ConfigError("--kfold must be >= 2");
      ctx.config.kfold = *kfold;
    }
    if (model_type == "crnn") ctx.config.model = ModelType::kCrnn;
    if (model_type == "classical") ctx.config.model = ModelType::kClassical;
    ctx.workers = workers_from_env();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  if (*extract) return cmd_extract(ctx, manifest, out);
  if (*train) return cmd_train(ctx, input, model, report);
  if (*predict) {
    std::vector<fs::path> paths(audio_files.begin(), audio_files.end());
    return cmd_predict(ctx, model, paths);
  }
  if (*relics) return cmd_relics(ctx, audio, *parse_relic_kind(kind), out);
  if (*synth) return cmd_synth(ctx, out, n_clips, n_classes);
  if (*eval) return cmd_eval(ctx, model, input, report);
  return 2;
}
