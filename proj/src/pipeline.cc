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

#include "synthdetect/pipeline.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "synthdetect/corpus.h"
#include "synthdetect/errors.h"
#include "synthdetect/random.h"

namespace synthdetect {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

template <typename T>
T get_as(const json& j, const char* key, const T& fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const char* where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw ConfigError(std::string("unknown key '") + key + "' in " + where);
  }
}

std::string window_name(Window w) { return w == Window::kHann ? "hann" : "rectangular"; }

Window parse_window(const std::string& s) {
  if (s == "hann") return Window::kHann;
  if (s == "rectangular") return Window::kRectangular;
  throw ConfigError("unknown window '" + s + "'");
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::ostream& out_of(const CommandContext& ctx) { return ctx.out ? *ctx.out : std::cout; }
std::ostream& err_of(const CommandContext& ctx) { return ctx.err ? *ctx.err : std::cerr; }

// Runs a command body and maps exceptions onto the exit-code contract.
template <typename Fn>
int guarded(const CommandContext& ctx, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err_of(ctx) << "error: " << e.what() << "\n";
    return 2;
  } catch (const ManifestError& e) {
    err_of(ctx) << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err_of(ctx) << "error: " << e.what() << "\n";
    return 1;
  }
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw IoError("write failed: " + path.string());
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

// First non-comment line starts with the feature header.
bool is_feature_csv(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path.string());
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    return line.rfind(std::string(kFeatureNames[0]) + ",", 0) == 0;
  }
  return false;
}

std::optional<std::string> meta_value(const FeatureCsv& csv, const std::string& key) {
  for (const auto& [k, v] : csv.meta) {
    if (k == key) return v;
  }
  return std::nullopt;
}

FeatureCsv load_feature_csv(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path.string());
  return read_feature_csv(f);
}

// Configuration carried by an artifact, with the hash it claims.
struct ArtifactConfig {
  PipelineConfig config;
  std::string hash;
};

ArtifactConfig csv_config(const FeatureCsv& csv, const PipelineConfig& fallback) {
  ArtifactConfig a{fallback, config_hash(fallback)};
  if (auto text = meta_value(csv, "config")) {
    try {
      a.config = pipeline_config_from_json(json::parse(*text));
    } catch (const json::exception& e) {
      throw IoError(std::string("bad config line in feature file: ") + e.what());
    }
    a.hash = config_hash(a.config);
  }
  if (auto h = meta_value(csv, "config_hash"); h && *h != a.hash) {
    throw IoError("feature file config hash " + *h + " does not match its embedded config");
  }
  return a;
}

void check_hash(const CommandContext& ctx, const std::string& artifact_hash, const char* what) {
  if (!ctx.config_given) return;
  const std::string mine = config_hash(ctx.config);
  if (mine != artifact_hash) {
    throw ConfigError(std::string("config hash ") + mine + " does not match " + what + " hash " +
                      artifact_hash + " (feature geometry differs)");
  }
}

std::vector<AudioClip> segments_of(const AudioClip& clip, const PipelineConfig& cfg) {
  return trim_segments(to_mono(clip), cfg.trim_min_s, cfg.trim_max_s);
}

struct ImageSet {
  Dataset data;
  std::vector<ClassLabel> labels;
};

ImageSet manifest_images(const std::vector<ManifestEntry>& entries, const fs::path& base,
                         const PipelineConfig& cfg, std::ostream& log) {
  const std::size_t rows = cfg.crnn.input_rows, cols = cfg.crnn.input_cols;
  std::vector<double> pixels;
  ImageSet set;
  for (const auto& e : entries) {
    const fs::path path = resolve(base, e.path);
    try {
      for (const auto& seg : segments_of(read_wav_file(path), cfg)) {
        const Tensor img = clip_image(seg, cfg.features.mfcc.spectral, rows, cols);
        pixels.insert(pixels.end(), img.data().begin(), img.data().end());
        set.data.labels.push_back(scenario_target(e.label, cfg.scenario));
        set.labels.push_back(e.label);
      }
    } catch (const Error& ex) {
      log << "skip " << e.path << ": " << ex.what() << "\n";
    }
  }
  if (set.data.labels.empty()) throw EmptyResult("no clip produced an image");
  set.data.images = Tensor({set.data.labels.size(), rows, cols, 1}, std::move(pixels));
  return set;
}

// Keeps `per_class` randomly chosen rows of every label.
ImageSet balance_images(const ImageSet& in, std::size_t per_class, std::uint64_t seed) {
  std::vector<std::size_t> keep;
  Rng rng(derive_seed(seed, 0xBA1));
  for (int c = 0; c < kNumClassLabels; ++c) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < in.labels.size(); ++i) {
      if (static_cast<int>(in.labels[i]) == c) rows.push_back(i);
    }
    if (rows.empty()) continue;
    if (rows.size() < per_class) {
      throw ConfigError("class " + std::string(label_name(static_cast<ClassLabel>(c))) + " has " +
                        std::to_string(rows.size()) + " rows, fewer than " +
                        std::to_string(per_class));
    }
    shuffle(rows, rng);
    keep.insert(keep.end(), rows.begin(), rows.begin() + per_class);
  }
  std::sort(keep.begin(), keep.end());
  ImageSet out;
  out.data = in.data.subset(keep);
  for (std::size_t i : keep) out.labels.push_back(in.labels[i]);
  return out;
}

MetricsReport metrics_for(const ConfusionMatrix& cm) { return metrics(cm, positive_class(cm)); }

ConfusionMatrix relabel(const ConfusionMatrix& from, const std::vector<std::string>& classes) {
  if (from.classes == classes) return from;
  throw Error("confusion classes do not match the scenario");
}

void emit_report(const CommandContext& ctx, const RunReport& report, const fs::path& path) {
  const std::string text = run_report_to_json(report).dump(2) + "\n";
  if (!path.empty()) write_text_file(path, text);
  out_of(ctx) << text;
}

enum class ModelFileType { kClassical, kCrnn };

ModelFileType sniff_model(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open model " + path.string());
  char magic[8] = {};
  f.read(magic, sizeof magic);
  return std::string_view(magic, static_cast<std::size_t>(f.gcount())) == "SDCRNN01"
             ? ModelFileType::kCrnn
             : ModelFileType::kClassical;
}

PipelineConfig embedded_config(const json& config, const std::string& hash, const char* what) {
  PipelineConfig cfg = pipeline_config_from_json(config);
  if (config_hash(cfg) != hash) {
    throw IoError(std::string(what) + " config hash does not match its embedded config");
  }
  return cfg;
}

void average_into(std::vector<double>& acc, const std::vector<double>& scores) {
  if (acc.empty()) acc.assign(scores.size(), 0.0);
  for (std::size_t i = 0; i < scores.size(); ++i) acc[i] += scores[i];
}

}  // namespace

void PipelineConfig::set_seed(std::uint64_t s) {
  seed = s;
  algo.seed = s;
  train.seed = s;
}

json feature_geometry_json(const PipelineConfig& cfg) {
  const auto& s = cfg.features.mfcc.spectral;
  return {{"frame_ms", s.frame_ms},
          {"hop_ms", s.hop_ms},
          {"window", window_name(s.window)},
          {"n_filters", s.n_filters},
          {"f_min", s.f_min},
          {"f_max", s.f_max},
          {"n_coeffs", cfg.features.mfcc.n_coeffs},
          {"segments", cfg.features.bispectral.segments},
          {"grid_size", cfg.features.bispectral.grid_size},
          {"trim_min_s", cfg.trim_min_s},
          {"trim_max_s", cfg.trim_max_s}};
}

std::string config_hash(const PipelineConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(feature_geometry_json(cfg).dump())));
  return buf;
}

json pipeline_config_to_json(const PipelineConfig& cfg) {
  json j = {{"features", feature_geometry_json(cfg)},
            {"scenario", scenario_name(cfg.scenario)},
            {"subset", subset_name(cfg.subset)},
            {"model", cfg.model == ModelType::kCrnn ? "crnn" : "classical"},
            {"algo", algo_spec_to_json(cfg.algo)},
            {"crnn", crnn_config_to_json(cfg.crnn)},
            {"train", train_config_to_json(cfg.train)},
            {"seed", cfg.seed},
            {"kfold", cfg.kfold}};
  j["balance"] = cfg.balance ? json(*cfg.balance) : json(nullptr);
  return j;
}

PipelineConfig pipeline_config_from_json(const json& j) {
  reject_unknown(j, {"features", "scenario", "subset", "model", "algo", "crnn", "train", "seed",
                     "kfold", "balance"},
                 "config");
  PipelineConfig cfg;
  if (j.contains("features")) {
    const json& f = j.at("features");
    reject_unknown(f, {"frame_ms", "hop_ms", "window", "n_filters", "f_min", "f_max", "n_coeffs",
                       "segments", "grid_size", "trim_min_s", "trim_max_s"},
                   "features");
    auto& s = cfg.features.mfcc.spectral;
    s.frame_ms = get_as(f, "frame_ms", s.frame_ms);
    s.hop_ms = get_as(f, "hop_ms", s.hop_ms);
    s.window = parse_window(get_as<std::string>(f, "window", window_name(s.window)));
    s.n_filters = get_as(f, "n_filters", s.n_filters);
    s.f_min = get_as(f, "f_min", s.f_min);
    s.f_max = get_as(f, "f_max", s.f_max);
    cfg.features.mfcc.n_coeffs = get_as(f, "n_coeffs", cfg.features.mfcc.n_coeffs);
    cfg.features.bispectral.segments = get_as(f, "segments", cfg.features.bispectral.segments);
    cfg.features.bispectral.grid_size = get_as(f, "grid_size", cfg.features.bispectral.grid_size);
    cfg.trim_min_s = get_as(f, "trim_min_s", cfg.trim_min_s);
    cfg.trim_max_s = get_as(f, "trim_max_s", cfg.trim_max_s);
    if (!(s.frame_ms > 0.0) || !(s.hop_ms > 0.0)) throw ConfigError("frame_ms and hop_ms must be > 0");
    if (!(cfg.trim_min_s > 0.0) || cfg.trim_min_s > cfg.trim_max_s) {
      throw ConfigError("need 0 < trim_min_s <= trim_max_s");
    }
    if (cfg.features.bispectral.segments == 0 || cfg.features.bispectral.grid_size == 0) {
      throw ConfigError("segments and grid_size must be positive");
    }
  }
  if (j.contains("scenario")) {
    auto s = parse_scenario(get_as<std::string>(j, "scenario", ""));
    if (!s) throw ConfigError("unknown scenario");
    cfg.scenario = *s;
  }
  if (j.contains("subset")) {
    auto s = parse_subset(get_as<std::string>(j, "subset", ""));
    if (!s) throw ConfigError("unknown feature subset");
    cfg.subset = *s;
  }
  if (j.contains("model")) {
    const auto m = get_as<std::string>(j, "model", "");
    if (m == "classical") {
      cfg.model = ModelType::kClassical;
    } else if (m == "crnn") {
      cfg.model = ModelType::kCrnn;
    } else {
      throw ConfigError("model must be 'classical' or 'crnn'");
    }
  }
  try {
    if (j.contains("algo")) cfg.algo = algo_spec_from_json(j.at("algo"));
    if (j.contains("crnn")) cfg.crnn = crnn_config_from_json(j.at("crnn"));
    if (j.contains("train")) cfg.train = train_config_from_json(j.at("train"));
  } catch (const json::exception& e) {
    throw ConfigError(e.what());
  }
  cfg.kfold = get_as(j, "kfold", cfg.kfold);
  if (cfg.kfold < 2) throw ConfigError("kfold must be >= 2");
  if (j.contains("balance") && !j.at("balance").is_null()) {
    cfg.balance = get_as<std::size_t>(j, "balance", 0);
    if (*cfg.balance == 0) throw ConfigError("balance must be positive");
  }
  cfg.set_seed(get_as<std::uint64_t>(j, "seed", 0));
  return cfg;
}

PipelineConfig load_pipeline_config(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config " + path.string());
  try {
    return pipeline_config_from_json(json::parse(f));
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
}

std::optional<std::size_t> positive_class(const ConfusionMatrix& cm) {
  if (cm.classes.size() != 2) return std::nullopt;
  for (std::size_t i = 0; i < 2; ++i) {
    if (cm.classes[i] == label_name(BinaryLabel::kSynthetic)) return i;
  }
  return std::nullopt;
}

json run_report_to_json(const RunReport& r) {
  return {{"command", r.command},
          {"evaluation", r.evaluation},
          {"config", r.config},
          {"config_hash", r.config_hash},
          {"confusion", confusion_to_json(r.confusion)},
          {"metrics", metrics_to_json(r.metrics)},
          {"rows", r.rows},
          {"seconds", r.seconds},
          {"artifacts", r.artifacts}};
}

RunReport run_report_from_json(const json& j) {
  RunReport r;
  try {
    r.command = j.at("command").get<std::string>();
    r.evaluation = j.at("evaluation").get<std::string>();
    r.config = j.at("config");
    r.config_hash = j.at("config_hash").get<std::string>();
    r.confusion = confusion_from_json(j.at("confusion"));
    r.rows = j.at("rows").get<std::size_t>();
    r.seconds = j.at("seconds").get<double>();
    r.artifacts = j.at("artifacts").get<std::map<std::string, std::string>>();
  } catch (const json::exception& e) {
    throw IoError(std::string("bad run report: ") + e.what());
  }
  r.metrics = metrics_for(r.confusion);
  const json stored = j.at("metrics");
  const json recomputed = metrics_to_json(r.metrics);
  auto close = [](const json& a, const json& b) {
    return a.is_number() && b.is_number() &&
           std::abs(a.get<double>() - b.get<double>()) <= 1e-12;
  };
  for (const char* key : {"accuracy", "macro_precision", "macro_recall", "macro_f1"}) {
    if (!stored.contains(key) || !close(stored.at(key), recomputed.at(key))) {
      throw IoError(std::string("report metric '") + key + "' disagrees with its confusion matrix");
    }
  }
  if (!stored.contains("per_class") || stored.at("per_class").size() != recomputed.at("per_class").size()) {
    throw IoError("report per-class metrics disagree with its confusion matrix");
  }
  for (std::size_t i = 0; i < recomputed.at("per_class").size(); ++i) {
    const json& a = stored.at("per_class")[i];
    const json& b = recomputed.at("per_class")[i];
    for (const char* key : {"precision", "recall", "f1", "support"}) {
      if (!a.contains(key) || !close(a.at(key), b.at(key))) {
        throw IoError("report per-class metrics disagree with its confusion matrix");
      }
    }
  }
  return r;
}

std::vector<FeatureVector> clip_features(const AudioClip& clip, ClassLabel label,
                                         const PipelineConfig& cfg) {
  std::vector<FeatureVector> rows;
  for (const auto& seg : segments_of(clip, cfg)) {
    rows.push_back(extract_feature_vector(seg, label, cfg.features));
  }
  return rows;
}

ExtractedFeatures extract_features(const std::vector<ManifestEntry>& entries,
                                   const fs::path& base_dir, const PipelineConfig& cfg,
                                   std::size_t workers) {
  struct Slot {
    std::vector<FeatureVector> rows;
    std::string error;
  };
  std::vector<Slot> slots(entries.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < entries.size(); i = next++) {
      try {
        const AudioClip clip = read_wav_file(resolve(base_dir, entries[i].path));
        slots[i].rows = clip_features(clip, entries[i].label, cfg);
      } catch (const std::exception& e) {
        slots[i].error = e.what();
      }
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(entries.size(), 1));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  ExtractedFeatures out;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!slots[i].error.empty()) {
      out.skipped.push_back(entries[i].path + ": " + slots[i].error);
      continue;
    }
    for (auto& row : slots[i].rows) out.table.add(std::move(row));
  }
  return out;
}

std::optional<RelicKind> parse_relic_kind(std::string_view text) {
  if (text == "bicoherence") return RelicKind::kBicoherence;
  if (text == "phase") return RelicKind::kPhase;
  if (text == "melspec") return RelicKind::kMelspec;
  return std::nullopt;
}

void write_pgm(const fs::path& path, const RealMatrix& image) {
  std::string data = "P5\n" + std::to_string(image.cols()) + " " + std::to_string(image.rows()) +
                     "\n255\n";
  for (double v : image.values()) {
    if (!(v >= 0.0 && v <= 1.0)) throw Error("image value outside [0,1]");
    data.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
  }
  write_text_file(path, data);
}

void write_matrix_csv(const fs::path& path, const RealMatrix& m) {
  std::string text;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) text.push_back(',');
      text += format_double(m(r, c));
    }
    text.push_back('\n');
  }
  write_text_file(path, text);
}

int cmd_extract(const CommandContext& ctx, const fs::path& manifest, const fs::path& out_csv) {
  return guarded(ctx, [&] {
    const auto entries = read_manifest(manifest);
    auto result = extract_features(entries, manifest.parent_path(), ctx.config, ctx.workers);
    for (const auto& s : result.skipped) err_of(ctx) << "skip " << s << "\n";
    if (result.table.size() == 0) throw EmptyResult("every clip was rejected; no rows written");
    std::ostringstream csv;
    write_feature_csv(csv, result.table,
                      {{"config_hash", config_hash(ctx.config)},
                       {"config", pipeline_config_to_json(ctx.config).dump()}});
    write_text_file(out_csv, csv.str());
    err_of(ctx) << "wrote " << result.table.size() << " rows to " << out_csv.string() << "\n";
    return 0;
  });
}

namespace {

int train_classical(const CommandContext& ctx, const fs::path& input, const fs::path& model_out,
                    const fs::path& report_out) {
  const auto t0 = std::chrono::steady_clock::now();
  PipelineConfig cfg = ctx.config;
  FeatureTable table;
  std::string hash = config_hash(cfg);
  if (is_feature_csv(input)) {
    const FeatureCsv csv = load_feature_csv(input);
    const ArtifactConfig art = csv_config(csv, cfg);
    check_hash(ctx, art.hash, "feature file");
    // Feature geometry follows the file; learning settings follow the command.
    cfg.features = art.config.features;
    cfg.trim_min_s = art.config.trim_min_s;
    cfg.trim_max_s = art.config.trim_max_s;
    hash = art.hash;
    table = csv.table;
  } else {
    auto result = extract_features(read_manifest(input), input.parent_path(), cfg, ctx.workers);
    for (const auto& s : result.skipped) err_of(ctx) << "skip " << s << "\n";
    table = std::move(result.table);
  }
  if (cfg.balance) table = balance_classes(table, *cfg.balance, cfg.seed);
  table = select_subset(table, cfg.subset);

  const auto cv = cross_validate(table, cfg.algo, cfg.scenario, cfg.kfold);
  const ClassifierModel model = train_classifier(table, cfg.algo, cfg.scenario);
  const json cfg_json = pipeline_config_to_json(cfg);
  save_model(model, model_out, hash, cfg_json);

  RunReport report;
  report.command = "train";
  report.evaluation = "cross_validation";
  report.config = cfg_json;
  report.config_hash = hash;
  report.confusion = cv.confusion;
  report.metrics = metrics_for(cv.confusion);
  report.rows = table.size();
  report.seconds = elapsed_s(t0);
  report.artifacts = {{"model", model_out.string()}};
  if (!report_out.empty()) report.artifacts["report"] = report_out.string();
  emit_report(ctx, report, report_out);
  return 0;
}

int train_crnn(const CommandContext& ctx, const fs::path& input, const fs::path& model_out,
               const fs::path& report_out) {
  const auto t0 = std::chrono::steady_clock::now();
  const PipelineConfig& cfg = ctx.config;
  if (is_feature_csv(input)) throw ConfigError("the crnn model trains from a manifest, not features");
  ImageSet images = manifest_images(read_manifest(input), input.parent_path(), cfg, err_of(ctx));
  if (cfg.balance) images = balance_images(images, *cfg.balance, cfg.seed);
  const auto parts = split_dataset(images.data, cfg.train.split, cfg.seed);

  Network net = build_crnn32(scenario_classes(cfg.scenario).size(), cfg.crnn, cfg.seed);
  const Dataset* val = parts[1].size() > 0 ? &parts[1] : nullptr;
  const TrainHistory history = train(net, parts[0], val, cfg.train);
  const std::string hash = config_hash(cfg);
  const json cfg_json = pipeline_config_to_json(cfg);
  save_network(net, model_out, hash, cfg_json);

  fs::path history_path = model_out;
  history_path += ".history.csv";
  std::ostringstream hist;
  write_history_csv(hist, history);
  write_text_file(history_path, hist.str());

  const bool has_test = parts[2].size() > 0;
  const Evaluation ev = evaluate(net, has_test ? parts[2] : parts[0]);
  RunReport report;
  report.command = "train";
  report.evaluation = has_test ? "test_split" : "training_set";
  report.config = cfg_json;
  report.config_hash = hash;
  report.confusion = relabel(ev.confusion, net.classes());
  report.metrics = metrics_for(report.confusion);
  report.rows = parts[0].size();
  report.seconds = elapsed_s(t0);
  report.artifacts = {{"model", model_out.string()}, {"history", history_path.string()}};
  if (!report_out.empty()) report.artifacts["report"] = report_out.string();
  emit_report(ctx, report, report_out);
  return 0;
}

}  // namespace

int cmd_train(const CommandContext& ctx, const fs::path& input, const fs::path& model_out,
              const fs::path& report_out) {
  return guarded(ctx, [&] {
    return ctx.config.model == ModelType::kCrnn ? train_crnn(ctx, input, model_out, report_out)
                                                 : train_classical(ctx, input, model_out, report_out);
  });
}

int cmd_predict(const CommandContext& ctx, const fs::path& model_path,
                const std::vector<fs::path>& audio) {
  return guarded(ctx, [&] {
    std::optional<LoadedModel> classical;
    std::optional<LoadedNetwork> network;
    PipelineConfig cfg;
    if (sniff_model(model_path) == ModelFileType::kCrnn) {
      network = load_network(model_path);
      check_hash(ctx, network->config_hash, "model");
      cfg = embedded_config(network->config, network->config_hash, "network");
    } else {
      classical = load_model(model_path);
      check_hash(ctx, classical->config_hash, "model");
      cfg = embedded_config(classical->config, classical->config_hash, "model");
    }
    const std::vector<std::string>& classes =
        network ? network->net.classes() : classical->model.classes();

    int failures = 0;
    for (const auto& path : audio) {
      try {
        const AudioClip clip = to_mono(read_wav_file(path));
        std::vector<AudioClip> segs;
        try {
          segs = segments_of(clip, cfg);
        } catch (const EmptyResult&) {
          segs = {clip};  // shorter than the trim window: score the whole clip
        }
        std::vector<double> scores;
        for (const auto& seg : segs) {
          if (network) {
            average_into(scores, classify(network->net, seg, cfg.features.mfcc.spectral).scores);
          } else {
            const FeatureVector fv = extract_feature_vector(seg, ClassLabel::kHuman, cfg.features);
            average_into(scores, classical->model.predict(fv).scores);
          }
        }
        for (double& s : scores) s /= static_cast<double>(segs.size());
        const std::size_t best = argmax(scores);
        json rec = {{"path", path.string()}, {"label", classes[best]}, {"segments", segs.size()}};
        json sc = json::object();
        for (std::size_t i = 0; i < classes.size(); ++i) sc[classes[i]] = scores[i];
        rec["scores"] = sc;
        out_of(ctx) << rec.dump() << "\n";
      } catch (const std::exception& e) {
        ++failures;
        out_of(ctx) << json{{"path", path.string()}, {"error", e.what()}}.dump() << "\n";
      }
    }
    return failures == 0 ? 0 : 1;
  });
}

int cmd_relics(const CommandContext& ctx, const fs::path& audio, RelicKind kind,
               const fs::path& out_prefix) {
  return guarded(ctx, [&] {
    const AudioClip clip = to_mono(read_wav_file(audio));
    RealMatrix image;
    if (kind == RelicKind::kMelspec) {
      const Spectrogram spec = mel_spectrogram(clip, ctx.config.features.mfcc.spectral);
      const RealMatrix scaled = minmax_scale(spec.frames);
      // Mel bands as rows, highest band first.
      image = RealMatrix(scaled.cols(), scaled.rows());
      for (std::size_t t = 0; t < scaled.rows(); ++t) {
        for (std::size_t b = 0; b < scaled.cols(); ++b) image(scaled.cols() - 1 - b, t) = scaled(t, b);
      }
    } else {
      const BicoherenceGrid g = normalized_bicoherence(clip, ctx.config.features.bispectral);
      image = kind == RelicKind::kBicoherence ? g.magnitude : g.phase;
    }
    fs::path pgm = out_prefix, csv = out_prefix;
    pgm += ".pgm";
    csv += ".csv";
    write_pgm(pgm, image);
    write_matrix_csv(csv, image);
    out_of(ctx) << pgm.string() << "\n" << csv.string() << "\n";
    return 0;
  });
}

int cmd_synth(const CommandContext& ctx, const fs::path& out_dir, std::size_t n_clips,
              std::size_t n_classes) {
  return guarded(ctx, [&] {
    if (n_clips == 0) throw ConfigError("need at least one clip");
    fs::create_directories(out_dir);
    const auto entries = write_synth_corpus(out_dir, n_clips, n_classes, ctx.config.seed);
    out_of(ctx) << (out_dir / "manifest.csv").string() << "\n";
    err_of(ctx) << "wrote " << entries.size() << " clips\n";
    return 0;
  });
}

int cmd_eval(const CommandContext& ctx, const fs::path& model_path, const fs::path& input,
             const fs::path& report_out) {
  return guarded(ctx, [&] {
    const auto t0 = std::chrono::steady_clock::now();
    RunReport report;
    report.command = "eval";
    report.evaluation = "dataset";
    report.artifacts = {{"model", model_path.string()}, {"input", input.string()}};
    if (!report_out.empty()) report.artifacts["report"] = report_out.string();

    if (sniff_model(model_path) == ModelFileType::kCrnn) {
      const LoadedNetwork loaded = load_network(model_path);
      check_hash(ctx, loaded.config_hash, "model");
      const PipelineConfig cfg = embedded_config(loaded.config, loaded.config_hash, "network");
      if (is_feature_csv(input)) throw ConfigError("a crnn model evaluates a manifest");
      const ImageSet images = manifest_images(read_manifest(input), input.parent_path(), cfg, err_of(ctx));
      const Evaluation ev = evaluate(loaded.net, images.data);
      report.config = loaded.config;
      report.config_hash = loaded.config_hash;
      report.confusion = relabel(ev.confusion, loaded.net.classes());
      report.rows = images.data.size();
    } else {
      const LoadedModel loaded = load_model(model_path);
      check_hash(ctx, loaded.config_hash, "model");
      const PipelineConfig cfg = embedded_config(loaded.config, loaded.config_hash, "model");
      FeatureTable table;
      if (is_feature_csv(input)) {
        const FeatureCsv csv = load_feature_csv(input);
        const ArtifactConfig art = csv_config(csv, cfg);
        if (art.hash != loaded.config_hash) {
          throw ConfigError("feature file hash " + art.hash + " does not match model hash " +
                            loaded.config_hash);
        }
        table = csv.table;
      } else {
        auto result = extract_features(read_manifest(input), input.parent_path(), cfg, ctx.workers);
        for (const auto& s : result.skipped) err_of(ctx) << "skip " << s << "\n";
        table = std::move(result.table);
      }
      const Scenario scenario = loaded.model.scenario();
      ConfusionMatrix cm(scenario_classes(scenario));
      for (const auto& row : table.rows()) {
        const Prediction p = loaded.model.predict(row);
        const auto col = std::find(cm.classes.begin(), cm.classes.end(), p.label) - cm.classes.begin();
        cm.add(static_cast<std::size_t>(scenario_target(row.label, scenario)),
               static_cast<std::size_t>(col));
      }
      report.config = loaded.config;
      report.config_hash = loaded.config_hash;
      report.confusion = cm;
      report.rows = table.size();
    }
    report.metrics = metrics_for(report.confusion);
    report.seconds = elapsed_s(t0);
    emit_report(ctx, report, report_out);
    return 0;
  });
}

}  // namespace synthdetect
