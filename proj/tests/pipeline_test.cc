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

#include <gtest/gtest.h>
#include <unistd.h>

#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "synthdetect/corpus.h"
#include "synthdetect/errors.h"

namespace synthdetect {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::size_t data_rows(const fs::path& csv) {
  std::size_t n = 0;
  for (const auto& line : lines_of(slurp(csv))) {
    if (!line.empty() && line[0] != '#') ++n;
  }
  return n - 1;  // header
}

struct Captured {
  std::ostringstream out, err;
  CommandContext ctx(PipelineConfig cfg = {}, bool given = false) {
    CommandContext c;
    c.config = std::move(cfg);
    c.config_given = given;
    c.out = &out;
    c.err = &err;
    return c;
  }
};

class PipelineTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = fs::temp_directory_path() / ("synthdetect_pipeline_" + std::to_string(::getpid()));
    fs::remove_all(root_);
    fs::create_directories(root_);
    write_synth_corpus(root_ / "corpus", 12, 2, 5);
    Captured c;
    ASSERT_EQ(cmd_extract(c.ctx(), manifest(), root_ / "features.csv"), 0) << c.err.str();
    PipelineConfig cfg;
    cfg.kfold = 3;
    cfg.algo.boost_rounds = 10;
    ASSERT_EQ(cmd_train(c.ctx(cfg), root_ / "features.csv", root_ / "model.json",
                        root_ / "report.json"),
              0)
        << c.err.str();
  }
  static void TearDownTestSuite() { fs::remove_all(root_); }

  static fs::path manifest() { return root_ / "corpus" / "manifest.csv"; }
  static fs::path clip(int i) {
    char name[32];
    std::snprintf(name, sizeof name, "clip_%05d.wav", i);
    return root_ / "corpus" / name;
  }
  static fs::path path(const std::string& name) { return root_ / name; }

  static fs::path root_;
};

fs::path PipelineTest::root_;

TEST(PipelineConfigTest, JsonRoundTrip) {
  PipelineConfig cfg;
  cfg.features.bispectral.segments = 40;
  cfg.features.mfcc.spectral.window = Window::kRectangular;
  cfg.scenario = Scenario::kMulti;
  cfg.subset = FeatureSubset::kBicoMag;
  cfg.model = ModelType::kCrnn;
  cfg.balance = 150;
  cfg.kfold = 4;
  cfg.set_seed(99);
  const json j = pipeline_config_to_json(cfg);
  const PipelineConfig back = pipeline_config_from_json(j);
  EXPECT_EQ(pipeline_config_to_json(back), j);
  EXPECT_EQ(back.algo.seed, 99u);
  EXPECT_EQ(back.train.seed, 99u);
  EXPECT_EQ(config_hash(back), config_hash(cfg));
}

TEST(PipelineConfigTest, UnknownKeysAndBadValuesRejected) {
  EXPECT_THROW(pipeline_config_from_json(json{{"colour", 1}}), ConfigError);
  EXPECT_THROW(pipeline_config_from_json(json{{"features", {{"hop", 1}}}}), ConfigError);
  EXPECT_THROW(pipeline_config_from_json(json{{"scenario", "ternary"}}), ConfigError);
  EXPECT_THROW(pipeline_config_from_json(json{{"model", "svm"}}), ConfigError);
  EXPECT_THROW(pipeline_config_from_json(json{{"kfold", 1}}), ConfigError);
  EXPECT_THROW(pipeline_config_from_json(json{{"features", {{"frame_ms", "wide"}}}}), ConfigError);
  EXPECT_THROW(pipeline_config_from_json(json{{"features", {{"trim_min_s", 6}, {"trim_max_s", 5}}}}),
               ConfigError);
  EXPECT_THROW(pipeline_config_from_json(json::array()), ConfigError);
}

TEST(PipelineConfigTest, HashTracksFeatureGeometryOnly) {
  PipelineConfig a, b;
  b.algo.kind = AlgoKind::kLda;
  b.set_seed(7);
  b.balance = 10;
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.features.bispectral.grid_size = 32;
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(RunReportTest, RoundTripAndTamperCheck) {
  RunReport r;
  r.command = "train";
  r.evaluation = "cross_validation";
  r.config = pipeline_config_to_json({});
  r.config_hash = config_hash({});
  r.confusion = ConfusionMatrix({"Human", "Synthetic"});
  r.confusion.counts = {{40, 10}, {5, 45}};
  r.metrics = metrics(r.confusion, 1);
  r.rows = 100;
  r.artifacts = {{"model", "m.json"}};
  const json j = run_report_to_json(r);
  const RunReport back = run_report_from_json(j);
  EXPECT_EQ(run_report_to_json(back), j);
  ASSERT_TRUE(back.metrics.positive.has_value());
  EXPECT_EQ(back.metrics.positive->name, "Synthetic");

  json tampered = j;
  tampered["metrics"]["accuracy"] = 0.99;
  EXPECT_THROW(run_report_from_json(tampered), IoError);
  tampered = j;
  tampered["confusion"]["counts"][0][0] = 41;
  EXPECT_THROW(run_report_from_json(tampered), IoError);
}

TEST_F(PipelineTest, ExtractThreeClipsGivesThreeRows) {
  write_synth_corpus(path("three"), 3, 2, 11);
  Captured c;
  ASSERT_EQ(cmd_extract(c.ctx(), path("three") / "manifest.csv", path("three.csv")), 0);
  EXPECT_EQ(data_rows(path("three.csv")), 3u);
}

TEST_F(PipelineTest, CorruptClipIsSkippedAndLogged) {
  write_synth_corpus(path("corrupt"), 3, 2, 11);
  std::ofstream(path("corrupt") / "clip_00001.wav", std::ios::binary) << "RIFF garbage";
  Captured c;
  ASSERT_EQ(cmd_extract(c.ctx(), path("corrupt") / "manifest.csv", path("corrupt.csv")), 0);
  EXPECT_EQ(data_rows(path("corrupt.csv")), 2u);
  std::size_t skips = 0;
  for (const auto& line : lines_of(c.err.str())) {
    if (line.rfind("skip clip_00001.wav", 0) == 0) ++skips;
  }
  EXPECT_EQ(skips, 1u);
}

TEST_F(PipelineTest, AllRejectedIsNonZero) {
  fs::create_directories(path("bad"));
  std::ofstream(path("bad") / "manifest.csv") << "missing.wav,Human\n";
  Captured c;
  EXPECT_EQ(cmd_extract(c.ctx(), path("bad") / "manifest.csv", path("bad.csv")), 1);
  EXPECT_FALSE(fs::exists(path("bad.csv")));
}

TEST_F(PipelineTest, ExtractIsByteIdenticalAcrossRunsAndWorkers) {
  Captured c;
  auto ctx = c.ctx();
  ctx.workers = 3;
  ASSERT_EQ(cmd_extract(ctx, manifest(), path("again.csv")), 0);
  EXPECT_EQ(slurp(path("again.csv")), slurp(path("features.csv")));
}

TEST_F(PipelineTest, ExtractEmbedsConfigHash) {
  std::ifstream f(path("features.csv"));
  const FeatureCsv csv = read_feature_csv(f);
  ASSERT_FALSE(csv.meta.empty());
  EXPECT_EQ(csv.meta[0].first, "config_hash");
  EXPECT_EQ(csv.meta[0].second, config_hash({}));
  EXPECT_EQ(csv.table.size(), 12u);
}

TEST_F(PipelineTest, TrainReportSchema) {
  const RunReport r = run_report_from_json(json::parse(slurp(path("report.json"))));
  EXPECT_EQ(r.evaluation, "cross_validation");
  EXPECT_GE(r.metrics.accuracy, 0.0);
  EXPECT_LE(r.metrics.accuracy, 1.0);
  EXPECT_EQ(r.confusion.total(), 12u);
  EXPECT_EQ(r.rows, 12u);
  EXPECT_EQ(r.config_hash, config_hash({}));
}

TEST_F(PipelineTest, SameSeedSameModelFile) {
  PipelineConfig cfg;
  cfg.kfold = 3;
  cfg.algo.boost_rounds = 10;
  Captured c;
  ASSERT_EQ(cmd_train(c.ctx(cfg), path("features.csv"), path("model2.json"), {}), 0);
  EXPECT_EQ(slurp(path("model2.json")), slurp(path("model.json")));
}

TEST_F(PipelineTest, BalanceKeepsExactlyPerClassRows) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  FeatureTable table;
  for (int c = 0; c < 4; ++c) {
    for (int i = 0; i < 160 + 10 * c; ++i) {
      FeatureVector fv;
      for (auto& v : fv.values) v = g(rng) + c;
      fv.label = static_cast<ClassLabel>(c);
      table.add(fv);
    }
  }
  {
    std::ofstream f(path("four.csv"));
    write_feature_csv(f, table, {{"config_hash", config_hash({})}});
  }
  PipelineConfig cfg;
  cfg.scenario = Scenario::kMulti;
  cfg.algo.kind = AlgoKind::kGaussianNb;
  cfg.balance = 150;
  Captured c;
  ASSERT_EQ(cmd_train(c.ctx(cfg), path("four.csv"), path("four.json"), path("four_report.json")), 0)
      << c.err.str();
  const RunReport r = run_report_from_json(json::parse(slurp(path("four_report.json"))));
  EXPECT_EQ(r.rows, 600u);
  EXPECT_EQ(r.confusion.total(), 600u);
  for (const auto& row : r.confusion.counts) {
    std::size_t n = 0;
    for (auto v : row) n += v;
    EXPECT_EQ(n, 150u);
  }

  cfg.balance = 500;
  Captured c2;
  EXPECT_EQ(cmd_train(c2.ctx(cfg), path("four.csv"), path("four2.json"), {}), 2);
}

TEST_F(PipelineTest, PredictBinaryCodomain) {
  Captured c;
  ASSERT_EQ(cmd_predict(c.ctx(), path("model.json"), {clip(0), clip(1)}), 0) << c.out.str();
  const auto lines = lines_of(c.out.str());
  ASSERT_EQ(lines.size(), 2u);
  for (const auto& line : lines) {
    const json rec = json::parse(line);
    const std::string label = rec.at("label");
    EXPECT_TRUE(label == "Human" || label == "Synthetic") << label;
    double sum = 0.0;
    for (const auto& [_, v] : rec.at("scores").items()) sum += v.get<double>();
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST_F(PipelineTest, PredictReportsFailuresInline) {
  std::ofstream(path("broken.wav"), std::ios::binary) << "not audio";
  Captured c;
  EXPECT_EQ(cmd_predict(c.ctx(), path("model.json"), {clip(0), path("broken.wav"), clip(2)}), 1);
  const auto lines = lines_of(c.out.str());
  ASSERT_EQ(lines.size(), 3u);
  std::size_t records = 0, errors = 0;
  for (const auto& line : lines) {
    const json rec = json::parse(line);
    if (rec.contains("error")) {
      ++errors;
    } else {
      ++records;
    }
  }
  EXPECT_EQ(records, 2u);
  EXPECT_EQ(errors, 1u);
}

TEST_F(PipelineTest, PredictHashMismatchIsHardError) {
  PipelineConfig other;
  other.features.bispectral.segments = 50;
  Captured c;
  EXPECT_EQ(cmd_predict(c.ctx(other, true), path("model.json"), {clip(0)}), 2);
  EXPECT_TRUE(c.out.str().empty());
  EXPECT_NE(c.err.str().find("hash"), std::string::npos);

  Captured same;
  EXPECT_EQ(cmd_predict(same.ctx({}, true), path("model.json"), {clip(0)}), 0);
}

TEST_F(PipelineTest, EvalMatchesTrainingTable) {
  Captured c;
  ASSERT_EQ(cmd_eval(c.ctx(), path("model.json"), path("features.csv"), path("eval.json")), 0)
      << c.err.str();
  const RunReport r = run_report_from_json(json::parse(slurp(path("eval.json"))));
  EXPECT_EQ(r.confusion.total(), 12u);
  EXPECT_EQ(r.evaluation, "dataset");
}

TEST_F(PipelineTest, BicoherenceRelicInUnitRange) {
  for (auto kind : {RelicKind::kBicoherence, RelicKind::kPhase}) {
    Captured c;
    ASSERT_EQ(cmd_relics(c.ctx(), clip(0), kind, path("relic")), 0) << c.err.str();
    const std::string pgm = slurp(path("relic.pgm"));
    EXPECT_EQ(pgm.rfind("P5\n64 64\n255\n", 0), 0u);
    EXPECT_EQ(pgm.size(), std::string("P5\n64 64\n255\n").size() + 64 * 64);
    std::size_t cells = 0;
    for (const auto& line : lines_of(slurp(path("relic.csv")))) {
      std::istringstream in(line);
      for (std::string cell; std::getline(in, cell, ',');) {
        const double v = std::stod(cell);
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
        ++cells;
      }
    }
    EXPECT_EQ(cells, 64u * 64u);
  }
}

TEST_F(PipelineTest, SilenceMelRelicIsConstant) {
  write_wav_file(path("silence.wav"), AudioClip(std::vector<double>(16000, 0.0), 16000));
  Captured c;
  ASSERT_EQ(cmd_relics(c.ctx(), path("silence.wav"), RelicKind::kMelspec, path("mel")), 0);
  const std::string pgm = slurp(path("mel.pgm"));
  const std::size_t header = pgm.find("255\n") + 4;
  ASSERT_LT(header, pgm.size());
  EXPECT_EQ(std::set<char>(pgm.begin() + header, pgm.end()).size(), 1u);
}

TEST_F(PipelineTest, RelicsAreDeterministic) {
  Captured c;
  ASSERT_EQ(cmd_relics(c.ctx(), clip(3), RelicKind::kBicoherence, path("r1")), 0);
  ASSERT_EQ(cmd_relics(c.ctx(), clip(3), RelicKind::kBicoherence, path("r2")), 0);
  EXPECT_EQ(slurp(path("r1.pgm")), slurp(path("r2.pgm")));
  EXPECT_EQ(slurp(path("r1.csv")), slurp(path("r2.csv")));
}

TEST_F(PipelineTest, CrnnTrainPredictEval) {
  PipelineConfig cfg;
  cfg.model = ModelType::kCrnn;
  cfg.train.epochs = 2;
  cfg.train.batch_size = 4;
  cfg.set_seed(4);
  Captured a, b;
  ASSERT_EQ(cmd_train(a.ctx(cfg), manifest(), path("net1.bin"), path("net_report.json")), 0)
      << a.err.str();
  ASSERT_EQ(cmd_train(b.ctx(cfg), manifest(), path("net2.bin"), {}), 0);
  EXPECT_EQ(slurp(path("net1.bin")), slurp(path("net2.bin")));
  EXPECT_EQ(data_rows(path("net1.bin.history.csv")), 2u);

  const RunReport r = run_report_from_json(json::parse(slurp(path("net_report.json"))));
  EXPECT_EQ(r.evaluation, "test_split");
  EXPECT_GT(r.confusion.total(), 0u);

  Captured p;
  ASSERT_EQ(cmd_predict(p.ctx(), path("net1.bin"), {clip(0)}), 0) << p.out.str();
  const json rec = json::parse(lines_of(p.out.str()).at(0));
  const std::string label = rec.at("label");
  EXPECT_TRUE(label == "Human" || label == "Synthetic");

  Captured e;
  EXPECT_EQ(cmd_eval(e.ctx(), path("net1.bin"), manifest(), {}), 0) << e.err.str();
}

TEST_F(PipelineTest, SynthWritesManifest) {
  Captured c;
  PipelineConfig cfg;
  cfg.set_seed(8);
  ASSERT_EQ(cmd_synth(c.ctx(cfg), path("synth4"), 8, 4), 0);
  const auto entries = read_manifest(path("synth4") / "manifest.csv");
  ASSERT_EQ(entries.size(), 8u);
  std::set<ClassLabel> labels;
  for (const auto& e : entries) labels.insert(e.label);
  EXPECT_EQ(labels.size(), 4u);
  EXPECT_EQ(cmd_synth(c.ctx(cfg), path("synth0"), 0, 2), 2);
}

}  // namespace
}  // namespace synthdetect
