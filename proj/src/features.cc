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

#include "synthdetect/features.h"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "synthdetect/errors.h"

namespace synthdetect {

Moments moments(std::span<const double> values) {
  if (values.empty()) throw ConfigError("moments of an empty sequence");
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  Moments m;
  m.mean = sum / n;

  double s2 = 0.0, s3 = 0.0, s4 = 0.0;
  for (double v : values) {
    const double d = v - m.mean;
    const double d2 = d * d;
    s2 += d2;
    s3 += d2 * d;
    s4 += d2 * d2;
  }
  m.variance = s2 / n;
  if (m.variance > 0.0) {
    m.skewness = (s3 / n) / std::pow(m.variance, 1.5);
    m.kurtosis = (s4 / n) / (m.variance * m.variance);
  }
  return m;
}

FeatureVector extract_feature_vector(const AudioClip& clip, ClassLabel label,
                                     const FeatureConfig& cfg) {
  const AudioClip mono = to_mono(clip);
  FeatureVector fv;
  fv.label = label;
  try {
    const BicoherenceGrid grid = normalized_bicoherence(mono, cfg.bispectral);
    const Moments mag = moments(grid.magnitude.values());
    const Moments phase = moments(grid.phase.values());
    fv.values[0] = mag.mean;
    fv.values[1] = mag.variance;
    fv.values[2] = mag.skewness;
    fv.values[3] = mag.kurtosis;
    fv.values[4] = phase.mean;
    fv.values[5] = phase.variance;
    fv.values[6] = phase.skewness;
    fv.values[7] = phase.kurtosis;

    const CepstralMatrix c = mfcc(mono, cfg.mfcc);
    const CepstralMatrix d = delta(c);
    const CepstralMatrix d2 = delta(d);
    std::size_t col = 8;
    for (const auto* m : {&c, &d, &d2}) {
      const Moments s = moments(m->values.values());
      fv.values[col++] = s.mean;
      fv.values[col++] = s.variance;
    }
  } catch (const EmptyResult& e) {
    throw FeatureError(mono.source_id() + ": clip too short: " + e.what());
  } catch (const ConfigError& e) {
    throw FeatureError(mono.source_id() + ": " + e.what());
  }
  for (double v : fv.values)
    if (!std::isfinite(v)) throw FeatureError(mono.source_id() + ": non-finite feature");
  return fv;
}

std::string_view subset_name(FeatureSubset subset) {
  switch (subset) {
    case FeatureSubset::kBicoMag: return "bico_mag";
    case FeatureSubset::kBicoPhase: return "bico_phase";
    case FeatureSubset::kMfcc: return "mfcc";
    case FeatureSubset::kDelta: return "delta";
    case FeatureSubset::kDelta2: return "delta2";
    case FeatureSubset::kBicoAll: return "bico_all";
    case FeatureSubset::kCepstralAll: return "cepstral_all";
    case FeatureSubset::kAll: return "all";
  }
  return "?";
}

std::optional<FeatureSubset> parse_subset(std::string_view text) {
  for (int i = 0; i <= static_cast<int>(FeatureSubset::kAll); ++i) {
    const auto s = static_cast<FeatureSubset>(i);
    if (subset_name(s) == text) return s;
  }
  return std::nullopt;
}

std::vector<std::size_t> subset_columns(FeatureSubset subset) {
  const auto range = [](std::size_t from, std::size_t to) {
    std::vector<std::size_t> cols;
    for (std::size_t i = from; i < to; ++i) cols.push_back(i);
    return cols;
  };
  switch (subset) {
    case FeatureSubset::kBicoMag: return range(0, 4);
    case FeatureSubset::kBicoPhase: return range(4, 8);
    case FeatureSubset::kMfcc: return range(8, 10);
    case FeatureSubset::kDelta: return range(10, 12);
    case FeatureSubset::kDelta2: return range(12, 14);
    case FeatureSubset::kBicoAll: return range(0, 8);
    case FeatureSubset::kCepstralAll: return range(8, 14);
    case FeatureSubset::kAll: return range(0, 14);
  }
  return {};
}

std::vector<double> FeatureTable::row_values(std::size_t i) const {
  const auto cols = subset_columns(subset_);
  std::vector<double> out;
  out.reserve(cols.size());
  for (auto c : cols) out.push_back(rows_.at(i).values[c]);
  return out;
}

std::vector<ClassLabel> FeatureTable::labels() const {
  std::vector<ClassLabel> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(r.label);
  return out;
}

FeatureTable select_subset(const FeatureTable& table, FeatureSubset subset) {
  return FeatureTable(table.rows(), subset);
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_feature_csv(std::ostream& out, const FeatureTable& table,
                       const std::vector<std::pair<std::string, std::string>>& meta) {
  for (const auto& [k, v] : meta) out << "# " << k << '=' << v << '\n';
  for (const auto name : kFeatureNames) out << name << ',';
  out << "label\n";
  for (const auto& row : table.rows()) {
    for (double v : row.values) out << format_double(v) << ',';
    out << label_name(row.label) << '\n';
  }
}

FeatureCsv read_feature_csv(std::istream& in) {
  FeatureCsv csv;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<FeatureVector> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto body = line.substr(line.find_first_not_of("# "));
      const auto eq = body.find('=');
      if (eq != std::string::npos) csv.meta.emplace_back(body.substr(0, eq), body.substr(eq + 1));
      continue;
    }
    if (!header_seen) {
      std::string expected;
      for (const auto name : kFeatureNames) expected += std::string(name) + ',';
      expected += "label";
      if (line != expected) throw ManifestError(line_no, "unexpected feature CSV header");
      header_seen = true;
      continue;
    }
    std::stringstream ss(line);
    std::string field;
    FeatureVector fv;
    for (std::size_t i = 0; i < kNumFeatures; ++i) {
      if (!std::getline(ss, field, ','))
        throw ManifestError(line_no, "expected 15 fields");
      const auto res = std::from_chars(field.data(), field.data() + field.size(), fv.values[i]);
      if (res.ec != std::errc() || res.ptr != field.data() + field.size())
        throw ManifestError(line_no, "bad number '" + field + "'");
    }
    if (!std::getline(ss, field, ',')) throw ManifestError(line_no, "missing label");
    const auto label = parse_label(field);
    if (!label) throw ManifestError(line_no, "unknown label '" + field + "'");
    fv.label = *label;
    if (std::getline(ss, field, ',')) throw ManifestError(line_no, "too many fields");
    rows.push_back(fv);
  }
  if (!header_seen) throw ManifestError(line_no, "missing feature CSV header");
  csv.table = FeatureTable(std::move(rows));
  return csv;
}

}  // namespace synthdetect
