/*
Copyright 2026 The sylkit Authors. All rights reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

// Text serialisations: syllable sets (JSON), evaluation reports (JSON and
// a flat CSV with one row per pipeline), embedding files (FSF1).

#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "json.hpp"
#include "sylkit/embedding.hpp"
#include "sylkit/error.hpp"
#include "sylkit/evaluation.hpp"
#include "sylkit/fsf.hpp"
#include "sylkit/types.hpp"

namespace sylkit {

inline std::string syllables_to_json(const SyllableSet& set) {
  const auto q = [](const std::string& s) { return nlohmann::json(s).dump(); };
  std::string out = "{\n";
  out += "  \"audio\": " + q(set.audio) + ",\n";
  out += fmt::format("  \"duration_s\": {:.6f},\n", set.audio_duration_s);
  out += "  \"method\": " + q(set.method_tag) + ",\n";
  out += "  \"syllables\": [";
  for (std::size_t k = 0; k < set.syllables.size(); ++k) {
    const Syllable& s = set.syllables[k];
    out += fmt::format("{}\n    {{\"onset_s\": {:.6f}, \"nucleus_s\": {:.6f}, \"offset_s\": {:.6f}}}",
                       k == 0 ? "" : ",", s.onset_s, s.nucleus_s, s.offset_s);
  }
  out += set.syllables.empty() ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

inline SyllableSet syllables_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    fail(ErrorCode::kParseError, "syllable file is not a JSON object");
  SyllableSet set;
  try {
    set.audio = j.value("audio", "");
    set.audio_duration_s = j.at("duration_s").get<double>();
    set.method_tag = j.value("method", "");
    for (const auto& s : j.at("syllables"))
      set.syllables.push_back({s.at("onset_s").get<double>(), s.at("nucleus_s").get<double>(),
                               s.at("offset_s").get<double>()});
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParseError, std::string("malformed syllable file: ") + e.what());
  }
  return set;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kUnreadableFile, "cannot write " + path.string());
  out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kUnreadableFile, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_syllables(const std::filesystem::path& path, const SyllableSet& set) {
  write_text(path, syllables_to_json(set));
}

inline SyllableSet read_syllables(const std::filesystem::path& path) {
  try {
    return syllables_from_json(read_text(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

inline nlohmann::json to_json(const MatchCounts& c) {
  return {{"tp", c.tp},
          {"insertions", c.insertions},
          {"deletions", c.deletions},
          {"substitutions", c.substitutions}};
}

inline nlohmann::json to_json(const GranularityScore& s) {
  return {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
}

inline nlohmann::json to_json(const PooledScores& p) {
  nlohmann::json j;
  j["files"] = p.files;
  j["audio_s"] = p.audio_s;
  j["elapsed_s"] = p.elapsed_s;
  j["predicted_nuclei"] = p.predicted_nuclei;
  j["tok_per_s"] = p.tok_per_s;
  j["rtfx"] = p.rtfx ? nlohmann::json(*p.rtfx) : nlohmann::json(nullptr);
  for (int g = 0; g < 3; ++g) {
    if (!p.counts[g]) continue;
    nlohmann::json e = to_json(*p.counts[g]);
    e.update(to_json(*p.scores[g]));
    j[std::string(to_string(static_cast<Granularity>(g)))] = e;
  }
  return j;
}

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json j;
  j["tolerance_s"] = r.tolerance_s;
  j["pooled"] = to_json(r.pooled);
  j["corpora"] = nlohmann::json::object();
  for (const auto& [name, c] : r.corpora) j["corpora"][name] = to_json(c);
  j["macro"] = nlohmann::json::object();
  for (int g = 0; g < 3; ++g)
    if (r.macro[g]) j["macro"][std::string(to_string(static_cast<Granularity>(g)))] = to_json(*r.macro[g]);
  j["files"] = nlohmann::json::array();
  for (const FileEval& f : r.files) {
    nlohmann::json e;
    e["id"] = f.id;
    e["corpus"] = f.corpus;
    e["audio_duration_s"] = f.audio_duration_s;
    e["predicted_nuclei"] = f.predicted_nuclei;
    e["elapsed_s"] = f.elapsed_s;
    for (int g = 0; g < 3; ++g) {
      const auto& c = f.at(static_cast<Granularity>(g));
      if (c) e[std::string(to_string(static_cast<Granularity>(g)))] = to_json(*c);
    }
    j["files"].push_back(e);
  }
  return j;
}

// One row of the summary table.
struct SummaryRow {
  std::string features;
  std::string envelope;
  std::string segmentation;
  PooledScores scores;
  std::string status = "ok";
};

inline std::string csv_header() {
  std::string h = "features,envelope,segmentation";
  for (const char* g : {"nuclei", "boundaries", "spans"})
    for (const char* m : {"precision", "recall", "f1"}) h += fmt::format(",{}_{}", g, m);
  return h + ",tok_per_s,rtfx,status\n";
}

inline std::string csv_row(const SummaryRow& row) {
  auto field = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  std::string out = field(row.features) + "," + field(row.envelope) + "," + field(row.segmentation);
  const bool ok = row.status == "ok";
  for (int g = 0; g < 3; ++g) {
    const auto& s = row.scores.scores[g];
    if (ok && s)
      out += fmt::format(",{:.6f},{:.6f},{:.6f}", s->precision, s->recall, s->f1);
    else
      out += ",,,";
  }
  out += ok ? fmt::format(",{:.6f}", row.scores.tok_per_s) : std::string(",");
  out += ok && row.scores.rtfx ? fmt::format(",{:.3f}", *row.scores.rtfx) : std::string(",");
  return out + "," + field(row.status) + "\n";
}

inline std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::string out = csv_header();
  for (const auto& r : rows) out += csv_row(r);
  return out;
}

inline FeatureMatrix embeddings_to_matrix(const std::vector<SyllableEmbedding>& emb,
                                          std::size_t dims, double frame_period_s) {
  FeatureMatrix m(emb.size(), dims, frame_period_s, 0.0, "embedding");
  for (std::size_t r = 0; r < emb.size(); ++r)
    for (std::size_t d = 0; d < dims; ++d) m.at(r, d) = static_cast<float>(emb[r].vector[d]);
  return m;
}

// Rows are syllables; their times and the pooling mode go in the metadata.
inline void write_embeddings(const std::filesystem::path& path,
                             const std::vector<SyllableEmbedding>& emb, PoolMode mode,
                             std::size_t feature_dims, double frame_period_s) {
  const std::size_t dims = embedding_dims(mode, feature_dims);
  nlohmann::json meta;
  meta["pool_mode"] = std::string(to_string(mode));
  meta["syllables"] = nlohmann::json::array();
  for (const auto& e : emb)
    meta["syllables"].push_back({e.syllable.onset_s, e.syllable.nucleus_s, e.syllable.offset_s});
  write_feature_file(path, embeddings_to_matrix(emb, dims, frame_period_s), meta);
}

}  // namespace sylkit
