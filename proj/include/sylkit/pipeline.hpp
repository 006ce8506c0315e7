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

// Declarative pipelines (cue + segmenter), corpus manifests, the batch
// benchmark driver and the synthetic corpus generator.

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "sylkit/audio.hpp"
#include "sylkit/envelopes.hpp"
#include "sylkit/error.hpp"
#include "sylkit/evaluation.hpp"
#include "sylkit/features.hpp"
#include "sylkit/fsf.hpp"
#include "sylkit/io.hpp"
#include "sylkit/segmentation.hpp"
#include "sylkit/textgrid.hpp"
#include "sylkit/types.hpp"

namespace sylkit {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Worker pool

// FINDSYLLS_THREADS caps the worker count.
inline std::size_t worker_count() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("FINDSYLLS_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) n = std::min(n, static_cast<std::size_t>(cap));
  }
  return n;
}

// Runs fn(i) for i in [0, n) on the worker pool. The first exception (by
// index) is rethrown after all workers finish.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(worker_count(), n);
  std::vector<std::exception_ptr> errors(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Pipeline specification

enum class FeatureSource { kRaw, kMfcc, kLogmel, kFile };
enum class SegmenterKind { kPeakdetect, kCosineThreshold, kMincut, kClsThreshold };

inline std::string_view to_string(FeatureSource f) {
  switch (f) {
    case FeatureSource::kRaw: return "raw";
    case FeatureSource::kMfcc: return "mfcc";
    case FeatureSource::kLogmel: return "logmel";
    case FeatureSource::kFile: return "file";
  }
  return "unknown";
}

inline std::string_view to_string(SegmenterKind s) {
  switch (s) {
    case SegmenterKind::kPeakdetect: return "peakdetect";
    case SegmenterKind::kCosineThreshold: return "cosine_threshold";
    case SegmenterKind::kMincut: return "mincut";
    case SegmenterKind::kClsThreshold: return "cls_threshold";
  }
  return "unknown";
}

inline FeatureSource feature_source_from_string(std::string_view s) {
  for (auto f : {FeatureSource::kRaw, FeatureSource::kMfcc, FeatureSource::kLogmel,
                 FeatureSource::kFile})
    if (to_string(f) == s) return f;
  fail(ErrorCode::kIncompatibleSpec, "unknown feature source: " + std::string(s));
}

inline SegmenterKind segmenter_from_string(std::string_view s) {
  for (auto k : {SegmenterKind::kPeakdetect, SegmenterKind::kCosineThreshold,
                 SegmenterKind::kMincut, SegmenterKind::kClsThreshold})
    if (to_string(k) == s) return k;
  fail(ErrorCode::kIncompatibleSpec, "unknown segmenter: " + std::string(s));
}

struct PipelineSpec {
  std::string tag;
  FeatureSource features = FeatureSource::kRaw;
  std::string features_name;  // label for reports when features come from files
  fs::path features_dir;      // kFile in batch runs: <dir>/<stem>.fsf
  std::optional<CueKind> cue;
  SegmenterKind segmenter = SegmenterKind::kPeakdetect;
  std::map<std::string, double> params;

  std::string features_label() const {
    if (features == FeatureSource::kRaw) return "audio";
    if (features == FeatureSource::kFile && !features_name.empty()) return features_name;
    return std::string(to_string(features));
  }
  std::string cue_label() const { return cue ? std::string(to_string(*cue)) : "-"; }
  std::string display_tag() const {
    if (!tag.empty()) return tag;
    return features_label() + "+" + cue_label() + "+" + std::string(to_string(segmenter));
  }
};

inline const std::set<std::string>& known_params() {
  static const std::set<std::string> keys = {
      // peakdetect
      "delta", "lookahead",
      // envelopes
      "win_s", "hop_s", "cutoff_hz", "order", "smooth_hz", "gamma", "smooth_s", "low_lo_hz",
      "low_hi_hz", "high_lo_hz", "high_hi_hz", "center_hz", "q",
      // classical features
      "feat_win_s", "feat_hop_s", "n_mels", "n_coeffs",
      // greedy cosine
      "threshold", "norm_floor_ratio",
      // mincut
      "expected_dur_s", "min_len_frames", "window_frames",
      // cls threshold
      "tau_quantile", "gap_min_s", "len_min_s"};
  return keys;
}

// Throws kIncompatibleSpec naming the first violated rule.
inline void validate(const PipelineSpec& spec) {
  auto bad = [&](const std::string& why) {
    fail(ErrorCode::kIncompatibleSpec, "incompatible pipeline '" + spec.display_tag() + "': " + why);
  };
  const bool raw = spec.features == FeatureSource::kRaw;
  const std::string seg(to_string(spec.segmenter));
  if (spec.cue && is_envelope_kind(*spec.cue) && !raw)
    bad("envelope '" + spec.cue_label() + "' is computed from audio, not from " +
        spec.features_label() + " features");
  if (spec.cue && !is_envelope_kind(*spec.cue) && raw)
    bad("trace '" + spec.cue_label() + "' needs a feature source");
  if (spec.cue == CueKind::kClsAttn && spec.features != FeatureSource::kFile)
    bad("cls_attn traces come from feature files");
  switch (spec.segmenter) {
    case SegmenterKind::kPeakdetect:
    case SegmenterKind::kClsThreshold:
      if (!spec.cue) bad("segmenter '" + seg + "' needs a 1-D cue (envelope or trace)");
      break;
    case SegmenterKind::kMincut:
      if (raw)
        bad("segmenter 'mincut' needs a feature source for the SSM" +
            (spec.cue ? ", got envelope '" + spec.cue_label() + "'" : std::string()));
      break;
    case SegmenterKind::kCosineThreshold:
      if (raw)
        bad("segmenter 'cosine_threshold' needs a feature source" +
            (spec.cue ? ", got envelope '" + spec.cue_label() + "'" : std::string()));
      break;
  }
  for (const auto& [k, v] : spec.params) {
    if (known_params().count(k) == 0) bad("unknown parameter '" + k + "'");
    if (!std::isfinite(v)) bad("parameter '" + k + "' is not finite");
  }
}

struct PipelineInput {
  const AudioBuffer* audio = nullptr;
  const FeatureMatrix* features = nullptr;
  double duration_s = 0.0;  // 0: derive from audio or features
  std::string name;
};

struct PipelineOutput {
  SyllableSet syllables;
  std::optional<Series> cue;
};

namespace pipeline_detail {

inline std::optional<double> get(const PipelineSpec& s, const std::string& k) {
  const auto it = s.params.find(k);
  if (it == s.params.end()) return std::nullopt;
  return it->second;
}

inline double get_or(const PipelineSpec& s, const std::string& k, double dflt) {
  return get(s, k).value_or(dflt);
}

inline std::size_t get_count(const PipelineSpec& s, const std::string& k, std::size_t dflt) {
  const auto v = get(s, k);
  if (!v) return dflt;
  if (*v < 0 || std::floor(*v) != *v)
    fail(ErrorCode::kIncompatibleSpec, "parameter '" + k + "' must be a nonnegative integer");
  return static_cast<std::size_t>(*v);
}

inline Envelope envelope_for(const PipelineSpec& s, const AudioBuffer& a, CueKind kind) {
  const double hop = get_or(s, "hop_s", kEnvelopeHopS);
  switch (kind) {
    case CueKind::kRms: return rms_envelope(a, get_or(s, "win_s", kEnvelopeWindowS), hop);
    case CueKind::kLowpass:
      return lowpass_envelope(a, get_or(s, "cutoff_hz", 10.0),
                              static_cast<int>(get_count(s, "order", 4)), hop);
    case CueKind::kHilbert: return hilbert_envelope(a, get_or(s, "smooth_hz", 10.0), hop);
    case CueKind::kSbs: {
      SbsParams p;
      p.low_band = {get_or(s, "low_lo_hz", p.low_band.lo_hz), get_or(s, "low_hi_hz", p.low_band.hi_hz)};
      p.high_band = {get_or(s, "high_lo_hz", p.high_band.lo_hz),
                     get_or(s, "high_hi_hz", p.high_band.hi_hz)};
      p.gamma = get_or(s, "gamma", p.gamma);
      p.smooth_s = get_or(s, "smooth_s", p.smooth_s);
      return sbs_envelope(a, p);
    }
    case CueKind::kTheta:
      return theta_envelope(a, get_or(s, "center_hz", 5.0), get_or(s, "q", 1.0), hop);
    default: break;
  }
  fail(ErrorCode::kIncompatibleSpec, "not an envelope: " + std::string(to_string(kind)));
}

}  // namespace pipeline_detail

// Cue computation and segmentation for one file. Interval segmenters keep
// their own nuclei unless a cue is configured, in which case each nucleus is
// the cue argmax inside the interval.
inline PipelineOutput run_pipeline(const PipelineSpec& spec, const PipelineInput& in) {
  using namespace pipeline_detail;
  validate(spec);
  const bool raw = spec.features == FeatureSource::kRaw;
  if ((raw || spec.features == FeatureSource::kMfcc || spec.features == FeatureSource::kLogmel) &&
      in.audio == nullptr)
    fail(ErrorCode::kInvalidArgument, "pipeline needs audio input");
  if (spec.features == FeatureSource::kFile && in.features == nullptr)
    fail(ErrorCode::kInvalidArgument, "pipeline needs a feature file");

  std::optional<FeatureMatrix> computed;
  const FeatureMatrix* feats = in.features;
  if (spec.features == FeatureSource::kMfcc) {
    MfccParams p;
    p.n_coeffs = get_count(spec, "n_coeffs", p.n_coeffs);
    p.n_mels = get_count(spec, "n_mels", p.n_mels);
    p.win_s = get_or(spec, "feat_win_s", p.win_s);
    p.hop_s = get_or(spec, "feat_hop_s", p.hop_s);
    computed = mfcc(*in.audio, p);
    feats = &*computed;
  } else if (spec.features == FeatureSource::kLogmel) {
    MelParams p;
    p.n_mels = get_count(spec, "n_mels", p.n_mels);
    p.win_s = get_or(spec, "feat_win_s", p.win_s);
    p.hop_s = get_or(spec, "feat_hop_s", p.hop_s);
    computed = logmel(*in.audio, p);
    feats = &*computed;
  }

  double duration = in.duration_s;
  if (!(duration > 0.0))
    duration = in.audio ? in.audio->duration_s() : feats ? feats->span_end_s() : 0.0;

  std::optional<SelfSimilarityMatrix> sim;
  auto get_ssm = [&]() -> const SelfSimilarityMatrix& {
    if (!sim) sim = ssm(*feats);
    return *sim;
  };

  PipelineOutput out;
  if (spec.cue) {
    const CueKind k = *spec.cue;
    if (is_envelope_kind(k)) out.cue = envelope_for(spec, *in.audio, k);
    else if (k == CueKind::kCosSim) out.cue = cosine_trace(*feats);
    else if (k == CueKind::kSsmRowMean) out.cue = ssm_row_mean(get_ssm());
    else if (k == CueKind::kNorm) out.cue = norm_trace(*feats);
    else out.cue = series_from_feature_matrix(*feats, CueKind::kClsAttn);
  }

  switch (spec.segmenter) {
    case SegmenterKind::kPeakdetect: {
      const Series& cue = *out.cue;
      PeakDetectParams p;
      if (cue.size() >= 4) p = auto_calibrate(cue);
      else p = {kDeltaFloor, 1};
      if (auto d = get(spec, "delta")) p.delta = *d;
      p.lookahead = get_count(spec, "lookahead", p.lookahead);
      out.syllables = cue.size() >= 2 ? peaks_to_syllables(cue, peakdetect(cue, p), duration)
                                      : SyllableSet{{}, duration, {}, {}};
      break;
    }
    case SegmenterKind::kCosineThreshold: {
      GreedyCosineParams p;
      p.threshold = get_or(spec, "threshold", p.threshold);
      p.norm_floor_ratio = get_or(spec, "norm_floor_ratio", p.norm_floor_ratio);
      out.syllables = greedy_cosine_segment(*feats, p, duration);
      break;
    }
    case SegmenterKind::kMincut: {
      MinCutParams p;
      p.expected_dur_s = get_or(spec, "expected_dur_s", p.expected_dur_s);
      p.min_len_frames = get_count(spec, "min_len_frames", p.min_len_frames);
      p.window_frames = get_count(spec, "window_frames", p.window_frames);
      out.syllables = mincut_segment(get_ssm(), p, duration);
      break;
    }
    case SegmenterKind::kClsThreshold: {
      ThresholdParams p;
      p.tau_quantile = get_or(spec, "tau_quantile", p.tau_quantile);
      p.gap_min_s = get_or(spec, "gap_min_s", p.gap_min_s);
      p.len_min_s = get_or(spec, "len_min_s", p.len_min_s);
      out.syllables = threshold_segment(*out.cue, p, duration);
      break;
    }
  }
  if (out.cue && (spec.segmenter == SegmenterKind::kCosineThreshold ||
                  spec.segmenter == SegmenterKind::kMincut))
    out.syllables = with_cue_nuclei(std::move(out.syllables), *out.cue);
  out.syllables.method_tag = spec.display_tag();
  out.syllables.audio = in.name;
  return out;
}

// ---------------------------------------------------------------------------
// Corpus manifests

struct CorpusItem {
  std::string stem;
  fs::path wav;
  fs::path textgrid;
};

struct CorpusManifest {
  std::string name = "corpus";
  fs::path root;
  std::vector<CorpusItem> items;
  std::vector<std::string> unpaired;  // files with no partner, for reporting
  std::string tier = "syllables";
  GranularitySet granularities;
  std::set<std::string> silence_labels = default_silence_labels();
};

inline std::string lower_ext(const fs::path& p) {
  std::string e = p.extension().string();
  for (char& c : e) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return e;
}

// Pairs <stem>.wav with <stem>.TextGrid under root (recursively, by relative
// stem).
inline CorpusManifest scan_corpus(const fs::path& root, std::string name = "corpus") {
  if (!fs::is_directory(root))
    fail(ErrorCode::kUnreadableFile, "corpus root is not a directory: " + root.string());
  std::map<std::string, fs::path> wavs, grids;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    const std::string ext = lower_ext(e.path());
    auto rel = fs::relative(e.path(), root);
    const std::string key = (rel.parent_path() / rel.stem()).generic_string();
    if (ext == ".wav") wavs[key] = e.path();
    else if (ext == ".textgrid") grids[key] = e.path();
  }
  CorpusManifest m;
  m.name = std::move(name);
  m.root = root;
  for (const auto& [key, wav] : wavs) {
    const auto it = grids.find(key);
    if (it == grids.end()) m.unpaired.push_back(wav.string());
    else m.items.push_back({key, wav, it->second});
  }
  for (const auto& [key, grid] : grids)
    if (wavs.count(key) == 0) m.unpaired.push_back(grid.string());
  return m;
}

// ---------------------------------------------------------------------------
// Batch driver

struct BatchConfig {
  std::vector<CorpusManifest> corpora;
  std::vector<PipelineSpec> specs;
  double tolerance_s = kDefaultTolerance;
  fs::path output_dir;
  std::size_t chunk_files = 64;
};

inline GranularitySet parse_granularities(const std::vector<std::string>& names) {
  GranularitySet g{false, false, false};
  for (const auto& n : names) {
    switch (granularity_from_string(n)) {
      case Granularity::kNuclei: g.nuclei = true; break;
      case Granularity::kBoundaries: g.boundaries = true; break;
      case Granularity::kSpans: g.spans = true; break;
    }
  }
  return g;
}

// Parses a JSON batch configuration; relative paths resolve against
// `base_dir`. Any schema problem raises kIncompatibleSpec.
inline BatchConfig parse_batch_config(const std::string& text, const fs::path& base_dir) {
  const auto j = nlohmann::json::parse(text, nullptr, false, true);
  if (j.is_discarded() || !j.is_object())
    fail(ErrorCode::kIncompatibleSpec, "config is not a JSON object");
  auto resolve = [&](const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  BatchConfig cfg;
  try {
    cfg.tolerance_s = j.value("tolerance_s", kDefaultTolerance);
    cfg.output_dir = resolve(j.value("output_dir", std::string("batch_out")));
    cfg.chunk_files = j.value("chunk_files", std::size_t{64});
    for (const auto& c : j.at("corpora")) {
      CorpusManifest m = scan_corpus(resolve(c.at("root").get<std::string>()),
                                     c.value("name", std::string("corpus")));
      m.tier = c.value("tier", std::string("syllables"));
      if (c.contains("granularities"))
        m.granularities = parse_granularities(c.at("granularities").get<std::vector<std::string>>());
      if (c.contains("silence_labels")) {
        const auto labels = c.at("silence_labels").get<std::vector<std::string>>();
        m.silence_labels = {labels.begin(), labels.end()};
      }
      cfg.corpora.push_back(std::move(m));
    }
    std::set<std::string> tags;
    for (const auto& s : j.at("specs")) {
      PipelineSpec spec;
      spec.tag = s.at("tag").get<std::string>();
      if (!tags.insert(spec.tag).second)
        fail(ErrorCode::kIncompatibleSpec, "duplicate spec tag: " + spec.tag);
      spec.features = feature_source_from_string(s.value("features", std::string("raw")));
      spec.features_name = s.value("features_name", std::string());
      if (s.contains("features_dir")) spec.features_dir = resolve(s.at("features_dir").get<std::string>());
      if (spec.features == FeatureSource::kFile && spec.features_dir.empty())
        fail(ErrorCode::kIncompatibleSpec, "spec '" + spec.tag + "' reads features but has no features_dir");
      if (s.contains("cue")) {
        try {
          spec.cue = cue_kind_from_string(s.at("cue").get<std::string>());
        } catch (const Error& e) {
          fail(ErrorCode::kIncompatibleSpec, e.what());
        }
      }
      spec.segmenter = segmenter_from_string(s.at("segmenter").get<std::string>());
      if (s.contains("params"))
        for (const auto& [k, v] : s.at("params").items()) spec.params[k] = v.get<double>();
      validate(spec);
      cfg.specs.push_back(std::move(spec));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kIncompatibleSpec, std::string("invalid config: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIncompatibleSpec || e.code() == ErrorCode::kUnreadableFile)
      throw Error(ErrorCode::kIncompatibleSpec, e.what());
    fail(ErrorCode::kIncompatibleSpec, std::string("invalid config: ") + e.what());
  }
  if (cfg.corpora.empty() || cfg.specs.empty())
    fail(ErrorCode::kIncompatibleSpec, "config needs at least one corpus and one spec");
  return cfg;
}

struct SpecResult {
  PipelineSpec spec;
  std::optional<EvalReport> report;
  std::string status = "ok";
  std::vector<std::string> warnings;
};

struct BatchResult {
  std::vector<SpecResult> specs;
  std::vector<SummaryRow> rows;
  std::size_t warning_count = 0;
};

inline fs::path feature_path_for(const PipelineSpec& spec, const CorpusManifest& corpus,
                                 const CorpusItem& item) {
  const fs::path nested = spec.features_dir / corpus.name / (item.stem + ".fsf");
  if (fs::exists(nested)) return nested;
  return spec.features_dir / (item.stem + ".fsf");
}

// Segments and scores every file of every corpus for one spec. Ingest and
// evaluation run on the worker pool; cue computation + segmentation run
// serially and are the only stage inside the RTFx timing window.
inline SpecResult run_spec(const PipelineSpec& spec, const BatchConfig& cfg) {
  using Clock = std::chrono::steady_clock;
  SpecResult result;
  result.spec = spec;
  std::vector<FileEval> evals;
  try {
    for (const CorpusManifest& corpus : cfg.corpora) {
      for (const auto& u : corpus.unpaired)
        result.warnings.push_back(corpus.name + ": unpaired file skipped: " + u);
      const std::size_t chunk = std::max<std::size_t>(1, cfg.chunk_files);
      for (std::size_t base = 0; base < corpus.items.size(); base += chunk) {
        const std::size_t n = std::min(chunk, corpus.items.size() - base);
        std::vector<std::optional<AudioBuffer>> audio(n);
        std::vector<std::optional<FeatureMatrix>> feats(n);
        std::vector<std::optional<AnnotationTier>> refs(n);
        std::vector<std::string> ingest_errors(n);
        const bool need_audio = spec.features != FeatureSource::kFile;
        parallel_for(n, [&](std::size_t i) {
          const CorpusItem& item = corpus.items[base + i];
          try {
            refs[i] = parse_textgrid(item.textgrid, corpus.tier, corpus.silence_labels);
            if (need_audio) audio[i] = load_audio(item.wav);
          } catch (const Error& e) {
            ingest_errors[i] = e.what();
          }
          if (spec.features == FeatureSource::kFile) {
            const fs::path p = feature_path_for(spec, corpus, item);
            if (!fs::exists(p)) fail(ErrorCode::kUnreadableFile, "missing feature file " + p.string());
            feats[i] = read_feature_file(p);
          }
        });

        std::vector<std::optional<SyllableSet>> preds(n);
        std::vector<double> elapsed(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
          if (!ingest_errors[i].empty()) continue;
          PipelineInput in;
          in.audio = audio[i] ? &*audio[i] : nullptr;
          in.features = feats[i] ? &*feats[i] : nullptr;
          in.duration_s = audio[i] ? audio[i]->duration_s() : refs[i]->file_duration_s;
          in.name = corpus.items[base + i].wav.filename().string();
          const auto t0 = Clock::now();
          PipelineOutput out = run_pipeline(spec, in);
          const auto t1 = Clock::now();
          elapsed[i] = std::chrono::duration<double>(t1 - t0).count();
          preds[i] = std::move(out.syllables);
        }

        std::vector<std::optional<FileEval>> chunk_evals(n);
        EvalOptions opt;
        opt.tolerance_s = cfg.tolerance_s;
        opt.granularities = corpus.granularities;
        parallel_for(n, [&](std::size_t i) {
          if (!preds[i]) return;
          FileEval fe = evaluate_file(*refs[i], *preds[i], opt);
          fe.id = corpus.items[base + i].stem;
          fe.corpus = corpus.name;
          fe.elapsed_s = elapsed[i];
          chunk_evals[i] = std::move(fe);
        });
        for (std::size_t i = 0; i < n; ++i) {
          if (!ingest_errors[i].empty())
            result.warnings.push_back(corpus.name + ": skipped " + ingest_errors[i]);
          else
            evals.push_back(std::move(*chunk_evals[i]));
        }
      }
    }
    result.report = aggregate(std::move(evals), cfg.tolerance_s);
  } catch (const std::exception& e) {
    result.status = std::string("failed: ") + e.what();
    result.report.reset();
  }
  return result;
}

inline BatchResult run_batch(const BatchConfig& cfg) {
  BatchResult out;
  for (const PipelineSpec& spec : cfg.specs) {
    SpecResult r = run_spec(spec, cfg);
    SummaryRow row;
    row.features = spec.features_label();
    row.envelope = spec.cue_label();
    row.segmentation = std::string(to_string(spec.segmenter));
    row.status = r.status;
    if (r.report) row.scores = r.report->pooled;
    out.warning_count += r.warnings.size();
    out.rows.push_back(std::move(row));
    out.specs.push_back(std::move(r));
  }
  return out;
}

// Writes summary.csv, summary.json and one <tag>.json report per spec.
inline void write_batch_outputs(const BatchResult& r, const fs::path& dir) {
  fs::create_directories(dir);
  write_text(dir / "summary.csv", summary_csv(r.rows));
  nlohmann::json summary = nlohmann::json::array();
  for (const SpecResult& s : r.specs) {
    nlohmann::json e;
    e["tag"] = s.spec.tag;
    e["features"] = s.spec.features_label();
    e["envelope"] = s.spec.cue_label();
    e["segmentation"] = std::string(to_string(s.spec.segmenter));
    e["status"] = s.status;
    e["warnings"] = s.warnings;
    if (s.report) {
      e["report"] = to_json(*s.report);
      write_text(dir / (s.spec.tag + ".json"), e.dump(2) + "\n");
    }
    summary.push_back(e);
  }
  write_text(dir / "summary.json", summary.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Synthetic corpus

struct SynthParams {
  std::size_t files = 20;
  double duration_s = 5.0;
  double carrier_hz = 300.0;
  double rate_hz = 4.0;       // gates per second
  double gate_s = 0.16;       // raised-cosine gate length
  double noise_level = 1e-3;  // uniform noise half-range
  std::uint32_t seed = 20261016;
};

struct SynthFile {
  std::string stem;
  std::vector<Interval> gates;
};

// Amplitude-gated carrier: one raised-cosine gate per 1/rate_hz seconds,
// random start offset and per-gate amplitude, written as 16 kHz PCM16 WAV
// plus a TextGrid whose "syllables" tier holds the gate intervals.
inline std::vector<SynthFile> synthesize_corpus(const fs::path& dir, const SynthParams& p = {}) {
  fs::create_directories(dir);
  std::vector<SynthFile> out;
  const auto n = static_cast<std::size_t>(std::llround(p.duration_s * kSampleRate));
  for (std::size_t f = 0; f < p.files; ++f) {
    std::mt19937 rng(p.seed + static_cast<std::uint32_t>(f));
    auto uniform = [&](double lo, double hi) {
      return lo + (hi - lo) * (static_cast<double>(rng()) / 4294967296.0);
    };
    SynthFile sf;
    sf.stem = fmt::format("synth_{:03d}", f);
    const double offset = uniform(0.02, 0.08);
    const double period = 1.0 / p.rate_hz;
    for (std::size_t k = 0;; ++k) {
      const double on = offset + static_cast<double>(k) * period;
      const double off = on + p.gate_s;
      if (off > p.duration_s - 0.01) break;
      sf.gates.push_back({on, off, "syl"});
    }
    std::vector<double> x(n, 0.0);
    const double phase = uniform(0.0, 2.0 * std::numbers::pi);
    for (const Interval& g : sf.gates) {
      const double amp = uniform(0.6, 1.0);
      const auto a = static_cast<std::size_t>(std::ceil(g.onset_s * kSampleRate));
      const auto b = std::min(n, static_cast<std::size_t>(std::floor(g.offset_s * kSampleRate)));
      for (std::size_t i = a; i < b; ++i) {
        const double t = static_cast<double>(i) / kSampleRate;
        const double w = std::sin(std::numbers::pi * (t - g.onset_s) / p.gate_s);
        x[i] += amp * w * w * std::sin(2.0 * std::numbers::pi * p.carrier_hz * t + phase);
      }
    }
    for (double& v : x) v = 0.9 * v + uniform(-p.noise_level, p.noise_level);
    WavData wav;
    wav.channels = 1;
    wav.sample_rate = static_cast<int>(kSampleRate);
    wav.interleaved = std::move(x);
    write_wav(dir / (sf.stem + ".wav"), wav);
    AnnotationTier tier{"syllables", sf.gates, p.duration_s};
    write_textgrid(dir / (sf.stem + ".TextGrid"), {tier});
    out.push_back(std::move(sf));
  }
  return out;
}

}  // namespace sylkit
