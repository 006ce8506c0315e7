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

// sylkit command-line driver.
//
// Exit status: 0 success, 1 runtime failure, 2 usage or configuration error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "CLI11.hpp"
#include "sylkit/sylkit.hpp"

namespace fs = std::filesystem;
using namespace sylkit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kIncompatibleSpec:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kTimeBaseMismatch:
      return kExitUsage;
    default:
      return kExitRuntime;
  }
}

std::map<std::string, double> parse_params(const std::vector<std::string>& kv) {
  std::map<std::string, double> out;
  for (const auto& item : kv) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--param expects key=value, got '" + item + "'");
    const std::string value = item.substr(eq + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size() || value.empty())
      throw UsageError("--param value is not a number: '" + item + "'");
    out[item.substr(0, eq)] = v;
  }
  return out;
}

// ---------------------------------------------------------------------------

struct SegmentArgs {
  std::string wav, features, envelope, cue, features_from, segmenter = "peakdetect", tag, out;
  std::vector<std::string> params;
};

int run_segment(const SegmentArgs& a) {
  if (!a.envelope.empty() && !a.cue.empty()) throw UsageError("use either --envelope or --cue, not both");
  if (!a.features.empty() && !a.features_from.empty())
    throw UsageError("use either --features or --features-from, not both");
  PipelineSpec spec;
  spec.tag = a.tag;
  spec.segmenter = segmenter_from_string(a.segmenter);
  spec.params = parse_params(a.params);
  if (!a.features.empty()) {
    spec.features = FeatureSource::kFile;
    spec.features_name = fs::path(a.features).stem().string();
  } else if (!a.features_from.empty()) {
    spec.features = feature_source_from_string(a.features_from);
    if (spec.features == FeatureSource::kFile || spec.features == FeatureSource::kRaw)
      throw UsageError("--features-from takes mfcc or logmel");
  }
  const std::string cue = !a.envelope.empty() ? a.envelope : a.cue;
  if (!cue.empty()) {
    try {
      spec.cue = cue_kind_from_string(cue);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  validate(spec);
  if (a.wav.empty() && spec.features != FeatureSource::kFile)
    throw UsageError("--wav is required unless --features is given");

  std::optional<AudioBuffer> audio;
  std::optional<FeatureMatrix> feats;
  if (!a.wav.empty()) audio = load_audio(a.wav);
  if (!a.features.empty()) feats = read_feature_file(a.features);

  PipelineInput in;
  in.audio = audio ? &*audio : nullptr;
  in.features = feats ? &*feats : nullptr;
  in.name = !a.wav.empty() ? fs::path(a.wav).filename().string() : fs::path(a.features).filename().string();
  const auto t0 = std::chrono::steady_clock::now();
  PipelineOutput out = run_pipeline(spec, in);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const SyllableSet& set = out.syllables;
  if (a.out.empty()) std::fputs(syllables_to_json(set).c_str(), stdout);
  else write_syllables(a.out, set);
  const double dur = set.audio_duration_s;
  fmt::print(stderr, "{}: {} syllables, {:.3f} tok/s, rtfx {:.1f}\n", in.name, set.size(),
             dur > 0 ? static_cast<double>(set.size()) / dur : 0.0,
             elapsed > 0 ? dur / elapsed : 0.0);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string pred_dir, ref_dir, tier = "syllables", report, corpus = "corpus";
  double tolerance = kDefaultTolerance;
  std::vector<std::string> granularities;
};

std::string pred_stem(const fs::path& p) {
  std::string name = p.filename().string();
  for (const std::string suffix : {".syl.json", ".json"})
    if (name.size() > suffix.size() && name.ends_with(suffix))
      return name.substr(0, name.size() - suffix.size());
  return name;
}

int run_eval(const EvalArgs& a) {
  if (!fs::is_directory(a.pred_dir)) throw UsageError("--pred-dir is not a directory: " + a.pred_dir);
  if (!fs::is_directory(a.ref_dir)) throw UsageError("--ref-dir is not a directory: " + a.ref_dir);
  EvalOptions opt;
  opt.tolerance_s = a.tolerance;
  if (!(a.tolerance > 0)) throw UsageError("--tolerance must be positive");
  if (!a.granularities.empty()) {
    std::vector<std::string> names;
    for (const auto& g : a.granularities) {
      std::size_t start = 0;
      while (start <= g.size()) {
        const auto comma = g.find(',', start);
        const auto piece = g.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!piece.empty()) names.push_back(piece);
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
    }
    try {
      opt.granularities = parse_granularities(names);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }

  std::map<std::string, fs::path> preds, refs;
  for (const auto& e : fs::directory_iterator(a.pred_dir))
    if (e.is_regular_file() && lower_ext(e.path()) == ".json") preds[pred_stem(e.path())] = e.path();
  for (const auto& e : fs::directory_iterator(a.ref_dir))
    if (e.is_regular_file() && lower_ext(e.path()) == ".textgrid") refs[e.path().stem().string()] = e.path();

  std::size_t warnings = 0;
  std::vector<FileEval> evals;
  std::string method;
  for (const auto& [stem, ref_path] : refs) {
    AnnotationTier ref;
    try {
      ref = parse_textgrid(ref_path, a.tier);
    } catch (const Error& e) {
      fmt::print(stderr, "warning: {}: {}\n", ref_path.string(), e.what());
      ++warnings;
      continue;
    }
    SyllableSet pred;
    const auto it = preds.find(stem);
    if (it == preds.end()) {
      fmt::print(stderr, "warning: no prediction for {}; scored as all deletions\n", stem);
      ++warnings;
      pred.audio_duration_s = ref.file_duration_s;
    } else {
      pred = read_syllables(it->second);
      if (method.empty()) method = pred.method_tag;
    }
    FileEval fe = evaluate_file(ref, pred, opt);
    fe.id = stem;
    fe.corpus = a.corpus;
    evals.push_back(std::move(fe));
  }
  for (const auto& [stem, path] : preds)
    if (refs.count(stem) == 0) {
      fmt::print(stderr, "warning: no reference for {}; skipped\n", path.string());
      ++warnings;
    }
  if (evals.empty()) {
    fmt::print(stderr, "error: no reference files to score\n");
    return kExitRuntime;
  }

  const EvalReport report = aggregate(std::move(evals), a.tolerance);
  nlohmann::json j = to_json(report);
  j["warnings"] = warnings;
  for (std::size_t g = 0; g < 3; ++g)
    if (report.pooled.scores[g])
      fmt::print(stderr, "{}: P={:.4f} R={:.4f} F1={:.4f}\n", to_string(static_cast<Granularity>(g)),
                 report.pooled.scores[g]->precision, report.pooled.scores[g]->recall,
                 report.pooled.scores[g]->f1);
  fmt::print(stderr, "{} files, {} warnings\n", report.pooled.files, warnings);
  if (a.report.empty()) {
    std::fputs((j.dump(2) + "\n").c_str(), stdout);
  } else {
    fs::path base(a.report);
    if (lower_ext(base) == ".json" || lower_ext(base) == ".csv") base.replace_extension();
    write_text(fs::path(base.string() + ".json"), j.dump(2) + "\n");
    SummaryRow row{"-", "-", method.empty() ? "-" : method, report.pooled, "ok"};
    write_text(fs::path(base.string() + ".csv"), summary_csv({row}));
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct EmbedArgs {
  std::string features, segments, pool = "mean", out;
};

int run_embed(const EmbedArgs& a) {
  PoolMode mode;
  try {
    mode = pool_mode_from_string(a.pool);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const FeatureMatrix f = read_feature_file(a.features);
  const SyllableSet set = read_syllables(a.segments);
  const auto emb = pool(f, set, mode);
  write_embeddings(a.out, emb, mode, f.dims, f.frame_period_s);
  fmt::print(stderr, "{} embeddings of dimension {}\n", emb.size(), embedding_dims(mode, f.dims));
  return kExitOk;
}

// ---------------------------------------------------------------------------

int run_batch_cmd(const std::string& config_path, const std::string& out_override) {
  std::string text;
  try {
    text = read_text(config_path);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  BatchConfig cfg = parse_batch_config(text, fs::absolute(config_path).parent_path());
  if (!out_override.empty()) cfg.output_dir = out_override;
  const BatchResult r = run_batch(cfg);
  write_batch_outputs(r, cfg.output_dir);
  std::size_t failed = 0;
  for (const auto& s : r.specs) {
    for (const auto& w : s.warnings) fmt::print(stderr, "warning: [{}] {}\n", s.spec.tag, w);
    if (s.status != "ok") {
      ++failed;
      fmt::print(stderr, "[{}] {}\n", s.spec.tag, s.status);
    } else if (s.report && s.report->pooled.scores[0]) {
      fmt::print(stderr, "[{}] nuclei F1={:.4f} tok/s={:.3f}\n", s.spec.tag,
                 s.report->pooled.scores[0]->f1, s.report->pooled.tok_per_s);
    }
  }
  fmt::print(stderr, "{} specs, {} failed, {} warnings; results in {}\n", r.specs.size(), failed,
             r.warning_count, cfg.output_dir.string());
  return failed == 0 ? kExitOk : kExitRuntime;
}

int run_validate(const std::vector<std::string>& paths) {
  int rc = kExitOk;
  for (const auto& p : paths) {
    const auto problems = validate_feature_file(p);
    if (problems.empty()) {
      fmt::print("{}: ok\n", p);
    } else {
      rc = kExitRuntime;
      for (const auto& msg : problems) fmt::print("{}: {}\n", p, msg);
    }
  }
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sylkit: syllable segmentation and evaluation"};
  app.require_subcommand(1);

  SegmentArgs seg;
  auto* c_seg = app.add_subcommand("segment", "segment one file into syllables");
  c_seg->add_option("--wav", seg.wav, "input audio");
  c_seg->add_option("--features", seg.features, "FSF1 feature file")->check(CLI::ExistingFile);
  c_seg->add_option("--envelope", seg.envelope, "rms|lowpass|hilbert|sbs|theta");
  c_seg->add_option("--cue", seg.cue, "cossim|ssm_rowmean|cls_attn|norm");
  c_seg->add_option("--features-from", seg.features_from, "mfcc|logmel computed from --wav");
  c_seg->add_option("--segmenter", seg.segmenter, "peakdetect|cosine_threshold|mincut|cls_threshold");
  c_seg->add_option("--param", seg.params, "key=value (repeatable)");
  c_seg->add_option("--tag", seg.tag, "method tag");
  c_seg->add_option("--out", seg.out, "output JSON (stdout if omitted)");

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "score predictions against TextGrid references");
  c_eval->add_option("--pred-dir", ev.pred_dir)->required();
  c_eval->add_option("--ref-dir", ev.ref_dir)->required();
  c_eval->add_option("--tier", ev.tier);
  c_eval->add_option("--tolerance", ev.tolerance, "seconds");
  c_eval->add_option("--granularity", ev.granularities, "nuclei,boundaries,spans");
  c_eval->add_option("--corpus", ev.corpus);
  c_eval->add_option("--report", ev.report, "writes <report>.json and <report>.csv");

  EmbedArgs em;
  auto* c_embed = app.add_subcommand("embed", "pool frame features into syllable embeddings");
  c_embed->add_option("--features", em.features)->required()->check(CLI::ExistingFile);
  c_embed->add_option("--segments", em.segments)->required()->check(CLI::ExistingFile);
  c_embed->add_option("--pool", em.pool, "mean|max|median|onc");
  c_embed->add_option("--out", em.out)->required();

  std::string config, batch_out;
  auto* c_batch = app.add_subcommand("batch", "run a JSON benchmark configuration");
  c_batch->add_option("config", config)->required();
  c_batch->add_option("--out", batch_out, "override output_dir");

  SynthParams sp;
  std::string synth_out;
  auto* c_synth = app.add_subcommand("synth", "write the synthetic gated-tone corpus");
  c_synth->add_option("--out", synth_out)->required();
  c_synth->add_option("--files", sp.files);
  c_synth->add_option("--duration", sp.duration_s);
  c_synth->add_option("--seed", sp.seed);

  std::vector<std::string> fsf_paths;
  auto* c_val = app.add_subcommand("validate", "check FSF1 feature files");
  c_val->add_option("files", fsf_paths)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*c_seg) return run_segment(seg);
    if (*c_eval) return run_eval(ev);
    if (*c_embed) return run_embed(em);
    if (*c_batch) return run_batch_cmd(config, batch_out);
    if (*c_synth) {
      const auto files = synthesize_corpus(synth_out, sp);
      fmt::print(stderr, "wrote {} files to {}\n", files.size(), synth_out);
      return kExitOk;
    }
    if (*c_val) return run_validate(fsf_paths);
  } catch (const UsageError& e) {
    fmt::print(stderr, "usage error: {}\n", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    fmt::print(stderr, "error [{}]: {}\n", to_string(e.code()), e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
