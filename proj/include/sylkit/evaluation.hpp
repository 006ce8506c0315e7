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

// Scoring predicted syllables against reference annotations at three
// granularities (nuclei, boundaries, spans) and pooling across files.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "sylkit/error.hpp"
#include "sylkit/segmentation.hpp"
#include "sylkit/textgrid.hpp"
#include "sylkit/types.hpp"

namespace sylkit {

inline constexpr double kDefaultTolerance = 0.05;
// Absorbs representation error so |dt| == tol counts as a match.
inline constexpr double kToleranceSlack = 1e-9;

struct MatchCounts {
  std::size_t tp = 0;
  std::size_t insertions = 0;
  std::size_t deletions = 0;
  std::size_t substitutions = 0;

  std::size_t predictions() const { return tp + insertions + substitutions; }
  std::size_t references() const { return tp + deletions + substitutions; }

  MatchCounts& operator+=(const MatchCounts& o) {
    tp += o.tp;
    insertions += o.insertions;
    deletions += o.deletions;
    substitutions += o.substitutions;
    return *this;
  }
  friend bool operator==(const MatchCounts&, const MatchCounts&) = default;
};

struct GranularityScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

inline GranularityScore score(const MatchCounts& c) {
  GranularityScore s;
  const auto p_den = static_cast<double>(c.predictions());
  const auto r_den = static_cast<double>(c.references());
  s.precision = p_den > 0 ? static_cast<double>(c.tp) / p_den : 0.0;
  s.recall = r_den > 0 ? static_cast<double>(c.tp) / r_den : 0.0;
  s.f1 = s.precision + s.recall > 0
             ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
             : 0.0;
  return s;
}

inline bool within(double a, double b, double tol) {
  return std::abs(a - b) <= tol + kToleranceSlack;
}

// Maximum one-to-one matching of sorted event times under |r - p| <= tol.
// On sorted input the two-pointer sweep is optimal: matching the two heads
// when compatible never loses a match, and an incompatible smaller head
// cannot match anything later.
inline MatchCounts match_events(std::span<const double> ref, std::span<const double> pred,
                                double tol = kDefaultTolerance) {
  MatchCounts c;
  std::size_t i = 0, j = 0;
  while (i < ref.size() && j < pred.size()) {
    if (within(ref[i], pred[j], tol)) {
      ++c.tp;
      ++i;
      ++j;
    } else if (ref[i] < pred[j]) {
      ++c.deletions;
      ++i;
    } else {
      ++c.insertions;
      ++j;
    }
  }
  c.deletions += ref.size() - i;
  c.insertions += pred.size() - j;
  return c;
}

struct Span {
  double onset_s = 0.0;
  double offset_s = 0.0;
};

inline std::vector<Span> spans_of(const SyllableSet& set) {
  std::vector<Span> out;
  for (const Syllable& s : set.syllables) out.push_back({s.onset_s, s.offset_s});
  return out;
}

inline std::vector<Span> spans_of(const AnnotationTier& tier) {
  std::vector<Span> out;
  for (const Interval& v : tier.intervals) out.push_back({v.onset_s, v.offset_s});
  return out;
}

// Sorted union of onsets and offsets; events closer than 1 ms collapse to
// their mean.
inline std::vector<double> boundary_events(std::span<const Span> spans) {
  std::vector<double> t;
  for (const Span& s : spans) {
    t.push_back(s.onset_s);
    t.push_back(s.offset_s);
  }
  std::sort(t.begin(), t.end());
  std::vector<double> out;
  std::size_t k = 0;
  while (k < t.size()) {
    std::size_t e = k + 1;
    double sum = t[k];
    while (e < t.size() && t[e] - t[e - 1] < kBoundaryMergeEps) sum += t[e++];
    out.push_back(sum / static_cast<double>(e - k));
    k = e;
  }
  return out;
}

inline std::vector<double> boundary_events(const SyllableSet& set) {
  const auto s = spans_of(set);
  return boundary_events(s);
}

// Spans match when both onset and offset agree within tol (maximum
// one-to-one matching by a sweep over onset-sorted, non-overlapping lists).
// Leftover pairs overlapping by at least half of the shorter span are
// paired greedily by decreasing overlap as substitutions.
inline MatchCounts match_spans(std::span<const Span> ref, std::span<const Span> pred,
                               double tol = kDefaultTolerance) {
  MatchCounts c;
  std::vector<bool> ref_used(ref.size(), false), pred_used(pred.size(), false);
  std::size_t i = 0, j = 0;
  while (i < ref.size() && j < pred.size()) {
    const Span& r = ref[i];
    const Span& p = pred[j];
    const bool on_ok = within(r.onset_s, p.onset_s, tol);
    const bool off_ok = within(r.offset_s, p.offset_s, tol);
    if (on_ok && off_ok) {
      ++c.tp;
      ref_used[i++] = true;
      pred_used[j++] = true;
    } else if (!on_ok) {
      if (r.onset_s < p.onset_s) ++i;
      else ++j;
    } else {
      if (r.offset_s < p.offset_s) ++i;
      else ++j;
    }
  }

  struct Candidate {
    double overlap;
    std::size_t r, p;
  };
  std::vector<Candidate> cands;
  for (std::size_t a = 0; a < ref.size(); ++a) {
    if (ref_used[a]) continue;
    for (std::size_t b = 0; b < pred.size(); ++b) {
      if (pred_used[b]) continue;
      const double ov = std::min(ref[a].offset_s, pred[b].offset_s) -
                        std::max(ref[a].onset_s, pred[b].onset_s);
      const double shorter = std::min(ref[a].offset_s - ref[a].onset_s,
                                      pred[b].offset_s - pred[b].onset_s);
      if (ov > 0.0 && ov >= 0.5 * shorter) cands.push_back({ov, a, b});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
    return std::tie(y.overlap, x.r, x.p) < std::tie(x.overlap, y.r, y.p);
  });
  for (const Candidate& k : cands) {
    if (ref_used[k.r] || pred_used[k.p]) continue;
    ref_used[k.r] = pred_used[k.p] = true;
    ++c.substitutions;
  }
  for (bool u : ref_used) c.deletions += u ? 0 : 1;
  for (bool u : pred_used) c.insertions += u ? 0 : 1;
  return c;
}

enum class Granularity { kNuclei, kBoundaries, kSpans };

inline std::string_view to_string(Granularity g) {
  switch (g) {
    case Granularity::kNuclei: return "nuclei";
    case Granularity::kBoundaries: return "boundaries";
    case Granularity::kSpans: return "spans";
  }
  return "unknown";
}

inline Granularity granularity_from_string(std::string_view s) {
  for (Granularity g : {Granularity::kNuclei, Granularity::kBoundaries, Granularity::kSpans})
    if (to_string(g) == s) return g;
  fail(ErrorCode::kInvalidArgument, "unknown granularity: " + std::string(s));
}

struct GranularitySet {
  bool nuclei = true;
  bool boundaries = true;
  bool spans = true;

  bool has(Granularity g) const {
    return g == Granularity::kNuclei ? nuclei : g == Granularity::kBoundaries ? boundaries : spans;
  }
  static GranularitySet nuclei_only() { return {true, false, false}; }
};

struct FileEval {
  std::string id;
  std::string corpus;
  std::optional<MatchCounts> nuclei;
  std::optional<MatchCounts> boundaries;
  std::optional<MatchCounts> spans;
  double audio_duration_s = 0.0;
  std::size_t predicted_nuclei = 0;
  double elapsed_s = 0.0;

  std::optional<MatchCounts>& at(Granularity g) {
    return g == Granularity::kNuclei ? nuclei : g == Granularity::kBoundaries ? boundaries : spans;
  }
  const std::optional<MatchCounts>& at(Granularity g) const {
    return g == Granularity::kNuclei ? nuclei : g == Granularity::kBoundaries ? boundaries : spans;
  }
};

struct EvalOptions {
  double tolerance_s = kDefaultTolerance;
  GranularitySet granularities;
};

// Reference nuclei are interval midpoints, or the cue argmax inside each
// reference interval when a cue is supplied.
inline FileEval evaluate_file(const AnnotationTier& ref, const SyllableSet& pred,
                              const EvalOptions& opt = {}, const Series* ref_cue = nullptr) {
  FileEval out;
  out.audio_duration_s = pred.audio_duration_s > 0 ? pred.audio_duration_s : ref.file_duration_s;
  out.predicted_nuclei = pred.size();
  const auto ref_spans = spans_of(ref);
  const auto pred_spans = spans_of(pred);
  if (opt.granularities.nuclei) {
    std::vector<double> r, p;
    for (const Interval& v : ref.intervals)
      r.push_back(ref_cue ? derive_nucleus(v.onset_s, v.offset_s, *ref_cue)
                          : 0.5 * (v.onset_s + v.offset_s));
    for (const Syllable& s : pred.syllables) p.push_back(s.nucleus_s);
    std::sort(r.begin(), r.end());
    std::sort(p.begin(), p.end());
    out.nuclei = match_events(r, p, opt.tolerance_s);
  }
  if (opt.granularities.boundaries)
    out.boundaries = match_events(boundary_events(ref_spans), boundary_events(pred_spans),
                                  opt.tolerance_s);
  if (opt.granularities.spans) out.spans = match_spans(ref_spans, pred_spans, opt.tolerance_s);
  return out;
}

inline double measure_throughput(double total_audio_s, double elapsed_s) {
  if (!(elapsed_s > 0.0)) fail(ErrorCode::kInvalidArgument, "elapsed time must be > 0");
  return total_audio_s / elapsed_s;
}

struct PooledScores {
  std::optional<MatchCounts> counts[3];
  std::optional<GranularityScore> scores[3];
  std::size_t files = 0;
  double audio_s = 0.0;
  double elapsed_s = 0.0;
  std::size_t predicted_nuclei = 0;
  double tok_per_s = 0.0;
  std::optional<double> rtfx;
};

struct EvalReport {
  std::vector<FileEval> files;                // sorted by (corpus, id)
  PooledScores pooled;                        // micro-average over all files
  std::map<std::string, PooledScores> corpora;
  std::optional<GranularityScore> macro[3];  // mean of per-corpus scores
  double tolerance_s = kDefaultTolerance;
};

namespace evaluation_detail {

inline double sorted_sum(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

inline PooledScores pool_files(const std::vector<const FileEval*>& files) {
  PooledScores p;
  p.files = files.size();
  std::vector<double> audio, elapsed;
  for (const FileEval* f : files) {
    audio.push_back(f->audio_duration_s);
    elapsed.push_back(f->elapsed_s);
    p.predicted_nuclei += f->predicted_nuclei;
    for (int g = 0; g < 3; ++g) {
      const auto& c = f->at(static_cast<Granularity>(g));
      if (!c) continue;
      if (!p.counts[g]) p.counts[g] = MatchCounts{};
      *p.counts[g] += *c;
    }
  }
  p.audio_s = sorted_sum(audio);
  p.elapsed_s = sorted_sum(elapsed);
  for (int g = 0; g < 3; ++g)
    if (p.counts[g]) p.scores[g] = score(*p.counts[g]);
  p.tok_per_s = p.audio_s > 0 ? static_cast<double>(p.predicted_nuclei) / p.audio_s : 0.0;
  if (p.elapsed_s > 0) p.rtfx = measure_throughput(p.audio_s, p.elapsed_s);
  return p;
}

}  // namespace evaluation_detail

// Micro-aggregation: raw counts are pooled first, then P/R/F1 computed.
// The result does not depend on the order of `files`.
inline EvalReport aggregate(std::vector<FileEval> files, double tolerance_s = kDefaultTolerance) {
  EvalReport r;
  r.tolerance_s = tolerance_s;
  std::sort(files.begin(), files.end(), [](const FileEval& a, const FileEval& b) {
    return std::tie(a.corpus, a.id, a.audio_duration_s, a.predicted_nuclei, a.elapsed_s) <
           std::tie(b.corpus, b.id, b.audio_duration_s, b.predicted_nuclei, b.elapsed_s);
  });
  r.files = std::move(files);
  std::vector<const FileEval*> all;
  std::map<std::string, std::vector<const FileEval*>> by_corpus;
  for (const FileEval& f : r.files) {
    all.push_back(&f);
    by_corpus[f.corpus].push_back(&f);
  }
  r.pooled = evaluation_detail::pool_files(all);
  for (const auto& [name, members] : by_corpus)
    r.corpora[name] = evaluation_detail::pool_files(members);
  for (int g = 0; g < 3; ++g) {
    GranularityScore m;
    std::size_t n = 0;
    for (const auto& [name, c] : r.corpora) {
      if (!c.scores[g]) continue;
      m.precision += c.scores[g]->precision;
      m.recall += c.scores[g]->recall;
      m.f1 += c.scores[g]->f1;
      ++n;
    }
    if (n == 0) continue;
    m.precision /= static_cast<double>(n);
    m.recall /= static_cast<double>(n);
    m.f1 /= static_cast<double>(n);
    r.macro[g] = m;
  }
  return r;
}

}  // namespace sylkit
