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

// Value types shared by every stage: audio, frame matrices, 1-D cue series
// and syllable intervals.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sylkit/error.hpp"

namespace sylkit {

inline constexpr double kSampleRate = 16000.0;

struct AudioBuffer {
  std::vector<double> samples;
  double sample_rate = kSampleRate;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// T x D frame representation, row-major. Frame t is centred at
// start_time_s + t * frame_period_s and covers half a period either side.
struct FeatureMatrix {
  std::vector<float> data;
  std::size_t frames = 0;
  std::size_t dims = 0;
  double frame_period_s = 0.0;
  double start_time_s = 0.0;
  std::string source_tag;

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t t, std::size_t d, double period, double start,
                std::string tag = {})
      : data(t * d, 0.0f), frames(t), dims(d), frame_period_s(period),
        start_time_s(start), source_tag(std::move(tag)) {}

  std::span<float> row(std::size_t t) { return {data.data() + t * dims, dims}; }
  std::span<const float> row(std::size_t t) const {
    return {data.data() + t * dims, dims};
  }
  float& at(std::size_t t, std::size_t d) { return data[t * dims + d]; }
  float at(std::size_t t, std::size_t d) const { return data[t * dims + d]; }

  double time_of(std::size_t t) const {
    return start_time_s + static_cast<double>(t) * frame_period_s;
  }
  // End of the last frame's coverage.
  double span_end_s() const {
    return start_time_s + (static_cast<double>(frames) - 0.5) * frame_period_s;
  }
};

enum class CueKind {
  kRms,
  kLowpass,
  kHilbert,
  kSbs,
  kTheta,
  kCosSim,
  kSsmRowMean,
  kClsAttn,
  kNorm,
};

inline std::string_view to_string(CueKind kind) {
  switch (kind) {
    case CueKind::kRms: return "rms";
    case CueKind::kLowpass: return "lowpass";
    case CueKind::kHilbert: return "hilbert";
    case CueKind::kSbs: return "sbs";
    case CueKind::kTheta: return "theta";
    case CueKind::kCosSim: return "cossim";
    case CueKind::kSsmRowMean: return "ssm_rowmean";
    case CueKind::kClsAttn: return "cls_attn";
    case CueKind::kNorm: return "norm";
  }
  return "unknown";
}

inline CueKind cue_kind_from_string(std::string_view name) {
  for (CueKind k : {CueKind::kRms, CueKind::kLowpass, CueKind::kHilbert,
                    CueKind::kSbs, CueKind::kTheta, CueKind::kCosSim,
                    CueKind::kSsmRowMean, CueKind::kClsAttn, CueKind::kNorm}) {
    if (to_string(k) == name) return k;
  }
  fail(ErrorCode::kInvalidArgument, "unknown cue kind: " + std::string(name));
}

inline bool is_envelope_kind(CueKind kind) {
  return kind == CueKind::kRms || kind == CueKind::kLowpass ||
         kind == CueKind::kHilbert || kind == CueKind::kSbs ||
         kind == CueKind::kTheta;
}

// Uniformly sampled 1-D cue. Envelopes are nonnegative; feature-derived
// traces may take any real value.
struct Series {
  std::vector<float> values;
  double frame_period_s = 0.010;
  double start_time_s = 0.0;
  CueKind kind = CueKind::kRms;

  std::size_t size() const { return values.size(); }
  double time_of(std::size_t t) const {
    return start_time_s + static_cast<double>(t) * frame_period_s;
  }
};

using Envelope = Series;
using Trace = Series;

struct Syllable {
  double onset_s = 0.0;
  double nucleus_s = 0.0;
  double offset_s = 0.0;
};

struct SyllableSet {
  std::vector<Syllable> syllables;
  double audio_duration_s = 0.0;
  std::string method_tag;
  std::string audio;  // source file name, informational

  std::size_t size() const { return syllables.size(); }
  bool empty() const { return syllables.empty(); }
};

// Checks the ordering/containment invariants; returns an empty string when
// they hold, otherwise a description of the first violation.
inline std::string validate(const SyllableSet& set) {
  constexpr double kSlack = 1e-9;
  for (std::size_t k = 0; k < set.syllables.size(); ++k) {
    const Syllable& s = set.syllables[k];
    if (!(s.onset_s <= s.nucleus_s && s.nucleus_s <= s.offset_s))
      return "syllable " + std::to_string(k) + ": nucleus outside interval";
    if (!(s.onset_s < s.offset_s))
      return "syllable " + std::to_string(k) + ": empty interval";
    if (s.onset_s < -kSlack || s.offset_s > set.audio_duration_s + kSlack)
      return "syllable " + std::to_string(k) + ": outside audio";
    if (k + 1 < set.syllables.size() &&
        s.offset_s > set.syllables[k + 1].onset_s + kSlack)
      return "syllable " + std::to_string(k) + ": overlaps successor";
  }
  return {};
}

}  // namespace sylkit
