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

// Syllable-level pooling of frame features.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "sylkit/error.hpp"
#include "sylkit/types.hpp"

namespace sylkit {

enum class PoolMode { kMean, kMax, kMedian, kOnsetNucleusCoda };

inline std::string_view to_string(PoolMode m) {
  switch (m) {
    case PoolMode::kMean: return "mean";
    case PoolMode::kMax: return "max";
    case PoolMode::kMedian: return "median";
    case PoolMode::kOnsetNucleusCoda: return "onc";
  }
  return "unknown";
}

inline PoolMode pool_mode_from_string(std::string_view s) {
  for (PoolMode m : {PoolMode::kMean, PoolMode::kMax, PoolMode::kMedian,
                     PoolMode::kOnsetNucleusCoda})
    if (to_string(m) == s) return m;
  fail(ErrorCode::kInvalidArgument, "unknown pool mode: " + std::string(s));
}

struct SyllableEmbedding {
  std::vector<double> vector;
  Syllable syllable;
  PoolMode mode = PoolMode::kMean;
};

// Frames whose centres fall in [onset, offset); the single frame nearest
// the interval midpoint when none do.
inline std::vector<std::size_t> select_frames(const FeatureMatrix& f, const Syllable& s) {
  std::vector<std::size_t> idx;
  for (std::size_t t = 0; t < f.frames; ++t) {
    const double c = f.time_of(t);
    if (c >= s.onset_s && c < s.offset_s) idx.push_back(t);
  }
  if (idx.empty() && f.frames > 0) {
    const double mid = 0.5 * (s.onset_s + s.offset_s);
    const double rel = std::round((mid - f.start_time_s) / f.frame_period_s);
    idx.push_back(static_cast<std::size_t>(
        std::clamp(rel, 0.0, static_cast<double>(f.frames - 1))));
  }
  return idx;
}

namespace embedding_detail {

inline std::vector<double> mean_of(const FeatureMatrix& f, const std::vector<std::size_t>& idx,
                                   std::size_t a, std::size_t b) {
  std::vector<double> out(f.dims, 0.0);
  if (a >= b) return out;
  for (std::size_t k = a; k < b; ++k)
    for (std::size_t d = 0; d < f.dims; ++d) out[d] += f.at(idx[k], d);
  for (double& v : out) v /= static_cast<double>(b - a);
  return out;
}

}  // namespace embedding_detail

// One embedding per syllable. onc mode splits the selected frames at the
// frame nearest the nucleus into onset | nucleus | coda parts, mean-pools
// each (an empty part pools to zeros) and concatenates them (3 * D values).
inline std::vector<SyllableEmbedding> pool(const FeatureMatrix& f, const SyllableSet& set,
                                           PoolMode mode) {
  std::vector<SyllableEmbedding> out;
  if (set.empty()) return out;
  if (f.frames == 0 || f.dims == 0 || !(f.frame_period_s > 0.0))
    fail(ErrorCode::kTimeBaseMismatch, "feature matrix has no usable time base");
  const double lo = f.start_time_s - 1.5 * f.frame_period_s;
  const double hi = f.span_end_s() + f.frame_period_s;
  out.reserve(set.size());
  for (const Syllable& s : set.syllables) {
    if (s.onset_s < lo || s.offset_s > hi)
      fail(ErrorCode::kTimeBaseMismatch,
           "syllable outside the feature time span (" + std::to_string(s.onset_s) + ", " +
               std::to_string(s.offset_s) + ")");
    const auto idx = select_frames(f, s);
    SyllableEmbedding e{{}, s, mode};
    switch (mode) {
      case PoolMode::kMean:
        e.vector = embedding_detail::mean_of(f, idx, 0, idx.size());
        break;
      case PoolMode::kMax:
      case PoolMode::kMedian: {
        e.vector.resize(f.dims);
        std::vector<double> col(idx.size());
        for (std::size_t d = 0; d < f.dims; ++d) {
          for (std::size_t k = 0; k < idx.size(); ++k) col[k] = f.at(idx[k], d);
          if (mode == PoolMode::kMax) {
            e.vector[d] = *std::max_element(col.begin(), col.end());
          } else {
            std::sort(col.begin(), col.end());
            const std::size_t m = col.size() / 2;
            e.vector[d] = col.size() % 2 == 1 ? col[m] : 0.5 * (col[m - 1] + col[m]);
          }
        }
        break;
      }
      case PoolMode::kOnsetNucleusCoda: {
        std::size_t n = 0;
        for (std::size_t k = 1; k < idx.size(); ++k)
          if (std::abs(f.time_of(idx[k]) - s.nucleus_s) <
              std::abs(f.time_of(idx[n]) - s.nucleus_s))
            n = k;
        const auto onset = embedding_detail::mean_of(f, idx, 0, n);
        const auto nucleus = embedding_detail::mean_of(f, idx, n, n + 1);
        const auto coda = embedding_detail::mean_of(f, idx, n + 1, idx.size());
        e.vector.reserve(3 * f.dims);
        e.vector.insert(e.vector.end(), onset.begin(), onset.end());
        e.vector.insert(e.vector.end(), nucleus.begin(), nucleus.end());
        e.vector.insert(e.vector.end(), coda.begin(), coda.end());
        break;
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

inline std::size_t embedding_dims(PoolMode mode, std::size_t dims) {
  return mode == PoolMode::kOnsetNucleusCoda ? 3 * dims : dims;
}

}  // namespace sylkit
