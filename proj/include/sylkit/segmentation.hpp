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

// Syllable segmenters: peak picking on 1-D cues, greedy cosine merging,
// windowed normalized-cut DP on self-similarity matrices, and quantile
// thresholding of attention-like traces.
//
// Time convention: frame t of a series or matrix is centred at
// start + t * period and covers [centre - period/2, centre + period/2).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sylkit/dsp.hpp"
#include "sylkit/error.hpp"
#include "sylkit/features.hpp"
#include "sylkit/types.hpp"

namespace sylkit {

struct PeakDetectParams {
  double delta = 0.0;
  std::size_t lookahead = 1;
};

struct Peaks {
  std::vector<std::size_t> maxima;
  std::vector<std::size_t> minima;
};

// Delta/lookahead peak detector. Starts seeking a maximum; a candidate
// extremum is confirmed once the series moves `delta` away from it within
// `lookahead` samples, and is discarded (tracking restarts at the current
// sample) if that does not happen. Confirmed maxima and minima alternate.
template <typename T>
Peaks peakdetect(std::span<const T> series, const PeakDetectParams& p) {
  if (series.size() < 2) fail(ErrorCode::kInvalidArgument, "peakdetect needs >= 2 samples");
  if (!(p.delta > 0.0)) fail(ErrorCode::kInvalidArgument, "peakdetect delta must be > 0");
  if (p.lookahead < 1) fail(ErrorCode::kInvalidArgument, "peakdetect lookahead must be >= 1");
  Peaks out;
  bool seek_max = true;
  double mx = series[0], mn = series[0];
  std::size_t mxpos = 0, mnpos = 0;
  for (std::size_t i = 1; i < series.size(); ++i) {
    const double v = series[i];
    if (seek_max) {
      if (v > mx) {
        mx = v;
        mxpos = i;
      } else if (mx - v >= p.delta && i - mxpos <= p.lookahead) {
        out.maxima.push_back(mxpos);
        seek_max = false;
        mn = v;
        mnpos = i;
      } else if (i - mxpos > p.lookahead) {
        mx = v;
        mxpos = i;
      }
    } else {
      if (v < mn) {
        mn = v;
        mnpos = i;
      } else if (v - mn >= p.delta && i - mnpos <= p.lookahead) {
        out.minima.push_back(mnpos);
        seek_max = true;
        mx = v;
        mxpos = i;
      } else if (i - mnpos > p.lookahead) {
        mn = v;
        mnpos = i;
      }
    }
  }
  return out;
}

inline Peaks peakdetect(const Series& s, const PeakDetectParams& p) {
  return peakdetect(std::span<const float>(s.values), p);
}

inline constexpr double kDeltaFloor = 1e-6;
inline constexpr double kFallbackPeriodS = 0.2;

// delta from the 5-95 percentile spread; lookahead from half the dominant
// 2-10 Hz modulation period of the cue.
inline PeakDetectParams auto_calibrate(const Series& cue) {
  const std::size_t n = cue.values.size();
  if (n < 4) fail(ErrorCode::kInvalidArgument, "auto_calibrate needs >= 4 samples");
  const std::span<const float> v(cue.values);
  PeakDetectParams p;
  p.delta = std::max(kDeltaFloor, 0.1 * (dsp::quantile(v, 0.95) - dsp::quantile(v, 0.05)));

  double period = kFallbackPeriodS;
  double mean = 0.0;
  for (float x : v) mean += x;
  mean /= static_cast<double>(n);
  std::vector<double> x(n);
  double energy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = v[i] - mean;
    energy += x[i] * x[i];
  }
  const double dt = cue.frame_period_s;
  const auto lag_lo = static_cast<std::size_t>(std::max(1L, std::lround(1.0 / (10.0 * dt))));
  const auto lag_hi =
      std::min<std::size_t>(n - 1, static_cast<std::size_t>(std::lround(1.0 / (2.0 * dt))));
  if (energy > 0.0 && lag_lo <= lag_hi) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_lag = 0;
    for (std::size_t lag = lag_lo; lag <= lag_hi; ++lag) {
      double acc = 0.0;
      for (std::size_t i = 0; i + lag < n; ++i) acc += x[i] * x[i + lag];
      const double r = acc / energy;
      if (r > best) {
        best = r;
        best_lag = lag;
      }
    }
    if (best >= 0.1) period = static_cast<double>(best_lag) * dt;
  }
  p.lookahead = static_cast<std::size_t>(std::max(1L, std::lround(0.5 * period / dt)));
  return p;
}

namespace segmentation_detail {

inline double series_end(const Series& s) {
  return s.start_time_s + (static_cast<double>(s.values.size()) - 0.5) * s.frame_period_s;
}

// Clamps into [0, duration] and drops intervals that became empty.
inline SyllableSet finalize(std::vector<Syllable> syl, double duration, std::string tag) {
  SyllableSet out;
  out.audio_duration_s = duration;
  out.method_tag = std::move(tag);
  for (Syllable s : syl) {
    s.onset_s = std::clamp(s.onset_s, 0.0, duration);
    s.offset_s = std::clamp(s.offset_s, 0.0, duration);
    s.nucleus_s = std::clamp(s.nucleus_s, s.onset_s, s.offset_s);
    if (s.onset_s < s.offset_s) out.syllables.push_back(s);
  }
  return out;
}

template <typename It>
std::size_t argmin_earliest(It values, std::size_t a, std::size_t b) {
  std::size_t best = a;
  for (std::size_t i = a + 1; i <= b; ++i)
    if (values[i] < values[best]) best = i;
  return best;
}

template <typename It>
std::size_t argmax_earliest(It values, std::size_t a, std::size_t b) {
  std::size_t best = a;
  for (std::size_t i = a + 1; i <= b; ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

// A run of frames [first, last] turned into a syllable covering whole frames.
inline Syllable frame_run(double start, double period, std::size_t first, std::size_t last,
                          std::size_t nucleus) {
  auto at = [&](std::size_t t) { return start + static_cast<double>(t) * period; };
  return {at(first) - period / 2.0, at(nucleus), at(last) + period / 2.0};
}

}  // namespace segmentation_detail

// Nuclei at confirmed maxima; boundaries at the confirmed minimum between
// neighbouring nuclei (or the argmin there); outer edges at the argmin
// before the first and after the last nucleus.
inline SyllableSet peaks_to_syllables(const Series& env, const Peaks& peaks,
                                      std::optional<double> audio_duration_s = {}) {
  using namespace segmentation_detail;
  const double duration = audio_duration_s.value_or(series_end(env));
  if (peaks.maxima.empty() || env.values.empty()) return finalize({}, duration, "peakdetect");
  const auto& v = env.values;
  const auto& mx = peaks.maxima;
  const std::size_t last = v.size() - 1;
  std::vector<std::size_t> edges;
  edges.push_back(argmin_earliest(v.begin(), 0, mx.front()));
  for (std::size_t k = 0; k + 1 < mx.size(); ++k) {
    const auto it = std::find_if(peaks.minima.begin(), peaks.minima.end(), [&](std::size_t m) {
      return m > mx[k] && m < mx[k + 1];
    });
    if (it != peaks.minima.end()) {
      edges.push_back(*it);
    } else if (mx[k + 1] > mx[k] + 1) {
      edges.push_back(argmin_earliest(v.begin(), mx[k] + 1, mx[k + 1] - 1));
    } else {
      edges.push_back(mx[k + 1]);
    }
  }
  edges.push_back(argmin_earliest(v.begin(), mx.back(), last));
  std::vector<Syllable> out;
  for (std::size_t k = 0; k < mx.size(); ++k)
    out.push_back({env.time_of(edges[k]), env.time_of(mx[k]), env.time_of(edges[k + 1])});
  return finalize(std::move(out), duration, "peakdetect");
}

struct GreedyCosineParams {
  double threshold = 0.7;
  double norm_floor_ratio = 0.5;
};

// Within each run of active (non-silent) frames, extends the current segment
// while the next frame's cosine to the segment's running mean stays at or
// above the threshold.
inline SyllableSet greedy_cosine_segment(const FeatureMatrix& f,
                                         const GreedyCosineParams& p = {},
                                         std::optional<double> audio_duration_s = {}) {
  using namespace segmentation_detail;
  const double duration = audio_duration_s.value_or(f.span_end_s());
  if (f.frames == 0) return finalize({}, duration, "cosine_threshold");
  const Trace norms = norm_trace(f);
  const double floor =
      p.norm_floor_ratio * dsp::quantile(std::span<const float>(norms.values), 0.5);
  auto active = [&](std::size_t t) {
    return norms.values[t] > 0.0f && norms.values[t] >= floor;
  };

  std::vector<Syllable> out;
  std::vector<double> sum(f.dims, 0.0);
  std::size_t seg_first = 0;
  bool open = false;
  auto close = [&](std::size_t last) {
    const std::size_t nuc = argmax_earliest(norms.values.begin(), seg_first, last);
    out.push_back(frame_run(f.start_time_s, f.frame_period_s, seg_first, last, nuc));
    open = false;
  };
  auto start = [&](std::size_t t) {
    seg_first = t;
    for (std::size_t d = 0; d < f.dims; ++d) sum[d] = f.at(t, d);
    open = true;
  };
  for (std::size_t t = 0; t < f.frames; ++t) {
    if (!active(t)) {
      if (open) close(t - 1);
      continue;
    }
    if (!open) {
      start(t);
      continue;
    }
    double dot = 0.0, sum_sq = 0.0;
    for (std::size_t d = 0; d < f.dims; ++d) {
      dot += sum[d] * f.at(t, d);
      sum_sq += sum[d] * sum[d];
    }
    const double denom = std::sqrt(sum_sq) * norms.values[t];
    const double cos = denom > 0.0 ? dot / denom : 0.0;
    if (cos >= p.threshold) {
      for (std::size_t d = 0; d < f.dims; ++d) sum[d] += f.at(t, d);
    } else {
      close(t - 1);
      start(t);
    }
  }
  if (open) close(f.frames - 1);
  return finalize(std::move(out), duration, "cosine_threshold");
}

struct MinCutParams {
  double expected_dur_s = 0.220;
  std::size_t min_len_frames = 2;
  std::size_t window_frames = 0;  // 0: expected duration in frames
};

struct MinCutResult {
  std::vector<std::size_t> boundaries;  // internal, strictly increasing
  double cost = 0.0;
};

inline constexpr double kNcutEps = 1e-9;

// Windowed normalized cut of a boundary placed before frame b, on the
// similarity shifted to [0, 1].
inline double mincut_boundary_cost(const SelfSimilarityMatrix& s, std::size_t b,
                                   std::size_t window) {
  const std::size_t T = s.size;
  const std::size_t l0 = b >= window ? b - window : 0;
  const std::size_t r1 = std::min(T, b + window);
  auto w = [&](std::size_t i, std::size_t j) { return (s(i, j) + 1.0) / 2.0; };
  double cut = 0.0, assoc = 0.0;
  for (std::size_t i = l0; i < b; ++i)
    for (std::size_t j = b; j < r1; ++j) cut += w(i, j);
  for (std::size_t i = l0; i < b; ++i)
    for (std::size_t j = l0; j < b; ++j) assoc += w(i, j);
  for (std::size_t i = b; i < r1; ++i)
    for (std::size_t j = b; j < r1; ++j) assoc += w(i, j);
  return cut / (assoc + kNcutEps);
}

// Places segments - 1 boundaries minimising the summed boundary cost, every
// segment at least min_len frames long. Among equal-cost placements the
// lexicographically smallest boundary vector wins. `segments` is reduced to
// the largest feasible count.
inline MinCutResult mincut_boundaries(const SelfSimilarityMatrix& s, std::size_t segments,
                                      std::size_t min_len, std::size_t window) {
  const std::size_t T = s.size;
  min_len = std::max<std::size_t>(1, min_len);
  window = std::max<std::size_t>(1, window);
  segments = std::max<std::size_t>(1, std::min(segments, T / min_len));
  MinCutResult result;
  if (segments <= 1 || T < 2) return result;

  const std::size_t nb = segments - 1;
  std::vector<double> cost(T, 0.0);
  for (std::size_t b = 1; b < T; ++b) cost[b] = mincut_boundary_cost(s, b, window);

  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  // dp[j][b]: best cost with boundary j+1 (1-based) at frame b.
  std::vector<std::vector<double>> dp(nb, std::vector<double>(T, kInf));
  std::vector<std::vector<std::size_t>> back(nb, std::vector<std::size_t>(T, kNone));
  auto lo = [&](std::size_t j) { return (j + 1) * min_len; };
  auto hi = [&](std::size_t j) { return T - (nb - j) * min_len; };

  auto path = [&](std::size_t j, std::size_t b) {
    std::vector<std::size_t> p(j + 1);
    for (std::size_t k = j + 1; k-- > 0;) {
      p[k] = b;
      b = back[k][b];
    }
    return p;
  };
  auto lex_less = [&](std::size_t j, std::size_t a, std::size_t b) {
    const auto pa = path(j, a), pb = path(j, b);
    return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
  };

  for (std::size_t b = lo(0); b <= hi(0); ++b) dp[0][b] = cost[b];
  for (std::size_t j = 1; j < nb; ++j) {
    std::size_t best = kNone;
    std::size_t next_prev = lo(j - 1);
    for (std::size_t b = lo(j); b <= hi(j); ++b) {
      for (; next_prev + min_len <= b && next_prev <= hi(j - 1); ++next_prev) {
        const std::size_t p = next_prev;
        if (dp[j - 1][p] == kInf) continue;
        if (best == kNone || dp[j - 1][p] < dp[j - 1][best] ||
            (dp[j - 1][p] == dp[j - 1][best] && lex_less(j - 1, p, best)))
          best = p;
      }
      if (best == kNone) continue;
      dp[j][b] = dp[j - 1][best] + cost[b];
      back[j][b] = best;
    }
  }
  std::size_t end = kNone;
  for (std::size_t b = lo(nb - 1); b <= hi(nb - 1); ++b) {
    if (dp[nb - 1][b] == kInf) continue;
    if (end == kNone || dp[nb - 1][b] < dp[nb - 1][end] ||
        (dp[nb - 1][b] == dp[nb - 1][end] && lex_less(nb - 1, b, end)))
      end = b;
  }
  if (end == kNone) return result;
  result.boundaries = path(nb - 1, end);
  result.cost = dp[nb - 1][end];
  return result;
}

inline SyllableSet mincut_segment(const SelfSimilarityMatrix& s, const MinCutParams& p = {},
                                  std::optional<double> audio_duration_s = {}) {
  using namespace segmentation_detail;
  const std::size_t T = s.size;
  const double period = s.frame_period_s;
  const double duration = audio_duration_s.value_or(
      s.start_time_s + (static_cast<double>(T) - 0.5) * period);
  if (T == 0) return finalize({}, duration, "mincut");
  if (!(p.expected_dur_s > 0.0))
    fail(ErrorCode::kInvalidArgument, "expected syllable duration must be > 0");
  const auto segments = static_cast<std::size_t>(
      std::max(1L, std::lround(static_cast<double>(T) * period / p.expected_dur_s)));
  const std::size_t window =
      p.window_frames > 0
          ? p.window_frames
          : static_cast<std::size_t>(std::max(1L, std::lround(p.expected_dur_s / period)));
  const MinCutResult cut = mincut_boundaries(s, segments, p.min_len_frames, window);
  const Trace coherence = ssm_row_mean(s);

  std::vector<std::size_t> edges{0};
  edges.insert(edges.end(), cut.boundaries.begin(), cut.boundaries.end());
  edges.push_back(T);
  std::vector<Syllable> out;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const std::size_t a = edges[k], b = edges[k + 1] - 1;
    const std::size_t nuc = argmax_earliest(coherence.values.begin(), a, b);
    out.push_back(frame_run(s.start_time_s, period, a, b, nuc));
  }
  return finalize(std::move(out), duration, "mincut");
}

struct ThresholdParams {
  double tau_quantile = 0.60;
  double gap_min_s = 0.02;
  double len_min_s = 0.04;
};

// Runs at or above the tau quantile; runs separated by a short gap merge,
// short runs are dropped.
inline SyllableSet threshold_segment(const Trace& trace, const ThresholdParams& p = {},
                                     std::optional<double> audio_duration_s = {}) {
  using namespace segmentation_detail;
  const double duration = audio_duration_s.value_or(series_end(trace));
  const auto& v = trace.values;
  if (v.empty()) return finalize({}, duration, "cls_threshold");
  const double tau = dsp::quantile(std::span<const float>(v), p.tau_quantile);
  const double dt = trace.frame_period_s;
  constexpr double kSlack = 1e-9;

  struct Run { std::size_t first, last; };
  std::vector<Run> runs;
  for (std::size_t t = 0; t < v.size(); ++t) {
    if (v[t] < tau) continue;
    if (!runs.empty() && runs.back().last + 1 == t) runs.back().last = t;
    else runs.push_back({t, t});
  }
  std::vector<Run> merged;
  for (const Run& r : runs) {
    if (!merged.empty()) {
      const auto gap = static_cast<double>(r.first - merged.back().last - 1) * dt;
      if (gap < p.gap_min_s - kSlack) {
        merged.back().last = r.last;
        continue;
      }
    }
    merged.push_back(r);
  }
  std::vector<Syllable> out;
  for (const Run& r : merged) {
    if (static_cast<double>(r.last - r.first + 1) * dt < p.len_min_s - kSlack) continue;
    const std::size_t nuc = argmax_earliest(v.begin(), r.first, r.last);
    out.push_back(frame_run(trace.start_time_s, dt, r.first, r.last, nuc));
  }
  return finalize(std::move(out), duration, "cls_threshold");
}

// Time of the largest cue value among frames centred in [onset, offset);
// the interval midpoint when no frame centre falls inside.
inline double derive_nucleus(double onset_s, double offset_s, const Series& cue) {
  const double mid = 0.5 * (onset_s + offset_s);
  if (cue.values.empty() || !(cue.frame_period_s > 0.0)) return mid;
  const double rel = (onset_s - cue.start_time_s) / cue.frame_period_s;
  long long k = static_cast<long long>(std::ceil(rel - 1e-9));
  k = std::max<long long>(k, 0);
  while (k > 0 && cue.time_of(static_cast<std::size_t>(k - 1)) >= onset_s) --k;
  auto idx = static_cast<std::size_t>(k);
  while (idx < cue.values.size() && cue.time_of(idx) < onset_s) ++idx;
  std::optional<std::size_t> best;
  for (; idx < cue.values.size() && cue.time_of(idx) < offset_s; ++idx)
    if (!best || cue.values[idx] > cue.values[*best]) best = idx;
  return best ? cue.time_of(*best) : mid;
}

// Re-derives every nucleus from `cue`, keeping the intervals.
inline SyllableSet with_cue_nuclei(SyllableSet set, const Series& cue) {
  for (Syllable& s : set.syllables) s.nucleus_s = derive_nucleus(s.onset_s, s.offset_s, cue);
  return set;
}

}  // namespace sylkit
