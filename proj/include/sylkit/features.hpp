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

// Frame features (MFCC, log-mel) and the cue traces / self-similarity
// matrices derived from any feature matrix.

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "sylkit/dsp.hpp"
#include "sylkit/error.hpp"
#include "sylkit/types.hpp"

namespace sylkit {

inline constexpr double kLogFloor = 1e-10;
inline constexpr double kPreEmphasis = 0.97;

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

struct MelParams {
  std::size_t n_mels = 40;
  double win_s = 0.025;
  double hop_s = 0.020;
};

struct MfccParams {
  std::size_t n_coeffs = 13;
  std::size_t n_mels = 26;
  double win_s = 0.025;
  double hop_s = 0.020;
};

// Triangular HTK-mel filters spanning 0 Hz to Nyquist, as weights over the
// n_fft / 2 + 1 power-spectrum bins. Row-major n_mels x bins.
inline std::vector<double> mel_filterbank(std::size_t n_mels, std::size_t n_fft,
                                          double sample_rate) {
  const std::size_t bins = n_fft / 2 + 1;
  const double mel_hi = hz_to_mel(sample_rate / 2.0);
  std::vector<double> edges(n_mels + 2);
  for (std::size_t m = 0; m < edges.size(); ++m)
    edges[m] = mel_to_hz(mel_hi * static_cast<double>(m) / static_cast<double>(n_mels + 1));
  std::vector<double> fb(n_mels * bins, 0.0);
  for (std::size_t m = 0; m < n_mels; ++m) {
    const double lo = edges[m], c = edges[m + 1], hi = edges[m + 2];
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / static_cast<double>(n_fft);
      double w = 0.0;
      if (f > lo && f <= c) w = (f - lo) / (c - lo);
      else if (f > c && f < hi) w = (hi - f) / (hi - c);
      fb[m * bins + k] = w;
    }
  }
  return fb;
}

namespace features_detail {

inline std::vector<double> log_mel_energies(const AudioBuffer& audio, std::size_t n_mels,
                                            double win_s, double hop_s,
                                            std::size_t& frames_out,
                                            std::size_t& win_out) {
  if (audio.samples.empty()) fail(ErrorCode::kEmptyAudio, "empty audio");
  if (n_mels == 0) fail(ErrorCode::kInvalidArgument, "n_mels must be positive");
  if (!(win_s > 0.0 && hop_s > 0.0))
    fail(ErrorCode::kInvalidArgument, "window and hop must be positive");
  const auto win = static_cast<std::size_t>(std::lround(win_s * audio.sample_rate));
  const auto hop = static_cast<std::size_t>(std::lround(hop_s * audio.sample_rate));
  const dsp::FrameGrid g(audio.samples.size(), std::max<std::size_t>(1, win),
                         std::max<std::size_t>(1, hop));
  std::vector<double> x(audio.samples.size());
  x[0] = audio.samples[0];
  for (std::size_t i = 1; i < x.size(); ++i)
    x[i] = audio.samples[i] - kPreEmphasis * audio.samples[i - 1];
  const std::size_t n_fft = dsp::next_pow2(g.win);
  const auto power = dsp::power_spectrogram(x, g, dsp::hann(g.win), n_fft);
  const std::size_t bins = n_fft / 2 + 1;
  const auto fb = mel_filterbank(n_mels, n_fft, audio.sample_rate);
  std::vector<double> out(g.frames * n_mels);
  for (std::size_t t = 0; t < g.frames; ++t)
    for (std::size_t m = 0; m < n_mels; ++m) {
      double e = 0.0;
      for (std::size_t k = 0; k < bins; ++k) e += fb[m * bins + k] * power[t * bins + k];
      out[t * n_mels + m] = std::log(std::max(e, kLogFloor));
    }
  frames_out = g.frames;
  win_out = g.win;
  return out;
}

inline double norm(std::span<const float> v) {
  double s = 0.0;
  for (float x : v) s += static_cast<double>(x) * x;
  return std::sqrt(s);
}

inline double dot(std::span<const float> a, std::span<const float> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * b[i];
  return s;
}

}  // namespace features_detail

// Log mel energies (pre-emphasis, Hann window, power spectrum, HTK mel
// filters, natural log floored at 1e-10).
inline FeatureMatrix logmel(const AudioBuffer& audio, const MelParams& p = {}) {
  std::size_t frames = 0, win = 0;
  const auto e =
      features_detail::log_mel_energies(audio, p.n_mels, p.win_s, p.hop_s, frames, win);
  FeatureMatrix m(frames, p.n_mels, p.hop_s, static_cast<double>(win) / 2.0 / audio.sample_rate,
                  "logmel");
  std::transform(e.begin(), e.end(), m.data.begin(),
                 [](double v) { return static_cast<float>(v); });
  return m;
}

inline FeatureMatrix mfcc(const AudioBuffer& audio, const MfccParams& p = {}) {
  if (p.n_coeffs == 0 || p.n_coeffs > p.n_mels)
    fail(ErrorCode::kInvalidArgument, "mfcc needs 0 < n_coeffs <= n_mels");
  std::size_t frames = 0, win = 0;
  const auto e =
      features_detail::log_mel_energies(audio, p.n_mels, p.win_s, p.hop_s, frames, win);
  const std::size_t M = p.n_mels;
  // Orthonormal DCT-II basis.
  std::vector<double> basis(p.n_coeffs * M);
  for (std::size_t k = 0; k < p.n_coeffs; ++k) {
    const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / static_cast<double>(M));
    for (std::size_t m = 0; m < M; ++m)
      basis[k * M + m] = scale * std::cos(std::numbers::pi * static_cast<double>(k) *
                                          (static_cast<double>(m) + 0.5) /
                                          static_cast<double>(M));
  }
  FeatureMatrix out(frames, p.n_coeffs, p.hop_s,
                    static_cast<double>(win) / 2.0 / audio.sample_rate, "mfcc");
  for (std::size_t t = 0; t < frames; ++t)
    for (std::size_t k = 0; k < p.n_coeffs; ++k) {
      double c = 0.0;
      for (std::size_t m = 0; m < M; ++m) c += basis[k * M + m] * e[t * M + m];
      out.at(t, k) = static_cast<float>(c);
    }
  return out;
}

inline Trace make_trace(const FeatureMatrix& f, CueKind kind) {
  Trace tr;
  tr.kind = kind;
  tr.frame_period_s = f.frame_period_s;
  tr.start_time_s = f.start_time_s;
  tr.values.assign(f.frames, 0.0f);
  return tr;
}

// Cosine similarity between consecutive frames; the last value repeats the
// previous one so the trace stays on the frame grid. A zero-norm frame has
// similarity 0 with any other frame.
inline Trace cosine_trace(const FeatureMatrix& f) {
  using namespace features_detail;
  if (f.frames < 2) fail(ErrorCode::kInvalidArgument, "cosine trace needs at least 2 frames");
  Trace tr = make_trace(f, CueKind::kCosSim);
  std::vector<double> norms(f.frames);
  for (std::size_t t = 0; t < f.frames; ++t) norms[t] = norm(f.row(t));
  for (std::size_t t = 0; t + 1 < f.frames; ++t) {
    double c = 0.0;
    if (norms[t] > 0.0 && norms[t + 1] > 0.0)
      c = std::clamp(dot(f.row(t), f.row(t + 1)) / (norms[t] * norms[t + 1]), -1.0, 1.0);
    tr.values[t] = static_cast<float>(c);
  }
  tr.values[f.frames - 1] = tr.values[f.frames - 2];
  return tr;
}

struct SelfSimilarityMatrix {
  std::vector<double> values;
  std::size_t size = 0;
  double frame_period_s = 0.0;
  double start_time_s = 0.0;

  double operator()(std::size_t i, std::size_t j) const { return values[i * size + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values[i * size + j]; }
  double time_of(std::size_t t) const {
    return start_time_s + static_cast<double>(t) * frame_period_s;
  }
};

inline SelfSimilarityMatrix ssm(const FeatureMatrix& f) {
  if (f.frames < 1 || f.dims < 1) fail(ErrorCode::kInvalidArgument, "ssm of an empty matrix");
  const std::size_t T = f.frames, D = f.dims;
  std::vector<double> unit(T * D, 0.0);
  std::vector<bool> zero(T, false);
  for (std::size_t t = 0; t < T; ++t) {
    const double n = features_detail::norm(f.row(t));
    zero[t] = !(n > 0.0);
    if (!zero[t])
      for (std::size_t d = 0; d < D; ++d) unit[t * D + d] = f.at(t, d) / n;
  }
  SelfSimilarityMatrix s{std::vector<double>(T * T, 0.0), T, f.frame_period_s,
                         f.start_time_s};
  for (std::size_t i = 0; i < T; ++i) {
    s(i, i) = 1.0;
    if (zero[i]) continue;
    for (std::size_t j = i + 1; j < T; ++j) {
      if (zero[j]) continue;
      double c = 0.0;
      for (std::size_t d = 0; d < D; ++d) c += unit[i * D + d] * unit[j * D + d];
      c = std::clamp(c, -1.0, 1.0);
      s(i, j) = c;
      s(j, i) = c;
    }
  }
  return s;
}

// Similarity-to-utterance coherence trace.
inline Trace ssm_row_mean(const SelfSimilarityMatrix& s) {
  Trace tr;
  tr.kind = CueKind::kSsmRowMean;
  tr.frame_period_s = s.frame_period_s;
  tr.start_time_s = s.start_time_s;
  tr.values.resize(s.size);
  for (std::size_t i = 0; i < s.size; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < s.size; ++j) acc += s(i, j);
    tr.values[i] = static_cast<float>(acc / static_cast<double>(s.size));
  }
  return tr;
}

inline Trace norm_trace(const FeatureMatrix& f) {
  Trace tr = make_trace(f, CueKind::kNorm);
  for (std::size_t t = 0; t < f.frames; ++t)
    tr.values[t] = static_cast<float>(features_detail::norm(f.row(t)));
  return tr;
}

}  // namespace sylkit
