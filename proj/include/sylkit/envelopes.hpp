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

// Classical amplitude envelopes. Every kind is sampled on the same 100 Hz
// grid as the RMS envelope (25 ms analysis window, frame centres at
// t * hop + win / 2), so segmenters never need to know which cue they got.

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

#include "sylkit/dsp.hpp"
#include "sylkit/error.hpp"
#include "sylkit/types.hpp"

namespace sylkit {

inline constexpr double kEnvelopeWindowS = 0.025;
inline constexpr double kEnvelopeHopS = 0.010;

namespace envelope_detail {

inline std::size_t to_samples(double seconds) {
  return static_cast<std::size_t>(std::max(1L, std::lround(seconds * kSampleRate)));
}

inline void require_audio(const AudioBuffer& audio) {
  if (audio.samples.empty()) fail(ErrorCode::kEmptyAudio, "empty audio");
}

inline Series make_series(const dsp::FrameGrid& g, CueKind kind) {
  Series s;
  s.kind = kind;
  s.frame_period_s = static_cast<double>(g.hop) / kSampleRate;
  s.start_time_s = (g.n >= g.win ? static_cast<double>(g.win) : static_cast<double>(g.n)) /
                   2.0 / kSampleRate;
  s.values.assign(g.frames, 0.0f);
  return s;
}

inline std::size_t center_sample(const dsp::FrameGrid& g, std::size_t t) {
  const std::size_t c = g.n >= g.win ? g.begin(t) + g.win / 2 : g.n / 2;
  return std::min(c, g.n - 1);
}

// Point-samples an already smoothed signal at the frame centres.
inline Series sample_at_centers(const std::vector<double>& smooth,
                                const dsp::FrameGrid& g, CueKind kind) {
  Series s = make_series(g, kind);
  for (std::size_t t = 0; t < g.frames; ++t)
    s.values[t] = static_cast<float>(std::max(0.0, smooth[center_sample(g, t)]));
  return s;
}

}  // namespace envelope_detail

// values[t] = sqrt(mean(x^2)) over window t.
inline Envelope rms_envelope(const AudioBuffer& audio, double win_s = kEnvelopeWindowS,
                             double hop_s = kEnvelopeHopS) {
  using namespace envelope_detail;
  require_audio(audio);
  if (!(win_s >= hop_s && hop_s > 0.0))
    fail(ErrorCode::kInvalidArgument, "rms envelope needs win_s >= hop_s > 0");
  const dsp::FrameGrid g(audio.samples.size(), to_samples(win_s), to_samples(hop_s));
  std::vector<double> cum(g.n + 1, 0.0);
  for (std::size_t i = 0; i < g.n; ++i)
    cum[i + 1] = cum[i] + audio.samples[i] * audio.samples[i];
  Series s = make_series(g, CueKind::kRms);
  for (std::size_t t = 0; t < g.frames; ++t) {
    const std::size_t b = g.begin(t);
    const std::size_t len = g.length(t);
    const double energy = std::max(0.0, cum[b + len] - cum[b]);
    s.values[t] = static_cast<float>(std::sqrt(energy / static_cast<double>(len)));
  }
  return s;
}

// Full-wave rectification, zero-phase Butterworth low-pass, decimation.
inline Envelope lowpass_envelope(const AudioBuffer& audio, double cutoff_hz = 10.0,
                                 int order = 4, double hop_s = kEnvelopeHopS) {
  using namespace envelope_detail;
  require_audio(audio);
  if (!(cutoff_hz < audio.sample_rate / 2.0))
    fail(ErrorCode::kInvalidArgument, "cutoff must be below nyquist");
  const dsp::FrameGrid g(audio.samples.size(), to_samples(kEnvelopeWindowS),
                         to_samples(hop_s));
  std::vector<double> rect(audio.samples.size());
  std::transform(audio.samples.begin(), audio.samples.end(), rect.begin(),
                 [](double v) { return std::abs(v); });
  const auto lp = dsp::butterworth_lowpass(order, cutoff_hz, audio.sample_rate);
  const auto pad = static_cast<std::size_t>(3.0 * audio.sample_rate / cutoff_hz);
  return sample_at_centers(dsp::filtfilt(lp, rect, pad), g, CueKind::kLowpass);
}

// Analytic-signal magnitude, smoothed at smooth_hz, decimated.
inline Envelope hilbert_envelope(const AudioBuffer& audio, double smooth_hz = 10.0,
                                 double hop_s = kEnvelopeHopS) {
  using namespace envelope_detail;
  require_audio(audio);
  const dsp::FrameGrid g(audio.samples.size(), to_samples(kEnvelopeWindowS),
                         to_samples(hop_s));
  const auto mag = dsp::analytic_magnitude(audio.samples);
  const auto lp = dsp::butterworth_lowpass(4, smooth_hz, audio.sample_rate);
  const auto pad = static_cast<std::size_t>(3.0 * audio.sample_rate / smooth_hz);
  return sample_at_centers(dsp::filtfilt(lp, mag, pad), g, CueKind::kHilbert);
}

struct Band {
  double lo_hz = 0.0;
  double hi_hz = 0.0;
};

struct SbsParams {
  Band low_band{300.0, 1200.0};
  Band high_band{2000.0, 5000.0};
  double gamma = 1.0;
  double smooth_s = 0.05;
};

// Spectral band subtraction: vowel-band power minus gamma times
// frication-band power, floored at zero and moving-average smoothed.
// Band powers are scaled so a sinusoid of amplitude A inside a band
// contributes about A^2 / 2.
inline Envelope sbs_envelope(const AudioBuffer& audio, const SbsParams& p = {}) {
  using namespace envelope_detail;
  require_audio(audio);
  const double nyquist = audio.sample_rate / 2.0;
  if (!(p.low_band.lo_hz >= 0.0 && p.low_band.lo_hz < p.low_band.hi_hz &&
        p.low_band.hi_hz <= p.high_band.lo_hz && p.high_band.lo_hz < p.high_band.hi_hz &&
        p.high_band.hi_hz <= nyquist))
    fail(ErrorCode::kInvalidArgument, "sbs bands must be ordered and below nyquist");
  if (!(p.gamma >= 0.0) || !(p.smooth_s >= 0.0))
    fail(ErrorCode::kInvalidArgument, "sbs gamma and smoothing must be nonnegative");

  const dsp::FrameGrid g(audio.samples.size(), to_samples(kEnvelopeWindowS),
                         to_samples(kEnvelopeHopS));
  const std::size_t n_fft = dsp::next_pow2(g.win);
  const auto window = dsp::hann(g.win);
  const auto power = dsp::power_spectrogram(audio.samples, g, window, n_fft);
  const std::size_t bins = n_fft / 2 + 1;
  const double wsq = std::inner_product(window.begin(), window.end(), window.begin(), 0.0);
  const double norm = static_cast<double>(n_fft) * wsq / 2.0;
  const double bin_hz = audio.sample_rate / static_cast<double>(n_fft);
  auto band_power = [&](std::size_t t, const Band& b) {
    double e = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * bin_hz;
      if (f >= b.lo_hz && f <= b.hi_hz) e += power[t * bins + k];
    }
    return e / norm;
  };
  std::vector<double> raw(g.frames);
  for (std::size_t t = 0; t < g.frames; ++t)
    raw[t] = std::max(0.0, band_power(t, p.low_band) - p.gamma * band_power(t, p.high_band));

  const auto width = static_cast<std::size_t>(
      std::max(1L, std::lround(p.smooth_s / kEnvelopeHopS)));
  const std::size_t left = (width - 1) / 2;
  const std::size_t right = width - 1 - left;
  Series s = make_series(g, CueKind::kSbs);
  for (std::size_t t = 0; t < g.frames; ++t) {
    const std::size_t a = t >= left ? t - left : 0;
    const std::size_t b = std::min(g.frames - 1, t + right);
    double acc = 0.0;
    for (std::size_t k = a; k <= b; ++k) acc += raw[k];
    s.values[t] = static_cast<float>(acc / static_cast<double>(b - a + 1));
  }
  return s;
}

// Theta-band cue: the RMS envelope with its mean removed is passed
// forward and backward through a second-order resonator centred at
// center_hz, then half-wave rectified. This is a static resonator, not an
// entrained oscillator model.
inline Envelope theta_envelope(const AudioBuffer& audio, double center_hz = 5.0,
                               double q = 1.0, double hop_s = kEnvelopeHopS) {
  Series rms = rms_envelope(audio, kEnvelopeWindowS, hop_s);
  const double frame_rate = 1.0 / rms.frame_period_s;
  const dsp::Cascade res{dsp::resonator_bandpass(center_hz, q, frame_rate)};
  std::vector<double> x(rms.values.begin(), rms.values.end());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  for (double& v : x) v -= mean;
  const auto pad = static_cast<std::size_t>(std::ceil(6.0 * frame_rate / center_hz));
  const auto y = dsp::filtfilt(res, x, pad);
  Series out = std::move(rms);
  out.kind = CueKind::kTheta;
  for (std::size_t t = 0; t < y.size(); ++t)
    out.values[t] = static_cast<float>(std::max(0.0, y[t]));
  return out;
}

inline Envelope compute_envelope(const AudioBuffer& audio, CueKind kind) {
  switch (kind) {
    case CueKind::kRms: return rms_envelope(audio);
    case CueKind::kLowpass: return lowpass_envelope(audio);
    case CueKind::kHilbert: return hilbert_envelope(audio);
    case CueKind::kSbs: return sbs_envelope(audio);
    case CueKind::kTheta: return theta_envelope(audio);
    default: break;
  }
  fail(ErrorCode::kInvalidArgument,
       "not an envelope kind: " + std::string(to_string(kind)));
}

}  // namespace sylkit
