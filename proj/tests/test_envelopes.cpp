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

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sylkit/sylkit.hpp"

using namespace sylkit;

namespace {

constexpr CueKind kAllKinds[] = {CueKind::kRms, CueKind::kLowpass, CueKind::kHilbert, CueKind::kSbs,
                                 CueKind::kTheta};

std::size_t expected_frames(std::size_t n) { return n < 400 ? 1 : (n - 400) / 160 + 1; }

// Interior slice [lo_s, hi_s) of an envelope, in seconds.
std::vector<double> interior(const Series& s, double lo_s, double hi_s) {
  std::vector<double> out;
  for (std::size_t t = 0; t < s.size(); ++t)
    if (s.time_of(t) >= lo_s && s.time_of(t) < hi_s) out.push_back(s.values[t]);
  return out;
}

std::pair<double, double> min_max(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return {*lo, *hi};
}

double butterworth_gain(double f, double fc, int order) {
  return 1.0 / std::sqrt(1.0 + std::pow(f / fc, 2.0 * order));
}

}  // namespace

TEST(Envelopes, FrameArithmeticForEveryKind) {
  for (std::size_t n : {100u, 399u, 400u, 401u, 559u, 560u, 16000u, 16123u}) {
    AudioBuffer a = oracle::tone(300, 0.5, static_cast<double>(n) / kSampleRate);
    ASSERT_EQ(a.samples.size(), n);
    for (CueKind k : kAllKinds) {
      const Series e = compute_envelope(a, k);
      EXPECT_EQ(e.size(), expected_frames(n)) << to_string(k) << " n=" << n;
      EXPECT_DOUBLE_EQ(e.frame_period_s, 0.01);
      EXPECT_EQ(e.kind, k);
      for (float v : e.values) EXPECT_GE(v, 0.0f);
    }
  }
}

TEST(Envelopes, SilenceGivesZeros) {
  AudioBuffer a;
  a.samples.assign(8000, 0.0);
  for (CueKind k : kAllKinds)
    for (float v : compute_envelope(a, k).values) EXPECT_EQ(v, 0.0f) << to_string(k);
}

TEST(Envelopes, RmsOfSinusoid) {
  const double A = 0.8;
  const Series e = rms_envelope(oracle::tone(440, A, 1.0));
  for (double v : interior(e, 0.05, 0.95)) EXPECT_NEAR(v, A / std::sqrt(2.0), 0.02 * A / std::sqrt(2.0));
}

TEST(Envelopes, RmsWindowMustCoverHop) {
  EXPECT_THROW(rms_envelope(oracle::tone(440, 1, 0.1), 0.005, 0.01), Error);
}

TEST(Envelopes, HilbertOfPureTone) {
  for (double A : {0.3, 1.0}) {
    const Series e = hilbert_envelope(oracle::tone(523, A, 1.0, 0.3));
    for (double v : interior(e, 0.05, 0.95)) EXPECT_NEAR(v, A, 0.02 * A);
  }
}

TEST(Envelopes, HilbertFollowsTwoHertzGating) {
  AudioBuffer a = oracle::tone(300, 1.0, 3.0);
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const double t = static_cast<double>(i) / kSampleRate;
    if (std::fmod(t, 0.5) >= 0.25) a.samples[i] = 0.0;
  }
  const Series e = hilbert_envelope(a);
  for (int half = 1; half < 11; ++half) {
    const double start = 0.25 * half;
    // Skip 60 ms around each gate edge for the 10 Hz smoother's transition.
    const auto seg = interior(e, start + 0.06, start + 0.19);
    double mean = 0.0;
    for (double v : seg) mean += v;
    mean /= static_cast<double>(seg.size());
    if (half % 2 == 0) EXPECT_NEAR(mean, 1.0, 0.05) << half;
    else EXPECT_NEAR(mean, 0.0, 0.05) << half;
  }
}

TEST(Envelopes, LowpassModulationDepthFollowsDesignResponse) {
  const double d = 0.5;
  for (double fm : {4.0, 50.0}) {
    const Series e = lowpass_envelope(oracle::am_tone(1000, fm, d, 4.0));
    const auto [lo, hi] = min_max(interior(e, 1.0, 3.0));
    const double depth = (hi - lo) / (hi + lo);
    const double g = butterworth_gain(fm, 10.0, 4);
    const double predicted = d * g * g;  // forward-backward squares the response
    if (fm == 4.0) EXPECT_NEAR(depth, predicted, 0.1 * predicted);
    else EXPECT_LT(depth, d * 0.1) << "attenuation below 20 dB";
  }
}

TEST(Envelopes, SbsBandSelectivity) {
  const double A = 0.9;
  const double tone_power = A * A / 2.0;
  const Series low = sbs_envelope(oracle::tone(500, A, 1.0));
  for (double v : interior(low, 0.1, 0.9)) {
    EXPECT_GT(v, 0.0);
    EXPECT_NEAR(v, tone_power, 0.05 * tone_power);
  }
  const Series high = sbs_envelope(oracle::tone(3000, A, 1.0));
  for (double v : interior(high, 0.1, 0.9)) EXPECT_LT(v, 0.01 * tone_power);
}

TEST(Envelopes, SbsRejectsBadBands) {
  SbsParams p;
  p.low_band = {2500, 3000};
  EXPECT_THROW(sbs_envelope(oracle::tone(500, 1, 0.5), p), Error);
  p = {};
  p.high_band = {2000, 9000};
  EXPECT_THROW(sbs_envelope(oracle::tone(500, 1, 0.5), p), Error);
}

TEST(Envelopes, ThetaFollowsResonatorResponse) {
  const auto reso = dsp::resonator_bandpass(5.0, 1.0, 100.0);
  const double peak_gain = oracle::biquad_gain(reso, 5.0, 100.0);
  EXPECT_NEAR(peak_gain, 1.0, 1e-9);
  for (double fm : {0.5, 5.0}) {
    const AudioBuffer a = oracle::am_tone(400, fm, 0.5, 24.0);
    const Series rms = rms_envelope(a);
    const Series th = theta_envelope(a);
    const auto r = interior(rms, 6.0, 18.0);
    double mean = 0.0;
    for (double v : r) mean += v;
    mean /= static_cast<double>(r.size());
    double in_amp = 0.0;
    for (double v : r) in_amp = std::max(in_amp, std::abs(v - mean));
    const auto [lo, out_amp] = min_max(interior(th, 6.0, 18.0));
    EXPECT_GE(lo, 0.0);
    const double ratio = out_amp / in_amp;
    const double g = oracle::biquad_gain(reso, fm, 100.0);
    EXPECT_NEAR(ratio, g * g / (peak_gain * peak_gain), 0.05) << fm;
    if (fm == 5.0) EXPECT_GE(ratio, 0.7);
    else EXPECT_LT(ratio, 0.2);
  }
}

TEST(Envelopes, AutocorrelationPeriodOfAmTone) {
  for (double k : {2.0, 4.0, 5.0, 8.0}) {
    const AudioBuffer a = oracle::am_tone(500, k, 0.8, 5.0);
    for (CueKind kind : {CueKind::kRms, CueKind::kLowpass, CueKind::kHilbert, CueKind::kSbs}) {
      const Series e = compute_envelope(a, kind);
      std::vector<double> v(e.values.begin(), e.values.end());
      const auto lag = oracle::autocorr_peak_lag(v, 10, 50);
      EXPECT_LE(std::abs(static_cast<double>(lag) - 100.0 / k), 1.0)
          << to_string(kind) << " k=" << k << " lag=" << lag;
    }
  }
}

TEST(Envelopes, PeakPositionsScaleCovariant) {
  AudioBuffer a = oracle::am_tone(450, 3.0, 0.9, 2.0);
  AudioBuffer b = a;
  for (double& v : b.samples) v *= 0.37;
  for (CueKind k : kAllKinds) {
    const Series ea = compute_envelope(a, k), eb = compute_envelope(b, k);
    ASSERT_EQ(ea.size(), eb.size());
    const auto pa = std::max_element(ea.values.begin(), ea.values.end()) - ea.values.begin();
    const auto pb = std::max_element(eb.values.begin(), eb.values.end()) - eb.values.begin();
    EXPECT_EQ(pa, pb) << to_string(k);
  }
}

TEST(Envelopes, ExportAsFeatureFileIsBitExact) {
  const Series e = sbs_envelope(oracle::am_tone(500, 4, 0.7, 1.0));
  const auto bytes = encode_feature_file(to_feature_matrix(e));
  const Series back = series_from_feature_matrix(decode_feature_file(bytes).matrix, CueKind::kSbs);
  EXPECT_EQ(back.values, e.values);
  EXPECT_EQ(back.frame_period_s, e.frame_period_s);
  EXPECT_EQ(back.start_time_s, e.start_time_s);
}
