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

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "criteria.hpp"
#include "oracles.hpp"
#include "sylkit/sylkit.hpp"

using namespace sylkit;

namespace {

Series series(std::vector<float> v, double period = 0.01, double start = 0.0) {
  Series s;
  s.values = std::move(v);
  s.frame_period_s = period;
  s.start_time_s = start;
  return s;
}

SelfSimilarityMatrix blocks_ssm(const std::vector<std::size_t>& sizes, double period) {
  std::size_t T = 0;
  for (auto n : sizes) T += n;
  SelfSimilarityMatrix s{std::vector<double>(T * T, 0.0), T, period, period / 2};
  std::size_t a = 0;
  for (auto n : sizes) {
    for (std::size_t i = a; i < a + n; ++i)
      for (std::size_t j = a; j < a + n; ++j) s(i, j) = 1.0;
    a += n;
  }
  return s;
}

}  // namespace

TEST(PeakDetect, AlternatingExample) {
  const Peaks p = peakdetect(series({0, 1, 0, 1, 0}), {0.5, 2});
  EXPECT_EQ(p.maxima, (std::vector<std::size_t>{1, 3}));
  EXPECT_EQ(p.minima, (std::vector<std::size_t>{2}));
}

TEST(PeakDetect, RampAndConstantGiveNothing) {
  std::vector<float> ramp(50), flat(50, 0.3f);
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = static_cast<float>(i);
  for (const auto& v : {ramp, flat}) {
    const Peaks p = peakdetect(series(v), {0.5, 5});
    EXPECT_TRUE(p.maxima.empty());
    EXPECT_TRUE(p.minima.empty());
  }
}

TEST(PeakDetect, RejectsBadArguments) {
  EXPECT_THROW(peakdetect(series({1}), {0.5, 2}), Error);
  EXPECT_THROW(peakdetect(series({1, 2}), {0.0, 2}), Error);
  EXPECT_THROW(peakdetect(series({1, 2}), {-1.0, 2}), Error);
  EXPECT_THROW(peakdetect(series({1, 2}), {0.5, 0}), Error);
}

TEST(PeakDetect, StaleCandidateIsDropped) {
  // The drop after index 1 arrives too late for lookahead 2.
  const std::vector<double> s = {0, 1, 0.9, 0.8, 0.7, 0.0, 0.0};
  const Peaks p = peakdetect(std::span<const double>(s), {0.5, 2});
  EXPECT_EQ(p.maxima, oracle::peaks(s, 0.5, 2).maxima);
  EXPECT_TRUE(p.maxima.empty() || p.maxima.front() != 1);
}

TEST(PeakDetect, MatchesSliceOracle) {
  const auto o = criteria::peakdetect_oracle(11);
  EXPECT_TRUE(o.pass) << o.detail;
}

TEST(AutoCalibrate, ConstantSeriesUsesFloorAndFallback) {
  const PeakDetectParams p = auto_calibrate(series(std::vector<float>(300, 0.5f)));
  EXPECT_DOUBLE_EQ(p.delta, 1e-6);
  EXPECT_EQ(p.lookahead, 10u);  // half of the 0.2 s fallback period at 100 Hz
}

TEST(AutoCalibrate, FourHertzSinusoid) {
  std::vector<float> v(500);
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = static_cast<float>(1.0 + std::sin(2 * std::numbers::pi * 4.0 * 0.01 * static_cast<double>(i)));
  const PeakDetectParams p = auto_calibrate(series(v));
  EXPECT_GE(p.lookahead, 12u);
  EXPECT_LE(p.lookahead, 13u);
  std::vector<double> d(v.begin(), v.end());
  const std::size_t lag = oracle::autocorr_peak_lag(d, 10, 50);
  EXPECT_EQ(p.lookahead, static_cast<std::size_t>(std::lround(0.5 * static_cast<double>(lag))));
}

TEST(AutoCalibrate, RampDeltaFromPercentiles) {
  std::vector<float> v(1001);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<float>(i / 1000.0);
  EXPECT_NEAR(auto_calibrate(series(v)).delta, 0.09, 1e-4);
}

TEST(AutoCalibrate, NeedsFourSamples) {
  EXPECT_THROW(auto_calibrate(series({1, 2, 3})), Error);
}

TEST(PeaksToSyllables, TwoBumps) {
  const Series env = series({0, 1, 0, 1, 0});
  const SyllableSet s = peaks_to_syllables(env, {{1, 3}, {2}});
  ASSERT_EQ(s.size(), 2u);
  EXPECT_NEAR(s.syllables[0].onset_s, 0.00, 1e-12);
  EXPECT_NEAR(s.syllables[0].nucleus_s, 0.01, 1e-12);
  EXPECT_NEAR(s.syllables[0].offset_s, 0.02, 1e-12);
  EXPECT_NEAR(s.syllables[1].onset_s, 0.02, 1e-12);
  EXPECT_NEAR(s.syllables[1].nucleus_s, 0.03, 1e-12);
  EXPECT_NEAR(s.syllables[1].offset_s, 0.04, 1e-12);
  EXPECT_EQ(validate(s), "");
}

TEST(PeaksToSyllables, SingleBumpSpansItsMinima) {
  const Series env = series({0.3f, 0.1f, 0.4f, 0.9f, 0.5f, 0.05f, 0.2f});
  const SyllableSet s = peaks_to_syllables(env, {{3}, {}});
  ASSERT_EQ(s.size(), 1u);
  EXPECT_NEAR(s.syllables[0].onset_s, 0.01, 1e-12);
  EXPECT_NEAR(s.syllables[0].offset_s, 0.05, 1e-12);
}

TEST(PeaksToSyllables, NoMaximaIsEmpty) {
  EXPECT_TRUE(peaks_to_syllables(series({0, 0, 0}), {}).empty());
}

TEST(GreedyCosine, ConstantInputIsOneSegment) {
  FeatureMatrix f(10, 3, 0.02, 0.01, "x");
  std::fill(f.data.begin(), f.data.end(), 0.5f);
  const SyllableSet s = greedy_cosine_segment(f);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_NEAR(s.syllables[0].onset_s, 0.0, 1e-12);
  EXPECT_NEAR(s.syllables[0].offset_s, 0.2, 1e-12);
}

TEST(GreedyCosine, ZeroInputIsEmpty) {
  EXPECT_TRUE(greedy_cosine_segment(FeatureMatrix(10, 3, 0.02, 0.01, "x")).empty());
}

TEST(GreedyCosine, ThreeEqualBlocks) {
  const FeatureMatrix f = oracle::orthogonal_blocks({5, 5, 5}, 0.02, true);
  const SyllableSet s = greedy_cosine_segment(f);
  ASSERT_EQ(s.size(), 3u);
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(s.syllables[k].onset_s, 0.1 * k, 1e-12);
    EXPECT_NEAR(s.syllables[k].offset_s, 0.1 * (k + 1), 1e-12);
  }
}

TEST(GreedyCosine, QuietFramesEndSegments) {
  FeatureMatrix f(12, 2, 0.02, 0.01, "x");
  for (std::size_t t = 0; t < 12; ++t) f.at(t, 0) = (t == 5 || t == 6) ? 0.01f : 1.0f;
  const SyllableSet s = greedy_cosine_segment(f);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_NEAR(s.syllables[0].offset_s, 0.10, 1e-12);
  EXPECT_NEAR(s.syllables[1].onset_s, 0.14, 1e-12);
}

TEST(MinCut, ShortInputIsOneSegment) {
  const SyllableSet s = mincut_segment(blocks_ssm({5}, 0.02));
  ASSERT_EQ(s.size(), 1u);
  EXPECT_NEAR(s.syllables[0].onset_s, 0.0, 1e-12);
  EXPECT_NEAR(s.syllables[0].offset_s, 0.1, 1e-12);
}

TEST(MinCut, TwoBlocksSplitAtJoin) {
  // 12 frames at 0.22 / 6 s give K = 2 and a 6-frame window.
  const auto s = blocks_ssm({6, 6}, 0.22 / 6);
  const MinCutResult r = mincut_boundaries(s, 2, 2, 6);
  EXPECT_EQ(r.boundaries, (std::vector<std::size_t>{6}));
  const auto want = oracle::best_cut(s, 2, 2, 6);
  EXPECT_EQ(r.boundaries, want.boundaries);
  EXPECT_EQ(r.cost, want.cost);
  EXPECT_EQ(mincut_segment(s).size(), 2u);
}

TEST(MinCut, UniformTieTakesEarliest) {
  const auto s = blocks_ssm({12}, 0.22 / 6);
  const MinCutResult r = mincut_boundaries(s, 2, 2, 6);
  const auto want = oracle::best_cut(s, 2, 2, 6);
  EXPECT_EQ(r.boundaries, want.boundaries);
  EXPECT_EQ(r.cost, want.cost);
  for (std::size_t b = 2; b <= 10; ++b)
    EXPECT_GE(oracle::ncut(s, b, 6), r.cost) << "b=" << b;
}

TEST(MinCut, InfeasibleCountIsReduced) {
  const auto s = blocks_ssm({7}, 0.02);
  const MinCutResult r = mincut_boundaries(s, 5, 3, 4);
  EXPECT_EQ(r.boundaries.size(), 1u);  // 7 / 3 = 2 segments
}

TEST(MinCut, MatchesExhaustiveOracle) {
  const auto o = criteria::mincut_oracle(21);
  EXPECT_TRUE(o.pass) << o.detail;
}

TEST(Threshold, SinglePlateau) {
  // Half the frames are high so the 0.6 quantile lands on the plateau.
  std::vector<float> v(40, 0.1f);
  for (int t = 10; t < 30; ++t) v[t] = 1.0f;
  const SyllableSet s = threshold_segment(series(v));
  ASSERT_EQ(s.size(), 1u);
  EXPECT_NEAR(s.syllables[0].onset_s, 0.095, 1e-12);
  EXPECT_NEAR(s.syllables[0].offset_s, 0.295, 1e-12);
}

TEST(Threshold, ConstantTraceIsOneFullSegment) {
  const SyllableSet s = threshold_segment(series(std::vector<float>(20, 0.4f), 0.01, 0.005));
  ASSERT_EQ(s.size(), 1u);
  EXPECT_NEAR(s.syllables[0].onset_s, 0.0, 1e-12);
  EXPECT_NEAR(s.syllables[0].offset_s, 0.2, 1e-12);
}

TEST(Threshold, ShortDipMerges) {
  std::vector<float> v(40, 0.0f);
  for (int t = 5; t < 15; ++t) v[t] = 1.0f;
  for (int t = 16; t < 26; ++t) v[t] = 1.0f;  // 10 ms dip at frame 15
  EXPECT_EQ(threshold_segment(series(v)).size(), 1u);
  v[16] = 0.0f;  // 20 ms dip no longer merges
  EXPECT_EQ(threshold_segment(series(v)).size(), 2u);
}

TEST(Threshold, ShortRunsDropped) {
  std::vector<float> v(40, 0.0f);
  for (int t = 5; t < 8; ++t) v[t] = 1.0f;  // 30 ms
  for (int t = 20; t < 30; ++t) v[t] = 1.0f;
  EXPECT_EQ(threshold_segment(series(v)).size(), 1u);
}

TEST(DeriveNucleus, ArgmaxInsideInterval) {
  EXPECT_NEAR(derive_nucleus(0.0, 0.03, series({0.1f, 0.9f, 0.3f})), 0.01, 1e-12);
}

TEST(DeriveNucleus, TiesTakeFirstFrame) {
  EXPECT_NEAR(derive_nucleus(0.015, 0.08, series(std::vector<float>(10, 1.0f))), 0.02, 1e-12);
}

TEST(DeriveNucleus, NarrowIntervalFallsBackToMidpoint) {
  EXPECT_NEAR(derive_nucleus(0.012, 0.018, series(std::vector<float>(10, 1.0f))), 0.015, 1e-12);
}

TEST(Segmenters, RandomOutputsSatisfyInvariants) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<float> v(20 + rng() % 200);
    for (float& x : v) x = u(rng);
    const Series s = series(v, 0.01, 0.0125);
    const double dur = s.time_of(v.size() - 1) + 0.0125;
    const auto pk = peaks_to_syllables(s, peakdetect(s, auto_calibrate(s)), dur);
    EXPECT_EQ(validate(pk), "") << trial;
    EXPECT_EQ(validate(threshold_segment(s, {}, dur)), "") << trial;
    FeatureMatrix f(v.size() / 2, 3, 0.02, 0.0125, "x");
    for (float& x : f.data) x = u(rng) - 0.3f;
    EXPECT_EQ(validate(greedy_cosine_segment(f, {}, dur)), "") << trial;
    EXPECT_EQ(validate(mincut_segment(ssm(f), {}, dur)), "") << trial;
  }
}
