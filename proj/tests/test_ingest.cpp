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
#include <cstring>
#include <fstream>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sylkit/sylkit.hpp"
#include "test_support.hpp"

using namespace sylkit;
using testing_support::TempDir;

namespace {

WavData make_wav(std::vector<double> interleaved, int channels, int rate,
                 WavEncoding enc = WavEncoding::kPcm16) {
  WavData w;
  w.interleaved = std::move(interleaved);
  w.channels = channels;
  w.sample_rate = rate;
  w.encoding = enc;
  return w;
}

std::vector<double> sine(double freq, double rate, std::size_t n, double amp = 0.5) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = amp * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / rate);
  return x;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kInvalidArgument;
}

const char* kThreeSyllables = R"(File type = "ooTextFile"
Object class = "TextGrid"

xmin = 0
xmax = 1.0
tiers? <exists>
size = 2
item []:
    item [1]:
        class = "IntervalTier"
        name = "syllables"
        xmin = 0
        xmax = 1.0
        intervals: size = 5
        intervals [1]:
            xmin = 0
            xmax = 0.1
            text = ""
        intervals [2]:
            xmin = 0.1
            xmax = 0.25
            text = "ka"
        intervals [3]:
            xmin = 0.25
            xmax = 0.48
            text = "ta"
        intervals [4]:
            xmin = 0.48
            xmax = 0.80
            text = "na"
        intervals [5]:
            xmin = 0.80
            xmax = 1.0
            text = "sil"
    item [2]:
        class = "TextTier"
        name = "events"
        xmin = 0
        xmax = 1.0
        points: size = 1
        points [1]:
            number = 0.5
            mark = "x"
)";

}  // namespace

// --- audio -----------------------------------------------------------------

TEST(Audio, OneSecondMonoIsIdentityPath) {
  const auto wav = make_wav(sine(440, 16000, 16000), 1, 16000);
  const AudioBuffer a = to_audio_buffer(decode_wav(encode_wav(wav)));
  EXPECT_EQ(a.samples.size(), 16000u);
  EXPECT_DOUBLE_EQ(a.duration_s(), 1.0);
  EXPECT_EQ(a.sample_rate, 16000.0);
}

TEST(Audio, StereoDownsampleLengthAndShape) {
  const std::size_t n = 4801;
  std::vector<double> inter(2 * n);
  const auto left = sine(700, 48000, n, 0.4);
  const auto right = sine(700, 48000, n, 0.2);
  for (std::size_t i = 0; i < n; ++i) {
    inter[2 * i] = left[i];
    inter[2 * i + 1] = right[i];
  }
  const auto wav = make_wav(inter, 2, 48000, WavEncoding::kFloat32);
  const AudioBuffer a = to_audio_buffer(decode_wav(encode_wav(wav)));
  ASSERT_EQ(a.samples.size(), static_cast<std::size_t>(std::llround(n * 16000.0 / 48000.0)));

  std::vector<double> mono(n);
  for (std::size_t i = 0; i < n; ++i) mono[i] = 0.5 * (left[i] + right[i]);
  auto ref = oracle::naive_resample(mono, 48000, 16000);
  ASSERT_EQ(ref.size(), a.samples.size());
  double peak = 0.0;
  for (double v : ref) peak = std::max(peak, std::abs(v));
  for (double& v : ref) v *= 0.95 / peak;
  // Away from the edges both band-limited interpolators agree closely.
  for (std::size_t i = 100; i + 100 < ref.size(); ++i)
    EXPECT_NEAR(a.samples[i], ref[i], 0.01) << i;
}

TEST(Audio, ResamplerKeepsToneFrequency) {
  const std::size_t n = 44100;
  const auto wav = make_wav(sine(1000, 44100, n), 1, 44100, WavEncoding::kPcm24);
  const AudioBuffer a = to_audio_buffer(decode_wav(encode_wav(wav)));
  std::vector<double> head(a.samples.begin(), a.samples.begin() + 1600);
  // 1600 samples at 16 kHz: bin spacing 10 Hz, 1 kHz is bin 100.
  const auto bin = oracle::dominant_bin(head);
  EXPECT_LE(std::abs(static_cast<long>(bin) - 100), 1);
}

TEST(Audio, PeakNormalizedTo095AndSilenceUntouched) {
  const auto loud = to_audio_buffer(make_wav(sine(200, 16000, 800, 0.3), 1, 16000));
  double peak = 0.0;
  for (double v : loud.samples) peak = std::max(peak, std::abs(v));
  EXPECT_NEAR(peak, 0.95, 1e-12);

  std::vector<double> quiet(800, 0.0);
  quiet[10] = 5e-7;
  const auto q = to_audio_buffer(make_wav(quiet, 1, 16000));
  EXPECT_DOUBLE_EQ(q.samples[10], 5e-7);
}

TEST(Audio, EmptyAudioIsDistinctError) {
  const auto bytes = encode_wav(make_wav({}, 1, 16000));
  try {
    to_audio_buffer(decode_wav(bytes));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyAudio);
    EXPECT_NE(std::string(e.what()).find("empty audio"), std::string::npos);
  }
}

TEST(Audio, UnreadableAndUnsupportedAreDistinct) {
  TempDir dir;
  EXPECT_EQ(code_of([&] { load_audio(dir / "missing.wav"); }), ErrorCode::kUnreadableFile);
  const std::vector<unsigned char> junk = {'n', 'o', 'p', 'e'};
  EXPECT_EQ(code_of([&] { decode_wav(junk); }), ErrorCode::kUnreadableFile);

  auto bytes = encode_wav(make_wav(sine(100, 16000, 100), 1, 16000));
  bytes[20] = 2;  // format tag: ADPCM
  EXPECT_EQ(code_of([&] { decode_wav(bytes); }), ErrorCode::kUnsupportedEncoding);

  auto three = encode_wav(make_wav(std::vector<double>(300, 0.1), 3, 16000));
  EXPECT_EQ(code_of([&] { decode_wav(three); }), ErrorCode::kUnsupportedEncoding);
}

TEST(Audio, EncodingsRoundTrip) {
  const auto x = sine(300, 16000, 256, 0.7);
  for (auto enc : {WavEncoding::kPcm16, WavEncoding::kPcm24, WavEncoding::kFloat32}) {
    const auto back = decode_wav(encode_wav(make_wav(x, 1, 16000, enc)));
    ASSERT_EQ(back.interleaved.size(), x.size());
    const double tol = enc == WavEncoding::kPcm16 ? 1.0 / 32768 : enc == WavEncoding::kPcm24 ? 1e-6 : 1e-7;
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(back.interleaved[i], x[i], tol);
  }
}

TEST(Audio, OutputInvariantsOverRandomInputs) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rate : {8000, 11025, 22050, 44100, 48000}) {
    std::vector<double> x(static_cast<std::size_t>(rate / 20));
    for (double& v : x) v = u(rng);
    const auto a = to_audio_buffer(make_wav(x, 1, rate, WavEncoding::kFloat32));
    EXPECT_EQ(a.sample_rate, 16000.0);
    EXPECT_EQ(a.samples.size(),
              static_cast<std::size_t>(std::llround(x.size() * 16000.0 / rate)));
    for (double v : a.samples) EXPECT_LE(std::abs(v), 1.0);
  }
}

// --- TextGrid --------------------------------------------------------------

TEST(TextGrid, SilenceExcluded) {
  const std::string text = R"(File type = "ooTextFile"
Object class = "TextGrid"
xmin = 0
xmax = 0.5
tiers? <exists>
size = 1
item []:
    item [1]:
        class = "IntervalTier"
        name = "syllables"
        xmin = 0
        xmax = 0.5
        intervals: size = 2
        intervals [1]:
            xmin = 0.0
            xmax = 0.3
            text = "ba"
        intervals [2]:
            xmin = 0.3
            xmax = 0.5
            text = ""
)";
  const auto tier = parse_textgrid_text(text, "syllables");
  ASSERT_EQ(tier.intervals.size(), 1u);
  EXPECT_DOUBLE_EQ(tier.intervals[0].onset_s, 0.0);
  EXPECT_DOUBLE_EQ(tier.intervals[0].offset_s, 0.3);
  EXPECT_EQ(tier.intervals[0].label, "ba");
  EXPECT_DOUBLE_EQ(tier.file_duration_s, 0.5);
}

TEST(TextGrid, ThreeSortedIntervals) {
  const auto tier = parse_textgrid_text(kThreeSyllables, "syllables");
  ASSERT_EQ(tier.intervals.size(), 3u);
  EXPECT_DOUBLE_EQ(tier.intervals[0].onset_s, 0.1);
  EXPECT_DOUBLE_EQ(tier.intervals[1].onset_s, 0.25);
  EXPECT_DOUBLE_EQ(tier.intervals[2].offset_s, 0.80);
}

TEST(TextGrid, TierLookup) {
  EXPECT_EQ(parse_textgrid_text(kThreeSyllables, "SYLLABLES").intervals.size(), 3u);
  try {
    parse_textgrid_text(kThreeSyllables, "words");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTierNotFound);
    EXPECT_STREQ(e.what(), "tier not found: words");
  }
  EXPECT_EQ(code_of([] { parse_textgrid_text(kThreeSyllables, "events"); }), ErrorCode::kPointTier);
}

TEST(TextGrid, MalformedTimeReportsLine) {
  std::string bad = kThreeSyllables;
  bad.replace(bad.find("xmax = 0.25"), 11, "xmax = 0.2x");
  try {
    parse_textgrid_text(bad, "syllables");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_NE(std::string(e.what()).find("line 21"), std::string::npos) << e.what();
  }
}

TEST(TextGrid, ShortFormatRejected) {
  const std::string short_fmt =
      "File type = \"ooTextFile\"\nObject class = \"TextGrid\"\n\n0\n1\n<exists>\n1\n"
      "\"IntervalTier\"\n\"syl\"\n0\n1\n1\n0\n1\n\"a\"\n";
  EXPECT_EQ(code_of([&] { parse_textgrid_text(short_fmt, "syl"); }), ErrorCode::kParseError);
}

TEST(TextGrid, Utf16WithBom) {
  const std::string utf8 = kThreeSyllables;
  std::string utf16 = "\xFF\xFE";
  for (char c : utf8) {
    utf16.push_back(c);
    utf16.push_back('\0');
  }
  EXPECT_EQ(parse_textgrid_text(utf16, "syllables").intervals.size(), 3u);
}

TEST(TextGrid, NearCoincidentBoundariesMerge) {
  AnnotationTier t{"syl", {{0.1, 0.2996, "a"}, {0.3004, 0.5, "b"}}, 1.0};
  const auto parsed = parse_textgrid_text(serialize_textgrid({t}), "syl");
  ASSERT_EQ(parsed.intervals.size(), 2u);
  EXPECT_NEAR(parsed.intervals[0].offset_s, 0.3, 1e-12);
  EXPECT_NEAR(parsed.intervals[1].onset_s, 0.3, 1e-12);
}

TEST(TextGrid, ParseSerializeParseFixedPoint) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> gap(0.0, 0.2), len(0.002, 0.4);
  for (int trial = 0; trial < 100; ++trial) {
    AnnotationTier t{"syllables", {}, 0.0};
    double cur = gap(rng);
    for (int k = 0; k < 12; ++k) {
      const double on = cur, off = cur + len(rng);
      t.intervals.push_back({on, off, "s" + std::to_string(k) + (k % 3 ? "" : " \"q\"")});
      cur = off + (k % 2 ? 0.0 : gap(rng));
    }
    t.file_duration_s = cur + gap(rng) + 0.01;
    const auto first = parse_textgrid_text(serialize_textgrid({t}), "syllables");
    const auto second = parse_textgrid_text(serialize_textgrid({first}), "syllables");
    ASSERT_EQ(first.intervals.size(), second.intervals.size());
    EXPECT_EQ(first.file_duration_s, second.file_duration_s);
    for (std::size_t i = 0; i < first.intervals.size(); ++i) {
      EXPECT_EQ(first.intervals[i].onset_s, second.intervals[i].onset_s);
      EXPECT_EQ(first.intervals[i].offset_s, second.intervals[i].offset_s);
      EXPECT_EQ(first.intervals[i].label, second.intervals[i].label);
    }
  }
}

// --- FSF1 ------------------------------------------------------------------

TEST(FeatureFile, SmallRoundTrip) {
  TempDir dir;
  FeatureMatrix m(3, 2, 0.02, 0.01, "mfcc");
  const float vals[] = {1, 2, 3, 4, 5, 6};
  std::copy(std::begin(vals), std::end(vals), m.data.begin());
  write_feature_file(dir / "m.fsf", m, {{"layer", 8}});
  const FeatureFile back = read_feature_file_with_metadata(dir / "m.fsf");
  EXPECT_EQ(back.matrix.frames, 3u);
  EXPECT_EQ(back.matrix.dims, 2u);
  EXPECT_EQ(back.matrix.frame_period_s, 0.02);
  EXPECT_EQ(back.matrix.start_time_s, 0.01);
  EXPECT_EQ(back.matrix.source_tag, "mfcc");
  EXPECT_EQ(back.metadata.at("layer"), 8);
  EXPECT_EQ(back.matrix.data, m.data);
}

TEST(FeatureFile, SizeArithmetic) {
  FeatureMatrix m(50, 768, 0.02, 0.01, "hubert");
  const auto bytes = encode_feature_file(m);
  std::uint32_t meta_len = 0;
  std::memcpy(&meta_len, bytes.data() + 36, 4);
  EXPECT_EQ(bytes.size(), kFsfFixedHeader + meta_len + 50u * 768u * 4u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "FSF1");
}

TEST(FeatureFile, Errors) {
  FeatureMatrix m(2, 2, 0.01, 0.0, "x");
  auto bytes = encode_feature_file(m);
  auto bad = bytes;
  std::memcpy(bad.data(), "XXXX", 4);
  try {
    decode_feature_file(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBadMagic);
    EXPECT_STREQ(e.what(), "bad magic");
  }
  auto ver = bytes;
  ver[4] = 2;
  EXPECT_EQ(code_of([&] { decode_feature_file(ver); }), ErrorCode::kVersionMismatch);
  auto cut = bytes;
  cut.pop_back();
  EXPECT_EQ(code_of([&] { decode_feature_file(cut); }), ErrorCode::kTruncated);
  m.at(1, 1) = std::numeric_limits<float>::quiet_NaN();
  EXPECT_EQ(code_of([&] { encode_feature_file(m); }), ErrorCode::kNonFinite);
  m.at(1, 1) = std::numeric_limits<float>::infinity();
  EXPECT_EQ(code_of([&] { encode_feature_file(m); }), ErrorCode::kNonFinite);
}

TEST(FeatureFile, PayloadBitExact) {
  std::mt19937 rng(3);
  FeatureMatrix m(37, 5, 0.02, 0.0125, "rand");
  for (float& v : m.data) {
    std::uint32_t bits = rng();
    // Keep values finite by clearing the top exponent bit pattern 0xFF.
    if (((bits >> 23) & 0xFF) == 0xFF) bits &= ~(1u << 30);
    std::memcpy(&v, &bits, 4);
  }
  const auto bytes = encode_feature_file(m);
  const auto back = decode_feature_file(bytes).matrix;
  ASSERT_EQ(back.data.size(), m.data.size());
  EXPECT_EQ(std::memcmp(back.data.data(), m.data.data(), m.data.size() * 4), 0);
  EXPECT_EQ(encode_feature_file(back), bytes);
}

TEST(FeatureFile, ValidatorAcceptsAndRejects) {
  TempDir dir;
  write_feature_file(dir / "ok.fsf", FeatureMatrix(4, 3, 0.02, 0.01, "x"));
  EXPECT_TRUE(validate_feature_file(dir / "ok.fsf").empty());
  write_text(dir / "bad.fsf", "FSF1garbage");
  EXPECT_FALSE(validate_feature_file(dir / "bad.fsf").empty());
}
