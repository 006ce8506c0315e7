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

// WAV decoding/encoding, resampling to 16 kHz and peak normalisation.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "sylkit/dsp.hpp"
#include "sylkit/error.hpp"
#include "sylkit/types.hpp"

namespace sylkit {

enum class WavEncoding { kPcm16, kPcm24, kFloat32 };

// Interleaved samples as read from disk, scaled to [-1, 1].
struct WavData {
  std::vector<double> interleaved;
  int channels = 1;
  int sample_rate = 16000;
  WavEncoding encoding = WavEncoding::kPcm16;

  std::size_t frames() const {
    return channels > 0 ? interleaved.size() / static_cast<std::size_t>(channels)
                        : 0;
  }
};

namespace detail {

inline std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
inline std::uint32_t le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::vector<unsigned char> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kUnreadableFile, "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorCode::kUnreadableFile, "read failed: " + path.string());
  return bytes;
}

inline void put16(std::vector<unsigned char>& b, std::uint32_t v) {
  b.push_back(static_cast<unsigned char>(v & 0xff));
  b.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
}
inline void put32(std::vector<unsigned char>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i)
    b.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
}

}  // namespace detail

inline WavData decode_wav(std::span<const unsigned char> bytes,
                          const std::string& name = "<memory>") {
  using detail::le16;
  using detail::le32;
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    fail(ErrorCode::kUnreadableFile, name + ": not a RIFF/WAVE file");

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0, block_align = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* hdr = bytes.data() + pos;
    const std::uint32_t len = le32(hdr + 4);
    const std::size_t body = pos + 8;
    const std::size_t avail = bytes.size() - body;
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (len < 16 || avail < 16)
        fail(ErrorCode::kUnreadableFile, name + ": truncated fmt chunk");
      const unsigned char* f = bytes.data() + body;
      format = le16(f);
      channels = le16(f + 2);
      rate = le32(f + 4);
      block_align = le16(f + 12);
      bits = le16(f + 14);
      if (format == 0xFFFE) {
        if (len < 40 || avail < 40)
          fail(ErrorCode::kUnreadableFile, name + ": truncated extensible fmt");
        format = le16(f + 24);  // first two bytes of the subformat GUID
      }
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      data = bytes.data() + body;
      // Streaming writers sometimes leave the size field unset; use what is
      // actually present.
      data_len = std::min<std::size_t>(len, avail);
      if (have_fmt) break;
    }
    pos = body + len + (len & 1u);
  }
  if (!have_fmt) fail(ErrorCode::kUnreadableFile, name + ": missing fmt chunk");
  if (data == nullptr) fail(ErrorCode::kUnreadableFile, name + ": missing data chunk");

  WavData out;
  if (format == 1 && bits == 16) {
    out.encoding = WavEncoding::kPcm16;
  } else if (format == 1 && bits == 24) {
    out.encoding = WavEncoding::kPcm24;
  } else if (format == 3 && bits == 32) {
    out.encoding = WavEncoding::kFloat32;
  } else {
    fail(ErrorCode::kUnsupportedEncoding,
         name + ": unsupported encoding (format " + std::to_string(format) +
             ", " + std::to_string(bits) + " bits)");
  }
  if (channels < 1 || channels > 2)
    fail(ErrorCode::kUnsupportedEncoding,
         name + ": unsupported channel count " + std::to_string(channels));
  if (rate == 0) fail(ErrorCode::kUnsupportedEncoding, name + ": zero sample rate");
  const std::size_t width = bits / 8u;
  if (block_align != width * channels)
    fail(ErrorCode::kUnsupportedEncoding, name + ": inconsistent block alignment");

  out.channels = channels;
  out.sample_rate = static_cast<int>(rate);
  const std::size_t count = (data_len / block_align) * channels;
  out.interleaved.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const unsigned char* p = data + i * width;
    switch (out.encoding) {
      case WavEncoding::kPcm16:
        out.interleaved[i] = static_cast<std::int16_t>(le16(p)) / 32768.0;
        break;
      case WavEncoding::kPcm24: {
        std::int32_t v = static_cast<std::int32_t>(
            static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
            (static_cast<std::uint32_t>(p[2]) << 16));
        if (v & 0x800000) v -= 0x1000000;
        out.interleaved[i] = v / 8388608.0;
        break;
      }
      case WavEncoding::kFloat32: {
        const std::uint32_t u = le32(p);
        float f;
        std::memcpy(&f, &u, sizeof f);
        out.interleaved[i] = f;
        break;
      }
    }
  }
  return out;
}

inline WavData read_wav(const std::filesystem::path& path) {
  const auto bytes = detail::read_all(path);
  return decode_wav(bytes, path.string());
}

inline std::vector<unsigned char> encode_wav(const WavData& wav) {
  const std::uint32_t width = wav.encoding == WavEncoding::kPcm16   ? 2
                              : wav.encoding == WavEncoding::kPcm24 ? 3
                                                                    : 4;
  const auto data_len = static_cast<std::uint32_t>(wav.interleaved.size() * width);
  std::vector<unsigned char> b;
  b.reserve(44 + data_len);
  b.insert(b.end(), {'R', 'I', 'F', 'F'});
  detail::put32(b, 36 + data_len);
  b.insert(b.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  detail::put32(b, 16);
  detail::put16(b, wav.encoding == WavEncoding::kFloat32 ? 3 : 1);
  detail::put16(b, static_cast<std::uint32_t>(wav.channels));
  detail::put32(b, static_cast<std::uint32_t>(wav.sample_rate));
  detail::put32(b, static_cast<std::uint32_t>(wav.sample_rate) * width *
                       static_cast<std::uint32_t>(wav.channels));
  detail::put16(b, width * static_cast<std::uint32_t>(wav.channels));
  detail::put16(b, width * 8);
  b.insert(b.end(), {'d', 'a', 't', 'a'});
  detail::put32(b, data_len);
  for (double v : wav.interleaved) {
    const double c = std::clamp(v, -1.0, 1.0);
    switch (wav.encoding) {
      case WavEncoding::kPcm16:
        detail::put16(b, static_cast<std::uint16_t>(static_cast<std::int16_t>(
                             std::lround(std::clamp(c * 32768.0, -32768.0, 32767.0)))));
        break;
      case WavEncoding::kPcm24: {
        const auto s = static_cast<std::int32_t>(
            std::lround(std::clamp(c * 8388608.0, -8388608.0, 8388607.0)));
        const auto u = static_cast<std::uint32_t>(s);
        b.push_back(static_cast<unsigned char>(u & 0xff));
        b.push_back(static_cast<unsigned char>((u >> 8) & 0xff));
        b.push_back(static_cast<unsigned char>((u >> 16) & 0xff));
        break;
      }
      case WavEncoding::kFloat32: {
        const auto f = static_cast<float>(v);
        std::uint32_t u;
        std::memcpy(&u, &f, sizeof u);
        detail::put32(b, u);
        break;
      }
    }
  }
  return b;
}

inline void write_wav(const std::filesystem::path& path, const WavData& wav) {
  const auto bytes = encode_wav(wav);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kUnreadableFile, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

// Polyphase windowed-sinc resampler: 64 taps per phase, Kaiser window
// (beta = 8), cutoff at the lower of the two Nyquist rates.
class Resampler {
 public:
  static constexpr int kTaps = 64;
  static constexpr double kBeta = 8.0;

  Resampler(long in_rate, long out_rate) {
    if (in_rate <= 0 || out_rate <= 0)
      fail(ErrorCode::kInvalidArgument, "sample rates must be positive");
    const long g = std::gcd(in_rate, out_rate);
    up_ = out_rate / g;
    down_ = in_rate / g;
    const double scale = std::min(1.0, static_cast<double>(out_rate) /
                                           static_cast<double>(in_rate));
    constexpr int half = kTaps / 2;
    table_.resize(static_cast<std::size_t>(up_) * kTaps);
    for (long phase = 0; phase < up_; ++phase) {
      const double frac = static_cast<double>(phase) / static_cast<double>(up_);
      double* h = &table_[static_cast<std::size_t>(phase) * kTaps];
      for (int m = 0; m < kTaps; ++m) {
        const double d = frac - static_cast<double>(m - (half - 1));
        h[m] = scale * dsp::sinc(scale * d) * dsp::kaiser(d / half, kBeta);
      }
    }
  }

  std::size_t output_length(std::size_t n) const {
    const auto num = static_cast<unsigned long long>(n) *
                     static_cast<unsigned long long>(up_);
    const auto den = static_cast<unsigned long long>(down_);
    return static_cast<std::size_t>((2 * num + den) / (2 * den));
  }

  std::vector<double> process(std::span<const double> x) const {
    if (up_ == down_) return {x.begin(), x.end()};
    constexpr int half = kTaps / 2;
    const std::size_t out_len = output_length(x.size());
    std::vector<double> y(out_len, 0.0);
    const auto n_in = static_cast<long long>(x.size());
    for (std::size_t n = 0; n < out_len; ++n) {
      const long long pos = static_cast<long long>(n) * down_;
      const long long base = pos / up_;
      const long long phase = pos % up_;
      const double* h = &table_[static_cast<std::size_t>(phase) * kTaps];
      double acc = 0.0;
      for (int m = 0; m < kTaps; ++m) {
        const long long j = base + m - (half - 1);
        if (j >= 0 && j < n_in) acc += h[m] * x[static_cast<std::size_t>(j)];
      }
      y[n] = acc;
    }
    return y;
  }

 private:
  long up_ = 1;
  long down_ = 1;
  std::vector<double> table_;
};

inline constexpr double kPeakTarget = 0.95;
inline constexpr double kSilenceFloor = 1e-6;

// Scales so that max |x| == 0.95; near-silent input is returned unchanged.
inline void peak_normalize(std::vector<double>& x) {
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  if (peak < kSilenceFloor) return;
  const double g = kPeakTarget / peak;
  for (double& v : x) v *= g;
}

inline AudioBuffer to_audio_buffer(const WavData& wav) {
  const std::size_t frames = wav.frames();
  if (frames == 0) fail(ErrorCode::kEmptyAudio, "empty audio");
  std::vector<double> mono(frames);
  const auto ch = static_cast<std::size_t>(wav.channels);
  for (std::size_t i = 0; i < frames; ++i) {
    double s = 0.0;
    for (std::size_t c = 0; c < ch; ++c) s += wav.interleaved[i * ch + c];
    mono[i] = s / static_cast<double>(ch);
  }
  AudioBuffer out;
  if (wav.sample_rate != static_cast<int>(kSampleRate)) {
    Resampler r(wav.sample_rate, static_cast<long>(kSampleRate));
    out.samples = r.process(mono);
    if (out.samples.empty()) fail(ErrorCode::kEmptyAudio, "empty audio");
  } else {
    out.samples = std::move(mono);
  }
  peak_normalize(out.samples);
  return out;
}

inline AudioBuffer load_audio(const std::filesystem::path& path) {
  const WavData wav = read_wav(path);
  if (wav.frames() == 0) fail(ErrorCode::kEmptyAudio, "empty audio: " + path.string());
  return to_audio_buffer(wav);
}

}  // namespace sylkit
