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

// FSF1 binary feature files.
//
// Layout (all little-endian):
//   0   char[4]  magic "FSF1"
//   4   u32      version (1)
//   8   f64      frame_period_s
//   16  f64      start_time_s
//   24  u32      dims
//   28  u64      frames
//   36  u32      metadata_len
//   40  u8[metadata_len]  UTF-8 JSON object (source_tag, ...)
//   ..  f32[frames * dims] row-major payload

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "sylkit/error.hpp"
#include "sylkit/types.hpp"

namespace sylkit {

inline constexpr char kFsfMagic[4] = {'F', 'S', 'F', '1'};
inline constexpr std::uint32_t kFsfVersion = 1;
inline constexpr std::size_t kFsfFixedHeader = 40;

struct FeatureFile {
  FeatureMatrix matrix;
  nlohmann::json metadata = nlohmann::json::object();
};

namespace fsf_detail {

template <typename T>
void put(std::vector<unsigned char>& out, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char raw[sizeof(T)];
  std::memcpy(raw, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(raw, raw + sizeof(T));
  out.insert(out.end(), raw, raw + sizeof(T));
}

template <typename T>
T get(const unsigned char* p) {
  unsigned char raw[sizeof(T)];
  std::memcpy(raw, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(raw, raw + sizeof(T));
  T v;
  std::memcpy(&v, raw, sizeof(T));
  return v;
}

}  // namespace fsf_detail

inline std::vector<unsigned char> encode_feature_file(
    const FeatureMatrix& m, const nlohmann::json& extra = nlohmann::json::object()) {
  using fsf_detail::put;
  if (m.data.size() != m.frames * m.dims)
    fail(ErrorCode::kInvalidArgument, "feature matrix shape does not match data size");
  for (float v : m.data)
    if (!std::isfinite(v)) fail(ErrorCode::kNonFinite, "non-finite value in feature matrix");
  if (!std::isfinite(m.frame_period_s) || !std::isfinite(m.start_time_s))
    fail(ErrorCode::kNonFinite, "non-finite time base");

  nlohmann::json meta = extra.is_object() ? extra : nlohmann::json::object();
  meta["source_tag"] = m.source_tag;
  const std::string meta_text = meta.dump();

  std::vector<unsigned char> out;
  out.reserve(kFsfFixedHeader + meta_text.size() + m.data.size() * 4);
  out.insert(out.end(), kFsfMagic, kFsfMagic + 4);
  put<std::uint32_t>(out, kFsfVersion);
  put<double>(out, m.frame_period_s);
  put<double>(out, m.start_time_s);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(m.dims));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(m.frames));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(meta_text.size()));
  out.insert(out.end(), meta_text.begin(), meta_text.end());
  for (float v : m.data) put<float>(out, v);
  return out;
}

inline FeatureFile decode_feature_file(std::span<const unsigned char> bytes) {
  using fsf_detail::get;
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kFsfMagic, 4) != 0)
    fail(ErrorCode::kBadMagic, "bad magic");
  if (bytes.size() < kFsfFixedHeader) fail(ErrorCode::kTruncated, "truncated header");
  const auto version = get<std::uint32_t>(bytes.data() + 4);
  if (version != kFsfVersion)
    fail(ErrorCode::kVersionMismatch, "unsupported version " + std::to_string(version));
  FeatureFile f;
  FeatureMatrix& m = f.matrix;
  m.frame_period_s = get<double>(bytes.data() + 8);
  m.start_time_s = get<double>(bytes.data() + 16);
  m.dims = get<std::uint32_t>(bytes.data() + 24);
  m.frames = static_cast<std::size_t>(get<std::uint64_t>(bytes.data() + 28));
  const std::size_t meta_len = get<std::uint32_t>(bytes.data() + 36);
  if (bytes.size() - kFsfFixedHeader < meta_len)
    fail(ErrorCode::kTruncated, "truncated metadata");
  const std::size_t payload_off = kFsfFixedHeader + meta_len;
  const std::size_t count = m.frames * m.dims;
  if (m.dims != 0 && count / m.dims != m.frames)
    fail(ErrorCode::kTruncated, "frame count overflows");
  if ((bytes.size() - payload_off) / 4 < count)
    fail(ErrorCode::kTruncated, "truncated payload");
  if (meta_len > 0) {
    const std::string text(reinterpret_cast<const char*>(bytes.data() + kFsfFixedHeader),
                           meta_len);
    f.metadata = nlohmann::json::parse(text, nullptr, false);
    if (f.metadata.is_discarded() || !f.metadata.is_object())
      fail(ErrorCode::kParseError, "metadata is not a JSON object");
    if (f.metadata.contains("source_tag") && f.metadata["source_tag"].is_string())
      m.source_tag = f.metadata["source_tag"].get<std::string>();
  }
  m.data.resize(count);
  for (std::size_t i = 0; i < count; ++i)
    m.data[i] = get<float>(bytes.data() + payload_off + 4 * i);
  return f;
}

inline void write_feature_file(const std::filesystem::path& path, const FeatureMatrix& m,
                               const nlohmann::json& extra = nlohmann::json::object()) {
  const auto bytes = encode_feature_file(m, extra);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kUnreadableFile, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

inline FeatureFile read_feature_file_with_metadata(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kUnreadableFile, "cannot open " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  return decode_feature_file(bytes);
}

inline FeatureMatrix read_feature_file(const std::filesystem::path& path) {
  return read_feature_file_with_metadata(path).matrix;
}

// Checks the invariants a producer (e.g. an SSL extractor sidecar) must meet
// beyond parseability. Returns the list of violations; empty means valid.
inline std::vector<std::string> validate_feature_file(const std::filesystem::path& path) {
  std::vector<std::string> problems;
  FeatureFile f;
  try {
    f = read_feature_file_with_metadata(path);
  } catch (const Error& e) {
    problems.emplace_back(e.what());
    return problems;
  }
  const FeatureMatrix& m = f.matrix;
  if (m.frames < 1) problems.emplace_back("no frames");
  if (m.dims < 1) problems.emplace_back("zero dims");
  if (!(m.frame_period_s > 0.0) || !std::isfinite(m.frame_period_s))
    problems.emplace_back("frame_period_s must be positive");
  if (!std::isfinite(m.start_time_s)) problems.emplace_back("start_time_s not finite");
  for (float v : m.data)
    if (!std::isfinite(v)) {
      problems.emplace_back("non-finite payload value");
      break;
    }
  return problems;
}

inline FeatureMatrix to_feature_matrix(const Series& s) {
  FeatureMatrix m(s.values.size(), 1, s.frame_period_s, s.start_time_s,
                  std::string(to_string(s.kind)));
  m.data = s.values;
  return m;
}

inline Series series_from_feature_matrix(const FeatureMatrix& m, CueKind kind) {
  if (m.dims != 1)
    fail(ErrorCode::kInvalidArgument,
         "a 1-D cue needs dims = 1, got " + std::to_string(m.dims));
  Series s;
  s.values = m.data;
  s.frame_period_s = m.frame_period_s;
  s.start_time_s = m.start_time_s;
  s.kind = kind;
  return s;
}

}  // namespace sylkit
