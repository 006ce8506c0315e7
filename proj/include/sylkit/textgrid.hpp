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

// Praat TextGrid (long text format) reading and writing.

#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "sylkit/error.hpp"

namespace sylkit {

struct Interval {
  double onset_s = 0.0;
  double offset_s = 0.0;
  std::string label;
};

struct AnnotationTier {
  std::string name;
  std::vector<Interval> intervals;
  double file_duration_s = 0.0;
};

inline const std::set<std::string>& default_silence_labels() {
  static const std::set<std::string> labels = {"", "sil", "sp", "#", "<sil>"};
  return labels;
}

// Annotation boundaries closer than this are treated as one boundary.
inline constexpr double kBoundaryMergeEps = 0.001;

namespace textgrid_detail {

inline void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Returns UTF-8 text, honouring UTF-8 and UTF-16 (LE/BE) byte-order marks.
inline std::string decode_text(const std::string& raw) {
  const auto* b = reinterpret_cast<const unsigned char*>(raw.data());
  const std::size_t n = raw.size();
  if (n >= 3 && b[0] == 0xEF && b[1] == 0xBB && b[2] == 0xBF) return raw.substr(3);
  const bool le = n >= 2 && b[0] == 0xFF && b[1] == 0xFE;
  const bool be = n >= 2 && b[0] == 0xFE && b[1] == 0xFF;
  if (!le && !be) return raw;
  std::string out;
  out.reserve(n / 2);
  auto unit = [&](std::size_t i) -> std::uint32_t {
    return le ? (b[i] | (b[i + 1] << 8)) : ((b[i] << 8) | b[i + 1]);
  };
  for (std::size_t i = 2; i + 1 < n; i += 2) {
    std::uint32_t cp = unit(i);
    if (cp >= 0xD800 && cp < 0xDC00 && i + 3 < n) {
      const std::uint32_t lo = unit(i + 2);
      if (lo >= 0xDC00 && lo < 0xE000) {
        cp = 0x10000 + ((cp - 0xD800) << 10) + (lo - 0xDC00);
        i += 2;
      }
    }
    append_utf8(out, cp);
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

[[noreturn]] inline void parse_fail(std::size_t line, const std::string& what) {
  fail(ErrorCode::kParseError,
       "TextGrid parse error at line " + std::to_string(line) + ": " + what);
}

inline double parse_number(std::string_view s, std::size_t line) {
  s = trim(s);
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v))
    parse_fail(line, "malformed number '" + std::string(s) + "'");
  return v;
}

struct RawInterval {
  double xmin = 0.0, xmax = 0.0;
  std::string text;
  std::size_t line = 0;
  bool has_xmin = false, has_xmax = false;
};

struct RawTier {
  std::string klass;
  std::string name;
  std::vector<RawInterval> items;
  std::size_t line = 0;
};

struct RawGrid {
  double xmin = 0.0, xmax = 0.0;
  std::vector<RawTier> tiers;
};

// Reads a quoted string starting at `lines[i]` position `pos` (just after the
// opening quote); strings may span lines and use "" for a literal quote.
inline std::string read_quoted(const std::vector<std::string>& lines,
                               std::size_t& i, std::size_t pos) {
  std::string out;
  const std::size_t start_line = i;
  while (i < lines.size()) {
    const std::string& l = lines[i];
    while (pos < l.size()) {
      if (l[pos] == '"') {
        if (pos + 1 < l.size() && l[pos + 1] == '"') {
          out.push_back('"');
          pos += 2;
          continue;
        }
        return out;
      }
      out.push_back(l[pos++]);
    }
    out.push_back('\n');
    ++i;
    pos = 0;
  }
  parse_fail(start_line + 1, "unterminated string");
}

inline RawGrid parse_long_format(const std::string& text) {
  std::vector<std::string> lines;
  {
    std::string cur;
    std::istringstream in(text);
    while (std::getline(in, cur)) {
      if (!cur.empty() && cur.back() == '\r') cur.pop_back();
      lines.push_back(cur);
    }
  }
  std::size_t i = 0;
  auto skip_blank = [&] {
    while (i < lines.size() && trim(lines[i]).empty()) ++i;
  };
  skip_blank();
  if (i >= lines.size() || trim(lines[i]).find("ooTextFile") == std::string_view::npos)
    parse_fail(i + 1, "missing 'File type = \"ooTextFile\"' header");
  ++i;
  skip_blank();
  if (i >= lines.size() || trim(lines[i]).find("TextGrid") == std::string_view::npos)
    parse_fail(i + 1, "object class is not TextGrid");
  ++i;
  skip_blank();
  if (i < lines.size() && trim(lines[i]).rfind("xmin", 0) != 0)
    parse_fail(i + 1, "short TextGrid format is not supported (expected 'xmin = ...')");

  RawGrid grid;
  RawTier* tier = nullptr;
  RawInterval* item = nullptr;
  for (; i < lines.size(); ++i) {
    const std::string_view l = trim(lines[i]);
    if (l.empty()) continue;
    const std::size_t line_no = i + 1;
    if (l.rfind("item [", 0) == 0 && l.back() == ':') {
      if (l == "item []:") continue;
      grid.tiers.emplace_back();
      tier = &grid.tiers.back();
      tier->line = line_no;
      item = nullptr;
      continue;
    }
    if ((l.rfind("intervals [", 0) == 0 || l.rfind("points [", 0) == 0) &&
        l.back() == ':') {
      if (tier == nullptr) parse_fail(line_no, "interval outside of a tier");
      tier->items.emplace_back();
      item = &tier->items.back();
      item->line = line_no;
      continue;
    }
    const std::size_t eq = l.find('=');
    if (eq == std::string_view::npos) continue;  // "tiers? <exists>" etc.
    const std::string key(trim(l.substr(0, eq)));
    const std::string_view value = trim(l.substr(eq + 1));
    auto string_value = [&]() -> std::string {
      const std::size_t q = lines[i].find('"', lines[i].find('=') + 1);
      if (q == std::string::npos) parse_fail(line_no, "expected a quoted string");
      return read_quoted(lines, i, q + 1);
    };
    if (key == "class") {
      if (tier == nullptr) parse_fail(line_no, "class outside of a tier");
      tier->klass = string_value();
    } else if (key == "name") {
      if (tier == nullptr) parse_fail(line_no, "name outside of a tier");
      tier->name = string_value();
    } else if (key == "text" || key == "mark") {
      if (item == nullptr) parse_fail(line_no, key + " outside of an interval");
      item->text = string_value();
    } else if (key == "xmin" || key == "xmax" || key == "number") {
      const double v = parse_number(value, line_no);
      if (item != nullptr) {
        if (key == "xmax") {
          item->xmax = v;
          item->has_xmax = true;
        } else {
          item->xmin = v;
          item->has_xmin = true;
          if (key == "number") {
            item->xmax = v;
            item->has_xmax = true;
          }
        }
      } else if (tier == nullptr) {
        (key == "xmin" ? grid.xmin : grid.xmax) = v;
      }
      // Tier-level xmin/xmax carry no extra information.
    } else if (key == "intervals: size" || key == "points: size" || key == "size") {
      parse_number(value, line_no);
    }
  }
  return grid;
}

}  // namespace textgrid_detail

// Selects the interval tier named `tier_name` (exact, then case-insensitive),
// drops silence-labelled intervals, sorts by onset and merges boundaries that
// are closer than 1 ms.
inline AnnotationTier parse_textgrid_text(
    const std::string& raw_text, const std::string& tier_name,
    const std::set<std::string>& silence_labels = default_silence_labels()) {
  using namespace textgrid_detail;
  const RawGrid grid = parse_long_format(decode_text(raw_text));

  const RawTier* chosen = nullptr;
  for (const RawTier& t : grid.tiers)
    if (t.name == tier_name) {
      chosen = &t;
      break;
    }
  if (chosen == nullptr) {
    const std::string want = lower(tier_name);
    for (const RawTier& t : grid.tiers)
      if (lower(t.name) == want) {
        chosen = &t;
        break;
      }
  }
  if (chosen == nullptr) fail(ErrorCode::kTierNotFound, "tier not found: " + tier_name);
  if (chosen->klass == "TextTier")
    fail(ErrorCode::kPointTier, "tier is a point tier: " + chosen->name);
  if (chosen->klass != "IntervalTier")
    parse_fail(chosen->line, "unknown tier class '" + chosen->klass + "'");

  AnnotationTier out;
  out.name = chosen->name;
  out.file_duration_s = grid.xmax;
  for (const RawInterval& r : chosen->items) {
    if (!r.has_xmin || !r.has_xmax) parse_fail(r.line, "interval missing xmin/xmax");
    if (!(r.xmin < r.xmax)) parse_fail(r.line, "interval with xmin >= xmax");
    if (r.xmin < grid.xmin - 1e-9 || r.xmax > grid.xmax + 1e-9)
      parse_fail(r.line, "interval outside file bounds");
    if (silence_labels.count(std::string(trim(r.text))) != 0) continue;
    out.intervals.push_back({std::max(r.xmin, 0.0), std::min(r.xmax, grid.xmax),
                             std::string(trim(r.text))});
  }
  std::stable_sort(out.intervals.begin(), out.intervals.end(),
                   [](const Interval& a, const Interval& b) { return a.onset_s < b.onset_s; });
  for (std::size_t k = 1; k < out.intervals.size(); ++k) {
    Interval& prev = out.intervals[k - 1];
    Interval& cur = out.intervals[k];
    if (cur.onset_s < prev.offset_s - kBoundaryMergeEps)
      fail(ErrorCode::kParseError, "overlapping intervals in tier " + out.name);
    if (std::abs(cur.onset_s - prev.offset_s) < kBoundaryMergeEps &&
        cur.onset_s != prev.offset_s) {
      const double mid = 0.5 * (cur.onset_s + prev.offset_s);
      prev.offset_s = mid;
      cur.onset_s = mid;
    }
  }
  std::erase_if(out.intervals, [](const Interval& v) { return !(v.onset_s < v.offset_s); });
  return out;
}

inline AnnotationTier parse_textgrid(
    const std::filesystem::path& path, const std::string& tier_name,
    const std::set<std::string>& silence_labels = default_silence_labels()) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kUnreadableFile, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_textgrid_text(ss.str(), tier_name, silence_labels);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

// Shortest fixed-point rendering with at least six decimals that reads back
// to the same double.
inline std::string format_time(double t) {
  for (int digits = 6; digits < 17; ++digits) {
    std::string s = fmt::format("{:.{}f}", t, digits);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    if (back == t) return s;
  }
  return fmt::format("{:.17f}", t);
}

// Serialises tiers in long text format. Gaps between intervals are filled
// with empty-label intervals so every tier covers [0, duration].
inline std::string serialize_textgrid(const std::vector<AnnotationTier>& tiers) {
  double duration = 0.0;
  for (const auto& t : tiers) {
    duration = std::max(duration, t.file_duration_s);
    if (!t.intervals.empty()) duration = std::max(duration, t.intervals.back().offset_s);
  }
  auto quote = [](const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
      if (c == '"') out += "\"\"";
      else out.push_back(c);
    }
    return out + "\"";
  };
  std::string out;
  out += "File type = \"ooTextFile\"\nObject class = \"TextGrid\"\n\n";
  out += "xmin = " + format_time(0.0) + "\nxmax = " + format_time(duration) + "\n";
  out += "tiers? <exists>\nsize = " + std::to_string(tiers.size()) + "\nitem []:\n";
  for (std::size_t k = 0; k < tiers.size(); ++k) {
    std::vector<Interval> filled;
    double cursor = 0.0;
    for (const Interval& v : tiers[k].intervals) {
      if (v.onset_s > cursor) filled.push_back({cursor, v.onset_s, ""});
      filled.push_back(v);
      cursor = v.offset_s;
    }
    if (cursor < duration || filled.empty()) filled.push_back({cursor, duration, ""});
    out += fmt::format("    item [{}]:\n", k + 1);
    out += "        class = \"IntervalTier\"\n";
    out += "        name = " + quote(tiers[k].name) + "\n";
    out += "        xmin = " + format_time(0.0) + "\n";
    out += "        xmax = " + format_time(duration) + "\n";
    out += fmt::format("        intervals: size = {}\n", filled.size());
    for (std::size_t j = 0; j < filled.size(); ++j) {
      out += fmt::format("        intervals [{}]:\n", j + 1);
      out += "            xmin = " + format_time(filled[j].onset_s) + "\n";
      out += "            xmax = " + format_time(filled[j].offset_s) + "\n";
      out += "            text = " + quote(filled[j].label) + "\n";
    }
  }
  return out;
}

inline void write_textgrid(const std::filesystem::path& path,
                           const std::vector<AnnotationTier>& tiers) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kUnreadableFile, "cannot write " + path.string());
  out << serialize_textgrid(tiers);
}

}  // namespace sylkit
