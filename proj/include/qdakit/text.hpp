// Copyright 2026 The qdakit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Byte-level text helpers shared by every stage: the word tokenizer, ASCII
// case folding, CSV quoting and deterministic number formatting.

#pragma once

#include <charconv>
#include <cstddef>
#include <cstdio>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "qdakit/error.hpp"

namespace qdakit {

// Half-open byte range [start, end) into a text.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  bool contains(const Span& other) const {
    return start <= other.start && other.end <= end;
  }
  bool overlaps(const Span& other) const {
    return start < other.end && other.start < end;
  }
  friend bool operator==(const Span&, const Span&) = default;
  friend auto operator<=>(const Span&, const Span&) = default;
};

namespace text {

inline bool is_ascii_alnum(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z');
}

inline bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

inline bool is_upper(unsigned char c) { return c >= 'A' && c <= 'Z'; }

inline char to_lower(char c) {
  return is_upper(static_cast<unsigned char>(c)) ? static_cast<char>(c + 32)
                                                 : c;
}

inline char to_upper(char c) {
  return (c >= 'a' && c <= 'z') ? static_cast<char>(c - 32) : c;
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = to_lower(c);
  return out;
}

// U+2019 RIGHT SINGLE QUOTATION MARK, the typographic apostrophe.
inline constexpr std::string_view kCurlyApostrophe = "\xE2\x80\x99";

// Number of bytes of a word character starting at `pos`, 0 if none. ASCII
// letters and digits are word characters, as is any multi-byte UTF-8
// sequence outside the General Punctuation block (U+2000..U+206F) and
// outside NO-BREAK SPACE.
inline std::size_t word_char_len(std::string_view s, std::size_t pos) {
  const auto c = static_cast<unsigned char>(s[pos]);
  if (c < 0x80) return is_ascii_alnum(c) ? 1 : 0;
  if (c == 0xE2 && pos + 2 < s.size() &&
      static_cast<unsigned char>(s[pos + 1]) == 0x80) {
    return 0;
  }
  if (c == 0xE2 && pos + 2 < s.size() &&
      static_cast<unsigned char>(s[pos + 1]) == 0x81) {
    return 0;
  }
  if (c == 0xC2 && pos + 1 < s.size() &&
      static_cast<unsigned char>(s[pos + 1]) == 0xA0) {
    return 0;
  }
  if (c >= 0xC0) {
    std::size_t len = c >= 0xF0 ? 4 : c >= 0xE0 ? 3 : 2;
    return pos + len <= s.size() ? len : 1;
  }
  return 1;  // stray continuation byte, keep it inside the word
}

// Bytes of an in-word joiner at `pos` (hyphen, apostrophe, curly
// apostrophe), 0 if none.
inline std::size_t joiner_len(std::string_view s, std::size_t pos) {
  if (s[pos] == '-' || s[pos] == '\'') return 1;
  if (s.substr(pos, 3) == kCurlyApostrophe) return 3;
  return 0;
}

// Splits text into word tokens. Hyphenated words and words with inner
// apostrophes ("can't", "well-being") are single tokens; a joiner only binds
// when a word character follows it.
inline std::vector<Span> tokenize(std::string_view s) {
  std::vector<Span> tokens;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t len = word_char_len(s, i);
    if (len == 0) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    i += len;
    while (i < s.size()) {
      if (std::size_t w = word_char_len(s, i); w > 0) {
        i += w;
        continue;
      }
      std::size_t j = joiner_len(s, i);
      if (j > 0 && i + j < s.size() && word_char_len(s, i + j) > 0) {
        i += j;
        continue;
      }
      break;
    }
    tokens.push_back({start, i});
  }
  return tokens;
}

// Lowercases and maps the curly apostrophe onto the ASCII one, giving the
// form used for dictionary and word-list lookups.
inline std::string fold(std::string_view token) {
  std::string out;
  out.reserve(token.size());
  for (std::size_t i = 0; i < token.size();) {
    if (token.substr(i, 3) == kCurlyApostrophe) {
      out.push_back('\'');
      i += 3;
    } else {
      out.push_back(to_lower(token[i]));
      ++i;
    }
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// True if the bytes between two tokens are whitespace only.
inline bool whitespace_only(std::string_view s) {
  for (char c : s) {
    if (!is_space(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

inline std::string join(const std::vector<std::string>& parts,
                        std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      break;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

inline std::vector<std::string> split_lines(std::string_view s) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < s.size()) {
    std::size_t pos = s.find('\n', start);
    std::size_t end = pos == std::string_view::npos ? s.size() : pos;
    std::string_view line = s.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return lines;
}

// Shortest representation that parses back to the same double.
inline std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

inline std::string format_fixed(double value, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, value);
  return buf;
}

inline double parse_double(std::string_view s, std::string_view what) {
  double value = 0;
  auto t = trim(s);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw Error(ErrorCode::kConfiguration,
                "invalid number for " + std::string(what) + ": '" +
                    std::string(s) + "'");
  }
  return value;
}

inline long long parse_int(std::string_view s, std::string_view what) {
  long long value = 0;
  auto t = trim(s);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw Error(ErrorCode::kConfiguration,
                "invalid integer for " + std::string(what) + ": '" +
                    std::string(s) + "'");
  }
  return value;
}

}  // namespace text

namespace csv {

inline std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

inline std::string row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += escape(fields[i]);
  }
  out.push_back('\n');
  return out;
}

// RFC 4180 reader: quoted fields may hold commas, quotes and newlines.
// Blank lines are skipped; CRLF is accepted.
inline std::vector<std::vector<std::string>> parse(std::string_view s) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> current;
  std::string field;
  bool in_quotes = false;
  bool row_has_content = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < s.size() && s[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
      row_has_content = true;
    } else if (c == ',') {
      current.push_back(std::move(field));
      field.clear();
      row_has_content = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < s.size() && s[i + 1] == '\n') ++i;
      if (row_has_content || !field.empty()) {
        current.push_back(std::move(field));
        rows.push_back(std::move(current));
      }
      current.clear();
      field.clear();
      row_has_content = false;
    } else {
      field.push_back(c);
      row_has_content = true;
    }
  }
  if (in_quotes) {
    throw Error(ErrorCode::kValidation, "unterminated quoted CSV field");
  }
  if (row_has_content || !field.empty()) {
    current.push_back(std::move(field));
    rows.push_back(std::move(current));
  }
  return rows;
}

}  // namespace csv
}  // namespace qdakit
