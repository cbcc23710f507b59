// SPDX-FileCopyrightText: (c) 2026 The semx Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "semx/text.h"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <string_view>
#include <utility>

namespace semx {
namespace {

// Decodes one UTF-8 code point at `pos`, advancing it. Invalid bytes decode
// to themselves so tokenizing never fails.
char32_t next_code_point(std::string_view s, std::size_t& pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  int len = 1;
  char32_t cp = b0;
  if (b0 >= 0xF0 && b0 < 0xF8) {
    len = 4;
    cp = b0 & 0x07;
  } else if (b0 >= 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if (b0 >= 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  }
  if (len > 1 && pos + len <= s.size()) {
    for (int i = 1; i < len; ++i) {
      const auto b = static_cast<unsigned char>(s[pos + i]);
      if ((b & 0xC0) != 0x80) {
        ++pos;
        return b0;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    pos += len;
    return cp;
  }
  ++pos;
  return b0;
}

bool is_separator(char32_t cp) {
  if (cp < 0x80) {
    return std::isspace(static_cast<int>(cp)) || std::ispunct(static_cast<int>(cp));
  }
  // Latin-1 punctuation and symbols, except the letters and digits in the
  // block.
  if (cp >= 0x80 && cp <= 0xBF) return cp != 0xAA && cp != 0xB5 && cp != 0xBA;
  if (cp == 0xD7 || cp == 0xF7) return true;
  // Unicode spaces.
  if (cp == 0x1680 || (cp >= 0x2000 && cp <= 0x200A) || cp == 0x2028 || cp == 0x2029 ||
      cp == 0x202F || cp == 0x205F || cp == 0x3000 || cp == 0xFEFF) {
    return true;
  }
  // General Punctuation block (dashes, quotes, ellipsis, ...) and CJK
  // punctuation.
  if (cp >= 0x2010 && cp <= 0x2027) return true;
  if (cp >= 0x2030 && cp <= 0x205E) return true;
  if (cp >= 0x3001 && cp <= 0x3003) return true;
  return false;
}

void append_lower(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(std::tolower(static_cast<int>(cp))));
    return;
  }
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) cp += 0x20;
  if (cp < 0x800) {
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

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char32_t cp = next_code_point(text, pos);
    if (is_separator(cp)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      append_lower(current, cp);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::set<std::string> token_set(std::string_view text, const std::set<std::string>* stopwords) {
  std::set<std::string> out;
  for (auto& t : tokenize(text)) {
    if (stopwords && stopwords->count(t)) continue;
    out.insert(std::move(t));
  }
  return out;
}

const std::set<std::string>& default_stopwords() {
  static const std::set<std::string> words = {
      "a",    "an",   "and",   "are",  "as",   "at",    "be",   "by",    "for",
      "from", "has",  "have",  "he",   "her",  "his",   "in",   "into",  "is",
      "it",   "its",  "of",    "on",   "or",   "she",   "some", "that",  "the",
      "their", "them", "there", "they", "this", "to",   "was",  "were",  "while",
      "who",  "with",
  };
  return words;
}

std::string normalize_symbol(std::string_view surface) {
  std::string out;
  bool pending_space = false;
  for (char ch : surface) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back('_');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

std::string_view indefinite_article(std::string_view word) {
  if (word.empty()) return "a";
  switch (std::tolower(static_cast<unsigned char>(word.front()))) {
    case 'a':
    case 'e':
    case 'i':
    case 'o':
    case 'u':
      return "an";
    default:
      return "a";
  }
}

int numeral_value(std::string_view token) {
  static constexpr std::array<std::pair<std::string_view, int>, 12> kWords = {{
      {"one", 1},
      {"two", 2},
      {"three", 3},
      {"four", 4},
      {"five", 5},
      {"six", 6},
      {"seven", 7},
      {"eight", 8},
      {"nine", 9},
      {"ten", 10},
      {"eleven", 11},
      {"twelve", 12},
  }};
  for (const auto& [w, v] : kWords) {
    if (token == w) return v;
  }
  int value = 0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec == std::errc() && ptr == end && !token.empty() && value > 0) return value;
  return 0;
}

}  // namespace semx
