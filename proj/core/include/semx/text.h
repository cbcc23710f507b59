// SPDX-FileCopyrightText: (c) 2026 The semx Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace semx {

/// Lowercases and splits on Unicode whitespace and punctuation. No stemming.
/// Non-ASCII letters pass through (Latin-1 capitals are lowercased).
std::vector<std::string> tokenize(std::string_view text);

/// Distinct tokens of `text`, optionally minus `stopwords`.
std::set<std::string> token_set(std::string_view text,
                                const std::set<std::string>* stopwords = nullptr);

/// Fixed English function-word list used by the overlap baseline.
const std::set<std::string>& default_stopwords();

/// Predicate symbol for a surface name or attribute: lowercase, trimmed,
/// inner whitespace collapsed to '_'.
std::string normalize_symbol(std::string_view surface);

/// "a" or "an" by the initial vowel letter of `word`.
std::string_view indefinite_article(std::string_view word);

/// Number words recognised for cardinality ("two" -> 2, "12" -> 12); 0 if
/// `token` is not a numeral.
int numeral_value(std::string_view token);

}  // namespace semx
