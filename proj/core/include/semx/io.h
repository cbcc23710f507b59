// SPDX-FileCopyrightText: (c) 2026 The semx Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace semx {

std::string read_file(const std::filesystem::path& path);

/// Writes through a sibling temp file and renames it into place, so readers
/// never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Shortest round-trip decimal form; independent of the C locale.
std::string format_double(double value);

/// Locale-independent parse of a full string; throws ParseError.
double parse_double(std::string_view text);

}  // namespace semx
