// Copyright 2026 The pseudoref Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pseudoref::text {

/// Strips leading and trailing Unicode whitespace.
std::string_view trim(std::string_view s);

/// True when `s` is empty or contains only Unicode whitespace.
bool is_blank(std::string_view s);

/// Lowercases ASCII letters; all other bytes pass through unchanged.
std::string ascii_lower(std::string_view s);
std::string ascii_upper(std::string_view s);

/// Splits on runs of Unicode White_Space code points. Invalid UTF-8 bytes are
/// treated as ordinary token bytes.
std::vector<std::string_view> split_whitespace(std::string_view s);

/// Splits on '\n', dropping a trailing '\r' from each line.
std::vector<std::string_view> split_lines(std::string_view s);

/// Replaces "\r\n" and lone "\r" with "\n".
std::string normalize_newlines(std::string_view s);

}  // namespace pseudoref::text
