// Copyright 2026 The pseudoref Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace pseudoref::fileio {

/// Reads a whole file; throws std::runtime_error if it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Returns nullopt when the file does not exist.
std::optional<std::string> try_read_file(const std::filesystem::path& path);

/// Writes `bytes` to a uniquely named sibling temp file and renames it over
/// `path`, creating parent directories as needed. Readers never observe a
/// partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

/// Replaces characters that are unsafe in a single path component.
std::string sanitize_component(std::string_view name);

}  // namespace pseudoref::fileio
