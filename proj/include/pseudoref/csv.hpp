// Copyright 2026 The pseudoref Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pseudoref::csv {

struct Record {
  std::size_t line = 0;  // 1-based line on which the record starts
  std::vector<std::string> fields;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// RFC-4180 reader. Blank lines are skipped.
std::vector<Record> parse(std::string_view document);

/// Quotes a field if it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

std::string join_row(const std::vector<std::string>& fields);

}  // namespace pseudoref::csv
