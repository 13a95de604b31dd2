// Copyright 2026 The pseudoref Authors
// SPDX-License-Identifier: Apache-2.0

#include "pseudoref/csv.hpp"

namespace pseudoref::csv {

std::vector<Record> parse(std::string_view doc) {
  std::vector<Record> records;
  std::size_t line = 1;
  std::size_t i = 0;
  while (i < doc.size()) {
    Record rec;
    rec.line = line;
    std::string field;
    bool in_quotes = false;
    bool quoted_field = false;
    bool row_done = false;
    while (i < doc.size() && !row_done) {
      const char c = doc[i];
      if (in_quotes) {
        if (c == '"') {
          if (i + 1 < doc.size() && doc[i + 1] == '"') {
            field.push_back('"');
            i += 2;
            continue;
          }
          in_quotes = false;
        } else {
          if (c == '\n') ++line;
          field.push_back(c);
        }
        ++i;
        continue;
      }
      switch (c) {
        case '"':
          if (!field.empty() || quoted_field) throw ParseError(line, "stray quote in field");
          in_quotes = true;
          quoted_field = true;
          break;
        case ',':
          rec.fields.push_back(std::move(field));
          field.clear();
          quoted_field = false;
          break;
        case '\r':
          break;
        case '\n':
          ++line;
          row_done = true;
          break;
        default:
          if (quoted_field) throw ParseError(line, "text after closing quote");
          field.push_back(c);
      }
      ++i;
    }
    if (in_quotes) throw ParseError(rec.line, "unterminated quoted field");
    rec.fields.push_back(std::move(field));
    const bool blank = rec.fields.size() == 1 && rec.fields[0].empty() && !quoted_field;
    if (!blank) records.push_back(std::move(rec));
  }
  return records;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string join_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += escape(fields[i]);
  }
  out += "\r\n";
  return out;
}

}  // namespace pseudoref::csv
