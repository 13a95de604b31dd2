// Copyright 2026 The pseudoref Authors
// SPDX-License-Identifier: Apache-2.0

#include "pseudoref/languages.hpp"

#include <algorithm>
#include <array>
#include <utility>

#include "pseudoref/text.hpp"

namespace pseudoref {
namespace {

// Sorted by code.
constexpr std::array<std::pair<std::string_view, std::string_view>, 48> kNames = {{
    {"ar", "Arabic"},     {"bn", "Bengali"},    {"cs", "Czech"},      {"da", "Danish"},
    {"de", "German"},     {"el", "Greek"},      {"en", "English"},    {"es", "Spanish"},
    {"et", "Estonian"},   {"fa", "Persian"},    {"fi", "Finnish"},    {"fr", "French"},
    {"gu", "Gujarati"},   {"ha", "Hausa"},      {"he", "Hebrew"},     {"hi", "Hindi"},
    {"hr", "Croatian"},   {"hu", "Hungarian"},  {"id", "Indonesian"}, {"is", "Icelandic"},
    {"it", "Italian"},    {"ja", "Japanese"},   {"kk", "Kazakh"},     {"km", "Khmer"},
    {"ko", "Korean"},     {"liv", "Livonian"},  {"lt", "Lithuanian"}, {"lv", "Latvian"},
    {"mr", "Marathi"},    {"ne", "Nepali"},     {"nl", "Dutch"},      {"pl", "Polish"},
    {"ps", "Pashto"},     {"pt", "Portuguese"}, {"ro", "Romanian"},   {"ru", "Russian"},
    {"sah", "Yakut"},     {"si", "Sinhala"},    {"sk", "Slovak"},     {"sv", "Swedish"},
    {"sw", "Swahili"},    {"ta", "Tamil"},      {"th", "Thai"},       {"tr", "Turkish"},
    {"uk", "Ukrainian"},  {"ur", "Urdu"},       {"vi", "Vietnamese"}, {"zh", "Chinese"},
}};

}  // namespace

std::string language_display_name(std::string_view code) {
  const auto lower = text::ascii_lower(code);
  auto it = std::lower_bound(kNames.begin(), kNames.end(), lower,
                             [](const auto& entry, const std::string& key) { return entry.first < key; });
  if (it != kNames.end() && it->first == lower) return std::string(it->second);
  return text::ascii_upper(code);
}

}  // namespace pseudoref
