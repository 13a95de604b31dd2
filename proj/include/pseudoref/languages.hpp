// Copyright 2026 The pseudoref Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

namespace pseudoref {

/// English display name for an ISO-639 code ("ne" -> "Nepali"); unknown codes
/// come back uppercased.
std::string language_display_name(std::string_view code);

}  // namespace pseudoref
