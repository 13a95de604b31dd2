// Copyright 2026 The pseudoref Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pseudoref::http {

/// "https://host:8443/prefix" -> origin "https://host:8443", path "/prefix".
struct Url {
  std::string origin;
  std::string path;

  /// Throws std::invalid_argument for anything but http:// or https:// URLs.
  static Url parse(const std::string& url);
};

enum class Failure { none, connection, timeout, other };

struct Response {
  Failure failure = Failure::none;
  int status = 0;
  std::string body;
  std::string error;  // set when failure != none

  bool ok() const { return failure == Failure::none && status >= 200 && status < 300; }
};

using Headers = std::vector<std::pair<std::string, std::string>>;

Response post_json(const std::string& base_url, const std::string& path, const std::string& body,
                   const Headers& headers, std::chrono::milliseconds timeout);

Response get(const std::string& base_url, const std::string& path, std::chrono::milliseconds timeout);

}  // namespace pseudoref::http
