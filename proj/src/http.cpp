// Copyright 2026 The pseudoref Authors
// SPDX-License-Identifier: Apache-2.0

#include "pseudoref/http.hpp"

#include <stdexcept>

#include <httplib.h>

namespace pseudoref::http {
namespace {

Response from_result(const httplib::Result& result) {
  Response out;
  if (!result) {
    const auto err = result.error();
    switch (err) {
      case httplib::Error::Connection:
      case httplib::Error::ConnectionTimeout:
      case httplib::Error::SSLConnection:
      case httplib::Error::ProxyConnection:
        out.failure = err == httplib::Error::ConnectionTimeout ? Failure::timeout : Failure::connection;
        break;
      case httplib::Error::Read:
        out.failure = Failure::timeout;
        break;
      default:
        out.failure = Failure::other;
    }
    out.error = httplib::to_string(err);
    return out;
  }
  out.status = result->status;
  out.body = result->body;
  return out;
}

httplib::Client make_client(const std::string& origin, std::chrono::milliseconds timeout) {
  httplib::Client client(origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  return client;
}

std::string join_path(const std::string& prefix, const std::string& path) {
  if (prefix.empty() || prefix == "/") return path;
  std::string out = prefix;
  if (out.back() == '/') out.pop_back();
  return out + path;
}

}  // namespace

Url Url::parse(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw std::invalid_argument("URL lacks a scheme: " + url);
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw std::invalid_argument("unsupported URL scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == scheme_end + 3) throw std::invalid_argument("URL lacks a host: " + url);
  if (path_start == std::string::npos) return Url{url, ""};
  return Url{url.substr(0, path_start), url.substr(path_start)};
}

Response post_json(const std::string& base_url, const std::string& path, const std::string& body,
                   const Headers& headers, std::chrono::milliseconds timeout) {
  const auto url = Url::parse(base_url);
  auto client = make_client(url.origin, timeout);
  httplib::Headers hdrs;
  for (const auto& [k, v] : headers) hdrs.emplace(k, v);
  return from_result(client.Post(join_path(url.path, path), hdrs, body, "application/json"));
}

Response get(const std::string& base_url, const std::string& path, std::chrono::milliseconds timeout) {
  const auto url = Url::parse(base_url);
  auto client = make_client(url.origin, timeout);
  return from_result(client.Get(join_path(url.path, path)));
}

}  // namespace pseudoref::http
