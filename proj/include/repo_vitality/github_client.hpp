#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <nlohmann/json.hpp>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "repo_vitality/snapshot.hpp"

namespace rv {

struct HttpResponse {
  int status{0};
  std::map<std::string, std::string> headers;  // lower-case names
  std::string body;
};

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

/// Minimal GET transport. Implementations must be safe to call from several threads.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  /// `target` is a path plus query string, e.g. "/repos/o/r/commits?page=2".
  virtual HttpResponse get(const std::string& target, const HttpHeaders& headers) = 0;
};

/// TLS transport against https://<host>.
std::unique_ptr<HttpTransport> make_https_transport(std::string host = "api.github.com");

/// Languages counted towards size_loc.
std::vector<std::string> default_loc_languages();

struct FetchOptions {
  std::string token;
  Timestamp as_of{};
  int max_retries{5};
  int parallelism{4};
  bool owner_wide{true};
  std::vector<std::string> loc_languages{default_loc_languages()};
  /// The languages endpoint reports bytes; size_loc = allowlisted bytes / bytes_per_line.
  double bytes_per_line{40.0};
  std::function<void(std::chrono::seconds)> sleep;  // defaults to std::this_thread::sleep_for
  std::function<Timestamp()> now;                   // defaults to system_clock
};

/// Shared sleep-until budget for all requests of one fetch.
class RateLimitGate {
 public:
  RateLimitGate(std::function<void(std::chrono::seconds)> sleep, std::function<Timestamp()> now);

  void wait();
  void block_until(Timestamp t);

 private:
  std::function<void(std::chrono::seconds)> sleep_;
  std::function<Timestamp()> now_;
  std::mutex mutex_;
  Timestamp blocked_until_{};
};

class GithubClient {
 public:
  GithubClient(HttpTransport& transport, FetchOptions options);

  ProjectSnapshot fetch_snapshot(std::string_view repo_id);

  /// Drains every page of a list endpoint (Link: rel="next") and returns the concatenated items as one JSON
  /// array. `items_key` selects the array inside object responses (search API).
  nlohmann::json get_all_pages(const std::string& target, std::string_view items_key = {});

  /// One request with rate-limit retry. Throws auth_failure / rate_limit_exceeded / transport_failure.
  HttpResponse request(const std::string& target, const HttpHeaders& extra = {});

 private:
  HttpTransport& transport_;
  FetchOptions options_;
  RateLimitGate gate_;
};

/// Extracts the rel="next" target (path + query) from a Link header, or "" when absent.
std::string next_page_target(std::string_view link_header);

}  // namespace rv
