#include "repo_vitality/github_client.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <thread>

#include "repo_vitality/error.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

namespace rv {

namespace {

using nlohmann::json;

class HttpsTransport final : public HttpTransport {
 public:
  explicit HttpsTransport(std::string host) : host_(std::move(host)) {}

  HttpResponse get(const std::string& target, const HttpHeaders& headers) override {
    httplib::SSLClient client(host_);
    client.set_connection_timeout(30);
    client.set_read_timeout(60);
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto res = client.Get(target, h);
    if (!res)
      throw Error(ErrorKind::transport_failure, "GET " + target + ": " + httplib::to_string(res.error()));
    HttpResponse out;
    out.status = res->status;
    out.body = res->body;
    for (const auto& [k, v] : res->headers) {
      std::string key = k;
      std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
      out.headers[key] = v;
    }
    return out;
  }

 private:
  std::string host_;
};

std::string percent_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 15];
    }
  }
  return out;
}

std::optional<std::string> header(const HttpResponse& r, const std::string& name) {
  auto it = r.headers.find(name);
  if (it == r.headers.end()) return std::nullopt;
  return it->second;
}

bool is_rate_limited(const HttpResponse& r) {
  if (r.status == 429) return true;
  if (r.status != 403) return false;
  if (header(r, "retry-after")) return true;
  if (auto rem = header(r, "x-ratelimit-remaining"); rem && *rem == "0") return true;
  return r.body.find("rate limit") != std::string::npos;
}

std::optional<Timestamp> ts_field(const json& obj, std::initializer_list<const char*> path) {
  const json* cur = &obj;
  for (const char* key : path) {
    if (!cur->is_object() || !cur->contains(key)) return std::nullopt;
    cur = &(*cur)[key];
  }
  if (!cur->is_string()) return std::nullopt;
  return parse_timestamp(cur->get<std::string>());
}

std::string str_field(const json& obj, std::initializer_list<const char*> path) {
  const json* cur = &obj;
  for (const char* key : path) {
    if (!cur->is_object() || !cur->contains(key)) return {};
    cur = &(*cur)[key];
  }
  return cur->is_string() ? cur->get<std::string>() : std::string{};
}

std::string commit_author(const json& item) {
  for (auto path : {std::initializer_list<const char*>{"author", "login"}, {"commit", "author", "email"},
                    {"commit", "author", "name"}}) {
    auto v = str_field(item, path);
    if (!v.empty()) return v;
  }
  return "unknown";
}

// Bounded worker pool over independent jobs; results land in per-job slots so order is fixed.
void run_bounded(std::vector<std::function<void()>>& jobs, int parallelism) {
  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(parallelism, 1)), 1, jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
      try {
        jobs[i]();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  for (std::size_t w = 1; w < workers; ++w) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

std::unique_ptr<HttpTransport> make_https_transport(std::string host) {
  return std::make_unique<HttpsTransport>(std::move(host));
}

std::vector<std::string> default_loc_languages() {
  return {"Assembly", "C",      "C#",     "C++",         "Clojure",       "CoffeeScript", "Dart",
          "Elixir",   "Erlang", "F#",     "Fortran",     "Go",            "Groovy",       "Haskell",
          "Java",     "JavaScript", "Julia", "Kotlin",   "Lua",           "MATLAB",       "Objective-C",
          "Objective-C++", "OCaml", "Perl", "PHP",       "PowerShell",    "Python",       "R",
          "Ruby",     "Rust",   "Scala",  "Shell",       "Swift",         "TypeScript",   "Visual Basic .NET"};
}

RateLimitGate::RateLimitGate(std::function<void(std::chrono::seconds)> sleep, std::function<Timestamp()> now)
    : sleep_(std::move(sleep)), now_(std::move(now)) {}

void RateLimitGate::wait() {
  Timestamp until;
  {
    std::lock_guard lock(mutex_);
    until = blocked_until_;
  }
  const auto now = now_();
  if (until > now) sleep_(until - now);
}

void RateLimitGate::block_until(Timestamp t) {
  std::lock_guard lock(mutex_);
  blocked_until_ = std::max(blocked_until_, t);
}

GithubClient::GithubClient(HttpTransport& transport, FetchOptions options)
    : transport_(transport),
      options_(std::move(options)),
      gate_(options_.sleep ? options_.sleep : [](std::chrono::seconds s) { std::this_thread::sleep_for(s); },
            options_.now ? options_.now
                         : [] { return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()); }) {
  if (!options_.now) options_.now = [] { return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()); };
}

HttpResponse GithubClient::request(const std::string& target, const HttpHeaders& extra) {
  HttpHeaders headers = {{"Accept", "application/vnd.github+json"},
                         {"User-Agent", "repo-vitality"},
                         {"X-GitHub-Api-Version", "2022-11-28"}};
  if (!options_.token.empty()) headers.emplace_back("Authorization", "Bearer " + options_.token);
  for (const auto& h : extra) {
    auto it = std::find_if(headers.begin(), headers.end(), [&](const auto& p) { return p.first == h.first; });
    if (it != headers.end())
      it->second = h.second;
    else
      headers.push_back(h);
  }

  for (int attempt = 0;; ++attempt) {
    gate_.wait();
    HttpResponse res = transport_.get(target, headers);
    if (res.status == 401) throw Error(ErrorKind::auth_failure, "GET " + target + " returned 401");
    const bool limited = is_rate_limited(res);
    const bool server_error = res.status >= 500;
    if (!limited && !server_error) return res;
    if (attempt >= options_.max_retries) {
      if (limited)
        throw Error(ErrorKind::rate_limit_exceeded,
                    "GET " + target + " after " + std::to_string(attempt + 1) + " attempts");
      throw Error(ErrorKind::transport_failure, "GET " + target + " returned " + std::to_string(res.status));
    }
    auto wait = std::chrono::seconds{1LL << std::min(attempt, 6)};
    if (limited) {
      if (auto ra = header(res, "retry-after")) {
        wait = std::chrono::seconds{std::max(1LL, std::atoll(ra->c_str()))};
      } else if (auto reset = header(res, "x-ratelimit-reset")) {
        const Timestamp reset_at{std::chrono::seconds{std::atoll(reset->c_str())}};
        wait = std::max(std::chrono::seconds{1}, reset_at - options_.now() + std::chrono::seconds{1});
      }
    }
    gate_.block_until(options_.now() + wait);
  }
}

std::string next_page_target(std::string_view link) {
  std::size_t pos = 0;
  while (pos < link.size()) {
    const auto open = link.find('<', pos);
    if (open == std::string_view::npos) break;
    const auto close = link.find('>', open);
    if (close == std::string_view::npos) break;
    const auto end = link.find(',', close);
    const auto params = link.substr(close + 1, end == std::string_view::npos ? std::string_view::npos : end - close - 1);
    if (params.find("rel=\"next\"") != std::string_view::npos) {
      std::string_view url = link.substr(open + 1, close - open - 1);
      if (auto scheme = url.find("://"); scheme != std::string_view::npos) {
        const auto path = url.find('/', scheme + 3);
        url = path == std::string_view::npos ? std::string_view{"/"} : url.substr(path);
      }
      return std::string(url);
    }
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return {};
}

json GithubClient::get_all_pages(const std::string& target, std::string_view items_key) {
  json items = json::array();
  std::string next = target;
  while (!next.empty()) {
    const auto res = request(next);
    if (res.status == 404) throw Error(ErrorKind::repo_not_found, "GET " + next + " returned 404");
    if (res.status != 200)
      throw Error(ErrorKind::transport_failure, "GET " + next + " returned " + std::to_string(res.status));
    json page;
    try {
      page = json::parse(res.body);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::parse_error, "GET " + next + ": " + e.what());
    }
    const json& arr = items_key.empty() ? page : page.at(std::string(items_key));
    if (!arr.is_array()) throw Error(ErrorKind::parse_error, "GET " + next + ": expected a JSON array");
    for (const auto& item : arr) items.push_back(item);
    const auto link = header(res, "link");
    next = link ? next_page_target(*link) : std::string{};
  }
  return items;
}

ProjectSnapshot GithubClient::fetch_snapshot(std::string_view repo_id) {
  const std::string id(repo_id);
  const std::string base = "/repos/" + id;
  const Timestamp as_of = options_.as_of;
  const std::string as_of_text = format_timestamp(as_of);

  ProjectSnapshot s;
  {
    const auto res = request(base);
    if (res.status == 404) throw Error(ErrorKind::repo_not_found, "GET " + base + " returned 404");
    if (res.status != 200) throw Error(ErrorKind::transport_failure, "GET " + base + " returned " + std::to_string(res.status));
    const auto meta = json::parse(res.body);
    s.repo_id = meta.value("full_name", id);
    s.as_of = as_of;
    s.archived = meta.value("archived", false);
    s.stars = meta.value("stargazers_count", std::uint64_t{0});
    s.owner = str_field(meta, {"owner", "login"});
    if (meta.contains("topics") && meta["topics"].is_array()) s.topics = meta["topics"].get<std::vector<std::string>>();
  }

  enum Slot { commits, issues, pulls, forks, releases, owner_repos, languages, readme, kSlots };
  std::vector<std::vector<Event>> slot_events(kSlots);
  std::uint64_t loc_bytes = 0;
  std::string readme_text;

  std::vector<std::function<void()>> jobs;
  jobs.push_back([&] {
    for (const auto& c : get_all_pages(base + "/commits?per_page=100&until=" + percent_encode(as_of_text))) {
      if (auto t = ts_field(c, {"commit", "author", "date"})) slot_events[commits].push_back({EventKind::commit, *t, commit_author(c)});
    }
  });
  jobs.push_back([&] {
    for (const auto& i : get_all_pages(base + "/issues?state=all&per_page=100")) {
      if (i.contains("pull_request")) continue;
      const auto actor = str_field(i, {"user", "login"});
      if (auto t = ts_field(i, {"created_at"})) slot_events[issues].push_back({EventKind::issue_open, *t, actor});
      if (auto t = ts_field(i, {"closed_at"})) slot_events[issues].push_back({EventKind::issue_close, *t, actor});
    }
  });
  jobs.push_back([&] {
    for (const auto& p : get_all_pages(base + "/pulls?state=all&per_page=100")) {
      const auto actor = str_field(p, {"user", "login"});
      if (auto t = ts_field(p, {"created_at"})) slot_events[pulls].push_back({EventKind::pr_open, *t, actor});
      if (auto t = ts_field(p, {"closed_at"})) slot_events[pulls].push_back({EventKind::pr_close, *t, actor});
      if (auto t = ts_field(p, {"merged_at"})) slot_events[pulls].push_back({EventKind::pr_merge, *t, actor});
    }
  });
  jobs.push_back([&] {
    for (const auto& f : get_all_pages(base + "/forks?per_page=100&sort=oldest"))
      if (auto t = ts_field(f, {"created_at"})) slot_events[forks].push_back({EventKind::fork, *t, str_field(f, {"owner", "login"})});
  });
  jobs.push_back([&] {
    for (const auto& r : get_all_pages(base + "/releases?per_page=100")) {
      if (r.value("draft", false)) continue;
      auto t = ts_field(r, {"published_at"});
      if (!t) t = ts_field(r, {"created_at"});
      if (t) slot_events[releases].push_back({EventKind::release, *t, str_field(r, {"author", "login"})});
    }
  });
  jobs.push_back([&] {
    if (s.owner.empty()) return;
    for (const auto& r : get_all_pages("/users/" + s.owner + "/repos?per_page=100&type=owner"))
      if (auto t = ts_field(r, {"created_at"})) slot_events[owner_repos].push_back({EventKind::owner_repo_created, *t, s.owner});
  });
  jobs.push_back([&] {
    const auto res = request(base + "/languages");
    if (res.status != 200) return;
    const auto langs = json::parse(res.body);
    for (const auto& [lang, bytes] : langs.items())
      if (std::find(options_.loc_languages.begin(), options_.loc_languages.end(), lang) != options_.loc_languages.end())
        loc_bytes += bytes.get<std::uint64_t>();
  });
  jobs.push_back([&] {
    const auto res = request(base + "/readme", {{"Accept", "application/vnd.github.raw"}});
    if (res.status == 200) readme_text = res.body;
  });
  run_bounded(jobs, options_.parallelism);

  std::vector<Event> owner_commits;
  s.owner_scope = OwnerScope::repo_local;
  if (options_.owner_wide && !s.owner.empty()) {
    const std::string date = as_of_text.substr(0, 10);
    const std::string target = "/search/commits?q=" + percent_encode("author:" + s.owner + " committer-date:<=" + date) + "&per_page=100";
    const auto probe = request(target);
    if (probe.status == 200) {
      const auto page = json::parse(probe.body);
      const bool complete = !page.value("incomplete_results", false) && page.value("total_count", 0) <= 1000;
      if (complete) {
        for (const auto& c : get_all_pages(target, "items"))
          if (auto t = ts_field(c, {"commit", "author", "date"})) owner_commits.push_back({EventKind::owner_commit, *t, s.owner});
        s.owner_scope = OwnerScope::owner_wide;
      }
    }
  }
  if (s.owner_scope == OwnerScope::repo_local) {
    for (const auto& e : slot_events[commits])
      if (e.actor == s.owner) owner_commits.push_back({EventKind::owner_commit, e.timestamp, s.owner});
  }

  for (auto& events : slot_events)
    for (auto& e : events)
      if (e.timestamp <= as_of) s.events.push_back(std::move(e));
  for (auto& e : owner_commits)
    if (e.timestamp <= as_of) s.events.push_back(std::move(e));
  sort_events(s.events);

  s.size_loc = static_cast<std::uint64_t>(std::ceil(static_cast<double>(loc_bytes) / options_.bytes_per_line));
  s.readme_text = std::move(readme_text);
  validate(s);
  return s;
}

}  // namespace rv
