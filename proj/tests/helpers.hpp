#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>

#include "repo_vitality/dataset.hpp"
#include "repo_vitality/error.hpp"
#include "repo_vitality/snapshot.hpp"
#include "repo_vitality/time.hpp"

namespace rv::test {

inline Timestamp day(int y, unsigned m, unsigned d) {
  return Timestamp{std::chrono::sys_days{std::chrono::year{y} / std::chrono::month{m} / std::chrono::day{d}}};
}

inline Timestamp ts(std::string_view iso) { return parse_timestamp(iso); }

/// Builds snapshots event by event; events are sorted on build().
class SnapshotBuilder {
 public:
  explicit SnapshotBuilder(std::string repo_id = "acme/widget", Timestamp as_of = day(2018, 11, 30)) {
    s_.repo_id = std::move(repo_id);
    s_.owner = s_.repo_id.substr(0, s_.repo_id.find('/'));
    s_.as_of = as_of;
    s_.size_loc = 1000;
  }
  SnapshotBuilder& add(EventKind kind, Timestamp t, std::string actor = "dev") {
    s_.events.push_back({kind, t, std::move(actor)});
    return *this;
  }
  SnapshotBuilder& commit(Timestamp t, std::string author = "dev") { return add(EventKind::commit, t, std::move(author)); }
  SnapshotBuilder& archived(bool v = true) {
    s_.archived = v;
    return *this;
  }
  SnapshotBuilder& topics(std::vector<std::string> t) {
    s_.topics = std::move(t);
    return *this;
  }
  SnapshotBuilder& loc(std::uint64_t n) {
    s_.size_loc = n;
    return *this;
  }
  SnapshotBuilder& readme(std::string text) {
    s_.readme_text = std::move(text);
    return *this;
  }
  ProjectSnapshot build() const {
    auto s = s_;
    sort_events(s.events);
    return s;
  }

 private:
  ProjectSnapshot s_;
};

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("rv-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace rv::test

#define EXPECT_RV_ERROR(stmt, error_kind)                                 \
  do {                                                                    \
    try {                                                                 \
      stmt;                                                               \
      ADD_FAILURE() << "expected " << ::rv::to_string(error_kind);        \
    } catch (const ::rv::Error& e) {                                      \
      EXPECT_EQ(e.kind(), error_kind) << e.what();                        \
    }                                                                     \
  } while (0)
