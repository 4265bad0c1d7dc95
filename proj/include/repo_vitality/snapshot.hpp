#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "repo_vitality/time.hpp"

namespace rv {

enum class EventKind {
  commit,
  issue_open,
  issue_close,
  pr_open,
  pr_close,
  pr_merge,
  fork,
  release,
  owner_repo_created,
  owner_commit,
};

std::string_view to_string(EventKind kind);
/// Throws Error(parse_error) for names outside the enum.
EventKind event_kind_from_string(std::string_view name);

struct Event {
  EventKind kind{EventKind::commit};
  Timestamp timestamp{};
  std::string actor;

  friend bool operator==(const Event&, const Event&) = default;
};

/// Where owner_commit events came from.
enum class OwnerScope { owner_wide, repo_local };

std::string_view to_string(OwnerScope scope);

struct ProjectSnapshot {
  std::string repo_id;
  Timestamp as_of{};
  bool archived{false};
  std::uint64_t stars{0};
  std::uint64_t size_loc{0};
  std::vector<std::string> topics;
  std::string owner;
  std::string readme_text;
  std::vector<Event> events;
  OwnerScope owner_scope{OwnerScope::owner_wide};

  friend bool operator==(const ProjectSnapshot&, const ProjectSnapshot&) = default;
};

/// Checks the snapshot invariants; throws Error(invariant_violation) naming the first offending event.
void validate(const ProjectSnapshot& s);

/// Stable sort of events by timestamp. Returns true if the order changed.
bool sort_events(std::vector<Event>& events);

/// Timestamps of commit events, ascending.
std::vector<Timestamp> commit_times(const ProjectSnapshot& s);
std::optional<Timestamp> last_commit(const ProjectSnapshot& s);

/// File name used for a repo inside a snapshot directory: "owner__name.ndjson".
std::string snapshot_file_name(std::string_view repo_id);

struct LoadResult {
  ProjectSnapshot snapshot;
  bool resorted{false};
};

/// Writes the NDJSON snapshot to `path` plus a sidecar README (`<stem>.README.md`) when the README is
/// non-empty. Output is byte-stable.
void store_snapshot(const ProjectSnapshot& s, const std::filesystem::path& path);
LoadResult load_snapshot(const std::filesystem::path& path);

/// Loads every `*.ndjson` in `dir` sorted by file name.
std::vector<ProjectSnapshot> load_snapshot_dir(const std::filesystem::path& dir);

/// In-memory serialization used by store_snapshot; `readme_path` is written into the header verbatim.
std::string serialize_snapshot(const ProjectSnapshot& s, std::string_view readme_path);

}  // namespace rv
