#include "repo_vitality/snapshot.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "repo_vitality/error.hpp"

namespace rv {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::array kEventKindNames = {
    std::pair{EventKind::commit, "commit"},
    std::pair{EventKind::issue_open, "issue_open"},
    std::pair{EventKind::issue_close, "issue_close"},
    std::pair{EventKind::pr_open, "pr_open"},
    std::pair{EventKind::pr_close, "pr_close"},
    std::pair{EventKind::pr_merge, "pr_merge"},
    std::pair{EventKind::fork, "fork"},
    std::pair{EventKind::release, "release"},
    std::pair{EventKind::owner_repo_created, "owner_repo_created"},
    std::pair{EventKind::owner_commit, "owner_commit"},
};

std::string readme_sidecar_name(const std::filesystem::path& path) {
  return path.stem().string() + ".README.md";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_failure, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io_failure, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorKind::io_failure, "write failed for " + path.string());
}

}  // namespace

std::string_view to_string(EventKind kind) {
  for (const auto& [k, name] : kEventKindNames)
    if (k == kind) return name;
  return "unknown";
}

EventKind event_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kEventKindNames)
    if (n == name) return k;
  throw Error(ErrorKind::parse_error, "unknown event kind '" + std::string(name) + "'");
}

std::string_view to_string(OwnerScope scope) {
  return scope == OwnerScope::owner_wide ? "owner_wide" : "repo_local";
}

void validate(const ProjectSnapshot& s) {
  for (std::size_t i = 0; i < s.events.size(); ++i) {
    const auto& e = s.events[i];
    if (e.timestamp > s.as_of)
      throw Error(ErrorKind::invariant_violation, s.repo_id + ": event " + std::to_string(i) + " at " +
                                                      format_timestamp(e.timestamp) + " is after as_of " +
                                                      format_timestamp(s.as_of));
    if (i > 0 && e.timestamp < s.events[i - 1].timestamp)
      throw Error(ErrorKind::invariant_violation, s.repo_id + ": events not sorted at index " + std::to_string(i));
    if (e.kind == EventKind::commit && e.actor.empty())
      throw Error(ErrorKind::invariant_violation, s.repo_id + ": commit event " + std::to_string(i) + " has no author");
  }
}

bool sort_events(std::vector<Event>& events) {
  const auto by_time = [](const Event& a, const Event& b) { return a.timestamp < b.timestamp; };
  if (std::is_sorted(events.begin(), events.end(), by_time)) return false;
  std::stable_sort(events.begin(), events.end(), by_time);
  return true;
}

std::vector<Timestamp> commit_times(const ProjectSnapshot& s) {
  std::vector<Timestamp> out;
  for (const auto& e : s.events)
    if (e.kind == EventKind::commit) out.push_back(e.timestamp);
  return out;
}

std::optional<Timestamp> last_commit(const ProjectSnapshot& s) {
  for (auto it = s.events.rbegin(); it != s.events.rend(); ++it)
    if (it->kind == EventKind::commit) return it->timestamp;
  return std::nullopt;
}

std::string snapshot_file_name(std::string_view repo_id) {
  std::string name(repo_id);
  std::string out;
  for (char c : name) {
    if (c == '/')
      out += "__";
    else
      out += c;
  }
  return out + ".ndjson";
}

std::string serialize_snapshot(const ProjectSnapshot& s, std::string_view readme_path) {
  std::string out;
  ordered_json header;
  header["repo_id"] = s.repo_id;
  header["as_of"] = format_timestamp(s.as_of);
  header["archived"] = s.archived;
  header["stars"] = s.stars;
  header["size_loc"] = s.size_loc;
  header["topics"] = s.topics;
  header["owner"] = s.owner;
  header["readme_path"] = readme_path;
  out += header.dump();
  out += '\n';
  for (const auto& e : s.events) {
    ordered_json rec;
    rec["kind"] = to_string(e.kind);
    rec["ts"] = format_timestamp(e.timestamp);
    rec["actor"] = e.actor;
    out += rec.dump();
    out += '\n';
  }
  ordered_json trailer;
  trailer["trailer"]["events"] = s.events.size();
  trailer["trailer"]["owner_scope"] = to_string(s.owner_scope);
  out += trailer.dump();
  out += '\n';
  return out;
}

void store_snapshot(const ProjectSnapshot& s, const std::filesystem::path& path) {
  std::string readme_path;
  if (!s.readme_text.empty()) {
    readme_path = readme_sidecar_name(path);
    write_file(path.parent_path() / readme_path, s.readme_text);
  }
  write_file(path, serialize_snapshot(s, readme_path));
}

LoadResult load_snapshot(const std::filesystem::path& path) {
  const std::string content = read_file(path);
  LoadResult result;
  auto& s = result.snapshot;

  std::size_t line_no = 0;
  std::size_t last_valid = 0;
  bool have_header = false;
  bool have_trailer = false;
  std::size_t declared_events = 0;
  std::size_t pos = 0;

  const auto fail = [&](const std::string& why) -> void {
    throw Error(ErrorKind::parse_error, path.string() + ": line " + std::to_string(line_no) + ": " + why +
                                            " (last valid record: line " + std::to_string(last_valid) + ")");
  };

  while (pos < content.size()) {
    const auto eol = content.find('\n', pos);
    ++line_no;
    if (eol == std::string::npos) fail("record not newline-terminated (truncated file)");
    const std::string_view line(content.data() + pos, eol - pos);
    pos = eol + 1;
    if (have_trailer) fail("data after trailer record");

    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(std::string("malformed record: ") + e.what());
    }
    try {
      if (!have_header) {
        s.repo_id = rec.at("repo_id").get<std::string>();
        s.as_of = parse_timestamp(rec.at("as_of").get<std::string>());
        s.archived = rec.at("archived").get<bool>();
        s.stars = rec.at("stars").get<std::uint64_t>();
        s.size_loc = rec.at("size_loc").get<std::uint64_t>();
        s.topics = rec.at("topics").get<std::vector<std::string>>();
        s.owner = rec.at("owner").get<std::string>();
        const auto readme_path = rec.at("readme_path").get<std::string>();
        if (!readme_path.empty()) s.readme_text = read_file(path.parent_path() / readme_path);
        have_header = true;
      } else if (rec.contains("trailer")) {
        const auto& t = rec.at("trailer");
        declared_events = t.at("events").get<std::size_t>();
        const auto scope = t.at("owner_scope").get<std::string>();
        if (scope == "owner_wide")
          s.owner_scope = OwnerScope::owner_wide;
        else if (scope == "repo_local")
          s.owner_scope = OwnerScope::repo_local;
        else
          fail("unknown owner_scope '" + scope + "'");
        have_trailer = true;
      } else {
        Event e;
        e.kind = event_kind_from_string(rec.at("kind").get<std::string>());
        e.timestamp = parse_timestamp(rec.at("ts").get<std::string>());
        e.actor = rec.at("actor").get<std::string>();
        s.events.push_back(std::move(e));
      }
    } catch (const nlohmann::json::exception& e) {
      fail(std::string("bad field: ") + e.what());
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::parse_error) throw;
      fail(e.what());
    }
    last_valid = line_no;
  }
  if (!have_header) fail("missing header record");
  if (!have_trailer) fail("missing trailer record (truncated file)");
  if (declared_events != s.events.size())
    fail("trailer declares " + std::to_string(declared_events) + " events, found " + std::to_string(s.events.size()));

  result.resorted = sort_events(s.events);
  validate(s);
  return result;
}

std::vector<ProjectSnapshot> load_snapshot_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error(ErrorKind::io_failure, dir.string() + " is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".ndjson") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<ProjectSnapshot> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(load_snapshot(f).snapshot);
  return out;
}

}  // namespace rv
