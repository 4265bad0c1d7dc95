#include "repo_vitality/dataset.hpp"

#include <algorithm>

#include "repo_vitality/error.hpp"

namespace rv {

std::string_view to_string(Label label) { return label == Label::active ? "active" : "unmaintained"; }

std::string_view to_string(LabelSource source) {
  switch (source) {
    case LabelSource::recent_release: return "recent_release";
    case LabelSource::archived: return "archived";
    case LabelSource::declared_list: return "declared_list";
  }
  return "unknown";
}

Label label_from_string(std::string_view text) {
  if (text == "active") return Label::active;
  if (text == "unmaintained") return Label::unmaintained;
  throw Error(ErrorKind::parse_error, "unknown label '" + std::string(text) + "'");
}

LabelSource label_source_from_string(std::string_view text) {
  if (text == "recent_release") return LabelSource::recent_release;
  if (text == "archived") return LabelSource::archived;
  if (text == "declared_list") return LabelSource::declared_list;
  throw Error(ErrorKind::parse_error, "unknown label source '" + std::string(text) + "'");
}

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::short_history: return "short_history";
    case RejectReason::no_loc: return "no_loc";
    case RejectReason::excluded_topic: return "excluded_topic";
  }
  return "unknown";
}

CurationResult curate(const std::vector<ProjectSnapshot>& pool, const CurationRules& rules) {
  CurationResult out;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const auto& s = pool[i];
    const auto commits = commit_times(s);
    const double span = commits.empty() ? 0.0 : days_between(commits.front(), commits.back());
    if (span < rules.min_history_days) {
      out.rejected.push_back({i, RejectReason::short_history, "commit span " + std::to_string(span) + " days"});
      continue;
    }
    if (s.size_loc < static_cast<std::uint64_t>(std::max(rules.min_loc, 0))) {
      out.rejected.push_back({i, RejectReason::no_loc, "size_loc " + std::to_string(s.size_loc)});
      continue;
    }
    auto hit = std::find_if(s.topics.begin(), s.topics.end(), [&](const std::string& t) {
      return std::find(rules.excluded_topics.begin(), rules.excluded_topics.end(), t) != rules.excluded_topics.end();
    });
    if (hit != s.topics.end()) {
      out.rejected.push_back({i, RejectReason::excluded_topic, "topic " + *hit});
      continue;
    }
    out.kept.push_back(i);
  }
  return out;
}

std::optional<LabeledProject> label(const ProjectSnapshot& s, const CurationRules& rules,
                                    const std::set<std::string>& declared_unmaintained) {
  const Timestamp window_start = s.as_of - days(rules.active_release_window_days);
  const bool recent_release = std::any_of(s.events.begin(), s.events.end(), [&](const Event& e) {
    return e.kind == EventKind::release && e.timestamp >= window_start && e.timestamp <= s.as_of;
  });
  const bool declared = declared_unmaintained.count(s.repo_id) > 0;
  if (recent_release && (s.archived || declared))
    throw Error(ErrorKind::label_conflict, s.repo_id + ": release within " +
                                               std::to_string(rules.active_release_window_days) + " days but " +
                                               (s.archived ? "archived" : "declared unmaintained"));
  if (recent_release) return LabeledProject{s.repo_id, Label::active, LabelSource::recent_release};
  if (s.archived) return LabeledProject{s.repo_id, Label::unmaintained, LabelSource::archived};
  if (declared) return LabeledProject{s.repo_id, Label::unmaintained, LabelSource::declared_list};
  return std::nullopt;
}

}  // namespace rv
