#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "repo_vitality/snapshot.hpp"

namespace rv {

enum class Label { unmaintained = 0, active = 1 };
enum class LabelSource { recent_release, archived, declared_list };

std::string_view to_string(Label label);
std::string_view to_string(LabelSource source);
Label label_from_string(std::string_view text);
LabelSource label_source_from_string(std::string_view text);

struct LabeledProject {
  std::string repo_id;
  Label label{Label::unmaintained};
  LabelSource label_source{LabelSource::archived};

  friend bool operator==(const LabeledProject&, const LabeledProject&) = default;
};

struct CurationRules {
  int min_history_days{730};
  int min_loc{1};
  std::vector<std::string> excluded_topics{"books", "awesome-lists"};
  int active_release_window_days{30};
};

enum class RejectReason { short_history, no_loc, excluded_topic };
std::string_view to_string(RejectReason reason);

struct Rejection {
  std::size_t index;  // position in the input pool
  RejectReason reason;
  std::string detail;
};

struct CurationResult {
  std::vector<std::size_t> kept;  // indices into the pool, input order
  std::vector<Rejection> rejected;
};

/// Filters run in order: commit span, LOC, topics. The first matching filter is the recorded reason.
CurationResult curate(const std::vector<ProjectSnapshot>& pool, const CurationRules& rules = {});

/// Throws Error(label_conflict) when a release falls in the active window and the project is also
/// archived or declared unmaintained.
std::optional<LabeledProject> label(const ProjectSnapshot& s, const CurationRules& rules,
                                    const std::set<std::string>& declared_unmaintained);

}  // namespace rv
