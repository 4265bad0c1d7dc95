#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "repo_vitality/snapshot.hpp"

namespace rv {

inline constexpr int kDaysPerMonth = 30;

struct ScenarioConfig {
  int length_months{24};
  int interval_months{3};

  int window_count() const { return length_months / interval_months; }
  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Throws Error(invalid_scenario) unless both are positive and the interval divides the length.
void validate(const ScenarioConfig& scenario);

/// The ten table scenarios, numbered 1..10.
ScenarioConfig scenario_by_number(int number);
/// Accepts "1".."10" or "n,m".
ScenarioConfig parse_scenario(std::string_view text);
std::string to_string(const ScenarioConfig& scenario);

struct Window {
  int index{1};  // 1-based, oldest first
  Timestamp start{};
  Timestamp end{};  // exclusive
  std::string label;  // "T_{a,b}"
};

std::vector<Window> windows(const ScenarioConfig& scenario, Timestamp anchor);

enum class Feature {
  forks,
  open_issues,
  closed_issues,
  open_pull_requests,
  closed_pull_requests,
  merged_pull_requests,
  commits,
  max_days_without_commits,
  max_contributions_by_developer,
  new_contributors,
  distinct_contributors,
  projects_created_by_owner,
  owner_commits,
};

inline constexpr std::size_t kFeatureCount = 13;

/// Table order.
const std::array<Feature, kFeatureCount>& all_features();
std::string_view feature_name(Feature f);
/// Throws Error(unknown_feature).
Feature feature_from_name(std::string_view name);

/// "<feature>@T_{a,b}"
std::string data_point_name(Feature f, const Window& w);

/// Splits "<feature>@T_{a,b}" into its parts; nullopt when the name does not follow the scheme.
struct DataPointId {
  Feature feature;
  int first_month;
  int last_month;
};
std::optional<DataPointId> parse_data_point_name(std::string_view name);

double extract_feature(const ProjectSnapshot& s, Feature f, const Window& win);
/// Name-based overload; throws Error(unknown_feature).
double extract_feature(const ProjectSnapshot& s, std::string_view feature, const Window& win);

struct DataPointVector {
  std::string repo_id;
  ScenarioConfig scenario;
  std::vector<std::string> names;
  std::vector<double> values;
  /// History starts after the first window opens; leading windows are zero-filled.
  bool short_history{false};

  /// Throws Error(missing_feature).
  double at(std::string_view name) const;
};

/// Throws Error(no_commits) when the snapshot has no commit to anchor on.
DataPointVector extract_vector(const ProjectSnapshot& s, const ScenarioConfig& scenario);

}  // namespace rv
