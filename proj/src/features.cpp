#include "repo_vitality/features.hpp"

#include <algorithm>
#include <charconv>
#include <map>

#include "repo_vitality/error.hpp"

namespace rv {

namespace {

constexpr std::array<Feature, kFeatureCount> kFeatures = {
    Feature::forks,
    Feature::open_issues,
    Feature::closed_issues,
    Feature::open_pull_requests,
    Feature::closed_pull_requests,
    Feature::merged_pull_requests,
    Feature::commits,
    Feature::max_days_without_commits,
    Feature::max_contributions_by_developer,
    Feature::new_contributors,
    Feature::distinct_contributors,
    Feature::projects_created_by_owner,
    Feature::owner_commits,
};

constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "Forks",
    "Open issues",
    "Closed issues",
    "Open pull requests",
    "Closed pull requests",
    "Merged pull requests",
    "Commits",
    "Max days without commits",
    "Max contributions by developer",
    "New contributors",
    "Distinct contributors",
    "Projects created by the owner",
    "Number of commits of the owner",
};

using FirstCommitMap = std::map<std::string, Timestamp, std::less<>>;

FirstCommitMap first_commits(const ProjectSnapshot& s) {
  FirstCommitMap first;
  for (const auto& e : s.events)
    if (e.kind == EventKind::commit) first.emplace(e.actor, e.timestamp);  // events are sorted
  return first;
}

std::optional<EventKind> counted_kind(Feature f) {
  switch (f) {
    case Feature::forks: return EventKind::fork;
    case Feature::open_issues: return EventKind::issue_open;
    case Feature::closed_issues: return EventKind::issue_close;
    case Feature::open_pull_requests: return EventKind::pr_open;
    case Feature::closed_pull_requests: return EventKind::pr_close;
    case Feature::merged_pull_requests: return EventKind::pr_merge;
    case Feature::commits: return EventKind::commit;
    case Feature::projects_created_by_owner: return EventKind::owner_repo_created;
    case Feature::owner_commits: return EventKind::owner_commit;
    default: return std::nullopt;
  }
}

// All 13 values for one window, from the sorted event range [first, last).
std::array<double, kFeatureCount> window_values(std::vector<Event>::const_iterator first,
                                                std::vector<Event>::const_iterator last, const Window& win,
                                                const FirstCommitMap& first_commit) {
  std::array<double, kFeatureCount> v{};
  std::map<std::string_view, int> per_author;
  Timestamp prev = win.start;
  double max_gap = 0.0;
  for (auto it = first; it != last; ++it) {
    for (std::size_t k = 0; k < kFeatureCount; ++k)
      if (counted_kind(kFeatures[k]) == it->kind) v[k] += 1.0;
    if (it->kind != EventKind::commit) continue;
    max_gap = std::max(max_gap, days_between(prev, it->timestamp));
    prev = it->timestamp;
    ++per_author[it->actor];
  }
  max_gap = std::max(max_gap, days_between(prev, win.end));

  int max_contrib = 0;
  int newcomers = 0;
  for (const auto& [author, count] : per_author) {
    max_contrib = std::max(max_contrib, count);
    auto fc = first_commit.find(author);
    if (fc != first_commit.end() && fc->second >= win.start && fc->second < win.end) ++newcomers;
  }
  v[static_cast<std::size_t>(Feature::max_days_without_commits)] = max_gap;
  v[static_cast<std::size_t>(Feature::max_contributions_by_developer)] = max_contrib;
  v[static_cast<std::size_t>(Feature::new_contributors)] = newcomers;
  v[static_cast<std::size_t>(Feature::distinct_contributors)] = static_cast<double>(per_author.size());
  return v;
}

auto event_range(const ProjectSnapshot& s, const Window& win) {
  const auto by_time = [](const Event& e, Timestamp t) { return e.timestamp < t; };
  auto first = std::lower_bound(s.events.begin(), s.events.end(), win.start, by_time);
  auto last = std::lower_bound(first, s.events.end(), win.end, by_time);
  return std::pair{first, last};
}

}  // namespace

void validate(const ScenarioConfig& sc) {
  if (sc.length_months <= 0 || sc.interval_months <= 0 || sc.length_months % sc.interval_months != 0)
    throw Error(ErrorKind::invalid_scenario, "interval " + std::to_string(sc.interval_months) +
                                                 " months does not divide length " +
                                                 std::to_string(sc.length_months) + " months");
}

ScenarioConfig scenario_by_number(int number) {
  static constexpr std::array<ScenarioConfig, 10> kScenarios = {{
      {6, 3}, {6, 6}, {12, 3}, {12, 6}, {12, 12}, {18, 3}, {18, 6}, {24, 3}, {24, 6}, {24, 12},
  }};
  if (number < 1 || number > 10)
    throw Error(ErrorKind::invalid_scenario, "scenario number " + std::to_string(number) + " not in 1..10");
  return kScenarios[static_cast<std::size_t>(number - 1)];
}

ScenarioConfig parse_scenario(std::string_view text) {
  auto parse_int = [&](std::string_view part) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc{} || ptr != part.data() + part.size())
      throw Error(ErrorKind::invalid_scenario, "cannot parse scenario '" + std::string(text) + "'");
    return v;
  };
  if (auto comma = text.find(','); comma != std::string_view::npos) {
    ScenarioConfig sc{parse_int(text.substr(0, comma)), parse_int(text.substr(comma + 1))};
    validate(sc);
    return sc;
  }
  return scenario_by_number(parse_int(text));
}

std::string to_string(const ScenarioConfig& sc) {
  return std::to_string(sc.length_months) + "," + std::to_string(sc.interval_months);
}

std::vector<Window> windows(const ScenarioConfig& sc, Timestamp anchor) {
  validate(sc);
  const int w = sc.window_count();
  const auto width = days(static_cast<long long>(sc.interval_months) * kDaysPerMonth);
  std::vector<Window> out;
  out.reserve(static_cast<std::size_t>(w));
  for (int i = 1; i <= w; ++i) {
    Window win;
    win.index = i;
    win.end = anchor - (w - i) * width;
    win.start = win.end - width;
    win.label = "T_{" + std::to_string((i - 1) * sc.interval_months + 1) + "," + std::to_string(i * sc.interval_months) + "}";
    out.push_back(std::move(win));
  }
  return out;
}

const std::array<Feature, kFeatureCount>& all_features() { return kFeatures; }

std::string_view feature_name(Feature f) { return kFeatureNames[static_cast<std::size_t>(f)]; }

Feature feature_from_name(std::string_view name) {
  for (std::size_t k = 0; k < kFeatureCount; ++k)
    if (kFeatureNames[k] == name) return kFeatures[k];
  throw Error(ErrorKind::unknown_feature, "'" + std::string(name) + "'");
}

std::string data_point_name(Feature f, const Window& w) { return std::string(feature_name(f)) + "@" + w.label; }

std::optional<DataPointId> parse_data_point_name(std::string_view name) {
  const auto at = name.rfind("@T_{");
  if (at == std::string_view::npos || name.back() != '}') return std::nullopt;
  const auto body = name.substr(at + 4, name.size() - at - 5);
  const auto comma = body.find(',');
  if (comma == std::string_view::npos) return std::nullopt;
  int a = 0, b = 0;
  const auto lhs = body.substr(0, comma), rhs = body.substr(comma + 1);
  if (std::from_chars(lhs.data(), lhs.data() + lhs.size(), a).ec != std::errc{}) return std::nullopt;
  if (std::from_chars(rhs.data(), rhs.data() + rhs.size(), b).ec != std::errc{}) return std::nullopt;
  try {
    return DataPointId{feature_from_name(name.substr(0, at)), a, b};
  } catch (const Error&) {
    return std::nullopt;
  }
}

double extract_feature(const ProjectSnapshot& s, Feature f, const Window& win) {
  const auto [first, last] = event_range(s, win);
  const FirstCommitMap fc = f == Feature::new_contributors ? first_commits(s) : FirstCommitMap{};
  return window_values(first, last, win, fc)[static_cast<std::size_t>(f)];
}

double extract_feature(const ProjectSnapshot& s, std::string_view feature, const Window& win) {
  return extract_feature(s, feature_from_name(feature), win);
}

double DataPointVector::at(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return values[i];
  throw Error(ErrorKind::missing_feature, repo_id + ": no data point '" + std::string(name) + "'");
}

DataPointVector extract_vector(const ProjectSnapshot& s, const ScenarioConfig& scenario) {
  const auto anchor = last_commit(s);
  if (!anchor) throw Error(ErrorKind::no_commits, s.repo_id + ": no commit to anchor the windows on");
  const auto wins = windows(scenario, *anchor);
  const auto fc = first_commits(s);

  const Timestamp history_start = commit_times(s).front();

  std::vector<std::array<double, kFeatureCount>> per_window;
  per_window.reserve(wins.size());
  for (const auto& win : wins) {
    if (win.end <= history_start) {
      per_window.push_back({});  // window lies entirely before the first commit
      continue;
    }
    const auto [first, last] = event_range(s, win);
    per_window.push_back(window_values(first, last, win, fc));
  }

  DataPointVector v;
  v.repo_id = s.repo_id;
  v.scenario = scenario;
  v.short_history = history_start > wins.front().start;
  v.names.reserve(kFeatureCount * wins.size());
  v.values.reserve(kFeatureCount * wins.size());
  for (std::size_t k = 0; k < kFeatureCount; ++k) {
    for (std::size_t w = 0; w < wins.size(); ++w) {
      v.names.push_back(data_point_name(kFeatures[k], wins[w]));
      v.values.push_back(per_window[w][k]);
    }
  }
  return v;
}

}  // namespace rv
