#include "repo_vitality/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "repo_vitality/csv.hpp"
#include "repo_vitality/error.hpp"
#include "repo_vitality/features.hpp"
#include "repo_vitality/rng.hpp"

namespace rv {

namespace {

struct Rates {
  double commits, issues_open, issues_close, pr_open, pr_close, pr_merge, forks, releases, owner_repos, owner_commits;
};

std::string project_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "project-%04zu", i + 1);
  return buf;
}

ProjectSnapshot make_project(std::size_t index, bool unmaintained, const SynthParams& params, std::uint64_t seed) {
  Engine rng(derive_seed(seed, {tag(Stream::synth), index}));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::lognormal_distribution<double> spread(0.0, 0.6);

  ProjectSnapshot s;
  s.repo_id = "synth/" + project_name(index);
  s.owner = "owner-" + std::to_string(index + 1);
  s.as_of = params.as_of;
  s.archived = unmaintained;
  s.stars = static_cast<std::uint64_t>(500 + 20000 * unit(rng) * unit(rng));
  s.size_loc = static_cast<std::uint64_t>(1000 + 200000 * unit(rng));
  s.owner_scope = OwnerScope::owner_wide;

  const double base = 0.8 * spread(rng);
  Rates r{};
  r.commits = base;
  r.issues_open = 0.3 * base * spread(rng);
  r.issues_close = 0.8 * r.issues_open;
  r.pr_open = 0.15 * base * spread(rng);
  r.pr_close = 0.9 * r.pr_open;
  r.pr_merge = 0.6 * r.pr_open;
  r.forks = 0.2 * spread(rng);
  r.releases = 1.0 / 45.0;
  r.owner_repos = 0.01 * spread(rng);
  r.owner_commits = 0.5 * spread(rng);

  const auto& d = params.decay;
  const double floor = d.floor_min + (d.floor_max - d.floor_min) * unit(rng);
  const int idle = unmaintained ? static_cast<int>(unit(rng) * d.idle_days_max) : static_cast<int>(unit(rng) * 5);
  const Timestamp end = params.as_of - days(idle);
  const int history = params.history_days_min +
                      static_cast<int>(unit(rng) * (params.history_days_max - params.history_days_min));
  const Timestamp start = end - days(history);
  const double decay_days = static_cast<double>(d.decay_windows) * 3 * kDaysPerMonth;
  const Timestamp onset = end - days(static_cast<long long>(decay_days));

  // Activity multiplier on the project's own events; owner-side activity stays stationary.
  const auto activity = [&](Timestamp t) {
    if (!unmaintained || t < onset) return 1.0;
    const double x = days_between(onset, t) / decay_days;
    return floor + (1.0 - floor) * std::exp(-d.decay_strength * x);
  };

  std::vector<std::string> authors{"dev-" + std::to_string(index + 1) + "-1"};
  std::vector<int> author_commits{0};
  const auto pick_author = [&]() -> const std::string& {
    if (unit(rng) < 0.06) {
      authors.push_back("dev-" + std::to_string(index + 1) + "-" + std::to_string(authors.size() + 1));
      author_commits.push_back(0);
      return authors.back();
    }
    // Preferential attachment: weight = commits + 1.
    const long total = std::accumulate(author_commits.begin(), author_commits.end(), 0L) + static_cast<long>(authors.size());
    long ticket = static_cast<long>(unit(rng) * static_cast<double>(total));
    for (std::size_t a = 0; a < authors.size(); ++a) {
      ticket -= author_commits[a] + 1;
      if (ticket < 0) {
        ++author_commits[a];
        return authors[a];
      }
    }
    ++author_commits.back();
    return authors.back();
  };

  std::uniform_int_distribution<int> second_of_day(0, 86399);
  const auto emit = [&](EventKind kind, double rate, Timestamp day, const std::string& actor) {
    if (rate <= 0.0) return;
    std::poisson_distribution<int> count(rate);
    for (int k = count(rng); k > 0; --k) {
      const Timestamp t = day + std::chrono::seconds{second_of_day(rng)};
      if (t <= end) s.events.push_back({kind, t, actor});
    }
  };
  const auto emit_commits = [&](double rate, Timestamp day) {
    if (rate <= 0.0) return;
    std::poisson_distribution<int> count(rate);
    for (int k = count(rng); k > 0; --k) {
      const Timestamp t = day + std::chrono::seconds{second_of_day(rng)};
      const std::string& who = pick_author();
      if (t <= end) s.events.push_back({EventKind::commit, t, who});
    }
  };

  const std::string user = "user-" + std::to_string(index + 1);
  for (Timestamp day = start; day <= end; day += days(1)) {
    const double a = activity(day);
    emit_commits(r.commits * a, day);
    emit(EventKind::issue_open, r.issues_open * a, day, user);
    emit(EventKind::issue_close, r.issues_close * a, day, user);
    emit(EventKind::pr_open, r.pr_open * a, day, user);
    emit(EventKind::pr_close, r.pr_close * a, day, user);
    emit(EventKind::pr_merge, r.pr_merge * a, day, user);
    emit(EventKind::fork, r.forks * (0.5 + 0.5 * a), day, user);
    emit(EventKind::owner_repo_created, r.owner_repos, day, s.owner);
    emit(EventKind::owner_commit, r.owner_commits, day, s.owner);
    if (day < params.as_of - days(31)) emit(EventKind::release, r.releases * a, day, s.owner);
  }
  // Guarantee the anchors the labels and filters rely on.
  s.events.push_back({EventKind::commit, start, authors.front()});
  s.events.push_back({EventKind::commit, end, authors.front()});
  if (!unmaintained) {
    s.events.push_back({EventKind::release, params.as_of - days(1 + static_cast<int>(unit(rng) * 28)), s.owner});
  }
  std::stable_sort(s.events.begin(), s.events.end(), [](const Event& x, const Event& y) { return x.timestamp < y.timestamp; });
  return s;
}

}  // namespace

SynthCorpus synth(const SynthParams& params, std::uint64_t seed) {
  if (params.n_projects < 10) throw Error(ErrorKind::invalid_params, "synth needs at least 10 projects");
  if (!(params.prevalence >= 0.0 && params.prevalence <= 1.0))
    throw Error(ErrorKind::invalid_params, "prevalence must be in [0,1]");
  if (params.history_days_min < 1 || params.history_days_max < params.history_days_min)
    throw Error(ErrorKind::invalid_params, "bad history range");
  const auto n = params.n_projects;
  const auto n_unmaintained = static_cast<std::size_t>(std::llround(params.prevalence * static_cast<double>(n)));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Engine rng(derive_seed(seed, {tag(Stream::synth)}));
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<bool> unmaintained(n, false);
  for (std::size_t k = 0; k < n_unmaintained; ++k) unmaintained[order[k]] = true;

  SynthCorpus corpus;
  for (std::size_t i = 0; i < n; ++i) {
    corpus.snapshots.push_back(make_project(i, unmaintained[i], params, seed));
    corpus.labels.push_back({corpus.snapshots.back().repo_id, unmaintained[i] ? Label::unmaintained : Label::active,
                             unmaintained[i] ? LabelSource::archived : LabelSource::recent_release});
  }
  return corpus;
}

void write_labels_csv(const std::vector<LabeledProject>& labels, const std::filesystem::path& path) {
  std::vector<csv::Row> rows{{"repo_id", "label", "label_source"}};
  for (const auto& l : labels) rows.push_back({l.repo_id, std::string(to_string(l.label)), std::string(to_string(l.label_source))});
  csv::write_file(path, rows);
}

std::vector<LabeledProject> read_labels_csv(const std::filesystem::path& path) {
  const auto rows = csv::read_file(path);
  if (rows.empty() || rows.front() != csv::Row{"repo_id", "label", "label_source"})
    throw Error(ErrorKind::parse_error, path.string() + ": expected header repo_id,label,label_source");
  std::vector<LabeledProject> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 3) throw Error(ErrorKind::parse_error, path.string() + ": record " + std::to_string(i + 1) + " needs 3 fields");
    out.push_back({r[0], label_from_string(r[1]), label_source_from_string(r[2])});
  }
  return out;
}

void write_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& s : corpus.snapshots) store_snapshot(s, dir / snapshot_file_name(s.repo_id));
  write_labels_csv(corpus.labels, dir / "labels.csv");
}

}  // namespace rv
