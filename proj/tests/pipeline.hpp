#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cli.hpp"

namespace rv::test {

struct CliResult {
  int code{0};
  std::string out;
  std::string err;
};

inline CliResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "repo-vitality");
  std::ostringstream out, err;
  const int code = rv::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

/// Every regular file under `root` keyed by relative path, with `root` itself spelled "$ROOT" so runs in
/// different directories compare equal.
inline std::map<std::string, std::string> tree_contents(const std::filesystem::path& root) {
  std::map<std::string, std::string> files;
  const std::string prefix = root.string();
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::string body{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    for (auto at = body.find(prefix); at != std::string::npos; at = body.find(prefix, at + 5)) body.replace(at, prefix.size(), "$ROOT");
    files[std::filesystem::relative(e.path(), root).generic_string()] = std::move(body);
  }
  return files;
}

/// Names present in only one tree or with different contents.
inline std::vector<std::string> differing_files(const std::map<std::string, std::string>& a, const std::map<std::string, std::string>& b) {
  std::vector<std::string> out;
  for (const auto& [name, body] : a)
    if (auto it = b.find(name); it == b.end() || it->second != body) out.push_back(name);
  for (const auto& [name, body] : b)
    if (!a.contains(name)) out.push_back(name);
  return out;
}

/// Runs every offline subcommand end to end under `root`; returns the stdout of each step.
/// Throws std::runtime_error naming the first step that exits nonzero.
inline std::string run_pipeline(const std::filesystem::path& root, unsigned threads, std::size_t n_projects = 60) {
  const auto p = [&](const char* rel) { return (root / rel).string(); };
  const std::string t = std::to_string(threads);
  const std::vector<std::vector<std::string>> steps{
      {"--threads", t, "synth", "--n", std::to_string(n_projects), "--out", p("corpus")},
      {"--threads", t, "curate", "--snapshots", p("corpus"), "--out", p("curated/labels.csv")},
      {"--threads", t, "scan-readme", "--snapshots", p("corpus"), "--out", p("scan/ground_truth.csv")},
      {"--threads", t, "extract", "--snapshots", p("corpus"), "--out", p("features/features.csv")},
      {"--threads", t, "prune", "--in", p("features/features.csv"), "--out", p("pruned/pruned.csv"), "--report", p("pruned/clusters.json")},
      {"--threads", t, "train", "--features", p("pruned/pruned.csv"), "--labels", p("curated/labels.csv"), "--out", p("model/model.rvf"),
       "--trees", "30", "--importance", p("model/importance.csv"), "--importance-repeats", "2"},
      {"--threads", t, "evaluate", "--features", p("pruned/pruned.csv"), "--labels", p("curated/labels.csv"), "--folds", "5", "--rounds", "2",
       "--trees", "20", "--out", p("eval/metrics.csv")},
      {"--threads", t, "lma", "--model", p("model/model.rvf"), "--snapshots", p("corpus"), "--out", p("lma/lma.csv")},
      {"--threads", t, "report", "--model", p("model/model.rvf"), "--snapshots", p("corpus"), "--out", p("report")},
  };
  std::string log;
  for (const auto& args : steps) {
    const auto r = run_cli(args);
    if (r.code != 0) throw std::runtime_error(args[2] + " exited " + std::to_string(r.code) + ": " + r.err);
    log += r.out;
  }
  std::filesystem::path snap;
  for (const auto& e : std::filesystem::directory_iterator(root / "corpus"))
    if (e.path().extension() == ".ndjson" && (snap.empty() || e.path() < snap)) snap = e.path();
  for (const char* fmt : {"json", "csv"}) {
    const auto r = run_cli({"--threads", t, "predict", "--model", p("model/model.rvf"), "--snapshot", snap.string(), "--format", fmt});
    if (r.code != 0) throw std::runtime_error(std::string("predict exited ") + std::to_string(r.code) + ": " + r.err);
    log += r.out;
  }
  return log;
}

}  // namespace rv::test
