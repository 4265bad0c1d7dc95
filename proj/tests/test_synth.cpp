#include <gtest/gtest.h>

#include <algorithm>

#include "helpers.hpp"
#include "repo_vitality/features.hpp"
#include "repo_vitality/synth.hpp"

using namespace rv;
using namespace rv::test;

namespace {

const SynthCorpus& default_corpus() {
  static const SynthCorpus c = synth({}, 7);
  return c;
}

}  // namespace

TEST(Synth, SameSeedSameCorpus) {
  SynthParams p;
  p.n_projects = 40;
  TempDir a, b;
  write_corpus(synth(p, 5), a.path());
  write_corpus(synth(p, 5), b.path());
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(a.path())) {
    ++files;
    EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename().string())) << e.path();
  }
  EXPECT_EQ(files, 41u);
  const auto x = synth(p, 5), y = synth(p, 6);
  EXPECT_NE(serialize_snapshot(x.snapshots[0], ""), serialize_snapshot(y.snapshots[0], ""));
}

TEST(Synth, Prevalence) {
  const auto& c = default_corpus();
  ASSERT_EQ(c.snapshots.size(), 500u);
  EXPECT_EQ(std::count_if(c.labels.begin(), c.labels.end(), [](const auto& l) { return l.label == Label::unmaintained; }), 110);
}

TEST(Synth, LabelsAgreeWithCurationAndLabelRules) {
  const auto& c = default_corpus();
  const auto cur = curate(c.snapshots);
  EXPECT_EQ(cur.kept.size(), c.snapshots.size());
  for (std::size_t i = 0; i < c.snapshots.size(); ++i) {
    const auto& s = c.snapshots[i];
    EXPECT_EQ(s.repo_id, c.labels[i].repo_id);
    EXPECT_NO_THROW(validate(s));
    const auto l = label(s, {}, {});
    ASSERT_TRUE(l) << s.repo_id;
    EXPECT_EQ(*l, c.labels[i]);
  }
}

TEST(Synth, LabelsCsvRoundTrip) {
  TempDir d;
  write_labels_csv(default_corpus().labels, d / "labels.csv");
  EXPECT_EQ(read_labels_csv(d / "labels.csv"), default_corpus().labels);
}

TEST(Synth, IdleLastWindowHasFullGap) {
  // A last window with no commits reports its full length as the longest gap.
  for (const auto& s : default_corpus().snapshots) {
    const auto w = windows({24, 3}, *last_commit(s)).back();
    if (extract_feature(s, Feature::commits, w) != 0) continue;
    EXPECT_EQ(extract_feature(s, Feature::max_days_without_commits, w), 90.0) << s.repo_id;
  }
}

TEST(Synth, TooFewProjects) {
  SynthParams p;
  p.n_projects = 9;
  EXPECT_RV_ERROR(synth(p, 1), ErrorKind::invalid_params);
}
