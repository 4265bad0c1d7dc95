#include <gtest/gtest.h>

#include "helpers.hpp"
#include "repo_vitality/dataset.hpp"
#include "repo_vitality/error.hpp"

using namespace rv;
using namespace rv::test;

namespace {

ProjectSnapshot spanning(std::string id, int span_days) {
  const auto end = day(2018, 11, 1);
  return SnapshotBuilder(std::move(id)).commit(end - days(span_days)).commit(end).loc(10000).build();
}

}  // namespace

TEST(Curate, OneYearSpanIsShortHistory) {
  const auto r = curate({spanning("a/one-year", 365)});
  ASSERT_EQ(r.rejected.size(), 1u);
  EXPECT_EQ(r.rejected[0].reason, RejectReason::short_history);
  EXPECT_TRUE(r.kept.empty());
}

TEST(Curate, AwesomeListTopicIsExcluded) {
  auto s = spanning("a/list", 1100);
  s.topics = {"awesome-lists"};
  const auto r = curate({s});
  ASSERT_EQ(r.rejected.size(), 1u);
  EXPECT_EQ(r.rejected[0].reason, RejectReason::excluded_topic);
}

TEST(Curate, ThreeYearProjectWithCodeIsKept) {
  const auto r = curate({spanning("a/good", 3 * 365)});
  EXPECT_EQ(r.kept, std::vector<std::size_t>{0});
  EXPECT_TRUE(r.rejected.empty());
}

TEST(Curate, FirstMatchingFilterWins) {
  auto s = spanning("a/all-bad", 100);
  s.size_loc = 0;
  s.topics = {"books"};
  auto t = spanning("a/no-code", 1000);
  t.size_loc = 0;
  t.topics = {"books"};
  const auto r = curate({s, t});
  ASSERT_EQ(r.rejected.size(), 2u);
  EXPECT_EQ(r.rejected[0].reason, RejectReason::short_history);
  EXPECT_EQ(r.rejected[1].reason, RejectReason::no_loc);
}

TEST(Curate, BoundaryAndNoCommits) {
  EXPECT_EQ(curate({spanning("a/exact", 730)}).kept.size(), 1u);
  EXPECT_EQ(curate({spanning("a/under", 729)}).kept.size(), 0u);
  EXPECT_EQ(curate({SnapshotBuilder("a/none").build()}).rejected.at(0).reason, RejectReason::short_history);
  EXPECT_TRUE(curate({}).kept.empty());
}

TEST(Curate, KeepsInputOrderAndPartitionsPool) {
  std::vector<ProjectSnapshot> pool;
  for (int i = 0; i < 20; ++i) pool.push_back(spanning("p/" + std::to_string(i), i % 3 == 0 ? 100 : 800 + i));
  const auto r = curate(pool);
  EXPECT_EQ(r.kept.size() + r.rejected.size(), pool.size());
  EXPECT_TRUE(std::is_sorted(r.kept.begin(), r.kept.end()));
  for (auto i : r.kept) EXPECT_NE(i % 3, 0u);
}

TEST(Label, RecentReleaseIsActive) {
  auto s = SnapshotBuilder().add(EventKind::release, day(2018, 11, 20)).build();
  const auto l = label(s, {}, {});
  ASSERT_TRUE(l);
  EXPECT_EQ(l->label, Label::active);
  EXPECT_EQ(l->label_source, LabelSource::recent_release);
}

TEST(Label, ReleaseWindowIsThirtyDays) {
  const auto as_of = day(2018, 11, 30);
  EXPECT_TRUE(label(SnapshotBuilder().add(EventKind::release, as_of - days(30)).build(), {}, {}));
  EXPECT_FALSE(label(SnapshotBuilder().add(EventKind::release, as_of - days(31)).build(), {}, {}));
}

TEST(Label, ArchivedWithoutReleaseIsUnmaintained) {
  const auto l = label(SnapshotBuilder().archived().build(), {}, {});
  ASSERT_TRUE(l);
  EXPECT_EQ(l->label, Label::unmaintained);
  EXPECT_EQ(l->label_source, LabelSource::archived);
}

TEST(Label, DeclaredListIsUnmaintained) {
  const auto l = label(SnapshotBuilder("x/y").build(), {}, {"x/y"});
  ASSERT_TRUE(l);
  EXPECT_EQ(l->label_source, LabelSource::declared_list);
}

TEST(Label, ResidualIsUnlabeled) { EXPECT_FALSE(label(SnapshotBuilder().build(), {}, {})); }

TEST(Label, ConflictingEvidenceIsAnError) {
  auto s = SnapshotBuilder("x/y").archived().add(EventKind::release, day(2018, 11, 25)).build();
  EXPECT_RV_ERROR(label(s, {}, {}), ErrorKind::label_conflict);
  s.archived = false;
  EXPECT_RV_ERROR(label(s, {}, {"x/y"}), ErrorKind::label_conflict);
}

TEST(Label, ActiveIffRecentRelease) {
  for (int mask = 0; mask < 8; ++mask) {
    SnapshotBuilder b("m/p");
    if (mask & 1) b.add(EventKind::release, day(2018, 11, 25));
    if (mask & 2) b.archived();
    const std::set<std::string> declared = (mask & 4) ? std::set<std::string>{"m/p"} : std::set<std::string>{};
    try {
      const auto l = label(b.build(), {}, declared);
      if (l) EXPECT_EQ(l->label == Label::active, l->label_source == LabelSource::recent_release);
    } catch (const Error& e) {
      EXPECT_TRUE((mask & 1) && (mask & 6));
    }
  }
}

TEST(Label, StringRoundTrip) {
  for (auto l : {Label::active, Label::unmaintained}) EXPECT_EQ(label_from_string(to_string(l)), l);
  for (auto s : {LabelSource::recent_release, LabelSource::archived, LabelSource::declared_list})
    EXPECT_EQ(label_source_from_string(to_string(s)), s);
  EXPECT_RV_ERROR(label_from_string("dormant"), ErrorKind::parse_error);
}
