#include <gtest/gtest.h>

#include <nlohmann/json.hpp>
#include <regex>

#include "helpers.hpp"
#include "repo_vitality/error.hpp"
#include "repo_vitality/snapshot.hpp"

using namespace rv;
using namespace rv::test;

namespace {

ProjectSnapshot sample() {
  return SnapshotBuilder("acme/widget")
      .commit(ts("2017-01-02T03:04:05Z"), "alice")
      .add(EventKind::issue_open, ts("2017-02-01T00:00:00Z"), "bob")
      .add(EventKind::issue_close, ts("2017-02-03T00:00:00Z"), "bob")
      .add(EventKind::pr_open, ts("2017-03-01T00:00:00Z"), "carol")
      .add(EventKind::pr_close, ts("2017-03-02T00:00:00Z"), "carol")
      .add(EventKind::pr_merge, ts("2017-03-02T00:00:00Z"), "carol")
      .add(EventKind::fork, ts("2017-04-01T00:00:00Z"), "dave")
      .add(EventKind::release, ts("2018-11-20T00:00:00Z"), "alice")
      .add(EventKind::owner_repo_created, ts("2016-01-01T00:00:00Z"), "acme")
      .add(EventKind::owner_commit, ts("2017-05-01T00:00:00Z"), "acme")
      .topics({"cpp", "tools, misc"})
      .readme("# Widget\n\nUnicode: caf\xc3\xa9\n")
      .build();
}

}  // namespace

TEST(Time, FormatAndParseUtc) {
  const auto t = ts("2018-11-30T12:34:56Z");
  EXPECT_EQ(format_timestamp(t), "2018-11-30T12:34:56Z");
  EXPECT_EQ(ts("2018-11-30T14:34:56+02:00"), t);
  EXPECT_EQ(ts("2018-11-30T07:34:56-05:00"), t);
  EXPECT_EQ(ts("2018-11-30"), day(2018, 11, 30));
  EXPECT_EQ(ts("2018-11-30T12:34:56.789Z"), t);
}

TEST(Time, RejectsZonelessDateTime) {
  EXPECT_RV_ERROR(parse_timestamp("2018-11-30T12:34:56"), ErrorKind::parse_error);
  EXPECT_RV_ERROR(parse_timestamp("yesterday"), ErrorKind::parse_error);
  EXPECT_RV_ERROR(parse_timestamp("2018-02-30"), ErrorKind::parse_error);
}

TEST(Snapshot, RoundTripPreservesEverything) {
  TempDir dir;
  const auto s = sample();
  const auto path = dir / snapshot_file_name(s.repo_id);
  store_snapshot(s, path);
  const auto loaded = load_snapshot(path);
  EXPECT_FALSE(loaded.resorted);
  EXPECT_EQ(loaded.snapshot, s);
}

TEST(Snapshot, EmptyEventsRoundTrip) {
  TempDir dir;
  auto s = SnapshotBuilder("x/empty").build();
  s.owner_scope = OwnerScope::repo_local;
  store_snapshot(s, dir / "e.ndjson");
  EXPECT_EQ(load_snapshot(dir / "e.ndjson").snapshot, s);
}

TEST(Snapshot, TwoStoresAreByteIdentical) {
  TempDir dir;
  const auto s = sample();
  store_snapshot(s, dir / "a.ndjson");
  store_snapshot(s, dir / "b.ndjson");
  const auto a = slurp(dir / "a.ndjson");
  const auto b = slurp(dir / "b.ndjson");
  // Only the sidecar name differs.
  EXPECT_EQ(std::regex_replace(a, std::regex("a\\.README"), "X"), std::regex_replace(b, std::regex("b\\.README"), "X"));
  store_snapshot(s, dir / "a.ndjson");
  EXPECT_EQ(slurp(dir / "a.ndjson"), a);
}

TEST(Snapshot, HeaderHasExactlyTheDocumentedFields) {
  const auto text = serialize_snapshot(sample(), "r.md");
  const auto header = nlohmann::json::parse(text.substr(0, text.find('\n')));
  std::vector<std::string> keys;
  for (const auto& [k, v] : header.items()) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  EXPECT_EQ(keys, (std::vector<std::string>{"archived", "as_of", "owner", "readme_path", "repo_id", "size_loc", "stars", "topics"}));
}

TEST(Snapshot, EveryTimestampCarriesUtcSuffix) {
  const auto text = serialize_snapshot(sample(), "");
  const std::regex iso("\"(\\d{4}-\\d\\d-\\d\\dT[^\"]*)\"");
  int n = 0;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), iso); it != std::sregex_iterator(); ++it, ++n)
    EXPECT_EQ((*it)[1].str().back(), 'Z') << (*it)[1].str();
  EXPECT_EQ(n, 11);
}

TEST(Snapshot, TimestampAfterAsOfIsInvariantViolation) {
  TempDir dir;
  auto text = serialize_snapshot(sample(), "");
  text.replace(text.find("2018-11-20T"), 10, "2019-01-01");
  std::ofstream(dir / "bad.ndjson", std::ios::binary) << text;
  EXPECT_RV_ERROR(load_snapshot(dir / "bad.ndjson"), ErrorKind::invariant_violation);
}

TEST(Snapshot, TruncatedFileNamesLastValidRecord) {
  TempDir dir;
  const auto text = serialize_snapshot(sample(), "");
  // Cut in the middle of the fourth line.
  std::size_t cut = 0;
  for (int i = 0; i < 3; ++i) cut = text.find('\n', cut) + 1;
  std::ofstream(dir / "t.ndjson", std::ios::binary) << text.substr(0, cut + 5);
  try {
    load_snapshot(dir / "t.ndjson");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::parse_error);
    EXPECT_NE(std::string(e.what()).find("last valid record: line 3"), std::string::npos) << e.what();
  }
  // Cut on a line boundary: caught by the missing trailer.
  std::ofstream(dir / "u.ndjson", std::ios::binary) << text.substr(0, cut);
  EXPECT_RV_ERROR(load_snapshot(dir / "u.ndjson"), ErrorKind::parse_error);
}

TEST(Snapshot, UnsortedEventsAreResortedAndReported) {
  TempDir dir;
  auto s = sample();
  std::swap(s.events[1], s.events[5]);
  std::ofstream(dir / "u.ndjson", std::ios::binary) << serialize_snapshot(s, "");
  const auto r = load_snapshot(dir / "u.ndjson");
  EXPECT_TRUE(r.resorted);
  auto expected = sample();
  expected.readme_text.clear();
  // Equal timestamps keep their file order under a stable sort.
  EXPECT_TRUE(std::is_sorted(r.snapshot.events.begin(), r.snapshot.events.end(),
                             [](const Event& a, const Event& b) { return a.timestamp < b.timestamp; }));
  EXPECT_EQ(r.snapshot.events.size(), expected.events.size());
}

TEST(Snapshot, ValidateRejectsAnonymousCommit) {
  auto s = SnapshotBuilder().commit(day(2018, 1, 1), "").build();
  EXPECT_RV_ERROR(validate(s), ErrorKind::invariant_violation);
}

TEST(Snapshot, UnknownEventKindIsParseError) {
  TempDir dir;
  auto text = serialize_snapshot(sample(), "");
  text.replace(text.find("\"fork\""), 6, "\"star\"");
  std::ofstream(dir / "k.ndjson", std::ios::binary) << text;
  EXPECT_RV_ERROR(load_snapshot(dir / "k.ndjson"), ErrorKind::parse_error);
}

TEST(Snapshot, DirectoryLoadIsSortedByFileName) {
  TempDir dir;
  for (const auto* id : {"b/two", "a/one", "c/three"}) {
    auto s = SnapshotBuilder(id).commit(day(2018, 1, 1)).build();
    store_snapshot(s, dir / snapshot_file_name(id));
  }
  const auto all = load_snapshot_dir(dir.path());
  ASSERT_EQ(all.size(), 3u);
  EXPECT_EQ(all[0].repo_id, "a/one");
  EXPECT_EQ(all[2].repo_id, "c/three");
}
