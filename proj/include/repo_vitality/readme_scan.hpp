#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "repo_vitality/dataset.hpp"

namespace rv {

/// The published phrases that declare a project unmaintained (duplicates removed).
const std::vector<std::string>& default_sentences();

struct SentenceMatch {
  std::string sentence;
  std::size_t offset{0};  // byte offset into the original README text

  friend bool operator==(const SentenceMatch&, const SentenceMatch&) = default;
};

struct ScanResult {
  std::string repo_id;
  std::vector<SentenceMatch> matched;  // ordered by offset, then sentence list order
  bool needs_manual_review{false};     // always true when anything matched
};

/// Lower-cased prose with code fences, inline code, link URLs, HTML tags and emphasis markers
/// removed and whitespace collapsed. `origin[i]` is the source byte of output byte i.
struct NormalizedText {
  std::string text;
  std::vector<std::size_t> origin;
};

NormalizedText normalize_markdown(std::string_view markdown);
/// Whitespace collapse, lower-casing and apostrophe folding only.
std::string normalize_phrase(std::string_view phrase);

ScanResult scan(std::string_view readme_text, const std::vector<std::string>& sentences = default_sentences());
ScanResult scan(std::string_view repo_id, std::string_view readme_text, const std::vector<std::string>& sentences);

/// Fraction of ground-truth repos predicted unmaintained. Throws Error(missing_prediction) naming
/// the absent ids and Error(undefined_result) for an empty ground truth.
double recall_against_ground_truth(const std::map<std::string, Label>& predictions,
                                   const std::set<std::string>& ground_truth);

/// One phrase per line; blank lines and '#' comments skipped.
std::vector<std::string> read_sentence_file(const std::string& path);

}  // namespace rv
