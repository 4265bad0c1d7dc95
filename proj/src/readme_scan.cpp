#include "repo_vitality/readme_scan.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "repo_vitality/error.hpp"

namespace rv {

namespace {

constexpr std::string_view kRightQuote = "\xE2\x80\x99";  // U+2019

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

// Appends with whitespace collapse, lower-casing and apostrophe folding.
class Emitter {
 public:
  explicit Emitter(NormalizedText& out) : out_(out) {}

  void put(char c, std::size_t origin) {
    if (is_space(c)) {
      pending_space_ = !out_.text.empty();
      space_origin_ = origin;
      return;
    }
    if (pending_space_) {
      out_.text += ' ';
      out_.origin.push_back(space_origin_);
      pending_space_ = false;
    }
    out_.text += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    out_.origin.push_back(origin);
  }

  void space(std::size_t origin) { put(' ', origin); }

 private:
  NormalizedText& out_;
  bool pending_space_{false};
  std::size_t space_origin_{0};
};

bool fence_line(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && i < 3 && line[i] == ' ') ++i;
  const auto rest = line.substr(i);
  return rest.rfind("```", 0) == 0 || rest.rfind("~~~", 0) == 0;
}

void emit_inline(std::string_view line, std::size_t base, Emitter& em) {
  std::size_t i = 0;
  // Leading heading / blockquote markers.
  while (i < line.size() && (line[i] == ' ' || line[i] == '#' || line[i] == '>')) ++i;
  if (i > 0) em.space(base);
  while (i < line.size()) {
    const char c = line[i];
    if (c == '`') {
      std::size_t run = 0;
      while (i + run < line.size() && line[i + run] == '`') ++run;
      const auto close = line.find(std::string(run, '`'), i + run);
      if (close != std::string_view::npos) {
        em.space(base + i);
        i = close + run;
        continue;
      }
      i += run;  // unmatched: drop the ticks, keep the text
      continue;
    }
    if (c == '<' && i + 1 < line.size() &&
        (std::isalpha(static_cast<unsigned char>(line[i + 1])) || line[i + 1] == '/' || line[i + 1] == '!')) {
      const auto close = line.find('>', i + 1);
      if (close != std::string_view::npos) {
        em.space(base + i);
        i = close + 1;
        continue;
      }
    }
    if (c == '[' || (c == '!' && i + 1 < line.size() && line[i + 1] == '[')) {
      const std::size_t open = c == '!' ? i + 1 : i;
      const auto close = line.find(']', open + 1);
      if (close != std::string_view::npos && close + 1 < line.size() && line[close + 1] == '(') {
        const auto paren = line.find(')', close + 2);
        if (paren != std::string_view::npos) {
          emit_inline(line.substr(open + 1, close - open - 1), base + open + 1, em);
          i = paren + 1;
          continue;
        }
      }
    }
    if (c == '*' || c == '_' || c == '~') {
      ++i;
      continue;
    }
    if (line.substr(i, kRightQuote.size()) == kRightQuote) {
      em.put('\'', base + i);
      i += kRightQuote.size();
      continue;
    }
    em.put(c, base + i);
    ++i;
  }
}

}  // namespace

const std::vector<std::string>& default_sentences() {
  static const std::vector<std::string> kSentences = {
      "no longer under development",
      "no longer supported or updated",
      "deprecation notice",
      "dead project",
      "deprecated",
      "unmaintained",
      "no longer being actively maintained",
      "not maintained anymore",
      "not under active development",
      "no longer supported",
      "is not supported",
      "is not more supported",
      "no new features should be expected",
      "isn't maintained anymore",
  };
  return kSentences;
}

NormalizedText normalize_markdown(std::string_view md) {
  NormalizedText out;
  Emitter em(out);
  bool in_fence = false;
  std::size_t pos = 0;
  while (pos <= md.size()) {
    auto eol = md.find('\n', pos);
    if (eol == std::string_view::npos) eol = md.size();
    const auto line = md.substr(pos, eol - pos);
    if (fence_line(line)) {
      in_fence = !in_fence;
      em.space(pos);
    } else if (!in_fence) {
      emit_inline(line, pos, em);
      em.space(eol);
    }
    if (eol == md.size()) break;
    pos = eol + 1;
  }
  return out;
}

std::string normalize_phrase(std::string_view phrase) {
  std::string out;
  bool pending = false;
  for (std::size_t i = 0; i < phrase.size(); ++i) {
    if (is_space(phrase[i])) {
      pending = !out.empty();
      continue;
    }
    if (pending) out += ' ';
    pending = false;
    if (phrase.substr(i, kRightQuote.size()) == kRightQuote) {
      out += '\'';
      i += kRightQuote.size() - 1;
      continue;
    }
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(phrase[i])));
  }
  return out;
}

ScanResult scan(std::string_view repo_id, std::string_view readme_text, const std::vector<std::string>& sentences) {
  ScanResult result;
  result.repo_id = std::string(repo_id);
  const auto norm = normalize_markdown(readme_text);
  std::vector<std::pair<std::size_t, std::size_t>> hits;  // (offset, sentence index)
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    const auto needle = normalize_phrase(sentences[s]);
    if (needle.empty()) continue;
    for (auto at = norm.text.find(needle); at != std::string::npos; at = norm.text.find(needle, at + 1))
      hits.emplace_back(norm.origin[at], s);
  }
  std::sort(hits.begin(), hits.end());
  for (const auto& [offset, s] : hits) result.matched.push_back({sentences[s], offset});
  result.needs_manual_review = !result.matched.empty();
  return result;
}

ScanResult scan(std::string_view readme_text, const std::vector<std::string>& sentences) {
  return scan({}, readme_text, sentences);
}

double recall_against_ground_truth(const std::map<std::string, Label>& predictions, const std::set<std::string>& ground_truth) {
  if (ground_truth.empty()) throw Error(ErrorKind::undefined_result, "recall over an empty ground truth");
  std::string missing;
  std::size_t hit = 0;
  for (const auto& id : ground_truth) {
    auto it = predictions.find(id);
    if (it == predictions.end()) {
      missing += (missing.empty() ? "" : ", ") + id;
      continue;
    }
    hit += it->second == Label::unmaintained;
  }
  if (!missing.empty()) throw Error(ErrorKind::missing_prediction, "no prediction for " + missing);
  return static_cast<double>(hit) / static_cast<double>(ground_truth.size());
}

std::vector<std::string> read_sentence_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_failure, "cannot open " + path);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    out.push_back(line.substr(first));
  }
  return out;
}

}  // namespace rv
