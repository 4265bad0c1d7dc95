#include "repo_vitality/time.hpp"

#include <charconv>
#include <cstdio>

#include "repo_vitality/error.hpp"

namespace rv {

using namespace std::chrono;

std::string format_timestamp(Timestamp t) {
  const auto day = floor<std::chrono::days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss hms{t - day};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02lldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                static_cast<long long>(hms.seconds().count()));
  return buf;
}

namespace {

class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  int digits(std::size_t n) {
    if (pos_ + n > text_.size()) fail("unexpected end");
    int value = 0;
    const auto* first = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, first + n, value);
    if (ec != std::errc{} || ptr != first + n) fail("expected digits");
    pos_ += n;
    return value;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  bool accept(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool done() const { return pos_ == text_.size(); }
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorKind::parse_error,
                "timestamp '" + std::string(text_) + "' at offset " + std::to_string(pos_) + ": " + why);
  }

 private:
  std::string_view text_;
  std::size_t pos_{0};
};

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
  Cursor c(text);
  const int y = c.digits(4);
  c.expect('-');
  const int mo = c.digits(2);
  c.expect('-');
  const int d = c.digits(2);
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) c.fail("invalid calendar date");
  Timestamp t = sys_days{ymd};
  if (c.done()) return t;

  if (!c.accept('T') && !c.accept(' ')) c.fail("expected 'T'");
  const int hh = c.digits(2);
  c.expect(':');
  const int mm = c.digits(2);
  int ss = 0;
  if (c.accept(':')) {
    ss = c.digits(2);
    if (c.accept('.')) {
      while (c.peek() >= '0' && c.peek() <= '9') c.digits(1);
    }
  }
  if (hh > 23 || mm > 59 || ss > 60) c.fail("time out of range");
  t += hours{hh} + minutes{mm} + seconds{ss};

  if (c.accept('Z')) {
  } else if (c.peek() == '+' || c.peek() == '-') {
    const int sign = c.accept('+') ? 1 : (c.accept('-'), -1);
    const int oh = c.digits(2);
    c.accept(':');
    const int om = c.digits(2);
    t -= sign * (hours{oh} + minutes{om});
  } else {
    c.fail("missing UTC designator or offset");
  }
  if (!c.done()) c.fail("trailing characters");
  return t;
}

}  // namespace rv
