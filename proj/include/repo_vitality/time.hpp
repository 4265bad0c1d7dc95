#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace rv {

/// All timestamps are UTC with second resolution.
using Timestamp = std::chrono::sys_seconds;

inline constexpr double kSecondsPerDay = 86400.0;

/// Formats as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_timestamp(Timestamp t);

/// Parses ISO-8601 "YYYY-MM-DD[THH:MM[:SS[.fff]]](Z|+HH:MM|-HH:MM)". A date-only value is midnight UTC.
/// A date-time without an explicit zone is rejected. Throws Error(parse_error).
Timestamp parse_timestamp(std::string_view text);

/// Fractional days between two instants (b - a).
inline double days_between(Timestamp a, Timestamp b) {
  return static_cast<double>((b - a).count()) / kSecondsPerDay;
}

inline constexpr std::chrono::seconds days(long long n) { return std::chrono::seconds{n * 86400LL}; }

}  // namespace rv
