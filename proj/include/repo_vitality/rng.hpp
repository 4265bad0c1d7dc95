#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace rv {

using Engine = std::mt19937_64;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent sub-seed for a (stream, index, ...) path below `master`. Results do not depend on the
/// order in which sub-streams are created, which keeps parallel runs identical to serial ones.
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(master);
  for (auto p : path) h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

/// Stream tags.
enum class Stream : std::uint64_t { tree = 1, mda = 2, fold = 3, round = 4, baseline = 5, synth = 6 };

inline constexpr std::uint64_t tag(Stream s) { return static_cast<std::uint64_t>(s); }

}  // namespace rv
