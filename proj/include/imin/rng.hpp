#pragma once

// Counter-based random streams.
//
// Every random decision in the library is a pure function of a 64-bit key and
// a counter, so results never depend on how work is split across threads.
// The mixer is the splitmix64 output function (Steele, Lea, Flood 2014).

#include <cstdint>

namespace imin {

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Key of the independent sub-stream `stream` of `master`.
constexpr std::uint64_t derive_stream(std::uint64_t master, std::uint64_t stream) noexcept {
  return mix64(mix64(master ^ 0x5851f42d4c957f2dULL) + (stream + 1) * kGoldenGamma);
}

/// The `counter`-th 64-bit draw of the stream identified by `key`.
constexpr std::uint64_t counter_draw(std::uint64_t key, std::uint64_t counter) noexcept {
  return mix64(key + (counter + 1) * kGoldenGamma);
}

// Fixed stream tags, kept apart from the small integers used for greedy rounds.
namespace streams {
inline constexpr std::uint64_t kProbabilities = 0x7072'6f62'0000'0001ULL;
inline constexpr std::uint64_t kEvaluation = 0x6576'616c'0000'0002ULL;
inline constexpr std::uint64_t kSeedSelection = 0x7365'6564'0000'0003ULL;
inline constexpr std::uint64_t kRandomBlockers = 0x7261'6e64'0000'0004ULL;
inline constexpr std::uint64_t kRepetition = 0x7265'7073'0000'0005ULL;
}  // namespace streams

}  // namespace imin
