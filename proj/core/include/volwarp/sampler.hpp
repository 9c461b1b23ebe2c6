#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace volwarp {

// SplitMix64 stream. Constants are part of the file-level contract so other
// implementations reproduce pair lists bit for bit:
//   state += 0x9E3779B97F4A7C15
//   z = (state ^ (state >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
// below(n) maps a draw to [0, n) as (draw * n) >> 64 in 128-bit arithmetic.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t state_;
};

struct EvalEntry {
  std::string subject;
  std::string clothing;
  std::string frame;
  std::string pose_path;
  std::string image_path;

  friend bool operator==(const EvalEntry&, const EvalEntry&) = default;
};

struct EvalManifest {
  std::vector<EvalEntry> entries;
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kDefaultEvalPairs = 10000;

using EvalPair = std::pair<EvalEntry, EvalEntry>;

// Draws n (source, target) pairs. Each draw picks one (subject, clothing)
// group uniformly (groups sorted by key; groups with fewer than two frames
// are redrawn), then two distinct frames of it (frames sorted by id): a =
// below(size), b = below(size - 1), b += (b >= a).
std::vector<EvalPair> sample_eval_pairs(const EvalManifest& manifest,
                                        std::size_t n = kDefaultEvalPairs);

// {"seed": u64, "entries": [{"subject","clothing","frame","pose","image"}, ...]}
EvalManifest load_manifest(std::string_view json);
std::string save_manifest(const EvalManifest& manifest);
// {"seed": u64, "n": count, "pairs": [{"source": entry, "target": entry}, ...]}
std::string save_pairs(const std::vector<EvalPair>& pairs, std::uint64_t seed);

}  // namespace volwarp
