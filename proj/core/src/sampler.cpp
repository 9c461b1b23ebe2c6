#include "volwarp/sampler.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include <json.hpp>

#include "volwarp/error.hpp"

namespace volwarp {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json entry_json(const EvalEntry& e) {
  ordered_json j;
  j["subject"] = e.subject;
  j["clothing"] = e.clothing;
  j["frame"] = e.frame;
  j["pose"] = e.pose_path;
  j["image"] = e.image_path;
  return j;
}

std::string id_field(const ordered_json& j, const char* key) {
  const auto& v = j.at(key);
  std::string out;
  if (v.is_string()) {
    out = v.get<std::string>();
  } else if (v.is_number_integer()) {
    out = v.dump();
  } else {
    throw Error(std::string("manifest: \"") + key + "\" must be a string or integer");
  }
  if (out.empty()) throw Error(std::string("manifest: empty \"") + key + "\"");
  return out;
}

}  // namespace

std::uint64_t SplitMix64::next() {
  state_ += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::below(std::uint64_t n) {
  // High 64 bits of the 128-bit product next() * n.
  const std::uint64_t a = next();
  const std::uint64_t a_lo = a & 0xFFFFFFFFull;
  const std::uint64_t a_hi = a >> 32;
  const std::uint64_t n_lo = n & 0xFFFFFFFFull;
  const std::uint64_t n_hi = n >> 32;
  const std::uint64_t lo_lo = a_lo * n_lo;
  const std::uint64_t hi_lo = a_hi * n_lo;
  const std::uint64_t lo_hi = a_lo * n_hi;
  const std::uint64_t hi_hi = a_hi * n_hi;
  const std::uint64_t mid = (lo_lo >> 32) + (hi_lo & 0xFFFFFFFFull) + lo_hi;
  return hi_hi + (hi_lo >> 32) + (mid >> 32);
}

std::vector<EvalPair> sample_eval_pairs(const EvalManifest& manifest, std::size_t n) {
  if (manifest.entries.empty()) throw Error("eval-pairs: manifest has no entries");
  if (n < 1) throw Error("eval-pairs: n must be >= 1");

  std::map<std::pair<std::string, std::string>, std::vector<const EvalEntry*>> groups;
  for (const auto& e : manifest.entries) groups[{e.subject, e.clothing}].push_back(&e);
  std::vector<std::vector<const EvalEntry*>> ordered;
  bool usable = false;
  for (auto& [key, frames] : groups) {
    std::stable_sort(frames.begin(), frames.end(),
                     [](const EvalEntry* a, const EvalEntry* b) { return a->frame < b->frame; });
    usable = usable || frames.size() >= 2;
    ordered.push_back(std::move(frames));
  }
  if (!usable) throw Error("eval-pairs: no clothing layout has at least two frames");

  SplitMix64 rng(manifest.seed);
  std::vector<EvalPair> pairs;
  pairs.reserve(n);
  while (pairs.size() < n) {
    const auto& frames = ordered[rng.below(ordered.size())];
    if (frames.size() < 2) continue;
    const std::uint64_t a = rng.below(frames.size());
    std::uint64_t b = rng.below(frames.size() - 1);
    if (b >= a) ++b;
    pairs.emplace_back(*frames[a], *frames[b]);
  }
  return pairs;
}

EvalManifest load_manifest(std::string_view text) {
  EvalManifest m;
  try {
    const auto j = ordered_json::parse(text.begin(), text.end());
    if (j.contains("seed")) m.seed = j["seed"].get<std::uint64_t>();
    for (const auto& e : j.at("entries")) {
      m.entries.push_back({id_field(e, "subject"), id_field(e, "clothing"), id_field(e, "frame"),
                           e.value("pose", ""), e.value("image", "")});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("manifest: ") + e.what());
  }
  if (m.entries.empty()) throw Error("manifest: no entries");
  return m;
}

std::string save_manifest(const EvalManifest& manifest) {
  ordered_json j;
  j["seed"] = manifest.seed;
  ordered_json entries = ordered_json::array();
  for (const auto& e : manifest.entries) entries.push_back(entry_json(e));
  j["entries"] = std::move(entries);
  return j.dump(2) + "\n";
}

std::string save_pairs(const std::vector<EvalPair>& pairs, std::uint64_t seed) {
  ordered_json j;
  j["seed"] = seed;
  j["n"] = pairs.size();
  ordered_json list = ordered_json::array();
  for (const auto& [src, tgt] : pairs) {
    ordered_json p;
    p["source"] = entry_json(src);
    p["target"] = entry_json(tgt);
    list.push_back(std::move(p));
  }
  j["pairs"] = std::move(list);
  return j.dump(2) + "\n";
}

}  // namespace volwarp
