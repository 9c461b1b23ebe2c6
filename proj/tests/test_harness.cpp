#include <doctest.h>

#include <set>

#include "volwarp/error.hpp"
#include "volwarp/mannequin.hpp"
#include "volwarp/pipeline.hpp"
#include "volwarp/sampler.hpp"
#include "volwarp/warp.hpp"

using namespace volwarp;

namespace {

MannequinSpec small_spec() {
  MannequinSpec spec;
  spec.dims = {40, 32, 10};
  spec.channels = 12;
  spec.pose = mannequin_pose(spec.dims);
  return spec;
}

Pose shifted(const Pose& p, const Vec3& k) {
  std::vector<Joint> joints;
  for (const auto& j : p.joints()) joints.push_back({j.name, j.position + k});
  return Pose(p.space(), std::move(joints));
}

EvalManifest manifest_with(std::vector<std::tuple<std::string, std::string, std::string>> ids, std::uint64_t seed) {
  EvalManifest m;
  m.seed = seed;
  for (auto& [s, c, f] : ids) m.entries.push_back({s, c, f, s + "/" + c + "/" + f + ".json", s + "/" + c + "/" + f + ".png"});
  return m;
}

}  // namespace

TEST_CASE("mannequin is deterministic and part-indexed") {
  const MannequinSpec spec = small_spec();
  const Mannequin a = make_mannequin(spec);
  const Mannequin b = make_mannequin(spec);
  CHECK(a.volume == b.volume);
  REQUIRE(a.masks.size() == 10);
  for (int i = 0; i < 10; ++i) {
    std::size_t nonzero = 0;
    for (int y = 0; y < 40; ++y)
      for (int x = 0; x < 32; ++x)
        for (int z = 0; z < 10; ++z) {
          const float v = a.volume.at(y, x, z, i);
          if (v != 0.0f) {
            ++nonzero;
            CHECK(a.masks[i].at(y, x, z) == 1.0f);
          }
        }
    CHECK(nonzero == a.masks[i].popcount());
  }
  // Extra channels carry a signature wherever any part is present.
  for (int y = 0; y < 40; ++y)
    for (int x = 0; x < 32; ++x)
      for (int z = 0; z < 10; ++z) {
        bool any = false;
        for (const auto& m : a.masks) any = any || m.at(y, x, z) != 0.0f;
        CHECK((a.volume.at(y, x, z, 10) != 0.0f) == any);
      }
}

TEST_CASE("mannequin falloff stays within (0.5, 1]") {
  MannequinSpec spec = small_spec();
  spec.falloff = true;
  const Mannequin m = make_mannequin(spec);
  for (int i = 0; i < 10; ++i) {
    for (std::size_t v = 0; v < spec.dims.voxels(); ++v) {
      const float f = m.volume.storage()[v * spec.channels + i];
      if (m.masks[i].data[v] == 0.0f) {
        CHECK(f == 0.0f);
      } else {
        CHECK(f >= 0.5f);
        CHECK(f <= 1.0f);
      }
    }
  }
}

TEST_CASE("mannequin needs a channel per part") {
  MannequinSpec spec = small_spec();
  spec.channels = 9;
  CHECK_THROWS_AS(make_mannequin(spec), Error);
}

TEST_CASE("splitmix stream matches the reference constants") {
  // Reference outputs of SplitMix64 seeded with 0.
  SplitMix64 rng(0);
  CHECK(rng.next() == 0xE220A8397B1DCDAFull);
  CHECK(rng.next() == 0x6E789E6AA1B965F4ull);
  CHECK(rng.next() == 0x06C45D188009454Full);

  SplitMix64 r(99);
  for (int i = 0; i < 1000; ++i) CHECK(r.below(7) < 7);
  SplitMix64 edge(1);
  CHECK(edge.below(1) == 0);
}

TEST_CASE("eval pairs are reproducible") {
  auto m = manifest_with({{"s1", "c1", "f1"}, {"s1", "c1", "f2"}, {"s1", "c1", "f3"},
                          {"s2", "c1", "f1"}, {"s2", "c1", "f2"}, {"s3", "c9", "f1"}},
                         7);
  const auto a = sample_eval_pairs(m, 200);
  const auto b = sample_eval_pairs(m, 200);
  CHECK(a == b);
  CHECK(save_pairs(a, 7) == save_pairs(b, 7));
  for (const auto& [src, tgt] : a) {
    CHECK(src.subject == tgt.subject);
    CHECK(src.clothing == tgt.clothing);
    CHECK(src.frame != tgt.frame);
    CHECK(src.subject != "s3");
  }
  m.seed = 8;
  CHECK(sample_eval_pairs(m, 200) != a);

  // Manifest order does not matter.
  auto reversed = manifest_with({{"s3", "c9", "f1"}, {"s2", "c1", "f2"}, {"s2", "c1", "f1"},
                                 {"s1", "c1", "f3"}, {"s1", "c1", "f2"}, {"s1", "c1", "f1"}},
                                7);
  CHECK(sample_eval_pairs(reversed, 200) == a);
}

TEST_CASE("two-frame manifest only yields the two orderings") {
  const auto m = manifest_with({{"s", "c", "a"}, {"s", "c", "b"}}, 3);
  const auto pairs = sample_eval_pairs(m, 3);
  REQUIRE(pairs.size() == 3);
  for (const auto& [src, tgt] : pairs) {
    CHECK(((src.frame == "a" && tgt.frame == "b") || (src.frame == "b" && tgt.frame == "a")));
  }
}

TEST_CASE("eval pair defaults and failures") {
  const auto m = manifest_with({{"s", "c", "a"}, {"s", "c", "b"}, {"t", "c", "a"}}, 1);
  CHECK(kDefaultEvalPairs == 10000);
  CHECK(sample_eval_pairs(m).size() == 10000);
  CHECK_THROWS_AS(sample_eval_pairs(manifest_with({{"s", "c", "a"}, {"t", "c", "a"}}, 1), 5), Error);
  CHECK_THROWS_AS(sample_eval_pairs(EvalManifest{}, 5), Error);
  CHECK_THROWS_AS(sample_eval_pairs(m, 0), Error);
}

TEST_CASE("manifest JSON round trips") {
  const auto m = manifest_with({{"s", "c", "a"}, {"s", "c", "b"}}, 0xFFFFFFFFFFFFFFFFull);
  const EvalManifest back = load_manifest(save_manifest(m));
  CHECK(back.seed == m.seed);
  CHECK(back.entries == m.entries);
  CHECK(load_manifest(R"({"entries":[{"subject":1,"clothing":2,"frame":3}]})").entries[0].subject == "1");
  CHECK_THROWS_AS(load_manifest(R"({"entries":[]})"), Error);
  CHECK_THROWS_AS(load_manifest(R"({"entries":[{"subject":"","clothing":"c","frame":"f"}]})"), Error);
}

TEST_CASE("pipeline with identical poses reproduces the masked volume") {
  const MannequinSpec spec = small_spec();
  const Mannequin m = make_mannequin(spec);
  const ReposeResult r = pipeline_repose(m.volume, spec.pose, spec.pose, spec.skeleton, {});
  Volume expected(spec.dims, spec.channels);
  for (int y = 0; y < 40; ++y)
    for (int x = 0; x < 32; ++x)
      for (int z = 0; z < 10; ++z)
        for (int c = 0; c < spec.channels; ++c) {
          float best = -INFINITY;
          for (const auto& mask : m.masks) best = std::max(best, mask.at(y, x, z) * m.volume.at(y, x, z, c));
          expected.at(y, x, z, c) = best;
        }
  CHECK(r.warped == expected);
  CHECK(r.heatmaps.channels() == 14);
}

TEST_CASE("pipeline integer translation shifts the mannequin") {
  const MannequinSpec spec = small_spec();
  const Mannequin m = make_mannequin(spec);
  const Vec3 k(3, -2, 1);
  for (ReposeMode mode : {ReposeMode::k3d, ReposeMode::k2dWarp}) {
    ReposeOptions options;
    options.mode = mode;
    const Vec3 shift = mode == ReposeMode::k3d ? k : Vec3(k[0], k[1], 0);
    const ReposeResult r = pipeline_repose(m.volume, spec.pose, shifted(spec.pose, shift), spec.skeleton, options);
    const Dims3 d = spec.dims;
    int compared = 0;
    for (int y = 0; y < d.height; ++y)
      for (int x = 0; x < d.width; ++x)
        for (int z = 0; z < d.depth; ++z) {
          const int sy = y - int(shift[0]), sx = x - int(shift[1]), sz = z - int(shift[2]);
          if (!d.contains(sy, sx, sz)) continue;
          for (int c = 0; c < spec.channels; ++c) {
            CHECK(r.warped.at(y, x, z, c) == m.volume.at(sy, sx, sz, c));
            ++compared;
          }
        }
    CHECK(compared > 0);
  }
}

TEST_CASE("pipeline modes produce the expected heatmap structure") {
  const MannequinSpec spec = small_spec();
  const Mannequin m = make_mannequin(spec);
  const Pose target = mannequin_pose(spec.dims, "reach");
  for (ReposeMode mode : {ReposeMode::k3d, ReposeMode::k2dWarp, ReposeMode::k2dPose, ReposeMode::k2dBoth}) {
    ReposeOptions options;
    options.mode = mode;
    const ReposeResult r = pipeline_repose(m.volume, spec.pose, target, spec.skeleton, options);
    CHECK(r.warped.dims() == spec.dims);
    CHECK(r.transforms.is_affine() == uses_2d_warp(mode));
    bool identical_slices = true;
    for (int y = 0; y < spec.dims.height; ++y)
      for (int x = 0; x < spec.dims.width; ++x)
        for (int z = 1; z < spec.dims.depth; ++z)
          for (int j = 0; j < 14; ++j) identical_slices = identical_slices && r.heatmaps.at(y, x, z, j) == r.heatmaps.at(y, x, 0, j);
    CHECK(identical_slices == uses_2d_pose(mode));
    CHECK(r.report.find(std::string("\"mode\": \"") + to_string(mode) + "\"") != std::string::npos);
  }
}

TEST_CASE("pipeline rejects bad inputs") {
  const MannequinSpec spec = small_spec();
  const Mannequin m = make_mannequin(spec);
  const Pose mm(CoordinateSpace::kMillimeter, spec.pose.joints());
  CHECK_THROWS_AS(pipeline_repose(m.volume, mm, mm, spec.skeleton, {}), Error);
  SkeletonConfig nine = spec.skeleton;
  nine.parts.pop_back();
  CHECK_THROWS_AS(pipeline_repose(m.volume, spec.pose, spec.pose, nine, {}), Error);
  CHECK_THROWS_AS(parse_mode("4d"), Error);
}
