#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "volwarp/error.hpp"
#include "volwarp/metrics.hpp"

using namespace volwarp;

namespace {

Pose mm_pose(std::vector<Joint> joints) { return Pose(CoordinateSpace::kMillimeter, std::move(joints)); }

Pose random_mm_pose(std::mt19937_64& rng, int joints) {
  std::uniform_real_distribution<double> u(-800, 800);
  std::vector<Joint> out;
  for (int j = 0; j < joints; ++j) out.push_back({"j" + std::to_string(j), Vec3(u(rng), u(rng), u(rng))});
  return mm_pose(out);
}

}  // namespace

TEST_CASE("ssim window") {
  const auto taps = ssim_taps({});
  REQUIRE(taps.size() == 11);
  double sum = 0.0;
  for (double t : taps) sum += t;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(taps[5] > taps[4]);
  CHECK(taps[0] == doctest::Approx(taps[10]));
}

TEST_CASE("ssim of an image with itself is one") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 5; ++trial) {
    const Image a = oracle::random_image(rng, 17, 23, 3);
    CHECK(std::abs(ssim(a, a) - 1.0) < 1e-9);
  }
}

TEST_CASE("ssim of constant black against constant white") {
  Image zero(16, 16, 1), one(16, 16, 1);
  std::fill(one.data().begin(), one.data().end(), 1.0f);
  CHECK(std::abs(ssim(zero, one) - 1e-4 / 1.0001) < 1e-9);
}

TEST_CASE("ssim matches the windowed oracle") {
  std::mt19937_64 rng(72);
  for (int trial = 0; trial < 5; ++trial) {
    const auto [a, b] = oracle::correlated_pair(rng, 32, 32, trial % 2 ? 3 : 1);
    const double expected = oracle::masked_mean(oracle::ssim_map(a, b), a, nullptr);
    CHECK(std::abs(ssim(a, b) - expected) < 1e-6);
    CHECK(std::abs(ssim(a, b) - ssim(b, a)) < 1e-9);
  }
  // Tiny images exercise repeated reflection.
  const Image a = oracle::random_image(rng, 3, 2, 1), b = oracle::random_image(rng, 3, 2, 1);
  CHECK(std::abs(ssim(a, b) - oracle::masked_mean(oracle::ssim_map(a, b), a, nullptr)) < 1e-6);
}

TEST_CASE("ssim drops under a shift") {
  std::mt19937_64 rng(73);
  const Image a = oracle::random_image(rng, 24, 24, 1);
  Image shifted(24, 24, 1);
  for (int y = 0; y < 24; ++y)
    for (int x = 0; x < 24; ++x) shifted.at(y, x) = a.at(y, (x + 3) % 24);
  CHECK(ssim(a, shifted) < 1.0);
}

TEST_CASE("foreground ssim") {
  std::mt19937_64 rng(74);
  const auto [a, b] = oracle::correlated_pair(rng, 32, 32, 3);
  Image ones(32, 32, 1);
  std::fill(ones.data().begin(), ones.data().end(), 1.0f);
  CHECK(ssim_fg(a, b, ones) == ssim(a, b));

  Image checker(32, 32, 1);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x) checker.at(y, x) = (x + y) % 2 ? 1.0f : 0.0f;
  const double expected = oracle::masked_mean(oracle::ssim_map(a, b), a, &checker);
  CHECK(std::abs(ssim_fg(a, b, checker) - expected) < 1e-6);
  CHECK(std::abs(ssim_fg(a, a, checker) - 1.0) < 1e-9);

  CHECK_THROWS_AS(ssim_fg(a, b, Image(32, 32, 1)), Error);
  Image soft = ones;
  soft.at(0, 0) = 0.5f;
  CHECK_THROWS_AS(ssim_fg(a, b, soft), Error);
}

TEST_CASE("ssim input checks") {
  Image a(4, 4, 1), b(4, 5, 1);
  CHECK_THROWS_AS(ssim(a, b), Error);
  Image c(4, 4, 1);
  c.at(0, 0) = 1.5f;
  CHECK_THROWS_AS(ssim(a, c), Error);
  c.at(0, 0) = 1.0f + 5e-7f;
  CHECK_NOTHROW(ssim(a, c));
}

TEST_CASE("pck auc") {
  std::mt19937_64 rng(75);
  const Pose ref = random_mm_pose(rng, 14);
  CHECK(pck_auc(ref, ref).auc == 1.0);

  std::vector<Joint> off;
  for (const auto& j : ref.joints()) off.push_back({j.name, j.position + Vec3(0, 75, 0)});
  const PckResult r = pck_auc(mm_pose(off), ref);
  CHECK(std::abs(r.auc - 76.0 / 151.0) < 1e-12);
  CHECK(r.curve.pck[74] == 0.0);
  CHECK(r.curve.pck[75] == 1.0);

  off.clear();
  for (const auto& j : ref.joints()) off.push_back({j.name, j.position + Vec3(151, 0, 0)});
  CHECK(pck_auc(mm_pose(off), ref).auc == 0.0);
}

TEST_CASE("pck curve is monotone and rigidly invariant") {
  std::mt19937_64 rng(76);
  std::normal_distribution<double> noise(0.0, 60.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Pose ref = random_mm_pose(rng, 14);
    std::vector<Joint> pred;
    for (const auto& j : ref.joints()) pred.push_back({j.name, j.position + Vec3(noise(rng), noise(rng), noise(rng))});
    const PckResult r = pck_auc(mm_pose(pred), ref);
    for (int t = 1; t <= 150; ++t) CHECK(r.curve.pck[t] >= r.curve.pck[t - 1]);
    CHECK(r.auc >= r.curve.pck.front());
    CHECK(r.auc <= r.curve.pck.back());

    const Mat3 q = oracle::random_rotation(rng);
    const Vec3 shift(noise(rng), noise(rng), noise(rng));
    std::vector<Joint> pred_moved, ref_moved;
    for (const auto& j : pred) pred_moved.push_back({j.name, q * j.position + shift});
    for (const auto& j : ref.joints()) ref_moved.push_back({j.name, q * j.position + shift});
    CHECK(std::abs(pck_auc(mm_pose(pred_moved), mm_pose(ref_moved)).auc - r.auc) < 1e-9);
  }
}

TEST_CASE("pck input checks") {
  const Pose a = mm_pose({{"a", Vec3::Zero()}});
  const Pose b = mm_pose({{"b", Vec3::Zero()}});
  CHECK_THROWS_AS(pck_auc(a, b), Error);
  const Pose voxel(CoordinateSpace::kVoxel, {{"a", Vec3::Zero()}});
  CHECK_THROWS_AS(pck_auc(voxel, a), Error);
}
