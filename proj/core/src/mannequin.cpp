#include "volwarp/mannequin.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <string>

#include "volwarp/error.hpp"

namespace volwarp {

namespace {

struct NormalizedJoint {
  const char* name;
  std::array<double, 3> yxz;
};

constexpr std::array<NormalizedJoint, 14> kRest = {{
    {"head_top", {0.08, 0.50, 0.50}},   {"neck", {0.22, 0.50, 0.50}},
    {"l_shoulder", {0.26, 0.64, 0.50}}, {"r_shoulder", {0.26, 0.36, 0.50}},
    {"l_elbow", {0.42, 0.70, 0.56}},    {"r_elbow", {0.42, 0.30, 0.44}},
    {"l_wrist", {0.56, 0.74, 0.62}},    {"r_wrist", {0.56, 0.26, 0.38}},
    {"l_hip", {0.56, 0.58, 0.50}},      {"r_hip", {0.56, 0.42, 0.50}},
    {"l_knee", {0.74, 0.59, 0.56}},     {"r_knee", {0.74, 0.41, 0.44}},
    {"l_ankle", {0.92, 0.60, 0.50}},    {"r_ankle", {0.92, 0.40, 0.50}},
}};

}  // namespace

Mannequin make_mannequin(const MannequinSpec& spec) {
  spec.skeleton.validate();
  const int parts = static_cast<int>(spec.skeleton.parts.size());
  if (spec.channels < parts) {
    throw Error("mannequin: need at least " + std::to_string(parts) + " channels, got " +
                std::to_string(spec.channels));
  }
  if (spec.pose.space() != CoordinateSpace::kVoxel) {
    throw Error("mannequin: pose must be in voxel space");
  }
  PartMaskSet set = part_masks(spec.pose, spec.skeleton, spec.dims, spec.radius_scale);
  Volume volume(spec.dims, spec.channels);
  const Dims3& d = spec.dims;
  for (int i = 0; i < parts; ++i) {
    const auto& part = spec.skeleton.parts[i];
    const auto segments = part_segments(part, spec.pose);
    const double radius = part_radius(part, spec.pose) * spec.radius_scale;
    const PartMask& mask = set.masks[i];
    for (int y = 0; y < d.height; ++y) {
      for (int x = 0; x < d.width; ++x) {
        for (int z = 0; z < d.depth; ++z) {
          if (mask.at(y, x, z) == 0.0f) continue;
          float value = 1.0f;
          if (spec.falloff) {
            double dist = std::numeric_limits<double>::infinity();
            for (const auto& [a, b] : segments) dist = std::min(dist, segment_distance(Vec3(y, x, z), a, b));
            value = static_cast<float>(1.0 - 0.5 * std::min(1.0, dist / radius));
          }
          volume.at(y, x, z, i) = value;
          for (int k = parts; k < spec.channels; ++k) {
            const float signature = static_cast<float>((i + k) % parts + 1) / parts;
            volume.at(y, x, z, k) = std::max(volume.at(y, x, z, k), signature);
          }
        }
      }
    }
  }
  return {std::move(volume), std::move(set.masks)};
}

Pose mannequin_pose(Dims3 dims, std::string_view variant) {
  if (variant != "rest" && variant != "reach") {
    throw Error("mannequin: unknown pose variant \"" + std::string(variant) + "\"");
  }
  auto table = kRest;
  if (variant == "reach") {
    for (auto& j : table) {
      const std::string_view name = j.name;
      if (name == "l_elbow") j.yxz = {0.16, 0.76, 0.50};
      if (name == "l_wrist") j.yxz = {0.06, 0.80, 0.56};
      if (name == "r_knee") j.yxz = {0.70, 0.40, 0.30};
      if (name == "head_top") j.yxz = {0.08, 0.54, 0.52};
    }
  }
  const std::array<int, 3> extent = {dims.height, dims.width, dims.depth};
  std::vector<Joint> joints;
  for (const auto& j : table) {
    Vec3 p;
    for (int k = 0; k < 3; ++k) p[k] = j.yxz[k] * (extent[k] - 1);
    joints.push_back({j.name, p});
  }
  return Pose(CoordinateSpace::kVoxel, std::move(joints));
}

}  // namespace volwarp
