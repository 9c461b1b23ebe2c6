#pragma once

#include <string_view>
#include <vector>

#include "volwarp/skeleton.hpp"
#include "volwarp/tensor.hpp"
#include "volwarp/voxelize.hpp"

namespace volwarp {

// Synthetic stand-in for a learned feature volume: part i writes a
// signature into channel i inside its capsule, so reposing can be checked
// against exact expectations.
struct MannequinSpec {
  Dims3 dims{64, 64, 16};
  int channels = 12;
  Pose pose;
  SkeletonConfig skeleton = default_skeleton();
  double radius_scale = 1.0;
  // Scale channel values by 1 - 0.5 * distance / radius instead of a flat 1.
  bool falloff = false;
};

struct Mannequin {
  Volume volume;
  std::vector<PartMask> masks;
};

// Channel i < parts is 1 (or the falloff value) inside part i and 0
// elsewhere. Channel k >= parts holds ((i + k) % parts + 1) / parts for the
// highest such value among parts covering the voxel.
Mannequin make_mannequin(const MannequinSpec& spec);

// Standing figure scaled into dims. Variant "rest" or "reach" (left arm
// raised, right knee forward, head tilted).
Pose mannequin_pose(Dims3 dims, std::string_view variant = "rest");

}  // namespace volwarp
