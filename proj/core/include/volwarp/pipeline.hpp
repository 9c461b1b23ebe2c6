#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "volwarp/skeleton.hpp"
#include "volwarp/tensor.hpp"
#include "volwarp/transform.hpp"
#include "volwarp/voxelize.hpp"

namespace volwarp {

// The four combinations of {3D, 2D} warping and {3D, 2D} target pose.
enum class ReposeMode { k3d, k2dWarp, k2dPose, k2dBoth };

const char* to_string(ReposeMode mode);
ReposeMode parse_mode(std::string_view text);
inline bool uses_2d_warp(ReposeMode m) { return m == ReposeMode::k2dWarp || m == ReposeMode::k2dBoth; }
inline bool uses_2d_pose(ReposeMode m) { return m == ReposeMode::k2dPose || m == ReposeMode::k2dBoth; }

struct ReposeOptions {
  ReposeMode mode = ReposeMode::k3d;
  HeatmapParams heatmap;
  double radius_scale = 1.0;
  int threads = 1;
  // Adds wall-clock stage timings to the report, which makes it
  // non-reproducible byte for byte.
  bool timing = false;
};

// Per-part transforms from pose_in to pose_tgt: Helmert3 for 3D warping,
// Affine2 fitted on the (y, x) projections for 2D warping.
TransformSet fit_part_transforms(const SkeletonConfig& cfg, const Pose& pose_in,
                                 const Pose& pose_tgt, ReposeMode mode);

// Warps with whichever transform family the set holds.
Volume warp_with(const Volume& v, const std::vector<PartMask>& masks, const TransformSet& set,
                 int threads = 1);

struct ReposeResult {
  Volume warped;
  Volume heatmaps;
  std::vector<PartMask> masks;
  TransformSet transforms;
  std::string report;  // JSON
};

// part_masks -> correspondences -> fit -> masked warp -> target heatmaps.
// Heatmap channels follow the skeleton's joint order.
ReposeResult pipeline_repose(const Volume& v, const Pose& pose_in, const Pose& pose_tgt,
                             const SkeletonConfig& cfg, const ReposeOptions& options);

}  // namespace volwarp
