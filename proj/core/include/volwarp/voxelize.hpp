#pragma once

#include <string>
#include <utility>
#include <vector>

#include "volwarp/skeleton.hpp"
#include "volwarp/tensor.hpp"

namespace volwarp {

// Binary occupancy over an H x W x D grid, stored as 0.0f / 1.0f.
struct PartMask {
  std::string name;
  Dims3 dims;
  std::vector<float> data;

  PartMask() = default;
  PartMask(std::string name, Dims3 dims);

  float at(int y, int x, int z) const {
    return data[(static_cast<std::size_t>(y) * dims.width + x) * dims.depth + z];
  }
  float& at(int y, int x, int z) {
    return data[(static_cast<std::size_t>(y) * dims.width + x) * dims.depth + z];
  }
  std::size_t popcount() const;
  friend bool operator==(const PartMask&, const PartMask&) = default;
};

struct HeatmapParams {
  double sigma = 2.0;       // voxels
  double truncation = 3.0;  // multiples of sigma

  void validate() const;
};

// Distance from p to the closed segment [a, b].
double segment_distance(const Vec3& p, const Vec3& a, const Vec3& b);

// Voxels whose centers lie within `radius` of the segment [p0, p1].
PartMask capsule_mask(Dims3 dims, const Vec3& p0, const Vec3& p1, double radius,
                      std::string name = {});

struct PartMaskSet {
  std::vector<PartMask> masks;
  // One message per part whose capsule missed the grid entirely.
  std::vector<std::string> warnings;
};

// Segments whose capsules make up `part`: one for two-joint parts, four
// (j0-j2, j1-j3, j0-j1, j2-j3) for four-joint parts.
std::vector<std::pair<Vec3, Vec3>> part_segments(const PartDefinition& part, const Pose& pose);

// Capsule radius of `part` for this pose, before radius_scale.
double part_radius(const PartDefinition& part, const Pose& pose);

// One mask per configured part, in configuration order. Four-joint parts
// rasterize the union of capsules j0-j2, j1-j3, j0-j1 and j2-j3.
PartMaskSet part_masks(const Pose& pose, const SkeletonConfig& cfg, Dims3 dims,
                       double radius_scale = 1.0);

// Stacks masks into an H x W x D x N volume (one channel per part) and back.
Volume stack_masks(const std::vector<PartMask>& masks);
std::vector<PartMask> unstack_masks(const Volume& stacked,
                                    const std::vector<std::string>& names = {});

// Pixels where no part occupies any depth. The foreground union is dilated
// by a disk of radius `dilation` pixels before complementing.
Image background_mask(const std::vector<PartMask>& masks, int dilation = 2);

// Peak-normalized Gaussians, one channel per pose joint, zero beyond
// truncation * sigma.
Volume gaussian_heatmaps(const Pose& pose, Dims3 dims, const HeatmapParams& params);

// In-plane Gaussian around each joint's (y, x) projection, copied to every
// depth layer.
Volume heatmaps_2d_mode(const Pose& pose, Dims3 dims, const HeatmapParams& params);

}  // namespace volwarp
