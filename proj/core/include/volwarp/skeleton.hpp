#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "volwarp/tensor.hpp"

namespace volwarp {

enum class CoordinateSpace { kVoxel, kMillimeter };

const char* to_string(CoordinateSpace space);

struct Joint {
  std::string name;
  Vec3 position;
};

// Ordered named joints. Positions use the volume axis order (y, x, z) in
// voxel space; millimeter poses only need a consistent Euclidean frame.
class Pose {
 public:
  Pose() = default;
  Pose(CoordinateSpace space, std::vector<Joint> joints);

  CoordinateSpace space() const { return space_; }
  const std::vector<Joint>& joints() const { return joints_; }
  std::size_t size() const { return joints_.size(); }

  bool contains(std::string_view name) const;
  // Throws Error when the joint is missing.
  const Vec3& at(std::string_view name) const;

  // Same joints reordered to match names; throws if any name is missing.
  Pose reordered(const std::vector<std::string>& names) const;

  friend bool operator==(const Pose& a, const Pose& b);

 private:
  CoordinateSpace space_ = CoordinateSpace::kVoxel;
  std::vector<Joint> joints_;
};

// Capsule radius for a part: a fixed value, or fraction * bone length with a
// lower bound.
struct RadiusRule {
  enum class Kind { kFixed, kFraction };
  Kind kind = Kind::kFraction;
  double value = 0.25;
  double minimum = 2.0;

  static RadiusRule fixed(double voxels) { return {Kind::kFixed, voxels, 0.0}; }
  static RadiusRule fraction(double f, double minimum) {
    return {Kind::kFraction, f, minimum};
  }
  double radius(double bone_length) const;
};

inline constexpr std::string_view kShoulderMidpoint = "shoulder_midpoint";

struct PartDefinition {
  std::string name;
  // Two joints for limbs and head, four for the torso
  // ([l_shoulder, r_shoulder, l_hip, r_hip] ordering for the default torso).
  std::vector<std::string> joints;
  // A joint name or kShoulderMidpoint; present iff joints.size() == 2.
  std::optional<std::string> anchor;
  RadiusRule radius;
};

struct SkeletonConfig {
  std::vector<std::string> joint_names;
  std::vector<PartDefinition> parts;

  // Checks name uniqueness, part shape and joint references.
  void validate() const;
  const PartDefinition& part(std::string_view name) const;
};

// 14 joints, 10 parts.
SkeletonConfig default_skeleton();

std::string save_pose(const Pose& pose);
Pose load_pose(std::string_view json);
std::string save_skeleton(const SkeletonConfig& cfg);
SkeletonConfig load_skeleton(std::string_view json);

struct Correspondences {
  std::vector<Vec3> src;
  std::vector<Vec3> dst;
};

// Point pairs for fitting one part's transform: the defining joints, plus the
// anchor for two-joint parts.
Correspondences correspondences(const PartDefinition& part, const Pose& pose_in,
                                const Pose& pose_tgt);

// Resolves a joint name or the derived shoulder midpoint.
Vec3 resolve_point(const Pose& pose, std::string_view name);

}  // namespace volwarp
