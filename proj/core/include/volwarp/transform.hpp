#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "volwarp/tensor.hpp"

namespace volwarp {

using Mat3 = Eigen::Matrix3d;
using Mat2 = Eigen::Matrix2d;

// Similarity transform p -> scale * rotation * p + translation.
struct Helmert3 {
  double scale = 1.0;
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
  // Set when the fit fell back to the collinear-source solution.
  bool degenerate = false;

  static Helmert3 identity() { return {}; }
  // Throws unless scale > 0, rotation is orthonormal with det +1 (1e-6) and
  // all entries are finite.
  void validate() const;
};

Vec3 apply(const Helmert3& t, const Vec3& p);
Helmert3 invert(const Helmert3& t);
// a after b.
Helmert3 compose(const Helmert3& a, const Helmert3& b);

// Least-squares similarity fit of src onto dst in closed form. Requires at
// least 3 pairs. Coincident sources throw; collinear sources use the
// segment-alignment fallback and set `degenerate`.
Helmert3 fit_helmert(std::span<const Vec3> src, std::span<const Vec3> dst);

// p -> linear * p + translation, in the (y, x) plane.
struct Affine2 {
  Mat2 linear = Mat2::Identity();
  Vec2 translation = Vec2::Zero();
  // Set when a collinear or coincident source forced the similarity fallback.
  bool degenerate = false;

  static Affine2 identity() { return {}; }
};

Vec2 apply(const Affine2& a, const Vec2& p);
// Throws when the linear part is singular.
Affine2 invert(const Affine2& a);

// Damped normal-equation fit of a 6-parameter affine map.
Affine2 fit_affine2(std::span<const Vec2> src, std::span<const Vec2> dst);

// Geodesic angle between two rotations, in radians.
double rotation_distance(const Mat3& a, const Mat3& b);

// {"scale":s,"rotation":[[...],[...],[...]],"translation":[...],"degenerate":b}
std::string to_json(const Helmert3& t);
Helmert3 helmert_from_json(std::string_view text);
// {"linear":[[...],[...]],"translation":[...],"degenerate":b}
std::string to_json(const Affine2& a);
Affine2 affine_from_json(std::string_view text);

// A transform file: {"kind":"helmert3"|"affine2","parts":{name: transform,...}}
// with parts in skeleton order.
struct TransformSet {
  std::vector<std::pair<std::string, Helmert3>> helmert;
  std::vector<std::pair<std::string, Affine2>> affine;

  bool is_affine() const { return !affine.empty(); }
  std::size_t size() const { return is_affine() ? affine.size() : helmert.size(); }
};

std::string save_transforms(const TransformSet& set);
TransformSet load_transforms(std::string_view text);

}  // namespace volwarp
