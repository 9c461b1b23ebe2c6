#include "volwarp/voxelize.hpp"

#include <algorithm>
#include <cmath>

#include "volwarp/error.hpp"

namespace volwarp {

namespace {

void check_dims(Dims3 dims) {
  if (dims.height < 1 || dims.width < 1 || dims.depth < 1) {
    throw Error("grid dimensions must all be >= 1");
  }
}

// Inclusive index range covering [lo, hi], clipped to [0, n).
std::pair<int, int> clip_range(double lo, double hi, int n) {
  const double first = std::max(0.0, std::ceil(lo));
  const double last = std::min(static_cast<double>(n - 1), std::floor(hi));
  if (first > last) return {0, -1};
  return {static_cast<int>(first), static_cast<int>(last)};
}

// Squared distance from p to [a, b]; shared by every rasterizer here.
double segment_distance_sq(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len_sq = ab.squaredNorm();
  double t = 0.0;
  if (len_sq > 0.0) t = std::clamp((p - a).dot(ab) / len_sq, 0.0, 1.0);
  return (p - (a + t * ab)).squaredNorm();
}

void rasterize_capsule(PartMask& mask, Vec3 p0, Vec3 p1, double radius) {
  // Canonical endpoint order keeps the result bit-symmetric in (p0, p1).
  if (std::lexicographical_compare(p1.begin(), p1.end(), p0.begin(), p0.end())) {
    std::swap(p0, p1);
  }
  const Dims3& d = mask.dims;
  const Vec3 lo = p0.cwiseMin(p1).array() - radius;
  const Vec3 hi = p0.cwiseMax(p1).array() + radius;
  const auto [y0, y1] = clip_range(lo[0], hi[0], d.height);
  const auto [x0, x1] = clip_range(lo[1], hi[1], d.width);
  const auto [z0, z1] = clip_range(lo[2], hi[2], d.depth);
  const double r_sq = radius * radius;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      for (int z = z0; z <= z1; ++z) {
        if (segment_distance_sq(Vec3(y, x, z), p0, p1) <= r_sq) mask.at(y, x, z) = 1.0f;
      }
    }
  }
}

}  // namespace

std::vector<std::pair<Vec3, Vec3>> part_segments(const PartDefinition& part, const Pose& pose) {
  const auto& j = part.joints;
  if (j.size() == 2) return {{pose.at(j[0]), pose.at(j[1])}};
  return {{pose.at(j[0]), pose.at(j[2])},
          {pose.at(j[1]), pose.at(j[3])},
          {pose.at(j[0]), pose.at(j[1])},
          {pose.at(j[2]), pose.at(j[3])}};
}

PartMask::PartMask(std::string name_, Dims3 dims_)
    : name(std::move(name_)), dims(dims_), data(dims_.voxels(), 0.0f) {
  check_dims(dims_);
}

std::size_t PartMask::popcount() const {
  return static_cast<std::size_t>(std::count(data.begin(), data.end(), 1.0f));
}

void HeatmapParams::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error("heatmap: sigma must be > 0");
  if (!(truncation >= 1.0) || !std::isfinite(truncation)) {
    throw Error("heatmap: truncation must be >= 1");
  }
}

double segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  return std::sqrt(segment_distance_sq(p, a, b));
}

PartMask capsule_mask(Dims3 dims, const Vec3& p0, const Vec3& p1, double radius,
                      std::string name) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw Error("capsule: radius must be > 0");
  if (!p0.allFinite() || !p1.allFinite()) throw Error("capsule: endpoints must be finite");
  PartMask mask(std::move(name), dims);
  rasterize_capsule(mask, p0, p1, radius);
  return mask;
}

double part_radius(const PartDefinition& part, const Pose& pose) {
  const auto& j = part.joints;
  double length = 0.0;
  if (j.size() == 2) {
    length = (pose.at(j[1]) - pose.at(j[0])).norm();
  } else {
    // Mean shoulder-to-hip distance over both sides.
    length = 0.5 * ((pose.at(j[2]) - pose.at(j[0])).norm() +
                    (pose.at(j[3]) - pose.at(j[1])).norm());
  }
  return part.radius.radius(length);
}

PartMaskSet part_masks(const Pose& pose, const SkeletonConfig& cfg, Dims3 dims,
                       double radius_scale) {
  check_dims(dims);
  if (!(radius_scale > 0.0)) throw Error("part_masks: radius scale must be > 0");
  PartMaskSet out;
  out.masks.reserve(cfg.parts.size());
  for (const auto& part : cfg.parts) {
    const double radius = part_radius(part, pose) * radius_scale;
    if (!(radius > 0.0)) throw Error("part_masks: part \"" + part.name + "\" has zero radius");
    PartMask mask(part.name, dims);
    for (const auto& [a, b] : part_segments(part, pose)) rasterize_capsule(mask, a, b, radius);
    if (mask.popcount() == 0) {
      out.warnings.push_back("part \"" + part.name + "\" lies entirely outside the grid");
    }
    out.masks.push_back(std::move(mask));
  }
  return out;
}

Volume stack_masks(const std::vector<PartMask>& masks) {
  if (masks.empty()) throw Error("stack_masks: no masks");
  const Dims3 dims = masks.front().dims;
  const int n = static_cast<int>(masks.size());
  Volume out(dims, n);
  for (int i = 0; i < n; ++i) {
    if (masks[i].dims != dims) throw Error("stack_masks: masks differ in size");
    for (std::size_t v = 0; v < dims.voxels(); ++v) {
      out.storage()[v * n + i] = masks[i].data[v];
    }
  }
  return out;
}

std::vector<PartMask> unstack_masks(const Volume& stacked,
                                    const std::vector<std::string>& names) {
  const int n = stacked.channels();
  if (!names.empty() && names.size() != static_cast<std::size_t>(n)) {
    throw Error("unstack_masks: name count does not match channel count");
  }
  std::vector<PartMask> out;
  for (int i = 0; i < n; ++i) {
    PartMask mask(names.empty() ? "part" + std::to_string(i) : names[i], stacked.dims());
    for (std::size_t v = 0; v < stacked.dims().voxels(); ++v) {
      const float value = stacked.storage()[v * n + i];
      if (value != 0.0f && value != 1.0f) throw Error("unstack_masks: mask values must be 0 or 1");
      mask.data[v] = value;
    }
    out.push_back(std::move(mask));
  }
  return out;
}

Image background_mask(const std::vector<PartMask>& masks, int dilation) {
  if (masks.empty()) throw Error("background_mask: empty mask list");
  if (dilation < 0) throw Error("background_mask: dilation must be >= 0");
  const Dims3 dims = masks.front().dims;
  Image fg(dims.height, dims.width, 1);
  for (const auto& m : masks) {
    if (m.dims != dims) throw Error("background_mask: masks differ in size");
    for (int y = 0; y < dims.height; ++y) {
      for (int x = 0; x < dims.width; ++x) {
        for (int z = 0; z < dims.depth; ++z) {
          if (m.at(y, x, z) != 0.0f) {
            fg.at(y, x) = 1.0f;
            break;
          }
        }
      }
    }
  }
  Image bg(dims.height, dims.width, 1);
  const int r_sq = dilation * dilation;
  for (int y = 0; y < dims.height; ++y) {
    for (int x = 0; x < dims.width; ++x) {
      bool covered = false;
      for (int dy = -dilation; dy <= dilation && !covered; ++dy) {
        for (int dx = -dilation; dx <= dilation && !covered; ++dx) {
          const int yy = y + dy;
          const int xx = x + dx;
          if (dy * dy + dx * dx > r_sq || yy < 0 || yy >= dims.height || xx < 0 ||
              xx >= dims.width) {
            continue;
          }
          covered = fg.at(yy, xx) != 0.0f;
        }
      }
      bg.at(y, x) = covered ? 0.0f : 1.0f;
    }
  }
  return bg;
}

Volume gaussian_heatmaps(const Pose& pose, Dims3 dims, const HeatmapParams& params) {
  check_dims(dims);
  params.validate();
  const int joints = static_cast<int>(pose.size());
  Volume out(dims, joints);
  const double reach = params.truncation * params.sigma;
  const double inv_two_var = 1.0 / (2.0 * params.sigma * params.sigma);
  for (int j = 0; j < joints; ++j) {
    const Vec3& p = pose.joints()[j].position;
    const auto [y0, y1] = clip_range(p[0] - reach, p[0] + reach, dims.height);
    const auto [x0, x1] = clip_range(p[1] - reach, p[1] + reach, dims.width);
    const auto [z0, z1] = clip_range(p[2] - reach, p[2] + reach, dims.depth);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        for (int z = z0; z <= z1; ++z) {
          const double dy = y - p[0];
          const double dx = x - p[1];
          const double dz = z - p[2];
          const double dist_sq = dy * dy + dx * dx + dz * dz;
          if (dist_sq > reach * reach) continue;
          out.at(y, x, z, j) = static_cast<float>(std::exp(-dist_sq * inv_two_var));
        }
      }
    }
  }
  return out;
}

Volume heatmaps_2d_mode(const Pose& pose, Dims3 dims, const HeatmapParams& params) {
  check_dims(dims);
  params.validate();
  const int joints = static_cast<int>(pose.size());
  Volume out(dims, joints);
  const double reach = params.truncation * params.sigma;
  const double inv_two_var = 1.0 / (2.0 * params.sigma * params.sigma);
  for (int j = 0; j < joints; ++j) {
    const Vec3& p = pose.joints()[j].position;
    const auto [y0, y1] = clip_range(p[0] - reach, p[0] + reach, dims.height);
    const auto [x0, x1] = clip_range(p[1] - reach, p[1] + reach, dims.width);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double dy = y - p[0];
        const double dx = x - p[1];
        const double dist_sq = dy * dy + dx * dx;
        if (dist_sq > reach * reach) continue;
        const auto value = static_cast<float>(std::exp(-dist_sq * inv_two_var));
        for (int z = 0; z < dims.depth; ++z) out.at(y, x, z, j) = value;
      }
    }
  }
  return out;
}

}  // namespace volwarp
