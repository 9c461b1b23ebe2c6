#include "volwarp/pipeline.hpp"

#include <chrono>

#include <json.hpp>

#include "volwarp/error.hpp"
#include "volwarp/warp.hpp"

namespace volwarp {

namespace {

using ordered_json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

const char* to_string(ReposeMode mode) {
  switch (mode) {
    case ReposeMode::k3d: return "3d";
    case ReposeMode::k2dWarp: return "2d-warp";
    case ReposeMode::k2dPose: return "2d-pose";
    case ReposeMode::k2dBoth: return "2d-both";
  }
  return "3d";
}

ReposeMode parse_mode(std::string_view text) {
  if (text == "3d") return ReposeMode::k3d;
  if (text == "2d-warp") return ReposeMode::k2dWarp;
  if (text == "2d-pose") return ReposeMode::k2dPose;
  if (text == "2d-both") return ReposeMode::k2dBoth;
  throw Error("unknown mode \"" + std::string(text) + "\"");
}

TransformSet fit_part_transforms(const SkeletonConfig& cfg, const Pose& pose_in,
                                 const Pose& pose_tgt, ReposeMode mode) {
  TransformSet set;
  for (const auto& part : cfg.parts) {
    const Correspondences pairs = correspondences(part, pose_in, pose_tgt);
    try {
      if (uses_2d_warp(mode)) {
        std::vector<Vec2> src;
        std::vector<Vec2> dst;
        for (std::size_t k = 0; k < pairs.src.size(); ++k) {
          src.emplace_back(pairs.src[k][0], pairs.src[k][1]);
          dst.emplace_back(pairs.dst[k][0], pairs.dst[k][1]);
        }
        set.affine.emplace_back(part.name, fit_affine2(src, dst));
      } else {
        set.helmert.emplace_back(part.name, fit_helmert(pairs.src, pairs.dst));
      }
    } catch (const Error& e) {
      throw Error("part \"" + part.name + "\": " + e.what());
    }
  }
  return set;
}

Volume warp_with(const Volume& v, const std::vector<PartMask>& masks, const TransformSet& set,
                 int threads) {
  if (set.size() != masks.size()) {
    throw Error("warp: " + std::to_string(masks.size()) + " masks but " +
                std::to_string(set.size()) + " transforms");
  }
  for (std::size_t i = 0; i < masks.size(); ++i) {
    const std::string& name = set.is_affine() ? set.affine[i].first : set.helmert[i].first;
    if (name != masks[i].name) {
      throw Error("warp: transform \"" + name + "\" is paired with mask \"" + masks[i].name + "\"");
    }
  }
  if (set.is_affine()) {
    std::vector<Affine2> affines;
    for (const auto& [name, a] : set.affine) affines.push_back(a);
    return masked_warp_2d(v, masks, affines, threads);
  }
  std::vector<Helmert3> transforms;
  for (const auto& [name, t] : set.helmert) transforms.push_back(t);
  return masked_warp_3d(v, masks, transforms, threads);
}

ReposeResult pipeline_repose(const Volume& v, const Pose& pose_in, const Pose& pose_tgt,
                             const SkeletonConfig& cfg, const ReposeOptions& options) {
  cfg.validate();
  if (pose_in.space() != CoordinateSpace::kVoxel || pose_tgt.space() != CoordinateSpace::kVoxel) {
    throw Error("pipeline: poses must be in voxel space");
  }
  const Pose in = pose_in.reordered(cfg.joint_names);
  const Pose tgt = pose_tgt.reordered(cfg.joint_names);
  ReposeResult out;
  ordered_json timing;

  auto start = Clock::now();
  PartMaskSet set = part_masks(in, cfg, v.dims(), options.radius_scale);
  out.masks = std::move(set.masks);
  timing["masks"] = seconds_since(start);

  start = Clock::now();
  out.transforms = fit_part_transforms(cfg, in, tgt, options.mode);
  timing["fit"] = seconds_since(start);

  start = Clock::now();
  out.warped = warp_with(v, out.masks, out.transforms, options.threads);
  timing["warp"] = seconds_since(start);

  start = Clock::now();
  out.heatmaps = uses_2d_pose(options.mode) ? heatmaps_2d_mode(tgt, v.dims(), options.heatmap)
                                            : gaussian_heatmaps(tgt, v.dims(), options.heatmap);
  timing["heatmaps"] = seconds_since(start);

  ordered_json report;
  report["mode"] = to_string(options.mode);
  report["dims"] = {v.height(), v.width(), v.depth()};
  report["channels"] = v.channels();
  report["heatmap"] = {{"sigma", options.heatmap.sigma},
                       {"truncation", options.heatmap.truncation}};
  report["radius_scale"] = options.radius_scale;
  report["transforms"] = ordered_json::parse(save_transforms(out.transforms));
  ordered_json degenerate = ordered_json::array();
  ordered_json voxels = ordered_json::object();
  for (std::size_t i = 0; i < out.masks.size(); ++i) {
    const bool flag = out.transforms.is_affine() ? out.transforms.affine[i].second.degenerate
                                                 : out.transforms.helmert[i].second.degenerate;
    if (flag) degenerate.push_back(out.masks[i].name);
    voxels[out.masks[i].name] = out.masks[i].popcount();
  }
  report["degenerate_parts"] = std::move(degenerate);
  report["mask_voxels"] = std::move(voxels);
  report["warnings"] = set.warnings;
  if (options.timing) report["timing_seconds"] = std::move(timing);
  out.report = report.dump(2) + "\n";
  return out;
}

}  // namespace volwarp
