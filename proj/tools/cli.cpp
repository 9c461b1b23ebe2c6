#include "cli.hpp"

#include <chrono>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "volwarp/error.hpp"
#include "volwarp/mannequin.hpp"
#include "volwarp/metrics.hpp"
#include "volwarp/pipeline.hpp"
#include "volwarp/png_io.hpp"
#include "volwarp/sampler.hpp"
#include "volwarp/skeleton.hpp"
#include "volwarp/volt.hpp"
#include "volwarp/voxelize.hpp"
#include "volwarp/warp.hpp"

namespace volwarp::cli {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string read_text(const fs::path& path) {
  const auto bytes = read_file(path);
  return {bytes.begin(), bytes.end()};
}

bool is_png(const fs::path& path) {
  auto ext = path.extension().string();
  for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return ext == ".png";
}

Image load_image(const fs::path& path) {
  if (is_png(path)) return read_png(path);
  return read_volt(path).image();
}

void store_image(const fs::path& path, const Image& image, TensorKind kind = TensorKind::kImage) {
  if (is_png(path)) {
    write_png(path, image);
  } else {
    write_volt(path, image, kind);
  }
}

Volume load_volume(const fs::path& path) { return read_volt(path).volume(); }

Pose load_pose_file(const fs::path& path) { return load_pose(read_text(path)); }

SkeletonConfig load_skeleton_or_default(const std::string& path) {
  if (path.empty()) return default_skeleton();
  return load_skeleton(read_text(path));
}

Dims3 to_dims(const std::vector<int>& v) {
  if (v.size() != 3) throw Error("--dims needs three values H,W,D");
  return {v[0], v[1], v[2]};
}

// Depth slice z of a volume as an H x W x C image.
Image depth_slice(const Volume& v, int z) {
  if (z < 0 || z >= v.depth()) throw Error("--slice is outside the volume depth");
  Image out(v.height(), v.width(), v.channels());
  for (int y = 0; y < v.height(); ++y) {
    for (int x = 0; x < v.width(); ++x) {
      const auto src = v.voxel(y, x, z);
      for (int c = 0; c < v.channels(); ++c) out.at(y, x, c) = src[c];
    }
  }
  return out;
}

Image load_metric_input(const fs::path& path, int slice) {
  if (is_png(path)) return read_png(path);
  VoltTensor t = read_volt(path);
  if (t.is_volume()) {
    if (slice < 0) throw Error(path.string() + " is a volume; pass --slice to compare a depth slice");
    return depth_slice(t.volume(), slice);
  }
  return t.image();
}

void emit_json(const ordered_json& j, std::ostream& out, const std::string& path) {
  const std::string text = j.dump(2) + "\n";
  out << text;
  if (!path.empty()) write_file(path, text);
}

void add_mode_option(CLI::App* cmd, std::string& mode) {
  cmd->add_option("--mode", mode, "Warp / target-pose mode")
      ->check(CLI::IsMember({"3d", "2d-warp", "2d-pose", "2d-both"}))
      ->capture_default_str();
}

void add_dims_option(CLI::App* cmd, std::vector<int>& dims, bool required) {
  auto* opt = cmd->add_option("--dims", dims, "Grid size H,W,D")
                  ->delimiter(',')
                  ->expected(3)
                  ->check(CLI::PositiveNumber);
  if (required) opt->required();
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"volwarp: volumetric articulated feature warping and evaluation"};
  app.require_subcommand(1);
  app.fallthrough();

  int threads = 1;
  app.add_option("--threads", threads, "Worker threads")->check(CLI::Range(1, 256))->capture_default_str();

  // Option storage shared by subcommands.
  std::string in, out_path, ref, mask_path, masks_path, pose_path, pose_in, pose_tgt;
  std::string skeleton_path, transforms_path, report_path, fg_path, bg_path;
  std::string heatmap_out, masks_out, pose_out, variant = "rest", mode = "3d";
  std::vector<int> dims;
  double sigma = 2.0, truncation = 3.0, radius_scale = 1.0;
  int dilate = 2, depth = 0, channels = 0, mannequin_channels = 12, slice = -1;
  std::uint64_t seed = 0;
  std::size_t count = kDefaultEvalPairs;
  bool falloff = false, use_mannequin = false, timing = false;

  auto* mask_cmd = app.add_subcommand("mask", "Rasterize the ten part masks of a pose");
  mask_cmd->add_option("--pose", pose_path, "Voxel-space pose JSON")->required();
  add_dims_option(mask_cmd, dims, true);
  mask_cmd->add_option("--skeleton", skeleton_path, "Skeleton config JSON");
  mask_cmd->add_option("--radius-scale", radius_scale)->check(CLI::PositiveNumber);
  mask_cmd->add_option("--out", out_path, "Stacked H x W x D x parts mask (.volt)")->required();
  mask_cmd->add_option("--report", report_path);

  auto* heatmap_cmd = app.add_subcommand("heatmap", "Gaussian joint heatmaps of a pose");
  heatmap_cmd->add_option("--pose", pose_path)->required();
  add_dims_option(heatmap_cmd, dims, true);
  heatmap_cmd->add_option("--skeleton", skeleton_path, "Orders channels by skeleton joints");
  heatmap_cmd->add_option("--sigma", sigma)->check(CLI::PositiveNumber)->capture_default_str();
  heatmap_cmd->add_option("--truncation", truncation)->check(CLI::Range(1.0, 1e9))->capture_default_str();
  add_mode_option(heatmap_cmd, mode);
  heatmap_cmd->add_option("--out", out_path)->required();

  auto* fit_cmd = app.add_subcommand("fit", "Fit per-part transforms between two poses");
  fit_cmd->add_option("--pose-in", pose_in)->required();
  fit_cmd->add_option("--pose-tgt", pose_tgt)->required();
  fit_cmd->add_option("--skeleton", skeleton_path);
  add_mode_option(fit_cmd, mode);
  fit_cmd->add_option("--out", out_path, "Transforms JSON")->required();

  auto* warp_cmd = app.add_subcommand("warp", "Masked per-part warp with max composition");
  warp_cmd->add_option("--in", in, "Feature volume (.volt)")->required();
  warp_cmd->add_option("--masks", masks_path, "Stacked masks (.volt)")->required();
  warp_cmd->add_option("--transforms", transforms_path)->required();
  add_mode_option(warp_cmd, mode);
  warp_cmd->add_option("--out", out_path)->required();

  auto* composite_cmd = app.add_subcommand("composite", "Alpha-blend foreground over background");
  composite_cmd->add_option("--fg", fg_path)->required();
  composite_cmd->add_option("--mask", mask_path, "1-channel foreground weights")->required();
  composite_cmd->add_option("--bg", bg_path)->required();
  composite_cmd->add_option("--out", out_path)->required();

  auto* bgmask_cmd = app.add_subcommand("bgmask", "Background mask from part masks");
  bgmask_cmd->add_option("--masks", masks_path)->required();
  bgmask_cmd->add_option("--dilate", dilate)->check(CLI::NonNegativeNumber)->capture_default_str();
  bgmask_cmd->add_option("--out", out_path)->required();

  auto* inpaint_cmd = app.add_subcommand("inpaint", "Fill masked-out pixels from the background");
  inpaint_cmd->add_option("--in", in)->required();
  inpaint_cmd->add_option("--mask", mask_path, "Background mask, 1 = known")->required();
  inpaint_cmd->add_option("--out", out_path)->required();

  auto* lift_cmd = app.add_subcommand("lift", "Split image channels into depth x channels");
  lift_cmd->add_option("--in", in)->required();
  lift_cmd->add_option("--depth", depth)->required()->check(CLI::PositiveNumber);
  lift_cmd->add_option("--channels", channels)->required()->check(CLI::PositiveNumber);
  lift_cmd->add_option("--out", out_path)->required();

  auto* project_cmd = app.add_subcommand("project", "Merge depth and channels into image channels");
  project_cmd->add_option("--in", in)->required();
  project_cmd->add_option("--out", out_path)->required();

  auto* ssim_cmd = app.add_subcommand("ssim", "SSIM and foreground SSIM between two images");
  ssim_cmd->add_option("--in", in)->required();
  ssim_cmd->add_option("--ref", ref)->required();
  ssim_cmd->add_option("--mask", mask_path, "Binary foreground mask for ssim_fg");
  ssim_cmd->add_option("--slice", slice, "Depth slice to compare when inputs are volumes");
  ssim_cmd->add_option("--report", report_path);

  auto* auc_cmd = app.add_subcommand("pose-auc", "PCK curve and AUC@150mm");
  auc_cmd->add_option("--in", in, "Predicted millimeter pose")->required();
  auc_cmd->add_option("--ref", ref, "Reference millimeter pose")->required();
  auc_cmd->add_option("--report", report_path);

  auto* mannequin_cmd = app.add_subcommand("mannequin", "Synthetic part-indexed feature volume");
  add_dims_option(mannequin_cmd, dims, false);
  mannequin_cmd->add_option("--channels", mannequin_channels)->capture_default_str();
  mannequin_cmd->add_option("--pose", pose_path, "Voxel pose (default: built-in figure)");
  mannequin_cmd->add_option("--variant", variant, "Built-in figure")
      ->check(CLI::IsMember({"rest", "reach"}))
      ->capture_default_str();
  mannequin_cmd->add_option("--skeleton", skeleton_path);
  mannequin_cmd->add_option("--radius-scale", radius_scale)->check(CLI::PositiveNumber);
  mannequin_cmd->add_flag("--falloff", falloff, "Radial falloff instead of flat values");
  mannequin_cmd->add_option("--out", out_path)->required();
  mannequin_cmd->add_option("--masks-out", masks_out);
  mannequin_cmd->add_option("--pose-out", pose_out);

  auto* pairs_cmd = app.add_subcommand("eval-pairs", "Seeded evaluation pair sampler");
  pairs_cmd->add_option("--in", in, "Manifest JSON")->required();
  auto* seed_opt = pairs_cmd->add_option("--seed", seed, "Overrides the manifest seed");
  pairs_cmd->add_option("--n", count)->check(CLI::PositiveNumber)->capture_default_str();
  pairs_cmd->add_option("--out", out_path)->required();

  auto* pipeline_cmd = app.add_subcommand("pipeline", "Masks, fit, warp and target heatmaps in one run");
  pipeline_cmd->add_option("--in", in, "Feature volume (.volt)");
  pipeline_cmd->add_flag("--mannequin", use_mannequin, "Use a synthetic mannequin built on --pose-in");
  add_dims_option(pipeline_cmd, dims, false);
  pipeline_cmd->add_option("--channels", mannequin_channels)->capture_default_str();
  pipeline_cmd->add_option("--pose-in", pose_in)->required();
  pipeline_cmd->add_option("--pose-tgt", pose_tgt)->required();
  pipeline_cmd->add_option("--skeleton", skeleton_path);
  add_mode_option(pipeline_cmd, mode);
  pipeline_cmd->add_option("--sigma", sigma)->check(CLI::PositiveNumber)->capture_default_str();
  pipeline_cmd->add_option("--truncation", truncation)->check(CLI::Range(1.0, 1e9))->capture_default_str();
  pipeline_cmd->add_option("--radius-scale", radius_scale)->check(CLI::PositiveNumber);
  pipeline_cmd->add_option("--out", out_path, "Warped volume (.volt)")->required();
  pipeline_cmd->add_option("--heatmap-out", heatmap_out);
  pipeline_cmd->add_option("--masks-out", masks_out);
  pipeline_cmd->add_option("--report", report_path);
  pipeline_cmd->add_flag("--timing", timing, "Report stage timings (report JSON and stderr)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*mask_cmd) {
      const SkeletonConfig cfg = load_skeleton_or_default(skeleton_path);
      const Pose pose = load_pose_file(pose_path);
      const PartMaskSet set = part_masks(pose, cfg, to_dims(dims), radius_scale);
      for (const auto& w : set.warnings) err << "warning: " << w << "\n";
      write_volt(out_path, stack_masks(set.masks), TensorKind::kMask);
      if (!report_path.empty()) {
        ordered_json report;
        ordered_json parts = ordered_json::array();
        for (const auto& m : set.masks) parts.push_back({{"name", m.name}, {"voxels", m.popcount()}});
        report["parts"] = std::move(parts);
        report["warnings"] = set.warnings;
        write_file(report_path, report.dump(2) + "\n");
      }
    } else if (*heatmap_cmd) {
      Pose pose = load_pose_file(pose_path);
      if (!skeleton_path.empty()) pose = pose.reordered(load_skeleton(read_text(skeleton_path)).joint_names);
      const HeatmapParams params{sigma, truncation};
      const Dims3 d = to_dims(dims);
      const Volume h = uses_2d_pose(parse_mode(mode)) ? heatmaps_2d_mode(pose, d, params)
                                                      : gaussian_heatmaps(pose, d, params);
      write_volt(out_path, h);
    } else if (*fit_cmd) {
      const SkeletonConfig cfg = load_skeleton_or_default(skeleton_path);
      cfg.validate();
      const Pose a = load_pose_file(pose_in).reordered(cfg.joint_names);
      const Pose b = load_pose_file(pose_tgt).reordered(cfg.joint_names);
      write_file(out_path, save_transforms(fit_part_transforms(cfg, a, b, parse_mode(mode))));
    } else if (*warp_cmd) {
      const Volume v = load_volume(in);
      const TransformSet set = load_transforms(read_text(transforms_path));
      if (warp_cmd->count("--mode") > 0 && set.is_affine() != uses_2d_warp(parse_mode(mode))) {
        throw Error("--mode " + mode + " does not match the transform kind in " + transforms_path);
      }
      std::vector<std::string> names;
      for (std::size_t i = 0; i < set.size(); ++i) {
        names.push_back(set.is_affine() ? set.affine[i].first : set.helmert[i].first);
      }
      const auto masks = unstack_masks(load_volume(masks_path), names);
      write_volt(out_path, warp_with(v, masks, set, threads));
    } else if (*composite_cmd) {
      store_image(out_path, composite(load_image(fg_path), load_image(mask_path), load_image(bg_path)));
    } else if (*bgmask_cmd) {
      const auto masks = unstack_masks(load_volume(masks_path));
      store_image(out_path, background_mask(masks, dilate), TensorKind::kMask);
    } else if (*inpaint_cmd) {
      store_image(out_path, inpaint_background(load_image(in), load_image(mask_path)));
    } else if (*lift_cmd) {
      write_volt(out_path, lift(load_image(in), depth, channels));
    } else if (*project_cmd) {
      write_volt(out_path, project(load_volume(in)));
    } else if (*ssim_cmd) {
      const Image a = load_metric_input(in, slice);
      const Image b = load_metric_input(ref, slice);
      ordered_json report;
      report["ssim"] = ssim(a, b);
      if (!mask_path.empty()) report["ssim_fg"] = ssim_fg(a, b, load_image(mask_path));
      emit_json(report, out, report_path);
    } else if (*auc_cmd) {
      const PckResult r = pck_auc(load_pose_file(in), load_pose_file(ref));
      ordered_json report;
      report["pck_auc"] = r.auc;
      report["pck_curve"] = r.curve.pck;
      emit_json(report, out, report_path);
    } else if (*mannequin_cmd) {
      MannequinSpec spec;
      if (!dims.empty()) spec.dims = to_dims(dims);
      spec.channels = mannequin_channels;
      spec.skeleton = load_skeleton_or_default(skeleton_path);
      spec.pose = pose_path.empty() ? mannequin_pose(spec.dims, variant) : load_pose_file(pose_path);
      spec.radius_scale = radius_scale;
      spec.falloff = falloff;
      const Mannequin m = make_mannequin(spec);
      write_volt(out_path, m.volume);
      if (!masks_out.empty()) write_volt(masks_out, stack_masks(m.masks), TensorKind::kMask);
      if (!pose_out.empty()) write_file(pose_out, save_pose(spec.pose));
    } else if (*pairs_cmd) {
      EvalManifest manifest = load_manifest(read_text(in));
      if (seed_opt->count() > 0) manifest.seed = seed;
      write_file(out_path, save_pairs(sample_eval_pairs(manifest, count), manifest.seed));
    } else if (*pipeline_cmd) {
      if (use_mannequin == !in.empty()) throw Error("pipeline needs exactly one of --in or --mannequin");
      const SkeletonConfig cfg = load_skeleton_or_default(skeleton_path);
      const Pose a = load_pose_file(pose_in);
      const Pose b = load_pose_file(pose_tgt);
      Volume v;
      if (use_mannequin) {
        MannequinSpec spec;
        if (!dims.empty()) spec.dims = to_dims(dims);
        spec.channels = mannequin_channels;
        spec.skeleton = cfg;
        spec.pose = a;
        spec.radius_scale = radius_scale;
        v = make_mannequin(spec).volume;
      } else {
        v = load_volume(in);
      }
      ReposeOptions options;
      options.mode = parse_mode(mode);
      options.heatmap = {sigma, truncation};
      options.radius_scale = radius_scale;
      options.threads = threads;
      options.timing = timing;
      const auto start = std::chrono::steady_clock::now();
      const ReposeResult r = pipeline_repose(v, a, b, cfg, options);
      write_volt(out_path, r.warped);
      if (!heatmap_out.empty()) write_volt(heatmap_out, r.heatmaps);
      if (!masks_out.empty()) write_volt(masks_out, stack_masks(r.masks), TensorKind::kMask);
      if (!report_path.empty()) write_file(report_path, r.report);
      if (timing) {
        err << "pipeline: " << mode << " finished in "
            << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()
            << " s\n";
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace volwarp::cli
