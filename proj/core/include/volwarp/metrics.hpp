#pragma once

#include <array>
#include <vector>

#include "volwarp/skeleton.hpp"
#include "volwarp/tensor.hpp"

namespace volwarp {

struct SsimParams {
  int window = 11;
  double window_sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;

  double c1() const { return (k1 * dynamic_range) * (k1 * dynamic_range); }
  double c2() const { return (k2 * dynamic_range) * (k2 * dynamic_range); }
  void validate() const;
};

// Normalized 1D Gaussian taps; the 2D window is their outer product.
std::vector<double> ssim_taps(const SsimParams& p);

// Per-pixel, per-channel SSIM values (H x W x C, double precision). Local
// statistics use the Gaussian window with half-sample symmetric reflection
// at the borders ("dcba|abcd").
std::vector<double> ssim_map(const Image& a, const Image& b, const SsimParams& p = {});

double ssim(const Image& a, const Image& b, const SsimParams& p = {});

// Mean of the SSIM map over pixels where fg_mask == 1.
double ssim_fg(const Image& a, const Image& b, const Image& fg_mask, const SsimParams& p = {});

inline constexpr int kPckMaxThresholdMm = 150;

struct PckCurve {
  std::array<double, kPckMaxThresholdMm + 1> thresholds{};  // 0..150 mm
  std::array<double, kPckMaxThresholdMm + 1> pck{};
};

struct PckResult {
  PckCurve curve;
  double auc = 0.0;
};

// Joints are matched by name. auc is the mean of pck over the 151 integer
// thresholds.
PckResult pck_auc(const Pose& predicted, const Pose& reference);

}  // namespace volwarp
