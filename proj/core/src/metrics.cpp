#include "volwarp/metrics.hpp"

#include <cmath>

#include "volwarp/error.hpp"

namespace volwarp {

namespace {

void check_pair(const Image& a, const Image& b) {
  if (a.height() != b.height() || a.width() != b.width() || a.channels() != b.channels()) {
    throw Error("ssim: image shapes differ");
  }
  constexpr float kSlack = 1e-6f;
  for (const Image* img : {&a, &b}) {
    for (float v : img->data()) {
      if (!(v >= -kSlack && v <= 1.0f + kSlack)) throw Error("ssim: pixel values must lie in [0,1]");
    }
  }
}

// Half-sample symmetric reflection of i into [0, n).
int reflect(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

// Separable Gaussian filter of one channel plane.
std::vector<double> filter(const std::vector<double>& plane, int h, int w,
                           const std::vector<double>& taps) {
  const int r = static_cast<int>(taps.size() / 2);
  std::vector<double> rows(plane.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int k = -r; k <= r; ++k) s += taps[k + r] * plane[static_cast<std::size_t>(y) * w + reflect(x + k, w)];
      rows[static_cast<std::size_t>(y) * w + x] = s;
    }
  }
  std::vector<double> out(plane.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int k = -r; k <= r; ++k) s += taps[k + r] * rows[static_cast<std::size_t>(reflect(y + k, h)) * w + x];
      out[static_cast<std::size_t>(y) * w + x] = s;
    }
  }
  return out;
}

// Mean over selected pixels per channel, then over channels.
double masked_mean(const std::vector<double>& map, int h, int w, int channels,
                   const Image* mask) {
  double total = 0.0;
  for (int c = 0; c < channels; ++c) {
    double sum = 0.0;
    std::size_t count = 0;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (mask && mask->at(y, x) != 1.0f) continue;
        sum += map[(static_cast<std::size_t>(y) * w + x) * channels + c];
        ++count;
      }
    }
    total += sum / static_cast<double>(count);
  }
  return total / channels;
}

}  // namespace

void SsimParams::validate() const {
  if (window < 1 || window % 2 == 0) throw Error("ssim: window must be a positive odd size");
  if (!(window_sigma > 0.0) || !(k1 > 0.0) || !(k2 > 0.0) || !(dynamic_range > 0.0)) {
    throw Error("ssim: sigma, K1, K2 and dynamic range must be > 0");
  }
}

std::vector<double> ssim_taps(const SsimParams& p) {
  p.validate();
  const int r = p.window / 2;
  std::vector<double> taps(p.window);
  double sum = 0.0;
  for (int k = -r; k <= r; ++k) {
    taps[k + r] = std::exp(-(k * k) / (2.0 * p.window_sigma * p.window_sigma));
    sum += taps[k + r];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

std::vector<double> ssim_map(const Image& a, const Image& b, const SsimParams& p) {
  check_pair(a, b);
  const auto taps = ssim_taps(p);
  const int h = a.height();
  const int w = a.width();
  const int channels = a.channels();
  const double c1 = p.c1();
  const double c2 = p.c2();
  std::vector<double> out(a.data().size());
  const std::size_t n = static_cast<std::size_t>(h) * w;
  std::vector<double> pa(n), pb(n), paa(n), pbb(n), pab(n);
  for (int c = 0; c < channels; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      const double va = a.data()[i * channels + c];
      const double vb = b.data()[i * channels + c];
      pa[i] = va;
      pb[i] = vb;
      paa[i] = va * va;
      pbb[i] = vb * vb;
      pab[i] = va * vb;
    }
    const auto mu_a = filter(pa, h, w, taps);
    const auto mu_b = filter(pb, h, w, taps);
    const auto e_aa = filter(paa, h, w, taps);
    const auto e_bb = filter(pbb, h, w, taps);
    const auto e_ab = filter(pab, h, w, taps);
    for (std::size_t i = 0; i < n; ++i) {
      const double ma = mu_a[i];
      const double mb = mu_b[i];
      const double var_a = e_aa[i] - ma * ma;
      const double var_b = e_bb[i] - mb * mb;
      const double cov = e_ab[i] - ma * mb;
      out[i * channels + c] = ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
                              ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
    }
  }
  return out;
}

double ssim(const Image& a, const Image& b, const SsimParams& p) {
  return masked_mean(ssim_map(a, b, p), a.height(), a.width(), a.channels(), nullptr);
}

double ssim_fg(const Image& a, const Image& b, const Image& fg_mask, const SsimParams& p) {
  if (fg_mask.channels() != 1 || fg_mask.height() != a.height() ||
      fg_mask.width() != a.width()) {
    throw Error("ssim_fg: mask must be a 1-channel image of the same size");
  }
  bool any = false;
  for (float m : fg_mask.data()) {
    if (m != 0.0f && m != 1.0f) throw Error("ssim_fg: mask must be binary");
    any = any || m == 1.0f;
  }
  if (!any) throw Error("ssim_fg: mask has no foreground pixels");
  return masked_mean(ssim_map(a, b, p), a.height(), a.width(), a.channels(), &fg_mask);
}

PckResult pck_auc(const Pose& predicted, const Pose& reference) {
  if (predicted.space() != CoordinateSpace::kMillimeter ||
      reference.space() != CoordinateSpace::kMillimeter) {
    throw Error("pck: both poses must be in millimeter space");
  }
  if (predicted.size() != reference.size()) throw Error("pck: joint sets differ");
  std::vector<double> errors;
  errors.reserve(reference.size());
  for (const auto& joint : reference.joints()) {
    if (!predicted.contains(joint.name)) {
      throw Error("pck: predicted pose lacks joint \"" + joint.name + "\"");
    }
    errors.push_back((predicted.at(joint.name) - joint.position).norm());
  }
  PckResult out;
  double sum = 0.0;
  for (int t = 0; t <= kPckMaxThresholdMm; ++t) {
    std::size_t hits = 0;
    for (double e : errors) hits += e <= t ? 1 : 0;
    out.curve.thresholds[t] = t;
    out.curve.pck[t] = static_cast<double>(hits) / static_cast<double>(errors.size());
    sum += out.curve.pck[t];
  }
  out.auc = sum / (kPckMaxThresholdMm + 1);
  return out;
}

}  // namespace volwarp
