#include "volwarp/warp.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "volwarp/error.hpp"
#include "volwarp/parallel.hpp"

namespace volwarp {

namespace {

constexpr double kSnap = 1e-6;

double snap(double q) {
  const double r = std::nearbyint(q);
  return std::abs(q - r) < kSnap ? r : q;
}

struct Box {
  std::array<int, 3> lo{0, 0, 0};
  std::array<int, 3> hi{-1, -1, -1};
  bool empty() const { return hi[0] < lo[0]; }
};

Box support(const PartMask& m) {
  Box box;
  box.lo = {m.dims.height, m.dims.width, m.dims.depth};
  box.hi = {-1, -1, -1};
  for (int y = 0; y < m.dims.height; ++y) {
    for (int x = 0; x < m.dims.width; ++x) {
      for (int z = 0; z < m.dims.depth; ++z) {
        if (m.at(y, x, z) == 0.0f) continue;
        const std::array<int, 3> p{y, x, z};
        for (int k = 0; k < 3; ++k) {
          box.lo[k] = std::min(box.lo[k], p[k]);
          box.hi[k] = std::max(box.hi[k], p[k]);
        }
      }
    }
  }
  return box;
}

void check_inputs(const Volume& v, std::span<const PartMask> masks, std::size_t transforms) {
  if (masks.empty()) throw Error("masked_warp: at least one part is required");
  if (masks.size() != transforms) {
    throw Error("masked_warp: " + std::to_string(masks.size()) + " masks but " +
                std::to_string(transforms) + " transforms");
  }
  for (const auto& m : masks) {
    if (m.dims != v.dims()) throw Error("masked_warp: mask \"" + m.name + "\" does not match the volume size");
  }
}

// Trilinear sample of (mask * v) at q, accumulated into acc (double).
void sample_masked(const Volume& v, const PartMask& mask, const Vec3& q,
                   std::span<double> acc) {
  const double fy = std::floor(q[0]);
  const double fx = std::floor(q[1]);
  const double fz = std::floor(q[2]);
  const double t[3] = {q[0] - fy, q[1] - fx, q[2] - fz};
  const int base[3] = {static_cast<int>(fy), static_cast<int>(fx), static_cast<int>(fz)};
  const int channels = v.channels();
  for (int corner = 0; corner < 8; ++corner) {
    const int off[3] = {(corner >> 2) & 1, (corner >> 1) & 1, corner & 1};
    const int y = base[0] + off[0];
    const int x = base[1] + off[1];
    const int z = base[2] + off[2];
    if (!v.dims().contains(y, x, z) || mask.at(y, x, z) == 0.0f) continue;
    double w = 1.0;
    for (int k = 0; k < 3; ++k) w *= off[k] ? t[k] : 1.0 - t[k];
    if (w == 0.0) continue;
    const auto src = v.voxel(y, x, z);
    for (int c = 0; c < channels; ++c) acc[c] += w * src[c];
  }
}

void sample_masked_slice(const Volume& v, const PartMask& projected, double qy, double qx,
                         int z, std::span<double> acc) {
  const double fy = std::floor(qy);
  const double fx = std::floor(qx);
  const double ty = qy - fy;
  const double tx = qx - fx;
  const int y0 = static_cast<int>(fy);
  const int x0 = static_cast<int>(fx);
  const int channels = v.channels();
  for (int corner = 0; corner < 4; ++corner) {
    const int dy = (corner >> 1) & 1;
    const int dx = corner & 1;
    const int y = y0 + dy;
    const int x = x0 + dx;
    if (!v.dims().contains(y, x, z) || projected.at(y, x, z) == 0.0f) continue;
    const double w = (dy ? ty : 1.0 - ty) * (dx ? tx : 1.0 - tx);
    if (w == 0.0) continue;
    const auto src = v.voxel(y, x, z);
    for (int c = 0; c < channels; ++c) acc[c] += w * src[c];
  }
}

}  // namespace

Volume masked_warp_3d(const Volume& v, std::span<const PartMask> masks,
                      std::span<const Helmert3> transforms, int threads) {
  check_inputs(v, masks, transforms.size());
  const std::size_t parts = masks.size();
  std::vector<Helmert3> inverse;
  std::vector<Box> boxes;
  for (std::size_t i = 0; i < parts; ++i) {
    transforms[i].validate();
    inverse.push_back(invert(transforms[i]));
    boxes.push_back(support(masks[i]));
  }
  const Dims3 d = v.dims();
  const int channels = v.channels();
  Volume out(d, channels);

  parallel_for(static_cast<std::size_t>(d.height), threads, [&](std::size_t y_begin, std::size_t y_end) {
    std::vector<double> acc(channels);
    std::vector<float> best(channels);
    for (int y = static_cast<int>(y_begin); y < static_cast<int>(y_end); ++y) {
      for (int x = 0; x < d.width; ++x) {
        for (int z = 0; z < d.depth; ++z) {
          std::fill(best.begin(), best.end(), -std::numeric_limits<float>::infinity());
          const Vec3 target(y, x, z);
          for (std::size_t i = 0; i < parts; ++i) {
            std::fill(acc.begin(), acc.end(), 0.0);
            const Box& box = boxes[i];
            if (!box.empty()) {
              Vec3 q = apply(inverse[i], target);
              bool inside = true;
              for (int k = 0; k < 3; ++k) {
                q[k] = snap(q[k]);
                inside = inside && q[k] > box.lo[k] - 1 && q[k] < box.hi[k] + 1;
              }
              if (inside) sample_masked(v, masks[i], q, acc);
            }
            for (int c = 0; c < channels; ++c) {
              best[c] = std::max(best[c], static_cast<float>(acc[c]));
            }
          }
          std::copy(best.begin(), best.end(), out.voxel(y, x, z).begin());
        }
      }
    }
  });
  return out;
}

PartMask depth_project(const PartMask& mask) {
  PartMask out(mask.name, mask.dims);
  for (int y = 0; y < mask.dims.height; ++y) {
    for (int x = 0; x < mask.dims.width; ++x) {
      float any = 0.0f;
      for (int z = 0; z < mask.dims.depth; ++z) any = std::max(any, mask.at(y, x, z));
      for (int z = 0; z < mask.dims.depth; ++z) out.at(y, x, z) = any;
    }
  }
  return out;
}

Volume masked_warp_2d(const Volume& v, std::span<const PartMask> masks,
                      std::span<const Affine2> affines, int threads) {
  check_inputs(v, masks, affines.size());
  const std::size_t parts = masks.size();
  std::vector<PartMask> projected;
  std::vector<Affine2> inverse;
  std::vector<Box> boxes;
  for (std::size_t i = 0; i < parts; ++i) {
    projected.push_back(depth_project(masks[i]));
    inverse.push_back(invert(affines[i]));
    boxes.push_back(support(projected.back()));
  }
  const Dims3 d = v.dims();
  const int channels = v.channels();
  Volume out(d, channels);

  parallel_for(static_cast<std::size_t>(d.height), threads, [&](std::size_t y_begin, std::size_t y_end) {
    std::vector<double> acc(static_cast<std::size_t>(d.depth) * channels);
    std::vector<float> best(acc.size());
    for (int y = static_cast<int>(y_begin); y < static_cast<int>(y_end); ++y) {
      for (int x = 0; x < d.width; ++x) {
        std::fill(best.begin(), best.end(), -std::numeric_limits<float>::infinity());
        for (std::size_t i = 0; i < parts; ++i) {
          std::fill(acc.begin(), acc.end(), 0.0);
          const Box& box = boxes[i];
          if (!box.empty()) {
            const Vec2 q = apply(inverse[i], Vec2(y, x));
            const double qy = snap(q[0]);
            const double qx = snap(q[1]);
            if (qy > box.lo[0] - 1 && qy < box.hi[0] + 1 && qx > box.lo[1] - 1 &&
                qx < box.hi[1] + 1) {
              for (int z = 0; z < d.depth; ++z) {
                sample_masked_slice(v, projected[i], qy, qx, z,
                                    std::span<double>(acc).subspan(
                                        static_cast<std::size_t>(z) * channels, channels));
              }
            }
          }
          for (std::size_t k = 0; k < acc.size(); ++k) {
            best[k] = std::max(best[k], static_cast<float>(acc[k]));
          }
        }
        // Depth and channel are contiguous for a fixed (y, x).
        std::copy(best.begin(), best.end(), out.voxel(y, x, 0).begin());
      }
    }
  });
  return out;
}

Image inpaint_background(const Image& img, const Image& bg_mask) {
  if (bg_mask.channels() != 1 || bg_mask.height() != img.height() ||
      bg_mask.width() != img.width()) {
    throw Error("inpaint: mask must be a 1-channel image of the same size");
  }
  const int h = img.height();
  const int w = img.width();
  const int channels = img.channels();
  std::vector<char> known(static_cast<std::size_t>(h) * w, 0);
  bool any_known = false;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const float m = bg_mask.at(y, x);
      if (m != 0.0f && m != 1.0f) throw Error("inpaint: mask must be binary");
      known[static_cast<std::size_t>(y) * w + x] = m == 1.0f;
      any_known = any_known || m == 1.0f;
    }
  }
  if (!any_known) throw Error("inpaint: background mask is empty, nothing to fill from");

  Image out = img;
  std::vector<char> filled = known;
  std::vector<double> sum(channels);
  const int offsets[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};

  // Averages the 4-neighbors selected by `use` into pixel (y, x). Returns
  // false when no neighbor qualifies.
  auto average = [&](int y, int x, const std::vector<char>* use) {
    int count = 0;
    std::fill(sum.begin(), sum.end(), 0.0);
    for (const auto& o : offsets) {
      const int yy = y + o[0];
      const int xx = x + o[1];
      if (yy < 0 || yy >= h || xx < 0 || xx >= w) continue;
      if (use && !(*use)[static_cast<std::size_t>(yy) * w + xx]) continue;
      ++count;
      for (int c = 0; c < channels; ++c) sum[c] += out.at(yy, xx, c);
    }
    if (count == 0) return false;
    for (int c = 0; c < channels; ++c) out.at(y, x, c) = static_cast<float>(sum[c] / count);
    return true;
  };

  auto sweep = [&](int pass, auto&& visit) {
    const std::size_t n = static_cast<std::size_t>(h) * w;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t idx = pass % 2 == 0 ? k : n - 1 - k;
      visit(static_cast<int>(idx / w), static_cast<int>(idx % w), idx);
    }
  };

  int pass = 0;
  for (bool pending = true; pending; ++pass) {
    pending = false;
    sweep(pass, [&](int y, int x, std::size_t idx) {
      if (filled[idx]) return;
      if (average(y, x, &filled)) {
        filled[idx] = 1;
      } else {
        pending = true;
      }
    });
  }
  for (int extra = 0; extra < 3; ++extra, ++pass) {
    sweep(pass, [&](int y, int x, std::size_t idx) {
      if (!known[idx]) average(y, x, nullptr);
    });
  }
  return out;
}

Image composite(const Image& fg, const Image& fg_mask, const Image& bg) {
  if (fg.height() != bg.height() || fg.width() != bg.width() ||
      fg.channels() != bg.channels()) {
    throw Error("composite: foreground and background shapes differ");
  }
  if (fg_mask.channels() != 1 || fg_mask.height() != fg.height() ||
      fg_mask.width() != fg.width()) {
    throw Error("composite: mask must be a 1-channel image of the same size");
  }
  Image out(fg.height(), fg.width(), fg.channels());
  for (int y = 0; y < fg.height(); ++y) {
    for (int x = 0; x < fg.width(); ++x) {
      const float a = fg_mask.at(y, x);
      if (!(a >= 0.0f && a <= 1.0f)) throw Error("composite: mask value outside [0,1]");
      for (int c = 0; c < fg.channels(); ++c) {
        out.at(y, x, c) = a * fg.at(y, x, c) + (1.0f - a) * bg.at(y, x, c);
      }
    }
  }
  return out;
}

}  // namespace volwarp
