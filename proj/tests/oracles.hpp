#pragma once

// Brute-force reference implementations used only by tests. Each one follows
// the textbook definition directly and shares no code path with the library
// kernels it checks.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Geometry>

#include "volwarp/tensor.hpp"
#include "volwarp/transform.hpp"
#include "volwarp/voxelize.hpp"

namespace volwarp::oracle {

inline Volume random_volume(std::mt19937_64& rng, Dims3 dims, int channels, float lo = 0.0f,
                            float hi = 1.0f) {
  std::uniform_real_distribution<float> u(lo, hi);
  Volume v(dims, channels);
  for (float& f : v.data()) f = u(rng);
  return v;
}

inline Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q.toRotationMatrix();
}

// Distance from p to segment [a, b]: perpendicular foot when it falls inside
// the segment, otherwise the nearer endpoint.
inline bool within_capsule(double py, double px, double pz, const Vec3& a, const Vec3& b,
                           double radius) {
  const double abx = b[0] - a[0], aby = b[1] - a[1], abz = b[2] - a[2];
  const double apx = py - a[0], apy = px - a[1], apz = pz - a[2];
  const double len2 = abx * abx + aby * aby + abz * abz;
  const double dot = apx * abx + apy * aby + apz * abz;
  double dist;
  if (len2 == 0.0 || dot <= 0.0) {
    dist = std::sqrt(apx * apx + apy * apy + apz * apz);
  } else if (dot >= len2) {
    const double bx = py - b[0], by = px - b[1], bz = pz - b[2];
    dist = std::sqrt(bx * bx + by * by + bz * bz);
  } else {
    // |ap x ab| / |ab|
    const double cx = apy * abz - apz * aby;
    const double cy = apz * abx - apx * abz;
    const double cz = apx * aby - apy * abx;
    dist = std::sqrt(cx * cx + cy * cy + cz * cz) / std::sqrt(len2);
  }
  return dist <= radius;
}

inline std::vector<float> capsule(Dims3 d, const Vec3& a, const Vec3& b, double radius) {
  std::vector<float> out(d.voxels(), 0.0f);
  std::size_t i = 0;
  for (int y = 0; y < d.height; ++y)
    for (int x = 0; x < d.width; ++x)
      for (int z = 0; z < d.depth; ++z, ++i)
        out[i] = within_capsule(y, x, z, a, b, radius) ? 1.0f : 0.0f;
  return out;
}

// Value of (mask * v) at integer voxel, zero outside the grid.
inline double masked_value(const Volume& v, const PartMask& m, long y, long x, long z, int c) {
  if (y < 0 || x < 0 || z < 0 || y >= v.height() || x >= v.width() || z >= v.depth()) return 0.0;
  return static_cast<double>(m.at(y, x, z)) * v.at(y, x, z, c);
}

inline double trilinear(const Volume& v, const PartMask& m, double qy, double qx, double qz, int c) {
  const long y0 = static_cast<long>(std::floor(qy));
  const long x0 = static_cast<long>(std::floor(qx));
  const long z0 = static_cast<long>(std::floor(qz));
  const double ty = qy - y0, tx = qx - x0, tz = qz - z0;
  double s = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int e = 0; e < 2; ++e)
        s += (a ? ty : 1 - ty) * (b ? tx : 1 - tx) * (e ? tz : 1 - tz) *
             masked_value(v, m, y0 + a, x0 + b, z0 + e, c);
  return s;
}

// max_i sample(M_i * v, T_i^-1(x)) with the inverse written out explicitly.
inline Volume warp3d(const Volume& v, const std::vector<PartMask>& masks,
                     const std::vector<Helmert3>& ts) {
  Volume out(v.dims(), v.channels());
  for (int y = 0; y < v.height(); ++y)
    for (int x = 0; x < v.width(); ++x)
      for (int z = 0; z < v.depth(); ++z)
        for (int c = 0; c < v.channels(); ++c) {
          double best = -std::numeric_limits<double>::infinity();
          for (std::size_t i = 0; i < masks.size(); ++i) {
            const Vec3 q = ts[i].rotation.transpose() * (Vec3(y, x, z) - ts[i].translation) /
                           ts[i].scale;
            best = std::max(best, trilinear(v, masks[i], q[0], q[1], q[2], c));
          }
          out.at(y, x, z, c) = static_cast<float>(best);
        }
  return out;
}

// Per-slice bilinear warp with depth-projected masks.
inline Volume warp2d(const Volume& v, const std::vector<PartMask>& masks,
                     const std::vector<Affine2>& as) {
  Volume out(v.dims(), v.channels());
  std::vector<PartMask> flat;
  for (const auto& m : masks) {
    PartMask f(m.name, m.dims);
    for (int y = 0; y < m.dims.height; ++y)
      for (int x = 0; x < m.dims.width; ++x) {
        bool any = false;
        for (int z = 0; z < m.dims.depth; ++z) any = any || m.at(y, x, z) != 0.0f;
        for (int z = 0; z < m.dims.depth; ++z) f.at(y, x, z) = any ? 1.0f : 0.0f;
      }
    flat.push_back(std::move(f));
  }
  for (int y = 0; y < v.height(); ++y)
    for (int x = 0; x < v.width(); ++x)
      for (int z = 0; z < v.depth(); ++z)
        for (int c = 0; c < v.channels(); ++c) {
          double best = -std::numeric_limits<double>::infinity();
          for (std::size_t i = 0; i < masks.size(); ++i) {
            const Mat2& A = as[i].linear;
            const double det = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
            const double ry = y - as[i].translation[0];
            const double rx = x - as[i].translation[1];
            const double qy = (A(1, 1) * ry - A(0, 1) * rx) / det;
            const double qx = (-A(1, 0) * ry + A(0, 0) * rx) / det;
            const long y0 = static_cast<long>(std::floor(qy));
            const long x0 = static_cast<long>(std::floor(qx));
            const double ty = qy - y0, tx = qx - x0;
            double s = 0.0;
            for (int a = 0; a < 2; ++a)
              for (int b = 0; b < 2; ++b)
                s += (a ? ty : 1 - ty) * (b ? tx : 1 - tx) *
                     masked_value(v, flat[i], y0 + a, x0 + b, z, c);
            best = std::max(best, s);
          }
          out.at(y, x, z, c) = static_cast<float>(best);
        }
  return out;
}

// SSIM map by direct 11x11 windowed sums in long double, with the 2D window
// built from unnormalized exponentials and mirrored indices "dcba|abcd".
inline std::vector<double> ssim_map(const Image& a, const Image& b) {
  const int h = a.height(), w = a.width(), ch = a.channels();
  constexpr int r = 5;
  long double win[11][11];
  long double total = 0;
  for (int i = -r; i <= r; ++i)
    for (int j = -r; j <= r; ++j) {
      win[i + r][j + r] = std::exp(-(long double)(i * i + j * j) / (2.0L * 1.5L * 1.5L));
      total += win[i + r][j + r];
    }
  auto mirror = [](int i, int n) {
    while (i < 0 || i >= n) i = i < 0 ? -i - 1 : 2 * n - i - 1;
    return i;
  };
  const long double c1 = 0.0001L, c2 = 0.0009L;
  std::vector<double> out(static_cast<std::size_t>(h) * w * ch);
  for (int c = 0; c < ch; ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        long double ma = 0, mb = 0, aa = 0, bb = 0, ab = 0;
        for (int i = -r; i <= r; ++i)
          for (int j = -r; j <= r; ++j) {
            const long double wt = win[i + r][j + r] / total;
            const long double va = a.at(mirror(y + i, h), mirror(x + j, w), c);
            const long double vb = b.at(mirror(y + i, h), mirror(x + j, w), c);
            ma += wt * va;
            mb += wt * vb;
            aa += wt * va * va;
            bb += wt * vb * vb;
            ab += wt * va * vb;
          }
        const long double va = aa - ma * ma, vb = bb - mb * mb, cov = ab - ma * mb;
        out[(static_cast<std::size_t>(y) * w + x) * ch + c] = static_cast<double>(
            ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2)));
      }
  return out;
}

inline double masked_mean(const std::vector<double>& map, const Image& shape, const Image* mask) {
  double total = 0;
  for (int c = 0; c < shape.channels(); ++c) {
    double s = 0;
    int n = 0;
    for (int y = 0; y < shape.height(); ++y)
      for (int x = 0; x < shape.width(); ++x) {
        if (mask && mask->at(y, x) == 0.0f) continue;
        s += map[(static_cast<std::size_t>(y) * shape.width() + x) * shape.channels() + c];
        ++n;
      }
    total += s / n;
  }
  return total / shape.channels();
}

inline Image random_image(std::mt19937_64& rng, int h, int w, int c) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  Image m(h, w, c);
  for (float& f : m.data()) f = u(rng);
  return m;
}

// Spatially correlated pair: b is a noisy, contrast-shifted copy of a.
inline std::pair<Image, Image> correlated_pair(std::mt19937_64& rng, int h, int w, int c) {
  Image a = random_image(rng, h, w, c);
  Image b = a;
  std::normal_distribution<float> n(0.0f, 0.1f);
  for (float& f : b.data()) f = std::clamp(0.8f * f + 0.1f + n(rng), 0.0f, 1.0f);
  return {a, b};
}

}  // namespace volwarp::oracle
