#include "volwarp/tensor.hpp"

#include <cmath>
#include <string>

#include "volwarp/error.hpp"

namespace volwarp {

namespace {

void check_dims(Dims3 dims, int channels) {
  if (dims.height < 1 || dims.width < 1 || dims.depth < 1 || channels < 1) {
    throw Error("volume dimensions must all be >= 1");
  }
}

}  // namespace

Volume::Volume(Dims3 dims, int channels)
    : dims_(dims), channels_(channels) {
  check_dims(dims, channels);
  data_.assign(dims.voxels() * static_cast<std::size_t>(channels), 0.0f);
}

Volume::Volume(Dims3 dims, int channels, std::vector<float> data)
    : dims_(dims), channels_(channels), data_(std::move(data)) {
  check_dims(dims, channels);
  if (data_.size() != dims.voxels() * static_cast<std::size_t>(channels)) {
    throw Error("volume data length does not match H*W*D*C");
  }
}

Image::Image(int height, int width, int channels)
    : height_(height), width_(width), channels_(channels) {
  if (height < 1 || width < 1 || channels < 1) {
    throw Error("image dimensions must all be >= 1");
  }
  data_.assign(pixels() * static_cast<std::size_t>(channels), 0.0f);
}

Image::Image(int height, int width, int channels, std::vector<float> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
  if (height < 1 || width < 1 || channels < 1) {
    throw Error("image dimensions must all be >= 1");
  }
  if (data_.size() != pixels() * static_cast<std::size_t>(channels)) {
    throw Error("image data length does not match H*W*C");
  }
}

void trilinear_sample(const Volume& v, const Vec3& p, std::span<float> out) {
  if (!p.allFinite()) throw Error("trilinear_sample: non-finite sample point");
  const int channels = v.channels();
  const double fy = std::floor(p[0]);
  const double fx = std::floor(p[1]);
  const double fz = std::floor(p[2]);
  const double ty = p[0] - fy;
  const double tx = p[1] - fx;
  const double tz = p[2] - fz;
  const Dims3& d = v.dims();
  if (fy > d.height || fx > d.width || fz > d.depth || fy < -1.0 || fx < -1.0 ||
      fz < -1.0) {
    for (int c = 0; c < channels; ++c) out[c] = 0.0f;
    return;
  }
  const int y0 = static_cast<int>(fy);
  const int x0 = static_cast<int>(fx);
  const int z0 = static_cast<int>(fz);
  thread_local std::vector<double> acc;
  acc.assign(static_cast<std::size_t>(channels), 0.0);
  for (int corner = 0; corner < 8; ++corner) {
    const int dy = (corner >> 2) & 1;
    const int dx = (corner >> 1) & 1;
    const int dz = corner & 1;
    const int y = y0 + dy;
    const int x = x0 + dx;
    const int z = z0 + dz;
    if (!d.contains(y, x, z)) continue;
    const double w = (dy ? ty : 1.0 - ty) * (dx ? tx : 1.0 - tx) * (dz ? tz : 1.0 - tz);
    if (w == 0.0) continue;
    const auto src = v.voxel(y, x, z);
    for (int c = 0; c < channels; ++c) acc[c] += w * src[c];
  }
  for (int c = 0; c < channels; ++c) out[c] = static_cast<float>(acc[c]);
}

std::vector<float> trilinear_sample(const Volume& v, const Vec3& p) {
  std::vector<float> out(static_cast<std::size_t>(v.channels()));
  trilinear_sample(v, p, out);
  return out;
}

Volume lift(const Image& m, int depth, int channels) {
  if (depth < 1 || channels < 1 ||
      m.channels() != depth * channels) {
    throw Error("lift: image has " + std::to_string(m.channels()) +
                " channels, which is not depth*channels = " +
                std::to_string(depth) + "*" + std::to_string(channels));
  }
  // (y, x, k) and (y, x, k / C, k % C) share one memory layout.
  return Volume({m.height(), m.width(), depth}, channels, m.storage());
}

Image project(const Volume& v) {
  return Image(v.height(), v.width(), v.depth() * v.channels(), v.storage());
}

void require_finite(std::span<const float> values, const char* what) {
  for (float f : values) {
    if (!std::isfinite(f)) throw Error(std::string(what) + ": non-finite value");
  }
}

}  // namespace volwarp
