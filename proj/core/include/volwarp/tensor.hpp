#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace volwarp {

// Continuous coordinates follow the volume's axis order: (y, x, z). Voxel
// (y, x, z) has its center at exactly those integer coordinates.
using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

struct Dims3 {
  int height = 0;
  int width = 0;
  int depth = 0;

  std::size_t voxels() const {
    return static_cast<std::size_t>(height) * width * depth;
  }
  bool contains(int y, int x, int z) const {
    return y >= 0 && y < height && x >= 0 && x < width && z >= 0 && z < depth;
  }
  friend bool operator==(const Dims3&, const Dims3&) = default;
};

// Dense H x W x D x C float tensor, row-major in (y, x, z, c).
class Volume {
 public:
  Volume() = default;
  Volume(Dims3 dims, int channels);
  Volume(Dims3 dims, int channels, std::vector<float> data);

  const Dims3& dims() const { return dims_; }
  int height() const { return dims_.height; }
  int width() const { return dims_.width; }
  int depth() const { return dims_.depth; }
  int channels() const { return channels_; }

  std::size_t index(int y, int x, int z, int c = 0) const {
    return ((static_cast<std::size_t>(y) * dims_.width + x) * dims_.depth + z) *
               channels_ +
           c;
  }
  float& at(int y, int x, int z, int c) { return data_[index(y, x, z, c)]; }
  float at(int y, int x, int z, int c) const { return data_[index(y, x, z, c)]; }

  std::span<float> voxel(int y, int x, int z) {
    return {data_.data() + index(y, x, z), static_cast<std::size_t>(channels_)};
  }
  std::span<const float> voxel(int y, int x, int z) const {
    return {data_.data() + index(y, x, z), static_cast<std::size_t>(channels_)};
  }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }
  std::vector<float>& storage() { return data_; }
  const std::vector<float>& storage() const { return data_; }

  friend bool operator==(const Volume&, const Volume&) = default;

 private:
  Dims3 dims_{};
  int channels_ = 0;
  std::vector<float> data_;
};

// Dense H x W x C float image, row-major in (y, x, c).
class Image {
 public:
  Image() = default;
  Image(int height, int width, int channels);
  Image(int height, int width, int channels, std::vector<float> data);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  std::size_t pixels() const { return static_cast<std::size_t>(height_) * width_; }

  std::size_t index(int y, int x, int c = 0) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }
  float& at(int y, int x, int c = 0) { return data_[index(y, x, c)]; }
  float at(int y, int x, int c = 0) const { return data_[index(y, x, c)]; }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }
  std::vector<float>& storage() { return data_; }
  const std::vector<float>& storage() const { return data_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

// Trilinear blend of the 8 voxels around p with zero padding outside the
// grid. Writes v.channels() values into out. Throws on non-finite p.
void trilinear_sample(const Volume& v, const Vec3& p, std::span<float> out);
std::vector<float> trilinear_sample(const Volume& v, const Vec3& p);

// 2D channel k maps to (depth k / channels, channel k % channels).
Volume lift(const Image& m, int depth, int channels);
Image project(const Volume& v);

// Throws if any value is NaN or infinite.
void require_finite(std::span<const float> values, const char* what);

}  // namespace volwarp
