#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "volwarp/tensor.hpp"

namespace volwarp {

// On-disk layout of a .volt file:
//   "VOLT" | u32 LE header length | UTF-8 JSON header | f32 LE payload
// The header is {"dtype":"f32","shape":[...],"order":"row-major","kind":...}
// with keys in exactly that order. Rank 4 shapes decode to Volume, rank 3 to
// Image.
enum class TensorKind { kVolume, kImage, kMask };

const char* to_string(TensorKind kind);

struct VoltTensor {
  TensorKind kind = TensorKind::kVolume;
  std::variant<Volume, Image> tensor;

  bool is_volume() const { return std::holds_alternative<Volume>(tensor); }
  const Volume& volume() const;
  const Image& image() const;
};

std::vector<std::uint8_t> encode_volt(const Volume& v, TensorKind kind = TensorKind::kVolume);
std::vector<std::uint8_t> encode_volt(const Image& m, TensorKind kind = TensorKind::kImage);
VoltTensor decode_volt(const std::vector<std::uint8_t>& bytes);

void write_volt(const std::filesystem::path& path, const Volume& v,
                TensorKind kind = TensorKind::kVolume);
void write_volt(const std::filesystem::path& path, const Image& m,
                TensorKind kind = TensorKind::kImage);
VoltTensor read_volt(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace volwarp
