#include "volwarp/volt.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "volwarp/error.hpp"

namespace volwarp {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr char kMagic[4] = {'V', 'O', 'L', 'T'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

std::vector<std::uint8_t> encode(const std::vector<std::int64_t>& shape,
                                 std::span<const float> data, TensorKind kind) {
  require_finite(data, "write_volt");
  ordered_json header;
  header["dtype"] = "f32";
  header["shape"] = shape;
  header["order"] = "row-major";
  header["kind"] = to_string(kind);
  const std::string text = header.dump();

  std::vector<std::uint8_t> out;
  out.reserve(8 + text.size() + 4 * data.size());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  for (float f : data) put_u32(out, std::bit_cast<std::uint32_t>(f));
  return out;
}

TensorKind kind_from_string(const std::string& s) {
  if (s == "volume") return TensorKind::kVolume;
  if (s == "image") return TensorKind::kImage;
  if (s == "mask") return TensorKind::kMask;
  throw Error("volt: unknown kind \"" + s + "\"");
}

}  // namespace

const char* to_string(TensorKind kind) {
  switch (kind) {
    case TensorKind::kVolume: return "volume";
    case TensorKind::kImage: return "image";
    case TensorKind::kMask: return "mask";
  }
  return "volume";
}

const Volume& VoltTensor::volume() const {
  if (const auto* v = std::get_if<Volume>(&tensor)) return *v;
  throw Error("volt: expected a rank-4 volume, found a rank-3 image");
}

const Image& VoltTensor::image() const {
  if (const auto* m = std::get_if<Image>(&tensor)) return *m;
  throw Error("volt: expected a rank-3 image, found a rank-4 volume");
}

std::vector<std::uint8_t> encode_volt(const Volume& v, TensorKind kind) {
  return encode({v.height(), v.width(), v.depth(), v.channels()}, v.data(), kind);
}

std::vector<std::uint8_t> encode_volt(const Image& m, TensorKind kind) {
  return encode({m.height(), m.width(), m.channels()}, m.data(), kind);
}

VoltTensor decode_volt(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 8) throw Error("volt: file too short for magic and header length");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw Error("volt: magic mismatch");
  const std::uint32_t header_len = get_u32(bytes.data() + 4);
  if (bytes.size() - 8 < header_len) throw Error("volt: truncated header");

  ordered_json header;
  try {
    header = ordered_json::parse(bytes.begin() + 8, bytes.begin() + 8 + header_len);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("volt: malformed header: ") + e.what());
  }
  if (!header.is_object()) throw Error("volt: header is not a JSON object");
  if (header.value("dtype", "") != "f32") throw Error("volt: dtype must be \"f32\"");
  if (header.contains("order") && header["order"] != "row-major") {
    throw Error("volt: order must be \"row-major\"");
  }
  const auto& shape_json = header.at("shape");
  if (!shape_json.is_array() || (shape_json.size() != 3 && shape_json.size() != 4)) {
    throw Error("volt: shape rank must be 3 or 4");
  }
  std::vector<int> shape;
  std::uint64_t count = 1;
  for (const auto& dim : shape_json) {
    if (!dim.is_number_integer() || dim.get<std::int64_t>() < 1 ||
        dim.get<std::int64_t>() > (1 << 30)) {
      throw Error("volt: shape entries must be positive integers");
    }
    shape.push_back(dim.get<int>());
    count *= static_cast<std::uint64_t>(shape.back());
  }
  const std::size_t payload = bytes.size() - 8 - header_len;
  if (payload != 4 * count) {
    throw Error("volt: payload size mismatch: expected " + std::to_string(4 * count) +
                " bytes, found " + std::to_string(payload));
  }
  std::vector<float> data(count);
  const std::uint8_t* p = bytes.data() + 8 + header_len;
  for (std::size_t i = 0; i < count; ++i) data[i] = std::bit_cast<float>(get_u32(p + 4 * i));
  require_finite(data, "read_volt");

  VoltTensor out;
  if (shape.size() == 4) {
    out.kind = kind_from_string(header.value("kind", "volume"));
    out.tensor = Volume({shape[0], shape[1], shape[2]}, shape[3], std::move(data));
  } else {
    out.kind = kind_from_string(header.value("kind", "image"));
    out.tensor = Image(shape[0], shape[1], shape[2], std::move(data));
  }
  return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed: " + path.string());
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  write_file(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

void write_volt(const std::filesystem::path& path, const Volume& v, TensorKind kind) {
  write_file(path, encode_volt(v, kind));
}

void write_volt(const std::filesystem::path& path, const Image& m, TensorKind kind) {
  write_file(path, encode_volt(m, kind));
}

VoltTensor read_volt(const std::filesystem::path& path) {
  return decode_volt(read_file(path));
}

}  // namespace volwarp
