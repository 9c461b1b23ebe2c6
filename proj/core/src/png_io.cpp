#include "volwarp/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

#include "volwarp/error.hpp"

namespace volwarp {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

Image read_png(const std::filesystem::path& path) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.c_str())) {
    throw Error("png: cannot read " + path.string() + ": " + img.message);
  }
  int channels = 3;
  if (img.format == PNG_FORMAT_GRAY) {
    channels = 1;
  } else if (img.format & PNG_FORMAT_FLAG_ALPHA) {
    channels = 4;
    img.format = PNG_FORMAT_RGBA;
  } else {
    img.format = PNG_FORMAT_RGB;
  }
  if (channels == 1) img.format = PNG_FORMAT_GRAY;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, buffer.data(), 0, nullptr)) {
    std::string msg = img.message;
    png_image_free(&img);
    throw Error("png: decode failed for " + path.string() + ": " + msg);
  }
  Image out(static_cast<int>(img.height), static_cast<int>(img.width), channels);
  auto data = out.data();
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = buffer[i] / 255.0f;
  return out;
}

void write_png(const std::filesystem::path& path, const Image& image) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width());
  img.height = static_cast<png_uint_32>(image.height());
  switch (image.channels()) {
    case 1: img.format = PNG_FORMAT_GRAY; break;
    case 3: img.format = PNG_FORMAT_RGB; break;
    case 4: img.format = PNG_FORMAT_RGBA; break;
    default: throw Error("png: only 1, 3 or 4 channel images can be written");
  }
  std::vector<png_byte> buffer(image.data().size());
  std::transform(image.data().begin(), image.data().end(), buffer.begin(), [](float v) {
    return static_cast<png_byte>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
  });
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw Error("png: cannot write " + path.string());
  if (!png_image_write_to_stdio(&img, file.get(), 0, buffer.data(), 0, nullptr)) {
    throw Error(std::string("png: encode failed: ") + img.message);
  }
}

}  // namespace volwarp
