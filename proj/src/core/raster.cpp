#include "scramble/raster.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "scramble/error.hpp"

namespace scramble {

namespace {

void check_shape(int width, int height, int channels) {
  if (width < 1 || height < 1) {
    throw InvalidGeometry("image dimensions must be positive, got " + std::to_string(width) + "x" +
                          std::to_string(height));
  }
  if (channels != 1 && channels != 3) {
    throw FormatError("unsupported channel count " + std::to_string(channels) + " (expected 1 or 3)");
  }
}

}  // namespace

RasterImage::RasterImage(int width, int height, int channels)
    : width_(width), height_(height), channels_(channels) {
  check_shape(width, height, channels);
  samples_.assign(pixel_count() * static_cast<std::size_t>(channels), 0);
}

RasterImage::RasterImage(int width, int height, int channels, std::vector<std::uint8_t> samples)
    : width_(width), height_(height), channels_(channels), samples_(std::move(samples)) {
  check_shape(width, height, channels);
  if (samples_.size() != pixel_count() * static_cast<std::size_t>(channels)) {
    throw GeometryMismatch("sample buffer holds " + std::to_string(samples_.size()) + " values, expected " +
                           std::to_string(pixel_count() * static_cast<std::size_t>(channels)));
  }
}

RasterImage resize_bilinear(const RasterImage& image, int width, int height) {
  RasterImage out(width, height, image.channels());
  const double sx = static_cast<double>(image.width()) / width;
  const double sy = static_cast<double>(image.height()) / height;
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, image.height() - 1.0);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, image.height() - 1);
    const double wy = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, image.width() - 1.0);
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, image.width() - 1);
      const double wx = fx - x0;
      for (int c = 0; c < image.channels(); ++c) {
        const double top = image.at(x0, y0, c) * (1 - wx) + image.at(x1, y0, c) * wx;
        const double bottom = image.at(x0, y1, c) * (1 - wx) + image.at(x1, y1, c) * wx;
        out.set(x, y, c, static_cast<std::uint8_t>(std::lround(top * (1 - wy) + bottom * wy)));
      }
    }
  }
  return out;
}

RasterImage crop_to_multiple(const RasterImage& image, int block_w, int block_h) {
  if (block_w < 1 || block_h < 1) throw InvalidGeometry("block dimensions must be positive");
  const int w = image.width() / block_w * block_w;
  const int h = image.height() / block_h * block_h;
  if (w == 0 || h == 0) {
    throw InvalidGeometry("image " + std::to_string(image.width()) + "x" + std::to_string(image.height()) +
                          " is smaller than one block");
  }
  if (w == image.width() && h == image.height()) return image;
  RasterImage out(w, h, image.channels());
  const std::size_t row_bytes = static_cast<std::size_t>(w) * static_cast<std::size_t>(image.channels());
  for (int y = 0; y < h; ++y) {
    std::copy_n(image.samples().begin() + static_cast<std::ptrdiff_t>(image.index(0, y)), row_bytes,
                out.mutable_samples().begin() + static_cast<std::ptrdiff_t>(out.index(0, y)));
  }
  return out;
}

}  // namespace scramble
