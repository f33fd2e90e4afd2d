#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace scramble {

/// Decoded 8-bit raster, row-major with interleaved channels.
///
/// Channel count is 1 (grayscale composites, single blocks of them) or 3
/// (RGB). Bit depth is fixed at 8; other depths are rejected at the I/O
/// boundary.
class RasterImage {
 public:
  static constexpr int kBitDepth = 8;
  static constexpr std::uint8_t kMaxSample = 255;

  /// Zero-filled image.
  RasterImage(int width, int height, int channels);
  RasterImage(int width, int height, int channels, std::vector<std::uint8_t> samples);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  int bit_depth() const noexcept { return kBitDepth; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }

  std::span<const std::uint8_t> samples() const noexcept { return samples_; }
  std::span<std::uint8_t> mutable_samples() noexcept { return samples_; }

  std::size_t index(int x, int y, int c = 0) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(c);
  }
  std::uint8_t at(int x, int y, int c = 0) const noexcept { return samples_[index(x, y, c)]; }
  void set(int x, int y, int c, std::uint8_t v) noexcept { samples_[index(x, y, c)] = v; }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  int width_;
  int height_;
  int channels_;
  std::vector<std::uint8_t> samples_;
};

/// Bilinear resample (pixel-center aligned). Used for provider downscaling.
RasterImage resize_bilinear(const RasterImage& image, int width, int height);

/// Crop the bottom/right margin so both dimensions become multiples of the
/// block size.
RasterImage crop_to_multiple(const RasterImage& image, int block_w, int block_h);

}  // namespace scramble
