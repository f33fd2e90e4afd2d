#include "scramble/block_ops.hpp"

#include <string>

#include "scramble/error.hpp"

namespace scramble {

RasterImage apply_d4(const RasterImage& block, int code) {
  if (code < 0 || code >= kD4Count) throw Error("rotation/flip code " + std::to_string(code) + " out of range");
  if (code == 0) return block;
  const int w = block.width();
  const int h = block.height();
  const int rot = d4_rotation(code);
  const bool flip = d4_flipped(code);
  if (w != h && (rot & 1)) {
    throw InvalidGeometry("90-degree rotation of a non-square " + std::to_string(w) + "x" + std::to_string(h) +
                          " block");
  }
  RasterImage out(w, h, block.channels());
  const int ch = block.channels();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int tx = flip ? w - 1 - x : x;
      int ty = y;
      int cw = w;
      int chh = h;
      for (int r = 0; r < rot; ++r) {
        const int nx = chh - 1 - ty;
        ty = tx;
        tx = nx;
        std::swap(cw, chh);
      }
      for (int c = 0; c < ch; ++c) out.set(tx, ty, c, block.at(x, y, c));
    }
  }
  return out;
}

RasterImage negative_positive(const RasterImage& block, bool flag, int bit_depth) {
  if (bit_depth != RasterImage::kBitDepth) {
    throw FormatError("negative-positive transform supports 8-bit samples only");
  }
  if (!flag) return block;
  RasterImage out = block;
  const auto mask = static_cast<std::uint8_t>((1u << bit_depth) - 1u);
  for (auto& s : out.mutable_samples()) s ^= mask;
  return out;
}

RasterImage shuffle_colors(const RasterImage& block, int code) {
  if (block.channels() != 3) throw FormatError("color shuffle needs a 3-channel block");
  if (code < 0 || code >= kColorPermCount) throw Error("color code " + std::to_string(code) + " out of range");
  if (code == 0) return block;
  const auto& order = kColorOrders[static_cast<std::size_t>(code)];
  RasterImage out(block.width(), block.height(), 3);
  const auto src = block.samples();
  auto dst = out.mutable_samples();
  for (std::size_t p = 0; p < src.size(); p += 3) {
    dst[p + 0] = src[p + static_cast<std::size_t>(order[0])];
    dst[p + 1] = src[p + static_cast<std::size_t>(order[1])];
    dst[p + 2] = src[p + static_cast<std::size_t>(order[2])];
  }
  return out;
}

}  // namespace scramble
