#include "scramble/geometry.hpp"

#include <algorithm>
#include <string>

#include "scramble/error.hpp"

namespace scramble {

BlockGeometry BlockGeometry::tile(int width, int height, int block_w, int block_h) {
  if (width < 1 || height < 1 || block_w < 1 || block_h < 1) {
    throw InvalidGeometry("block geometry arguments must be >= 1");
  }
  BlockGeometry g;
  g.block_w = block_w;
  g.block_h = block_h;
  g.cols = width / block_w;
  g.rows = height / block_h;
  g.n = static_cast<std::size_t>(g.cols) * static_cast<std::size_t>(g.rows);
  return g;
}

std::size_t block_count(int width, int height, int block_w, int block_h) {
  return BlockGeometry::tile(width, height, block_w, block_h).n;
}

void require_exact_tiling(const RasterImage& image, const BlockGeometry& geom) {
  if (geom.n == 0 || image.width() != geom.covered_width() || image.height() != geom.covered_height()) {
    throw GeometryMismatch("image " + std::to_string(image.width()) + "x" + std::to_string(image.height()) +
                           " is not divisible into " + std::to_string(geom.block_w) + "x" +
                           std::to_string(geom.block_h) + " blocks (crop it first)");
  }
}

std::vector<RasterImage> split_into_blocks(const RasterImage& image, const BlockGeometry& geom) {
  require_exact_tiling(image, geom);
  const int ch = image.channels();
  const std::size_t row_bytes = static_cast<std::size_t>(geom.block_w) * static_cast<std::size_t>(ch);
  std::vector<RasterImage> blocks;
  blocks.reserve(geom.n);
  for (int by = 0; by < geom.rows; ++by) {
    for (int bx = 0; bx < geom.cols; ++bx) {
      RasterImage& block = blocks.emplace_back(geom.block_w, geom.block_h, ch);
      auto dst = block.mutable_samples();
      for (int y = 0; y < geom.block_h; ++y) {
        const auto src = image.samples().begin() +
                         static_cast<std::ptrdiff_t>(image.index(bx * geom.block_w, by * geom.block_h + y));
        std::copy_n(src, row_bytes, dst.begin() + static_cast<std::ptrdiff_t>(block.index(0, y)));
      }
    }
  }
  return blocks;
}

RasterImage assemble_blocks(std::span<const RasterImage> blocks, const BlockGeometry& geom) {
  if (blocks.size() != geom.n || geom.n == 0) {
    throw GeometryMismatch("expected " + std::to_string(geom.n) + " blocks, got " + std::to_string(blocks.size()));
  }
  const int ch = blocks.front().channels();
  for (const auto& b : blocks) {
    if (b.width() != geom.block_w || b.height() != geom.block_h || b.channels() != ch) {
      throw GeometryMismatch("block shape does not match geometry " + std::to_string(geom.block_w) + "x" +
                             std::to_string(geom.block_h));
    }
  }
  RasterImage image(geom.covered_width(), geom.covered_height(), ch);
  const std::size_t row_bytes = static_cast<std::size_t>(geom.block_w) * static_cast<std::size_t>(ch);
  auto dst = image.mutable_samples();
  for (std::size_t i = 0; i < geom.n; ++i) {
    const int bx = static_cast<int>(i % static_cast<std::size_t>(geom.cols));
    const int by = static_cast<int>(i / static_cast<std::size_t>(geom.cols));
    const auto& block = blocks[i];
    for (int y = 0; y < geom.block_h; ++y) {
      std::copy_n(block.samples().begin() + static_cast<std::ptrdiff_t>(block.index(0, y)), row_bytes,
                  dst.begin() + static_cast<std::ptrdiff_t>(image.index(bx * geom.block_w, by * geom.block_h + y)));
    }
  }
  return image;
}

}  // namespace scramble
