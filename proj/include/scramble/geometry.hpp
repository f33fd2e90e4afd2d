#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "scramble/raster.hpp"

namespace scramble {

/// Block tiling of an image. Blocks are scanned row-major (left to right,
/// top to bottom); block index i sits at column i % cols, row i / cols.
struct BlockGeometry {
  int block_w = 0;
  int block_h = 0;
  int cols = 0;
  int rows = 0;
  std::size_t n = 0;

  /// Floor tiling of a width x height image. Throws InvalidGeometry on zero
  /// arguments.
  static BlockGeometry tile(int width, int height, int block_w, int block_h);

  int covered_width() const noexcept { return cols * block_w; }
  int covered_height() const noexcept { return rows * block_h; }

  friend bool operator==(const BlockGeometry&, const BlockGeometry&) = default;
};

/// floor(width / block_w) * floor(height / block_h).
std::size_t block_count(int width, int height, int block_w, int block_h);

/// Throws GeometryMismatch unless the image is exactly covered by `geom`.
void require_exact_tiling(const RasterImage& image, const BlockGeometry& geom);

std::vector<RasterImage> split_into_blocks(const RasterImage& image, const BlockGeometry& geom);
RasterImage assemble_blocks(std::span<const RasterImage> blocks, const BlockGeometry& geom);

}  // namespace scramble
