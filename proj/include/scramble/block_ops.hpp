#pragma once

#include <array>
#include <cstdint>

#include "scramble/raster.hpp"

namespace scramble {

// Rotate/flip codes: code = rotation | flip << 2, where rotation counts
// 90-degree clockwise turns and flip is a horizontal mirror applied before
// the rotation. Code 0 is the identity. The eight codes are the eight
// symmetries of a square.
inline constexpr int kD4Count = 8;

constexpr int d4_rotation(int code) noexcept { return code & 3; }
constexpr bool d4_flipped(int code) noexcept { return (code & 4) != 0; }
constexpr int d4_code(int rotation, bool flip) noexcept { return (rotation & 3) | (flip ? 4 : 0); }

/// Code of T_a after T_b, i.e. apply_d4(apply_d4(x, b), a).
constexpr int d4_compose(int a, int b) noexcept {
  const int rot = d4_flipped(a) ? d4_rotation(a) - d4_rotation(b) : d4_rotation(a) + d4_rotation(b);
  return d4_code(rot & 3, d4_flipped(a) != d4_flipped(b));
}

constexpr int d4_inverse(int code) noexcept {
  return d4_flipped(code) ? code : d4_code((4 - d4_rotation(code)) & 3, false);
}

/// Where a displacement (dx, dy) (x right, y down) ends up after the
/// transform.
constexpr std::array<int, 2> d4_map_direction(int code, int dx, int dy) noexcept {
  if (d4_flipped(code)) dx = -dx;
  for (int r = 0; r < d4_rotation(code); ++r) {
    const int t = dx;
    dx = -dy;
    dy = t;
  }
  return {dx, dy};
}

/// Rotate/flip a block. Rotations need a square block; a non-square block
/// only accepts codes 0 and the 180-degree forms that keep its shape.
RasterImage apply_d4(const RasterImage& block, int code);

/// Inverts every sample (p xor (2^L - 1)) when flag is set. Only L = 8 is supported.
RasterImage negative_positive(const RasterImage& block, bool flag, int bit_depth = RasterImage::kBitDepth);

// Color shuffle codes index the orderings of (R, G, B) in lexicographic
// order. Output channel c takes input channel kColorOrders[code][c].
inline constexpr int kColorPermCount = 6;
inline constexpr std::array<std::array<int, 3>, 6> kColorOrders{{
    {0, 1, 2},
    {0, 2, 1},
    {1, 0, 2},
    {1, 2, 0},
    {2, 0, 1},
    {2, 1, 0},
}};

constexpr int color_perm_index(const std::array<int, 3>& order) noexcept {
  for (int i = 0; i < kColorPermCount; ++i) {
    if (kColorOrders[static_cast<std::size_t>(i)] == order) return i;
  }
  return -1;
}

constexpr int color_inverse(int code) noexcept {
  const auto& o = kColorOrders[static_cast<std::size_t>(code)];
  std::array<int, 3> inv{};
  for (int c = 0; c < 3; ++c) inv[static_cast<std::size_t>(o[static_cast<std::size_t>(c)])] = c;
  return color_perm_index(inv);
}

/// Code of shuffle a after shuffle b.
constexpr int color_compose(int a, int b) noexcept {
  const auto& oa = kColorOrders[static_cast<std::size_t>(a)];
  const auto& ob = kColorOrders[static_cast<std::size_t>(b)];
  std::array<int, 3> out{};
  for (int c = 0; c < 3; ++c) out[static_cast<std::size_t>(c)] = ob[static_cast<std::size_t>(oa[static_cast<std::size_t>(c)])];
  return color_perm_index(out);
}

RasterImage shuffle_colors(const RasterImage& block, int code);

}  // namespace scramble
