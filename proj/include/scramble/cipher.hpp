#pragma once

#include <cstddef>
#include <string_view>

#include "scramble/geometry.hpp"
#include "scramble/keys.hpp"
#include "scramble/raster.hpp"

namespace scramble {

/// How the three channel planes are stacked into the grayscale composite.
/// Vertical gives a W x 3H image (R on top), Horizontal a 3W x H image
/// (R on the left).
enum class Orientation { Vertical, Horizontal };

std::string_view to_string(Orientation o) noexcept;
Orientation parse_orientation(std::string_view text);

struct CipherConfig {
  Scheme scheme = Scheme::Conventional;
  int block_w = 16;
  int block_h = 16;
  Orientation orientation = Orientation::Vertical;
  /// Conventional blocks smaller than the 16x16 MCU break 4:2:0 chroma
  /// subsampling; they are only accepted with this override.
  bool allow_nonstandard_block = false;

  static CipherConfig conventional(int block = 16);
  static CipherConfig grayscale(int block = 8, Orientation orientation = Orientation::Vertical);

  /// Throws InvalidGeometry for non-square or disallowed block sizes.
  void validate() const;
};

/// Split an RGB image into its R, G, B planes and stack them.
RasterImage to_grayscale_composite(const RasterImage& image, Orientation orientation);
RasterImage from_grayscale_composite(const RasterImage& composite, Orientation orientation);

/// Block tiling the cipher uses for an original of the given size (the
/// composite's tiling for the grayscale scheme).
BlockGeometry cipher_geometry(int original_width, int original_height, const CipherConfig& cfg);

/// Move, rotate/flip, negate and color-shuffle blocks per `spec`. The
/// color step runs only when spec.color_perms is present.
RasterImage scramble_blocks(const RasterImage& image, const TransformSpec& spec, const BlockGeometry& geom);
/// Exact inverse of scramble_blocks.
RasterImage unscramble_blocks(const RasterImage& image, const TransformSpec& spec, const BlockGeometry& geom);

RasterImage encrypt_conventional(const RasterImage& image, const KeySet& keys, const CipherConfig& cfg);
RasterImage decrypt_conventional(const RasterImage& image, const KeySet& keys, const CipherConfig& cfg);

/// Returns the encrypted single-channel composite.
RasterImage encrypt_grayscale(const RasterImage& image, const KeySet& keys, const CipherConfig& cfg);
/// Takes the (possibly JPEG-degraded) composite and returns RGB.
RasterImage decrypt_grayscale(const RasterImage& image, const KeySet& keys, const CipherConfig& cfg);

/// Dispatch on cfg.scheme.
RasterImage encrypt(const RasterImage& image, const KeySet& keys, const CipherConfig& cfg);
RasterImage decrypt(const RasterImage& image, const KeySet& keys, const CipherConfig& cfg);

/// log2 of the number of keys: log2(n!) + 3n + n, plus n log2(6) for the
/// conventional scheme's color shuffle.
double estimate_keyspace(Scheme scheme, std::size_t n);

}  // namespace scramble
