#include "scramble/cipher.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "scramble/block_ops.hpp"
#include "scramble/error.hpp"
#include "scramble/keystream.hpp"

namespace scramble {

std::string_view to_string(Orientation o) noexcept { return o == Orientation::Vertical ? "vertical" : "horizontal"; }

Orientation parse_orientation(std::string_view text) {
  if (text == "vertical") return Orientation::Vertical;
  if (text == "horizontal") return Orientation::Horizontal;
  throw Error("unknown orientation '" + std::string(text) + "' (expected vertical or horizontal)");
}

CipherConfig CipherConfig::conventional(int block) {
  CipherConfig cfg;
  cfg.scheme = Scheme::Conventional;
  cfg.block_w = cfg.block_h = block;
  return cfg;
}

CipherConfig CipherConfig::grayscale(int block, Orientation orientation) {
  CipherConfig cfg;
  cfg.scheme = Scheme::Grayscale;
  cfg.block_w = cfg.block_h = block;
  cfg.orientation = orientation;
  return cfg;
}

void CipherConfig::validate() const {
  if (block_w < 1 || block_h < 1) throw InvalidGeometry("block size must be positive");
  if (block_w != block_h) throw InvalidGeometry("blocks must be square for rotate/flip");
  if (scheme == Scheme::Conventional && block_w != 16 && !allow_nonstandard_block) {
    throw InvalidGeometry("conventional scheme uses 16x16 blocks (the 4:2:0 MCU); " + std::to_string(block_w) + "x" +
                          std::to_string(block_h) + " needs the non-standard block override");
  }
}

RasterImage to_grayscale_composite(const RasterImage& image, Orientation orientation) {
  if (image.channels() != 3) throw FormatError("grayscale composite needs an RGB image");
  const int w = image.width();
  const int h = image.height();
  const bool vertical = orientation == Orientation::Vertical;
  RasterImage out(vertical ? w : 3 * w, vertical ? 3 * h : h, 1);
  for (int c = 0; c < 3; ++c) {
    const int ox = vertical ? 0 : c * w;
    const int oy = vertical ? c * h : 0;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) out.set(ox + x, oy + y, 0, image.at(x, y, c));
    }
  }
  return out;
}

RasterImage from_grayscale_composite(const RasterImage& composite, Orientation orientation) {
  if (composite.channels() != 1) throw FormatError("grayscale composite must have one channel");
  const bool vertical = orientation == Orientation::Vertical;
  const int axis = vertical ? composite.height() : composite.width();
  if (axis % 3 != 0) {
    throw GeometryMismatch(std::string("composite ") + (vertical ? "height " : "width ") + std::to_string(axis) +
                           " is not divisible by 3");
  }
  const int w = vertical ? composite.width() : composite.width() / 3;
  const int h = vertical ? composite.height() / 3 : composite.height();
  RasterImage out(w, h, 3);
  for (int c = 0; c < 3; ++c) {
    const int ox = vertical ? 0 : c * w;
    const int oy = vertical ? c * h : 0;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) out.set(x, y, c, composite.at(ox + x, oy + y));
    }
  }
  return out;
}

BlockGeometry cipher_geometry(int original_width, int original_height, const CipherConfig& cfg) {
  cfg.validate();
  int w = original_width;
  int h = original_height;
  if (cfg.scheme == Scheme::Grayscale) {
    (cfg.orientation == Orientation::Vertical ? h : w) *= 3;
  }
  return BlockGeometry::tile(w, h, cfg.block_w, cfg.block_h);
}

RasterImage scramble_blocks(const RasterImage& image, const TransformSpec& spec, const BlockGeometry& geom) {
  auto blocks = split_into_blocks(image, geom);
  if (spec.size() != blocks.size()) throw GeometryMismatch("transform spec size differs from block count");
  if (spec.color_perms && image.channels() != 3) throw FormatError("color shuffle needs an RGB image");
  std::vector<RasterImage> out;
  out.reserve(blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    RasterImage b = apply_d4(blocks[spec.permutation[i]], spec.d4_codes[i]);
    b = negative_positive(b, spec.neg_flags[i] != 0);
    if (spec.color_perms) b = shuffle_colors(b, (*spec.color_perms)[i]);
    out.push_back(std::move(b));
  }
  return assemble_blocks(out, geom);
}

RasterImage unscramble_blocks(const RasterImage& image, const TransformSpec& spec, const BlockGeometry& geom) {
  auto blocks = split_into_blocks(image, geom);
  if (spec.size() != blocks.size()) throw GeometryMismatch("transform spec size differs from block count");
  if (spec.color_perms && image.channels() != 3) throw FormatError("color shuffle needs an RGB image");
  std::vector<RasterImage> out(blocks.size(), RasterImage(geom.block_w, geom.block_h, image.channels()));
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    RasterImage b = std::move(blocks[i]);
    if (spec.color_perms) b = shuffle_colors(b, color_inverse((*spec.color_perms)[i]));
    b = negative_positive(b, spec.neg_flags[i] != 0);
    b = apply_d4(b, d4_inverse(spec.d4_codes[i]));
    out[spec.permutation[i]] = std::move(b);
  }
  return assemble_blocks(out, geom);
}

namespace {

void require_scheme(const CipherConfig& cfg, const KeySet& keys, Scheme expected) {
  cfg.validate();
  if (cfg.scheme != expected || keys.scheme != expected) {
    throw Error(std::string("configuration/key scheme mismatch, expected ") + std::string(to_string(expected)));
  }
}

TransformSpec spec_for(const KeySet& keys, const BlockGeometry& geom) {
  return generate_transform_spec(keys, geom.n);
}

}  // namespace

RasterImage encrypt_conventional(const RasterImage& image, const KeySet& keys, const CipherConfig& cfg) {
  require_scheme(cfg, keys, Scheme::Conventional);
  if (image.channels() != 3) throw FormatError("conventional scheme encrypts RGB images");
  const auto geom = BlockGeometry::tile(image.width(), image.height(), cfg.block_w, cfg.block_h);
  require_exact_tiling(image, geom);
  return scramble_blocks(image, spec_for(keys, geom), geom);
}

RasterImage decrypt_conventional(const RasterImage& image, const KeySet& keys, const CipherConfig& cfg) {
  require_scheme(cfg, keys, Scheme::Conventional);
  if (image.channels() != 3) throw FormatError("conventional scheme decrypts RGB images");
  const auto geom = BlockGeometry::tile(image.width(), image.height(), cfg.block_w, cfg.block_h);
  require_exact_tiling(image, geom);
  return unscramble_blocks(image, spec_for(keys, geom), geom);
}

RasterImage encrypt_grayscale(const RasterImage& image, const KeySet& keys, const CipherConfig& cfg) {
  require_scheme(cfg, keys, Scheme::Grayscale);
  const RasterImage composite = to_grayscale_composite(image, cfg.orientation);
  const auto geom = BlockGeometry::tile(composite.width(), composite.height(), cfg.block_w, cfg.block_h);
  require_exact_tiling(composite, geom);
  return scramble_blocks(composite, spec_for(keys, geom), geom);
}

RasterImage decrypt_grayscale(const RasterImage& image, const KeySet& keys, const CipherConfig& cfg) {
  require_scheme(cfg, keys, Scheme::Grayscale);
  if (image.channels() != 1) throw FormatError("grayscale scheme decrypts single-channel composites");
  const bool vertical = cfg.orientation == Orientation::Vertical;
  if ((vertical ? image.height() : image.width()) % 3 != 0) {
    throw GeometryMismatch("composite stacking axis is not divisible by 3 (wrong orientation?)");
  }
  const auto geom = BlockGeometry::tile(image.width(), image.height(), cfg.block_w, cfg.block_h);
  require_exact_tiling(image, geom);
  return from_grayscale_composite(unscramble_blocks(image, spec_for(keys, geom), geom), cfg.orientation);
}

RasterImage encrypt(const RasterImage& image, const KeySet& keys, const CipherConfig& cfg) {
  return cfg.scheme == Scheme::Conventional ? encrypt_conventional(image, keys, cfg)
                                            : encrypt_grayscale(image, keys, cfg);
}

RasterImage decrypt(const RasterImage& image, const KeySet& keys, const CipherConfig& cfg) {
  return cfg.scheme == Scheme::Conventional ? decrypt_conventional(image, keys, cfg)
                                            : decrypt_grayscale(image, keys, cfg);
}

double estimate_keyspace(Scheme scheme, std::size_t n) {
  if (n == 0) throw InvalidGeometry("key space of zero blocks");
  const double nd = static_cast<double>(n);
  double bits = std::lgamma(nd + 1.0) / std::numbers::ln2 + 3.0 * nd + nd;
  if (scheme == Scheme::Conventional) bits += nd * std::log2(6.0);
  return bits;
}

}  // namespace scramble
