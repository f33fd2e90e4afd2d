#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scramble/raster.hpp"

namespace scramble {

using Bytes = std::vector<std::uint8_t>;

enum class Subsampling { S444, S420 };

std::string_view to_string(Subsampling s) noexcept;
Subsampling parse_subsampling(std::string_view text);

struct JpegParams {
  int quality = 95;  // IJG quality factor, 1..100
  Subsampling subsampling = Subsampling::S444;
  /// Request a single-component stream. Must agree with the raster's
  /// channel count; a 1-channel raster always produces one.
  bool grayscale = false;
  /// Written as a COM segment when non-empty.
  std::string comment;
};

struct SamplingFactor {
  int h = 1;
  int v = 1;
  friend bool operator==(const SamplingFactor&, const SamplingFactor&) = default;
};

using QuantTable = std::array<std::uint16_t, 64>;  // natural (row-major) order

struct JpegStreamInfo {
  int width = 0;
  int height = 0;
  int component_count = 0;
  std::vector<SamplingFactor> sampling;  // per component, frame header order
  std::vector<QuantTable> quant_tables;  // per component
  std::optional<int> estimated_quality;
  std::optional<std::string> comment;

  /// 4:4:4 when every component is 1x1, 4:2:0 when luma is 2x2 and chroma
  /// 1x1; empty for single-component or other layouts.
  std::optional<Subsampling> subsampling() const;
};

struct DecodedJpeg {
  RasterImage image;
  JpegStreamInfo info;
};

/// Baseline JPEG via the system IJG-compatible codec, standard Annex K
/// tables scaled by the IJG quality formula.
Bytes encode_jpeg(const RasterImage& image, const JpegParams& params);

/// Throws CodecError on malformed or truncated streams (codec warnings are
/// promoted to errors).
DecodedJpeg decode_jpeg(std::span<const std::uint8_t> bytes);

/// Header-only parse.
JpegStreamInfo read_jpeg_info(std::span<const std::uint8_t> bytes);

/// Annex K table scaled to `quality` exactly as the IJG library does with
/// baseline clamping.
QuantTable ijg_quant_table(int quality, bool chroma);

/// Lowest IJG quality whose tables reproduce the stream's tables. When no
/// table set matches exactly, the closest one is accepted if every entry is
/// within one step; otherwise the quality is unknown.
std::optional<int> estimate_quality(const JpegStreamInfo& info);
std::optional<int> estimate_quality(std::span<const std::uint8_t> bytes);

}  // namespace scramble
