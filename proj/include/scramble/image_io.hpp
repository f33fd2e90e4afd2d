#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>

#include "scramble/jpeg.hpp"
#include "scramble/raster.hpp"

namespace scramble {

Bytes read_file(const std::filesystem::path& path);
/// Write via a temporary sibling file and rename.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

/// 8-bit gray or RGB PNG. Alpha and 16-bit inputs are rejected.
RasterImage decode_png(std::span<const std::uint8_t> bytes);
Bytes encode_png(const RasterImage& image);

bool looks_like_png(std::span<const std::uint8_t> bytes) noexcept;
bool looks_like_jpeg(std::span<const std::uint8_t> bytes) noexcept;

/// PNG or JPEG, detected from the file signature.
RasterImage load_image(const std::filesystem::path& path);

}  // namespace scramble
