#include "scramble/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>

#include "scramble/error.hpp"

namespace scramble {

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error("read error on '" + path.string() + "'");
  return data;
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw Error("write error on '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot move output into place at '" + path.string() + "'");
  }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

bool looks_like_png(std::span<const std::uint8_t> bytes) noexcept {
  static constexpr std::uint8_t kSig[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  return bytes.size() >= 8 && std::equal(std::begin(kSig), std::end(kSig), bytes.begin());
}

bool looks_like_jpeg(std::span<const std::uint8_t> bytes) noexcept {
  return bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF;
}

RasterImage decode_png(std::span<const std::uint8_t> bytes) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) {
    throw CodecError(std::string("PNG decode failed: ") + img.message);
  }
  if (img.format & PNG_FORMAT_FLAG_ALPHA) {
    png_image_free(&img);
    throw FormatError("PNG images with an alpha channel are not supported");
  }
  if (img.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&img);
    throw FormatError("only 8-bit PNG images are supported");
  }
  const bool color = (img.format & PNG_FORMAT_FLAG_COLOR) != 0;
  img.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const int channels = color ? 3 : 1;
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, pixels.data(), 0, nullptr)) {
    throw CodecError(std::string("PNG decode failed: ") + img.message);
  }
  return RasterImage(static_cast<int>(img.width), static_cast<int>(img.height), channels, std::move(pixels));
}

Bytes encode_png(const RasterImage& image) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width());
  img.height = static_cast<png_uint_32>(image.height());
  img.format = image.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&img, nullptr, &size, 0, image.samples().data(), 0, nullptr)) {
    throw CodecError(std::string("PNG encode failed: ") + img.message);
  }
  Bytes out(size);
  if (!png_image_write_to_memory(&img, out.data(), &size, 0, image.samples().data(), 0, nullptr)) {
    throw CodecError(std::string("PNG encode failed: ") + img.message);
  }
  out.resize(size);
  return out;
}

RasterImage load_image(const std::filesystem::path& path) {
  const Bytes data = read_file(path);
  if (looks_like_png(data)) return decode_png(data);
  if (looks_like_jpeg(data)) return decode_jpeg(data).image;
  throw FormatError("'" + path.string() + "' is neither PNG nor JPEG");
}

}  // namespace scramble
