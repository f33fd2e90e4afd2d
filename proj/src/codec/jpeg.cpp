#include "scramble/jpeg.hpp"

// jpeglib.h needs size_t and FILE declared first.
#include <cstddef>
#include <cstdio>
#include <cstdlib>
#include <csetjmp>
#include <cstring>

#include <jpeglib.h>

#include <algorithm>
#include <limits>

#include "scramble/error.hpp"

namespace scramble {

namespace {

constexpr QuantTable kLumaBase{
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,   //
    14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,   //
    18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,   //
    49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};

constexpr QuantTable kChromaBase{
    17, 18, 24, 47, 99, 99, 99, 99, 18, 21, 26, 66, 99, 99, 99, 99,  //
    24, 26, 56, 99, 99, 99, 99, 99, 47, 66, 99, 99, 99, 99, 99, 99,  //
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,  //
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99};

struct ErrorManager {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

[[noreturn]] void on_error(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<ErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

// Corrupt-data and premature-EOF conditions only surface as warnings.
void on_message(j_common_ptr cinfo, int level) {
  if (level < 0) on_error(cinfo);
}

void install(ErrorManager& err) {
  jpeg_std_error(&err.pub);
  err.pub.error_exit = on_error;
  err.pub.emit_message = on_message;
  err.message[0] = '\0';
}

void check_params(const RasterImage& image, const JpegParams& params) {
  if (params.quality < 1 || params.quality > 100) {
    throw CodecError("JPEG quality must be in [1, 100], got " + std::to_string(params.quality));
  }
  if (params.grayscale && image.channels() != 1) {
    throw CodecError("grayscale JPEG requested for a 3-channel image");
  }
  if (params.comment.size() > 65533) throw CodecError("JPEG comment longer than one COM segment");
  if (image.width() > JPEG_MAX_DIMENSION || image.height() > JPEG_MAX_DIMENSION) {
    throw CodecError("image too large for baseline JPEG");
  }
}

}  // namespace

std::string_view to_string(Subsampling s) noexcept { return s == Subsampling::S444 ? "4:4:4" : "4:2:0"; }

Subsampling parse_subsampling(std::string_view text) {
  if (text == "4:4:4" || text == "444") return Subsampling::S444;
  if (text == "4:2:0" || text == "420") return Subsampling::S420;
  throw Error("unknown subsampling '" + std::string(text) + "' (expected 444 or 420)");
}

std::optional<Subsampling> JpegStreamInfo::subsampling() const {
  if (component_count != 3 || sampling.size() != 3) return std::nullopt;
  const bool chroma_unit = sampling[1] == SamplingFactor{1, 1} && sampling[2] == SamplingFactor{1, 1};
  if (!chroma_unit) return std::nullopt;
  if (sampling[0] == SamplingFactor{1, 1}) return Subsampling::S444;
  if (sampling[0] == SamplingFactor{2, 2}) return Subsampling::S420;
  return std::nullopt;
}

Bytes encode_jpeg(const RasterImage& image, const JpegParams& params) {
  check_params(image, params);
  const bool gray = image.channels() == 1;
  unsigned char* out = nullptr;
  unsigned long out_size = 0;
  jpeg_compress_struct cinfo;
  ErrorManager err;
  cinfo.err = &err.pub;
  install(err);
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    std::free(out);
    throw CodecError(std::string("JPEG encode failed: ") + err.message);
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &out, &out_size);
  cinfo.image_width = static_cast<JDIMENSION>(image.width());
  cinfo.image_height = static_cast<JDIMENSION>(image.height());
  cinfo.input_components = image.channels();
  cinfo.in_color_space = gray ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, params.quality, TRUE);
  cinfo.dct_method = JDCT_ISLOW;
  if (!gray) {
    const int f = params.subsampling == Subsampling::S420 ? 2 : 1;
    cinfo.comp_info[0].h_samp_factor = f;
    cinfo.comp_info[0].v_samp_factor = f;
    for (int c = 1; c < 3; ++c) {
      cinfo.comp_info[c].h_samp_factor = 1;
      cinfo.comp_info[c].v_samp_factor = 1;
    }
  }
  jpeg_start_compress(&cinfo, TRUE);
  if (!params.comment.empty()) {
    jpeg_write_marker(&cinfo, JPEG_COM, reinterpret_cast<const JOCTET*>(params.comment.data()),
                      static_cast<unsigned int>(params.comment.size()));
  }
  const std::size_t stride = static_cast<std::size_t>(image.width()) * static_cast<std::size_t>(image.channels());
  auto* base = const_cast<JSAMPLE*>(image.samples().data());
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = base + static_cast<std::size_t>(cinfo.next_scanline) * stride;
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
  Bytes bytes(out, out + out_size);
  std::free(out);
  return bytes;
}

namespace {

// Decodes the header and, when `pixels` is non-null, the scanlines.
// Objects with destructors are all created before setjmp.
JpegStreamInfo run_decoder(std::span<const std::uint8_t> bytes, std::vector<std::uint8_t>* pixels) {
  if (bytes.size() < 4) throw CodecError("JPEG stream too short");
  if (bytes.size() > std::numeric_limits<unsigned long>::max()) throw CodecError("JPEG stream too large");
  JpegStreamInfo info;
  jpeg_decompress_struct cinfo;
  ErrorManager err;
  cinfo.err = &err.pub;
  install(err);
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw CodecError(std::string("JPEG decode failed: ") + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_save_markers(&cinfo, JPEG_COM, 0xFFFF);
  jpeg_read_header(&cinfo, TRUE);
  if (cinfo.num_components != 1 && cinfo.num_components != 3) {
    std::strcpy(err.message, "only 1- and 3-component JPEG streams are supported");
    std::longjmp(err.jump, 1);
  }
  info.width = static_cast<int>(cinfo.image_width);
  info.height = static_cast<int>(cinfo.image_height);
  info.component_count = cinfo.num_components;
  info.sampling.reserve(static_cast<std::size_t>(cinfo.num_components));
  for (int c = 0; c < cinfo.num_components; ++c) {
    const jpeg_component_info& comp = cinfo.comp_info[c];
    info.sampling.push_back({comp.h_samp_factor, comp.v_samp_factor});
    const JQUANT_TBL* tbl = cinfo.quant_tbl_ptrs[comp.quant_tbl_no];
    QuantTable q{};
    if (tbl != nullptr) std::copy(std::begin(tbl->quantval), std::end(tbl->quantval), q.begin());
    info.quant_tables.push_back(q);
  }
  for (jpeg_saved_marker_ptr m = cinfo.marker_list; m != nullptr; m = m->next) {
    if (m->marker == JPEG_COM) {
      info.comment = std::string(reinterpret_cast<const char*>(m->data), m->data_length);
      break;
    }
  }
  if (pixels != nullptr) {
    cinfo.out_color_space = cinfo.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
    cinfo.dct_method = JDCT_ISLOW;
    jpeg_start_decompress(&cinfo);
    const std::size_t stride = static_cast<std::size_t>(cinfo.output_width) *
                               static_cast<std::size_t>(cinfo.output_components);
    pixels->resize(stride * cinfo.output_height);
    while (cinfo.output_scanline < cinfo.output_height) {
      JSAMPROW row = pixels->data() + static_cast<std::size_t>(cinfo.output_scanline) * stride;
      jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
  }
  jpeg_destroy_decompress(&cinfo);
  info.estimated_quality = estimate_quality(info);
  return info;
}

}  // namespace

DecodedJpeg decode_jpeg(std::span<const std::uint8_t> bytes) {
  std::vector<std::uint8_t> pixels;
  JpegStreamInfo info = run_decoder(bytes, &pixels);
  RasterImage image(info.width, info.height, info.component_count, std::move(pixels));
  return {std::move(image), std::move(info)};
}

JpegStreamInfo read_jpeg_info(std::span<const std::uint8_t> bytes) { return run_decoder(bytes, nullptr); }

QuantTable ijg_quant_table(int quality, bool chroma) {
  quality = std::clamp(quality, 1, 100);
  const long scale = quality < 50 ? 5000 / quality : 200 - quality * 2;
  const QuantTable& base = chroma ? kChromaBase : kLumaBase;
  QuantTable out{};
  for (std::size_t i = 0; i < 64; ++i) {
    const long v = (static_cast<long>(base[i]) * scale + 50L) / 100L;
    out[i] = static_cast<std::uint16_t>(std::clamp(v, 1L, 255L));
  }
  return out;
}

std::optional<int> estimate_quality(const JpegStreamInfo& info) {
  if (info.quant_tables.empty()) return std::nullopt;
  int best_q = 0;
  long best_total = std::numeric_limits<long>::max();
  int best_max = 0;
  for (int q = 1; q <= 100; ++q) {
    const QuantTable luma = ijg_quant_table(q, false);
    const QuantTable chroma = ijg_quant_table(q, true);
    long total = 0;
    int worst = 0;
    for (std::size_t c = 0; c < info.quant_tables.size(); ++c) {
      const QuantTable& ref = c == 0 ? luma : chroma;
      for (std::size_t i = 0; i < 64; ++i) {
        const int d = std::abs(static_cast<int>(info.quant_tables[c][i]) - static_cast<int>(ref[i]));
        total += d;
        worst = std::max(worst, d);
      }
    }
    if (total < best_total) {
      best_total = total;
      best_max = worst;
      best_q = q;
    }
    if (total == 0) break;
  }
  if (best_max > 1) return std::nullopt;
  return best_q;
}

std::optional<int> estimate_quality(std::span<const std::uint8_t> bytes) {
  return estimate_quality(read_jpeg_info(bytes));
}

}  // namespace scramble
