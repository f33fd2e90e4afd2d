#include <algorithm>
#include <cctype>

#include "scramble/cli.hpp"
#include "scramble/error.hpp"
#include "scramble/image_io.hpp"
#include "scramble/keystream.hpp"

namespace scramble::cli {

namespace fs = std::filesystem;

namespace {

enum class Carrier { Png, Jpeg };

Carrier carrier_for(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".png") return Carrier::Png;
  if (ext == ".jpg" || ext == ".jpeg") return Carrier::Jpeg;
  throw UsageError("output " + path.string() + " must end in .png, .jpg or .jpeg");
}

void write_image(const fs::path& path, const RasterImage& image, JpegParams params) {
  if (carrier_for(path) == Carrier::Png) {
    write_file_atomic(path, encode_png(image));
    return;
  }
  params.grayscale = image.channels() == 1;
  write_file_atomic(path, encode_jpeg(image, params));
}

fs::path sidecar_for(const fs::path& image) { return fs::path(image.string() + ".json"); }

}  // namespace

void cmd_keygen(const fs::path& out, bool hex) {
  const Key256 key = random_key();
  if (hex) {
    write_file_atomic(out, to_hex(key) + "\n");
  } else {
    write_file_atomic(out, std::span<const std::uint8_t>(key));
  }
}

KeySet load_keys(const KeySource& source, Scheme scheme) {
  if (source.master.has_value() == source.subkeys.has_value()) {
    throw UsageError("give exactly one of --key (master key) or --subkeys (K1..K4)");
  }
  if (source.master) return make_keyset(parse_key_file(read_file(*source.master)), scheme);
  return make_keyset_from_subkeys(parse_subkey_file(read_file(*source.subkeys)), scheme);
}

EncryptionMetadata cmd_encrypt(const EncryptRequest& req) {
  carrier_for(req.output);
  req.cipher.validate();
  RasterImage image = load_image(req.input);
  if (req.crop) image = crop_to_multiple(image, req.cipher.block_w, req.cipher.block_h);
  const KeySet keys = load_keys(req.keys, req.cipher.scheme);
  const RasterImage encrypted = encrypt(image, keys, req.cipher);
  const auto meta = EncryptionMetadata::describe(req.cipher, image.width(), image.height());
  write_image(req.output, encrypted, req.jpeg);
  write_file_atomic(sidecar_for(req.output), meta.to_json());
  return meta;
}

void cmd_decrypt(const DecryptRequest& req) {
  carrier_for(req.output);
  std::optional<fs::path> sidecar = req.metadata;
  if (!sidecar && fs::exists(sidecar_for(req.input))) sidecar = sidecar_for(req.input);

  CipherConfig cipher;
  std::optional<EncryptionMetadata> meta;
  if (sidecar) {
    const Bytes text = read_file(*sidecar);
    meta = EncryptionMetadata::from_json(std::string_view(reinterpret_cast<const char*>(text.data()), text.size()));
    cipher = meta->cipher_config();
  } else if (req.scheme && req.block) {
    cipher = *req.scheme == Scheme::Conventional ? CipherConfig::conventional(*req.block)
                                                 : CipherConfig::grayscale(*req.block, req.orientation);
    cipher.allow_nonstandard_block = true;
  } else {
    throw UsageError("no metadata sidecar at " + sidecar_for(req.input).string() +
                     "; pass --meta or both --scheme and --block");
  }
  const KeySet keys = load_keys(req.keys, cipher.scheme);
  const RasterImage decrypted = decrypt(load_image(req.input), keys, cipher);
  if (meta && (decrypted.width() != meta->original_width || decrypted.height() != meta->original_height)) {
    throw GeometryMismatch("decrypted image is " + std::to_string(decrypted.width()) + "x" +
                           std::to_string(decrypted.height()) + " but the sidecar records " +
                           std::to_string(meta->original_width) + "x" + std::to_string(meta->original_height));
  }
  write_image(req.output, decrypted, JpegParams{});
}

}  // namespace scramble::cli
