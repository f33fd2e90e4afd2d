#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "scramble/cipher.hpp"
#include "scramble/keys.hpp"

namespace scramble {

/// Sidecar describing how an image was encrypted. Never holds key material.
struct EncryptionMetadata {
  static constexpr int kFormatVersion = 1;

  int format_version = kFormatVersion;
  Scheme scheme = Scheme::Conventional;
  int block_w = 16;
  int block_h = 16;
  std::optional<Orientation> orientation;  // grayscale scheme only
  int original_width = 0;
  int original_height = 0;
  std::string keystream_algorithm_id;

  static EncryptionMetadata describe(const CipherConfig& cfg, int original_width, int original_height);
  /// Rebuild the cipher configuration; non-16 conventional blocks get the
  /// override set since the sender already chose them.
  CipherConfig cipher_config() const;

  std::string to_json() const;
  /// Throws MetadataError on malformed input, unknown versions or a
  /// keystream algorithm this build does not implement.
  static EncryptionMetadata from_json(std::string_view text);

  friend bool operator==(const EncryptionMetadata&, const EncryptionMetadata&) = default;
};

}  // namespace scramble
