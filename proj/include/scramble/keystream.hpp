#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "scramble/keys.hpp"

namespace scramble {

/// Identifier written into encrypted-image metadata. Bump when the subkey
/// derivation, stream cipher, nonce layout or sampling procedure changes.
inline constexpr std::string_view kKeystreamAlgorithmId = "chacha20-djb/hmac-sha256/rejection-v1";

enum class Purpose : std::uint8_t { Permute, RotateInvert, NegPos, ColorShuffle };

/// Counter-mode keystream for one (subkey, purpose) pair.
///
/// Output is the ChaCha20 (64-bit nonce, 64-bit block counter) keystream
/// with the purpose tag as nonce, read as little-endian 32-bit words.
/// Uniform integers below a bound use rejection sampling so every value is
/// exactly equiprobable.
class Keystream {
 public:
  Keystream(const Key256& subkey, Purpose purpose);

  std::uint32_t next_u32();
  /// Uniform in [0, bound). bound must be >= 1.
  std::uint32_t uniform(std::uint32_t bound);
  /// 32-bit words consumed so far.
  std::uint64_t counter() const noexcept { return words_drawn_; }

 private:
  void refill();

  Key256 key_;
  std::array<std::uint8_t, 8> nonce_{};
  std::array<std::uint8_t, 1024> buffer_{};
  std::size_t pos_ = 1024;
  std::uint64_t block_counter_ = 0;
  std::uint64_t words_drawn_ = 0;
};

/// K1..K4 as HMAC-SHA256(master, "scramble/subkey/v1" 0 scheme 0 "Ki").
/// Throws KeyFormatError unless master is 32 bytes.
std::array<Key256, 4> derive_subkeys(std::span<const std::uint8_t> master, Scheme scheme);

KeySet make_keyset(const Key256& master, Scheme scheme);
KeySet make_keyset_from_subkeys(const std::array<Key256, 4>& subkeys, Scheme scheme);

/// Fisher-Yates shuffle of the identity, swapping index i (from n-1 down to
/// 1) with uniform(i + 1).
std::vector<std::uint32_t> gen_permutation(const Key256& k1, std::size_t n);
std::vector<std::uint8_t> gen_d4_codes(const Key256& k2, std::size_t n);
std::vector<std::uint8_t> gen_neg_flags(const Key256& k3, std::size_t n);
/// Indices into the lexicographic list of RGB orderings; 0 is identity.
std::vector<std::uint8_t> gen_color_perms(const Key256& k4, std::size_t n);

/// All per-block decisions for an n-block image. color_perms is left empty
/// for the grayscale scheme.
TransformSpec generate_transform_spec(const KeySet& keys, std::size_t n);

/// Key file body: 32 raw bytes, or 64 hex characters with an optional
/// trailing newline.
Key256 parse_key_file(std::span<const std::uint8_t> contents);
/// Explicit-subkey file: four lines of 64 hex characters (K1..K4).
std::array<Key256, 4> parse_subkey_file(std::span<const std::uint8_t> contents);

/// 32 bytes from the OS CSPRNG.
Key256 random_key();

}  // namespace scramble
