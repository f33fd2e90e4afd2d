#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scramble {

using Key256 = std::array<std::uint8_t, 32>;

enum class Scheme { Conventional, Grayscale };

std::string_view to_string(Scheme scheme) noexcept;
/// Accepts "conventional" / "grayscale". Throws scramble::Error otherwise.
Scheme parse_scheme(std::string_view text);

/// Secret material for one encryption. Subkeys K1..K4 drive, in order, the
/// block permutation, the rotate/flip codes, the negative-positive flags and
/// the color shuffle. K4 is carried but never read for Scheme::Grayscale.
struct KeySet {
  std::optional<Key256> master;  // absent when the subkeys were supplied directly
  Scheme scheme = Scheme::Conventional;
  std::array<Key256, 4> subkeys{};

  const Key256& k1() const noexcept { return subkeys[0]; }
  const Key256& k2() const noexcept { return subkeys[1]; }
  const Key256& k3() const noexcept { return subkeys[2]; }
  const Key256& k4() const noexcept { return subkeys[3]; }
};

/// Per-block encryption decisions for n blocks. Entry i describes encrypted
/// block position i: it holds source block permutation[i], rotated/flipped
/// by d4_codes[i], negated when neg_flags[i] = 1, with channels reordered by
/// color_perms[i].
struct TransformSpec {
  std::vector<std::uint32_t> permutation;
  std::vector<std::uint8_t> d4_codes;
  std::vector<std::uint8_t> neg_flags;
  std::optional<std::vector<std::uint8_t>> color_perms;

  std::size_t size() const noexcept { return permutation.size(); }
  /// Throws scramble::Error if the invariants do not hold for `scheme`.
  void validate(Scheme scheme) const;

  friend bool operator==(const TransformSpec&, const TransformSpec&) = default;
};

bool is_bijection(const std::vector<std::uint32_t>& map);
std::vector<std::uint32_t> invert_permutation(const std::vector<std::uint32_t>& map);

std::string to_hex(const Key256& key);
/// 64 hex digits, case-insensitive. Throws KeyFormatError.
Key256 key_from_hex(std::string_view hex);

}  // namespace scramble
