#include "scramble/keys.hpp"

#include <algorithm>
#include <string>

#include "scramble/error.hpp"

namespace scramble {

std::string_view to_string(Scheme scheme) noexcept {
  return scheme == Scheme::Conventional ? "conventional" : "grayscale";
}

Scheme parse_scheme(std::string_view text) {
  if (text == "conventional") return Scheme::Conventional;
  if (text == "grayscale") return Scheme::Grayscale;
  throw Error("unknown scheme '" + std::string(text) + "' (expected conventional or grayscale)");
}

bool is_bijection(const std::vector<std::uint32_t>& map) {
  std::vector<bool> seen(map.size(), false);
  for (auto v : map) {
    if (v >= map.size() || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

std::vector<std::uint32_t> invert_permutation(const std::vector<std::uint32_t>& map) {
  std::vector<std::uint32_t> inv(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) inv[map[i]] = static_cast<std::uint32_t>(i);
  return inv;
}

void TransformSpec::validate(Scheme scheme) const {
  const std::size_t n = permutation.size();
  if (n == 0) throw InvalidGeometry("transform spec is empty");
  if (d4_codes.size() != n || neg_flags.size() != n) throw Error("transform spec arrays differ in length");
  if (!is_bijection(permutation)) throw Error("block permutation is not a bijection");
  if (std::any_of(d4_codes.begin(), d4_codes.end(), [](auto c) { return c >= 8; })) {
    throw Error("rotation/flip code out of range");
  }
  if (std::any_of(neg_flags.begin(), neg_flags.end(), [](auto f) { return f > 1; })) {
    throw Error("negative-positive flag is not a bit");
  }
  if (scheme == Scheme::Grayscale) {
    if (color_perms) throw Error("grayscale transform spec must not carry color permutations");
  } else {
    if (!color_perms || color_perms->size() != n) throw Error("conventional transform spec needs n color codes");
    if (std::any_of(color_perms->begin(), color_perms->end(), [](auto c) { return c >= 6; })) {
      throw Error("color permutation code out of range");
    }
  }
}

std::string to_hex(const Key256& key) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(64);
  for (auto b : key) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

Key256 key_from_hex(std::string_view hex) {
  if (hex.size() != 64) throw KeyFormatError("key must be 64 hex characters, got " + std::to_string(hex.size()));
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  Key256 key{};
  for (std::size_t i = 0; i < 32; ++i) {
    const int hi = nibble(hex[2 * i]);
    const int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw KeyFormatError("key contains a non-hex character");
    key[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return key;
}

}  // namespace scramble
