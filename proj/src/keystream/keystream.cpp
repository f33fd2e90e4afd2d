#include "scramble/keystream.hpp"

#include <sodium.h>

#include <cstring>
#include <string>

#include "scramble/error.hpp"

namespace scramble {

namespace {

void ensure_sodium() {
  static const int rc = sodium_init();
  if (rc < 0) throw Error("libsodium initialisation failed");
}

std::array<std::uint8_t, 8> nonce_for(Purpose purpose) {
  std::array<std::uint8_t, 8> nonce{};
  const char* tag = "";
  switch (purpose) {
    case Purpose::Permute: tag = "PERMUTE"; break;
    case Purpose::RotateInvert: tag = "ROTFLIP"; break;
    case Purpose::NegPos: tag = "NEGPOS"; break;
    case Purpose::ColorShuffle: tag = "COLOR"; break;
  }
  std::memcpy(nonce.data(), tag, std::strlen(tag));
  return nonce;
}

void require_blocks(std::size_t n) {
  if (n == 0) throw InvalidGeometry("cannot generate decisions for zero blocks");
}

template <typename T>
std::vector<T> draw_uniform(const Key256& key, Purpose purpose, std::size_t n, std::uint32_t bound) {
  require_blocks(n);
  Keystream ks(key, purpose);
  std::vector<T> out(n);
  for (auto& v : out) v = static_cast<T>(ks.uniform(bound));
  return out;
}

}  // namespace

Keystream::Keystream(const Key256& subkey, Purpose purpose) : key_(subkey), nonce_(nonce_for(purpose)) {
  ensure_sodium();
}

void Keystream::refill() {
  static const std::array<std::uint8_t, 1024> kZeros{};
  crypto_stream_chacha20_xor_ic(buffer_.data(), kZeros.data(), buffer_.size(), nonce_.data(), block_counter_,
                                key_.data());
  block_counter_ += buffer_.size() / 64;
  pos_ = 0;
}

std::uint32_t Keystream::next_u32() {
  if (pos_ + 4 > buffer_.size()) refill();
  const std::uint8_t* p = buffer_.data() + pos_;
  pos_ += 4;
  ++words_drawn_;
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::uint32_t Keystream::uniform(std::uint32_t bound) {
  if (bound == 0) throw Error("uniform bound must be positive");
  // Values below 2^32 mod bound would over-weight the low residues.
  const std::uint32_t reject_below = static_cast<std::uint32_t>(-bound) % bound;
  for (;;) {
    const std::uint32_t x = next_u32();
    if (x >= reject_below) return x % bound;
  }
}

std::array<Key256, 4> derive_subkeys(std::span<const std::uint8_t> master, Scheme scheme) {
  if (master.size() != 32) {
    throw KeyFormatError("master key must be 32 bytes, got " + std::to_string(master.size()));
  }
  ensure_sodium();
  std::array<Key256, 4> out{};
  const std::string_view scheme_name = to_string(scheme);
  for (int i = 0; i < 4; ++i) {
    std::string msg = "scramble/subkey/v1";
    msg.push_back('\0');
    msg.append(scheme_name);
    msg.push_back('\0');
    msg.push_back('K');
    msg.push_back(static_cast<char>('1' + i));
    crypto_auth_hmacsha256_state st;
    crypto_auth_hmacsha256_init(&st, master.data(), master.size());
    crypto_auth_hmacsha256_update(&st, reinterpret_cast<const unsigned char*>(msg.data()), msg.size());
    crypto_auth_hmacsha256_final(&st, out[static_cast<std::size_t>(i)].data());
    sodium_memzero(&st, sizeof st);
  }
  return out;
}

KeySet make_keyset(const Key256& master, Scheme scheme) {
  KeySet ks;
  ks.master = master;
  ks.scheme = scheme;
  ks.subkeys = derive_subkeys(master, scheme);
  return ks;
}

KeySet make_keyset_from_subkeys(const std::array<Key256, 4>& subkeys, Scheme scheme) {
  KeySet ks;
  ks.scheme = scheme;
  ks.subkeys = subkeys;
  return ks;
}

std::vector<std::uint32_t> gen_permutation(const Key256& k1, std::size_t n) {
  require_blocks(n);
  if (n > 0xFFFFFFFFu) throw InvalidGeometry("too many blocks");
  std::vector<std::uint32_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<std::uint32_t>(i);
  Keystream ks(k1, Purpose::Permute);
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::uint32_t j = ks.uniform(static_cast<std::uint32_t>(i + 1));
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

std::vector<std::uint8_t> gen_d4_codes(const Key256& k2, std::size_t n) {
  return draw_uniform<std::uint8_t>(k2, Purpose::RotateInvert, n, 8);
}

std::vector<std::uint8_t> gen_neg_flags(const Key256& k3, std::size_t n) {
  return draw_uniform<std::uint8_t>(k3, Purpose::NegPos, n, 2);
}

std::vector<std::uint8_t> gen_color_perms(const Key256& k4, std::size_t n) {
  return draw_uniform<std::uint8_t>(k4, Purpose::ColorShuffle, n, 6);
}

TransformSpec generate_transform_spec(const KeySet& keys, std::size_t n) {
  TransformSpec spec;
  spec.permutation = gen_permutation(keys.k1(), n);
  spec.d4_codes = gen_d4_codes(keys.k2(), n);
  spec.neg_flags = gen_neg_flags(keys.k3(), n);
  if (keys.scheme == Scheme::Conventional) spec.color_perms = gen_color_perms(keys.k4(), n);
  return spec;
}

Key256 parse_key_file(std::span<const std::uint8_t> contents) {
  if (contents.size() == 32) {
    Key256 key{};
    std::memcpy(key.data(), contents.data(), 32);
    return key;
  }
  std::string_view text(reinterpret_cast<const char*>(contents.data()), contents.size());
  if (text.ends_with("\r\n")) {
    text.remove_suffix(2);
  } else if (text.ends_with('\n')) {
    text.remove_suffix(1);
  }
  if (text.size() != 64) {
    throw KeyFormatError("key file must hold 32 raw bytes or 64 hex characters (got " +
                         std::to_string(contents.size()) + " bytes)");
  }
  return key_from_hex(text);
}

std::array<Key256, 4> parse_subkey_file(std::span<const std::uint8_t> contents) {
  std::string_view text(reinterpret_cast<const char*>(contents.data()), contents.size());
  std::array<Key256, 4> keys{};
  std::size_t found = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (line.ends_with('\r')) line.remove_suffix(1);
    if (line.empty()) continue;
    if (found == 4) throw KeyFormatError("subkey file holds more than four keys");
    keys[found++] = key_from_hex(line);
  }
  if (found != 4) throw KeyFormatError("subkey file must hold exactly four hex keys (K1..K4)");
  return keys;
}

Key256 random_key() {
  ensure_sodium();
  Key256 key{};
  randombytes_buf(key.data(), key.size());
  return key;
}

}  // namespace scramble
