#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "doctest.h"
#include "scramble/error.hpp"
#include "scramble/keystream.hpp"
#include "support.hpp"

using namespace scramble;

namespace {

nlohmann::json fixtures() {
  std::ifstream in(testsupport::data_dir() / "golden_transform_spec.json");
  return nlohmann::json::parse(in);
}

Key256 counter_key(std::uint64_t i) {
  Key256 k{};
  for (int b = 0; b < 8; ++b) k[static_cast<std::size_t>(b)] = static_cast<std::uint8_t>(i >> (8 * b));
  k[31] = 0x5a;
  return k;
}

}  // namespace

TEST_SUITE("keystream") {
  TEST_CASE("raw stream matches the reference implementation") {
    const auto fx = fixtures();
    Keystream ks(key_from_hex(fx["stream_words"]["key"].get<std::string>()), Purpose::Permute);
    const auto words = fx["stream_words"]["words"].get<std::vector<std::uint32_t>>();
    REQUIRE(words.size() == 300);  // crosses one internal refill
    for (auto w : words) CHECK(ks.next_u32() == w);
    CHECK(ks.counter() == 300);
    CHECK(std::string(kKeystreamAlgorithmId) == "chacha20-djb/hmac-sha256/rejection-v1");
  }

  TEST_CASE("golden transform specs") {
    const auto fx = fixtures();
    const Key256 master = key_from_hex(fx["master"].get<std::string>());
    for (const auto& s : fx["specs"]) {
      const Scheme scheme = parse_scheme(s["scheme"].get<std::string>());
      const auto n = s["n"].get<std::size_t>();
      const KeySet keys = make_keyset(master, scheme);
      for (std::size_t i = 0; i < 4; ++i) CHECK(to_hex(keys.subkeys[i]) == s["subkeys"][i].get<std::string>());
      const TransformSpec spec = generate_transform_spec(keys, n);
      CHECK(spec.permutation == s["permutation"].get<std::vector<std::uint32_t>>());
      CHECK(spec.d4_codes == s["d4_codes"].get<std::vector<std::uint8_t>>());
      CHECK(spec.neg_flags == s["neg_flags"].get<std::vector<std::uint8_t>>());
      if (scheme == Scheme::Conventional) {
        REQUIRE(spec.color_perms.has_value());
        CHECK(*spec.color_perms == s["color_perms"].get<std::vector<std::uint8_t>>());
      } else {
        CHECK_FALSE(spec.color_perms.has_value());
      }
    }
  }

  TEST_CASE("small golden vectors") {
    const Key256 master = key_from_hex("000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f");
    const KeySet keys = make_keyset(master, Scheme::Conventional);
    CHECK(gen_permutation(keys.k1(), 4) == std::vector<std::uint32_t>{3, 2, 1, 0});
    CHECK(gen_d4_codes(keys.k2(), 3) == std::vector<std::uint8_t>{1, 1, 0});
  }

  TEST_CASE("subkey derivation") {
    Key256 m{};
    m[3] = 9;
    const auto a = derive_subkeys(m, Scheme::Conventional);
    CHECK(a == derive_subkeys(m, Scheme::Conventional));
    std::set<Key256> distinct(a.begin(), a.end());
    CHECK(distinct.size() == 4);
    const auto g = derive_subkeys(m, Scheme::Grayscale);
    for (std::size_t i = 0; i < 4; ++i) CHECK(a[i] != g[i]);
    for (int bit = 0; bit < 256; bit += 17) {
      Key256 flipped = m;
      flipped[static_cast<std::size_t>(bit / 8)] ^= static_cast<std::uint8_t>(1 << (bit % 8));
      const auto b = derive_subkeys(flipped, Scheme::Conventional);
      for (std::size_t i = 0; i < 4; ++i) CHECK(a[i] != b[i]);
    }
    const std::vector<std::uint8_t> short_key(31);
    CHECK_THROWS_AS(derive_subkeys(short_key, Scheme::Conventional), KeyFormatError);
  }

  TEST_CASE("generators reject empty grids") {
    const Key256 k{};
    CHECK_THROWS_AS(gen_permutation(k, 0), InvalidGeometry);
    CHECK_THROWS_AS(gen_d4_codes(k, 0), InvalidGeometry);
    CHECK_THROWS_AS(gen_neg_flags(k, 0), InvalidGeometry);
    CHECK_THROWS_AS(gen_color_perms(k, 0), InvalidGeometry);
    CHECK(gen_permutation(k, 1) == std::vector<std::uint32_t>{0});
  }

  TEST_CASE("permutations of 5 are uniform") {
    // 10^5 keys; every one of the 120 permutations within 5 sigma of 1/120.
    constexpr int kDraws = 100000;
    std::map<std::vector<std::uint32_t>, int> counts;
    for (int i = 0; i < kDraws; ++i) {
      const auto p = gen_permutation(counter_key(static_cast<std::uint64_t>(i)), 5);
      REQUIRE(is_bijection(p));
      ++counts[p];
    }
    CHECK(counts.size() == 120);
    const double expected = kDraws / 120.0;
    const double sigma = std::sqrt(kDraws * (1.0 / 120) * (119.0 / 120));
    double chi2 = 0;
    for (const auto& [perm, c] : counts) {
      CHECK(std::abs(c - expected) < 5 * sigma);
      chi2 += (c - expected) * (c - expected) / expected;
    }
    // 119 degrees of freedom; the 0.9999 quantile is about 181.
    CHECK(chi2 < 181);
  }

  TEST_CASE("per-purpose draws cover their range with expected frequency") {
    const Key256 k = counter_key(77);
    const auto d4 = gen_d4_codes(k, 10000);
    const auto neg = gen_neg_flags(k, 10000);
    const auto col = gen_color_perms(k, 10000);
    std::array<int, 8> c8{};
    std::array<int, 6> c6{};
    int ones = 0;
    for (auto v : d4) ++c8.at(v);
    for (auto v : col) ++c6.at(v);
    for (auto v : neg) ones += v;
    for (int c : c8) CHECK(std::abs(c - 1250) < 5 * std::sqrt(10000 * 0.125 * 0.875));
    for (int c : c6) CHECK(std::abs(c - 10000 / 6.0) < 5 * std::sqrt(10000 * (1 / 6.0) * (5 / 6.0)));
    CHECK(std::abs(ones - 5000) < 5 * 50);
  }

  TEST_CASE("prefix stability and purpose independence") {
    const Key256 k = counter_key(5);
    for (std::size_t n : {1u, 7u, 255u, 256u, 1000u}) {
      const auto a = gen_d4_codes(k, n);
      const auto b = gen_d4_codes(k, n + 1);
      CHECK(std::equal(a.begin(), a.end(), b.begin()));
      const auto fa = gen_neg_flags(k, n);
      const auto fb = gen_neg_flags(k, n + 1);
      CHECK(std::equal(fa.begin(), fa.end(), fb.begin()));
    }
    KeySet keys = make_keyset(counter_key(1), Scheme::Conventional);
    const auto before = generate_transform_spec(keys, 50);
    keys.subkeys[2] = counter_key(999);
    const auto after = generate_transform_spec(keys, 50);
    CHECK(before.permutation == after.permutation);
    CHECK(before.d4_codes == after.d4_codes);
    CHECK(before.neg_flags != after.neg_flags);
    // Same subkey bytes under different purposes give unrelated streams.
    Keystream p(k, Purpose::Permute), r(k, Purpose::RotateInvert);
    int same = 0;
    for (int i = 0; i < 64; ++i) same += p.next_u32() == r.next_u32();
    CHECK(same == 0);
  }

  TEST_CASE("uniform stays in range for awkward bounds") {
    Keystream ks(counter_key(3), Purpose::NegPos);
    for (std::uint32_t bound : {1u, 2u, 3u, 7u, 1000u, 0x80000001u, 0xFFFFFFFFu}) {
      for (int i = 0; i < 200; ++i) CHECK(ks.uniform(bound) < bound);
    }
    CHECK_THROWS_AS(ks.uniform(0), Error);
  }

  TEST_CASE("key files") {
    Key256 k{};
    for (std::size_t i = 0; i < 32; ++i) k[i] = static_cast<std::uint8_t>(200 + i);
    CHECK(parse_key_file(std::vector<std::uint8_t>(k.begin(), k.end())) == k);
    for (std::string text : {to_hex(k), to_hex(k) + "\n", to_hex(k) + "\r\n"}) {
      CHECK(parse_key_file(std::vector<std::uint8_t>(text.begin(), text.end())) == k);
    }
    const std::string bad = "xyz";
    CHECK_THROWS_AS(parse_key_file(std::vector<std::uint8_t>(bad.begin(), bad.end())), KeyFormatError);
    const std::string four = to_hex(k) + "\n" + to_hex(counter_key(1)) + "\n" + to_hex(counter_key(2)) + "\n" +
                             to_hex(counter_key(3)) + "\n";
    const auto subs = parse_subkey_file(std::vector<std::uint8_t>(four.begin(), four.end()));
    CHECK(subs[0] == k);
    CHECK(subs[3] == counter_key(3));
    const std::string three = four.substr(0, 65 * 3);
    CHECK_THROWS_AS(parse_subkey_file(std::vector<std::uint8_t>(three.begin(), three.end())), KeyFormatError);
    CHECK(random_key() != random_key());
  }
}
