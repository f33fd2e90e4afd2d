#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "scramble/block_ops.hpp"
#include "scramble/cipher.hpp"
#include "scramble/error.hpp"
#include "scramble/keystream.hpp"
#include "scramble/metadata.hpp"
#include "scramble/metrics.hpp"
#include "support.hpp"

using namespace scramble;

namespace {

RasterImage probe(int k, int channels) {
  RasterImage b(k, k, channels);
  for (int y = 0; y < k; ++y)
    for (int x = 0; x < k; ++x)
      for (int c = 0; c < channels; ++c) b.set(x, y, c, static_cast<std::uint8_t>(1 + x + k * y + 50 * c));
  return b;
}

// Pixel-level reference for one encrypted block: for every source pixel,
// push it through flip, then clockwise quarter turns, then inversion and
// channel reordering.
RasterImage reference_encrypt(const RasterImage& img, const TransformSpec& spec, int k) {
  const auto geom = BlockGeometry::tile(img.width(), img.height(), k, k);
  RasterImage out(img.width(), img.height(), img.channels());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const int src = static_cast<int>(spec.permutation[i]);
    const int sx0 = (src % geom.cols) * k, sy0 = (src / geom.cols) * k;
    const int dx0 = (static_cast<int>(i) % geom.cols) * k, dy0 = (static_cast<int>(i) / geom.cols) * k;
    const int code = spec.d4_codes[i];
    for (int y = 0; y < k; ++y) {
      for (int x = 0; x < k; ++x) {
        int px = (code & 4) ? k - 1 - x : x;
        int py = y;
        for (int r = 0; r < (code & 3); ++r) {
          const int t = px;
          px = k - 1 - py;
          py = t;
        }
        for (int c = 0; c < img.channels(); ++c) {
          const int from = spec.color_perms ? kColorOrders[(*spec.color_perms)[i]][static_cast<std::size_t>(c)] : c;
          std::uint8_t v = img.at(sx0 + x, sy0 + y, from);
          if (spec.neg_flags[i]) v = static_cast<std::uint8_t>(255 - v);
          out.set(dx0 + px, dy0 + py, c, v);
        }
      }
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("cipher") {
  TEST_CASE("negative-positive") {
    RasterImage b(1, 1, 1);
    b.set(0, 0, 0, 0);
    CHECK(negative_positive(b, true).at(0, 0) == 255);
    b.set(0, 0, 0, 100);
    CHECK(negative_positive(b, true).at(0, 0) == 155);
    CHECK(negative_positive(negative_positive(b, true), true).at(0, 0) == 100);
    CHECK(negative_positive(b, false).at(0, 0) == 100);
    RasterImage all(256, 1, 1);
    for (int v = 0; v < 256; ++v) all.set(v, 0, 0, static_cast<std::uint8_t>(v));
    const auto inv = negative_positive(all, true);
    for (int v = 0; v < 256; ++v) CHECK(inv.at(v, 0) == (v ^ 255));
    CHECK(negative_positive(inv, true) == all);
    CHECK_THROWS_AS(negative_positive(all, true, 12), FormatError);
  }

  TEST_CASE("rotate/flip codes") {
    RasterImage b(2, 2, 1, {1, 2, 3, 4});  // [[a,b],[c,d]]
    CHECK(apply_d4(b, 0) == b);
    CHECK(apply_d4(b, d4_code(1, false)) == RasterImage(2, 2, 1, {3, 1, 4, 2}));
    CHECK(apply_d4(b, d4_code(0, true)) == RasterImage(2, 2, 1, {2, 1, 4, 3}));

    const RasterImage p = probe(3, 1);
    std::set<std::vector<std::uint8_t>> outputs;
    for (int code = 0; code < kD4Count; ++code) {
      const auto t = apply_d4(p, code);
      outputs.insert(std::vector<std::uint8_t>(t.samples().begin(), t.samples().end()));
      CHECK(apply_d4(t, d4_inverse(code)) == p);
      CHECK(d4_compose(code, d4_inverse(code)) == 0);
      for (int other = 0; other < kD4Count; ++other) {
        CHECK(apply_d4(apply_d4(p, other), code) == apply_d4(p, d4_compose(code, other)));
      }
      // Direction map agrees with where a marked pixel moves.
      RasterImage dot(5, 5, 1);
      dot.set(3, 2, 0, 1);  // one step right of the centre
      const auto moved = apply_d4(dot, code);
      const auto d = d4_map_direction(code, 1, 0);
      CHECK(moved.at(2 + d[0], 2 + d[1]) == 1);
    }
    CHECK(outputs.size() == 8);
    CHECK_THROWS_AS(apply_d4(RasterImage(2, 3, 1), 1), InvalidGeometry);
    CHECK_NOTHROW(apply_d4(RasterImage(2, 3, 1), 2));
    CHECK_THROWS_AS(apply_d4(p, 8), Error);
  }

  TEST_CASE("color shuffles") {
    const RasterImage p = probe(2, 3);
    CHECK(shuffle_colors(p, 0) == p);
    const int grb = color_perm_index({1, 0, 2});
    const auto swapped = shuffle_colors(p, grb);
    for (int y = 0; y < 2; ++y) {
      for (int x = 0; x < 2; ++x) {
        CHECK(swapped.at(x, y, 0) == p.at(x, y, 1));
        CHECK(swapped.at(x, y, 1) == p.at(x, y, 0));
        CHECK(swapped.at(x, y, 2) == p.at(x, y, 2));
      }
    }
    std::set<std::vector<std::uint8_t>> outputs;
    for (int code = 0; code < kColorPermCount; ++code) {
      const auto s = shuffle_colors(p, code);
      outputs.insert(std::vector<std::uint8_t>(s.samples().begin(), s.samples().end()));
      CHECK(shuffle_colors(s, color_inverse(code)) == p);
      for (int other = 0; other < kColorPermCount; ++other) {
        CHECK(shuffle_colors(shuffle_colors(p, other), code) == shuffle_colors(p, color_compose(code, other)));
      }
    }
    CHECK(outputs.size() == 6);
    CHECK_THROWS_AS(shuffle_colors(probe(2, 1), 1), FormatError);
  }

  TEST_CASE("scramble matches the pixel-level reference") {
    std::mt19937 rng(21);
    for (int t = 0; t < 20; ++t) {
      const int k = t % 2 ? 8 : 4;
      const auto img = testsupport::random_image(rng, k * 5, k * 3, 3);
      const auto geom = BlockGeometry::tile(img.width(), img.height(), k, k);
      const auto keys = make_keyset(random_key(), Scheme::Conventional);
      const auto spec = generate_transform_spec(keys, geom.n);
      CHECK(scramble_blocks(img, spec, geom) == reference_encrypt(img, spec, k));
      CHECK(unscramble_blocks(scramble_blocks(img, spec, geom), spec, geom) == img);
    }
  }

  TEST_CASE("conventional scheme") {
    std::mt19937 rng(1);
    const auto keys = make_keyset(random_key(), Scheme::Conventional);
    const auto cfg = CipherConfig::conventional();
    SUBCASE("constant image is a fixed point without inversion") {
      RasterImage flat(64, 32, 3);
      for (auto& s : flat.mutable_samples()) s = 128;
      auto spec = generate_transform_spec(keys, 8);
      std::fill(spec.neg_flags.begin(), spec.neg_flags.end(), 0);
      CHECK(scramble_blocks(flat, spec, BlockGeometry::tile(64, 32, 16, 16)) == flat);
    }
    SUBCASE("672x480 has 1260 blocks") {
      CHECK(cipher_geometry(672, 480, cfg).n == 1260);
      const auto img = testsupport::random_image(rng, 672, 480, 3);
      const auto enc = encrypt_conventional(img, keys, cfg);
      CHECK(enc.width() == 672);
      CHECK(enc.channels() == 3);
      CHECK(decrypt_conventional(enc, keys, cfg) == img);
    }
    SUBCASE("channels share position, rotation and inversion") {
      const auto img = testsupport::random_image(rng, 64, 48, 3);
      const auto enc = encrypt_conventional(img, keys, cfg);
      // Undo the color step only; each block then holds one source block
      // with the same geometry in every channel.
      const auto geom = cipher_geometry(64, 48, cfg);
      auto spec = generate_transform_spec(keys, geom.n);
      auto blocks = split_into_blocks(enc, geom);
      for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i] = shuffle_colors(blocks[i], color_inverse((*spec.color_perms)[i]));
      const auto src = split_into_blocks(img, geom);
      for (std::size_t i = 0; i < blocks.size(); ++i) {
        const auto expect = negative_positive(apply_d4(src[spec.permutation[i]], spec.d4_codes[i]), spec.neg_flags[i] != 0);
        CHECK(blocks[i] == expect);
      }
    }
    SUBCASE("errors") {
      CHECK_THROWS_AS(encrypt_conventional(RasterImage(40, 32, 3), keys, cfg), GeometryMismatch);
      CHECK_THROWS_AS(encrypt_conventional(RasterImage(32, 32, 1), keys, cfg), FormatError);
      CHECK_THROWS_AS(encrypt_conventional(RasterImage(32, 32, 3), make_keyset(random_key(), Scheme::Grayscale), cfg),
                      Error);
      CHECK_THROWS_AS(CipherConfig::conventional(8).validate(), InvalidGeometry);
      CipherConfig small = CipherConfig::conventional(8);
      small.allow_nonstandard_block = true;
      CHECK_NOTHROW(small.validate());
      CipherConfig rect = cfg;
      rect.block_h = 8;
      rect.allow_nonstandard_block = true;
      CHECK_THROWS_AS(rect.validate(), InvalidGeometry);
    }
  }

  TEST_CASE("single block with identity spec is unchanged") {
    std::mt19937 rng(2);
    const auto img = testsupport::random_image(rng, 16, 16, 3);
    const TransformSpec id{{0}, {0}, {0}, std::vector<std::uint8_t>{0}};
    const auto geom = BlockGeometry::tile(16, 16, 16, 16);
    CHECK(scramble_blocks(img, id, geom) == img);
    CHECK(unscramble_blocks(img, id, geom) == img);
  }

  TEST_CASE("grayscale composite layout") {
    RasterImage rgb(2, 2, 3);
    for (int y = 0; y < 2; ++y)
      for (int x = 0; x < 2; ++x)
        for (int c = 0; c < 3; ++c) rgb.set(x, y, c, static_cast<std::uint8_t>(10 * c + 2 * y + x));
    const auto v = to_grayscale_composite(rgb, Orientation::Vertical);
    REQUIRE(v.width() == 2);
    REQUIRE(v.height() == 6);
    CHECK(v.channels() == 1);
    for (int c = 0; c < 3; ++c)
      for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 2; ++x) CHECK(v.at(x, 2 * c + y) == rgb.at(x, y, c));
    const auto h = to_grayscale_composite(rgb, Orientation::Horizontal);
    CHECK(h.width() == 6);
    CHECK(h.height() == 2);
    for (int c = 0; c < 3; ++c)
      for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 2; ++x) CHECK(h.at(2 * c + x, y) == rgb.at(x, y, c));
    CHECK(from_grayscale_composite(v, Orientation::Vertical) == rgb);
    CHECK(from_grayscale_composite(h, Orientation::Horizontal) == rgb);
    CHECK(to_grayscale_composite(RasterImage(672, 480, 3), Orientation::Horizontal).width() == 2016);
    CHECK_THROWS_AS(from_grayscale_composite(RasterImage(2, 5, 1), Orientation::Vertical), GeometryMismatch);
    CHECK_THROWS_AS(to_grayscale_composite(RasterImage(2, 2, 1), Orientation::Vertical), FormatError);
    // Wrong orientation: either the split fails or the channels come back wrong.
    std::mt19937 rng(6);
    const auto img = testsupport::random_image(rng, 6, 6, 3);
    const auto wrong = from_grayscale_composite(to_grayscale_composite(img, Orientation::Vertical), Orientation::Horizontal);
    CHECK(wrong.width() == 2);
    CHECK_FALSE(wrong == img);
  }

  TEST_CASE("grayscale scheme") {
    std::mt19937 rng(3);
    const auto keys = make_keyset(random_key(), Scheme::Grayscale);
    const auto cfg = CipherConfig::grayscale();
    CHECK(cipher_geometry(672, 480, cfg).n == 15120);
    const auto img = testsupport::random_image(rng, 64, 40, 3);
    const auto enc = encrypt_grayscale(img, keys, cfg);
    CHECK(enc.channels() == 1);
    CHECK(enc.height() == 120);
    CHECK(decrypt_grayscale(enc, keys, cfg) == img);

    // Every encrypted block comes from exactly one composite block.
    const auto comp = to_grayscale_composite(img, cfg.orientation);
    const auto geom = BlockGeometry::tile(comp.width(), comp.height(), 8, 8);
    const auto spec = generate_transform_spec(keys, geom.n);
    const auto src = split_into_blocks(comp, geom);
    const auto out = split_into_blocks(enc, geom);
    for (std::size_t i = 0; i < out.size(); ++i) {
      CHECK(out[i] == negative_positive(apply_d4(src[spec.permutation[i]], spec.d4_codes[i]), spec.neg_flags[i] != 0));
    }

    RasterImage flat(32, 16, 3);
    for (auto& s : flat.mutable_samples()) s = 77;
    const auto fgeom = BlockGeometry::tile(32, 48, 8, 8);
    auto fspec = generate_transform_spec(keys, fgeom.n);
    std::fill(fspec.neg_flags.begin(), fspec.neg_flags.end(), 0);
    const auto fenc = scramble_blocks(to_grayscale_composite(flat, Orientation::Vertical), fspec, fgeom);
    for (auto s : fenc.samples()) CHECK(s == 77);

    const auto hcfg = CipherConfig::grayscale(8, Orientation::Horizontal);
    CHECK(decrypt_grayscale(encrypt_grayscale(img, keys, hcfg), keys, hcfg) == img);
    CHECK_THROWS_AS(decrypt_grayscale(enc, keys, hcfg), GeometryMismatch);
    CHECK_THROWS_AS(encrypt_grayscale(RasterImage(20, 16, 3), keys, cfg), GeometryMismatch);
  }

  TEST_CASE("histogram is preserved without inversion") {
    std::mt19937 rng(4);
    const auto img = testsupport::random_image(rng, 48, 32, 3);
    const auto geom = BlockGeometry::tile(48, 32, 16, 16);
    auto spec = generate_transform_spec(make_keyset(random_key(), Scheme::Conventional), geom.n);
    std::fill(spec.neg_flags.begin(), spec.neg_flags.end(), 0);
    spec.color_perms.reset();
    const auto enc = scramble_blocks(img, spec, geom);
    std::vector<std::uint8_t> a(img.samples().begin(), img.samples().end());
    std::vector<std::uint8_t> b(enc.samples().begin(), enc.samples().end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
  }

  TEST_CASE("keyspace") {
    // Brute force: count distinct transform specs for n = 2.
    std::set<std::tuple<std::vector<int>, std::vector<int>, std::vector<int>, std::vector<int>>> conv, gray;
    for (int perm = 0; perm < 2; ++perm)
      for (int d0 = 0; d0 < 8; ++d0)
        for (int d1 = 0; d1 < 8; ++d1)
          for (int n0 = 0; n0 < 2; ++n0)
            for (int n1 = 0; n1 < 2; ++n1) {
              const std::vector<int> p = perm ? std::vector<int>{1, 0} : std::vector<int>{0, 1};
              gray.insert({p, {d0, d1}, {n0, n1}, {}});
              for (int c0 = 0; c0 < 6; ++c0)
                for (int c1 = 0; c1 < 6; ++c1) conv.insert({p, {d0, d1}, {n0, n1}, {c0, c1}});
            }
    CHECK(conv.size() == 18432);
    CHECK(gray.size() == 512);
    CHECK(estimate_keyspace(Scheme::Conventional, 2) == doctest::Approx(std::log2(18432.0)));
    CHECK(estimate_keyspace(Scheme::Grayscale, 2) == doctest::Approx(9.0));
    CHECK(estimate_keyspace(Scheme::Conventional, 1) == doctest::Approx(4 + std::log2(6.0)));
    CHECK(estimate_keyspace(Scheme::Grayscale, 12 * 120) > estimate_keyspace(Scheme::Conventional, 120));
  }

  TEST_CASE("round trips on random images") {
    std::mt19937 rng(99);
    for (int t = 0; t < 40; ++t) {
      std::uniform_int_distribution<int> cells(1, 6);
      const bool gray = t % 2;
      const auto cfg = gray ? CipherConfig::grayscale() : CipherConfig::conventional();
      const int k = gray ? 8 : 16;
      const auto img = testsupport::random_image(rng, k * cells(rng), k * cells(rng), 3);
      const auto keys = make_keyset(random_key(), cfg.scheme);
      CHECK(decrypt(encrypt(img, keys, cfg), keys, cfg) == img);
    }
  }

  TEST_CASE("wrong key decryption is unreadable") {
    const auto img = load_image(testsupport::data_dir() / "corpus_small" / "coffee.png");
    for (const auto& cfg : {CipherConfig::conventional(), CipherConfig::grayscale()}) {
      Key256 k{};
      const auto good = make_keyset(k, cfg.scheme);
      k[0] ^= 1;
      const auto bad = make_keyset(k, cfg.scheme);
      CHECK(psnr(decrypt(encrypt(img, good, cfg), bad, cfg), img) < 15.0);
    }
  }

  TEST_CASE("metadata") {
    const auto cfg = CipherConfig::grayscale(8, Orientation::Horizontal);
    const auto md = EncryptionMetadata::describe(cfg, 672, 480);
    const auto back = EncryptionMetadata::from_json(md.to_json());
    CHECK(back == md);
    CHECK(back.cipher_config().orientation == Orientation::Horizontal);
    CHECK(back.keystream_algorithm_id == kKeystreamAlgorithmId);
    const auto conv = EncryptionMetadata::describe(CipherConfig::conventional(), 64, 32);
    CHECK_FALSE(conv.orientation.has_value());
    CHECK(EncryptionMetadata::from_json(conv.to_json()) == conv);
    CHECK_THROWS_AS(EncryptionMetadata::from_json("{"), MetadataError);
    std::string other = md.to_json();
    other.replace(other.find(kKeystreamAlgorithmId), std::string_view(kKeystreamAlgorithmId).size(), "aes-ctr");
    CHECK_THROWS_AS(EncryptionMetadata::from_json(other), MetadataError);
    CHECK(md.to_json().find("key\"") == std::string::npos);
  }
}
