#include <random>

#include "doctest.h"
#include "scramble/cipher.hpp"
#include "scramble/error.hpp"
#include "scramble/jpeg.hpp"
#include "scramble/sns.hpp"
#include "support.hpp"

using namespace scramble;

namespace {

JpegStreamInfo info_for(Subsampling sub, int w = 672, int h = 480) {
  JpegStreamInfo info;
  info.width = w;
  info.height = h;
  info.component_count = 3;
  info.sampling = sub == Subsampling::S444 ? std::vector<SamplingFactor>{{1, 1}, {1, 1}, {1, 1}}
                                           : std::vector<SamplingFactor>{{2, 2}, {1, 1}, {1, 1}};
  return info;
}

// Provider rules, row by row. The Twitter 4:4:4 split at 85 and Facebook's
// constant 85 are the two pinned assumptions.
RecompressionDecision provider_table(Provider p, Subsampling, int q) {
  RecompressionDecision d;
  if (p == Provider::Twitter) {
    if (q >= 85) d = {true, 85, Subsampling::S420, false};
  } else {
    d = {true, 85, Subsampling::S420, false};
  }
  return d;
}

}  // namespace

TEST_SUITE("sns") {
  TEST_CASE("decide matches the provider table on the full grid") {
    int cases = 0;
    for (auto p : {Provider::Twitter, Provider::FacebookHQ, Provider::FacebookLQ}) {
      const auto policy = SnsPolicy::for_provider(p);
      for (auto sub : {Subsampling::S444, Subsampling::S420}) {
        for (int q = 1; q <= 100; ++q) {
          CAPTURE(q);
          CHECK(decide(policy, info_for(sub), q) == provider_table(p, sub, q));
          ++cases;
        }
      }
    }
    CHECK(cases == 600);
  }

  TEST_CASE("named rows") {
    const auto tw = SnsPolicy::for_provider(Provider::Twitter);
    CHECK_FALSE(decide(tw, info_for(Subsampling::S420), 84).recompressed);
    const auto d85 = decide(tw, info_for(Subsampling::S420), 85);
    CHECK(d85.recompressed);
    CHECK(d85.output_quality == 85);
    CHECK(d85.output_subsampling == Subsampling::S420);
    const auto fb = decide(SnsPolicy::for_provider(Provider::FacebookHQ), info_for(Subsampling::S444), 70);
    CHECK(fb.recompressed);
    CHECK(*fb.output_quality >= 71);
    CHECK(*fb.output_quality <= 85);
    // Unknown upload quality counts as high on Twitter.
    CHECK(decide(tw, info_for(Subsampling::S420), std::nullopt).recompressed);
    const auto none = decide(tw, info_for(Subsampling::S444), 60);
    CHECK_FALSE(none.output_quality.has_value());
    CHECK_FALSE(none.output_subsampling.has_value());
  }

  TEST_CASE("provider caps") {
    CHECK(SnsPolicy::for_provider(Provider::Twitter).max_dim == 4096);
    CHECK(SnsPolicy::for_provider(Provider::FacebookHQ).max_dim == 2048);
    CHECK(SnsPolicy::for_provider(Provider::FacebookLQ).max_dim == 960);
    CHECK(parse_provider("facebook-lq") == Provider::FacebookLQ);
    CHECK_THROWS_AS(parse_provider("myspace"), Error);
    for (auto p : {Provider::Twitter, Provider::FacebookHQ, Provider::FacebookLQ}) {
      CHECK_FALSE(decide(SnsPolicy::for_provider(p), info_for(Subsampling::S420), 50).resized);
    }
  }

  TEST_CASE("facebook quality rules") {
    const auto c = FacebookQualityRule::parse("const:75");
    CHECK(c(1) == 75);
    CHECK(c(100) == 75);
    const auto m = FacebookQualityRule::parse("map:1-50=71,51-100=85");
    CHECK(m(50) == 71);
    CHECK(m(51) == 85);
    CHECK(FacebookQualityRule{}(42) == 85);
    CHECK_THROWS_AS(FacebookQualityRule::parse("const:90"), Error);
    CHECK_THROWS_AS(FacebookQualityRule::parse("map:1-50=71"), Error);
    CHECK_THROWS_AS(FacebookQualityRule::parse("map:1-60=71,50-100=80"), Error);
    CHECK_THROWS_AS(FacebookQualityRule::parse("linear"), Error);
    SnsPolicy p = SnsPolicy::for_provider(Provider::FacebookLQ);
    p.facebook_rule = m;
    CHECK(decide(p, info_for(Subsampling::S444), 30).output_quality == 71);
  }

  TEST_CASE("simulate") {
    std::mt19937 rng(31);
    const auto img = testsupport::smooth_image(rng, 672, 480, 3);
    SUBCASE("twitter passthrough is byte identical") {
      const auto upload = encode_jpeg(img, {80, Subsampling::S420});
      const auto r = simulate(SnsPolicy::for_provider(Provider::Twitter), upload);
      CHECK_FALSE(r.decision.recompressed);
      CHECK(r.download == upload);
    }
    SUBCASE("recompressed downloads are 4:2:0 at the decided quality") {
      for (auto p : {Provider::Twitter, Provider::FacebookHQ, Provider::FacebookLQ}) {
        const auto upload = encode_jpeg(img, {95, Subsampling::S444});
        const auto r = simulate(SnsPolicy::for_provider(p), upload);
        CHECK(r.decision.recompressed);
        const auto info = read_jpeg_info(r.download);
        CHECK(info.subsampling() == Subsampling::S420);
        CHECK(estimate_quality(info) == r.decision.output_quality);
        CHECK(info.width == 672);
      }
    }
    SUBCASE("grayscale uploads stay single component") {
      const auto upload = encode_jpeg(to_grayscale_composite(img, Orientation::Vertical), {95});
      const auto r = simulate(SnsPolicy::for_provider(Provider::FacebookHQ), upload);
      const auto info = read_jpeg_info(r.download);
      CHECK(info.component_count == 1);
      CHECK(estimate_quality(info) == 85);
    }
    SUBCASE("oversized uploads") {
      const auto big = encode_jpeg(testsupport::smooth_image(rng, 1000, 40, 3), {70, Subsampling::S420});
      auto policy = SnsPolicy::for_provider(Provider::FacebookLQ);
      CHECK_THROWS_AS(simulate(policy, big), SizeCapError);
      policy.allow_downscale = true;
      const auto r = simulate(policy, big);
      CHECK(r.decision.resized);
      const auto info = read_jpeg_info(r.download);
      CHECK(info.width == 960);
      CHECK(info.height <= 40);
      // Twitter cannot pass an oversized file through untouched either.
      auto tw = SnsPolicy::for_provider(Provider::Twitter);
      tw.max_dim = 500;
      tw.allow_downscale = true;
      CHECK(simulate(tw, big).decision.recompressed);
    }
  }
}
