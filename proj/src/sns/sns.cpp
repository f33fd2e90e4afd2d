#include "scramble/sns.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "scramble/error.hpp"

namespace scramble {

namespace {

int parse_int(std::string_view text, std::string_view what) {
  int v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) throw Error("bad " + std::string(what) + " '" + std::string(text) + "'");
  return v;
}

void check_facebook_quality(int q) {
  if (q < FacebookQualityRule::kMin || q > FacebookQualityRule::kMax) {
    throw Error("Facebook quality " + std::to_string(q) + " outside the provider range [71, 85]");
  }
}

}  // namespace

std::string_view to_string(Provider p) noexcept {
  switch (p) {
    case Provider::Twitter: return "twitter";
    case Provider::FacebookHQ: return "facebook-hq";
    case Provider::FacebookLQ: return "facebook-lq";
  }
  return "?";
}

Provider parse_provider(std::string_view text) {
  if (text == "twitter") return Provider::Twitter;
  if (text == "facebook-hq") return Provider::FacebookHQ;
  if (text == "facebook-lq") return Provider::FacebookLQ;
  throw Error("unknown provider '" + std::string(text) + "' (expected twitter, facebook-hq or facebook-lq)");
}

FacebookQualityRule FacebookQualityRule::constant(int quality) {
  check_facebook_quality(quality);
  std::array<std::uint8_t, 100> table{};
  table.fill(static_cast<std::uint8_t>(quality));
  return FacebookQualityRule(table, "const:" + std::to_string(quality));
}

FacebookQualityRule FacebookQualityRule::parse(std::string_view text) {
  if (text.starts_with("const:")) return constant(parse_int(text.substr(6), "Facebook quality"));
  if (!text.starts_with("map:")) throw Error("Facebook quality rule must be const:<q> or map:<lo>-<hi>=<q>,...");
  std::array<std::uint8_t, 100> table{};
  std::string_view rest = text.substr(4);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw Error("map entry '" + std::string(item) + "' lacks '='");
    const std::string_view range = item.substr(0, eq);
    const auto dash = range.find('-');
    const int lo = parse_int(range.substr(0, dash), "quality range");
    const int hi = dash == std::string_view::npos ? lo : parse_int(range.substr(dash + 1), "quality range");
    const int q = parse_int(item.substr(eq + 1), "Facebook quality");
    check_facebook_quality(q);
    if (lo < 1 || hi > 100 || lo > hi) throw Error("quality range '" + std::string(range) + "' outside 1..100");
    for (int u = lo; u <= hi; ++u) {
      if (table[static_cast<std::size_t>(u - 1)] != 0) throw Error("quality " + std::to_string(u) + " mapped twice");
      table[static_cast<std::size_t>(u - 1)] = static_cast<std::uint8_t>(q);
    }
  }
  for (int u = 1; u <= 100; ++u) {
    if (table[static_cast<std::size_t>(u - 1)] == 0) throw Error("map leaves quality " + std::to_string(u) + " unassigned");
  }
  return FacebookQualityRule(table, std::string(text));
}

int FacebookQualityRule::operator()(int uploaded_quality) const {
  return table_[static_cast<std::size_t>(std::clamp(uploaded_quality, 1, 100) - 1)];
}

std::string FacebookQualityRule::describe() const { return text_; }

SnsPolicy SnsPolicy::for_provider(Provider provider) {
  SnsPolicy p;
  p.provider = provider;
  switch (provider) {
    case Provider::Twitter: p.max_dim = 4096; break;
    case Provider::FacebookHQ: p.max_dim = 2048; break;
    case Provider::FacebookLQ: p.max_dim = 960; break;
  }
  return p;
}

RecompressionDecision decide(const SnsPolicy& policy, const JpegStreamInfo& info, std::optional<int> quality) {
  RecompressionDecision d;
  d.resized = std::max(info.width, info.height) > policy.max_dim;
  int out_quality = 0;
  bool recompress = false;
  if (policy.provider == Provider::Twitter) {
    // Same threshold for 4:4:4 and 4:2:0 uploads.
    recompress = !quality || *quality >= policy.twitter_threshold;
    out_quality = policy.twitter_output_quality;
  } else {
    recompress = true;
    out_quality = policy.facebook_rule(quality.value_or(100));
  }
  if (recompress || d.resized) {
    d.recompressed = true;
    d.output_quality = out_quality;
    d.output_subsampling = Subsampling::S420;
  }
  return d;
}

SnsResult simulate(const SnsPolicy& policy, std::span<const std::uint8_t> upload) {
  const JpegStreamInfo info = read_jpeg_info(upload);
  SnsResult result;
  result.decision = decide(policy, info, info.estimated_quality);
  if (result.decision.resized && !policy.allow_downscale) {
    throw SizeCapError(std::string(to_string(policy.provider)) + " accepts images up to " +
                       std::to_string(policy.max_dim) + " pixels per side, got " + std::to_string(info.width) + "x" +
                       std::to_string(info.height));
  }
  if (!result.decision.recompressed) {
    result.download.assign(upload.begin(), upload.end());
    return result;
  }
  RasterImage image = decode_jpeg(upload).image;
  if (result.decision.resized) {
    const double scale = static_cast<double>(policy.max_dim) / std::max(image.width(), image.height());
    const int w = std::max(1, static_cast<int>(std::lround(image.width() * scale)));
    const int h = std::max(1, static_cast<int>(std::lround(image.height() * scale)));
    image = resize_bilinear(image, std::min(w, policy.max_dim), std::min(h, policy.max_dim));
  }
  JpegParams params;
  params.quality = *result.decision.output_quality;
  params.subsampling = *result.decision.output_subsampling;
  result.download = encode_jpeg(image, params);
  return result;
}

}  // namespace scramble
