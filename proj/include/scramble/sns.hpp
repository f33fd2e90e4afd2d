#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "scramble/jpeg.hpp"

namespace scramble {

enum class Provider { Twitter, FacebookHQ, FacebookLQ };

std::string_view to_string(Provider p) noexcept;
/// "twitter", "facebook-hq" or "facebook-lq".
Provider parse_provider(std::string_view text);

/// Quality Facebook picks for a recompressed upload, as a lookup over the
/// uploaded quality 1..100. Every entry lies in [71, 85].
class FacebookQualityRule {
 public:
  static constexpr int kMin = 71;
  static constexpr int kMax = 85;

  /// Default: always the top of the observed range.
  FacebookQualityRule() : FacebookQualityRule(constant(kMax)) {}

  static FacebookQualityRule constant(int quality);
  /// "const:<q>" or "map:<lo>-<hi>=<q>,..." with ranges covering 1..100.
  static FacebookQualityRule parse(std::string_view text);

  int operator()(int uploaded_quality) const;
  std::string describe() const;

 private:
  explicit FacebookQualityRule(std::array<std::uint8_t, 100> table, std::string text)
      : table_(table), text_(std::move(text)) {}
  std::array<std::uint8_t, 100> table_{};
  std::string text_;
};

struct SnsPolicy {
  Provider provider = Provider::Twitter;
  int max_dim = 4096;
  /// Quality at or above which Twitter transcodes (both subsamplings).
  int twitter_threshold = 85;
  int twitter_output_quality = 85;
  FacebookQualityRule facebook_rule;
  /// Downscale oversized uploads instead of rejecting them.
  bool allow_downscale = false;

  static SnsPolicy for_provider(Provider provider);
};

struct RecompressionDecision {
  bool recompressed = false;
  std::optional<int> output_quality;
  std::optional<Subsampling> output_subsampling;
  bool resized = false;

  friend bool operator==(const RecompressionDecision&, const RecompressionDecision&) = default;
};

/// Provider behavior for an upload with the given stream properties.
/// `quality` is the upload's quality factor; when the estimate is unknown
/// pass std::nullopt and Twitter treats the upload as high quality.
RecompressionDecision decide(const SnsPolicy& policy, const JpegStreamInfo& info, std::optional<int> quality);

struct SnsResult {
  Bytes download;
  RecompressionDecision decision;
};

/// Upload/download round trip. Passes the bytes through untouched unless the
/// decision says to recompress; recompression decodes and re-encodes at the
/// decided quality with 4:2:0 chroma (single-component streams stay
/// single-component). Oversized uploads throw SizeCapError unless the policy
/// allows downscaling.
SnsResult simulate(const SnsPolicy& policy, std::span<const std::uint8_t> upload);

}  // namespace scramble
