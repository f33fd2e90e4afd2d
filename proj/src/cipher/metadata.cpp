#include "scramble/metadata.hpp"

#include <json.hpp>

#include "scramble/error.hpp"
#include "scramble/keystream.hpp"

namespace scramble {

EncryptionMetadata EncryptionMetadata::describe(const CipherConfig& cfg, int original_width, int original_height) {
  EncryptionMetadata m;
  m.scheme = cfg.scheme;
  m.block_w = cfg.block_w;
  m.block_h = cfg.block_h;
  if (cfg.scheme == Scheme::Grayscale) m.orientation = cfg.orientation;
  m.original_width = original_width;
  m.original_height = original_height;
  m.keystream_algorithm_id = std::string(kKeystreamAlgorithmId);
  return m;
}

CipherConfig EncryptionMetadata::cipher_config() const {
  CipherConfig cfg;
  cfg.scheme = scheme;
  cfg.block_w = block_w;
  cfg.block_h = block_h;
  cfg.orientation = orientation.value_or(Orientation::Vertical);
  cfg.allow_nonstandard_block = true;
  return cfg;
}

std::string EncryptionMetadata::to_json() const {
  nlohmann::ordered_json j;
  j["format_version"] = format_version;
  j["scheme"] = std::string(to_string(scheme));
  j["block_w"] = block_w;
  j["block_h"] = block_h;
  j["orientation"] = orientation ? nlohmann::ordered_json(std::string(to_string(*orientation))) : nullptr;
  j["original_width"] = original_width;
  j["original_height"] = original_height;
  j["keystream_algorithm_id"] = keystream_algorithm_id;
  return j.dump(2) + "\n";
}

EncryptionMetadata EncryptionMetadata::from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw MetadataError(std::string("metadata is not valid JSON: ") + e.what());
  }
  EncryptionMetadata m;
  try {
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != kFormatVersion) {
      throw MetadataError("unsupported metadata format_version " + std::to_string(m.format_version));
    }
    m.scheme = parse_scheme(j.at("scheme").get<std::string>());
    m.block_w = j.at("block_w").get<int>();
    m.block_h = j.at("block_h").get<int>();
    const auto& o = j.at("orientation");
    if (!o.is_null()) m.orientation = parse_orientation(o.get<std::string>());
    m.original_width = j.at("original_width").get<int>();
    m.original_height = j.at("original_height").get<int>();
    m.keystream_algorithm_id = j.at("keystream_algorithm_id").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw MetadataError(std::string("metadata field missing or mistyped: ") + e.what());
  } catch (const MetadataError&) {
    throw;
  } catch (const Error& e) {
    throw MetadataError(e.what());
  }
  if (m.keystream_algorithm_id != kKeystreamAlgorithmId) {
    throw MetadataError("unsupported keystream algorithm '" + m.keystream_algorithm_id + "'");
  }
  if (m.scheme == Scheme::Grayscale && !m.orientation) {
    throw MetadataError("grayscale metadata must record the composite orientation");
  }
  if (m.block_w < 1 || m.block_h < 1 || m.original_width < 1 || m.original_height < 1) {
    throw MetadataError("metadata dimensions must be positive");
  }
  return m;
}

}  // namespace scramble
