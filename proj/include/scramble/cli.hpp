#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scramble/cipher.hpp"
#include "scramble/error.hpp"
#include "scramble/jpeg.hpp"
#include "scramble/keys.hpp"
#include "scramble/metadata.hpp"
#include "scramble/sns.hpp"
#include "scramble/solver.hpp"

namespace scramble::cli {

/// Bumped whenever a report column changes meaning or order.
inline constexpr int kCsvSchemaVersion = 1;

/// Bad flags or an incomplete set of options. Exit code 1.
class UsageError : public Error {
 public:
  using Error::Error;
};

enum class ExitCode : int { Success = 0, Usage = 1, Data = 2 };

struct ExperimentConfig {
  std::vector<std::string> inputs;  // files, directories or globs
  /// Attack only: restrict to one scheme. Empty runs conventional-16 and grayscale-8.
  std::optional<Scheme> scheme;
  std::optional<int> block;
  Orientation orientation = Orientation::Vertical;
  int qf_min = 70;
  int qf_max = 100;
  int qf_step = 1;
  Subsampling subsampling = Subsampling::S444;
  std::vector<Provider> providers{Provider::Twitter};
  std::string facebook_rule = "const:85";
  bool allow_downscale = false;
  std::size_t trials = 30;
  SolverMode solver_mode = SolverMode::Extended;
  std::filesystem::path out_dir = ".";
  Key256 seed{};
  bool crop = false;
  bool svg = false;
  unsigned threads = 0;

  /// Throws UsageError.
  void validate() const;
  std::vector<int> qf_values() const;
};

/// Expand files, directories (every PNG/JPEG inside) and '*'/'?' globs
/// on the final path component. Sorted, duplicates removed.
std::vector<std::filesystem::path> expand_inputs(const std::vector<std::string>& patterns);

/// Derive a deterministic 256-bit seed from arbitrary text (SHA-256).
Key256 seed_from_text(std::string_view text);

std::string evaluate_csv_header();
std::string evaluate_summary_csv_header();
std::string attack_csv_header();

struct EvaluateRow {
  std::string image_id;
  Provider provider = Provider::Twitter;
  std::string variant;
  int block_size = 0;  // 0 for the unencrypted path
  int qf = 0;
  bool recompressed = false;
  double psnr_db = 0;
};

struct EvaluateSummaryRow {
  Provider provider = Provider::Twitter;
  std::string variant;
  int block_size = 0;
  int qf = 0;
  double mean_psnr_db = 0;
  std::size_t images = 0;
};

struct EvaluateReport {
  std::vector<EvaluateRow> rows;
  std::vector<EvaluateSummaryRow> summary;
};

/// Every image x provider x Qf x {unencrypted, conventional-16,
/// conventional-8, grayscale-8}: encrypt, encode, simulate the provider,
/// decode, decrypt, PSNR against the original.
EvaluateReport run_evaluate(const ExperimentConfig& cfg);

struct AttackRow {
  std::string image_id;
  Scheme scheme = Scheme::Conventional;
  int block_size = 0;
  std::size_t n = 0;
  double dc = 0;
  double nc = 0;
  double lc = 0;
  double psnr_db = 0;
  std::size_t trial_count = 0;
};

/// Per-image best-of-trials rows, followed by one "mean" row per scheme.
std::vector<AttackRow> run_attack(const ExperimentConfig& cfg);

std::string to_csv(const std::vector<EvaluateRow>& rows);
std::string to_csv(const std::vector<EvaluateSummaryRow>& rows);
std::string to_csv(const std::vector<AttackRow>& rows);
/// Mean PSNR against Qf, one line per provider and variant.
std::string render_svg(const std::vector<EvaluateSummaryRow>& rows);

void cmd_keygen(const std::filesystem::path& out, bool hex);

struct KeySource {
  std::optional<std::filesystem::path> master;
  std::optional<std::filesystem::path> subkeys;
};

/// Reads the key file(s). Exactly one of master / subkeys must be set.
KeySet load_keys(const KeySource& source, Scheme scheme);

struct EncryptRequest {
  std::filesystem::path input;
  std::filesystem::path output;  // .png or .jpg decides the carrier
  KeySource keys;
  CipherConfig cipher;
  bool crop = false;
  JpegParams jpeg;
};

/// Writes the encrypted image and `<output>.json`.
EncryptionMetadata cmd_encrypt(const EncryptRequest& req);

struct DecryptRequest {
  std::filesystem::path input;
  std::filesystem::path output;
  KeySource keys;
  /// Sidecar path; defaults to `<input>.json` when that file exists.
  std::optional<std::filesystem::path> metadata;
  /// Used only without a sidecar; scheme and block must both be given.
  std::optional<Scheme> scheme;
  std::optional<int> block;
  Orientation orientation = Orientation::Vertical;
};

void cmd_decrypt(const DecryptRequest& req);

/// Parse argv and dispatch. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace scramble::cli
