#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>

#include "scramble/cli.hpp"
#include "scramble/error.hpp"
#include "scramble/image_io.hpp"
#include "scramble/metrics.hpp"
#include "scramble/protocol.hpp"

namespace scramble::cli {

namespace fs = std::filesystem;

namespace {

template <typename F>
auto as_usage(F&& parse) {
  try {
    return parse();
  } catch (const UsageError&) {
    throw;
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

Key256 parse_seed(const std::string& text) {
  if (text.size() == 64) {
    try {
      return key_from_hex(text);
    } catch (const KeyFormatError&) {
    }
  }
  return seed_from_text(text);
}

struct KeyFlags {
  std::string master;
  std::string subkeys;

  void add(CLI::App* cmd) {
    auto* m = cmd->add_option("--key", master, "Master key file (32 raw bytes or 64 hex digits)");
    auto* s = cmd->add_option("--subkeys", subkeys, "File with four hex subkeys K1..K4, one per line");
    m->excludes(s);
  }
  KeySource source() const {
    KeySource ks;
    if (!master.empty()) ks.master = master;
    if (!subkeys.empty()) ks.subkeys = subkeys;
    return ks;
  }
};

struct ExperimentFlags {
  std::vector<std::string> inputs;
  std::string orientation = "vertical";
  std::string seed = "0";
  std::string out_dir = ".";
  bool crop = false;
  unsigned threads = 0;

  void add(CLI::App* cmd) {
    cmd->add_option("-i,--input", inputs, "Image files, directories or globs")->required();
    cmd->add_option("--orientation", orientation, "Composite stacking: vertical or horizontal")
        ->capture_default_str();
    cmd->add_option("--seed", seed, "Seed material (64 hex digits or any text)")->capture_default_str();
    cmd->add_option("-o,--out-dir", out_dir, "Report directory")->capture_default_str();
    cmd->add_flag("--crop", crop, "Crop inputs to the block grid instead of rejecting them");
    cmd->add_option("--threads", threads, "Worker threads (0 = all cores)");
  }
  ExperimentConfig base() const {
    ExperimentConfig cfg;
    cfg.inputs = inputs;
    cfg.orientation = as_usage([&] { return parse_orientation(orientation); });
    cfg.seed = parse_seed(seed);
    cfg.out_dir = out_dir;
    cfg.crop = crop;
    cfg.threads = threads;
    return cfg;
  }
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Block-scrambling image encryption for encryption-then-compression pipelines", "scramble"};
  app.set_config("--config", "", "TOML config file; command-line flags take precedence");
  app.require_subcommand(1);

  auto* keygen = app.add_subcommand("keygen", "Write a random 256-bit master key");
  std::string keygen_out;
  bool keygen_hex = false;
  keygen->add_option("-o,--out", keygen_out, "Key file")->required();
  keygen->add_flag("--hex", keygen_hex, "Write 64 hex digits and a newline instead of raw bytes");

  auto* enc = app.add_subcommand("encrypt", "Encrypt an image and write a metadata sidecar");
  std::string enc_in, enc_out, enc_scheme = "conventional", enc_orientation = "vertical", enc_sub = "444";
  std::optional<int> enc_block;
  int enc_quality = 95;
  bool enc_crop = false, enc_nonstandard = false;
  KeyFlags enc_keys;
  enc->add_option("-i,--in", enc_in, "Input PNG or JPEG")->required();
  enc->add_option("-o,--out", enc_out, "Output .png or .jpg")->required();
  enc_keys.add(enc);
  enc->add_option("--scheme", enc_scheme, "conventional or grayscale")->capture_default_str();
  enc->add_option("--block", enc_block, "Block size (default 16 conventional, 8 grayscale)");
  enc->add_option("--orientation", enc_orientation, "Composite stacking for grayscale")->capture_default_str();
  enc->add_flag("--allow-nonstandard-block", enc_nonstandard, "Allow conventional blocks other than 16");
  enc->add_flag("--crop", enc_crop, "Crop to the block grid instead of rejecting the image");
  enc->add_option("--quality", enc_quality, "JPEG quality for .jpg output")->check(CLI::Range(1, 100));
  enc->add_option("--subsampling", enc_sub, "JPEG chroma subsampling for .jpg output: 444 or 420");

  auto* dec = app.add_subcommand("decrypt", "Decrypt an image using its sidecar or explicit flags");
  std::string dec_in, dec_out, dec_meta, dec_scheme, dec_orientation = "vertical";
  std::optional<int> dec_block;
  KeyFlags dec_keys;
  dec->add_option("-i,--in", dec_in, "Encrypted PNG or JPEG")->required();
  dec->add_option("-o,--out", dec_out, "Output .png or .jpg")->required();
  dec_keys.add(dec);
  dec->add_option("--meta", dec_meta, "Sidecar (default <input>.json)");
  dec->add_option("--scheme", dec_scheme, "Scheme when no sidecar is available");
  dec->add_option("--block", dec_block, "Block size when no sidecar is available");
  dec->add_option("--orientation", dec_orientation, "Composite stacking when no sidecar is available");

  auto* rt = app.add_subcommand("jpeg-roundtrip", "Encode at a quality, decode and report PSNR");
  std::string rt_in, rt_out, rt_decoded, rt_sub = "444";
  int rt_quality = 95;
  rt->add_option("-i,--in", rt_in, "Input PNG or JPEG")->required();
  rt->add_option("-o,--out", rt_out, "Encoded JPEG")->required();
  rt->add_option("--decoded", rt_decoded, "Also write the decoded raster as PNG");
  rt->add_option("--quality", rt_quality, "IJG quality")->check(CLI::Range(1, 100))->capture_default_str();
  rt->add_option("--subsampling", rt_sub, "444 or 420")->capture_default_str();

  auto* sns = app.add_subcommand("sns-sim", "Simulate an upload/download through a provider");
  std::string sns_in, sns_out, sns_provider = "twitter", sns_rule = "const:85";
  bool sns_downscale = false;
  sns->add_option("-i,--in", sns_in, "Uploaded JPEG")->required();
  sns->add_option("-o,--out", sns_out, "Downloaded JPEG")->required();
  sns->add_option("--provider", sns_provider, "twitter, facebook-hq or facebook-lq")->capture_default_str();
  sns->add_option("--facebook-rule", sns_rule, "const:<q> or map:<lo>-<hi>=<q>,...")->capture_default_str();
  sns->add_flag("--allow-downscale", sns_downscale, "Downscale oversized uploads instead of failing");

  auto* ev = app.add_subcommand("evaluate", "PSNR of decrypted images after simulated provider recompression");
  ExperimentFlags ev_flags;
  ev_flags.add(ev);
  std::vector<std::string> ev_providers{"twitter"};
  int qf_min = 70, qf_max = 100, qf_step = 1;
  std::string ev_sub = "444", ev_rule = "const:85";
  bool ev_downscale = false, ev_svg = false;
  ev->add_option("--provider", ev_providers, "Providers to simulate")->delimiter(',')->capture_default_str();
  ev->add_option("--qf-min", qf_min, "Lowest upload quality")->capture_default_str();
  ev->add_option("--qf-max", qf_max, "Highest upload quality")->capture_default_str();
  ev->add_option("--qf-step", qf_step, "Quality step")->capture_default_str();
  ev->add_option("--subsampling", ev_sub, "Upload subsampling for color paths: 444 or 420")->capture_default_str();
  ev->add_option("--facebook-rule", ev_rule, "const:<q> or map:<lo>-<hi>=<q>,...")->capture_default_str();
  ev->add_flag("--allow-downscale", ev_downscale, "Downscale oversized uploads instead of failing");
  ev->add_flag("--svg", ev_svg, "Also write evaluate.svg");

  auto* at = app.add_subcommand("attack", "Best-of-trials jigsaw solver attack on encrypted images");
  ExperimentFlags at_flags;
  at_flags.add(at);
  std::string at_scheme, at_solver = "extended";
  std::optional<int> at_block;
  std::size_t at_trials = kDefaultTrialCount;
  at->add_option("--scheme", at_scheme, "Only this scheme (default: conventional-16 and grayscale-8)");
  at->add_option("--block", at_block, "Block size for --scheme");
  at->add_option("--trials", at_trials, "Keys tried per image")->capture_default_str();
  at->add_option("--solver", at_solver, "permutation, d4 or extended")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : static_cast<int>(ExitCode::Usage);
  }

  try {
    if (keygen->parsed()) {
      cmd_keygen(keygen_out, keygen_hex);
    } else if (enc->parsed()) {
      EncryptRequest req;
      req.input = enc_in;
      req.output = enc_out;
      req.keys = enc_keys.source();
      const Scheme scheme = as_usage([&] { return parse_scheme(enc_scheme); });
      const Orientation o = as_usage([&] { return parse_orientation(enc_orientation); });
      const int block = enc_block.value_or(scheme == Scheme::Conventional ? 16 : 8);
      req.cipher = scheme == Scheme::Conventional ? CipherConfig::conventional(block)
                                                  : CipherConfig::grayscale(block, o);
      req.cipher.allow_nonstandard_block = enc_nonstandard;
      req.crop = enc_crop;
      req.jpeg.quality = enc_quality;
      req.jpeg.subsampling = as_usage([&] { return parse_subsampling(enc_sub); });
      const auto meta = cmd_encrypt(req);
      const auto geom = cipher_geometry(meta.original_width, meta.original_height, req.cipher);
      out << "encrypted " << enc_in << " -> " << enc_out << " (" << to_string(scheme) << ", " << block << "x" << block
          << ", n = " << geom.n << ")\n";
    } else if (dec->parsed()) {
      DecryptRequest req;
      req.input = dec_in;
      req.output = dec_out;
      req.keys = dec_keys.source();
      if (!dec_meta.empty()) req.metadata = dec_meta;
      if (!dec_scheme.empty()) req.scheme = as_usage([&] { return parse_scheme(dec_scheme); });
      req.block = dec_block;
      req.orientation = as_usage([&] { return parse_orientation(dec_orientation); });
      cmd_decrypt(req);
    } else if (rt->parsed()) {
      const RasterImage image = load_image(rt_in);
      JpegParams params;
      params.quality = rt_quality;
      params.subsampling = as_usage([&] { return parse_subsampling(rt_sub); });
      params.grayscale = image.channels() == 1;
      const Bytes bytes = encode_jpeg(image, params);
      const DecodedJpeg decoded = decode_jpeg(bytes);
      write_file_atomic(rt_out, bytes);
      if (!rt_decoded.empty()) write_file_atomic(rt_decoded, encode_png(decoded.image));
      const auto q = estimate_quality(decoded.info);
      out << "bytes=" << bytes.size() << " estimated_quality=" << (q ? std::to_string(*q) : "unknown")
          << " psnr_db=" << psnr(image, decoded.image) << "\n";
    } else if (sns->parsed()) {
      SnsPolicy policy = SnsPolicy::for_provider(as_usage([&] { return parse_provider(sns_provider); }));
      policy.facebook_rule = as_usage([&] { return FacebookQualityRule::parse(sns_rule); });
      policy.allow_downscale = sns_downscale;
      const SnsResult r = simulate(policy, read_file(sns_in));
      write_file_atomic(sns_out, r.download);
      nlohmann::ordered_json j;
      j["provider"] = to_string(policy.provider);
      j["recompressed"] = r.decision.recompressed;
      j["output_quality"] = r.decision.output_quality ? nlohmann::json(*r.decision.output_quality) : nullptr;
      j["output_subsampling"] =
          r.decision.output_subsampling ? nlohmann::json(to_string(*r.decision.output_subsampling)) : nullptr;
      j["resized"] = r.decision.resized;
      out << j.dump() << "\n";
    } else if (ev->parsed()) {
      ExperimentConfig cfg = ev_flags.base();
      cfg.providers.clear();
      for (const auto& p : ev_providers) cfg.providers.push_back(as_usage([&] { return parse_provider(p); }));
      cfg.qf_min = qf_min;
      cfg.qf_max = qf_max;
      cfg.qf_step = qf_step;
      cfg.subsampling = as_usage([&] { return parse_subsampling(ev_sub); });
      cfg.facebook_rule = ev_rule;
      cfg.allow_downscale = ev_downscale;
      cfg.svg = ev_svg;
      cfg.validate();
      const EvaluateReport report = run_evaluate(cfg);
      fs::create_directories(cfg.out_dir);
      write_file_atomic(cfg.out_dir / "evaluate.csv", to_csv(report.rows));
      write_file_atomic(cfg.out_dir / "evaluate_summary.csv", to_csv(report.summary));
      if (cfg.svg) write_file_atomic(cfg.out_dir / "evaluate.svg", render_svg(report.summary));
      out << "wrote " << report.rows.size() << " rows to " << (cfg.out_dir / "evaluate.csv").string() << "\n";
    } else if (at->parsed()) {
      ExperimentConfig cfg = at_flags.base();
      if (!at_scheme.empty()) cfg.scheme = as_usage([&] { return parse_scheme(at_scheme); });
      if (at_block && !cfg.scheme) throw UsageError("--block needs --scheme");
      cfg.block = at_block;
      cfg.trials = at_trials;
      cfg.solver_mode = as_usage([&] { return parse_solver_mode(at_solver); });
      cfg.validate();
      const auto rows = run_attack(cfg);
      fs::create_directories(cfg.out_dir);
      write_file_atomic(cfg.out_dir / "attack.csv", to_csv(rows));
      for (const auto& r : rows) {
        if (r.image_id == "mean") {
          out << to_string(r.scheme) << "-" << r.block_size << ": Dc=" << r.dc << " Nc=" << r.nc << " Lc=" << r.lc
              << "\n";
        }
      }
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::Usage);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::Data);
  }
  return static_cast<int>(ExitCode::Success);
}

}  // namespace scramble::cli
