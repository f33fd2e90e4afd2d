#include <fnmatch.h>
#include <sodium.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "scramble/cli.hpp"
#include "scramble/error.hpp"
#include "scramble/image_io.hpp"
#include "scramble/keystream.hpp"
#include "scramble/metrics.hpp"
#include "scramble/protocol.hpp"

namespace scramble::cli {

namespace fs = std::filesystem;

namespace {

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(6);
  os << v;
  return os.str();
}

std::string schema_line(std::string_view report) {
  return "# scramble " + std::string(report) + " csv v" + std::to_string(kCsvSchemaVersion) + "\n";
}

unsigned worker_count(unsigned requested, std::size_t jobs) {
  unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

/// Runs job(i) for i in [0, jobs) on a small pool; rethrows the first failure.
template <typename Job>
void parallel_for(std::size_t jobs, unsigned threads, Job job) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs;) {
      try {
        job(i);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = jobs;
      }
    }
  };
  const unsigned n = worker_count(threads, jobs);
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

RasterImage load_input(const fs::path& path, bool crop, int multiple) {
  RasterImage img = load_image(path);
  if (img.channels() != 3) throw FormatError(path.string() + ": experiments need an RGB image");
  return crop ? crop_to_multiple(img, multiple, multiple) : img;
}

struct Variant {
  std::string name;
  int block = 0;
  std::optional<CipherConfig> cipher;
};

std::vector<Variant> evaluate_variants(Orientation orientation) {
  CipherConfig conv8 = CipherConfig::conventional(8);
  conv8.allow_nonstandard_block = true;
  return {{"unencrypted", 0, std::nullopt},
          {"conventional-16", 16, CipherConfig::conventional(16)},
          {"conventional-8", 8, conv8},
          {"grayscale-8", 8, CipherConfig::grayscale(8, orientation)}};
}

SnsPolicy policy_for(const ExperimentConfig& cfg, Provider provider) {
  SnsPolicy policy = SnsPolicy::for_provider(provider);
  policy.facebook_rule = FacebookQualityRule::parse(cfg.facebook_rule);
  policy.allow_downscale = cfg.allow_downscale;
  return policy;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (inputs.empty()) throw UsageError("no input images given");
  if (qf_min < 1 || qf_max > 100 || qf_min > qf_max) {
    throw UsageError("quality sweep must lie within 1..100 with min <= max");
  }
  if (qf_step < 1) throw UsageError("quality step must be positive");
  if (trials < 1) throw UsageError("trial count must be at least 1");
  if (providers.empty()) throw UsageError("at least one provider is required");
  if (block && *block < 1) throw UsageError("block size must be positive");
  try {
    FacebookQualityRule::parse(facebook_rule);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

std::vector<int> ExperimentConfig::qf_values() const {
  std::vector<int> out;
  for (int q = qf_min; q <= qf_max; q += qf_step) out.push_back(q);
  return out;
}

std::vector<fs::path> expand_inputs(const std::vector<std::string>& patterns) {
  std::set<fs::path> found;
  for (const auto& pattern : patterns) {
    const fs::path p(pattern);
    if (fs::is_directory(p)) {
      for (const auto& e : fs::directory_iterator(p)) {
        if (e.is_regular_file() && is_image_file(e.path())) found.insert(e.path());
      }
    } else if (fs::is_regular_file(p)) {
      found.insert(p);
    } else if (pattern.find_first_of("*?[") != std::string::npos) {
      const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
      const std::string glob = p.filename().string();
      if (!fs::is_directory(dir)) throw UsageError("no such directory: " + dir.string());
      for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && fnmatch(glob.c_str(), e.path().filename().c_str(), 0) == 0) {
          found.insert(e.path());
        }
      }
    } else {
      throw UsageError("no such input: " + pattern);
    }
  }
  if (found.empty()) throw UsageError("inputs matched no images");
  return {found.begin(), found.end()};
}

Key256 seed_from_text(std::string_view text) {
  if (sodium_init() < 0) throw Error("libsodium initialisation failed");
  Key256 out{};
  crypto_hash_sha256(out.data(), reinterpret_cast<const unsigned char*>(text.data()), text.size());
  return out;
}

std::string evaluate_csv_header() {
  return schema_line("evaluate") + "image_id,provider,variant,block_size,qf,recompressed,psnr_db\n";
}

std::string evaluate_summary_csv_header() {
  return schema_line("evaluate-summary") + "provider,variant,block_size,qf,mean_psnr_db,images\n";
}

std::string attack_csv_header() {
  return schema_line("attack") + "image_id,scheme,block_size,n,Dc,Nc,Lc,psnr_db,trial_count\n";
}

EvaluateReport run_evaluate(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto paths = expand_inputs(cfg.inputs);
  const auto variants = evaluate_variants(cfg.orientation);
  const auto qfs = cfg.qf_values();
  const auto conv_keys = derive_trial_keys(cfg.seed, paths.size(), Scheme::Conventional);
  const auto gray_keys = derive_trial_keys(cfg.seed, paths.size(), Scheme::Grayscale);
  std::vector<SnsPolicy> policies;
  for (auto p : cfg.providers) policies.push_back(policy_for(cfg, p));

  std::vector<std::vector<EvaluateRow>> per_image(paths.size());
  parallel_for(paths.size(), cfg.threads, [&](std::size_t i) {
    const RasterImage original = load_input(paths[i], cfg.crop, 16);
    const std::string id = paths[i].stem().string();
    for (const auto& v : variants) {
      const KeySet* keys = nullptr;
      if (v.cipher) keys = v.cipher->scheme == Scheme::Conventional ? &conv_keys[i] : &gray_keys[i];
      const RasterImage plain = v.cipher ? encrypt(original, *keys, *v.cipher) : original;
      for (int qf : qfs) {
        JpegParams params;
        params.quality = qf;
        params.subsampling = cfg.subsampling;
        params.grayscale = plain.channels() == 1;
        const Bytes upload = encode_jpeg(plain, params);
        for (std::size_t p = 0; p < policies.size(); ++p) {
          const SnsResult r = simulate(policies[p], upload);
          const RasterImage downloaded = decode_jpeg(r.download).image;
          const RasterImage restored = v.cipher ? decrypt(downloaded, *keys, *v.cipher) : downloaded;
          per_image[i].push_back({id, cfg.providers[p], v.name, v.block, qf, r.decision.recompressed,
                                  psnr(original, restored)});
        }
      }
    }
  });

  EvaluateReport report;
  for (auto& rows : per_image) {
    std::stable_sort(rows.begin(), rows.end(), [](const EvaluateRow& a, const EvaluateRow& b) {
      return std::tie(a.provider, a.qf) < std::tie(b.provider, b.qf);
    });
    report.rows.insert(report.rows.end(), rows.begin(), rows.end());
  }
  for (auto provider : cfg.providers) {
    for (const auto& v : variants) {
      for (int qf : qfs) {
        EvaluateSummaryRow s{provider, v.name, v.block, qf, 0.0, 0};
        for (const auto& r : report.rows) {
          if (r.provider == provider && r.variant == v.name && r.qf == qf) {
            s.mean_psnr_db += r.psnr_db;
            ++s.images;
          }
        }
        if (s.images) s.mean_psnr_db /= static_cast<double>(s.images);
        report.summary.push_back(s);
      }
    }
  }
  return report;
}

std::vector<AttackRow> run_attack(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto paths = expand_inputs(cfg.inputs);
  std::vector<std::pair<Scheme, int>> runs;
  if (cfg.scheme) {
    runs.emplace_back(*cfg.scheme, cfg.block.value_or(*cfg.scheme == Scheme::Conventional ? 16 : 8));
  } else {
    runs = {{Scheme::Conventional, 16}, {Scheme::Grayscale, 8}};
  }
  SolverOptions options;
  options.mode = cfg.solver_mode;

  std::vector<AttackRow> rows;
  for (const auto& [scheme, block] : runs) {
    CipherConfig cipher = scheme == Scheme::Conventional ? CipherConfig::conventional(block)
                                                         : CipherConfig::grayscale(block, cfg.orientation);
    cipher.allow_nonstandard_block = true;
    const auto keys = derive_trial_keys(cfg.seed, cfg.trials, scheme);
    AttackRow mean{"mean", scheme, block, 0, 0, 0, 0, 0, cfg.trials};
    bool uniform_n = true;
    for (const auto& path : paths) {
      const RasterImage img = load_input(path, cfg.crop, block);
      const ProtocolResult r = attack_trial_protocol(img, keys, cipher, options, cfg.threads);
      rows.push_back({path.stem().string(), scheme, block, r.n, r.best.dc, r.best.nc, r.best.lc, r.best.psnr_db,
                      r.trial_count});
      if (mean.n != 0 && mean.n != r.n) uniform_n = false;
      mean.n = r.n;
      mean.dc += r.best.dc;
      mean.nc += r.best.nc;
      mean.lc += r.best.lc;
      mean.psnr_db += r.best.psnr_db;
    }
    const double k = static_cast<double>(paths.size());
    mean.dc /= k;
    mean.nc /= k;
    mean.lc /= k;
    mean.psnr_db /= k;
    if (!uniform_n) mean.n = 0;
    rows.push_back(mean);
  }
  return rows;
}

std::string to_csv(const std::vector<EvaluateRow>& rows) {
  std::string out = evaluate_csv_header();
  for (const auto& r : rows) {
    out += csv_field(r.image_id) + ',' + std::string(to_string(r.provider)) + ',' + r.variant + ',' +
           std::to_string(r.block_size) + ',' + std::to_string(r.qf) + ',' + (r.recompressed ? "1" : "0") + ',' +
           fmt(r.psnr_db) + '\n';
  }
  return out;
}

std::string to_csv(const std::vector<EvaluateSummaryRow>& rows) {
  std::string out = evaluate_summary_csv_header();
  for (const auto& r : rows) {
    out += std::string(to_string(r.provider)) + ',' + r.variant + ',' + std::to_string(r.block_size) + ',' +
           std::to_string(r.qf) + ',' + fmt(r.mean_psnr_db) + ',' + std::to_string(r.images) + '\n';
  }
  return out;
}

std::string to_csv(const std::vector<AttackRow>& rows) {
  std::string out = attack_csv_header();
  for (const auto& r : rows) {
    out += csv_field(r.image_id) + ',' + std::string(to_string(r.scheme)) + ',' + std::to_string(r.block_size) +
           ',' + std::to_string(r.n) + ',' + fmt(r.dc) + ',' + fmt(r.nc) + ',' + fmt(r.lc) + ',' + fmt(r.psnr_db) +
           ',' + std::to_string(r.trial_count) + '\n';
  }
  return out;
}

std::string render_svg(const std::vector<EvaluateSummaryRow>& rows) {
  constexpr double kW = 720, kH = 480, kLeft = 60, kRight = 200, kTop = 20, kBottom = 50;
  static const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
                                        "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#000000", "#aec7e8"};
  std::map<std::string, std::vector<std::pair<int, double>>> series;
  int q0 = 100, q1 = 1;
  double y0 = 1e9, y1 = -1e9;
  for (const auto& r : rows) {
    if (!std::isfinite(r.mean_psnr_db) || r.images == 0) continue;
    series[std::string(to_string(r.provider)) + " " + r.variant].emplace_back(r.qf, r.mean_psnr_db);
    q0 = std::min(q0, r.qf);
    q1 = std::max(q1, r.qf);
    y0 = std::min(y0, r.mean_psnr_db);
    y1 = std::max(y1, r.mean_psnr_db);
  }
  if (series.empty()) {
    q0 = 70, q1 = 100, y0 = 0, y1 = 1;
  }
  if (q1 == q0) ++q1;
  y0 = std::floor(y0) - 1;
  y1 = std::ceil(y1) + 1;
  const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
  auto sx = [&](double q) { return kLeft + (q - q0) / (q1 - q0) * pw; };
  auto sy = [&](double v) { return kTop + (y1 - v) / (y1 - y0) * ph; };

  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(1);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int q = q0; q <= q1; q += std::max(1, (q1 - q0) / 6)) {
    os << "<text x=\"" << sx(q) << "\" y=\"" << kH - kBottom + 18 << "\" text-anchor=\"middle\">" << q << "</text>\n";
  }
  const double ystep = std::max(1.0, std::round((y1 - y0) / 6));
  for (double v = y0; v <= y1 + 1e-9; v += ystep) {
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << sy(v) + 4 << "\" text-anchor=\"end\">" << v << "</text>\n";
  }
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kH - 10 << "\" text-anchor=\"middle\">Qf</text>\n";
  os << "<text x=\"15\" y=\"" << kTop + ph / 2 << "\" transform=\"rotate(-90 15 " << kTop + ph / 2
     << ")\" text-anchor=\"middle\">PSNR [dB]</text>\n";
  std::size_t idx = 0;
  for (const auto& [name, pts] : series) {
    const char* color = kColors[idx % std::size(kColors)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [q, v] : pts) os << sx(q) << ',' << sy(v) << ' ';
    os << "\"/>\n";
    const double ly = kTop + 14 + 16.0 * static_cast<double>(idx);
    os << "<line x1=\"" << kW - kRight + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kW - kRight + 30 << "\" y2=\""
       << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << kW - kRight + 34 << "\" y=\"" << ly << "\">" << name << "</text>\n";
    ++idx;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace scramble::cli
