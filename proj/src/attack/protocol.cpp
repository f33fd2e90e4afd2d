#include "scramble/protocol.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include <sodium.h>

#include "scramble/error.hpp"
#include "scramble/geometry.hpp"
#include "scramble/keystream.hpp"

namespace scramble {

std::vector<KeySet> derive_trial_keys(const Key256& seed, std::size_t count, Scheme scheme) {
  if (sodium_init() < 0) throw Error("libsodium initialisation failed");
  static constexpr std::string_view kLabel = "scramble/trial/v1";
  std::vector<KeySet> out;
  out.reserve(count);
  for (std::size_t t = 0; t < count; ++t) {
    std::string msg(kLabel);
    for (int b = 3; b >= 0; --b) msg.push_back(static_cast<char>((t >> (8 * b)) & 0xff));
    Key256 master{};
    crypto_auth_hmacsha256_state st;
    crypto_auth_hmacsha256_init(&st, seed.data(), seed.size());
    crypto_auth_hmacsha256_update(&st, reinterpret_cast<const unsigned char*>(msg.data()), msg.size());
    crypto_auth_hmacsha256_final(&st, master.data());
    out.push_back(make_keyset(master, scheme));
  }
  return out;
}

TrialOutcome run_attack_trial(const RasterImage& image, const KeySet& keys, const CipherConfig& cfg,
                              const SolverOptions& options) {
  const RasterImage reference =
      cfg.scheme == Scheme::Grayscale ? to_grayscale_composite(image, cfg.orientation) : image;
  const RasterImage encrypted = encrypt(image, keys, cfg);
  const auto geom = BlockGeometry::tile(encrypted.width(), encrypted.height(), cfg.block_w, cfg.block_h);
  const auto pieces = split_into_blocks(encrypted, geom);
  const auto spec = generate_transform_spec(keys, geom.n);
  const auto solved = greedy_assemble(pieces, geom, options);

  TrialOutcome out;
  out.n = geom.n;
  out.metrics = compare_assembly(solved.assembly, truth_assembly(spec, geom));
  out.metrics.psnr_db = psnr(render_assembly(pieces, solved), reference);
  return out;
}

ProtocolResult attack_trial_protocol(const RasterImage& image, std::span<const KeySet> keys, const CipherConfig& cfg,
                                     const SolverOptions& options, unsigned threads) {
  if (keys.empty()) throw Error("attack protocol needs at least one key set");
  ProtocolResult result;
  result.trial_count = keys.size();
  result.trials.resize(keys.size());
  std::vector<std::size_t> sizes(keys.size());

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, keys.size()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t t = next++; t < keys.size(); t = next++) {
      try {
        const auto outcome = run_attack_trial(image, keys[t], cfg, options);
        result.trials[t] = outcome.metrics;
        sizes[t] = outcome.n;
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  result.n = sizes.front();
  for (std::size_t t = 1; t < result.trials.size(); ++t) {
    if (result.trials[t].score() > result.trials[result.best_trial].score()) result.best_trial = t;
  }
  result.best = result.trials[result.best_trial];
  return result;
}

}  // namespace scramble
