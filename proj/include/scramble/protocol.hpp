#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "scramble/cipher.hpp"
#include "scramble/keys.hpp"
#include "scramble/metrics.hpp"
#include "scramble/raster.hpp"
#include "scramble/solver.hpp"

namespace scramble {

inline constexpr std::size_t kDefaultTrialCount = 30;

/// Deterministic per-trial master keys: HMAC-SHA256(seed, "scramble/trial/v1" || t).
std::vector<KeySet> derive_trial_keys(const Key256& seed, std::size_t count, Scheme scheme);

struct TrialOutcome {
  MetricsReport metrics;
  std::size_t n = 0;
};

/// Encrypts `image` with one key set, runs the solver on the encrypted
/// blocks and scores the result against the true layout.
TrialOutcome run_attack_trial(const RasterImage& image, const KeySet& keys, const CipherConfig& cfg,
                              const SolverOptions& options);

struct ProtocolResult {
  MetricsReport best;
  std::size_t best_trial = 0;
  std::size_t trial_count = 0;
  std::size_t n = 0;
  std::vector<MetricsReport> trials;
};

/// One trial per key set; the reported trial maximizes Dc + Nc + Lc, first
/// one winning ties. Trials run on up to `threads` workers (0 = hardware).
ProtocolResult attack_trial_protocol(const RasterImage& image, std::span<const KeySet> keys, const CipherConfig& cfg,
                                     const SolverOptions& options, unsigned threads = 0);

}  // namespace scramble
