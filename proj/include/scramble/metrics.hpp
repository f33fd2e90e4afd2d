#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "scramble/geometry.hpp"
#include "scramble/keys.hpp"
#include "scramble/raster.hpp"

namespace scramble {

struct Placement {
  std::uint32_t piece = 0;
  /// Rotate/flip code applied to the piece before placing it.
  std::uint8_t d4 = 0;
  friend bool operator==(const Placement&, const Placement&) = default;
};

/// A piece arrangement on a grid. placement[i] is what sits at grid cell i
/// (row-major). Orientations are only compared when has_orientation is set.
struct AssemblyResult {
  BlockGeometry grid;
  std::vector<Placement> placement;
  bool has_orientation = false;

  /// Throws unless placement is a bijection over piece ids [0, n).
  void validate() const;
};

/// Where each encrypted block truly belongs: piece p (encrypted block p)
/// sits at cell spec.permutation[p] after undoing its rotate/flip code.
AssemblyResult truth_assembly(const TransformSpec& spec, const BlockGeometry& grid);

/// Fraction of pieces at their true cell (and true orientation, when the
/// result carries orientations).
double direct_comparison(const AssemblyResult& result, const AssemblyResult& truth);

/// Fraction of the grid's adjacency slots holding a correctly joined pair.
/// A horizontal or vertical neighbor pair counts when both pieces sit in the
/// same frame relative to the original (same residual rotate/flip) and their
/// true displacement, mapped into that frame, equals the realized one.
double neighbor_comparison(const AssemblyResult& result, const AssemblyResult& truth);

/// Size of the largest group of pieces connected through correct
/// adjacencies, divided by the piece count.
double largest_component(const AssemblyResult& result, const AssemblyResult& truth);

inline constexpr double kInfinitePsnr = std::numeric_limits<double>::infinity();

/// 10 log10(255^2 / MSE) over all samples; kInfinitePsnr when identical.
double psnr(const RasterImage& a, const RasterImage& b);

struct MetricsReport {
  double dc = 0;
  double nc = 0;
  double lc = 0;
  double psnr_db = 0;
  double score() const noexcept { return dc + nc + lc; }
};

MetricsReport compare_assembly(const AssemblyResult& result, const AssemblyResult& truth);

}  // namespace scramble
