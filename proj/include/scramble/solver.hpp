#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "scramble/geometry.hpp"
#include "scramble/metrics.hpp"
#include "scramble/raster.hpp"

namespace scramble {

enum class Side { Top, Right, Bottom, Left };

/// Mahalanobis gradient compatibility for placing `b` on `side` of `a`,
/// summed over both directions across the seam. Lower means a better fit.
/// Blocks must share size and channel count; rotations need square blocks.
double pairwise_compatibility(const RasterImage& a, const RasterImage& b, Side side);

enum class SolverMode {
  /// Positions only; pieces are assumed upright.
  PermutationOnly,
  /// Positions and rotate/flip codes.
  WithD4,
  /// Also searches per-piece inversion and, for color pieces, channel order.
  Extended,
};

std::string_view to_string(SolverMode m) noexcept;
SolverMode parse_solver_mode(std::string_view text);

/// Full per-piece transform found by the solver.
struct PieceVariant {
  std::uint8_t d4 = 0;
  bool negate = false;
  std::uint8_t color = 0;
  friend bool operator==(const PieceVariant&, const PieceVariant&) = default;
};

RasterImage apply_variant(const RasterImage& piece, const PieceVariant& v);

enum class SolverStrategy {
  /// Grow inside a grid-sized bounding box from the start.
  Bounded,
  /// Grow freely, keep the best grid-sized window, then fill its holes.
  GrowTrimFill,
};

struct SolverOptions {
  SolverMode mode = SolverMode::WithD4;
  SolverStrategy strategy = SolverStrategy::GrowTrimFill;
  /// Best matches kept per piece side.
  int candidates_per_side = 8;
};

struct SolverOutput {
  AssemblyResult assembly;
  /// variants[cell] matches assembly.placement[cell].
  std::vector<PieceVariant> variants;
};

/// Greedy jigsaw assembly of equally sized square pieces into a
/// grid.cols x grid.rows layout.
SolverOutput greedy_assemble(std::span<const RasterImage> pieces, const BlockGeometry& grid,
                             const SolverOptions& options = {});

RasterImage render_assembly(std::span<const RasterImage> pieces, const SolverOutput& solved);

namespace detail {

/// Seam statistics used by the solver. Exposed for testing the batched
/// cost route against the direct one.
struct EdgeModel {
  int length = 0;
  int channels = 0;
  std::vector<double> boundary;  // length x channels
  std::vector<double> mean;      // channels
  std::vector<double> precision; // channels x channels
};

/// Right-hand seam of a block (its last column and the gradient into it).
EdgeModel right_edge(const RasterImage& block);
/// Left-hand seam (first column and the gradient into it from the right).
EdgeModel left_edge(const RasterImage& block);

/// Cost of `right` placed immediately to the right of `left`.
double seam_cost(const EdgeModel& left, const EdgeModel& right);

/// Same quantity via flattened features: cost = dot(row, col) + row_c + col_c.
std::vector<double> row_features(const EdgeModel& left, double& constant);
std::vector<double> col_features(const EdgeModel& right, double& constant);

}  // namespace detail

}  // namespace scramble
