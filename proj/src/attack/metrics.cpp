#include "scramble/metrics.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "scramble/block_ops.hpp"
#include "scramble/error.hpp"

namespace scramble {

namespace {

void require_same_grid(const AssemblyResult& result, const AssemblyResult& truth) {
  if (result.grid.cols != truth.grid.cols || result.grid.rows != truth.grid.rows ||
      result.placement.size() != truth.placement.size() || truth.placement.size() != truth.grid.n) {
    throw GeometryMismatch("assembly grids differ");
  }
}

struct PieceTruth {
  int x = 0;
  int y = 0;
  int d4 = 0;
};

std::vector<PieceTruth> index_truth(const AssemblyResult& truth) {
  std::vector<PieceTruth> out(truth.placement.size());
  for (std::size_t cell = 0; cell < truth.placement.size(); ++cell) {
    const auto& p = truth.placement[cell];
    out[p.piece] = {static_cast<int>(cell % static_cast<std::size_t>(truth.grid.cols)),
                    static_cast<int>(cell / static_cast<std::size_t>(truth.grid.cols)), p.d4};
  }
  return out;
}

// Residual transform between a piece's true orientation and the one placed.
int frame_of(const Placement& placed, const PieceTruth& t, bool has_orientation) {
  return has_orientation ? d4_compose(placed.d4, d4_inverse(t.d4)) : 0;
}

bool joined_correctly(const Placement& a, const Placement& b, int dx, int dy, const std::vector<PieceTruth>& truth,
                      bool has_orientation) {
  const PieceTruth& ta = truth[a.piece];
  const PieceTruth& tb = truth[b.piece];
  const int fa = frame_of(a, ta, has_orientation);
  if (fa != frame_of(b, tb, has_orientation)) return false;
  const auto d = d4_map_direction(d4_inverse(fa), dx, dy);
  return tb.x - ta.x == d[0] && tb.y - ta.y == d[1];
}

struct DisjointSets {
  std::vector<std::size_t> parent;
  std::vector<std::size_t> size;
  explicit DisjointSets(std::size_t n) : parent(n), size(n, 1) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size[a] < size[b]) std::swap(a, b);
    parent[b] = a;
    size[a] += size[b];
  }
};

// Calls fn(cell_a, cell_b, dx, dy) for every horizontal and vertical slot.
template <typename Fn>
void for_each_adjacency(const BlockGeometry& grid, Fn&& fn) {
  const auto cols = static_cast<std::size_t>(grid.cols);
  for (int y = 0; y < grid.rows; ++y) {
    for (int x = 0; x < grid.cols; ++x) {
      const std::size_t cell = static_cast<std::size_t>(y) * cols + static_cast<std::size_t>(x);
      if (x + 1 < grid.cols) fn(cell, cell + 1, 1, 0);
      if (y + 1 < grid.rows) fn(cell, cell + cols, 0, 1);
    }
  }
}

}  // namespace

void AssemblyResult::validate() const {
  if (placement.size() != grid.n) throw GeometryMismatch("placement size differs from grid size");
  std::vector<std::uint32_t> ids;
  ids.reserve(placement.size());
  for (const auto& p : placement) {
    if (p.d4 >= kD4Count) throw Error("placement orientation out of range");
    ids.push_back(p.piece);
  }
  if (!is_bijection(ids)) throw Error("placement is not a bijection over piece ids");
}

AssemblyResult truth_assembly(const TransformSpec& spec, const BlockGeometry& grid) {
  if (spec.size() != grid.n) throw GeometryMismatch("transform spec size differs from grid size");
  AssemblyResult truth;
  truth.grid = grid;
  truth.has_orientation = true;
  truth.placement.resize(grid.n);
  for (std::size_t p = 0; p < spec.size(); ++p) {
    truth.placement[spec.permutation[p]] = {static_cast<std::uint32_t>(p),
                                            static_cast<std::uint8_t>(d4_inverse(spec.d4_codes[p]))};
  }
  return truth;
}

double direct_comparison(const AssemblyResult& result, const AssemblyResult& truth) {
  require_same_grid(result, truth);
  std::size_t correct = 0;
  for (std::size_t cell = 0; cell < result.placement.size(); ++cell) {
    const auto& r = result.placement[cell];
    const auto& t = truth.placement[cell];
    if (r.piece == t.piece && (!result.has_orientation || r.d4 == t.d4)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(result.placement.size());
}

double neighbor_comparison(const AssemblyResult& result, const AssemblyResult& truth) {
  require_same_grid(result, truth);
  const auto where = index_truth(truth);
  std::size_t slots = 0;
  std::size_t correct = 0;
  for_each_adjacency(result.grid, [&](std::size_t a, std::size_t b, int dx, int dy) {
    ++slots;
    if (joined_correctly(result.placement[a], result.placement[b], dx, dy, where, result.has_orientation)) ++correct;
  });
  return slots == 0 ? 1.0 : static_cast<double>(correct) / static_cast<double>(slots);
}

double largest_component(const AssemblyResult& result, const AssemblyResult& truth) {
  require_same_grid(result, truth);
  const auto where = index_truth(truth);
  DisjointSets sets(result.placement.size());
  for_each_adjacency(result.grid, [&](std::size_t a, std::size_t b, int dx, int dy) {
    if (joined_correctly(result.placement[a], result.placement[b], dx, dy, where, result.has_orientation)) {
      sets.unite(a, b);
    }
  });
  std::size_t best = 0;
  for (std::size_t v = 0; v < result.placement.size(); ++v) {
    if (sets.find(v) == v) best = std::max(best, sets.size[v]);
  }
  return static_cast<double>(best) / static_cast<double>(result.placement.size());
}

double psnr(const RasterImage& a, const RasterImage& b) {
  if (a.width() != b.width() || a.height() != b.height() || a.channels() != b.channels()) {
    throw GeometryMismatch("PSNR needs images of identical shape");
  }
  const auto sa = a.samples();
  const auto sb = b.samples();
  double sse = 0;
  for (std::size_t i = 0; i < sa.size(); ++i) {
    const double d = static_cast<double>(sa[i]) - static_cast<double>(sb[i]);
    sse += d * d;
  }
  if (sse == 0) return kInfinitePsnr;
  const double mse = sse / static_cast<double>(sa.size());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

MetricsReport compare_assembly(const AssemblyResult& result, const AssemblyResult& truth) {
  MetricsReport m;
  m.dc = direct_comparison(result, truth);
  m.nc = neighbor_comparison(result, truth);
  m.lc = largest_component(result, truth);
  return m;
}

}  // namespace scramble
