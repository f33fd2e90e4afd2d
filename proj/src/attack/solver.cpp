#include "scramble/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include <Eigen/Dense>

#include "scramble/block_ops.hpp"
#include "scramble/error.hpp"

namespace scramble {

namespace detail {

namespace {

// Gallagher's dummy gradients keep the covariance invertible on flat seams.
const std::vector<std::vector<double>>& dummy_gradients(int channels) {
  static const std::vector<std::vector<double>> gray{{0}, {1}, {-1}};
  static const std::vector<std::vector<double>> color{{0, 0, 0},  {1, 1, 1},  {-1, -1, -1}, {0, 0, 1}, {0, 1, 0},
                                                      {1, 0, 0},  {-1, 0, 0}, {0, -1, 0},   {0, 0, -1}};
  return channels == 1 ? gray : color;
}

// outer_col is the seam column, inner_col its neighbor inside the block.
EdgeModel edge_model(const RasterImage& block, int outer_col, int inner_col) {
  const int k = block.height();
  const int c = block.channels();
  EdgeModel e;
  e.length = k;
  e.channels = c;
  e.boundary.resize(static_cast<std::size_t>(k * c));
  std::vector<double> grads(static_cast<std::size_t>(k * c));
  e.mean.assign(static_cast<std::size_t>(c), 0.0);
  for (int i = 0; i < k; ++i) {
    for (int ch = 0; ch < c; ++ch) {
      const double outer = block.at(outer_col, i, ch);
      const double g = outer - static_cast<double>(block.at(inner_col, i, ch));
      const auto idx = static_cast<std::size_t>(i * c + ch);
      e.boundary[idx] = outer;
      grads[idx] = g;
      e.mean[static_cast<std::size_t>(ch)] += g / k;
    }
  }
  const auto& dummies = dummy_gradients(c);
  const int samples = k + static_cast<int>(dummies.size());
  Eigen::VectorXd all_mean = Eigen::VectorXd::Zero(c);
  for (int i = 0; i < k; ++i) {
    for (int ch = 0; ch < c; ++ch) all_mean[ch] += grads[static_cast<std::size_t>(i * c + ch)];
  }
  for (const auto& d : dummies) {
    for (int ch = 0; ch < c; ++ch) all_mean[ch] += d[static_cast<std::size_t>(ch)];
  }
  all_mean /= samples;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(c, c);
  auto accumulate = [&](const double* g) {
    Eigen::VectorXd v(c);
    for (int ch = 0; ch < c; ++ch) v[ch] = g[ch] - all_mean[ch];
    cov += v * v.transpose();
  };
  for (int i = 0; i < k; ++i) accumulate(&grads[static_cast<std::size_t>(i * c)]);
  for (const auto& d : dummies) accumulate(d.data());
  cov /= (samples - 1);
  const Eigen::MatrixXd prec = cov.inverse();
  e.precision.resize(static_cast<std::size_t>(c * c));
  for (int r = 0; r < c; ++r) {
    for (int q = 0; q < c; ++q) e.precision[static_cast<std::size_t>(r * c + q)] = prec(r, q);
  }
  return e;
}

// sum over i of (d_i - mu)^T P (d_i - mu), d_i = sign * (to_i - from_i)
double mahalanobis_sum(const std::vector<double>& from, const std::vector<double>& to, const EdgeModel& model) {
  const int c = model.channels;
  double total = 0;
  std::array<double, 3> d{};
  for (int i = 0; i < model.length; ++i) {
    for (int ch = 0; ch < c; ++ch) {
      const auto idx = static_cast<std::size_t>(i * c + ch);
      d[static_cast<std::size_t>(ch)] = to[idx] - from[idx] - model.mean[static_cast<std::size_t>(ch)];
    }
    for (int r = 0; r < c; ++r) {
      for (int q = 0; q < c; ++q) {
        total += d[static_cast<std::size_t>(r)] * model.precision[static_cast<std::size_t>(r * c + q)] *
                 d[static_cast<std::size_t>(q)];
      }
    }
  }
  return total;
}

}  // namespace

EdgeModel right_edge(const RasterImage& block) {
  const int w = block.width();
  return edge_model(block, w - 1, std::max(w - 2, 0));
}

EdgeModel left_edge(const RasterImage& block) {
  return edge_model(block, 0, std::min(1, block.width() - 1));
}

double seam_cost(const EdgeModel& left, const EdgeModel& right) {
  if (left.length != right.length || left.channels != right.channels) {
    throw GeometryMismatch("seam models differ in shape");
  }
  // Left-to-right: gradient across the seam against the left block's model,
  // and the mirror case against the right block's model.
  return mahalanobis_sum(left.boundary, right.boundary, left) + mahalanobis_sum(right.boundary, left.boundary, right);
}

// Expanding both quadratic forms splits the cost into a dot product of a
// left-only vector with a right-only vector plus per-side constants. Layout:
//   row: [vec(P), -2 P x_i, -2 P mu, vec(sum x x^T), x_i, sum x]
//   col: [vec(sum y y^T), y_i, sum y, vec(P'), -2 P' y_i, -2 P' mu']
std::vector<double> row_features(const EdgeModel& e, double& constant) {
  const int k = e.length;
  const int c = e.channels;
  const auto cc = static_cast<std::size_t>(c * c);
  std::vector<double> f;
  f.reserve(2 * (cc + static_cast<std::size_t>(k * c + c)));
  const auto p = [&](int r, int q) { return e.precision[static_cast<std::size_t>(r * c + q)]; };
  const auto x = [&](int i, int ch) { return e.boundary[static_cast<std::size_t>(i * c + ch)]; };
  f.insert(f.end(), e.precision.begin(), e.precision.end());
  for (int i = 0; i < k; ++i) {
    for (int r = 0; r < c; ++r) {
      double s = 0;
      for (int q = 0; q < c; ++q) s += p(r, q) * x(i, q);
      f.push_back(-2 * s);
    }
  }
  std::vector<double> pmu(static_cast<std::size_t>(c), 0.0);
  for (int r = 0; r < c; ++r) {
    for (int q = 0; q < c; ++q) pmu[static_cast<std::size_t>(r)] += p(r, q) * e.mean[static_cast<std::size_t>(q)];
    f.push_back(-2 * pmu[static_cast<std::size_t>(r)]);
  }
  std::vector<double> sum_x(static_cast<std::size_t>(c), 0.0);
  for (int r = 0; r < c; ++r) {
    for (int q = 0; q < c; ++q) {
      double s = 0;
      for (int i = 0; i < k; ++i) s += x(i, r) * x(i, q);
      f.push_back(s);
    }
  }
  for (int i = 0; i < k; ++i) {
    for (int ch = 0; ch < c; ++ch) {
      f.push_back(x(i, ch));
      sum_x[static_cast<std::size_t>(ch)] += x(i, ch);
    }
  }
  f.insert(f.end(), sum_x.begin(), sum_x.end());

  double xpx = 0;
  for (int i = 0; i < k; ++i) {
    for (int r = 0; r < c; ++r) {
      for (int q = 0; q < c; ++q) xpx += x(i, r) * p(r, q) * x(i, q);
    }
  }
  double mu_p_sum = 0;
  double mu_p_mu = 0;
  for (int r = 0; r < c; ++r) {
    mu_p_sum += pmu[static_cast<std::size_t>(r)] * sum_x[static_cast<std::size_t>(r)];
    mu_p_mu += pmu[static_cast<std::size_t>(r)] * e.mean[static_cast<std::size_t>(r)];
  }
  constant = xpx + 2 * mu_p_sum + k * mu_p_mu;
  return f;
}

std::vector<double> col_features(const EdgeModel& e, double& constant) {
  const int k = e.length;
  const int c = e.channels;
  const auto cc = static_cast<std::size_t>(c * c);
  std::vector<double> f;
  f.reserve(2 * (cc + static_cast<std::size_t>(k * c + c)));
  const auto p = [&](int r, int q) { return e.precision[static_cast<std::size_t>(r * c + q)]; };
  const auto y = [&](int i, int ch) { return e.boundary[static_cast<std::size_t>(i * c + ch)]; };
  std::vector<double> sum_y(static_cast<std::size_t>(c), 0.0);
  for (int r = 0; r < c; ++r) {
    for (int q = 0; q < c; ++q) {
      double s = 0;
      for (int i = 0; i < k; ++i) s += y(i, r) * y(i, q);
      f.push_back(s);
    }
  }
  for (int i = 0; i < k; ++i) {
    for (int ch = 0; ch < c; ++ch) {
      f.push_back(y(i, ch));
      sum_y[static_cast<std::size_t>(ch)] += y(i, ch);
    }
  }
  f.insert(f.end(), sum_y.begin(), sum_y.end());
  f.insert(f.end(), e.precision.begin(), e.precision.end());
  for (int i = 0; i < k; ++i) {
    for (int r = 0; r < c; ++r) {
      double s = 0;
      for (int q = 0; q < c; ++q) s += p(r, q) * y(i, q);
      f.push_back(-2 * s);
    }
  }
  std::vector<double> pmu(static_cast<std::size_t>(c), 0.0);
  for (int r = 0; r < c; ++r) {
    for (int q = 0; q < c; ++q) pmu[static_cast<std::size_t>(r)] += p(r, q) * e.mean[static_cast<std::size_t>(q)];
    f.push_back(-2 * pmu[static_cast<std::size_t>(r)]);
  }

  double ypy = 0;
  for (int i = 0; i < k; ++i) {
    for (int r = 0; r < c; ++r) {
      for (int q = 0; q < c; ++q) ypy += y(i, r) * p(r, q) * y(i, q);
    }
  }
  double mu_p_sum = 0;
  double mu_p_mu = 0;
  for (int r = 0; r < c; ++r) {
    mu_p_sum += pmu[static_cast<std::size_t>(r)] * sum_y[static_cast<std::size_t>(r)];
    mu_p_mu += pmu[static_cast<std::size_t>(r)] * e.mean[static_cast<std::size_t>(r)];
  }
  constant = ypy + 2 * mu_p_sum + k * mu_p_mu;
  return f;
}

}  // namespace detail

namespace {

// Clockwise turns that bring each side to face right.
int rotation_to_right(Side side) {
  switch (side) {
    case Side::Right: return 0;
    case Side::Top: return 1;
    case Side::Left: return 2;
    case Side::Bottom: return 3;
  }
  return 0;
}

}  // namespace

double pairwise_compatibility(const RasterImage& a, const RasterImage& b, Side side) {
  if (a.width() != b.width() || a.height() != b.height() || a.channels() != b.channels()) {
    throw GeometryMismatch("pieces differ in shape");
  }
  const int code = d4_code(rotation_to_right(side), false);
  const RasterImage ra = apply_d4(a, code);
  const RasterImage rb = apply_d4(b, code);
  return detail::seam_cost(detail::right_edge(ra), detail::left_edge(rb));
}

std::string_view to_string(SolverMode m) noexcept {
  switch (m) {
    case SolverMode::PermutationOnly: return "permutation";
    case SolverMode::WithD4: return "d4";
    case SolverMode::Extended: return "extended";
  }
  return "?";
}

SolverMode parse_solver_mode(std::string_view text) {
  if (text == "permutation") return SolverMode::PermutationOnly;
  if (text == "d4") return SolverMode::WithD4;
  if (text == "extended") return SolverMode::Extended;
  throw Error("unknown solver mode: " + std::string(text));
}

RasterImage apply_variant(const RasterImage& piece, const PieceVariant& v) {
  RasterImage out = apply_d4(piece, v.d4);
  if (v.negate) out = negative_positive(out, true);
  if (v.color != 0) out = shuffle_colors(out, v.color);
  return out;
}

namespace {

constexpr int kVariantSlots = kD4Count * 2 * kColorPermCount;

int variant_index(const PieceVariant& v) { return (v.d4 * 2 + (v.negate ? 1 : 0)) * kColorPermCount + v.color; }

PieceVariant variant_at(int index) {
  PieceVariant v;
  v.color = static_cast<std::uint8_t>(index % kColorPermCount);
  index /= kColorPermCount;
  v.negate = (index % 2) != 0;
  v.d4 = static_cast<std::uint8_t>(index / 2);
  return v;
}

// The three parts act on space, values and channels, so they commute.
PieceVariant compose(const PieceVariant& a, const PieceVariant& b) {
  return {static_cast<std::uint8_t>(d4_compose(a.d4, b.d4)), a.negate != b.negate,
          static_cast<std::uint8_t>(color_compose(a.color, b.color))};
}

PieceVariant inverse(const PieceVariant& v) {
  return {static_cast<std::uint8_t>(d4_inverse(v.d4)), v.negate, static_cast<std::uint8_t>(color_inverse(v.color))};
}

PieceVariant rotation(int turns) { return {static_cast<std::uint8_t>(d4_code(turns, false)), false, 0}; }

// Side k faces right after k clockwise turns.
constexpr std::array<std::array<int, 2>, 4> kSideDir{{{1, 0}, {0, -1}, {-1, 0}, {0, 1}}};

int side_of(int dx, int dy) {
  for (int s = 0; s < 4; ++s) {
    if (kSideDir[static_cast<std::size_t>(s)][0] == dx && kSideDir[static_cast<std::size_t>(s)][1] == dy) return s;
  }
  throw Error("not a unit direction");
}

using RowMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// The seam cost only sees differences across the seam, so centring the
// samples leaves it unchanged and keeps single-precision products accurate
// enough for ranking.
detail::EdgeModel centred(detail::EdgeModel e) {
  for (auto& v : e.boundary) v -= 128.0;
  return e;
}

struct Candidate {
  double cost;
  std::uint32_t piece;
  std::uint16_t u;
};

struct Entry {
  double cost;
  std::uint32_t piece;
  int variant;
  int x;
  int y;
  int evaluated;
  bool operator>(const Entry& o) const {
    if (cost != o.cost) return cost > o.cost;
    if (piece != o.piece) return piece > o.piece;
    if (variant != o.variant) return variant > o.variant;
    if (x != o.x) return x > o.x;
    return y > o.y;
  }
};

class Solver {
 public:
  Solver(std::span<const RasterImage> pieces, const BlockGeometry& grid, const SolverOptions& opt)
      : pieces_(pieces), grid_(grid), opt_(opt), n_(pieces.size()) {
    channels_ = pieces_[0].channels();
    build_variant_sets();
    build_edges();
    build_candidates();
  }

  SolverOutput run();

 private:
  void build_variant_sets();
  void build_edges();
  void build_candidates();
  // Best matches for each row among the pieces in `pool`.
  std::vector<std::vector<Candidate>> top_candidates(const std::vector<std::size_t>& rows,
                                                     const std::vector<std::uint32_t>& pool) const;

  double direct_cost(std::size_t neighbor, int neighbor_variant, int dx, int dy, std::size_t piece,
                     int variant) const;

  bool occupied(int x, int y) const { return cell(x, y) >= 0; }
  std::int32_t& cell(int x, int y) { return cells_[index(x, y)]; }
  std::int32_t cell(int x, int y) const { return cells_[index(x, y)]; }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y + span_) * static_cast<std::size_t>(2 * span_ + 1) +
           static_cast<std::size_t>(x + span_);
  }
  bool in_range(int x, int y) const { return std::abs(x) <= span_ && std::abs(y) <= span_; }
  bool fits(int x, int y) const;
  void place(std::size_t piece, int variant, int x, int y);
  std::array<int, 2> target_of(std::size_t piece, int side) const;
  void push_side(std::size_t piece, int side);
  void push_neighbors_of(std::size_t piece);
  double mean_cost(std::size_t piece, int variant, int x, int y, int& count) const;
  bool refill();
  void grow();
  void trim();

  std::span<const RasterImage> pieces_;
  BlockGeometry grid_;
  SolverOptions opt_;
  std::size_t n_;
  int channels_ = 1;

  std::vector<int> u_;               // column variant indices
  std::vector<int> uidx_of_;         // variant index -> position in u_, or -1
  std::vector<char> allowed_;        // side x u
  std::array<bool, 4> all_allowed_{};
  std::vector<detail::EdgeModel> row_edges_;  // piece * 4 + side
  std::vector<detail::EdgeModel> col_edges_;  // piece * |U| + u
  RowMatrix row_f_;
  RowMatrix col_f_;
  std::vector<std::vector<Candidate>> candidates_;  // per row

  int span_ = 0;
  std::vector<std::int32_t> cells_;
  enum class Phase { Bounded, Free, Window } phase_ = Phase::Bounded;
  std::array<int, 4> window_{};  // x0, y0, w, h
  std::vector<bool> placed_;
  std::vector<int> variant_of_;
  std::vector<std::array<int, 2>> pos_of_;
  int min_x_ = 0, max_x_ = 0, min_y_ = 0, max_y_ = 0;
  std::size_t placed_count_ = 0;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap_;
};

void Solver::build_variant_sets() {
  const bool any_d4 = opt_.mode != SolverMode::PermutationOnly;
  const bool extended = opt_.mode == SolverMode::Extended;
  uidx_of_.assign(kVariantSlots, -1);
  for (int i = 0; i < kVariantSlots; ++i) {
    const PieceVariant v = variant_at(i);
    if (!any_d4 && d4_flipped(v.d4)) continue;
    if (!extended && (v.negate || v.color != 0)) continue;
    if (channels_ == 1 && v.color != 0) continue;
    uidx_of_[static_cast<std::size_t>(i)] = static_cast<int>(u_.size());
    u_.push_back(i);
  }
  allowed_.assign(4 * u_.size(), 0);
  for (int s = 0; s < 4; ++s) {
    const PieceVariant undo = inverse(rotation(s));
    for (std::size_t j = 0; j < u_.size(); ++j) {
      const PieceVariant w = compose(undo, variant_at(u_[j]));
      const bool ok = opt_.mode == SolverMode::PermutationOnly ? w == PieceVariant{} : true;
      allowed_[static_cast<std::size_t>(s) * u_.size() + j] = ok;
    }
    all_allowed_[static_cast<std::size_t>(s)] =
        std::all_of(allowed_.begin() + s * static_cast<long>(u_.size()),
                    allowed_.begin() + (s + 1) * static_cast<long>(u_.size()), [](char v) { return v != 0; });
  }
}

void Solver::build_edges() {
  const std::size_t nu = u_.size();
  row_edges_.reserve(n_ * 4);
  col_edges_.reserve(n_ * nu);
  for (std::size_t p = 0; p < n_; ++p) {
    for (int s = 0; s < 4; ++s) row_edges_.push_back(detail::right_edge(apply_d4(pieces_[p], d4_code(s, false))));
    for (std::size_t j = 0; j < nu; ++j) col_edges_.push_back(detail::left_edge(apply_variant(pieces_[p], variant_at(u_[j]))));
  }
  double c = 0;
  const auto d = static_cast<Eigen::Index>(detail::row_features(row_edges_[0], c).size());
  // Two extra columns carry the per-side constants: [f, c, 1] . [g, 1, c'].
  row_f_.resize(static_cast<Eigen::Index>(row_edges_.size()), d + 2);
  for (std::size_t r = 0; r < row_edges_.size(); ++r) {
    const auto f = detail::row_features(centred(row_edges_[r]), c);
    auto row = row_f_.row(static_cast<Eigen::Index>(r));
    row.head(d) = Eigen::Map<const Eigen::RowVectorXd>(f.data(), d).cast<float>();
    row[d] = static_cast<float>(c);
    row[d + 1] = 1.0f;
  }
  col_f_.resize(static_cast<Eigen::Index>(col_edges_.size()), d + 2);
  for (std::size_t q = 0; q < col_edges_.size(); ++q) {
    const auto f = detail::col_features(centred(col_edges_[q]), c);
    auto col = col_f_.row(static_cast<Eigen::Index>(q));
    col.head(d) = Eigen::Map<const Eigen::RowVectorXd>(f.data(), d).cast<float>();
    col[d] = 1.0f;
    col[d + 1] = static_cast<float>(c);
  }
}

std::vector<std::vector<Candidate>> Solver::top_candidates(const std::vector<std::size_t>& rows,
                                                           const std::vector<std::uint32_t>& pool) const {
  const auto keep = static_cast<std::size_t>(std::max(1, opt_.candidates_per_side));
  const std::size_t nu = u_.size();
  // Equal costs are broken by a per-row hash so flat regions do not send
  // every frontier side after the same few pieces.
  std::uint32_t salt = 0;
  const auto tie = [&salt](const Candidate& c) { return (c.piece * 0x9E3779B1u) ^ salt; };
  const auto worse = [&tie](const Candidate& a, const Candidate& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    if (a.piece != b.piece) return tie(a) < tie(b);
    return a.u < b.u;
  };
  const auto d = row_f_.cols();
  RowMatrix cols(static_cast<Eigen::Index>(pool.size() * nu), d);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    cols.middleRows(static_cast<Eigen::Index>(i * nu), static_cast<Eigen::Index>(nu)) =
        col_f_.middleRows(static_cast<Eigen::Index>(pool[i] * nu), static_cast<Eigen::Index>(nu));
  }

  std::vector<std::vector<Candidate>> out(rows.size());
  constexpr std::size_t kChunk = 64;
  constexpr float kExcluded = std::numeric_limits<float>::infinity();
  RowMatrix block;
  RowMatrix costs;
  for (std::size_t r0 = 0; r0 < rows.size(); r0 += kChunk) {
    const std::size_t count = std::min(kChunk, rows.size() - r0);
    block.resize(static_cast<Eigen::Index>(count), d);
    for (std::size_t i = 0; i < count; ++i) {
      block.row(static_cast<Eigen::Index>(i)) = row_f_.row(static_cast<Eigen::Index>(rows[r0 + i]));
    }
    costs.noalias() = block * cols.transpose();
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t row = rows[r0 + i];
      salt = static_cast<std::uint32_t>(row) * 0x85EBCA77u;
      const std::size_t self = row / 4;
      const int side = static_cast<int>(row % 4);
      float* line = costs.row(static_cast<Eigen::Index>(i)).data();
      const std::size_t mask_at = static_cast<std::size_t>(side) * nu;
      if (!all_allowed_[static_cast<std::size_t>(side)]) {
        for (std::size_t pi = 0; pi < pool.size(); ++pi) {
          for (std::size_t j = 0; j < nu; ++j) {
            if (!allowed_[mask_at + j]) line[pi * nu + j] = kExcluded;
          }
        }
      }
      const auto self_at = std::lower_bound(pool.begin(), pool.end(), static_cast<std::uint32_t>(self));
      if (self_at != pool.end() && *self_at == self) {
        const auto pi = static_cast<std::size_t>(self_at - pool.begin());
        std::fill_n(line + pi * nu, nu, kExcluded);
      }
      auto& heap = out[r0 + i];
      heap.reserve(keep);
      float threshold = kExcluded;
      // One entry per piece: its best variant for this side.
      for (std::size_t pi = 0; pi < pool.size(); ++pi) {
        const float* variants = line + pi * nu;
        const auto best = static_cast<std::size_t>(std::min_element(variants, variants + nu) - variants);
        const float cost = variants[best];
        if (!(cost < threshold) && heap.size() == keep) continue;
        if (cost == kExcluded) continue;
        const Candidate cand{cost, pool[pi], static_cast<std::uint16_t>(best)};
        if (heap.size() < keep) {
          heap.push_back(cand);
          std::push_heap(heap.begin(), heap.end(), worse);
        } else if (worse(cand, heap.front())) {
          std::pop_heap(heap.begin(), heap.end(), worse);
          heap.back() = cand;
          std::push_heap(heap.begin(), heap.end(), worse);
        }
        if (heap.size() == keep) threshold = static_cast<float>(heap.front().cost);
      }
      // Rank was approximate; keep exact costs for the greedy stage.
      for (auto& cand : heap) {
        cand.cost = detail::seam_cost(row_edges_[row], col_edges_[cand.piece * nu + cand.u]);
      }
      std::sort(heap.begin(), heap.end(), worse);
    }
  }
  return out;
}

void Solver::build_candidates() {
  std::vector<std::size_t> rows(n_ * 4);
  for (std::size_t r = 0; r < rows.size(); ++r) rows[r] = r;
  std::vector<std::uint32_t> pool(n_);
  for (std::size_t p = 0; p < n_; ++p) pool[p] = static_cast<std::uint32_t>(p);
  candidates_ = top_candidates(rows, pool);
}

double Solver::direct_cost(std::size_t neighbor, int neighbor_variant, int dx, int dy, std::size_t piece,
                           int variant) const {
  const PieceVariant a = variant_at(neighbor_variant);
  const auto local = d4_map_direction(d4_inverse(a.d4), dx, dy);
  const int s = side_of(local[0], local[1]);
  const PieceVariant u = compose(rotation(s), compose(inverse(a), variant_at(variant)));
  const int j = uidx_of_[static_cast<std::size_t>(variant_index(u))];
  if (j < 0) return std::numeric_limits<double>::infinity();
  return detail::seam_cost(row_edges_[neighbor * 4 + static_cast<std::size_t>(s)],
                           col_edges_[piece * u_.size() + static_cast<std::size_t>(j)]);
}

bool Solver::fits(int x, int y) const {
  if (!in_range(x, y)) return false;
  if (phase_ == Phase::Free) return true;
  if (phase_ == Phase::Window) {
    return x >= window_[0] && x < window_[0] + window_[2] && y >= window_[1] && y < window_[1] + window_[3];
  }
  const int w = std::max(max_x_, x) - std::min(min_x_, x) + 1;
  const int h = std::max(max_y_, y) - std::min(min_y_, y) + 1;
  if (w <= grid_.cols && h <= grid_.rows) return true;
  // A transposed layout is only recoverable when pieces may turn.
  return opt_.mode != SolverMode::PermutationOnly && w <= grid_.rows && h <= grid_.cols;
}

void Solver::place(std::size_t piece, int variant, int x, int y) {
  cell(x, y) = static_cast<std::int32_t>(piece);
  placed_[piece] = true;
  variant_of_[piece] = variant;
  pos_of_[piece] = {x, y};
  if (placed_count_ == 0) {
    min_x_ = max_x_ = x;
    min_y_ = max_y_ = y;
  } else {
    min_x_ = std::min(min_x_, x);
    max_x_ = std::max(max_x_, x);
    min_y_ = std::min(min_y_, y);
    max_y_ = std::max(max_y_, y);
  }
  ++placed_count_;
}

std::array<int, 2> Solver::target_of(std::size_t piece, int side) const {
  const PieceVariant a = variant_at(variant_of_[piece]);
  const auto& d = kSideDir[static_cast<std::size_t>(side)];
  const auto dir = d4_map_direction(a.d4, d[0], d[1]);
  return {pos_of_[piece][0] + dir[0], pos_of_[piece][1] + dir[1]};
}

void Solver::push_side(std::size_t piece, int side) {
  const auto [tx, ty] = target_of(piece, side);
  if (!fits(tx, ty) || occupied(tx, ty)) return;
  const PieceVariant lead = compose(variant_at(variant_of_[piece]), inverse(rotation(side)));
  for (const auto& c : candidates_[piece * 4 + static_cast<std::size_t>(side)]) {
    if (placed_[c.piece]) continue;
    const int b = variant_index(compose(lead, variant_at(u_[c.u])));
    heap_.push({c.cost, c.piece, b, tx, ty, 1});
  }
}

void Solver::push_neighbors_of(std::size_t piece) {
  for (int s = 0; s < 4; ++s) push_side(piece, s);
}

double Solver::mean_cost(std::size_t piece, int variant, int x, int y, int& count) const {
  double total = 0;
  count = 0;
  for (const auto& d : kSideDir) {
    const int nx = x + d[0];
    const int ny = y + d[1];
    if (!in_range(nx, ny) || !occupied(nx, ny)) continue;
    const auto neighbor = static_cast<std::size_t>(cell(nx, ny));
    total += direct_cost(neighbor, variant_of_[neighbor], -d[0], -d[1], piece, variant);
    ++count;
  }
  return count == 0 ? std::numeric_limits<double>::infinity() : total / count;
}

bool Solver::refill() {
  std::vector<std::size_t> rows;
  std::vector<std::uint32_t> pool;
  for (std::size_t p = 0; p < n_; ++p) {
    if (!placed_[p]) {
      pool.push_back(static_cast<std::uint32_t>(p));
      continue;
    }
    for (int s = 0; s < 4; ++s) {
      const auto [tx, ty] = target_of(p, s);
      if (fits(tx, ty) && !occupied(tx, ty)) rows.push_back(p * 4 + static_cast<std::size_t>(s));
    }
  }
  if (rows.empty() || pool.empty()) return false;
  const auto fresh = top_candidates(rows, pool);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    candidates_[rows[i]] = fresh[i];
    push_side(rows[i] / 4, static_cast<int>(rows[i] % 4));
  }
  return !heap_.empty();
}

void Solver::grow() {
  while (placed_count_ < n_) {
    if (heap_.empty() && !refill()) {
      // No scored move left; drop the lowest unplaced piece on any free
      // frontier cell.
      std::size_t piece = 0;
      while (placed_[piece]) ++piece;
      bool done = false;
      for (int y = min_y_ - 1; y <= max_y_ + 1 && !done; ++y) {
        for (int x = min_x_ - 1; x <= max_x_ + 1 && !done; ++x) {
          if (!fits(x, y) || occupied(x, y)) continue;
          int count = 0;
          mean_cost(piece, 0, x, y, count);
          if (count == 0) continue;
          place(piece, 0, x, y);
          push_neighbors_of(piece);
          done = true;
        }
      }
      if (!done) throw Error("solver could not extend the assembly");
      continue;
    }
    const Entry e = heap_.top();
    heap_.pop();
    if (placed_[e.piece] || !fits(e.x, e.y) || occupied(e.x, e.y)) continue;
    int count = 0;
    const double cost = mean_cost(e.piece, e.variant, e.x, e.y, count);
    if (count > e.evaluated) {
      heap_.push({cost, e.piece, e.variant, e.x, e.y, count});
      continue;
    }
    place(e.piece, e.variant, e.x, e.y);
    push_neighbors_of(e.piece);
  }
}

// Keeps the grid-sized window holding the most pieces and frees the rest.
void Solver::trim() {
  const int bw = max_x_ - min_x_ + 1;
  const int bh = max_y_ - min_y_ + 1;
  std::vector<int> sum(static_cast<std::size_t>((bw + 1) * (bh + 1)), 0);
  const auto at = [&](int x, int y) -> int& { return sum[static_cast<std::size_t>(y * (bw + 1) + x)]; };
  for (int y = 0; y < bh; ++y) {
    for (int x = 0; x < bw; ++x) {
      at(x + 1, y + 1) = at(x, y + 1) + at(x + 1, y) - at(x, y) + (occupied(min_x_ + x, min_y_ + y) ? 1 : 0);
    }
  }
  const auto count_in = [&](int x0, int y0, int w, int h) {
    const int ax = std::clamp(x0, 0, bw), ay = std::clamp(y0, 0, bh);
    const int bx = std::clamp(x0 + w, 0, bw), by = std::clamp(y0 + h, 0, bh);
    return at(bx, by) - at(ax, by) - at(bx, ay) + at(ax, ay);
  };
  std::vector<std::array<int, 2>> shapes{{grid_.cols, grid_.rows}};
  if (opt_.mode != SolverMode::PermutationOnly && grid_.cols != grid_.rows) shapes.push_back({grid_.rows, grid_.cols});
  int best = -1;
  for (const auto& [w, h] : shapes) {
    for (int y0 = std::min(0, bh - h); y0 <= std::max(0, bh - h); ++y0) {
      for (int x0 = std::min(0, bw - w); x0 <= std::max(0, bw - w); ++x0) {
        const int c = count_in(x0, y0, w, h);
        if (c > best) {
          best = c;
          window_ = {min_x_ + x0, min_y_ + y0, w, h};
        }
      }
    }
  }
  for (std::size_t p = 0; p < n_; ++p) {
    if (!placed_[p]) continue;
    const auto [x, y] = pos_of_[p];
    if (x >= window_[0] && x < window_[0] + window_[2] && y >= window_[1] && y < window_[1] + window_[3]) continue;
    cell(x, y) = -1;
    placed_[p] = false;
    --placed_count_;
  }
  phase_ = Phase::Window;
  min_x_ = window_[0];
  min_y_ = window_[1];
  max_x_ = window_[0] + window_[2] - 1;
  max_y_ = window_[1] + window_[3] - 1;
  heap_ = {};
  for (std::size_t p = 0; p < n_; ++p) {
    if (placed_[p]) push_neighbors_of(p);
  }
}

SolverOutput Solver::run() {
  const bool trimmed = opt_.strategy == SolverStrategy::GrowTrimFill;
  phase_ = trimmed ? Phase::Free : Phase::Bounded;
  span_ = trimmed ? static_cast<int>(n_) : std::max(grid_.cols, grid_.rows);
  cells_.assign(static_cast<std::size_t>(2 * span_ + 1) * static_cast<std::size_t>(2 * span_ + 1), -1);
  placed_.assign(n_, false);
  variant_of_.assign(n_, 0);
  pos_of_.assign(n_, {0, 0});

  if (n_ > 1) {
    // Seed with the single most confident pair.
    std::size_t best_row = 0;
    const Candidate* best = nullptr;
    for (std::size_t r = 0; r < candidates_.size(); ++r) {
      if (candidates_[r].empty()) continue;
      const Candidate& c = candidates_[r].front();
      if (best == nullptr || c.cost < best->cost) {
        best = &c;
        best_row = r;
      }
    }
    place(best_row / 4, 0, 0, 0);
    push_neighbors_of(best_row / 4);
  } else {
    place(0, 0, 0, 0);
  }
  grow();
  if (trimmed) {
    trim();
    grow();
  }

  const int w = max_x_ - min_x_ + 1;
  const int h = max_y_ - min_y_ + 1;
  const bool turn = !(w == grid_.cols && h == grid_.rows);
  if (turn && !(w == grid_.rows && h == grid_.cols)) throw Error("assembly does not match grid shape");

  SolverOutput out;
  out.assembly.grid = grid_;
  out.assembly.has_orientation = opt_.mode != SolverMode::PermutationOnly;
  out.assembly.placement.resize(n_);
  out.variants.resize(n_);
  for (std::size_t p = 0; p < n_; ++p) {
    int x = pos_of_[p][0] - min_x_;
    int y = pos_of_[p][1] - min_y_;
    PieceVariant v = variant_at(variant_of_[p]);
    if (turn) {
      // Quarter turn clockwise of the whole assembly.
      const int nx = h - 1 - y;
      y = x;
      x = nx;
      v = compose(rotation(1), v);
    }
    const auto cellidx = static_cast<std::size_t>(y * grid_.cols + x);
    out.assembly.placement[cellidx] = {static_cast<std::uint32_t>(p), v.d4};
    out.variants[cellidx] = v;
  }
  return out;
}

}  // namespace

SolverOutput greedy_assemble(std::span<const RasterImage> pieces, const BlockGeometry& grid,
                             const SolverOptions& options) {
  if (pieces.empty()) throw InvalidGeometry("no pieces to assemble");
  if (pieces.size() != grid.n) throw GeometryMismatch("piece count differs from grid size");
  const auto& first = pieces.front();
  if (first.width() != first.height()) throw InvalidGeometry("solver needs square pieces");
  for (const auto& p : pieces) {
    if (p.width() != first.width() || p.height() != first.height() || p.channels() != first.channels()) {
      throw GeometryMismatch("pieces differ in shape");
    }
  }
  return Solver(pieces, grid, options).run();
}

RasterImage render_assembly(std::span<const RasterImage> pieces, const SolverOutput& solved) {
  std::vector<RasterImage> blocks;
  blocks.reserve(solved.assembly.placement.size());
  for (std::size_t cell = 0; cell < solved.assembly.placement.size(); ++cell) {
    blocks.push_back(apply_variant(pieces[solved.assembly.placement[cell].piece], solved.variants[cell]));
  }
  return assemble_blocks(blocks, solved.assembly.grid);
}

}  // namespace scramble
