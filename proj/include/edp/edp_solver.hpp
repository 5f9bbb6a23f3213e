#pragma once

// Extended dynamic programming on a 2D grid.
//
// Four direction sums S_k(x, v), k in {+x, -x, +y, -y}, each covering the
// half-plane behind direction k, are updated in place under four raster
// scans. With m_k(x) = M(S_k(x_k) / 2) the message from the neighbour x_k
// lying behind direction k:
//
//   S_k'(x)  = C(x) + sum_{k != -k'} m_k(x) - m_{-k'}(x)
//   S_Om(x)  = C(x) + sum_k m_k(x)
//
// Scan P1 (inc x, inc y) updates {+x, +y}, P2 (dec x, inc y) {-x, +y},
// P3 (inc x, dec y) {+x, -y}, P4 (dec x, dec y) {-x, -y}. One iteration is
// P1..P4. Neighbours outside the grid send zero messages.
//
// Arithmetic is fixed point: costs and lambda are multiplied by `scale`
// (default 2) on entry and the 1/2 weight is an arithmetic shift, i.e.
// floor division.

#include <array>
#include <chrono>
#include <vector>

#include "edp/grid_model.hpp"
#include "edp/minplus.hpp"

namespace edp {

enum class Direction : int { pos_x = 0, neg_x = 1, pos_y = 2, neg_y = 3 };

constexpr std::array<Direction, 4> kDirections{Direction::pos_x, Direction::neg_x, Direction::pos_y,
                                               Direction::neg_y};

constexpr Direction opposite(Direction k) noexcept {
  switch (k) {
    case Direction::pos_x: return Direction::neg_x;
    case Direction::neg_x: return Direction::pos_x;
    case Direction::pos_y: return Direction::neg_y;
    case Direction::neg_y: return Direction::pos_y;
  }
  return k;
}

enum class ScanOrder { p1, p2, p3, p4 };

constexpr std::array<ScanOrder, 4> kScanOrders{ScanOrder::p1, ScanOrder::p2, ScanOrder::p3, ScanOrder::p4};

struct ScanPlan {
  bool x_increasing;
  bool y_increasing;
  std::array<Direction, 2> updates;  ///< x-direction first
};

constexpr ScanPlan plan(ScanOrder order) noexcept {
  switch (order) {
    case ScanOrder::p1: return {true, true, {Direction::pos_x, Direction::pos_y}};
    case ScanOrder::p2: return {false, true, {Direction::neg_x, Direction::pos_y}};
    case ScanOrder::p3: return {true, false, {Direction::pos_x, Direction::neg_y}};
    case ScanOrder::p4: return {false, false, {Direction::neg_x, Direction::neg_y}};
  }
  return {true, true, {Direction::pos_x, Direction::pos_y}};
}

/// Neighbour x_k from which direction k's sum flows into (x, y).
struct Neighbor {
  int x, y;
  bool inside;
};

inline Neighbor neighbor(Direction k, int x, int y, int width, int height) noexcept {
  switch (k) {
    case Direction::pos_x: return {x - 1, y, x > 0};
    case Direction::neg_x: return {x + 1, y, x + 1 < width};
    case Direction::pos_y: return {x, y - 1, y > 0};
    case Direction::neg_y: return {x, y + 1, y + 1 < height};
  }
  return {x, y, false};
}

/// Weight of the edge between (x, y) and its neighbour behind direction k.
inline int edge_weight(const EdgeWeights& w, Direction k, int x, int y) {
  switch (k) {
    case Direction::pos_x: return w.horizontal(x - 1, y);
    case Direction::neg_x: return w.horizontal(x, y);
    case Direction::pos_y: return w.vertical(x, y - 1);
    case Direction::neg_y: return w.vertical(x, y);
  }
  return 1;
}

struct DirectionSums {
  int width = 0;
  int height = 0;
  Label labels = 1;
  std::array<std::vector<Energy>, 4> fields;
  int iterations = 0;

  static DirectionSums zeros(int width, int height, Label labels) {
    DirectionSums s;
    s.width = width;
    s.height = height;
    s.labels = labels;
    for (auto& f : s.fields) f.assign(std::size_t(width) * height * labels, 0);
    return s;
  }

  std::span<Energy> slice(Direction k, int x, int y) {
    return {fields[int(k)].data() + offset(x, y), std::size_t(labels)};
  }
  std::span<const Energy> slice(Direction k, int x, int y) const {
    return {fields[int(k)].data() + offset(x, y), std::size_t(labels)};
  }

  friend bool operator==(const DirectionSums&, const DirectionSums&) = default;

 private:
  std::size_t offset(int x, int y) const noexcept {
    return (std::size_t(y) * width + x) * std::size_t(labels);
  }
};

struct EdpOptions {
  MinPlusOperator op = MinPlusOperator::grms;
  double window_scale = 1.0;
  /// Fixed-point factor applied to costs and lambda inside the solver.
  Energy scale = 2;
  /// Subtract each freshly updated slice's minimum (rounded down to even).
  bool renormalize = false;
};

struct TraceEntry {
  int iteration = 0;
  EnergyBreakdown energy;
  double seconds = 0.0;
};

using EnergyTrace = std::vector<TraceEntry>;

class EdpSolver {
 public:
  EdpSolver(const CostVolume& volume, const SmoothnessModel& model, EdpOptions options = {})
      : volume_(volume),
        model_(model),
        options_(options),
        kernel_(volume.space(), model.l1, model.g, options.op, options.window_scale),
        half_(std::size_t(volume.labels())),
        total_(std::size_t(volume.labels())) {
    model_.validate();
    if (options_.scale < 1) throw ConfigError("fixed-point scale must be >= 1");
    const auto& w = model_.weights;
    if (!w.empty() && (w.width() != volume.width() || w.height() != volume.height()))
      throw InputError("edge weights do not match cost volume dimensions");
    for (auto& m : msg_) m.resize(std::size_t(volume.labels()));
  }

  const EdpOptions& options() const noexcept { return options_; }

  void pass(DirectionSums& sums, ScanOrder order) {
    check(sums);
    const ScanPlan p = plan(order);
    const int w = volume_.width(), h = volume_.height();
    const auto q = std::size_t(volume_.labels());
    for (int iy = 0; iy < h; ++iy) {
      const int y = p.y_increasing ? iy : h - 1 - iy;
      for (int ix = 0; ix < w; ++ix) {
        const int x = p.x_increasing ? ix : w - 1 - ix;
        gather(sums, x, y);
        for (Direction k : p.updates) {
          const auto& back = msg_[int(opposite(k))];
          auto out = sums.slice(k, x, y);
          for (std::size_t v = 0; v < q; ++v) out[v] = total_[v] - 2 * back[v];
          if (options_.renormalize) {
            const Energy lo = *std::min_element(out.begin(), out.end());
            const Energy shift = lo - (lo & 1);
            for (auto& s : out) s -= shift;
          }
        }
      }
    }
  }

  void iterate(DirectionSums& sums) {
    for (ScanOrder o : kScanOrders) pass(sums, o);
    ++sums.iterations;
  }

  /// S_Omega(x, v) in scaled units, pixel-major.
  std::vector<Energy> marginals(const DirectionSums& sums) {
    check(sums);
    const auto q = std::size_t(volume_.labels());
    std::vector<Energy> out(volume_.pixels() * q);
    for (int y = 0; y < volume_.height(); ++y)
      for (int x = 0; x < volume_.width(); ++x) {
        gather(sums, x, y);
        std::copy(total_.begin(), total_.end(), out.begin() + (std::size_t(y) * volume_.width() + x) * q);
      }
    return out;
  }

 private:
  void check(const DirectionSums& sums) const {
    if (sums.width != volume_.width() || sums.height != volume_.height() || sums.labels != volume_.labels())
      throw InputError("direction sums do not match cost volume dimensions");
  }

  /// msg_[k] = M(S_k(x_k) / 2), total_ = scale * C + sum of the four messages.
  void gather(const DirectionSums& sums, int x, int y) {
    const auto q = std::size_t(volume_.labels());
    const Energy scaled_lambda = options_.scale * model_.lambda;
    auto c = volume_.slice(x, y);
    for (std::size_t v = 0; v < q; ++v) total_[v] = options_.scale * c[v];
    for (Direction k : kDirections) {
      auto& m = msg_[int(k)];
      const Neighbor n = neighbor(k, x, y, volume_.width(), volume_.height());
      if (!n.inside) {
        std::fill(m.begin(), m.end(), 0);
        continue;
      }
      auto src = sums.slice(k, n.x, n.y);
      for (std::size_t v = 0; v < q; ++v) half_[v] = src[v] >> 1;
      kernel_.apply(half_, m, edge_weight(model_.weights, k, x, y) * scaled_lambda);
      for (std::size_t v = 0; v < q; ++v) total_[v] += m[v];
    }
  }

  const CostVolume& volume_;
  SmoothnessModel model_;
  EdpOptions options_;
  MinPlusKernel<> kernel_;
  std::vector<Energy> half_, total_;
  std::array<std::vector<Energy>, 4> msg_;
};

inline void edp_pass(DirectionSums& sums, const CostVolume& volume, const SmoothnessModel& model,
                     ScanOrder order, EdpOptions options = {}) {
  EdpSolver(volume, model, options).pass(sums, order);
}

inline std::vector<Energy> assemble_marginals(const DirectionSums& sums, const CostVolume& volume,
                                              const SmoothnessModel& model, EdpOptions options = {}) {
  return EdpSolver(volume, model, options).marginals(sums);
}

/// Per-pixel argmin of the marginal field, lowest label on ties.
inline DisparityField extract_solution(std::span<const Energy> marginals, int width, int height,
                                       Label labels) {
  if (marginals.size() != std::size_t(width) * height * labels)
    throw InputError("marginal field has the wrong size");
  DisparityField f(width, height);
  for (std::size_t i = 0; i < f.labels.size(); ++i)
    f.labels[i] = slice_min(marginals.subspan(i * labels, labels)).label;
  return f;
}

struct EdpResult {
  DisparityField field;
  EnergyTrace trace;
  DirectionSums sums;
};

/// Runs `iterations` rounds of P1..P4 and extracts the labeling after each,
/// recording its energy. Tracing does not touch the sums.
inline EdpResult solve(const CostVolume& volume, const SmoothnessModel& model, int iterations,
                       EdpOptions options = {}) {
  if (iterations < 1) throw ConfigError("EDP needs at least one iteration");
  EdpSolver solver(volume, model, options);
  EdpResult res;
  res.sums = DirectionSums::zeros(volume.width(), volume.height(), volume.labels());
  for (int it = 1; it <= iterations; ++it) {
    const auto t0 = std::chrono::steady_clock::now();
    solver.iterate(res.sums);
    const auto t1 = std::chrono::steady_clock::now();
    res.field = extract_solution(solver.marginals(res.sums), volume.width(), volume.height(), volume.labels());
    res.trace.push_back({it, evaluate_energy(volume, model, res.field),
                         std::chrono::duration<double>(t1 - t0).count()});
  }
  return res;
}

}  // namespace edp
