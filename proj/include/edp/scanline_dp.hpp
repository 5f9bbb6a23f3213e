#pragma once

// Exact dynamic programming on a single scanline: the forward recursion
// S(x + 1, .) = C(x + 1, .) + M(S(x, .)) with backtracking, and the
// bidirectional variant whose per-vertex marginals combine a left-to-right
// and a right-to-left sweep. Sums outside the line are taken as zero.

#include <vector>

#include "edp/grid_model.hpp"
#include "edp/minplus.hpp"

namespace edp {

struct ScanlineProblem {
  LabelSpace labels;
  /// costs[x * Q + v], x in [0, length).
  std::vector<Cost> costs;
  SmoothnessModel model;
  /// Weight of edge (x, x + 1); empty means all ones.
  std::vector<int> edge_weights;

  int length() const { return int(costs.size() / std::size_t(labels.size())); }
  int weight(int x) const { return edge_weights.empty() ? 1 : edge_weights[x]; }

  std::span<const Cost> slice(int x) const {
    return {costs.data() + std::size_t(x) * labels.size(), std::size_t(labels.size())};
  }

  void validate() const {
    model.validate();
    if (costs.empty() || costs.size() % std::size_t(labels.size()) != 0)
      throw InputError("scanline costs must hold a whole number (>= 1) of label slices");
    if (!edge_weights.empty() && int(edge_weights.size()) != length() - 1)
      throw InputError("scanline needs one weight per edge");
  }

  /// The line as a width x 1 cost volume, for energy evaluation.
  CostVolume as_volume() const {
    Cost c_max = 1;
    for (Cost c : costs) c_max = std::max(c_max, c);
    auto vol = CostVolume::from_values(length(), 1, labels, c_max, costs);
    return vol;
  }

  SmoothnessModel volume_model() const {
    SmoothnessModel m{model.l1, model.g, model.lambda, {}};
    if (!edge_weights.empty()) {
      m.weights = EdgeWeights(length(), 1);
      for (int x = 0; x + 1 < length(); ++x) m.weights.set_horizontal(x, 0, std::uint8_t(edge_weights[x]));
    }
    return m;
  }
};

/// Per-vertex predecessor labels from the forward pass (entry 0 unused, 0).
using BacktrackTable = std::vector<Label>;

struct ForwardResult {
  Label labels = 1;
  std::vector<Energy> sums;  ///< S(x, v) at sums[x * Q + v]
  BacktrackTable predecessors;

  int length() const { return int(sums.size() / std::size_t(labels)); }
  std::span<const Energy> slice(int x) const {
    return {sums.data() + std::size_t(x) * labels, std::size_t(labels)};
  }
};

struct PathSolution {
  std::vector<Label> path;
  Energy energy = 0;
};

inline ForwardResult forward_pass(const ScanlineProblem& problem,
                                  MinPlusOperator op = MinPlusOperator::sfms,
                                  double window_scale = 1.0) {
  problem.validate();
  const auto q = std::size_t(problem.labels.size());
  const int n = problem.length();
  const SmoothnessModel& m = problem.model;
  MinPlusKernel<> kernel(problem.labels, m.l1, m.g, op, window_scale);
  const LabelDistance dist(problem.labels, m.l1, m.g);

  ForwardResult res;
  res.labels = Label(q);
  res.sums.resize(q * n);
  res.predecessors.assign(q * n, 0);
  for (std::size_t v = 0; v < q; ++v) res.sums[v] = problem.costs[v];

  std::vector<Energy> msg(q);
  for (int x = 1; x < n; ++x) {
    const Energy wl = Energy(problem.weight(x - 1)) * m.lambda;
    std::span<const Energy> prev(res.sums.data() + (x - 1) * q, q);
    kernel.apply(prev, msg, wl);
    const SliceMin smin = kernel.last_min();
    for (std::size_t v = 0; v < q; ++v) {
      res.sums[x * q + v] = problem.costs[x * q + v] + msg[v];
      res.predecessors[x * q + v] =
          find_predecessor(prev, problem.labels, dist, m.g, wl, m.truncation(), Label(v), msg[v], smin);
    }
  }
  return res;
}

/// Recovers the optimal path from the last column back to the first.
inline PathSolution backtrack(const ForwardResult& fwd) {
  const int n = fwd.length();
  PathSolution sol;
  sol.path.resize(n);
  const SliceMin last = slice_min(fwd.slice(n - 1));
  sol.energy = last.value;
  Label v = last.label;
  for (int x = n - 1; x >= 0; --x) {
    sol.path[x] = v;
    if (x > 0) v = fwd.predecessors[std::size_t(x) * fwd.labels + v];
  }
  return sol;
}

/// S_Omega(x, v) = M(S_fwd(x - 1))(v) + C(x, v) + M(S_bwd(x + 1))(v).
inline std::vector<Energy> bidirectional_marginals(const ScanlineProblem& problem,
                                                   MinPlusOperator op = MinPlusOperator::sfms,
                                                   double window_scale = 1.0) {
  problem.validate();
  const auto q = std::size_t(problem.labels.size());
  const int n = problem.length();
  const SmoothnessModel& m = problem.model;
  MinPlusKernel<> kernel(problem.labels, m.l1, m.g, op, window_scale);

  // into_fwd[x] = M(S_fwd(x - 1)), into_bwd[x] = M(S_bwd(x + 1)); zero at the ends.
  std::vector<Energy> into_fwd(q * n, 0), into_bwd(q * n, 0), run(q), msg(q);
  for (std::size_t v = 0; v < q; ++v) run[v] = problem.costs[v];
  for (int x = 1; x < n; ++x) {
    kernel.apply(run, msg, Energy(problem.weight(x - 1)) * m.lambda);
    for (std::size_t v = 0; v < q; ++v) {
      into_fwd[x * q + v] = msg[v];
      run[v] = problem.costs[x * q + v] + msg[v];
    }
  }
  for (std::size_t v = 0; v < q; ++v) run[v] = problem.costs[(n - 1) * q + v];
  for (int x = n - 2; x >= 0; --x) {
    kernel.apply(run, msg, Energy(problem.weight(x)) * m.lambda);
    for (std::size_t v = 0; v < q; ++v) {
      into_bwd[x * q + v] = msg[v];
      run[v] = problem.costs[x * q + v] + msg[v];
    }
  }
  std::vector<Energy> marginals(q * n);
  for (std::size_t i = 0; i < marginals.size(); ++i)
    marginals[i] = into_fwd[i] + problem.costs[i] + into_bwd[i];
  return marginals;
}

/// Per-vertex argmin of the marginals, lowest label on ties.
inline std::vector<Label> marginal_argmin_solution(std::span<const Energy> marginals, Label labels) {
  const std::size_t n = marginals.size() / std::size_t(labels);
  std::vector<Label> out(n);
  for (std::size_t x = 0; x < n; ++x) out[x] = slice_min(marginals.subspan(x * labels, labels)).label;
  return out;
}

/// Energy of a path under the problem's model.
inline Energy path_energy(const ScanlineProblem& problem, std::span<const Label> path) {
  DisparityField f(problem.length(), 1);
  f.labels.assign(path.begin(), path.end());
  return evaluate_energy(problem.as_volume(), problem.volume_model(), f).total();
}

/// Scanline optimization of a whole image: every row is an independent
/// chain using the horizontal edge weights; vertical smoothness is ignored.
inline DisparityField solve_scanlines(const CostVolume& volume, const SmoothnessModel& model,
                                      MinPlusOperator op = MinPlusOperator::sfms,
                                      double window_scale = 1.0) {
  DisparityField field(volume.width(), volume.height());
  const auto q = std::size_t(volume.labels());
  for (int y = 0; y < volume.height(); ++y) {
    ScanlineProblem row{volume.space(), {}, {model.l1, model.g, model.lambda, {}}, {}};
    row.costs.reserve(q * volume.width());
    for (int x = 0; x < volume.width(); ++x) {
      auto s = volume.slice(x, y);
      row.costs.insert(row.costs.end(), s.begin(), s.end());
    }
    if (!model.weights.empty())
      for (int x = 0; x + 1 < volume.width(); ++x) row.edge_weights.push_back(model.weights.horizontal(x, y));
    const PathSolution sol = backtrack(forward_pass(row, op, window_scale));
    for (int x = 0; x < volume.width(); ++x) field.at(x, y) = sol.path[x];
  }
  return field;
}

}  // namespace edp
