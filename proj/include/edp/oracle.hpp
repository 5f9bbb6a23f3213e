#pragma once

// Brute-force references. Nothing here reuses the kernels, tables or scan
// helpers of the solvers: every quantity is recomputed from label offsets
// with plain loops, so agreement between the two is meaningful.

#include <cstdint>
#include <random>
#include <vector>

#include "edp/edp_solver.hpp"
#include "edp/grid_model.hpp"
#include "edp/scanline_dp.hpp"

namespace edp::oracle {

inline Energy truncated_distance(const LabelSpace& space, Label a, Label b, int l1, int g) {
  const std::vector<int> oa = space.offsets(a);
  const std::vector<int> ob = space.offsets(b);
  Energy d = 0;
  for (std::size_t r = 0; r < oa.size(); ++r) {
    Energy u = oa[r] - ob[r];
    if (u < 0) u = -u;
    Energy p = 1;
    for (int i = 0; i < l1; ++i) p *= u;
    d += p;
  }
  Energy cap = 1;
  for (int i = 0; i < l1; ++i) cap *= g;
  return d < cap ? d : cap;
}

/// Literal Q x Q evaluation of the min-plus message.
inline std::vector<Energy> oracle_minplus(std::span<const Energy> slice, const LabelSpace& space, int l1,
                                          int g, Energy weighted_lambda) {
  const Label q = space.size();
  std::vector<Energy> out(std::size_t(q), 0);
  for (Label to = 0; to < q; ++to) {
    Energy best = 0;
    bool first = true;
    for (Label from = 0; from < q; ++from) {
      const Energy cand = slice[from] + weighted_lambda * truncated_distance(space, from, to, l1, g);
      if (first || cand < best) best = cand;
      first = false;
    }
    out[to] = best;
  }
  return out;
}

struct ChainOptimum {
  Energy minimum = 0;
  /// Every minimizing path, in lexicographic order.
  std::vector<std::vector<Label>> optimal_paths;

  bool unique() const { return optimal_paths.size() == 1; }
};

/// Exhaustive enumeration of all Q^length label paths.
inline ChainOptimum oracle_chain(const ScanlineProblem& problem) {
  problem.validate();
  const int n = problem.length();
  const Label q = problem.labels.size();
  double states = 1;
  for (int i = 0; i < n; ++i) states *= q;
  if (states > 1e6) throw InputError("chain state space exceeds 10^6 paths");

  std::vector<Label> path(n, 0);
  ChainOptimum best;
  bool have = false;
  while (true) {
    Energy e = 0;
    for (int x = 0; x < n; ++x) e += problem.costs[std::size_t(x) * q + path[x]];
    for (int x = 0; x + 1 < n; ++x)
      e += Energy(problem.weight(x)) * problem.model.lambda *
           truncated_distance(problem.labels, path[x], path[x + 1], problem.model.l1, problem.model.g);
    if (!have || e < best.minimum) {
      best.minimum = e;
      best.optimal_paths.clear();
      have = true;
    }
    if (e == best.minimum) best.optimal_paths.push_back(path);

    int x = n - 1;
    while (x >= 0 && path[x] == q - 1) path[x--] = 0;
    if (x < 0) break;
    ++path[x];
  }
  return best;
}

struct TinyInstance {
  CostVolume volume;
  SmoothnessModel model;
  std::uint64_t seed = 0;
};

inline constexpr double kMaxGridStates = 5e7;

struct GridOptimum {
  Energy minimum = 0;
  DisparityField field;  ///< first minimizer in enumeration order (pixel 0 fastest)
};

/// Exhaustive minimization over all Q^N labelings of a tiny grid, with an
/// incremental energy update per changed pixel.
inline GridOptimum oracle_grid(const TinyInstance& inst) {
  const CostVolume& vol = inst.volume;
  const SmoothnessModel& m = inst.model;
  const int w = vol.width(), h = vol.height();
  const int n = w * h;
  const Label q = vol.labels();
  double states = 1;
  for (int i = 0; i < n; ++i) states *= q;
  if (states > kMaxGridStates) throw InputError("grid state space exceeds 5*10^7 labelings");

  std::vector<Energy> pen(std::size_t(q) * q);
  for (Label a = 0; a < q; ++a)
    for (Label b = 0; b < q; ++b)
      pen[std::size_t(a) * q + b] = m.lambda * truncated_distance(vol.space(), a, b, m.l1, m.g);

  std::vector<Label> lab(n, 0);
  auto local = [&](int p, Label l) {
    const int x = p % w, y = p / w;
    Energy e = vol.at(x, y, l);
    if (x > 0) e += m.weights.horizontal(x - 1, y) * pen[std::size_t(l) * q + lab[p - 1]];
    if (x + 1 < w) e += m.weights.horizontal(x, y) * pen[std::size_t(l) * q + lab[p + 1]];
    if (y > 0) e += m.weights.vertical(x, y - 1) * pen[std::size_t(l) * q + lab[p - w]];
    if (y + 1 < h) e += m.weights.vertical(x, y) * pen[std::size_t(l) * q + lab[p + w]];
    return e;
  };
  auto relabel = [&](int p, Label l, Energy& e) {
    e += local(p, l) - local(p, lab[p]);
    lab[p] = l;
  };

  // energy of the all-zero labeling
  Energy e = 0;
  for (int p = 0; p < n; ++p) {
    const int x = p % w, y = p / w;
    e += vol.at(x, y, 0);
    if (x + 1 < w) e += m.weights.horizontal(x, y) * pen[0];
    if (y + 1 < h) e += m.weights.vertical(x, y) * pen[0];
  }

  GridOptimum best{e, DisparityField(w, h)};
  best.field.labels = lab;
  while (true) {
    int p = 0;
    while (p < n && lab[p] == q - 1) relabel(p++, 0, e);
    if (p == n) break;
    relabel(p, lab[p] + 1, e);
    if (e < best.minimum) {
      best.minimum = e;
      best.field.labels = lab;
    }
  }
  return best;
}

/// Straight transliteration of one EDP scan: for every vertex in scan order
/// and each updated direction k',
///   S_k'(x) = scale*C(x) + sum_{k != -k'} M(floor(S_k(x_k) / 2)) - M(floor(S_-k'(x_-k') / 2))
/// reading whatever is currently stored (in-place recursion).
inline DirectionSums oracle_edp_step(DirectionSums sums, const CostVolume& volume,
                                     const SmoothnessModel& model, ScanOrder order, Energy scale = 2) {
  const int w = volume.width(), h = volume.height();
  const LabelSpace& space = volume.space();
  const Label q = space.size();

  // direction index: 0 = +x, 1 = -x, 2 = +y, 3 = -y
  const int dx[4] = {-1, +1, 0, 0};  // neighbour x_k relative to x
  const int dy[4] = {0, 0, -1, +1};
  const int opp[4] = {1, 0, 3, 2};
  bool x_inc = true, y_inc = true;
  int updated[2] = {0, 2};
  switch (order) {
    case ScanOrder::p1: x_inc = true;  y_inc = true;  updated[0] = 0; updated[1] = 2; break;
    case ScanOrder::p2: x_inc = false; y_inc = true;  updated[0] = 1; updated[1] = 2; break;
    case ScanOrder::p3: x_inc = true;  y_inc = false; updated[0] = 0; updated[1] = 3; break;
    case ScanOrder::p4: x_inc = false; y_inc = false; updated[0] = 1; updated[1] = 3; break;
  }

  auto message = [&](int k, int x, int y) {
    const int nx = x + dx[k], ny = y + dy[k];
    std::vector<Energy> zero(std::size_t(q), 0);
    if (nx < 0 || ny < 0 || nx >= w || ny >= h) return zero;
    int weight = 1;
    if (k == 0) weight = model.weights.horizontal(nx, ny);
    if (k == 1) weight = model.weights.horizontal(x, y);
    if (k == 2) weight = model.weights.vertical(nx, ny);
    if (k == 3) weight = model.weights.vertical(x, y);
    std::vector<Energy> halved(static_cast<std::size_t>(q));
    const std::vector<Energy>& field = sums.fields[k];
    for (Label v = 0; v < q; ++v) {
      const Energy s = field[(std::size_t(ny) * w + nx) * q + v];
      Energy r = s / 2;
      if (s % 2 != 0 && s < 0) r -= 1;
      halved[v] = r;
    }
    return oracle_minplus(halved, space, model.l1, model.g, Energy(weight) * scale * model.lambda);
  };

  for (int j = 0; j < h; ++j) {
    const int y = y_inc ? j : h - 1 - j;
    for (int i = 0; i < w; ++i) {
      const int x = x_inc ? i : w - 1 - i;
      for (int kp : updated) {
        std::vector<Energy> value(static_cast<std::size_t>(q));
        for (Label v = 0; v < q; ++v) value[v] = scale * volume.at(x, y, v);
        for (int k = 0; k < 4; ++k) {
          if (k == opp[kp]) continue;
          const auto msg = message(k, x, y);
          for (Label v = 0; v < q; ++v) value[v] += msg[v];
        }
        const auto back = message(opp[kp], x, y);
        for (Label v = 0; v < q; ++v) value[v] -= back[v];
        for (Label v = 0; v < q; ++v) sums.fields[kp][(std::size_t(y) * w + x) * q + v] = value[v];
      }
    }
  }
  return sums;
}

/// Literal marginal assembly: scale*C(x) + sum_k M(floor(S_k(x_k) / 2)).
inline std::vector<Energy> oracle_marginals(const DirectionSums& sums, const CostVolume& volume,
                                            const SmoothnessModel& model, Energy scale = 2) {
  const int w = volume.width(), h = volume.height();
  const Label q = volume.labels();
  const int dx[4] = {-1, +1, 0, 0};
  const int dy[4] = {0, 0, -1, +1};
  std::vector<Energy> out(std::size_t(w) * h * q);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      for (Label v = 0; v < q; ++v) out[(std::size_t(y) * w + x) * q + v] = scale * volume.at(x, y, v);
      for (int k = 0; k < 4; ++k) {
        const int nx = x + dx[k], ny = y + dy[k];
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        int weight = 1;
        if (k == 0) weight = model.weights.horizontal(nx, ny);
        if (k == 1) weight = model.weights.horizontal(x, y);
        if (k == 2) weight = model.weights.vertical(nx, ny);
        if (k == 3) weight = model.weights.vertical(x, y);
        std::vector<Energy> halved(static_cast<std::size_t>(q));
        for (Label v = 0; v < q; ++v) {
          const Energy s = sums.fields[k][(std::size_t(ny) * w + nx) * q + v];
          halved[v] = (s - (((s % 2) + 2) % 2)) / 2;
        }
        const auto msg = oracle_minplus(halved, volume.space(), model.l1, model.g,
                                        Energy(weight) * scale * model.lambda);
        for (Label v = 0; v < q; ++v) out[(std::size_t(y) * w + x) * q + v] += msg[v];
      }
    }
  return out;
}

// ---------------------------------------------------------------------------
// Seeded instance generators. Values come from std::mt19937_64 reduced with
// `%`, which is reproducible across standard libraries.
// ---------------------------------------------------------------------------

inline std::uint64_t draw(std::mt19937_64& rng, std::uint64_t bound) { return rng() % bound; }

/// Chain with length in [1, max_length], Q in [1, max_labels] (stereo-style
/// 1D label space), costs in [0, 20], lambda in [0, 6], g in [1, 3], l1 in {1, 2}.
inline ScanlineProblem random_chain(std::uint64_t seed, int max_length = 8, int max_labels = 5) {
  std::mt19937_64 rng(seed);
  const int n = 1 + int(draw(rng, max_length));
  const int q = 1 + int(draw(rng, max_labels));
  ScanlineProblem p;
  p.labels = LabelSpace::range(0, q - 1);
  p.model.l1 = 1 + int(draw(rng, 2));
  p.model.g = 1 + int(draw(rng, 3));
  p.model.lambda = Energy(draw(rng, 7));
  p.costs.resize(std::size_t(n) * q);
  for (auto& c : p.costs) c = Cost(draw(rng, 21));
  if (draw(rng, 2) == 1) {
    p.edge_weights.resize(std::size_t(n - 1));
    for (auto& w : p.edge_weights) w = 1 + int(draw(rng, 2));
  }
  return p;
}

/// width x height grid with Q labels, costs in [0, 20], lambda in [1, 6],
/// g in [1, 2], l1 in {1, 2}, unit edge weights.
inline TinyInstance random_tiny_instance(std::uint64_t seed, int width = 4, int height = 4, int labels = 3) {
  std::mt19937_64 rng(seed);
  TinyInstance inst;
  inst.seed = seed;
  inst.model.l1 = 1 + int(draw(rng, 2));
  inst.model.g = 1 + int(draw(rng, 2));
  inst.model.lambda = 1 + Energy(draw(rng, 6));
  std::vector<Cost> costs(std::size_t(width) * height * labels);
  for (auto& c : costs) c = Cost(draw(rng, 21));
  inst.volume = CostVolume::from_values(width, height, LabelSpace::range(0, labels - 1), 20, std::move(costs));
  return inst;
}

}  // namespace edp::oracle
