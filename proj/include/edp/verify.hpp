#pragma once

// Verification suites: operator equivalence against the exhaustive
// min-plus oracle, and golden-file regression for chains, tiny grids and
// the bundled scenes. Each suite reports its first divergence.

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "edp/edp_solver.hpp"
#include "edp/golden.hpp"
#include "edp/minplus.hpp"
#include "edp/oracle.hpp"
#include "edp/scanline_dp.hpp"
#include "edp/scenes.hpp"

namespace edp {

struct SuiteReport {
  explicit SuiteReport(std::string name = {}) : suite(std::move(name)) {}

  std::string suite;
  std::int64_t cases = 0;
  std::int64_t failures = 0;
  std::string first_failure;

  bool passed() const { return failures == 0 && cases > 0; }

  void fail(const std::string& what) {
    if (failures++ == 0) first_failure = what;
  }
};

inline std::ostream& operator<<(std::ostream& os, const SuiteReport& r) {
  os << r.suite << ": " << (r.passed() ? "ok" : "FAILED") << " (" << r.cases << " cases, " << r.failures
     << " failures)";
  if (!r.first_failure.empty()) os << "; first: " << r.first_failure;
  return os;
}

// ---------------------------------------------------------------------------
// Operator equivalence
// ---------------------------------------------------------------------------

struct OperatorCase {
  std::uint64_t seed = 0;
  LabelSpace space;
  std::vector<Energy> slice;
  int l1 = 1;
  int g = 1;
  Energy weighted_lambda = 0;
  double window_scale = 1.0;
};

/// Even seeds give R=1 with Q in [2, 64], odd seeds R=2 boxes up to 9x9.
/// Costs in [0, 1e6], lambda in [0, 1e4], g in [1, 8], weight in {1, 2}.
inline OperatorCase random_operator_case(std::uint64_t seed) {
  using oracle::draw;
  std::mt19937_64 rng(seed);
  OperatorCase c;
  c.seed = seed;
  if (seed % 2 == 0) {
    const int q = 2 + int(draw(rng, 63));
    const int lo = int(draw(rng, 5)) - 2;
    c.space = LabelSpace::range(lo, lo + q - 1);
  } else {
    const int wx = 1 + int(draw(rng, 9)), wy = 1 + int(draw(rng, 9));
    c.space = LabelSpace::box(-(wx / 2), wx - 1 - wx / 2, -(wy / 2), wy - 1 - wy / 2);
  }
  c.l1 = 1 + int(draw(rng, 2));
  c.g = 1 + int(draw(rng, 8));
  c.weighted_lambda = Energy(draw(rng, 10001)) * Energy(1 + draw(rng, 2));
  static constexpr double kScales[] = {1.0, 1.5, 2.0};
  c.window_scale = kScales[draw(rng, 3)];
  c.slice.resize(std::size_t(c.space.size()));
  // A few slices are near-constant to exercise ties.
  const Energy span = draw(rng, 4) == 0 ? 3 : 1000001;
  for (auto& v : c.slice) v = Energy(draw(rng, std::uint64_t(span)));
  return c;
}

inline std::string describe(const OperatorCase& c) {
  std::ostringstream os;
  os << "seed=" << c.seed << " Q=" << c.space.size() << " R=" << c.space.dims() << " l1=" << c.l1 << " g=" << c.g
     << " wl=" << c.weighted_lambda << " a=" << c.window_scale;
  return os.str();
}

inline SuiteReport verify_minplus(int count = 1000, std::uint64_t first_seed = 1) {
  SuiteReport rep{"minplus"};
  for (int i = 0; i < count; ++i) {
    const OperatorCase c = random_operator_case(first_seed + std::uint64_t(i));
    const auto expect = oracle::oracle_minplus(c.slice, c.space, c.l1, c.g, c.weighted_lambda);
    std::vector<MinPlusOperator> ops{MinPlusOperator::sfms, MinPlusOperator::grms};
    if (c.l1 == 1) ops.push_back(MinPlusOperator::lrms);
    for (MinPlusOperator op : ops) {
      ++rep.cases;
      MinPlusKernel<> k(c.space, c.l1, c.g, op, op == MinPlusOperator::grms ? c.window_scale : 1.0);
      std::vector<Energy> out(c.slice.size());
      k.apply(c.slice, out, c.weighted_lambda);
      for (std::size_t v = 0; v < out.size(); ++v)
        if (out[v] != expect[v]) {
          std::ostringstream os;
          os << to_string(op) << " " << describe(c) << " label " << v << ": got " << out[v] << ", oracle "
             << expect[v];
          rep.fail(os.str());
          break;
        }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Chains
// ---------------------------------------------------------------------------

inline ChainGolden make_chain_golden(std::uint64_t seed) {
  ChainGolden c;
  c.seed = seed;
  c.problem = oracle::random_chain(seed);
  c.optimum = oracle::oracle_chain(c.problem);
  return c;
}

inline GoldenFile calibrate_chains(int count = 200, std::uint64_t first_seed = 1) {
  GoldenFile f{"chain", {}};
  for (int i = 0; i < count; ++i) f.records.push_back(to_record(make_chain_golden(first_seed + std::uint64_t(i))));
  return f;
}

/// Checks every operator's backtracked path against the committed optimum,
/// and, for unique optima, the marginal-argmin solution and marginal minima.
inline void check_chain(const ChainGolden& c, SuiteReport& rep) {
  const std::string tag = "chain seed=" + std::to_string(c.seed);
  const ScanlineProblem regen = oracle::random_chain(c.seed);
  if (regen.costs != c.problem.costs || regen.edge_weights != c.problem.edge_weights ||
      regen.model.lambda != c.problem.model.lambda || regen.model.g != c.problem.model.g ||
      regen.model.l1 != c.problem.model.l1) {
    rep.fail(tag + ": instance differs from its seed");
    return;
  }
  std::vector<MinPlusOperator> ops{MinPlusOperator::sfms, MinPlusOperator::grms};
  if (c.problem.model.l1 == 1) ops.push_back(MinPlusOperator::lrms);
  const auto& best = c.optimum.optimal_paths;
  for (MinPlusOperator op : ops) {
    ++rep.cases;
    const std::string at = tag + " " + std::string(to_string(op));
    const PathSolution sol = backtrack(forward_pass(c.problem, op));
    if (sol.energy != c.optimum.minimum) {
      rep.fail(at + ": energy " + std::to_string(sol.energy) + ", expected " + std::to_string(c.optimum.minimum));
      continue;
    }
    if (path_energy(c.problem, sol.path) != sol.energy) {
      rep.fail(at + ": backtracked path does not attain the reported energy");
      continue;
    }
    if (std::find(best.begin(), best.end(), sol.path) == best.end()) {
      rep.fail(at + ": backtracked path is not among the committed optima");
      continue;
    }
    if (c.optimum.unique()) {
      const auto marg = bidirectional_marginals(c.problem, op);
      const Label q = c.problem.labels.size();
      if (marginal_argmin_solution(marg, q) != sol.path) {
        rep.fail(at + ": marginal argmin differs from the unique optimum");
        continue;
      }
      for (int x = 0; x < c.problem.length(); ++x)
        if (slice_min(std::span<const Energy>(marg).subspan(std::size_t(x) * q, q)).value != c.optimum.minimum) {
          rep.fail(at + ": marginal minimum at x=" + std::to_string(x) + " differs from the optimum");
          break;
        }
    }
  }
}

inline SuiteReport verify_chains(const GoldenFile& file) {
  SuiteReport rep{"chain"};
  if (file.suite != "chain") {
    rep.fail("golden file holds suite '" + file.suite + "'");
    return rep;
  }
  for (const auto& r : file.records) {
    try {
      check_chain(chain_from_record(r), rep);
    } catch (const std::exception& e) {
      rep.fail(e.what());
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Tiny grids
// ---------------------------------------------------------------------------

inline constexpr int kTinyGridIterations = 8;

inline GridGolden make_grid_golden(std::uint64_t seed) {
  GridGolden g;
  g.instance = oracle::random_tiny_instance(seed);
  const oracle::GridOptimum opt = oracle::oracle_grid(g.instance);
  g.minimum = opt.minimum;
  g.minimizer = opt.field;
  g.iterations = kTinyGridIterations;
  g.edp_energy = solve(g.instance.volume, g.instance.model, g.iterations).trace.back().energy.total();
  return g;
}

inline GoldenFile calibrate_tiny_grids(int count = 20, std::uint64_t first_seed = 1) {
  GoldenFile f{"tiny-grid", {}};
  for (int i = 0; i < count; ++i) f.records.push_back(to_record(make_grid_golden(first_seed + std::uint64_t(i))));
  return f;
}

/// EDP energy ratio against the committed minimum must not exceed the
/// committed ratio. With `recompute_oracle` the exhaustive minimum is
/// re-derived as well.
inline void check_grid(const GridGolden& g, SuiteReport& rep, bool recompute_oracle) {
  ++rep.cases;
  const std::string tag = "tiny-grid seed=" + std::to_string(g.instance.seed);
  const auto regen = oracle::random_tiny_instance(g.instance.seed);
  if (!(regen.volume == g.instance.volume) || regen.model.lambda != g.instance.model.lambda ||
      regen.model.g != g.instance.model.g || regen.model.l1 != g.instance.model.l1) {
    rep.fail(tag + ": instance differs from its seed");
    return;
  }
  const Energy at_min = evaluate_energy(g.instance.volume, g.instance.model, g.minimizer).total();
  if (at_min != g.minimum) {
    rep.fail(tag + ": committed minimizer has energy " + std::to_string(at_min) + ", committed minimum " +
             std::to_string(g.minimum));
    return;
  }
  if (recompute_oracle) {
    const auto opt = oracle::oracle_grid(g.instance);
    if (opt.minimum != g.minimum) {
      rep.fail(tag + ": oracle minimum " + std::to_string(opt.minimum) + ", committed " +
               std::to_string(g.minimum));
      return;
    }
  }
  const Energy e = solve(g.instance.volume, g.instance.model, g.iterations).trace.back().energy.total();
  // e / minimum <= committed / minimum, compared without division.
  if (e > g.edp_energy) {
    rep.fail(tag + ": EDP energy " + std::to_string(e) + " exceeds committed " + std::to_string(g.edp_energy) +
             " (minimum " + std::to_string(g.minimum) + ")");
    return;
  }
  if (e < g.minimum) rep.fail(tag + ": EDP energy " + std::to_string(e) + " below the exhaustive minimum");
}

inline SuiteReport verify_tiny_grids(const GoldenFile& file, bool recompute_oracle = false) {
  SuiteReport rep{"tiny-grid"};
  if (file.suite != "tiny-grid") {
    rep.fail("golden file holds suite '" + file.suite + "'");
    return rep;
  }
  for (const auto& r : file.records) {
    try {
      check_grid(grid_from_record(r), rep, recompute_oracle);
    } catch (const std::exception& e) {
      rep.fail(e.what());
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Bundled scenes
// ---------------------------------------------------------------------------

inline constexpr int kSceneIterations = 4;

inline MinPlusOperator default_operator(int l1) { return l1 == 1 ? MinPlusOperator::lrms : MinPlusOperator::grms; }

inline SceneGolden run_scene(const Scene& s, int iterations = kSceneIterations) {
  const CostVolume vol = scene_volume(s);
  const SmoothnessModel model = scene_model(s, vol);
  EdpOptions opt;
  opt.op = default_operator(s.l1);
  SceneGolden out;
  out.name = s.name;
  out.op = std::string(to_string(opt.op));
  out.iterations = iterations;
  out.lambda = model.lambda;
  out.trace.push_back(evaluate_energy(vol, model, data_argmin(vol)).total());
  const EdpResult res = solve(vol, model, iterations, opt);
  for (const auto& t : res.trace) out.trace.push_back(t.energy.total());
  for (std::size_t i = 0; i < res.field.labels.size(); ++i) out.bad_pixels += res.field.labels[i] != s.truth.labels[i];
  return out;
}

inline GoldenFile calibrate_scenes() {
  GoldenFile f{"scenes", {}};
  for (const auto& s : bundled_scenes()) f.records.push_back(to_record(run_scene(s)));
  return f;
}

inline SuiteReport verify_scenes(const GoldenFile& file) {
  SuiteReport rep{"scenes"};
  if (file.suite != "scenes") {
    rep.fail("golden file holds suite '" + file.suite + "'");
    return rep;
  }
  for (const auto& r : file.records) {
    ++rep.cases;
    try {
      const SceneGolden want = scene_from_record(r);
      const SceneGolden got = run_scene(bundled_scene(want.name), want.iterations);
      const std::string tag = "scene " + want.name;
      if (got.op != want.op || got.lambda != want.lambda) {
        rep.fail(tag + ": lambda " + std::to_string(got.lambda) + " / op " + got.op + ", committed " +
                 std::to_string(want.lambda) + " / " + want.op);
        continue;
      }
      bool same = true;
      for (std::size_t i = 0; i < want.trace.size() && same; ++i)
        if (i >= got.trace.size() || got.trace[i] != want.trace[i]) {
          rep.fail(tag + ": energy after iteration " + std::to_string(i) + " is " +
                   (i < got.trace.size() ? std::to_string(got.trace[i]) : "missing") + ", committed " +
                   std::to_string(want.trace[i]));
          same = false;
        }
      if (same && got.bad_pixels != want.bad_pixels)
        rep.fail(tag + ": " + std::to_string(got.bad_pixels) + " pixels off ground truth, committed " +
                 std::to_string(want.bad_pixels));
    } catch (const std::exception& e) {
      rep.fail(e.what());
    }
  }
  return rep;
}

}  // namespace edp
