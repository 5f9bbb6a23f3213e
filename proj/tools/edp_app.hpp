#pragma once

// Command implementations behind the `edp` executable. Each returns a
// process exit code and writes only to the streams it is given.

#include <chrono>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "edp/dsi_builder.hpp"
#include "edp/edp_solver.hpp"
#include "edp/golden.hpp"
#include "edp/media_io.hpp"
#include "edp/scanline_dp.hpp"
#include "edp/scenes.hpp"
#include "edp/verify.hpp"

namespace edp::app {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2, kIo = 3 };

enum class Mode { stereo, motion };
enum class Algorithm { edp, scanline };

struct RunConfig {
  Mode mode = Mode::stereo;
  /// stereo: left/right, or middle/right/left with --composite.
  /// motion: first/second, or first/second/third with --composite.
  std::string left, right, middle;
  std::string first, second, third;
  int max_disp = 59;
  int range_x = 13;
  int range_y = 7;
  int l1 = 0;  ///< 0: mode default
  int l2 = 2;
  int g = 0;   ///< 0: mode default
  std::optional<Energy> lambda;
  int iterations = 8;
  Algorithm algo = Algorithm::edp;
  std::string op;  ///< empty: lrms when l1 = 1, else grms
  bool composite = false;
  bool adaptive = true;
  double window_scale = 1.0;
  bool clamp = false;
  std::string out;
  DisparityFormat format = DisparityFormat::pgm8;
  std::string flow_color;
  std::string energy_log;
};

/// Fills mode-dependent defaults: stereo pairs l1 = 1, g = 5; everything
/// else l1 = 2 for triplets, 1 for motion pairs, g = 3.
inline void materialize(RunConfig& c) {
  if (c.l1 == 0) c.l1 = c.composite ? 2 : 1;
  if (c.g == 0) c.g = (c.mode == Mode::stereo && !c.composite) ? 5 : 3;
  if (c.op.empty()) c.op = std::string(to_string(default_operator(c.l1)));
}

inline void validate(const RunConfig& c) {
  const MinPlusOperator op = parse_operator(c.op);
  if (op == MinPlusOperator::lrms && c.l1 != 1) throw ConfigError("operator lrms requires l1 = 1");
  if (c.l1 != 1 && c.l1 != 2) throw ConfigError("l1 must be 1 or 2");
  if (c.l2 != 1 && c.l2 != 2) throw ConfigError("l2 must be 1 or 2");
  if (c.g < 1) throw ConfigError("g must be >= 1");
  if (c.iterations < 1) throw ConfigError("iterations must be >= 1");
  if (c.window_scale < 1.0) throw ConfigError("window scale must be >= 1");
  if (c.lambda && *c.lambda < 0) throw ConfigError("lambda must be >= 0");
  if (c.mode == Mode::stereo) {
    if (c.max_disp < 0) throw ConfigError("max-disp must be >= 0");
    if (c.composite && (c.middle.empty() || c.left.empty() || c.right.empty()))
      throw ConfigError("composite requires 3 inputs: --middle, --right and --left");
    if (!c.composite && (c.left.empty() || c.right.empty()))
      throw ConfigError("stereo requires --left and --right");
  } else {
    if (c.range_x < 0 || c.range_y < 0) throw ConfigError("motion requires non-negative R=2 ranges");
    if (c.composite && (c.first.empty() || c.second.empty() || c.third.empty()))
      throw ConfigError("composite requires 3 inputs: --first, --second and --third");
    if (!c.composite && (c.first.empty() || c.second.empty()))
      throw ConfigError("motion requires --first and --second");
  }
  if (!c.flow_color.empty() && c.mode != Mode::motion) throw ConfigError("--flow-color needs motion mode");
}

inline void echo(std::ostream& err, const RunConfig& c, const LabelSpace& space, Energy lambda) {
  auto kv = [&](const char* k, const auto& v) { err << k << '=' << v << '\n'; };
  kv("MODE", c.mode == Mode::stereo ? "stereo" : "motion");
  if (c.mode == Mode::stereo) {
    kv("MAX_DISP", c.max_disp);
  } else {
    kv("RANGE_X", c.range_x);
    kv("RANGE_Y", c.range_y);
  }
  kv("LABELS", space.size());
  kv("L1", c.l1);
  kv("L2", c.l2);
  kv("G", c.g);
  kv("LAMBDA", lambda);
  kv("LAMBDA_SOURCE", c.lambda ? "override" : "estimate");
  kv("ITERATIONS", c.iterations);
  kv("ALGO", c.algo == Algorithm::edp ? "edp" : "scanline");
  kv("OP", c.op);
  kv("COMPOSITE", c.composite ? 1 : 0);
  kv("ADAPTIVE", c.adaptive ? 1 : 0);
  kv("WINDOW_SCALE", c.window_scale);
  kv("OUT_OF_BOUNDS", c.clamp ? "clamp" : "penalize");
}

/// Ē printed with two decimals, rounded half up.
inline std::string per_pixel_text(const EnergyBreakdown& e) {
  const auto c = e.per_pixel_centi();
  std::ostringstream os;
  os << c / 100 << '.' << std::setw(2) << std::setfill('0') << c % 100;
  return os.str();
}

inline int run_solve(RunConfig c, std::ostream& out, std::ostream& err) {
  try {
    materialize(c);
    validate(c);
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }
  try {
    MatchConfig match;
    match.cost_exponent = c.l2;
    match.composite = c.composite;
    match.out_of_bounds = c.clamp ? OutOfBounds::clamp : OutOfBounds::penalize;
    PixelGrid ref;
    CostVolume vol;
    if (c.mode == Mode::stereo) {
      match.labels = LabelSpace::range(0, c.max_disp);
      match.direction = -1;
      if (c.composite) {
        ref = read_image(c.middle);
        vol = build_composite_cost(ref, read_image(c.right), read_image(c.left), match);
      } else {
        ref = read_image(c.left);
        vol = build_cost_volume(ref, read_image(c.right), match);
      }
    } else {
      match.labels = LabelSpace::box(-c.range_x, c.range_x, -c.range_y, c.range_y);
      match.direction = 1;
      if (c.composite) {
        ref = read_image(c.second);
        vol = build_composite_cost(ref, read_image(c.third), read_image(c.first), match);
      } else {
        ref = read_image(c.first);
        vol = build_cost_volume(ref, read_image(c.second), match);
      }
    }

    SmoothnessModel model;
    model.l1 = c.l1;
    model.g = c.g;
    model.lambda = c.lambda ? *c.lambda : estimate_lambda(vol, c.l1, c.l2, c.g);
    if (c.adaptive) model.weights = build_edge_weights(ref);
    echo(err, c, vol.space(), model.lambda);

    EdpOptions opt;
    opt.op = parse_operator(c.op);
    opt.window_scale = c.window_scale;

    EnergyTrace trace;
    const DisparityField initial = data_argmin(vol);
    trace.push_back({0, evaluate_energy(vol, model, initial), 0.0});
    DisparityField field;
    if (c.algo == Algorithm::edp) {
      EdpResult res = solve(vol, model, c.iterations, opt);
      field = std::move(res.field);
      trace.insert(trace.end(), res.trace.begin(), res.trace.end());
    } else {
      const auto t0 = std::chrono::steady_clock::now();
      field = solve_scanlines(vol, model, opt.op, c.window_scale);
      const auto t1 = std::chrono::steady_clock::now();
      trace.push_back({1, evaluate_energy(vol, model, field), std::chrono::duration<double>(t1 - t0).count()});
    }

    if (!c.out.empty()) {
      if (c.mode == Mode::motion)
        write_flow(field, vol.space(), c.out);
      else
        write_disparity(field, vol.space(), c.out, c.format);
    }
    if (!c.flow_color.empty()) write_image(render_flow_color(field, vol.space()), c.flow_color);
    if (!c.energy_log.empty()) write_energy_log(trace, c.energy_log);

    const EnergyBreakdown& e = trace.back().energy;
    out << "labels " << vol.labels() << '\n';
    out << "energy " << e.total() << " data " << e.data << " smooth " << e.smoothness << '\n';
    out << "per_pixel " << per_pixel_text(e) << '\n';
    return kOk;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }
}

// ---------------------------------------------------------------------------

struct BenchConfig {
  int q = 60;
  int box_x = 0, box_y = 0;  ///< non-zero: R=2 box of box_x * box_y labels
  int g = 5;
  int l1 = 1;
  int trials = 1000;
  double window_scale = 1.0;
  std::uint64_t seed = 1;
};

struct BenchRow {
  MinPlusOperator op;
  double comparisons_per_vertex = 0;
  double vertices_per_second = 0;
};

/// Runs every applicable operator on the same seeded random slices,
/// checking that all agree with SFMS.
inline std::vector<BenchRow> bench(const BenchConfig& c, bool& consistent) {
  const LabelSpace space = c.box_x > 0 ? LabelSpace::box(0, c.box_x - 1, 0, c.box_y - 1)
                                       : LabelSpace::range(0, c.q - 1);
  consistent = true;
  std::vector<BenchRow> rows;
  if (c.trials == 0) return rows;
  std::mt19937_64 rng(c.seed);
  std::vector<std::vector<Energy>> slices(std::size_t(c.trials), std::vector<Energy>(std::size_t(space.size())));
  std::vector<Energy> lambdas(std::size_t(c.trials));
  for (std::size_t t = 0; t < slices.size(); ++t) {
    for (auto& v : slices[t]) v = Energy(rng() % 1000001);
    lambdas[t] = Energy(rng() % 10001);
  }
  std::vector<MinPlusOperator> ops{MinPlusOperator::sfms, MinPlusOperator::grms};
  if (c.l1 == 1) ops.push_back(MinPlusOperator::lrms);
  std::vector<std::vector<Energy>> reference;
  for (MinPlusOperator op : ops) {
    MinPlusKernel<> k(space, c.l1, c.g, op, c.window_scale);
    std::vector<std::vector<Energy>> outs(slices.size(), std::vector<Energy>(slices[0].size()));
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t t = 0; t < slices.size(); ++t) k.apply(slices[t], outs[t], lambdas[t]);
    const auto t1 = std::chrono::steady_clock::now();
    const double secs = std::max(std::chrono::duration<double>(t1 - t0).count(), 1e-9);
    if (reference.empty())
      reference = outs;
    else if (outs != reference)
      consistent = false;
    const OperatorStats st = measure_operations(op, space, c.l1, c.g, c.window_scale);
    rows.push_back({op, st.per_vertex(), double(slices.size()) * double(space.size()) / secs});
  }
  return rows;
}

inline int run_bench(const BenchConfig& c, std::ostream& out, std::ostream& err) {
  if ((c.box_x > 0) != (c.box_y > 0) || c.box_x < 0 || c.box_y < 0) {
    err << "usage error: --box needs WxH with both sides >= 1\n";
    return kUsage;
  }
  if (c.box_x == 0 && c.q < 2) {
    err << "usage error: q must be >= 2\n";
    return kUsage;
  }
  if (c.l1 != 1 && c.l1 != 2) {
    err << "usage error: l1 must be 1 or 2\n";
    return kUsage;
  }
  if (c.g < 1 || c.trials < 0) {
    err << "usage error: g must be >= 1 and trials >= 0\n";
    return kUsage;
  }
  bool consistent = true;
  const auto rows = bench(c, consistent);
  const int q = c.box_x > 0 ? c.box_x * c.box_y : c.q;
  err << "Q=" << q << "\nR=" << (c.box_x > 0 ? 2 : 1) << "\nL1=" << c.l1 << "\nG=" << c.g << "\nTRIALS=" << c.trials
      << "\nSEED=" << c.seed << "\nWINDOW_SCALE=" << c.window_scale << '\n';
  if (!rows.empty()) out << "operator,comparisons_per_vertex,vertices_per_second\n";
  for (const auto& r : rows)
    out << to_string(r.op) << ',' << r.comparisons_per_vertex << ',' << std::fixed << std::setprecision(0)
        << r.vertices_per_second << std::defaultfloat << std::setprecision(6) << '\n';
  if (!consistent) {
    err << "operators disagree on identical slices\n";
    return kFailure;
  }
  return kOk;
}

// ---------------------------------------------------------------------------

inline constexpr const char* kSuites[] = {"minplus", "chain", "tiny-grid", "scenes"};

inline std::string golden_path(const std::string& dir, const std::string& suite) {
  if (suite == "chain") return dir + "/chains.golden";
  if (suite == "tiny-grid") return dir + "/tiny_grids.golden";
  return dir + "/scenes.golden";
}

inline int run_verify(const std::string& suite, const std::string& golden_dir, bool recompute_oracle,
                      std::ostream& out, std::ostream& err) {
  std::vector<std::string> todo;
  if (suite.empty() || suite == "all")
    todo.assign(std::begin(kSuites), std::end(kSuites));
  else if (std::find(std::begin(kSuites), std::end(kSuites), suite) != std::end(kSuites))
    todo.push_back(suite);
  else {
    err << "usage error: unknown suite '" << suite << "'\n";
    return kUsage;
  }
  bool ok = true;
  for (const auto& s : todo) {
    SuiteReport rep;
    try {
      if (s == "minplus")
        rep = verify_minplus();
      else if (s == "chain")
        rep = verify_chains(read_golden(golden_path(golden_dir, s)));
      else if (s == "tiny-grid")
        rep = verify_tiny_grids(read_golden(golden_path(golden_dir, s)), recompute_oracle);
      else
        rep = verify_scenes(read_golden(golden_path(golden_dir, s)));
    } catch (const IoError& e) {
      rep = SuiteReport{s};
      rep.fail(e.what());
    }
    out << rep << '\n';
    ok = ok && rep.passed();
  }
  return ok ? kOk : kFailure;
}

/// Regenerates the golden files from the oracles.
inline int run_calibrate(const std::string& golden_dir, std::ostream& out, std::ostream& err) {
  try {
    std::filesystem::create_directories(golden_dir);
    write_golden(calibrate_chains(), golden_path(golden_dir, "chain"));
    out << "wrote " << golden_path(golden_dir, "chain") << '\n';
    write_golden(calibrate_tiny_grids(), golden_path(golden_dir, "tiny-grid"));
    out << "wrote " << golden_path(golden_dir, "tiny-grid") << '\n';
    write_golden(calibrate_scenes(), golden_path(golden_dir, "scenes"));
    out << "wrote " << golden_path(golden_dir, "scenes") << '\n';
    return kOk;
  } catch (const std::exception& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIo;
  }
}

/// Writes the bundled scene images as PGM/PPM, e.g. stereo-gray_0.pgm for
/// the reference view.
inline int run_scenes(const std::string& dir, std::ostream& out, std::ostream& err) {
  try {
    std::filesystem::create_directories(dir);
    for (const auto& s : bundled_scenes()) {
      const char* ext = s.images[0].channels() == 3 ? ".ppm" : ".pgm";
      for (std::size_t i = 0; i < s.images.size(); ++i) {
        const std::string path = dir + "/" + s.name + "_" + std::to_string(i) + ext;
        write_image(s.images[i], path);
        out << path << '\n';
      }
    }
    return kOk;
  } catch (const std::exception& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIo;
  }
}

}  // namespace edp::app
