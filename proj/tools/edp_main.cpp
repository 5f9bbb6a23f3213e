#include <iostream>

#include "CLI11.hpp"
#include "edp_app.hpp"

#ifndef EDP_GOLDEN_DIR
#define EDP_GOLDEN_DIR "tests/golden"
#endif

namespace {

void add_solve_options(CLI::App* cmd, edp::app::RunConfig& c, std::optional<edp::Energy>& lambda,
                       std::string& algo, std::string& format) {
  cmd->add_option("--l1", c.l1, "prior exponent (1 or 2); default 1 for pairs, 2 for triplets");
  cmd->add_option("--l2", c.l2, "cost exponent (1 or 2)")->capture_default_str();
  cmd->add_option("--g", c.g, "truncation threshold; default 5 for stereo pairs, else 3");
  cmd->add_option("--lambda", lambda, "smoothness weight; default from the mean cost");
  cmd->add_option("--iterations", c.iterations, "EDP iterations")->capture_default_str();
  cmd->add_option("--algo", algo, "edp or scanline")->check(CLI::IsMember({"edp", "scanline"}))->capture_default_str();
  cmd->add_option("--op", c.op, "sfms, grms or lrms; default lrms when l1 = 1, else grms")
      ->check(CLI::IsMember({"sfms", "grms", "lrms"}));
  cmd->add_flag("--composite", c.composite, "occlusion-tolerant triplet cost");
  cmd->add_flag("--adaptive,!--no-adaptive", c.adaptive, "double lambda across low-contrast edges")
      ->capture_default_str();
  cmd->add_option("--window-scale", c.window_scale, "GRMS window scale a")->capture_default_str();
  cmd->add_flag("--clamp", c.clamp, "sample border pixels instead of charging C_max out of bounds");
  cmd->add_option("--out", c.out, "disparity (.pgm/.pfm) or flow (.flo) output");
  cmd->add_option("--format", format, "disparity format: pgm8 or pfm")
      ->check(CLI::IsMember({"pgm8", "pfm"}))
      ->capture_default_str();
  cmd->add_option("--energy-log", c.energy_log, "CSV energy trace");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace edp::app;
  CLI::App cli{"Discrete MRF energy minimization for stereo and motion"};
  cli.require_subcommand(1);

  RunConfig stereo_cfg, motion_cfg;
  stereo_cfg.mode = Mode::stereo;
  motion_cfg.mode = Mode::motion;
  std::optional<edp::Energy> stereo_lambda, motion_lambda;
  std::string stereo_algo = "edp", motion_algo = "edp", stereo_format = "pgm8", motion_format = "pgm8";

  auto* solve = cli.add_subcommand("solve", "label an image pair or triplet");
  solve->require_subcommand(1);
  auto* stereo = solve->add_subcommand("stereo", "rectified stereo, disparities [0, max-disp]");
  stereo->add_option("--left", stereo_cfg.left, "left (reference) view, or left outer view with --composite");
  stereo->add_option("--right", stereo_cfg.right, "right view");
  stereo->add_option("--middle", stereo_cfg.middle, "middle (reference) view for --composite");
  stereo->add_option("--max-disp", stereo_cfg.max_disp, "largest disparity")->capture_default_str();
  add_solve_options(stereo, stereo_cfg, stereo_lambda, stereo_algo, stereo_format);

  auto* motion = solve->add_subcommand("motion", "2D motion, offsets in [-range-x, range-x] x [-range-y, range-y]");
  motion->add_option("--first", motion_cfg.first, "reference frame, or previous frame with --composite");
  motion->add_option("--second", motion_cfg.second, "next frame, or reference frame with --composite");
  motion->add_option("--third", motion_cfg.third, "next frame with --composite");
  motion->add_option("--range-x", motion_cfg.range_x, "horizontal offset range")->capture_default_str();
  motion->add_option("--range-y", motion_cfg.range_y, "vertical offset range")->capture_default_str();
  motion->add_option("--flow-color", motion_cfg.flow_color, "color-wheel rendering (.ppm)");
  add_solve_options(motion, motion_cfg, motion_lambda, motion_algo, motion_format);

  BenchConfig bench_cfg;
  std::string box;
  auto* bench = cli.add_subcommand("bench", "min-plus operator counts and throughput");
  bench->add_option("--q", bench_cfg.q, "label count (R=1)")->capture_default_str();
  bench->add_option("--box", box, "R=2 label box WxH, e.g. 27x15");
  bench->add_option("--g", bench_cfg.g, "truncation threshold")->capture_default_str();
  bench->add_option("--l1", bench_cfg.l1, "prior exponent")->capture_default_str();
  bench->add_option("--trials", bench_cfg.trials, "random slices per operator")->capture_default_str();
  bench->add_option("--window-scale", bench_cfg.window_scale, "GRMS window scale a")->capture_default_str();
  bench->add_option("--seed", bench_cfg.seed, "slice generator seed")->capture_default_str();

  std::string suite = "all", golden_dir = EDP_GOLDEN_DIR;
  bool recompute = false;
  auto* verify = cli.add_subcommand("verify", "run the oracle and golden-file suites");
  verify->add_option("--suite", suite, "minplus, chain, tiny-grid, scenes or all")->capture_default_str();
  verify->add_option("--golden-dir", golden_dir, "golden file directory")->capture_default_str();
  verify->add_flag("--recompute-oracle", recompute, "re-derive tiny-grid minima exhaustively");

  auto* calibrate = cli.add_subcommand("calibrate", "regenerate golden files from the oracles");
  calibrate->add_option("--golden-dir", golden_dir, "output directory")->capture_default_str();

  std::string scenes_dir = "scenes";
  auto* scenes = cli.add_subcommand("scenes", "write the bundled synthetic scenes as PGM/PPM");
  scenes->add_option("--out", scenes_dir, "output directory")->capture_default_str();

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  auto finish = [](RunConfig& c, const std::optional<edp::Energy>& lambda, const std::string& algo,
                   const std::string& format) {
    c.lambda = lambda;
    c.algo = algo == "scanline" ? Algorithm::scanline : Algorithm::edp;
    c.format = format == "pfm" ? edp::DisparityFormat::pfm : edp::DisparityFormat::pgm8;
  };
  if (*stereo) {
    finish(stereo_cfg, stereo_lambda, stereo_algo, stereo_format);
    return run_solve(stereo_cfg, std::cout, std::cerr);
  }
  if (*motion) {
    finish(motion_cfg, motion_lambda, motion_algo, motion_format);
    return run_solve(motion_cfg, std::cout, std::cerr);
  }
  if (*bench) {
    if (!box.empty()) {
      const auto x = box.find('x');
      try {
        if (x == std::string::npos) throw std::invalid_argument(box);
        bench_cfg.box_x = std::stoi(box.substr(0, x));
        bench_cfg.box_y = std::stoi(box.substr(x + 1));
      } catch (const std::exception&) {
        std::cerr << "usage error: --box expects WxH, got '" << box << "'\n";
        return kUsage;
      }
      if (bench_cfg.box_x < 1 || bench_cfg.box_y < 1) {
        std::cerr << "usage error: --box sides must be >= 1\n";
        return kUsage;
      }
    }
    return run_bench(bench_cfg, std::cout, std::cerr);
  }
  if (*verify) return run_verify(suite, golden_dir, recompute, std::cout, std::cerr);
  if (*calibrate) return run_calibrate(golden_dir, std::cout, std::cerr);
  if (*scenes) return run_scenes(scenes_dir, std::cout, std::cerr);
  return kUsage;
}
