#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include <unistd.h>

#include "edp_app.hpp"

using namespace edp;
using namespace edp::app;

namespace {

std::string scene_dir() {
  static const std::string dir = [] {
    // one directory per process: ctest runs test cases concurrently
    const auto p = std::filesystem::temp_directory_path() / ("edp_app_scenes_" + std::to_string(::getpid()));
    std::ostringstream out, err;
    run_scenes(p.string(), out, err);
    return p.string();
  }();
  return dir;
}

std::string in_scene(const std::string& file) { return scene_dir() + "/" + file; }

std::string out_path(const std::string& file) {
  return (std::filesystem::temp_directory_path() / ("edp_app_" + std::to_string(::getpid()) + "_" + file)).string();
}

RunConfig stereo_pair() {
  RunConfig c;
  c.mode = Mode::stereo;
  c.left = in_scene("stereo-gray_0.pgm");
  c.right = in_scene("stereo-gray_1.pgm");
  c.max_disp = 7;
  c.iterations = 2;
  return c;
}

}  // namespace

TEST(Solve, ZeroLambdaGivesDataArgmin) {
  RunConfig c = stereo_pair();
  c.lambda = 0;
  c.iterations = 1;
  c.format = DisparityFormat::pfm;
  c.out = out_path("argmin.pfm");
  std::ostringstream out, err;
  ASSERT_EQ(run_solve(c, out, err), kOk) << err.str();

  const auto scene = bundled_scene("stereo-gray");
  const auto want = data_argmin(scene_volume(scene));
  const auto got = parse_pfm(detail::slurp(c.out));
  for (int y = 0; y < want.height; ++y)
    for (int x = 0; x < want.width; ++x) ASSERT_EQ(got.at(x, y), float(want.at(x, y)));
}

TEST(Solve, EchoesMaterializedConfig) {
  RunConfig c = stereo_pair();
  std::ostringstream out, err;
  ASSERT_EQ(run_solve(c, out, err), kOk);
  for (const char* key : {"MODE=stereo\n", "L1=1\n", "G=5\n", "OP=lrms\n", "LAMBDA_SOURCE=estimate\n", "LABELS=8\n"})
    EXPECT_NE(err.str().find(key), std::string::npos) << key;
  EXPECT_NE(out.str().find("per_pixel "), std::string::npos);
}

TEST(Solve, MotionTripletReportsBoxLabels) {
  RunConfig c;
  c.mode = Mode::motion;
  c.composite = true;
  c.first = in_scene("motion-triplet_2.pgm");
  c.second = in_scene("motion-triplet_0.pgm");
  c.third = in_scene("motion-triplet_1.pgm");
  c.iterations = 1;
  c.out = out_path("flow.flo");
  c.flow_color = out_path("flow.ppm");
  std::ostringstream out, err;
  ASSERT_EQ(run_solve(c, out, err), kOk) << err.str();
  EXPECT_EQ(out.str().rfind("labels 405\n", 0), 0u);
  EXPECT_NE(err.str().find("OP=grms\n"), std::string::npos);
  EXPECT_NE(err.str().find("L1=2\n"), std::string::npos);
  EXPECT_EQ(read_flow(c.out).width, 32);
  EXPECT_EQ(read_image(c.flow_color).channels(), 3);
}

TEST(Solve, ScanlineAlgorithm) {
  RunConfig c = stereo_pair();
  c.algo = Algorithm::scanline;
  c.energy_log = out_path("scan.csv");
  std::ostringstream out, err;
  ASSERT_EQ(run_solve(c, out, err), kOk);
  EXPECT_EQ(parse_energy_log(detail::slurp(c.energy_log)).size(), 2u);
}

TEST(Solve, EnergyLogHasOneRowPerIteration) {
  RunConfig c = stereo_pair();
  c.iterations = 3;
  c.energy_log = out_path("edp.csv");
  std::ostringstream out, err;
  ASSERT_EQ(run_solve(c, out, err), kOk);
  const auto rows = parse_energy_log(detail::slurp(c.energy_log));
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].iteration, 0);
  EXPECT_EQ(rows[3].iteration, 3);
}

TEST(Solve, UsageErrorsNameTheInvariant) {
  std::ostringstream out, err;
  RunConfig c = stereo_pair();
  c.l1 = 2;
  c.op = "lrms";
  EXPECT_EQ(run_solve(c, out, err), kUsage);
  EXPECT_NE(err.str().find("lrms requires l1 = 1"), std::string::npos);

  c = stereo_pair();
  c.composite = true;
  EXPECT_EQ(run_solve(c, out, err), kUsage);
  EXPECT_NE(err.str().find("composite requires 3 inputs"), std::string::npos);

  c = stereo_pair();
  c.flow_color = out_path("x.ppm");
  EXPECT_EQ(run_solve(c, out, err), kUsage);

  c = stereo_pair();
  c.right = in_scene("stereo-color_1.ppm");
  EXPECT_EQ(run_solve(c, out, err), kUsage);
}

TEST(Solve, IoErrorsCarryThePath) {
  std::ostringstream out, err;
  RunConfig c = stereo_pair();
  c.left = out_path("does-not-exist.pgm");
  EXPECT_EQ(run_solve(c, out, err), kIo);
  EXPECT_NE(err.str().find("does-not-exist.pgm"), std::string::npos);
  c = stereo_pair();
  c.out = "/nonexistent-dir/out.pgm";
  EXPECT_EQ(run_solve(c, out, err), kIo);
}

TEST(Bench, ReportsCountsAndAgreement) {
  BenchConfig b;
  b.q = 60;
  b.g = 5;
  b.trials = 50;
  std::ostringstream out, err;
  ASSERT_EQ(run_bench(b, out, err), kOk);
  EXPECT_NE(out.str().find("sfms,60,"), std::string::npos);
  EXPECT_NE(out.str().find("grms,10,"), std::string::npos);
  EXPECT_NE(out.str().find("lrms,4,"), std::string::npos);

  b = {};
  b.box_x = 27;
  b.box_y = 15;
  b.l1 = 2;
  b.g = 3;
  b.trials = 5;
  std::ostringstream out2;
  ASSERT_EQ(run_bench(b, out2, err), kOk);
  EXPECT_NE(out2.str().find("sfms,405,"), std::string::npos);
  EXPECT_NE(out2.str().find("grms,11,"), std::string::npos);
  EXPECT_EQ(out2.str().find("lrms"), std::string::npos);
}

TEST(Bench, ZeroTrialsIsAnEmptyReport) {
  BenchConfig b;
  b.trials = 0;
  std::ostringstream out, err;
  EXPECT_EQ(run_bench(b, out, err), kOk);
  EXPECT_TRUE(out.str().empty());
  b.q = 1;
  EXPECT_EQ(run_bench(b, out, err), kUsage);
}
