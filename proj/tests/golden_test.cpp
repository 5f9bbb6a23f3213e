#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "edp/golden.hpp"
#include "edp/verify.hpp"
#include "edp_app.hpp"

using namespace edp;

namespace {

const std::string kDir = EDP_GOLDEN_DIR;

std::string temp_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("edp_golden_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p.string();
}

}  // namespace

TEST(GoldenFormat, RoundTrips) {
  GoldenFile f{"chain", {to_record(make_chain_golden(3)), to_record(make_chain_golden(4))}};
  const std::string text = format_golden(f);
  EXPECT_EQ(format_golden(parse_golden(text)), text);
  const auto c = chain_from_record(parse_golden(text).records[0]);
  EXPECT_EQ(c.problem.costs, oracle::random_chain(3).costs);
}

TEST(GoldenFormat, ErrorsCarryLineNumbers) {
  auto message = [](const std::string& text) {
    try {
      parse_golden(text, "g");
    } catch (const GoldenError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_EQ(message(""), "g:0: empty golden file");
  EXPECT_EQ(message("edp-golden 2\n"), "g:1: unsupported golden version 2");
  EXPECT_EQ(message("edp-golden 1\nsuite chain\ncosts 1\n"), "g:3: 'costs' outside a record");
  EXPECT_EQ(message("edp-golden 1\ninstance a=1\ncosts 1 x\n"), "g:3: expected an integer, got 'x'");
  EXPECT_EQ(message("edp-golden 1\ninstance a=1\n"), "g:2: unterminated record");
}

TEST(GoldenFormat, CommentsAndBlankLines) {
  const auto f = parse_golden("# header\nedp-golden 1\n\nsuite x\ninstance k=v\n# note\nminimum 4\nend\n");
  ASSERT_EQ(f.records.size(), 1u);
  EXPECT_EQ(f.records[0].attr("k"), "v");
  EXPECT_EQ(f.records[0].values("minimum"), (std::vector<std::int64_t>{4}));
}

TEST(CommittedGolden, ChainSuite) {
  const auto f = read_golden(kDir + "/chains.golden");
  EXPECT_EQ(f.records.size(), 200u);
  const auto rep = verify_chains(f);
  EXPECT_TRUE(rep.passed()) << rep;
}

TEST(CommittedGolden, ChainMinimaMatchEnumeration) {
  const auto f = read_golden(kDir + "/chains.golden");
  for (std::size_t i = 0; i < f.records.size(); i += 10) {
    const auto c = chain_from_record(f.records[i]);
    const auto opt = oracle::oracle_chain(c.problem);
    EXPECT_EQ(opt.minimum, c.optimum.minimum);
    EXPECT_EQ(opt.optimal_paths, c.optimum.optimal_paths);
  }
}

TEST(CommittedGolden, TinyGridSuite) {
  const auto f = read_golden(kDir + "/tiny_grids.golden");
  EXPECT_EQ(f.records.size(), 20u);
  const auto rep = verify_tiny_grids(f);
  EXPECT_TRUE(rep.passed()) << rep;
}

TEST(CommittedGolden, TinyGridMinimumRederived) {
  const auto f = read_golden(kDir + "/tiny_grids.golden");
  const auto g = grid_from_record(f.records[0]);
  EXPECT_EQ(oracle::oracle_grid(g.instance).minimum, g.minimum);
}

TEST(CommittedGolden, SceneSuite) {
  const auto rep = verify_scenes(read_golden(kDir + "/scenes.golden"));
  EXPECT_TRUE(rep.passed()) << rep;
}

TEST(Verify, CorruptedGoldenNamesTheSuite) {
  auto f = read_golden(kDir + "/chains.golden");
  for (auto& [k, v] : f.records[5].body)
    if (k == "minimum") v[0] += 1;
  const std::string dir = temp_dir("corrupt");
  write_golden(f, dir + "/chains.golden");
  std::ostringstream out, err;
  EXPECT_EQ(app::run_verify("chain", dir, false, out, err), app::kFailure);
  EXPECT_EQ(out.str().rfind("chain: FAILED", 0), 0u) << out.str();
  EXPECT_NE(out.str().find("seed=6"), std::string::npos) << out.str();
}

TEST(Verify, TinyGridRegressionIsDetected) {
  auto f = read_golden(kDir + "/tiny_grids.golden");
  auto g = grid_from_record(f.records[1]);
  g.edp_energy = g.minimum - 1;
  f.records[1] = to_record(g);
  const auto rep = verify_tiny_grids(f);
  EXPECT_FALSE(rep.passed());
  EXPECT_EQ(rep.failures, 1);
}

TEST(Verify, SingleSuiteSelection) {
  std::ostringstream out, err;
  EXPECT_EQ(app::run_verify("minplus", kDir, false, out, err), app::kOk);
  const std::string text = out.str();
  EXPECT_EQ(text.rfind("minplus: ok", 0), 0u);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
  EXPECT_EQ(app::run_verify("nonsense", kDir, false, out, err), app::kUsage);
}

TEST(Verify, MissingGoldenIsAFailure) {
  std::ostringstream out, err;
  EXPECT_EQ(app::run_verify("scenes", temp_dir("empty"), false, out, err), app::kFailure);
  EXPECT_NE(out.str().find("scenes: FAILED"), std::string::npos);
}
