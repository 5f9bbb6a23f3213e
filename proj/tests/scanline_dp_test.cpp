#include <gtest/gtest.h>

#include "edp/oracle.hpp"
#include "edp/scanline_dp.hpp"

using namespace edp;

namespace {

ScanlineProblem tie_chain() {
  ScanlineProblem p;
  p.labels = LabelSpace::range(0, 1);
  p.costs = {0, 3, 2, 0, 0, 2};
  p.model = {1, 1, 1, {}};
  return p;
}

constexpr MinPlusOperator kOps[] = {MinPlusOperator::sfms, MinPlusOperator::grms, MinPlusOperator::lrms};

}  // namespace

TEST(ForwardPass, WorkedExample) {
  for (auto op : kOps) {
    const auto fwd = forward_pass(tie_chain(), op);
    EXPECT_EQ(fwd.sums, (std::vector<Energy>{0, 3, 2, 1, 2, 3})) << to_string(op);
  }
}

TEST(ForwardPass, SingleSliceIsTheCost) {
  ScanlineProblem p;
  p.labels = LabelSpace::range(0, 2);
  p.costs = {4, 1, 7};
  p.model = {1, 2, 3, {}};
  EXPECT_EQ(forward_pass(p).sums, (std::vector<Energy>{4, 1, 7}));
}

TEST(ForwardPass, ZeroLambdaDecouples) {
  ScanlineProblem p = oracle::random_chain(11);
  p.model.lambda = 0;
  const auto fwd = forward_pass(p);
  const Label q = p.labels.size();
  Energy prefix = 0;
  for (int x = 0; x < p.length(); ++x) {
    for (Label v = 0; v < q; ++v) EXPECT_EQ(fwd.sums[x * q + v], p.costs[x * q + v] + prefix);
    prefix += *std::min_element(p.slice(x).begin(), p.slice(x).end());
  }
}

TEST(Backtrack, TieBreaksToLowestLabel) {
  for (auto op : kOps) {
    const auto sol = backtrack(forward_pass(tie_chain(), op));
    EXPECT_EQ(sol.path, (std::vector<Label>{0, 0, 0})) << to_string(op);
    EXPECT_EQ(sol.energy, 2);
  }
}

TEST(Backtrack, ConstantCostsGiveLabelZero) {
  ScanlineProblem p;
  p.labels = LabelSpace::range(0, 3);
  p.costs.assign(5 * 4, 6);
  p.model = {1, 2, 4, {}};
  EXPECT_EQ(backtrack(forward_pass(p)).path, std::vector<Label>(5, 0));
}

TEST(Backtrack, MatchesEnumerationOnRandomChains) {
  for (std::uint64_t seed = 1000; seed < 1100; ++seed) {
    const auto p = oracle::random_chain(seed);
    const auto opt = oracle::oracle_chain(p);
    for (auto op : kOps) {
      if (op == MinPlusOperator::lrms && p.model.l1 != 1) continue;
      const auto sol = backtrack(forward_pass(p, op));
      EXPECT_EQ(sol.energy, opt.minimum) << "seed " << seed;
      EXPECT_EQ(path_energy(p, sol.path), opt.minimum) << "seed " << seed;
    }
  }
}

TEST(Marginals, SingleVertexIsTheCost) {
  ScanlineProblem p;
  p.labels = LabelSpace::range(0, 2);
  p.costs = {4, 1, 7};
  p.model = {1, 2, 3, {}};
  EXPECT_EQ(bidirectional_marginals(p), (std::vector<Energy>{4, 1, 7}));
  EXPECT_EQ(marginal_argmin_solution(bidirectional_marginals(p), 3), (std::vector<Label>{1}));
}

TEST(Marginals, EveryMinimumEqualsTheChainOptimum) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto p = oracle::random_chain(seed);
    const auto fwd = forward_pass(p);
    const Energy best = slice_min(fwd.slice(p.length() - 1)).value;
    const auto marg = bidirectional_marginals(p);
    const Label q = p.labels.size();
    for (int x = 0; x < p.length(); ++x)
      EXPECT_EQ(slice_min(std::span<const Energy>(marg).subspan(std::size_t(x) * q, q)).value, best)
          << "seed " << seed << " x " << x;
  }
}

TEST(Marginals, TieInstanceUsesLowestLabel) {
  const auto marg = bidirectional_marginals(tie_chain());
  EXPECT_EQ(marginal_argmin_solution(marg, 2), (std::vector<Label>{0, 0, 0}));
}

TEST(Marginals, UniqueOptimumMatchesBacktrack) {
  int unique = 0;
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    const auto p = oracle::random_chain(seed);
    const auto opt = oracle::oracle_chain(p);
    if (!opt.unique()) continue;
    ++unique;
    const auto path = backtrack(forward_pass(p)).path;
    EXPECT_EQ(path, opt.optimal_paths[0]);
    EXPECT_EQ(marginal_argmin_solution(bidirectional_marginals(p), p.labels.size()), path) << "seed " << seed;
  }
  EXPECT_GT(unique, 20);
}

TEST(ScanlineProblem, RejectsBadShapes) {
  ScanlineProblem p = tie_chain();
  p.edge_weights = {1};
  EXPECT_THROW(forward_pass(p), InputError);
  p.edge_weights.clear();
  p.costs.pop_back();
  EXPECT_THROW(forward_pass(p), InputError);
}

TEST(SolveScanlines, RowsAreIndependentChains) {
  const auto inst = oracle::random_tiny_instance(4, 5, 3, 4);
  const auto field = solve_scanlines(inst.volume, inst.model, MinPlusOperator::grms);
  for (int y = 0; y < 3; ++y) {
    ScanlineProblem row{inst.volume.space(), {}, inst.model, {}};
    for (int x = 0; x < 5; ++x) {
      auto s = inst.volume.slice(x, y);
      row.costs.insert(row.costs.end(), s.begin(), s.end());
    }
    const auto opt = oracle::oracle_chain(row);
    std::vector<Label> got(field.labels.begin() + y * 5, field.labels.begin() + y * 5 + 5);
    EXPECT_EQ(path_energy(row, got), opt.minimum);
  }
}
