#include <gtest/gtest.h>

#include <random>

#include "edp/minplus.hpp"
#include "edp/oracle.hpp"

using namespace edp;

namespace {

const LabelSpace kFour = LabelSpace::range(0, 3);
const std::vector<Energy> kSlice{5, 1, 4, 9};

SmoothnessModel linear(Energy lambda, int g) { return {1, g, lambda, {}}; }

std::vector<Energy> random_slice(std::size_t n, std::uint64_t seed, Energy bound = 1000) {
  std::mt19937_64 rng(seed);
  std::vector<Energy> s(n);
  for (auto& v : s) v = Energy(rng() % std::uint64_t(bound));
  return s;
}

}  // namespace

TEST(Sfms, WorkedExample) {
  EXPECT_EQ(apply_sfms(kSlice, kFour, linear(2, 2)), (std::vector<Energy>{3, 1, 3, 5}));
}

TEST(Grms, WorkedExample) {
  EXPECT_EQ(apply_grms(kSlice, kFour, linear(2, 2)), (std::vector<Energy>{3, 1, 3, 5}));
}

TEST(Lrms, WorkedExampleAndPasses) {
  const auto p = lrms_passes(kSlice, 2);
  EXPECT_EQ(p.forward, (std::vector<Energy>{5, 1, 3, 5}));
  EXPECT_EQ(p.backward, (std::vector<Energy>{3, 6, 11, kInfinity}));
  EXPECT_EQ(apply_lrms(kSlice, kFour, linear(2, 2)), (std::vector<Energy>{3, 1, 3, 5}));
}

TEST(Lrms, RejectsQuadraticPrior) {
  EXPECT_THROW(MinPlusKernel<>(kFour, 2, 2, MinPlusOperator::lrms), ConfigError);
  EXPECT_THROW(apply_lrms(kSlice, kFour, {2, 2, 1, {}}), ConfigError);
}

TEST(MinPlus, ConstantSliceIsAFixedPoint) {
  const std::vector<Energy> c(9, 42);
  const auto box = LabelSpace::box(-1, 1, -1, 1);
  for (int l1 : {1, 2}) {
    SmoothnessModel m{l1, 2, 7, {}};
    EXPECT_EQ(apply_sfms(c, box, m), c);
    EXPECT_EQ(apply_grms(c, box, m), c);
    if (l1 == 1) {
      EXPECT_EQ(apply_lrms(c, box, m), c);
    }
  }
}

TEST(MinPlus, ZeroLambdaGivesTheFlatMinimum) {
  const std::vector<Energy> flat(4, 1);
  EXPECT_EQ(apply_sfms(kSlice, kFour, linear(0, 2)), flat);
  EXPECT_EQ(apply_grms(kSlice, kFour, linear(0, 2)), flat);
  EXPECT_EQ(apply_lrms(kSlice, kFour, linear(0, 2)), flat);
}

TEST(MinPlus, EdgeWeightMultipliesLambda) {
  EXPECT_EQ(apply_sfms(kSlice, kFour, linear(1, 2), 2), apply_sfms(kSlice, kFour, linear(2, 2)));
  EXPECT_EQ(apply_lrms(kSlice, kFour, linear(1, 2), 2), apply_sfms(kSlice, kFour, linear(2, 2)));
}

TEST(Grms, BoxQuadraticMatchesSfms) {
  const auto box = LabelSpace::box(-2, 2, -2, 2);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto s = random_slice(25, seed);
    SmoothnessModel m{2, 3, Energy(seed * 13 % 50), {}};
    EXPECT_EQ(apply_grms(s, box, m), apply_sfms(s, box, m)) << "seed " << seed;
  }
}

TEST(Grms, WiderWindowsAgree) {
  const auto box = LabelSpace::box(0, 6, 0, 4);
  const auto s = random_slice(35, 5);
  for (int l1 : {1, 2})
    for (double a : {1.0, 1.5, 2.0, 3.7}) {
      SmoothnessModel m{l1, 2, 40, {}};
      EXPECT_EQ(apply_grms(s, box, m, 1, a), apply_sfms(s, box, m)) << "l1 " << l1 << " a " << a;
    }
  EXPECT_THROW(apply_grms(s, box, linear(1, 2), 1, 0.5), ConfigError);
}

TEST(MinPlus, MatchesExhaustiveOracle) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    std::mt19937_64 rng(seed);
    const int wx = 1 + int(rng() % 6), wy = 1 + int(rng() % 4);
    const auto space = seed % 2 ? LabelSpace::box(0, wx - 1, 0, wy - 1) : LabelSpace::range(-3, wx * wy - 4);
    const int l1 = 1 + int(rng() % 2), g = 1 + int(rng() % 5);
    const Energy wl = Energy(rng() % 300);
    const auto s = random_slice(std::size_t(space.size()), seed * 31, 2000);
    const auto want = oracle::oracle_minplus(s, space, l1, g, wl);
    for (auto op : {MinPlusOperator::sfms, MinPlusOperator::grms, MinPlusOperator::lrms}) {
      if (op == MinPlusOperator::lrms && l1 != 1) continue;
      MinPlusKernel<> k(space, l1, g, op);
      std::vector<Energy> out(s.size());
      k.apply(s, out, wl);
      EXPECT_EQ(out, want) << to_string(op) << " seed " << seed;
    }
  }
}

TEST(MinPlus, InfiniteEntriesSaturate) {
  const std::vector<Energy> s{kInfinity, 3, kInfinity, kInfinity};
  for (auto op : {MinPlusOperator::sfms, MinPlusOperator::grms, MinPlusOperator::lrms}) {
    MinPlusKernel<> k(kFour, 1, 3, op);
    std::vector<Energy> out(4);
    k.apply(s, out, 1000);
    EXPECT_EQ(out, (std::vector<Energy>{1003, 3, 1003, 2003})) << to_string(op);
  }
}

TEST(OperationCounts, PerVertexFormulas) {
  const auto q60 = LabelSpace::range(0, 59);
  const auto box = LabelSpace::box(-13, 13, -7, 7);
  EXPECT_EQ(measure_operations(MinPlusOperator::sfms, q60, 1, 5).per_vertex(), 60);
  EXPECT_EQ(measure_operations(MinPlusOperator::sfms, box, 1, 3).per_vertex(), 405);
  EXPECT_EQ(measure_operations(MinPlusOperator::lrms, q60, 1, 5).per_vertex(), 4);
  EXPECT_EQ(measure_operations(MinPlusOperator::lrms, box, 1, 3).per_vertex(), 7);
  EXPECT_EQ(measure_operations(MinPlusOperator::grms, q60, 2, 3).per_vertex(), 6);
  EXPECT_EQ(measure_operations(MinPlusOperator::grms, box, 2, 3).per_vertex(), 11);
  EXPECT_EQ(measure_operations(MinPlusOperator::grms, box, 2, 3, 1.5).per_vertex(), 2 * (2 * 5 - 1) + 1);
}

TEST(SliceMin, LowestLabelWins) {
  auto m = slice_min(kSlice);
  EXPECT_EQ(m.value, 1);
  EXPECT_EQ(m.label, 1);
  const std::vector<Energy> tie{2, 2};
  m = slice_min(tie);
  EXPECT_EQ(m.value, 2);
  EXPECT_EQ(m.label, 0);
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto s = random_slice(17, seed, 10);
    const auto it = std::min_element(s.begin(), s.end());
    m = slice_min(s);
    EXPECT_EQ(m.value, *it);
    EXPECT_EQ(m.label, it - s.begin());
  }
}

TEST(Operator, ParsesNames) {
  EXPECT_EQ(parse_operator("lrms"), MinPlusOperator::lrms);
  EXPECT_EQ(to_string(MinPlusOperator::grms), "grms");
  EXPECT_THROW(parse_operator("fast"), ConfigError);
}

TEST(Predecessor, MatchesExhaustiveArgmin) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    std::mt19937_64 rng(seed);
    const auto space = seed % 2 ? LabelSpace::box(0, 3, 0, 2) : LabelSpace::range(0, 9);
    const int l1 = 1 + int(rng() % 2), g = 1 + int(rng() % 4);
    const Energy wl = Energy(rng() % 20);
    const auto s = random_slice(std::size_t(space.size()), seed, 30);
    const LabelDistance dist(space, l1, g);
    MinPlusKernel<> k(space, l1, g, MinPlusOperator::sfms);
    std::vector<Energy> out(s.size());
    k.apply(s, out, wl);
    for (Label t = 0; t < space.size(); ++t) {
      Label want = -1;
      for (Label v = 0; v < space.size() && want < 0; ++v)
        if (s[v] + wl * dist(v, t) == out[t]) want = v;
      EXPECT_EQ(find_predecessor(s, space, dist, g, wl, ipow(g, l1), t, out[t], k.last_min()), want)
          << "seed " << seed << " target " << t;
    }
  }
}
