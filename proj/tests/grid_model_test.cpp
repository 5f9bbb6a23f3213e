#include <gtest/gtest.h>

#include "edp/grid_model.hpp"
#include "edp/oracle.hpp"

using namespace edp;

TEST(LabelSpace, StereoRangeIndex) {
  const auto s = LabelSpace::range(0, 59);
  EXPECT_EQ(s.size(), 60);
  EXPECT_EQ(s.index({59}), 59);
  EXPECT_THROW(s.index({60}), InputError);
  EXPECT_THROW(s.index({-1}), InputError);
}

TEST(LabelSpace, MotionBoxOriginAndRoundTrip) {
  const auto s = LabelSpace::box(-13, 13, -7, 7);
  EXPECT_EQ(s.size(), 405);
  EXPECT_EQ(s.index({-13, -7}), 0);
  EXPECT_EQ(s.index({13, 7}), 404);
  for (Label v = 0; v < s.size(); ++v) EXPECT_EQ(s.index(s.offsets(v)), v);
  EXPECT_THROW(s.index({0}), InputError);
  EXPECT_THROW(s.index({14, 0}), InputError);
}

TEST(LabelSpace, RejectsEmptyDimension) { EXPECT_THROW(LabelSpace::range(3, 2), InputError); }

TEST(SaturatingAdd, ClampsAtInfinity) {
  EXPECT_EQ(saturating_add(kInfinity, 5), kInfinity);
  EXPECT_EQ(saturating_add(kInfinity - 2, 5), kInfinity);
  EXPECT_EQ(saturating_add(3, 4), 7);
}

TEST(Energy, ConstantFieldHasNoSmoothness) {
  auto vol = CostVolume::from_values(2, 2, LabelSpace::range(0, 1), 10, {1, 9, 2, 9, 3, 9, 4, 9});
  SmoothnessModel m{1, 1, 5, {}};
  const auto e = evaluate_energy(vol, m, DisparityField(2, 2, 0));
  EXPECT_EQ(e.total(), 10);
  EXPECT_EQ(e.smoothness, 0);
}

TEST(Energy, SingleEdgeTruncatedLinear) {
  auto vol = CostVolume::from_values(2, 1, LabelSpace::range(0, 1), 10, {0, 0, 0, 0});
  SmoothnessModel m{1, 1, 3, {}};
  DisparityField f(2, 1);
  f.labels = {0, 1};
  EXPECT_EQ(evaluate_energy(vol, m, f).total(), 3);
}

TEST(Energy, EdgeWeightsScaleThePenalty) {
  auto vol = CostVolume::from_values(2, 1, LabelSpace::range(0, 3), 10, std::vector<Cost>(8, 0));
  SmoothnessModel m{2, 2, 3, EdgeWeights(2, 1, 2)};
  DisparityField f(2, 1);
  f.labels = {0, 3};
  // min(9, 4) * 3 * 2
  EXPECT_EQ(evaluate_energy(vol, m, f).total(), 24);
}

TEST(Energy, MatchesDirectSummation) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto inst = oracle::random_tiny_instance(seed);
    std::mt19937_64 rng(seed * 77);
    DisparityField f(4, 4);
    for (auto& v : f.labels) v = Label(rng() % 3);
    Energy want = 0;
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 4; ++x) {
        want += inst.volume.at(x, y, f.at(x, y));
        for (auto [dx, dy] : {std::pair{1, 0}, std::pair{0, 1}}) {
          if (x + dx >= 4 || y + dy >= 4) continue;
          want += inst.model.lambda * oracle::truncated_distance(inst.volume.space(), f.at(x, y),
                                                                 f.at(x + dx, y + dy), inst.model.l1, inst.model.g);
        }
      }
    EXPECT_EQ(evaluate_energy(inst.volume, inst.model, f).total(), want) << "seed " << seed;
  }
}

TEST(Energy, RejectsMismatchedField) {
  auto vol = CostVolume(2, 2, LabelSpace::range(0, 1), 10);
  EXPECT_THROW(evaluate_energy(vol, {}, DisparityField(3, 2)), InputError);
  DisparityField bad(2, 2, 2);
  EXPECT_THROW(evaluate_energy(vol, {}, bad), InputError);
}

TEST(Energy, PerPixelRoundsHalfUp) {
  EnergyBreakdown e{40, 0, 4};
  EXPECT_EQ(e.per_pixel_centi(), 1000);
  e = {1, 0, 8};  // 0.125
  EXPECT_EQ(e.per_pixel_centi(), 13);
}

TEST(CostVolume, ValidatesRange) {
  EXPECT_THROW(CostVolume::from_values(1, 1, LabelSpace::range(0, 1), 5, {1, 6}), InputError);
  EXPECT_THROW(CostVolume::from_values(1, 1, LabelSpace::range(0, 1), 5, {1}), InputError);
  EXPECT_THROW(CostVolume(0, 1, LabelSpace::range(0, 1), 5), InputError);
}

TEST(DataArgmin, LowestLabelOnTies) {
  auto vol = CostVolume::from_values(2, 1, LabelSpace::range(0, 2), 9, {4, 2, 2, 7, 7, 7});
  const auto f = data_argmin(vol);
  EXPECT_EQ(f.labels, (std::vector<Label>{1, 0}));
}
