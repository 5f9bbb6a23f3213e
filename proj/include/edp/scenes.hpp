#pragma once

// Small deterministic synthetic scenes (stereo and motion, pair and triplet)
// with known ground truth, used for regression traces and demos.

#include <random>
#include <string>
#include <vector>

#include "edp/dsi_builder.hpp"
#include "edp/edp_solver.hpp"

namespace edp {

struct Scene {
  std::string name;
  bool motion = false;
  bool composite = false;
  /// ref, target and, for triplets, the opposite view.
  std::vector<PixelGrid> images;
  MatchConfig match;
  int l1 = 1;
  int g = 3;
  DisparityField truth;
};

namespace detail {

inline PixelGrid texture(std::mt19937_64& rng, int w, int h, int channels) {
  PixelGrid img(w, h, channels);
  for (auto& s : img.samples()) s = std::uint8_t(rng() % 256);
  return img;
}

/// Splats `src` into a view where pixel (x, y) moves by sign * offset(label),
/// nearer (larger |offset|) layers drawn last; holes get fresh texture; a
/// little noise in [-2, 2] is added.
inline PixelGrid warp(const PixelGrid& src, const DisparityField& truth, const LabelSpace& space, int sign,
                      std::mt19937_64& rng) {
  PixelGrid out = texture(rng, src.width(), src.height(), src.channels());
  std::vector<std::pair<int, int>> order;
  for (int y = 0; y < src.height(); ++y)
    for (int x = 0; x < src.width(); ++x) order.emplace_back(y * src.width() + x, 0);
  auto magnitude = [&](int p) {
    const Label v = truth.labels[p];
    int m = std::abs(space.offset(v, 0));
    if (space.dims() > 1) m += std::abs(space.offset(v, 1));
    return m;
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return magnitude(a.first) < magnitude(b.first); });
  for (auto [p, unused] : order) {
    const int x = p % src.width(), y = p / src.width();
    const Label v = truth.labels[p];
    const int tx = x + sign * space.offset(v, 0);
    const int ty = y + (space.dims() > 1 ? sign * space.offset(v, 1) : 0);
    if (tx < 0 || ty < 0 || tx >= src.width() || ty >= src.height()) continue;
    for (int c = 0; c < src.channels(); ++c) out.at(tx, ty, c) = src.at(x, y, c);
  }
  for (auto& s : out.samples()) s = std::uint8_t(std::clamp(int(s) + int(rng() % 5) - 2, 0, 255));
  return out;
}

inline DisparityField layered_truth(int w, int h, Label background, Label object) {
  DisparityField f(w, h, background);
  for (int y = h / 4; y < (3 * h) / 4; ++y)
    for (int x = w / 3; x < (3 * w) / 4; ++x) f.at(x, y) = object;
  return f;
}

inline Scene make_scene(const std::string& name, bool motion, bool composite, int channels, int w, int h,
                        LabelSpace labels, Label background, Label object, int l1, int g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Scene s;
  s.name = name;
  s.motion = motion;
  s.composite = composite;
  s.l1 = l1;
  s.g = g;
  s.match.cost_exponent = 2;
  s.match.labels = labels;
  s.match.composite = composite;
  // stereo: the reference pixel x appears at x - d in the right view
  s.match.direction = motion ? 1 : -1;
  s.truth = layered_truth(w, h, background, object);
  PixelGrid ref = texture(rng, w, h, channels);
  PixelGrid target = warp(ref, s.truth, labels, s.match.direction, rng);
  s.images = {ref, target};
  if (composite) s.images.push_back(warp(ref, s.truth, labels, -s.match.direction, rng));
  return s;
}

}  // namespace detail

inline std::vector<Scene> bundled_scenes() {
  const LabelSpace disp = LabelSpace::range(0, 7);
  const LabelSpace flow = LabelSpace::box(-3, 3, -2, 2);
  return {
      detail::make_scene("stereo-gray", false, false, 1, 40, 30, disp, 2, 6, 1, 5, 101),
      detail::make_scene("stereo-color", false, false, 3, 36, 28, disp, 1, 5, 1, 5, 202),
      detail::make_scene("stereo-triplet", false, true, 1, 36, 28, disp, 2, 6, 2, 3, 303),
      detail::make_scene("motion-pair", true, false, 1, 32, 24, flow, flow.index({1, 0}), flow.index({-2, 1}), 1,
                         3, 404),
      detail::make_scene("motion-triplet", true, true, 1, 32, 24, flow, flow.index({1, 0}), flow.index({-2, 1}), 2,
                         3, 505),
  };
}

inline Scene bundled_scene(const std::string& name) {
  for (auto& s : bundled_scenes())
    if (s.name == name) return s;
  throw InputError("unknown bundled scene '" + name + "'");
}

inline CostVolume scene_volume(const Scene& s) {
  return s.composite ? build_composite_cost(s.images[0], s.images[1], s.images[2], s.match)
                     : build_cost_volume(s.images[0], s.images[1], s.match);
}

/// Smoothness model with the mean-cost lambda and adaptive edge weights.
inline SmoothnessModel scene_model(const Scene& s, const CostVolume& volume) {
  SmoothnessModel m;
  m.l1 = s.l1;
  m.g = s.g;
  m.lambda = estimate_lambda(volume, s.l1, s.match.cost_exponent, s.g);
  m.weights = build_edge_weights(s.images[0]);
  return m;
}

}  // namespace edp
