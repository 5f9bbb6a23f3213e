#pragma once

// Disparity-space image construction: truncated L1/L2 matching costs,
// the triplet (composite) cost, the mean-cost lambda rule and the
// gradient-adaptive edge weights.

#include <cmath>
#include <cstdlib>

#include "edp/grid_model.hpp"

namespace edp {

enum class OutOfBounds {
  penalize,  ///< matches falling outside the target image cost C_max
  clamp,     ///< sample the nearest border pixel instead
};

struct MatchConfig {
  /// Cost exponent l2 (1: absolute difference, 2: squared difference).
  int cost_exponent = 2;
  /// dims() == 1 shifts along x (stereo); dims() == 2 shifts along x and y.
  LabelSpace labels;
  /// The target sample for label v is taken at x + direction * v.
  int direction = 1;
  bool composite = false;
  OutOfBounds out_of_bounds = OutOfBounds::penalize;

  Cost c_max() const noexcept { return Cost(ipow(100, cost_exponent)); }

  void validate() const {
    if (cost_exponent != 1 && cost_exponent != 2) throw ConfigError("cost exponent l2 must be 1 or 2");
    if (labels.dims() != 1 && labels.dims() != 2)
      throw ConfigError("label space must have 1 (stereo) or 2 (motion) dimensions");
    if (direction != 1 && direction != -1) throw ConfigError("match direction must be +1 or -1");
  }
};

namespace detail {

inline std::int64_t isqrt(std::int64_t n) {
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

/// Truncated pixel dissimilarity. Color uses the Euclidean norm; for l2 = 1
/// the norm is floored to an integer.
inline Cost pixel_cost(const PixelGrid& a, int ax, int ay, const PixelGrid& b, int bx, int by,
                       int l2, Cost c_max) {
  std::int64_t sq = 0;
  for (int c = 0; c < a.channels(); ++c) {
    const std::int64_t d = int(a.at(ax, ay, c)) - int(b.at(bx, by, c));
    sq += d * d;
  }
  const std::int64_t raw = l2 == 2 ? sq : isqrt(sq);
  return Cost(std::min<std::int64_t>(raw, c_max));
}

inline void check_pair(const PixelGrid& a, const PixelGrid& b) {
  if (a.width() != b.width() || a.height() != b.height())
    throw InputError("images differ in size");
  if (a.channels() != b.channels()) throw InputError("images differ in channel count");
}

/// Cost of matching ref(x, y) against target at (x, y) + direction * v.
inline Cost match_cost(const PixelGrid& ref, const PixelGrid& target, const MatchConfig& cfg,
                       int x, int y, Label v, int direction) {
  const LabelSpace& s = cfg.labels;
  int tx = x + direction * s.offset(v, 0);
  int ty = s.dims() > 1 ? y + direction * s.offset(v, 1) : y;
  if (tx < 0 || ty < 0 || tx >= ref.width() || ty >= ref.height()) {
    if (cfg.out_of_bounds == OutOfBounds::penalize) return cfg.c_max();
    tx = std::clamp(tx, 0, ref.width() - 1);
    ty = std::clamp(ty, 0, ref.height() - 1);
  }
  return pixel_cost(target, tx, ty, ref, x, y, cfg.cost_exponent, cfg.c_max());
}

}  // namespace detail

/// C(x, v) = min(|I_target(x + v) - I_ref(x)|^l2, C_max).
inline CostVolume build_cost_volume(const PixelGrid& ref, const PixelGrid& target,
                                    const MatchConfig& cfg) {
  cfg.validate();
  detail::check_pair(ref, target);
  CostVolume vol(ref.width(), ref.height(), cfg.labels, cfg.c_max());
  for (int y = 0; y < ref.height(); ++y)
    for (int x = 0; x < ref.width(); ++x)
      for (Label v = 0; v < cfg.labels.size(); ++v)
        vol.set(x, y, v, detail::match_cost(ref, target, cfg, x, y, v, cfg.direction));
  return vol;
}

/// Occlusion-tolerant triplet cost: min(C_mid->right(x, v), C_mid->left(x, -v)).
/// Assumes the two outer views are symmetric about the middle one.
inline CostVolume build_composite_cost(const PixelGrid& middle, const PixelGrid& right,
                                       const PixelGrid& left, const MatchConfig& cfg) {
  cfg.validate();
  detail::check_pair(middle, right);
  detail::check_pair(middle, left);
  CostVolume vol(middle.width(), middle.height(), cfg.labels, cfg.c_max());
  for (int y = 0; y < middle.height(); ++y)
    for (int x = 0; x < middle.width(); ++x)
      for (Label v = 0; v < cfg.labels.size(); ++v) {
        const Cost fwd = detail::match_cost(middle, right, cfg, x, y, v, cfg.direction);
        const Cost bwd = detail::match_cost(middle, left, cfg, x, y, v, -cfg.direction);
        vol.set(x, y, v, std::min(fwd, bwd));
      }
  return vol;
}

/// lambda = floor(l2 * <C> / (l1 * g^l1)), <C> the mean over all N * Q costs.
inline Energy estimate_lambda(const CostVolume& volume, int l1, int l2, int g) {
  if (g < 1) throw ConfigError("truncation threshold g must be >= 1");
  if (l1 < 1 || l2 < 1) throw ConfigError("exponents must be positive");
  const __int128 num = __int128(l2) * volume.sum();
  const __int128 den = __int128(volume.count()) * l1 * ipow(g, l1);
  return Energy(num / den);
}

/// Weight 2 across edges whose luminance step is below `threshold`, else 1.
inline EdgeWeights build_edge_weights(const PixelGrid& ref, int threshold = 10) {
  EdgeWeights w(ref.width(), ref.height());
  for (int y = 0; y < ref.height(); ++y)
    for (int x = 0; x < ref.width(); ++x) {
      const int l = ref.luminance(x, y);
      if (x + 1 < ref.width())
        w.set_horizontal(x, y, std::abs(ref.luminance(x + 1, y) - l) < threshold ? 2 : 1);
      if (y + 1 < ref.height())
        w.set_vertical(x, y, std::abs(ref.luminance(x, y + 1) - l) < threshold ? 2 : 1);
    }
  return w;
}

}  // namespace edp
