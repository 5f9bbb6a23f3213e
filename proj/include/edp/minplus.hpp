#pragma once

// Min-plus message operator
//
//   out(v') = min_v [ in(v) + w * lambda * min(sum_r |v'_r - v_r|^l1, g^l1) ]
//
// in three interchangeable realizations:
//
//   sfms  straightforward search over all Q source labels.
//   grms  per-dimension windowed search (|u_r| <= ceil(a * g) - 1) composed
//         over the R label dimensions, then clipped by S_min + w*lambda*g^l1.
//   lrms  truncated-linear only: a forward and a backward running-minimum
//         recursion per dimension, combined, then clipped the same way.
//
// All three produce bit-identical results for integer inputs. The Counter
// policy counts candidate comparisons so the per-vertex costs (Q,
// R(2h + 1) + 1 and 3R + 1) can be checked by instrumentation. Window
// borders are padded with the infinity sentinel so every vertex sees the
// same number of candidates; the S_min reduction is not counted.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "edp/grid_model.hpp"

namespace edp {

enum class MinPlusOperator { sfms, grms, lrms };

inline std::string_view to_string(MinPlusOperator op) {
  switch (op) {
    case MinPlusOperator::sfms: return "sfms";
    case MinPlusOperator::grms: return "grms";
    case MinPlusOperator::lrms: return "lrms";
  }
  return "?";
}

inline MinPlusOperator parse_operator(std::string_view name) {
  if (name == "sfms") return MinPlusOperator::sfms;
  if (name == "grms") return MinPlusOperator::grms;
  if (name == "lrms") return MinPlusOperator::lrms;
  throw ConfigError("unknown operator '" + std::string(name) + "' (expected sfms, grms or lrms)");
}

/// Counter policy that compiles away.
struct NoCount {
  void add(std::int64_t) noexcept {}
};

struct CountComparisons {
  std::int64_t comparisons = 0;
  void add(std::int64_t n) noexcept { comparisons += n; }
};

struct OperatorStats {
  std::int64_t comparisons = 0;
  std::int64_t vertices = 0;

  double per_vertex() const noexcept {
    return vertices == 0 ? 0.0 : double(comparisons) / double(vertices);
  }
};

struct SliceMin {
  Energy value = kInfinity;
  Label label = 0;
};

/// Minimum value and its lowest label.
inline SliceMin slice_min(std::span<const Energy> slice) {
  if (slice.empty()) throw InputError("slice_min of an empty slice");
  SliceMin m{slice[0], 0};
  for (std::size_t v = 1; v < slice.size(); ++v)
    if (slice[v] < m.value) m = {slice[v], Label(v)};
  return m;
}

/// Half width h of the GRMS window, h = ceil(a * g) - 1.
inline int window_half_width(int g, double window_scale) {
  if (!(window_scale >= 1.0)) throw ConfigError("window scale must be >= 1");
  if (g < 1) throw ConfigError("truncation threshold g must be >= 1");
  return int(std::ceil(window_scale * g)) - 1;
}

/// Reusable operator instance: tables and scratch buffers are owned by the
/// kernel, so one kernel must not be shared between threads. `in` and `out`
/// must not alias.
template <class Counter = NoCount>
class MinPlusKernel {
 public:
  MinPlusKernel(const LabelSpace& space, int l1, int g, MinPlusOperator op,
                double window_scale = 1.0)
      : space_(space), l1_(l1), g_(g), cap_(ipow(g, l1)), op_(op) {
    if (l1 != 1 && l1 != 2) throw ConfigError("prior exponent l1 must be 1 or 2");
    if (op == MinPlusOperator::lrms && l1 != 1)
      throw ConfigError("lrms requires the truncated linear prior (l1 = 1)");
    half_ = window_half_width(g, window_scale);

    int max_extent = 1;
    for (int r = 0; r < space_.dims(); ++r) max_extent = std::max(max_extent, space_.extent(r));
    dist_.resize(space_.dims());
    for (int r = 0; r < space_.dims(); ++r) {
      const int e = space_.extent(r);
      dist_[r].resize(std::size_t(e) * e);
      for (int a = 0; a < e; ++a)
        for (int b = 0; b < e; ++b) dist_[r][std::size_t(a) * e + b] = ipow(std::abs(a - b), l1);
    }
    const auto q = std::size_t(space_.size());
    work_a_.resize(q);
    work_b_.resize(q);
    pad_.resize(std::size_t(max_extent) + 2 * std::size_t(half_));
    line_.resize(std::size_t(max_extent));
    penalty_.resize(std::size_t(half_) + 1);
  }

  MinPlusOperator op() const noexcept { return op_; }
  int half_width() const noexcept { return half_; }
  const LabelSpace& space() const noexcept { return space_; }
  Counter& counter() noexcept { return counter_; }
  const Counter& counter() const noexcept { return counter_; }
  /// S_min of the most recent input slice.
  SliceMin last_min() const noexcept { return min_; }

  /// out = M(in) with edge penalty scale `weighted_lambda` = w * lambda.
  void apply(std::span<const Energy> in, std::span<Energy> out, Energy weighted_lambda) {
    const auto q = std::size_t(space_.size());
    if (in.size() != q || out.size() != q) throw InputError("slice length does not match label space");
    if (weighted_lambda < 0) throw InputError("negative edge penalty");
    min_ = slice_min(in);
    switch (op_) {
      case MinPlusOperator::sfms: sfms(in, out, weighted_lambda); break;
      case MinPlusOperator::grms: separable(in, out, weighted_lambda, false); break;
      case MinPlusOperator::lrms: separable(in, out, weighted_lambda, true); break;
    }
  }

 private:
  void sfms(std::span<const Energy> in, std::span<Energy> out, Energy wl) {
    const int dims = space_.dims();
    const int e0 = space_.extent(0);
    const Label q = space_.size();
    const Label rows = q / e0;
    std::vector<int> oc(dims), ic(dims);
    for (Label vo = 0; vo < q; ++vo) {
      for (int r = 0; r < dims; ++r) oc[r] = space_.coordinate(vo, r);
      const Energy* d0 = &dist_[0][std::size_t(oc[0]) * e0];
      Energy best = kInfinity;
      std::fill(ic.begin(), ic.end(), 0);
      for (Label row = 0; row < rows; ++row) {
        Energy partial = 0;
        for (int r = 1; r < dims; ++r)
          partial += dist_[r][std::size_t(oc[r]) * space_.extent(r) + ic[r]];
        const Energy* src = in.data() + std::size_t(row) * e0;
        for (int c = 0; c < e0; ++c) {
          const Energy cand = saturating_add(src[c], wl * std::min(partial + d0[c], cap_));
          best = std::min(best, cand);
        }
        for (int r = 1; r < dims; ++r) {
          if (++ic[r] < space_.extent(r)) break;
          ic[r] = 0;
        }
      }
      out[vo] = best;
    }
    counter_.add(std::int64_t(q) * q);
  }

  void separable(std::span<const Energy> in, std::span<Energy> out, Energy wl, bool linear) {
    const int dims = space_.dims();
    const Label q = space_.size();
    for (int u = 0; u <= half_; ++u) penalty_[u] = wl * ipow(u, l1_);

    const Energy* src = in.data();
    for (int r = 0; r < dims; ++r) {
      Energy* dst = (r == dims - 1) ? out.data() : ((r % 2 == 0) ? work_a_.data() : work_b_.data());
      const int e = space_.extent(r);
      const Label s = space_.stride(r);
      const Label outer = q / (s * e);
      for (Label o = 0; o < outer; ++o)
        for (Label i = 0; i < s; ++i) {
          const std::size_t base = std::size_t(o) * s * e + i;
          if (linear)
            linear_line(src + base, dst + base, s, e, wl);
          else
            window_line(src + base, dst + base, s, e);
        }
      src = dst;
    }
    const Energy clip = saturating_add(min_.value, wl * cap_);
    for (Label v = 0; v < q; ++v) out[v] = std::min(out[v], clip);
    counter_.add(std::int64_t(q));
  }

  void window_line(const Energy* src, Energy* dst, Label stride, int extent) {
    const int h = half_;
    std::fill(pad_.begin(), pad_.begin() + h, kInfinity);
    for (int c = 0; c < extent; ++c) pad_[h + c] = src[std::size_t(c) * stride];
    std::fill(pad_.begin() + h + extent, pad_.begin() + 2 * h + extent, kInfinity);
    for (int c = 0; c < extent; ++c) {
      const Energy* centre = pad_.data() + h + c;
      Energy best = centre[0];
      for (int u = 1; u <= h; ++u) {
        best = std::min(best, saturating_add(centre[-u], penalty_[u]));
        best = std::min(best, saturating_add(centre[u], penalty_[u]));
      }
      dst[std::size_t(c) * stride] = best;
    }
    counter_.add(std::int64_t(extent) * (2 * h + 1));
  }

  void linear_line(const Energy* src, Energy* dst, Label stride, int extent, Energy wl) {
    // forward: f(c) = min(f(c - 1) + wl, s(c)), f(-1) = inf
    Energy prev = kInfinity;
    for (int c = 0; c < extent; ++c) {
      prev = std::min(saturating_add(prev, wl), src[std::size_t(c) * stride]);
      line_[c] = prev;
    }
    // backward over strictly larger labels: b(c) = min(b(c + 1), s(c + 1)) + wl
    Energy next_b = kInfinity;
    Energy next_s = kInfinity;
    for (int c = extent - 1; c >= 0; --c) {
      const Energy b = saturating_add(std::min(next_b, next_s), wl);
      dst[std::size_t(c) * stride] = std::min(line_[c], b);
      next_b = b;
      next_s = src[std::size_t(c) * stride];
    }
    counter_.add(std::int64_t(extent) * 3);
  }

  LabelSpace space_;
  int l1_;
  int g_;
  Energy cap_;
  MinPlusOperator op_;
  int half_ = 0;
  std::vector<std::vector<Energy>> dist_;
  std::vector<Energy> work_a_, work_b_, pad_, line_, penalty_;
  SliceMin min_;
  Counter counter_;
};

using LabelSlice = std::vector<Energy>;

/// The forward and backward running minima of a single 1D truncated-linear
/// pass, before they are combined. Exposed for inspection and tests.
struct LinearPasses {
  LabelSlice forward;
  LabelSlice backward;
};

inline LinearPasses lrms_passes(std::span<const Energy> line, Energy weighted_lambda) {
  LinearPasses p{LabelSlice(line.size()), LabelSlice(line.size())};
  Energy prev = kInfinity;
  for (std::size_t c = 0; c < line.size(); ++c) {
    prev = std::min(saturating_add(prev, weighted_lambda), line[c]);
    p.forward[c] = prev;
  }
  Energy next_b = kInfinity, next_s = kInfinity;
  for (std::size_t c = line.size(); c-- > 0;) {
    p.backward[c] = saturating_add(std::min(next_b, next_s), weighted_lambda);
    next_b = p.backward[c];
    next_s = line[c];
  }
  return p;
}

namespace detail {
inline LabelSlice apply_operator(std::span<const Energy> slice, const LabelSpace& space,
                                 const SmoothnessModel& model, int edge_weight,
                                 MinPlusOperator op, double window_scale) {
  model.validate();
  MinPlusKernel<> kernel(space, model.l1, model.g, op, window_scale);
  LabelSlice out(slice.size());
  kernel.apply(slice, out, Energy(edge_weight) * model.lambda);
  return out;
}
}  // namespace detail

inline LabelSlice apply_sfms(std::span<const Energy> slice, const LabelSpace& space,
                             const SmoothnessModel& model, int edge_weight = 1) {
  return detail::apply_operator(slice, space, model, edge_weight, MinPlusOperator::sfms, 1.0);
}

inline LabelSlice apply_grms(std::span<const Energy> slice, const LabelSpace& space,
                             const SmoothnessModel& model, int edge_weight = 1,
                             double window_scale = 1.0) {
  return detail::apply_operator(slice, space, model, edge_weight, MinPlusOperator::grms, window_scale);
}

inline LabelSlice apply_lrms(std::span<const Energy> slice, const LabelSpace& space,
                             const SmoothnessModel& model, int edge_weight = 1) {
  return detail::apply_operator(slice, space, model, edge_weight, MinPlusOperator::lrms, 1.0);
}

/// Comparisons per vertex measured by running the instrumented kernel.
inline OperatorStats measure_operations(MinPlusOperator op, const LabelSpace& space, int l1, int g,
                                        double window_scale = 1.0) {
  MinPlusKernel<CountComparisons> kernel(space, l1, g, op, window_scale);
  LabelSlice in(std::size_t(space.size()), 0), out(in.size());
  kernel.apply(in, out, 1);
  return {kernel.counter().comparisons, std::int64_t(space.size())};
}

/// Lowest source label v achieving in(v) + penalty(v, target) == value,
/// where `value` is M(in)(target). Scans the box |u_r| <= g - 1 around the
/// target plus the clip candidate (the lowest-index slice minimum), which
/// together cover every label that can attain the minimum.
inline Label find_predecessor(std::span<const Energy> in, const LabelSpace& space,
                              const LabelDistance& dist, int g, Energy weighted_lambda,
                              Energy truncation, Label target, Energy value, SliceMin smin) {
  Label best = space.size();
  if (saturating_add(smin.value, weighted_lambda * truncation) == value) best = smin.label;

  const int dims = space.dims();
  int lo[8], hi[8], c[8];
  if (dims > 8) throw InputError("too many label dimensions");
  for (int r = 0; r < dims; ++r) {
    const int t = space.coordinate(target, r);
    lo[r] = std::max(0, t - (g - 1));
    hi[r] = std::min(space.extent(r) - 1, t + (g - 1));
    c[r] = lo[r];
  }
  while (true) {
    Label v = 0;
    for (int r = 0; r < dims; ++r) v += c[r] * space.stride(r);
    if (v >= best) break;
    if (in[v] + weighted_lambda * dist(v, target) == value) {
      best = v;
      break;
    }
    int r = 0;
    for (; r < dims; ++r) {
      if (++c[r] <= hi[r]) break;
      c[r] = lo[r];
    }
    if (r == dims) break;
  }
  if (best == space.size()) throw std::logic_error("no predecessor attains the message value");
  return best;
}

}  // namespace edp
