#pragma once

// Core data model: label spaces, pixel grids, cost volumes, smoothness
// priors and the reference energy evaluator.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace edp {

/// Fixed-point energy unit. All costs, penalties and sums are integers.
using Energy = std::int64_t;
/// Storage type for a single matching cost inside a cost volume.
using Cost = std::int32_t;
/// Linear index into a LabelSpace.
using Label = std::int32_t;

inline constexpr Energy kInfinity = std::numeric_limits<Energy>::max();

/// a + b that saturates at kInfinity instead of wrapping. b must be >= 0.
constexpr Energy saturating_add(Energy a, Energy b) noexcept {
  Energy r = 0;
  if (__builtin_add_overflow(a, b, &r)) return kInfinity;
  return r;
}

class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integer power for small non-negative exponents.
constexpr Energy ipow(Energy base, int exp) noexcept {
  Energy r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

/// R-dimensional box of integer label offsets. Dimension 0 varies fastest in
/// the linear index.
class LabelSpace {
 public:
  LabelSpace() : LabelSpace({0}, {0}) {}

  LabelSpace(std::vector<int> lower, std::vector<int> upper)
      : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.empty() || lower_.size() != upper_.size())
      throw InputError("label space needs matching, non-empty bounds");
    strides_.resize(lower_.size());
    std::int64_t q = 1;
    for (std::size_t r = 0; r < lower_.size(); ++r) {
      if (upper_[r] < lower_[r])
        throw InputError("label space dimension " + std::to_string(r) + " is empty");
      strides_[r] = static_cast<Label>(q);
      q *= static_cast<std::int64_t>(upper_[r]) - lower_[r] + 1;
      if (q > std::numeric_limits<Label>::max())
        throw InputError("label space too large");
    }
    size_ = static_cast<Label>(q);
  }

  static LabelSpace range(int lo, int hi) { return LabelSpace({lo}, {hi}); }
  static LabelSpace box(int lo_x, int hi_x, int lo_y, int hi_y) {
    return LabelSpace({lo_x, lo_y}, {hi_x, hi_y});
  }

  int dims() const noexcept { return static_cast<int>(lower_.size()); }
  Label size() const noexcept { return size_; }
  int lower(int r) const { return lower_.at(r); }
  int upper(int r) const { return upper_.at(r); }
  int extent(int r) const { return upper_.at(r) - lower_.at(r) + 1; }
  Label stride(int r) const { return strides_.at(r); }

  Label index(std::span<const int> offsets) const {
    if (offsets.size() != lower_.size())
      throw InputError("label offset has wrong dimensionality");
    Label idx = 0;
    for (std::size_t r = 0; r < lower_.size(); ++r) {
      if (offsets[r] < lower_[r] || offsets[r] > upper_[r])
        throw InputError("label offset " + std::to_string(offsets[r]) +
                         " outside [" + std::to_string(lower_[r]) + ", " +
                         std::to_string(upper_[r]) + "]");
      idx += (offsets[r] - lower_[r]) * strides_[r];
    }
    return idx;
  }
  Label index(std::initializer_list<int> offsets) const {
    return index(std::span<const int>(offsets.begin(), offsets.size()));
  }

  /// Zero-based coordinate of `label` along dimension r.
  int coordinate(Label label, int r) const {
    return (label / strides_[r]) % extent(r);
  }
  int offset(Label label, int r) const { return lower_[r] + coordinate(label, r); }

  std::vector<int> offsets(Label label) const {
    if (label < 0 || label >= size_) throw InputError("label index out of range");
    std::vector<int> out(lower_.size());
    for (int r = 0; r < dims(); ++r) out[r] = offset(label, r);
    return out;
  }

  friend bool operator==(const LabelSpace&, const LabelSpace&) = default;

 private:
  std::vector<int> lower_;
  std::vector<int> upper_;
  std::vector<Label> strides_;
  Label size_ = 1;
};

/// 8-bit image, grayscale (1 channel) or RGB (3 channels), row-major.
class PixelGrid {
 public:
  PixelGrid() = default;
  PixelGrid(int width, int height, int channels)
      : PixelGrid(width, height, channels,
                  std::vector<std::uint8_t>(checked_count(width, height, channels))) {}
  PixelGrid(int width, int height, int channels, std::vector<std::uint8_t> samples)
      : width_(width), height_(height), channels_(channels), samples_(std::move(samples)) {
    if (samples_.size() != checked_count(width, height, channels))
      throw InputError("pixel grid sample count mismatch");
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  std::size_t pixels() const noexcept { return std::size_t(width_) * height_; }

  std::uint8_t at(int x, int y, int c = 0) const {
    return samples_[(std::size_t(y) * width_ + x) * channels_ + c];
  }
  std::uint8_t& at(int x, int y, int c = 0) {
    return samples_[(std::size_t(y) * width_ + x) * channels_ + c];
  }

  /// Rounded channel mean.
  int luminance(int x, int y) const {
    int sum = 0;
    for (int c = 0; c < channels_; ++c) sum += at(x, y, c);
    return (sum + channels_ / 2) / channels_;
  }

  std::span<const std::uint8_t> samples() const noexcept { return samples_; }
  std::span<std::uint8_t> samples() noexcept { return samples_; }

  friend bool operator==(const PixelGrid&, const PixelGrid&) = default;

 private:
  static std::size_t checked_count(int width, int height, int channels) {
    if (width < 1 || height < 1) throw InputError("pixel grid must be at least 1x1");
    if (channels != 1 && channels != 3) throw InputError("pixel grid needs 1 or 3 channels");
    return std::size_t(width) * height * channels;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  std::vector<std::uint8_t> samples_;
};

/// Per-edge smoothness multipliers for a 4-connected grid. An empty field
/// means every edge has weight 1.
class EdgeWeights {
 public:
  EdgeWeights() = default;
  EdgeWeights(int width, int height, std::uint8_t fill = 1)
      : width_(width),
        height_(height),
        horizontal_(std::size_t(std::max(width - 1, 0)) * height, fill),
        vertical_(std::size_t(width) * std::max(height - 1, 0), fill) {}

  bool empty() const noexcept { return width_ == 0; }
  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  /// Edge (x, y) -- (x + 1, y).
  int horizontal(int x, int y) const {
    return empty() ? 1 : horizontal_[std::size_t(y) * (width_ - 1) + x];
  }
  /// Edge (x, y) -- (x, y + 1).
  int vertical(int x, int y) const {
    return empty() ? 1 : vertical_[std::size_t(y) * width_ + x];
  }
  void set_horizontal(int x, int y, std::uint8_t w) { horizontal_[std::size_t(y) * (width_ - 1) + x] = w; }
  void set_vertical(int x, int y, std::uint8_t w) { vertical_[std::size_t(y) * width_ + x] = w; }

  friend bool operator==(const EdgeWeights&, const EdgeWeights&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> horizontal_;
  std::vector<std::uint8_t> vertical_;
};

/// Truncated prior: edge penalty w * lambda * min(sum_r |dv_r|^l1, g^l1).
struct SmoothnessModel {
  int l1 = 1;
  int g = 1;
  Energy lambda = 0;
  EdgeWeights weights;

  Energy truncation() const noexcept { return ipow(g, l1); }

  void validate() const {
    if (l1 != 1 && l1 != 2) throw ConfigError("prior exponent l1 must be 1 or 2");
    if (g < 1) throw ConfigError("truncation threshold g must be >= 1");
    if (lambda < 0) throw ConfigError("lambda must be >= 0");
  }
};

/// Unweighted truncated label distance min(sum_r |dv_r|^l1, g^l1), with
/// per-label coordinates cached.
class LabelDistance {
 public:
  LabelDistance(const LabelSpace& space, int l1, int g)
      : dims_(space.dims()), l1_(l1), cap_(ipow(g, l1)), coords_(std::size_t(space.size()) * dims_) {
    for (Label v = 0; v < space.size(); ++v)
      for (int r = 0; r < dims_; ++r) coords_[std::size_t(v) * dims_ + r] = space.coordinate(v, r);
  }

  Energy operator()(Label a, Label b) const noexcept {
    Energy d = 0;
    const int* ca = &coords_[std::size_t(a) * dims_];
    const int* cb = &coords_[std::size_t(b) * dims_];
    for (int r = 0; r < dims_; ++r) {
      const Energy u = ca[r] > cb[r] ? ca[r] - cb[r] : cb[r] - ca[r];
      d += l1_ == 1 ? u : u * u;
    }
    return std::min(d, cap_);
  }

 private:
  int dims_;
  int l1_;
  Energy cap_;
  std::vector<int> coords_;
};

/// Data costs C(x, v) for every pixel and label, pixel-major.
class CostVolume {
 public:
  CostVolume() = default;
  CostVolume(int width, int height, LabelSpace labels, Cost c_max)
      : width_(width), height_(height), labels_(std::move(labels)), c_max_(c_max) {
    if (width < 1 || height < 1) throw InputError("cost volume must be at least 1x1");
    if (c_max <= 0) throw InputError("cost truncation must be positive");
    costs_.assign(std::size_t(width) * height * labels_.size(), 0);
  }

  static CostVolume from_values(int width, int height, LabelSpace labels, Cost c_max,
                                std::vector<Cost> values) {
    CostVolume vol(width, height, std::move(labels), c_max);
    if (values.size() != vol.costs_.size()) throw InputError("cost volume size mismatch");
    for (Cost c : values)
      if (c < 0 || c > c_max) throw InputError("cost outside [0, C_max]");
    vol.costs_ = std::move(values);
    return vol;
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixels() const noexcept { return std::size_t(width_) * height_; }
  const LabelSpace& space() const noexcept { return labels_; }
  Label labels() const noexcept { return labels_.size(); }
  Cost c_max() const noexcept { return c_max_; }

  std::span<const Cost> slice(int x, int y) const {
    return {costs_.data() + offset(x, y), std::size_t(labels_.size())};
  }
  Cost at(int x, int y, Label v) const { return costs_[offset(x, y) + v]; }
  void set(int x, int y, Label v, Cost c) {
    if (c < 0 || c > c_max_) throw InputError("cost outside [0, C_max]");
    costs_[offset(x, y) + v] = c;
  }
  std::span<const Cost> values() const noexcept { return costs_; }

  /// Sum of all N * Q costs; the mean is sum / count.
  Energy sum() const noexcept {
    Energy s = 0;
    for (Cost c : costs_) s += c;
    return s;
  }
  std::size_t count() const noexcept { return costs_.size(); }

  friend bool operator==(const CostVolume&, const CostVolume&) = default;

 private:
  std::size_t offset(int x, int y) const noexcept {
    return (std::size_t(y) * width_ + x) * std::size_t(labels_.size());
  }

  int width_ = 0;
  int height_ = 0;
  LabelSpace labels_;
  Cost c_max_ = 1;
  std::vector<Cost> costs_;
};

/// One label per pixel, row-major.
struct DisparityField {
  int width = 0;
  int height = 0;
  std::vector<Label> labels;

  DisparityField() = default;
  DisparityField(int w, int h, Label fill = 0) : width(w), height(h), labels(std::size_t(w) * h, fill) {}

  Label at(int x, int y) const { return labels[std::size_t(y) * width + x]; }
  Label& at(int x, int y) { return labels[std::size_t(y) * width + x]; }

  friend bool operator==(const DisparityField&, const DisparityField&) = default;
};

struct EnergyBreakdown {
  Energy data = 0;
  Energy smoothness = 0;
  std::int64_t pixels = 1;

  Energy total() const noexcept { return data + smoothness; }
  double per_pixel() const noexcept { return double(total()) / double(pixels); }
  /// Per-pixel energy in hundredths, rounded half up.
  std::int64_t per_pixel_centi() const noexcept {
    return (total() * 200 + pixels) / (2 * pixels);
  }

  friend bool operator==(const EnergyBreakdown&, const EnergyBreakdown&) = default;
};

/// Data term plus the truncated pairwise term over each unordered
/// 4-neighbour edge (no wraparound).
inline EnergyBreakdown evaluate_energy(const CostVolume& volume, const SmoothnessModel& model,
                                       const DisparityField& field) {
  if (field.width != volume.width() || field.height != volume.height() ||
      field.labels.size() != volume.pixels())
    throw InputError("disparity field does not match cost volume dimensions");
  const auto& w = model.weights;
  if (!w.empty() && (w.width() != volume.width() || w.height() != volume.height()))
    throw InputError("edge weights do not match cost volume dimensions");
  for (Label v : field.labels)
    if (v < 0 || v >= volume.labels()) throw InputError("label outside label space");

  const LabelDistance dist(volume.space(), model.l1, model.g);
  EnergyBreakdown e;
  e.pixels = std::int64_t(volume.pixels());
  Energy weighted = 0;
  for (int y = 0; y < volume.height(); ++y) {
    for (int x = 0; x < volume.width(); ++x) {
      const Label v = field.at(x, y);
      e.data += volume.at(x, y, v);
      if (x + 1 < volume.width()) weighted += w.horizontal(x, y) * dist(v, field.at(x + 1, y));
      if (y + 1 < volume.height()) weighted += w.vertical(x, y) * dist(v, field.at(x, y + 1));
    }
  }
  e.smoothness = weighted * model.lambda;
  return e;
}

/// Per-pixel argmin of the data term; ties go to the lowest label.
inline DisparityField data_argmin(const CostVolume& volume) {
  DisparityField f(volume.width(), volume.height());
  for (int y = 0; y < volume.height(); ++y)
    for (int x = 0; x < volume.width(); ++x) {
      auto s = volume.slice(x, y);
      f.at(x, y) = Label(std::min_element(s.begin(), s.end()) - s.begin());
    }
  return f;
}

}  // namespace edp
