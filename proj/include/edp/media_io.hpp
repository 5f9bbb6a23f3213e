#pragma once

// File formats:
//   PGM (P5) / PPM (P6), maxval 255      input images, pgm8 disparity maps
//   PFM ("Pf", scale -1.0, little endian, rows stored bottom-to-top)
//   Middlebury .flo: float 202021.25, int32 width, int32 height, then
//     interleaved (u, v) float32 pairs, row-major, little endian
//   energy log CSV: iteration,total,data,smooth,per_pixel,seconds

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "edp/edp_solver.hpp"
#include "edp/grid_model.hpp"

namespace edp {

static_assert(std::endian::native == std::endian::little, "binary writers assume a little-endian host");

class ImageFormatError : public IoError {
 public:
  enum class Kind { malformed_header, unsupported_maxval, truncated_payload };
  ImageFormatError(Kind kind, const std::string& what) : IoError(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

namespace detail {

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spill(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(bytes.data(), std::streamsize(bytes.size()));
  if (!out) throw IoError("write to '" + path + "' failed");
}

/// Reads the next whitespace-delimited header token, skipping '#' comments.
inline bool next_token(const std::string& s, std::size_t& pos, std::string& tok) {
  while (pos < s.size()) {
    if (s[pos] == '#') {
      while (pos < s.size() && s[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(s[pos]))) {
      ++pos;
    } else {
      break;
    }
  }
  tok.clear();
  while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos])) && s[pos] != '#') tok += s[pos++];
  return !tok.empty();
}

inline int header_int(const std::string& s, std::size_t& pos, const std::string& path, const char* what) {
  std::string tok;
  if (!next_token(s, pos, tok))
    throw ImageFormatError(ImageFormatError::Kind::malformed_header, path + ": malformed header (missing " + what + ")");
  for (char c : tok)
    if (c < '0' || c > '9')
      throw ImageFormatError(ImageFormatError::Kind::malformed_header, path + ": malformed header (bad " + what + ")");
  if (tok.size() > 9)
    throw ImageFormatError(ImageFormatError::Kind::malformed_header, path + ": malformed header (" + what + " too large)");
  return std::stoi(tok);
}

template <class T>
void put(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

template <class T>
T get(const std::string& in, std::size_t& pos) {
  T value;
  std::memcpy(&value, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return value;
}

}  // namespace detail

inline PixelGrid parse_image(const std::string& bytes, const std::string& path = "<memory>") {
  using Kind = ImageFormatError::Kind;
  std::size_t pos = 0;
  std::string magic;
  if (!detail::next_token(bytes, pos, magic) || (magic != "P5" && magic != "P6"))
    throw ImageFormatError(Kind::malformed_header, path + ": malformed header (expected P5 or P6)");
  const int channels = magic == "P5" ? 1 : 3;
  const int width = detail::header_int(bytes, pos, path, "width");
  const int height = detail::header_int(bytes, pos, path, "height");
  const int maxval = detail::header_int(bytes, pos, path, "maxval");
  if (width < 1 || height < 1)
    throw ImageFormatError(Kind::malformed_header, path + ": malformed header (empty image)");
  if (maxval != 255)
    throw ImageFormatError(Kind::unsupported_maxval, path + ": unsupported maxval " + std::to_string(maxval));
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos])))
    throw ImageFormatError(Kind::truncated_payload, path + ": truncated payload");
  ++pos;  // single whitespace byte after maxval
  const std::size_t need = std::size_t(width) * height * channels;
  if (bytes.size() - pos < need)
    throw ImageFormatError(Kind::truncated_payload,
                           path + ": truncated payload (" + std::to_string(bytes.size() - pos) + " of " +
                               std::to_string(need) + " bytes)");
  std::vector<std::uint8_t> samples(bytes.begin() + std::ptrdiff_t(pos), bytes.begin() + std::ptrdiff_t(pos + need));
  return PixelGrid(width, height, channels, std::move(samples));
}

inline PixelGrid read_image(const std::string& path) { return parse_image(detail::slurp(path), path); }

inline std::string encode_image(const PixelGrid& img) {
  std::string out = (img.channels() == 1 ? "P5\n" : "P6\n") + std::to_string(img.width()) + " " +
                    std::to_string(img.height()) + "\n255\n";
  auto s = img.samples();
  out.append(reinterpret_cast<const char*>(s.data()), s.size());
  return out;
}

inline void write_image(const PixelGrid& img, const std::string& path) {
  detail::spill(path, encode_image(img));
}

enum class DisparityFormat { pgm8, pfm };

/// Label index scaled to [0, 255] by floor(255 * idx / (Q - 1)).
inline PixelGrid disparity_to_gray(const DisparityField& field, const LabelSpace& space) {
  PixelGrid img(field.width, field.height, 1);
  const std::int64_t q = space.size();
  for (int y = 0; y < field.height; ++y)
    for (int x = 0; x < field.width; ++x)
      img.at(x, y) = q <= 1 ? 0 : std::uint8_t(255 * std::int64_t(field.at(x, y)) / (q - 1));
  return img;
}

/// PFM with one float per pixel: the label's offset along dimension 0.
inline std::string encode_pfm(const DisparityField& field, const LabelSpace& space) {
  std::string out = "Pf\n" + std::to_string(field.width) + " " + std::to_string(field.height) + "\n-1.0\n";
  for (int y = field.height - 1; y >= 0; --y)
    for (int x = 0; x < field.width; ++x) detail::put<float>(out, float(space.offset(field.at(x, y), 0)));
  return out;
}

struct FloatImage {
  int width = 0;
  int height = 0;
  std::vector<float> values;  ///< row-major, top row first
  float at(int x, int y) const { return values[std::size_t(y) * width + x]; }
};

inline FloatImage parse_pfm(const std::string& bytes, const std::string& path = "<memory>") {
  using Kind = ImageFormatError::Kind;
  std::size_t pos = 0;
  std::string tok;
  if (!detail::next_token(bytes, pos, tok) || tok != "Pf")
    throw ImageFormatError(Kind::malformed_header, path + ": malformed header (expected Pf)");
  FloatImage img;
  img.width = detail::header_int(bytes, pos, path, "width");
  img.height = detail::header_int(bytes, pos, path, "height");
  if (!detail::next_token(bytes, pos, tok) || tok.empty() || tok[0] != '-')
    throw ImageFormatError(Kind::malformed_header, path + ": only little-endian PFM is supported");
  ++pos;
  const std::size_t need = std::size_t(img.width) * img.height * sizeof(float);
  if (pos > bytes.size() || bytes.size() - pos < need)
    throw ImageFormatError(Kind::truncated_payload, path + ": truncated payload");
  img.values.resize(std::size_t(img.width) * img.height);
  for (int y = img.height - 1; y >= 0; --y)
    for (int x = 0; x < img.width; ++x) img.values[std::size_t(y) * img.width + x] = detail::get<float>(bytes, pos);
  return img;
}

inline void write_disparity(const DisparityField& field, const LabelSpace& space, const std::string& path,
                            DisparityFormat mode) {
  if (mode == DisparityFormat::pgm8)
    write_image(disparity_to_gray(field, space), path);
  else
    detail::spill(path, encode_pfm(field, space));
}

inline constexpr float kFloMagic = 202021.25f;

inline std::string encode_flow(const DisparityField& field, const LabelSpace& space) {
  if (space.dims() != 2) throw InputError("flow output needs a 2D label space");
  std::string out;
  detail::put<float>(out, kFloMagic);
  detail::put<std::int32_t>(out, field.width);
  detail::put<std::int32_t>(out, field.height);
  for (int y = 0; y < field.height; ++y)
    for (int x = 0; x < field.width; ++x) {
      const Label v = field.at(x, y);
      detail::put<float>(out, float(space.offset(v, 0)));
      detail::put<float>(out, float(space.offset(v, 1)));
    }
  return out;
}

inline void write_flow(const DisparityField& field, const LabelSpace& space, const std::string& path) {
  detail::spill(path, encode_flow(field, space));
}

struct FlowField {
  int width = 0;
  int height = 0;
  std::vector<float> uv;  ///< interleaved (u, v)
  float u(int x, int y) const { return uv[2 * (std::size_t(y) * width + x)]; }
  float v(int x, int y) const { return uv[2 * (std::size_t(y) * width + x) + 1]; }
};

inline FlowField parse_flow(const std::string& bytes, const std::string& path = "<memory>") {
  using Kind = ImageFormatError::Kind;
  if (bytes.size() < 12) throw ImageFormatError(Kind::malformed_header, path + ": malformed header (short file)");
  std::size_t pos = 0;
  if (detail::get<float>(bytes, pos) != kFloMagic)
    throw ImageFormatError(Kind::malformed_header, path + ": malformed header (bad .flo magic)");
  FlowField f;
  f.width = detail::get<std::int32_t>(bytes, pos);
  f.height = detail::get<std::int32_t>(bytes, pos);
  if (f.width < 1 || f.height < 1)
    throw ImageFormatError(Kind::malformed_header, path + ": malformed header (bad dimensions)");
  const std::size_t count = 2 * std::size_t(f.width) * f.height;
  if (bytes.size() - pos < count * sizeof(float))
    throw ImageFormatError(Kind::truncated_payload, path + ": truncated payload");
  f.uv.resize(count);
  for (auto& x : f.uv) x = detail::get<float>(bytes, pos);
  return f;
}

inline FlowField read_flow(const std::string& path) { return parse_flow(detail::slurp(path), path); }

/// Hue = atan2(v, u), saturation = |(u, v)| / max magnitude, value = 1.
inline PixelGrid render_flow_color(const DisparityField& field, const LabelSpace& space) {
  if (space.dims() != 2) throw InputError("flow rendering needs a 2D label space");
  PixelGrid img(field.width, field.height, 3);
  double max_mag = 0;
  for (Label v : field.labels) max_mag = std::max(max_mag, std::hypot(space.offset(v, 0), space.offset(v, 1)));
  for (int y = 0; y < field.height; ++y)
    for (int x = 0; x < field.width; ++x) {
      const double u = space.offset(field.at(x, y), 0), v = space.offset(field.at(x, y), 1);
      const double sat = max_mag > 0 ? std::hypot(u, v) / max_mag : 0.0;
      double hue = std::atan2(v, u) * 180.0 / M_PI;
      if (hue < 0) hue += 360.0;
      const double c = sat;  // chroma at value 1
      const double hp = hue / 60.0;
      const double xx = c * (1 - std::fabs(std::fmod(hp, 2.0) - 1));
      double r = 0, g = 0, b = 0;
      if (hp < 1) { r = c; g = xx; }
      else if (hp < 2) { r = xx; g = c; }
      else if (hp < 3) { g = c; b = xx; }
      else if (hp < 4) { g = xx; b = c; }
      else if (hp < 5) { r = xx; b = c; }
      else { r = c; b = xx; }
      const double m = 1.0 - c;
      img.at(x, y, 0) = std::uint8_t(std::lround(255 * (r + m)));
      img.at(x, y, 1) = std::uint8_t(std::lround(255 * (g + m)));
      img.at(x, y, 2) = std::uint8_t(std::lround(255 * (b + m)));
    }
  return img;
}

struct EnergyLogRow {
  int iteration = 0;
  Energy total = 0;
  Energy data = 0;
  Energy smooth = 0;
  std::int64_t per_pixel_centi = 0;
  double seconds = 0.0;
};

inline std::vector<EnergyLogRow> to_log_rows(const EnergyTrace& trace) {
  std::vector<EnergyLogRow> rows;
  for (const auto& t : trace)
    rows.push_back({t.iteration, t.energy.total(), t.energy.data, t.energy.smoothness, t.energy.per_pixel_centi(),
                    t.seconds});
  return rows;
}

inline constexpr const char* kEnergyLogHeader = "iteration,total,data,smooth,per_pixel,seconds";

inline std::string format_energy_log(const std::vector<EnergyLogRow>& rows) {
  std::string out = std::string(kEnergyLogHeader) + "\n";
  char buf[256];
  for (const auto& r : rows) {
    const std::int64_t whole = r.per_pixel_centi / 100, frac = r.per_pixel_centi % 100;
    std::snprintf(buf, sizeof buf, "%d,%lld,%lld,%lld,%lld.%02lld,%.6f\n", r.iteration, (long long)r.total,
                  (long long)r.data, (long long)r.smooth, (long long)whole, (long long)frac, r.seconds);
    out += buf;
  }
  return out;
}

inline std::vector<EnergyLogRow> parse_energy_log(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kEnergyLogHeader) throw IoError("energy log: missing or wrong header");
  std::vector<EnergyLogRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    EnergyLogRow r;
    long long total, data, smooth, whole;
    unsigned frac;
    char dot;
    std::istringstream ls(line);
    char c1, c2, c3, c4, c5;
    if (!(ls >> r.iteration >> c1 >> total >> c2 >> data >> c3 >> smooth >> c4 >> whole >> dot) || dot != '.')
      throw IoError("energy log: malformed row '" + line + "'");
    std::string digits;
    while (ls.peek() >= '0' && ls.peek() <= '9') digits += char(ls.get());
    if (digits.size() != 2 || !(ls >> c5 >> r.seconds)) throw IoError("energy log: malformed row '" + line + "'");
    frac = unsigned(std::stoi(digits));
    r.total = total;
    r.data = data;
    r.smooth = smooth;
    r.per_pixel_centi = whole * 100 + frac;
    rows.push_back(r);
  }
  return rows;
}

inline void write_energy_log(const EnergyTrace& trace, const std::string& path) {
  detail::spill(path, format_energy_log(to_log_rows(trace)));
}

}  // namespace edp
