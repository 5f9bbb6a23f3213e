#pragma once

// Line-oriented golden files for the verification suites.
//
//   edp-golden 1
//   suite chain
//   instance seed=7 length=3 labels=2 l1=1 g=1 lambda=1
//   weights 1 2
//   costs 0 3 2 0 0 2
//   minimum 2
//   path 0 0 0
//   path 0 1 0
//   end
//
// A record opens with `instance` or `scene` followed by key=value pairs and
// closes with `end`. Body lines are a keyword followed by integers; a keyword
// may repeat (`path`). Blank lines and lines starting with '#' are ignored.

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "edp/grid_model.hpp"
#include "edp/media_io.hpp"
#include "edp/oracle.hpp"
#include "edp/scanline_dp.hpp"

namespace edp {

inline constexpr int kGoldenVersion = 1;

class GoldenError : public IoError {
 public:
  GoldenError(const std::string& path, int line, const std::string& what)
      : IoError(path + ":" + std::to_string(line) + ": " + what) {}
};

struct GoldenRecord {
  std::string kind;  ///< "instance" or "scene"
  std::map<std::string, std::string> attrs;
  std::vector<std::pair<std::string, std::vector<std::int64_t>>> body;
  int line = 0;

  const std::string& attr(const std::string& key) const {
    auto it = attrs.find(key);
    if (it == attrs.end()) throw GoldenError("<record>", line, "missing attribute '" + key + "'");
    return it->second;
  }
  std::int64_t int_attr(const std::string& key) const {
    const std::string& s = attr(key);
    try {
      std::size_t used = 0;
      const long long v = std::stoll(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw GoldenError("<record>", line, "attribute '" + key + "' is not an integer: " + s);
    }
  }
  bool has(const std::string& key) const {
    for (auto& [k, v] : body)
      if (k == key) return true;
    return false;
  }
  const std::vector<std::int64_t>& values(const std::string& key) const {
    for (auto& [k, v] : body)
      if (k == key) return v;
    throw GoldenError("<record>", line, "missing line '" + key + "'");
  }
  std::vector<std::vector<std::int64_t>> all(const std::string& key) const {
    std::vector<std::vector<std::int64_t>> out;
    for (auto& [k, v] : body)
      if (k == key) out.push_back(v);
    return out;
  }
  void add(const std::string& key, std::vector<std::int64_t> v) { body.emplace_back(key, std::move(v)); }
};

struct GoldenFile {
  std::string suite;
  std::vector<GoldenRecord> records;
};

inline GoldenFile parse_golden(const std::string& text, const std::string& path = "<memory>") {
  GoldenFile file;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  bool have_version = false;
  GoldenRecord* open = nullptr;
  while (std::getline(in, raw)) {
    ++line_no;
    std::istringstream ls(raw);
    std::string key;
    if (!(ls >> key) || key[0] == '#') continue;
    if (!have_version) {
      int version = 0;
      if (key != "edp-golden" || !(ls >> version)) throw GoldenError(path, line_no, "expected 'edp-golden <version>'");
      if (version != kGoldenVersion)
        throw GoldenError(path, line_no, "unsupported golden version " + std::to_string(version));
      have_version = true;
      continue;
    }
    if (key == "suite") {
      if (!(ls >> file.suite)) throw GoldenError(path, line_no, "suite needs a name");
      continue;
    }
    if (key == "instance" || key == "scene") {
      if (open) throw GoldenError(path, line_no, "record opened before previous 'end'");
      file.records.push_back({key, {}, {}, line_no});
      open = &file.records.back();
      std::string kv;
      while (ls >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) throw GoldenError(path, line_no, "bad attribute '" + kv + "'");
        open->attrs[kv.substr(0, eq)] = kv.substr(eq + 1);
      }
      continue;
    }
    if (!open) throw GoldenError(path, line_no, "'" + key + "' outside a record");
    if (key == "end") {
      open = nullptr;
      continue;
    }
    std::vector<std::int64_t> vals;
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stoll(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw GoldenError(path, line_no, "expected an integer, got '" + tok + "'");
      }
    }
    open->add(key, std::move(vals));
  }
  if (!have_version) throw GoldenError(path, line_no, "empty golden file");
  if (open) throw GoldenError(path, line_no, "unterminated record");
  return file;
}

inline std::string format_golden(const GoldenFile& file) {
  std::ostringstream out;
  out << "edp-golden " << kGoldenVersion << "\nsuite " << file.suite << "\n";
  for (const auto& r : file.records) {
    out << r.kind;
    for (auto& [k, v] : r.attrs) out << ' ' << k << '=' << v;
    out << '\n';
    for (auto& [k, vals] : r.body) {
      out << k;
      for (auto v : vals) out << ' ' << v;
      out << '\n';
    }
    out << "end\n";
  }
  return out.str();
}

inline GoldenFile read_golden(const std::string& path) { return parse_golden(detail::slurp(path), path); }
inline void write_golden(const GoldenFile& file, const std::string& path) { detail::spill(path, format_golden(file)); }

// ---------------------------------------------------------------------------
// Typed records
// ---------------------------------------------------------------------------

struct ChainGolden {
  std::uint64_t seed = 0;
  ScanlineProblem problem;
  oracle::ChainOptimum optimum;
};

inline GoldenRecord to_record(const ChainGolden& c) {
  const auto& p = c.problem;
  GoldenRecord r{"instance", {}, {}, 0};
  r.attrs = {{"seed", std::to_string(c.seed)},
             {"length", std::to_string(p.length())},
             {"labels", std::to_string(p.labels.size())},
             {"l1", std::to_string(p.model.l1)},
             {"g", std::to_string(p.model.g)},
             {"lambda", std::to_string(p.model.lambda)}};
  if (!p.edge_weights.empty()) r.add("weights", {p.edge_weights.begin(), p.edge_weights.end()});
  r.add("costs", {p.costs.begin(), p.costs.end()});
  r.add("minimum", {c.optimum.minimum});
  for (auto& path : c.optimum.optimal_paths) r.add("path", {path.begin(), path.end()});
  return r;
}

inline ChainGolden chain_from_record(const GoldenRecord& r) {
  ChainGolden c;
  c.seed = std::uint64_t(r.int_attr("seed"));
  const auto n = r.int_attr("length");
  const auto q = r.int_attr("labels");
  auto& p = c.problem;
  p.labels = LabelSpace::range(0, int(q) - 1);
  p.model.l1 = int(r.int_attr("l1"));
  p.model.g = int(r.int_attr("g"));
  p.model.lambda = r.int_attr("lambda");
  const auto& costs = r.values("costs");
  if (std::int64_t(costs.size()) != n * q) throw GoldenError("<record>", r.line, "cost count mismatch");
  p.costs.assign(costs.begin(), costs.end());
  if (r.has("weights")) {
    const auto& w = r.values("weights");
    p.edge_weights.assign(w.begin(), w.end());
  }
  c.optimum.minimum = r.values("minimum").at(0);
  for (auto& path : r.all("path")) c.optimum.optimal_paths.emplace_back(path.begin(), path.end());
  return c;
}

struct GridGolden {
  oracle::TinyInstance instance;
  Energy minimum = 0;
  DisparityField minimizer;
  int iterations = 8;
  /// Committed EDP energy after `iterations`; the ratio edp / minimum must not exceed it.
  Energy edp_energy = 0;
};

inline GoldenRecord to_record(const GridGolden& g) {
  const auto& v = g.instance.volume;
  const auto& m = g.instance.model;
  GoldenRecord r{"instance", {}, {}, 0};
  r.attrs = {{"seed", std::to_string(g.instance.seed)},
             {"width", std::to_string(v.width())},
             {"height", std::to_string(v.height())},
             {"labels", std::to_string(v.labels())},
             {"cmax", std::to_string(v.c_max())},
             {"l1", std::to_string(m.l1)},
             {"g", std::to_string(m.g)},
             {"lambda", std::to_string(m.lambda)},
             {"iterations", std::to_string(g.iterations)}};
  r.add("costs", {v.values().begin(), v.values().end()});
  r.add("minimum", {g.minimum});
  r.add("field", {g.minimizer.labels.begin(), g.minimizer.labels.end()});
  r.add("edp_energy", {g.edp_energy});
  return r;
}

inline GridGolden grid_from_record(const GoldenRecord& r) {
  GridGolden g;
  const int w = int(r.int_attr("width")), h = int(r.int_attr("height"));
  const int q = int(r.int_attr("labels"));
  const auto& costs = r.values("costs");
  try {
    g.instance.volume = CostVolume::from_values(w, h, LabelSpace::range(0, q - 1), Cost(r.int_attr("cmax")),
                                                {costs.begin(), costs.end()});
  } catch (const InputError& e) {
    throw GoldenError("<record>", r.line, e.what());
  }
  g.instance.seed = std::uint64_t(r.int_attr("seed"));
  g.instance.model.l1 = int(r.int_attr("l1"));
  g.instance.model.g = int(r.int_attr("g"));
  g.instance.model.lambda = r.int_attr("lambda");
  g.iterations = int(r.int_attr("iterations"));
  g.minimum = r.values("minimum").at(0);
  const auto& f = r.values("field");
  g.minimizer = DisparityField(w, h);
  if (f.size() != g.minimizer.labels.size()) throw GoldenError("<record>", r.line, "field size mismatch");
  g.minimizer.labels.assign(f.begin(), f.end());
  g.edp_energy = r.values("edp_energy").at(0);
  return g;
}

struct SceneGolden {
  std::string name;
  std::string op;
  int iterations = 0;
  Energy lambda = 0;
  /// Total energy after iteration 0 (data argmin) and each EDP iteration.
  std::vector<Energy> trace;
  /// Pixels whose final label differs from the ground truth.
  std::int64_t bad_pixels = 0;
};

inline GoldenRecord to_record(const SceneGolden& s) {
  GoldenRecord r{"scene", {}, {}, 0};
  r.attrs = {{"name", s.name}, {"op", s.op}, {"iterations", std::to_string(s.iterations)}};
  r.add("lambda", {s.lambda});
  r.add("trace", {s.trace.begin(), s.trace.end()});
  r.add("bad_pixels", {s.bad_pixels});
  return r;
}

inline SceneGolden scene_from_record(const GoldenRecord& r) {
  SceneGolden s;
  s.name = r.attr("name");
  s.op = r.attr("op");
  s.iterations = int(r.int_attr("iterations"));
  s.lambda = r.values("lambda").at(0);
  const auto& t = r.values("trace");
  s.trace.assign(t.begin(), t.end());
  s.bad_pixels = r.values("bad_pixels").at(0);
  return s;
}

}  // namespace edp
