#include "fracproj/cli.hpp"

#include "fracproj/entropy.hpp"
#include "fracproj/errors.hpp"
#include "fracproj/geometry.hpp"
#include "fracproj/parallel.hpp"
#include "fracproj/rng.hpp"
#include "fracproj/scenery_cp.hpp"
#include "fracproj/stats.hpp"
#include "fracproj/tree_measure.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>
#include <boost/version.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string_view>

namespace fracproj::cli {

using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "1.0.0";
constexpr double kMaxLiftNodes = 2e6;
constexpr double kMaxCircleCells = 16777216.0;  // 2^24

const std::set<std::string> kTags{"dim", "scan", "cpchain", "bc-grid", "convolve", "lift-check"};

// ---------------------------------------------------------------------------
// Config text navigation

struct Source {
  const std::string& text;
  const std::string& file;
};

std::string path_string(const std::vector<std::string>& path) {
  std::string out;
  for (const auto& p : path) {
    if (!p.empty() && p[0] == '[') {
      out += p;
    } else {
      if (!out.empty()) out += '.';
      out += p;
    }
  }
  return out.empty() ? "<root>" : out;
}

int line_at(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Finds the keys of the path one after another; array indices are skipped.
// Falls back to line 1.
int line_of(const std::string& text, const std::vector<std::string>& path) {
  std::size_t pos = 0, found = std::string::npos;
  for (const auto& key : path) {
    if (key.empty() || key[0] == '[') continue;
    const auto at = text.find('"' + key + '"', pos);
    if (at == std::string::npos) break;
    found = at;
    pos = at + key.size() + 2;
  }
  return found == std::string::npos ? 1 : line_at(text, found);
}

class Node {
 public:
  Node(const Source& src, const json& j, std::vector<std::string> path) : src_(src), j_(j), path_(std::move(path)) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(src_.file, line_of(src_.text, path_), path_string(path_) + ": " + msg);
  }

  const json& raw() const { return j_; }
  const std::vector<std::string>& path() const { return path_; }

  bool has(const std::string& key) const { return j_.is_object() && j_.contains(key); }

  Node operator[](const std::string& key) const {
    if (!j_.is_object()) fail("expected an object");
    if (!j_.contains(key)) fail("missing required key \"" + key + "\"");
    auto p = path_;
    p.push_back(key);
    return Node(src_, j_.at(key), std::move(p));
  }

  std::vector<Node> items() const {
    if (!j_.is_array()) fail("expected an array");
    std::vector<Node> out;
    for (std::size_t i = 0; i < j_.size(); ++i) {
      auto p = path_;
      p.push_back("[" + std::to_string(i) + "]");
      out.emplace_back(src_, j_.at(i), std::move(p));
    }
    return out;
  }

  void expect_keys(std::initializer_list<std::string_view> allowed) const {
    if (!j_.is_object()) fail("expected an object");
    for (const auto& [key, value] : j_.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) != allowed.end()) continue;
      auto p = path_;
      p.push_back(key);
      Node(src_, value, std::move(p)).fail("unknown key");
    }
  }

  double number(double lo, double hi) const {
    if (!j_.is_number()) fail("expected a number");
    const double v = j_.get<double>();
    if (!std::isfinite(v) || v < lo || v > hi) fail("value " + format_number(v) + " outside [" + format_number(lo) + ", " + format_number(hi) + "]");
    return v;
  }

  long long integer(long long lo, long long hi) const {
    if (!j_.is_number_integer()) fail("expected an integer");
    if (j_.is_number_unsigned() && j_.get<std::uint64_t>() > static_cast<std::uint64_t>(hi))
      fail("value outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    const long long v = j_.get<long long>();
    if (v < lo || v > hi) fail("value " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
  }

  std::string str() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }

  bool boolean() const {
    if (!j_.is_boolean()) fail("expected true or false");
    return j_.get<bool>();
  }

  // Decimal literals are read as the decimal they spell; strings may hold "p/q".
  Rational rational() const {
    if (j_.is_number()) {
      const double v = j_.get<double>();
      if (!std::isfinite(v)) fail("expected a finite number");
      return j_.is_number_integer() ? Rational(j_.get<long long>()) : decimal_rational(v);
    }
    if (j_.is_string()) {
      try {
        return parse_rational(j_.get<std::string>());
      } catch (const Error& e) {
        fail(e.what());
      }
    }
    fail("expected a number or a \"p/q\" string");
  }

 private:
  const Source& src_;
  const json& j_;
  std::vector<std::string> path_;
};

double number_or(const Node& obj, const std::string& key, double def, double lo, double hi) {
  return obj.has(key) ? obj[key].number(lo, hi) : def;
}

long long integer_or(const Node& obj, const std::string& key, long long def, long long lo, long long hi) {
  return obj.has(key) ? obj[key].integer(lo, hi) : def;
}

// ---------------------------------------------------------------------------
// Measures

std::vector<Digit> digits_from(const Node& n, int dim, int base) {
  std::vector<Digit> out;
  for (const auto& d : n.items()) {
    if (dim == 1) {
      out.push_back({static_cast<int>(d.integer(0, base - 1)), 0});
    } else {
      const auto pair = d.items();
      if (pair.size() != 2) d.fail("a planar digit is an [x, y] pair");
      out.push_back({static_cast<int>(pair[0].integer(0, base - 1)), static_cast<int>(pair[1].integer(0, base - 1))});
    }
  }
  if (out.empty()) n.fail("no digits given");
  return out;
}

std::vector<Rational> rationals_from(const Node& n) {
  std::vector<Rational> out;
  for (const auto& p : n.items()) out.push_back(p.rational());
  return out;
}

MeasureSpec measure_from(const Node& m) {
  if (!m.raw().is_object()) m.fail("a measure is an object with a \"type\" key");
  const std::string type = m["type"].str();
  MeasureSpec spec;
  if (type == "bernoulli_digits") {
    m.expect_keys({"type", "base", "dim", "digits", "probs"});
    BernoulliDigits b;
    b.base = static_cast<int>(m["base"].integer(2, 64));
    b.dim = static_cast<int>(integer_or(m, "dim", 1, 1, 2));
    b.digits = digits_from(m["digits"], b.dim, b.base);
    b.probs = rationals_from(m["probs"]);
    spec.kind = std::move(b);
  } else if (type == "markov_digits") {
    m.expect_keys({"type", "base", "dim", "digits", "transition", "initial"});
    MarkovDigits b;
    b.base = static_cast<int>(m["base"].integer(2, 64));
    b.dim = static_cast<int>(integer_or(m, "dim", 1, 1, 2));
    b.digits = digits_from(m["digits"], b.dim, b.base);
    for (const auto& row : m["transition"].items()) b.transition.push_back(rationals_from(row));
    b.initial = rationals_from(m["initial"]);
    spec.kind = std::move(b);
  } else if (type == "linear_ifs") {
    m.expect_keys({"type", "dim", "maps", "weights", "strong_separation"});
    LinearIFS ifs;
    ifs.dim = static_cast<int>(integer_or(m, "dim", 1, 1, 2));
    for (const auto& f : m["maps"].items()) {
      f.expect_keys({"ratio", "angle", "reflect", "translation"});
      SimilarityMap map;
      map.ratio = f["ratio"].number(0.0, 1.0);
      map.angle = number_or(f, "angle", 0.0, -1e3, 1e3);
      map.reflect = f.has("reflect") && f["reflect"].boolean();
      const auto t = f["translation"].items();
      if (static_cast<int>(t.size()) != ifs.dim) f["translation"].fail("translation needs one entry per dimension");
      map.translation.resize(ifs.dim);
      for (int i = 0; i < ifs.dim; ++i) map.translation(i) = t[i].number(-1e6, 1e6);
      ifs.maps.push_back(std::move(map));
    }
    for (const auto& w : m["weights"].items()) ifs.weights.push_back(w.number(0.0, 1.0));
    ifs.strong_separation = m.has("strong_separation") && m["strong_separation"].boolean();
    spec.kind = std::move(ifs);
  } else if (type == "product") {
    m.expect_keys({"type", "first", "second"});
    spec = make_product(measure_from(m["first"]), measure_from(m["second"]));
  } else if (type == "bernoulli_convolution") {
    m.expect_keys({"type", "t", "p", "block"});
    BernoulliConvolution bc;
    bc.t = m["t"].number(0.0, 1.0);
    bc.p = m["p"].number(0.0, 1.0);
    bc.block = static_cast<int>(integer_or(m, "block", 8, 1, 26));
    spec.kind = bc;
  } else {
    m["type"].fail("unknown measure type \"" + type +
                   "\" (bernoulli_digits, markov_digits, linear_ifs, product, bernoulli_convolution)");
  }
  try {
    validate_spec(spec);
  } catch (const Error& e) {
    m.fail(e.what());
  }
  return spec;
}

std::optional<int> digit_base_1d(const MeasureSpec& spec) {
  if (spec.dim() != 1 || !has_exact_tree(spec)) return std::nullopt;
  return digit_coding(spec).base;
}

// ---------------------------------------------------------------------------
// Knob formatting

std::string fmt_list(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + format_number(v[i]);
  return out + "]";
}

std::string fmt_list(const std::vector<int>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + std::to_string(v[i]);
  return out + "]";
}

std::string fmt_list(const std::vector<std::string>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + v[i];
  return out + "]";
}

// ---------------------------------------------------------------------------
// Per-experiment settings

using Knobs = std::vector<std::pair<std::string, std::string>>;

DimSettings dim_settings(const Node& root, Knobs& knobs) {
  root.expect_keys({"experiment", "seed", "output", "workers", "measure", "depth", "samples"});
  DimSettings s;
  s.measure = measure_from(root["measure"]);
  if (!has_exact_tree(s.measure)) root["measure"].fail("dim needs a measure with an exact digit tree");
  s.depth = static_cast<std::size_t>(integer_or(root, "depth", 15, 1, 100000));
  s.samples = static_cast<std::size_t>(integer_or(root, "samples", 500, 1, 10000000));
  knobs = {{"measure", describe(s.measure)}, {"depth", std::to_string(s.depth)}, {"samples", std::to_string(s.samples)}};
  return s;
}

std::optional<PartitionOperator> operator_from(const Node& n, const MeasureSpec& spec) {
  const std::string name = n.str();
  if (name == "auto") return std::nullopt;
  if (name == "rw") {
    const auto* prod = std::get_if<Product>(&spec.kind);
    if (!prod || digit_base_1d(*prod->first) != 2 || digit_base_1d(*prod->second) != 3)
      n.fail("the rw operator needs a product of a base-2 and a base-3 digit measure");
    return PartitionOperator::rw();
  }
  if (name.rfind("base-", 0) == 0) {
    try {
      std::size_t used = 0;
      const int b = std::stoi(name.substr(5), &used);
      if (used + 5 == name.size() && b >= 2 && b <= 64) return PartitionOperator::base_b(b);
    } catch (const std::exception&) {
    }
  }
  n.fail("operator must be \"auto\", \"rw\" or \"base-<b>\" with 2 <= b <= 64");
}

std::string operator_label(const std::optional<PartitionOperator>& op) {
  if (!op) return "auto";
  return op->kind == PartitionOperator::Kind::Rw ? "rw" : "base-" + std::to_string(op->base);
}

ScanSettings scan_settings(const Node& root, std::uint64_t seed, Knobs& knobs) {
  root.expect_keys({"experiment", "seed", "output", "workers", "measure", "slopes", "slope_grid", "axes", "q", "N",
                    "samples", "epsilon", "operator", "sampler_points", "min_cell_points"});
  ScanSettings s;
  s.measure = measure_from(root["measure"]);
  if (s.measure.dim() != 2) root["measure"].fail("scan needs a planar measure");
  if (root.has("slopes") && root.has("slope_grid")) root["slope_grid"].fail("give either slopes or slope_grid, not both");
  std::string grid_label;
  if (root.has("slopes")) {
    for (const auto& v : root["slopes"].items()) s.slopes.push_back(v.number(-1e6, 1e6));
    grid_label = "explicit";
  } else {
    double lo = 0.1, hi = 2.0;
    long long per_side = 10;
    if (root.has("slope_grid")) {
      const Node g = root["slope_grid"];
      g.expect_keys({"lo", "hi", "per_side"});
      lo = g["lo"].number(1e-9, 1e6);
      hi = g["hi"].number(lo, 1e6);
      per_side = g["per_side"].integer(1, 1000);
    }
    s.slopes = symmetric_slope_grid(lo, hi, static_cast<std::size_t>(per_side));
    grid_label = "+-[" + format_number(lo) + ", " + format_number(hi) + "] x " + std::to_string(per_side);
  }
  s.axes = !root.has("axes") || root["axes"].boolean();
  if (s.slopes.empty() && !s.axes) root.fail("nothing to scan: no slopes and axes disabled");
  s.estimator.q = static_cast<int>(integer_or(root, "q", 8, 1, 20));
  s.estimator.n_scenery = static_cast<std::size_t>(integer_or(root, "N", 400, 1, 1000000));
  s.estimator.n_samples = static_cast<std::size_t>(integer_or(root, "samples", 200, 1, 1000000));
  s.estimator.sampler_points = static_cast<std::size_t>(integer_or(root, "sampler_points", 200000, 1000, 100000000));
  s.estimator.min_cell_points = static_cast<std::size_t>(
      integer_or(root, "min_cell_points", 2000, 10, static_cast<long long>(s.estimator.sampler_points)));
  s.estimator.seed = seed;
  s.epsilon = number_or(root, "epsilon", 0.05, 0.0, 10.0);
  if (root.has("operator")) s.op = operator_from(root["operator"], s.measure);
  knobs = {{"measure", describe(s.measure)},
           {"slope_grid", grid_label},
           {"slopes", fmt_list(s.slopes)},
           {"axes", s.axes ? "true" : "false"},
           {"q", std::to_string(s.estimator.q)},
           {"N", std::to_string(s.estimator.n_scenery)},
           {"samples", std::to_string(s.estimator.n_samples)},
           {"epsilon", format_number(s.epsilon)},
           {"operator", operator_label(s.op)},
           {"sampler_points", std::to_string(s.estimator.sampler_points)},
           {"min_cell_points", std::to_string(s.estimator.min_cell_points)}};
  return s;
}

ChainSettings chain_settings(const Node& root, Knobs& knobs) {
  root.expect_keys({"experiment", "seed", "output", "workers", "measure", "x2x3", "steps", "every", "functionals",
                    "slope", "q"});
  ChainSettings s;
  if (root.has("measure") == root.has("x2x3")) root.fail("cpchain needs exactly one of \"measure\" and \"x2x3\"");
  if (root.has("measure")) {
    s.measure = measure_from(root["measure"]);
    if (!has_exact_tree(*s.measure)) root["measure"].fail("cpchain needs a measure with an exact digit tree");
    knobs.emplace_back("measure", describe(*s.measure));
    knobs.emplace_back("operator", "base-" + std::to_string(digit_coding(*s.measure).base));
  } else {
    const Node x = root["x2x3"];
    x.expect_keys({"mu", "nu", "w0"});
    s.mu = measure_from(x["mu"]);
    s.nu = measure_from(x["nu"]);
    if (digit_base_1d(*s.mu) != 2) x["mu"].fail("mu must be a base-2 digit measure on the line");
    if (digit_base_1d(*s.nu) != 3) x["nu"].fail("nu must be a base-3 digit measure on the line");
    if (x.has("w0")) {
      const double w = x["w0"].number(0.0, std::log(3.0));
      if (!(w < std::log(3.0))) x["w0"].fail("w0 must lie in [0, log 3)");
      s.w0 = w;
    }
    knobs.emplace_back("mu", describe(*s.mu));
    knobs.emplace_back("nu", describe(*s.nu));
    knobs.emplace_back("w0", s.w0 ? format_number(*s.w0) : "uniform");
    knobs.emplace_back("operator", "rw");
  }
  s.steps = static_cast<std::size_t>(integer_or(root, "steps", 10000, 1, 100000000));
  s.every = static_cast<std::size_t>(integer_or(root, "every", 1, 1, 100000000));
  if (root.has("functionals")) {
    for (const auto& f : root["functionals"].items()) {
      const std::string name = f.str();
      if (name != "log_mass" && name != "w" && name != "e_q") f.fail("functional must be log_mass, w or e_q");
      if (name == "w" && !s.mu) f.fail("the w functional needs an x2x3 chain");
      if (std::find(s.functionals.begin(), s.functionals.end(), name) != s.functionals.end()) f.fail("listed twice");
      s.functionals.push_back(name);
    }
  } else {
    s.functionals = s.mu ? std::vector<std::string>{"log_mass", "w"} : std::vector<std::string>{"log_mass"};
  }
  s.slope = number_or(root, "slope", 1.0, -1e6, 1e6);
  s.q = static_cast<int>(integer_or(root, "q", 8, 1, 16));
  knobs.emplace_back("steps", std::to_string(s.steps));
  knobs.emplace_back("every", std::to_string(s.every));
  knobs.emplace_back("functionals", fmt_list(s.functionals));
  knobs.emplace_back("slope", format_number(s.slope));
  knobs.emplace_back("q", std::to_string(s.q));
  return s;
}

BcGridSettings bc_settings(const Node& root, Knobs& knobs) {
  root.expect_keys({"experiment", "seed", "output", "workers", "t", "p", "blocks", "atoms_extra"});
  BcGridSettings s;
  if (root.has("t")) {
    s.t.clear();
    for (const auto& v : root["t"].items()) {
      const double t = v.number(0.0, 1.0);
      if (!(t > 0.0 && t < 1.0)) v.fail("t must lie in (0, 1)");
      s.t.push_back(t);
    }
    if (s.t.empty()) root["t"].fail("no t values");
  }
  s.p = number_or(root, "p", 0.5, 0.0, 1.0);
  if (!(s.p > 0.0 && s.p < 1.0)) root["p"].fail("p must lie in (0, 1)");
  s.atoms_extra = static_cast<int>(integer_or(root, "atoms_extra", 8, 0, 25));
  if (root.has("blocks")) {
    s.blocks.clear();
    for (const auto& v : root["blocks"].items()) s.blocks.push_back(static_cast<int>(v.integer(1, 26 - s.atoms_extra)));
    if (s.blocks.empty()) root["blocks"].fail("no block lengths");
  } else {
    for (int b : s.blocks)
      if (b + s.atoms_extra > 26) root["atoms_extra"].fail("block + atoms_extra exceeds 26 for the default blocks");
  }
  knobs = {{"t", fmt_list(s.t)},
           {"p", format_number(s.p)},
           {"blocks", fmt_list(s.blocks)},
           {"atoms_extra", std::to_string(s.atoms_extra)}};
  return s;
}

ConvolveSettings convolve_settings(const Node& root, Knobs& knobs) {
  root.expect_keys({"experiment", "seed", "output", "workers", "measure", "level", "iterations"});
  ConvolveSettings s;
  s.measure = measure_from(root["measure"]);
  const auto base = digit_base_1d(s.measure);
  if (!base) root["measure"].fail("convolve needs a digit measure on the line");
  s.level = static_cast<int>(integer_or(root, "level", 10, 1, 24));
  if (std::pow(*base, s.level) > kMaxCircleCells) root.fail("base^level exceeds 2^24 cells");
  s.iterations = static_cast<int>(integer_or(root, "iterations", 2, 0, 8));
  knobs = {{"measure", describe(s.measure)},
           {"level", std::to_string(s.level)},
           {"iterations", std::to_string(s.iterations)}};
  return s;
}

// Number of positive-mass words at `depth`, counted per automaton state.
double positive_word_count(const TreeMeasure<double>& tm, std::size_t depth) {
  std::map<TreeMeasure<double>::State, double> layer{{tm.root(), 1.0}};
  for (std::size_t n = 0; n < depth; ++n) {
    std::map<TreeMeasure<double>::State, double> next;
    for (const auto& [s, count] : layer)
      for (Symbol b = 0; b < tm.alphabet_size(); ++b)
        if (tm.prob_double(s, b) > 0.0) next[tm.child(s, b)] += count;
    layer = std::move(next);
  }
  double total = 0.0;
  for (const auto& entry : layer) total += entry.second;
  return total;
}

LiftSettings lift_settings(const Node& root, Knobs& knobs) {
  root.expect_keys({"experiment", "seed", "output", "workers", "map", "measure", "depth", "defect_from"});
  LiftSettings s;
  const Node m = root["map"];
  const std::string type = m["type"].str();
  int source_dim = 0, source_base = 0;
  if (type == "coding") {
    m.expect_keys({"type", "base", "dim"});
    source_base = static_cast<int>(m["base"].integer(2, 64));
    source_dim = static_cast<int>(integer_or(m, "dim", 1, 1, 2));
    s.map = coding_map(source_base, source_dim);
    s.map_label = "coding(base=" + std::to_string(source_base) + " dim=" + std::to_string(source_dim) + ")";
  } else if (type == "linear") {
    m.expect_keys({"type", "base", "a", "b"});
    source_base = static_cast<int>(m["base"].integer(2, 64));
    source_dim = 2;
    const double a = m["a"].number(0.0, 1e3), b = m["b"].number(0.0, 1e3);
    if (!(a + b > 0.0)) m.fail("a and b cannot both vanish");
    s.map = linear_map(source_base, a, b);
    s.map_label = "linear(base=" + std::to_string(source_base) + " a=" + format_number(a) + " b=" + format_number(b) + ")";
  } else if (type == "constant") {
    m.expect_keys({"type", "alphabet", "rho", "point"});
    const auto alphabet = m["alphabet"].integer(2, 4096);
    const double rho = m["rho"].number(1e-6, 0.5);
    const auto pt = m["point"].items();
    if (pt.empty() || pt.size() > 2) m["point"].fail("point needs 1 or 2 coordinates");
    Eigen::VectorXd point(static_cast<Eigen::Index>(pt.size()));
    for (std::size_t i = 0; i < pt.size(); ++i) point(static_cast<Eigen::Index>(i)) = pt[i].number(-1e6, 1e6);
    s.map = constant_map(static_cast<std::size_t>(alphabet), rho, point);
    s.map_label = "constant(alphabet=" + std::to_string(alphabet) + " rho=" + format_number(rho) + ")";
  } else {
    m["type"].fail("unknown map type \"" + type + "\" (coding, linear, constant)");
  }
  s.depth = static_cast<std::size_t>(integer_or(root, "depth", 8, 1, 12));
  s.defect_from = static_cast<std::size_t>(integer_or(root, "defect_from", std::min<long long>(3, static_cast<long long>(s.depth)), 1,
                                                      static_cast<long long>(s.depth)));
  double nodes = std::pow(static_cast<double>(s.map.alphabet_size), static_cast<double>(s.depth));
  if (root.has("measure")) {
    s.measure = measure_from(root["measure"]);
    if (!has_exact_tree(*s.measure)) root["measure"].fail("lift-check needs a measure with an exact digit tree");
    const auto coding = digit_coding(*s.measure);
    if (type == "constant" || coding.base != source_base || coding.dim != source_dim)
      root["measure"].fail("measure coding does not match the source alphabet of the map");
    nodes = positive_word_count(build_tree<double>(*s.measure, s.depth), s.depth);
  }
  if (nodes > kMaxLiftNodes) root["depth"].fail("too many level-" + std::to_string(s.depth) + " words (" + format_number(nodes) + " > 2e6)");
  knobs = {{"map", s.map_label},
           {"measure", s.measure ? describe(*s.measure) : "none"},
           {"depth", std::to_string(s.depth)},
           {"defect_from", std::to_string(s.defect_from)}};
  return s;
}

// ---------------------------------------------------------------------------
// Runners

Table dim_table(const DimSettings& s, std::uint64_t seed, json& summary) {
  const auto tm = build_tree<double>(s.measure, s.depth);
  const auto est = dim_lower_estimate(tm, s.samples, s.depth, seed);
  double analytic = NAN;
  try {
    analytic = analytic_summary(s.measure).analytic_dimension;
  } catch (const Error&) {
  }
  Table t{{"depth", "samples", "estimate", "stderr", "lln_diagnostic", "analytic"}, {}};
  t.rows.push_back({std::to_string(s.depth), std::to_string(s.samples), format_number(est.mean),
                    format_number(est.std_error), format_number(est.lln_diagnostic), format_number(analytic)});
  summary = {{"estimate", est.mean}, {"stderr", est.std_error}, {"lln_diagnostic", est.lln_diagnostic}};
  if (std::isfinite(analytic)) summary["analytic"] = analytic;
  return t;
}

Table scan_table(const ScanSettings& s, std::uint64_t seed, json& summary) {
  Table t{{"projection", "slope", "estimate", "stderr", "q", "N", "n_samples", "seed", "method", "flagged"}, {}};
  std::vector<std::pair<std::string, ProjectionEstimate>> axis_rows;
  ScanResult scan;
  scan.max_estimate = -INFINITY;
  if (!s.slopes.empty()) scan = scan_slopes(s.measure, s.slopes, s.estimator, s.epsilon, s.op);
  const auto row = [&](const std::string& kind, const std::string& slope, const ProjectionEstimate& r,
                       std::uint64_t row_seed, bool flagged) {
    t.rows.push_back({kind, slope, format_number(r.estimate), format_number(r.std_error), std::to_string(r.q),
                      std::to_string(r.n_scenery), std::to_string(r.n_samples), std::to_string(row_seed), r.method,
                      flagged ? "1" : "0"});
  };
  std::size_t flagged = 0;
  std::set<std::string> caveats;
  double lo = INFINITY;
  for (std::size_t k = 0; k < scan.rows.size(); ++k) {
    const auto& r = scan.rows[k];
    row("slope", format_number(r.slope), r.result, derive_seed(seed, k), r.flagged);
    flagged += r.flagged;
    lo = std::min(lo, r.result.estimate);
    if (!r.result.caveat.empty()) caveats.insert(r.result.caveat);
  }
  if (s.axes) {
    const std::pair<std::string, Projection> axes[2] = {{"axis_x", Projection::axis_x()}, {"axis_y", Projection::axis_y()}};
    for (std::size_t i = 0; i < 2; ++i) {
      EstimatorConfig cfg = s.estimator;
      cfg.seed = derive_seed(seed, s.slopes.size() + i);
      const auto r = projection_dim_lower(s.measure, axes[i].second, cfg, s.op);
      const bool flag = !s.slopes.empty() && r.estimate < scan.max_estimate - s.epsilon;
      row(axes[i].first, "", r, cfg.seed, flag);
      summary[axes[i].first] = r.estimate;
      if (!r.caveat.empty()) caveats.insert(r.caveat);
    }
  }
  if (!s.slopes.empty()) {
    summary["max_slope_estimate"] = scan.max_estimate;
    summary["min_slope_estimate"] = lo;
    summary["flagged_slopes"] = flagged;
  }
  if (!caveats.empty()) summary["caveats"] = std::vector<std::string>(caveats.begin(), caveats.end());
  return t;
}

Table chain_table(const ChainSettings& s, std::uint64_t seed, json& summary) {
  const PartitionOperator op =
      s.measure ? PartitionOperator::base_b(digit_coding(*s.measure).base) : PartitionOperator::rw();
  const CPState init = s.measure ? tree_state(build_tree<double>(*s.measure, kChainDepth))
                                 : x2x3_initial(*s.mu, *s.nu, s.w0, derive_seed(seed, 0));
  ProjectionCache cache;
  const Projection proj = Projection::with_slope(s.slope);
  std::vector<Functional> fns;
  for (const auto& name : s.functionals) {
    if (name == "log_mass") {
      fns.push_back({name, [](const CPState&, const StepRecord& r) { return r.log_mass; }});
    } else if (name == "w") {
      fns.push_back({name, [](const CPState& st, const StepRecord&) { return st.w ? *st.w : NAN; }});
    } else {
      fns.push_back({name, [&, op](const CPState& st, const StepRecord&) { return state_e_q(st, proj, s.q, op, &cache); }});
    }
  }
  const auto run = cp_run(init, s.steps, op, fns, derive_seed(seed, 1));
  const auto dim = chain_dimension(run, op.rho());

  Table t{{"step", "chosen_child", "log_mass"}, {}};
  for (const auto& n : run.names)
    if (n != "log_mass") t.columns.push_back(n);
  for (std::size_t i = 0; i < run.length(); i += s.every) {
    std::vector<std::string> r{std::to_string(i), std::to_string(run.steps[i].child), format_number(run.steps[i].log_mass)};
    for (std::size_t f = 0; f < run.names.size(); ++f)
      if (run.names[f] != "log_mass") r.push_back(format_number(run.values[f][i]));
    t.rows.push_back(std::move(r));
  }
  summary = {{"chain_dimension", dim.value}, {"chain_dimension_stderr", dim.std_error}, {"rho", op.rho()}};
  for (std::size_t f = 0; f < run.names.size(); ++f) summary["mean_" + run.names[f]] = run.average(f);
  return t;
}

Table bc_table(const BcGridSettings& s, json& summary) {
  Table t{{"N", "t", "p", "H_tN", "dim_slope", "dim_ratio"}, {}};
  std::map<int, std::vector<double>> h_by_block, slope_by_block;
  for (int N : s.blocks) {
    for (double tv : s.t) {
      const auto atoms = bernoulli_convolution_atoms(tv, s.p, N + s.atoms_extra);
      const int half = (N + 1) / 2;
      const double h = ball_entropy(atoms.position, atoms.mass, std::pow(tv, N));
      const double h_half = ball_entropy(atoms.position, atoms.mass, std::pow(tv, half));
      const double scale = std::log(1.0 / tv);
      const double slope = N > half ? (h - h_half) / ((N - half) * scale) : NAN;
      const double ratio = h / (N * scale);
      t.rows.push_back({std::to_string(N), format_number(tv), format_number(s.p), format_number(h), format_number(slope),
                        format_number(ratio)});
      h_by_block[N].push_back(h);
      slope_by_block[N].push_back(slope);
    }
  }
  double jump = 0.0, spread = 0.0;
  for (const auto& [N, hs] : h_by_block)
    for (std::size_t i = 1; i < hs.size(); ++i) jump = std::max(jump, std::abs(hs[i] - hs[i - 1]));
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& entry : slope_by_block) {
      lo = std::min(lo, entry.second[i]);
      hi = std::max(hi, entry.second[i]);
    }
    if (std::isfinite(hi - lo)) spread = std::max(spread, hi - lo);
  }
  summary = {{"max_adjacent_H_jump", jump}, {"max_dim_slope_spread_across_blocks", spread}};
  return t;
}

Table convolve_table(const ConvolveSettings& s, json& summary) {
  const int base = digit_coding(s.measure).base;
  auto g = tree_grid(build_tree<double>(s.measure, static_cast<std::size_t>(s.level)), s.level);
  const double scale = s.level * std::log(static_cast<double>(base));
  Table t{{"iteration", "dim_partition", "dim_ball", "support_cells"}, {}};
  std::vector<double> dims;
  for (int k = 0; k <= s.iterations; ++k) {
    if (k > 0) g = circle_convolve(g, g);
    const auto h = h_r(g);
    dims.push_back(h.partition / scale);
    t.rows.push_back({std::to_string(k), format_number(h.partition / scale), format_number(h.ball / scale),
                      std::to_string((g.mass > 0.0).count())});
  }
  summary = {{"dims", dims}, {"nondecreasing", std::is_sorted(dims.begin(), dims.end())}};
  return t;
}

Table lift_table(const LiftSettings& s, json& summary) {
  std::optional<TreeMeasure<double>> tm;
  if (s.measure) tm = build_tree<double>(*s.measure, s.depth + 8);
  const auto sys = lift(s.map, s.depth, tm ? &*tm : nullptr);
  const auto faith = faithfulness_check(sys, s.depth);
  std::optional<DefectReport> defect;
  if (tm) defect = entropy_defect(sys, *tm, s.depth);
  Table t{{"level", "N", "P", "branching", "nodes", "multiplicity", "decay", "defect"}, {}};
  for (std::size_t n = 0; n <= s.depth; ++n) {
    const auto at = [n](const std::vector<double>& v) { return n < v.size() ? v[n] : NAN; };
    t.rows.push_back({std::to_string(n), std::to_string(sys.N[n]), format_number(sys.P[n]),
                      std::to_string(n == 0 ? std::size_t{1} : sys.branching(n)), std::to_string(sys.levels[n].size()),
                      format_number(at(faith.mult_per_level)), format_number(at(faith.decay_per_level)),
                      format_number(defect ? at(defect->per_level) : NAN)});
  }
  summary = {{"morphism", check_morphism(sys)}, {"containment", check_containment(sys)}, {"C_mult", faith.C_mult},
             {"C_decay", faith.C_decay}, {"C", faith.C}, {"faithful", faith.ok}};
  if (defect) {
    const double from = entropy_defect(sys, *tm, s.defect_from).max_defect;
    summary["max_defect"] = defect->max_defect;
    summary["defect_at_defect_from"] = from;
    summary["defect_growth"] = defect->max_defect - from;
  }
  return t;
}

std::string eigen_version() {
  return std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
         std::to_string(EIGEN_MINOR_VERSION);
}

}  // namespace

// ---------------------------------------------------------------------------

ConfigError::ConfigError(std::string file, int line, const std::string& what)
    : std::runtime_error(what), file_(std::move(file)), line_(line) {}

std::string ConfigError::located() const {
  return line_ > 0 ? file_ + ":" + std::to_string(line_) + ": " + what() : file_ + ": " + what();
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

MeasureSpec parse_measure(const json& j, const std::string& text, const std::string& file,
                          std::vector<std::string> where) {
  const Source src{text, file};
  return measure_from(Node(src, j, std::move(where)));
}

ExperimentConfig parse_config(const std::string& text, const std::string& file) {
  ExperimentConfig cfg;
  cfg.file = file;
  cfg.text = text;
  try {
    cfg.doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(file, line_at(text, e.byte == 0 ? 0 : e.byte - 1), std::string("malformed JSON: ") + e.what());
  }
  const Source src{cfg.text, cfg.file};
  const Node root(src, cfg.doc, {});
  if (!cfg.doc.is_object()) root.fail("the config must be a JSON object");
  cfg.tag = root["experiment"].str();
  if (!kTags.count(cfg.tag)) root["experiment"].fail("unknown experiment \"" + cfg.tag + "\" (dim, scan, cpchain, bc-grid, convolve, lift-check)");
  const Node seed = root["seed"];
  if (!cfg.doc["seed"].is_number_unsigned()) seed.fail("seed must be a nonnegative integer");
  cfg.seed = cfg.doc["seed"].get<std::uint64_t>();
  cfg.output = root["output"].str();
  if (cfg.output.empty()) root["output"].fail("output path is empty");
  cfg.workers = static_cast<unsigned>(integer_or(root, "workers", 0, 0, 1024));

  Knobs knobs;
  if (cfg.tag == "dim") cfg.settings = dim_settings(root, knobs);
  else if (cfg.tag == "scan") cfg.settings = scan_settings(root, cfg.seed, knobs);
  else if (cfg.tag == "cpchain") cfg.settings = chain_settings(root, knobs);
  else if (cfg.tag == "bc-grid") cfg.settings = bc_settings(root, knobs);
  else if (cfg.tag == "convolve") cfg.settings = convolve_settings(root, knobs);
  else cfg.settings = lift_settings(root, knobs);
  cfg.knobs = std::move(knobs);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, 0, "cannot read config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  RunResult out;
  json summary = json::object();
  out.table = std::visit(
      [&](const auto& s) -> Table {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, DimSettings>) return dim_table(s, cfg.seed, summary);
        else if constexpr (std::is_same_v<T, ScanSettings>) return scan_table(s, cfg.seed, summary);
        else if constexpr (std::is_same_v<T, ChainSettings>) return chain_table(s, cfg.seed, summary);
        else if constexpr (std::is_same_v<T, BcGridSettings>) return bc_table(s, summary);
        else if constexpr (std::is_same_v<T, ConvolveSettings>) return convolve_table(s, summary);
        else return lift_table(s, summary);
      },
      cfg.settings);
  out.summary = std::move(summary);
  return out;
}

std::string render_csv(const ExperimentConfig& cfg, const Table& table) {
  std::ostringstream os;
  os << "# experiment: " << cfg.tag << '\n' << "# seed: " << cfg.seed << '\n';
  for (const auto& [key, value] : cfg.knobs) os << "# " << key << ": " << value << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << table.columns[i];
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
  return os.str();
}

void write_outputs(const ExperimentConfig& cfg, const RunResult& result, double wall_seconds) {
  namespace fs = std::filesystem;
  const fs::path csv(cfg.output);
  if (csv.has_parent_path()) fs::create_directories(csv.parent_path());
  {
    std::ofstream out(csv, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + cfg.output);
    out << render_csv(cfg, result.table);
    if (!out) throw std::runtime_error("write failed for " + cfg.output);
  }
  json knobs = json::object();
  for (const auto& [key, value] : cfg.knobs) knobs[key] = value;
  json manifest = {
      {"tool", "fracproj"},
      {"tool_version", kToolVersion},
      {"experiment", cfg.tag},
      {"seed", cfg.seed},
      {"config_file", cfg.file},
      {"config", cfg.doc},
      {"knobs", knobs},
      {"output", cfg.output},
      {"columns", result.table.columns},
      {"rows", result.table.rows.size()},
      {"summary", result.summary},
      {"wall_seconds", wall_seconds},
      {"workers", worker_count()},
      {"versions",
       {{"compiler", __VERSION__},
        {"cxx_standard", __cplusplus},
        {"eigen", eigen_version()},
        {"boost", BOOST_LIB_VERSION},
        {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                              "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
        {"cli11", CLI11_VERSION}}},
  };
  const std::string path = cfg.output + ".manifest.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << manifest.dump(2) << '\n';
}

std::vector<std::pair<std::string, std::string>> schema_examples() {
  return {
      {"dim", R"({
  "experiment": "dim",
  "seed": 1,
  "output": "out/dim_cantor.csv",
  "measure": {"type": "bernoulli_digits", "base": 3, "digits": [0, 2], "probs": ["1/2", "1/2"]},
  "depth": 15,
  "samples": 500
})"},
      {"dim-markov", R"({
  "experiment": "dim",
  "seed": 2,
  "output": "out/dim_markov.csv",
  "measure": {"type": "markov_digits", "base": 2, "digits": [0, 1],
              "transition": [[0.8, 0.2], [0.3, 0.7]], "initial": [0.6, 0.4]},
  "depth": 2000,
  "samples": 200
})"},
      {"dim-ifs", R"({
  "experiment": "dim",
  "seed": 3,
  "output": "out/dim_ifs.csv",
  "measure": {"type": "linear_ifs", "dim": 1, "strong_separation": true,
              "maps": [{"ratio": 0.3333333333333333, "translation": [0]},
                       {"ratio": 0.3333333333333333, "translation": [0.6666666666666666]}],
              "weights": [0.5, 0.5]},
  "depth": 15,
  "samples": 500
})"},
      {"scan", R"({
  "experiment": "scan",
  "seed": 1,
  "output": "out/scan_x2x3.csv",
  "measure": {"type": "product",
              "first": {"type": "bernoulli_digits", "base": 2, "digits": [0, 1], "probs": [0.9, 0.1]},
              "second": {"type": "bernoulli_digits", "base": 3, "digits": [0, 2], "probs": [0.9, 0.1]}},
  "slope_grid": {"lo": 0.1, "hi": 2.0, "per_side": 10},
  "axes": true,
  "q": 8,
  "N": 400,
  "samples": 200,
  "epsilon": 0.05,
  "operator": "auto"
})"},
      {"scan-sampler", R"({
  "experiment": "scan",
  "seed": 4,
  "output": "out/scan_bc.csv",
  "measure": {"type": "product",
              "first": {"type": "bernoulli_convolution", "t": 0.6, "p": 0.5, "block": 8},
              "second": {"type": "bernoulli_digits", "base": 2, "digits": [0, 1], "probs": [0.5, 0.5]}},
  "slopes": [-1.0, 1.0],
  "axes": false,
  "q": 6,
  "N": 20,
  "samples": 20,
  "sampler_points": 100000,
  "min_cell_points": 2000
})"},
      {"cpchain", R"({
  "experiment": "cpchain",
  "seed": 7,
  "output": "out/cpchain_x2x3.csv",
  "x2x3": {"mu": {"type": "bernoulli_digits", "base": 2, "digits": [0, 1], "probs": [0.9, 0.1]},
           "nu": {"type": "bernoulli_digits", "base": 3, "digits": [0, 2], "probs": [0.9, 0.1]},
           "w0": 0.25},
  "steps": 10000,
  "every": 10,
  "functionals": ["log_mass", "w", "e_q"],
  "slope": 1.0,
  "q": 8
})"},
      {"cpchain-tree", R"({
  "experiment": "cpchain",
  "seed": 8,
  "output": "out/cpchain_cantor.csv",
  "measure": {"type": "bernoulli_digits", "base": 3, "digits": [0, 2], "probs": [0.5, 0.5]},
  "steps": 10000
})"},
      {"bc-grid", R"({
  "experiment": "bc-grid",
  "seed": 0,
  "output": "out/bc_grid.csv",
  "t": [0.30, 0.35, 0.40, 0.45, 0.50],
  "p": 0.5,
  "blocks": [4, 8, 12],
  "atoms_extra": 8
})"},
      {"convolve", R"({
  "experiment": "convolve",
  "seed": 0,
  "output": "out/convolve_cantor.csv",
  "measure": {"type": "bernoulli_digits", "base": 3, "digits": [0, 2], "probs": [0.5, 0.5]},
  "level": 10,
  "iterations": 2
})"},
      {"lift-check", R"({
  "experiment": "lift-check",
  "seed": 0,
  "output": "out/lift_pi1.csv",
  "map": {"type": "linear", "base": 3, "a": 0.5, "b": 0.5},
  "measure": {"type": "product",
              "first": {"type": "bernoulli_digits", "base": 3, "digits": [0, 2], "probs": [0.5, 0.5]},
              "second": {"type": "bernoulli_digits", "base": 3, "digits": [0, 2], "probs": [0.5, 0.5]}},
  "depth": 8,
  "defect_from": 3
})"},
  };
}

std::string schema_text() {
  std::ostringstream os;
  os << R"(fracproj experiment config (JSON object)

Common keys
  experiment   string, required: dim | scan | cpchain | bc-grid | convolve | lift-check
  seed         integer >= 0, required
  output       string, required: CSV path; the manifest goes to <output>.manifest.json
  workers      integer 0..1024, optional (0 = hardware threads); results do not depend on it
Unknown keys are rejected. Probabilities may be numbers (read as the decimal they spell)
or strings "p/q".

Measures ("type" selects the variant)
  bernoulli_digits       base 2..64, dim 1|2 (default 1), digits (integers, or [x, y] pairs when dim = 2),
                         probs (one per digit, sum 1)
  markov_digits          base, dim, digits, transition (row-stochastic, row i = law after digits[i]),
                         initial (law of the first digit)
  linear_ifs             dim 1|2, maps [{ratio in (0,1), angle (radians, default 0), reflect (default false),
                         translation [dim numbers]}], weights, strong_separation (default false)
  product                first, second: measures on the line
  bernoulli_convolution  t in (0,1), p in [0,1], block 1..26 (default 8)

Experiments
  dim         measure (exact digit tree); depth 1..100000 (15); samples (500)
              columns: depth,samples,estimate,stderr,lln_diagnostic,analytic
  scan        measure (planar); slopes [..] or slope_grid {lo, hi, per_side} (default 0.1, 2, 10);
              axes (true); q 1..20 (8); N (400); samples (200); epsilon (0.05);
              operator auto | rw | base-<b> (auto); sampler_points (200000); min_cell_points (2000)
              columns: projection,slope,estimate,stderr,q,N,n_samples,seed,method,flagged
  cpchain     measure (exact digit tree, BaseB chain) or x2x3 {mu base 2, nu base 3, w0 in [0, log 3)};
              steps (10000); every (1); functionals from log_mass, w, e_q
              (log_mass, plus w for x2x3); slope (1); q 1..16 (8)
              columns: step,chosen_child,log_mass,<other functionals>
  bc-grid     t list in (0,1) ([0.3 0.35 0.4 0.45 0.5]); p (0.5); blocks ([4 8 12]);
              atoms_extra (8), block + atoms_extra <= 26
              columns: N,t,p,H_tN,dim_slope,dim_ratio
  convolve    measure (digit measure on the line); level (10), base^level <= 2^24; iterations 0..8 (2)
              columns: iteration,dim_partition,dim_ball,support_cells
  lift-check  map {type: coding (base, dim) | linear (base, a, b) | constant (alphabet, rho, point)};
              measure (optional, same coding as the map's source); depth 1..12 (8); defect_from (3)
              columns: level,N,P,branching,nodes,multiplicity,decay,defect

Output CSV: "# key: value" header lines with the seed and every effective knob, then the
column line and rows; numbers carry 6 significant digits.
Exit codes: 0 ok, 2 config error, 3 runtime error.

Examples
)";
  for (const auto& [name, text] : schema_examples()) os << "\n--- " << name << " ---\n" << text << '\n';
  return os.str();
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Projection-dimension experiments on fractal measures"};
  app.require_subcommand(1);
  int workers = -1;
  app.add_option("--workers", workers, "Worker threads (0 = hardware); overrides the config")->check(CLI::Range(0, 1024));
  std::string config_path;
  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", config_path, "Config file")->required();
  auto* validate = app.add_subcommand("validate", "Check a config file without running it");
  validate->add_option("config", config_path, "Config file")->required();
  auto* schema = app.add_subcommand("schema", "Print the config schema with examples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (schema->parsed()) {
    std::cout << schema_text();
    return 0;
  }

  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.located() << '\n';
    return 2;
  }

  if (validate->parsed()) {
    std::cout << "ok: " << cfg.tag << " (seed " << cfg.seed << ")\n";
    for (const auto& [key, value] : cfg.knobs) std::cout << "  " << key << ": " << value << '\n';
    return 0;
  }

  (void)run;
  set_worker_count(workers >= 0 ? static_cast<unsigned>(workers) : cfg.workers);
  try {
    const auto start = std::chrono::steady_clock::now();
    const auto result = run_experiment(cfg);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_outputs(cfg, result, wall);
    std::cout << "wrote " << cfg.output << " (" << result.table.rows.size() << " rows, " << format_number(wall) << " s)\n";
  } catch (const Error& e) {
    std::cerr << "runtime error: " << e.module() << ": " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

}  // namespace fracproj::cli
