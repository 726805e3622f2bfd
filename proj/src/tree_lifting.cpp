#include "fracproj/tree_lifting.hpp"

#include "fracproj/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace fracproj {

namespace {

constexpr const char* kModule = "tree_lifting";
constexpr double kSlack = 1e-12;

Cube make_cube(Eigen::VectorXd lo, double side) {
  Eigen::VectorXd hi = lo.array() + side;
  return Cube{std::move(lo), std::move(hi)};
}

/// Maximal number of closed boxes sharing a point. The maximum of a family of
/// closed boxes is attained at a point whose coordinates are lower corners.
int max_overlap(const std::vector<Cube>& boxes) {
  if (boxes.empty()) return 0;
  const int k = boxes.front().dim();
  std::vector<std::vector<double>> coords(k);
  for (int d = 0; d < k; ++d) {
    for (const auto& b : boxes) coords[d].push_back(b.lo(d));
    std::sort(coords[d].begin(), coords[d].end());
    coords[d].erase(std::unique(coords[d].begin(), coords[d].end()), coords[d].end());
  }
  int best = 0;
  Eigen::VectorXd p(k);
  std::vector<std::size_t> idx(k, 0);
  while (true) {
    for (int d = 0; d < k; ++d) p(d) = coords[d][idx[d]];
    int count = 0;
    for (const auto& b : boxes) count += b.contains(p);
    best = std::max(best, count);
    int d = 0;
    while (d < k && ++idx[d] == coords[d].size()) idx[d++] = 0;
    if (d == k) break;
  }
  return best;
}

double ipow(double x, std::size_t n) { return std::pow(x, static_cast<double>(n)); }

}  // namespace

bool Cube::contains(const Cube& inner, double slack) const {
  return (inner.lo.array() >= lo.array() - slack).all() && (inner.hi.array() <= hi.array() + slack).all();
}

bool Cube::contains(const Eigen::VectorXd& x) const {
  return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
}

std::vector<Cube> cover_cube(const Cube& q, int N) {
  if (N < 1) throw ArgumentError(kModule, "cover needs N >= 1");
  const int k = q.dim();
  const double len = q.side();
  const int per_axis = 2 * N;
  std::size_t total = 1;
  for (int d = 0; d < k; ++d) total *= per_axis;
  std::vector<Cube> out;
  out.reserve(total);
  for (std::size_t index = 0; index < total; ++index) {
    Cube c{q.lo, q.lo};
    std::size_t rest = index;
    for (int d = 0; d < k; ++d) {
      const auto i = static_cast<double>(rest % per_axis);
      rest /= per_axis;
      c.lo(d) = q.lo(d) + i * len / per_axis;
      c.hi(d) = std::min(c.lo(d) + len / N, q.hi(d));
    }
    out.push_back(std::move(c));
  }
  return out;
}

CylinderMap coding_map(int base, int dim) {
  if (base < 2 || dim < 1 || dim > 2) throw ArgumentError(kModule, "coding needs base >= 2 and dimension 1 or 2");
  CylinderMap m;
  m.alphabet_size = dim == 1 ? base : static_cast<std::size_t>(base) * base;
  m.rho = 1.0 / base;
  m.k = dim;
  m.L = 1.0;
  m.cube = [base, dim](WordView a) {
    Eigen::VectorXd lo = Eigen::VectorXd::Zero(dim);
    double h = 1.0;
    for (Symbol s : a) {
      h /= base;
      lo(0) += (s % base) * h;
      if (dim == 2) lo(1) += (s / base) * h;
    }
    return make_cube(std::move(lo), h);
  };
  return m;
}

CylinderMap linear_map(int base, double a, double b) {
  if (!(a >= 0.0 && b >= 0.0 && a + b > 0.0)) throw ArgumentError(kModule, "linear map needs a, b >= 0, not both zero");
  const auto coding = coding_map(base, 2);
  CylinderMap m = coding;
  m.k = 1;
  m.L = a + b;
  m.cube = [coding, a, b](WordView w) {
    const Cube cell = coding.cube(w);
    Eigen::VectorXd lo(1);
    lo(0) = a * cell.lo(0) + b * cell.lo(1);
    return make_cube(std::move(lo), (a + b) * cell.side());
  };
  return m;
}

CylinderMap constant_map(std::size_t alphabet_size, double rho, const Eigen::VectorXd& point) {
  CylinderMap m;
  m.alphabet_size = alphabet_size;
  m.rho = rho;
  m.k = static_cast<int>(point.size());
  m.L = 1.0;
  m.cube = [point, rho](WordView a) {
    const double h = ipow(rho, a.size());
    return make_cube(point.array() - h / 2, h);
  };
  return m;
}

std::size_t LiftedSystem::branching(std::size_t n) const {
  std::size_t b = 1;
  for (int d = 0; d < cmap.k; ++d) b *= 2 * static_cast<std::size_t>(N.at(n));
  return b;
}

Word LiftedSystem::source_word(std::size_t level, std::size_t index) const {
  Word w(level);
  for (std::size_t n = level; n > 0; --n) {
    const auto& node = levels[n][index];
    w[n - 1] = node.x;
    index = node.parent;
  }
  return w;
}

std::vector<int> choose_N(double rho, std::size_t depth) {
  if (!(rho > 0.0 && rho <= 0.5 + kSlack)) throw ArgumentError(kModule, "lifting needs 0 < rho <= 1/2");
  const int base = static_cast<int>(std::floor(1.0 / rho + kSlack));
  std::vector<int> N{1};
  double scaled = 1.0;  // rho^n P_n
  for (std::size_t n = 1; n <= depth; ++n) {
    const int pick = scaled * rho * (base + 1) <= 1.0 + kSlack ? base + 1 : base;
    scaled *= rho * pick;
    if (scaled < 0.5 - kSlack || scaled > 1.0 + kSlack)
      throw ConsistencyError(kModule, "cannot keep rho^n P_n within [1/2, 1]");
    N.push_back(pick);
  }
  return N;
}

LiftedSystem lift(const CylinderMap& cmap, std::size_t depth, const TreeMeasure<double>* support) {
  if (support && support->alphabet_size() != cmap.alphabet_size)
    throw ArgumentError(kModule, "support tree and cylinder map use different alphabets");
  if (support && support->depth() < depth) throw DepthExceededError(kModule, "support tree is shallower than the lift");
  LiftedSystem sys;
  sys.cmap = cmap;
  sys.depth = depth;
  sys.N = choose_N(cmap.rho, depth);
  sys.P.assign(depth + 1, 1.0);
  for (std::size_t n = 1; n <= depth; ++n) sys.P[n] = sys.P[n - 1] * sys.N[n];

  const Cube top = cmap.cube(WordView{});
  const Eigen::VectorXd centre = (top.lo + top.hi) / 2;
  LiftNode root;
  root.source = top;
  root.target = make_cube(centre.array() - cmap.L, 2 * cmap.L);
  if (!root.target.contains(root.source)) throw ConstructionViolationError(kModule, "root cube exceeds the L bound");
  sys.levels.push_back({root});
  std::vector<std::uint32_t> states{support ? support->root() : 0};

  Word word;
  for (std::size_t n = 0; n < depth; ++n) {
    std::vector<LiftNode> next;
    std::vector<std::uint32_t> next_states;
    const auto& level = sys.levels[n];
    for (std::size_t i = 0; i < level.size(); ++i) {
      const auto& node = level[i];
      const std::vector<Cube> cover = cover_cube(node.target, sys.N[n + 1]);
      word = sys.source_word(n, i);
      for (Symbol x = 0; x < cmap.alphabet_size; ++x) {
        std::uint32_t state = 0;
        if (support) {
          if (support->prob_double(states[i], x) <= 0.0) continue;
          state = support->child(states[i], x);
        }
        word.push_back(x);
        LiftNode child;
        child.parent = static_cast<std::uint32_t>(i);
        child.x = x;
        child.source = cmap.cube(word);
        word.pop_back();
        auto hit = std::find_if(cover.begin(), cover.end(), [&](const Cube& c) { return c.contains(child.source, kSlack); });
        if (hit == cover.end())
          throw ConstructionViolationError(kModule, "no cover cube contains the image of a level-" +
                                                        std::to_string(n + 1) + " cylinder");
        child.g = node.g;
        child.g.push_back(static_cast<Symbol>(hit - cover.begin()));
        child.target = *hit;
        next.push_back(std::move(child));
        next_states.push_back(state);
      }
    }
    sys.levels.push_back(std::move(next));
    states = std::move(next_states);
  }
  return sys;
}

bool check_morphism(const LiftedSystem& sys) {
  for (std::size_t n = 1; n < sys.levels.size(); ++n)
    for (const auto& node : sys.levels[n]) {
      const auto& parent = sys.levels[n - 1][node.parent];
      if (node.g.size() != n || !std::equal(parent.g.begin(), parent.g.end(), node.g.begin())) return false;
      if (node.g.back() >= sys.branching(n)) return false;
    }
  return true;
}

bool check_containment(const LiftedSystem& sys) {
  for (const auto& level : sys.levels)
    for (const auto& node : level)
      if (!node.target.contains(node.source, kSlack)) return false;
  return true;
}

FaithfulnessReport faithfulness_check(const CubeLevels& levels, double rho, double bound) {
  FaithfulnessReport r;
  for (std::size_t n = 0; n < levels.size(); ++n) {
    int mult = 0;
    double decay = 0.0;
    const std::size_t m = n + 1;  // level of the children
    const double scale = ipow(rho, m);
    for (const auto& fam : levels[n]) {
      mult = std::max(mult, max_overlap(fam.children));
      for (const auto& c : fam.children) {
        const double r_in = c.min_side() / 2, r_out = c.side() / 2;
        const double inner = r_in > 0.0 ? std::pow(scale / r_in, 1.0 / m) : INFINITY;
        decay = std::max({decay, inner, std::pow(r_out / scale, 1.0 / m)});
      }
    }
    r.mult_per_level.push_back(mult);
    r.decay_per_level.push_back(decay);
    r.C_mult = std::max(r.C_mult, static_cast<double>(mult));
    r.C_decay = std::max(r.C_decay, decay);
  }
  r.C = std::max(r.C_mult, r.C_decay);
  r.ok = r.C <= bound;
  return r;
}

CubeLevels lifted_families(const LiftedSystem& sys, std::size_t depth) {
  if (depth > sys.depth) throw DepthExceededError(kModule, "check depth exceeds the constructed depth");
  CubeLevels out(depth);
  for (std::size_t n = 0; n < depth; ++n) {
    std::map<Word, const Cube*> distinct;
    for (const auto& node : sys.levels[n]) distinct.emplace(node.g, &node.target);
    for (const auto& [g, cube] : distinct) out[n].push_back(CubeFamily{*cube, cover_cube(*cube, sys.N[n + 1])});
  }
  return out;
}

CubeLevels coding_families(int base, int dim, std::size_t depth) {
  const auto m = coding_map(base, dim);
  CubeLevels out(depth);
  std::vector<Word> words{Word{}};
  for (std::size_t n = 0; n < depth; ++n) {
    std::vector<Word> next;
    for (const auto& w : words) {
      CubeFamily fam{m.cube(w), {}};
      for (Symbol s = 0; s < m.alphabet_size; ++s) {
        Word c = w;
        c.push_back(s);
        fam.children.push_back(m.cube(c));
        next.push_back(std::move(c));
      }
      out[n].push_back(std::move(fam));
    }
    words = std::move(next);
  }
  return out;
}

FaithfulnessReport faithfulness_check(const LiftedSystem& sys, std::size_t depth) {
  return faithfulness_check(lifted_families(sys, depth), sys.cmap.rho, (1 << sys.cmap.k) + 1);
}

DefectReport entropy_defect(const LiftedSystem& sys, const TreeMeasure<double>& tm, std::size_t depth) {
  if (depth > sys.depth) throw DepthExceededError(kModule, "defect depth exceeds the constructed depth");
  if (tm.alphabet_size() != sys.cmap.alphabet_size) throw ArgumentError(kModule, "measure alphabet differs from the map");
  const double rho = sys.cmap.rho;
  std::size_t extra = 0;  // L rho^extra <= 1/2
  while (sys.cmap.L * ipow(rho, extra) > 0.5) ++extra;
  if (tm.depth() < depth + extra) throw DepthExceededError(kModule, "measure tree too shallow for the image entropy");

  DefectReport rep;
  rep.per_level.assign(depth, 0.0);
  rep.max_defect = -1.0;
  const std::size_t A = tm.alphabet_size();
  for (std::size_t n = 0; n < depth; ++n) {
    std::vector<std::vector<std::size_t>> kids(sys.levels[n].size());
    for (std::size_t j = 0; j < sys.levels[n + 1].size(); ++j) kids[sys.levels[n + 1][j].parent].push_back(j);
    const double cell = ipow(rho, n + 1);
    for (std::size_t i = 0; i < sys.levels[n].size(); ++i) {
      Word a = sys.source_word(n, i);
      const auto state = tm.walk(a);
      if (state == TreeMeasure<double>::kNone) continue;

      std::map<Symbol, double> by_child;
      for (std::size_t j : kids[i]) {
        const auto& node = sys.levels[n + 1][j];
        by_child[node.g.back()] += tm.prob_double(state, node.x);
      }
      double h_g = 0.0;
      for (const auto& [y, p] : by_child) h_g -= detail::xlogx(p);

      std::map<std::vector<std::int64_t>, double> cells;
      Word w = a;
      auto rec = [&](auto&& self, std::uint32_t s, std::size_t left, double mass) -> void {
        if (left == 0) {
          const Cube c = sys.cmap.cube(w);
          const Eigen::VectorXd mid = (c.lo + c.hi) / 2;
          std::vector<std::int64_t> key(mid.size());
          for (Eigen::Index d = 0; d < mid.size(); ++d)
            key[d] = static_cast<std::int64_t>(std::floor(mid(d) / cell + 1e-9));
          cells[key] += mass;
          return;
        }
        for (Symbol x = 0; x < A; ++x) {
          const double p = tm.prob_double(s, x);
          if (p <= 0.0) continue;
          w.push_back(x);
          self(self, tm.child(s, x), left - 1, mass * p);
          w.pop_back();
        }
      };
      rec(rec, state, 1 + extra, 1.0);
      double h_f = 0.0;
      for (const auto& [key, p] : cells) h_f -= detail::xlogx(p);

      const double defect = std::abs(h_f - h_g);
      rep.per_level[n] = std::max(rep.per_level[n], defect);
      if (defect > rep.max_defect) {
        rep.max_defect = defect;
        rep.argmax = a;
      }
    }
  }
  rep.max_defect = std::max(rep.max_defect, 0.0);
  return rep;
}

void write_report(std::ostream& os, const LiftedSystem& sys, const FaithfulnessReport& faith,
                  const DefectReport& defect) {
  char buf[200];
  os << "# lift: k=" << sys.cmap.k << " rho=" << sys.cmap.rho << " L=" << sys.cmap.L << " depth=" << sys.depth << '\n';
  os << "level,N,P,branching,nodes,multiplicity,decay,defect\n";
  for (std::size_t n = 0; n <= sys.depth; ++n) {
    const double mult = n < faith.mult_per_level.size() ? faith.mult_per_level[n] : NAN;
    const double decay = n < faith.decay_per_level.size() ? faith.decay_per_level[n] : NAN;
    const double d = n < defect.per_level.size() ? defect.per_level[n] : NAN;
    std::snprintf(buf, sizeof buf, "%zu,%d,%.6g,%zu,%zu,%.6g,%.6g,%.6g\n", n, sys.N[n], sys.P[n],
                  n == 0 ? std::size_t{1} : sys.branching(n), sys.levels[n].size(), mult, decay, d);
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "# C_mult=%.6g C_decay=%.6g ok=%d max_defect=%.6g at ", faith.C_mult, faith.C_decay,
                faith.ok ? 1 : 0, defect.max_defect);
  os << buf << '"' << format_word(defect.argmax, sys.cmap.alphabet_size) << "\"\n";
}

}  // namespace fracproj
