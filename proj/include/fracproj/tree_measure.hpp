#pragma once

#include "fracproj/errors.hpp"
#include "fracproj/rational.hpp"
#include "fracproj/rng.hpp"
#include "fracproj/word.hpp"

#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <utility>
#include <vector>

namespace fracproj {

/// Conditional law of the next symbol given a cylinder.
template <typename Scalar>
struct ChildDistribution {
  std::vector<Scalar> probs;
};

/// Finite-state description of a tree measure: every state carries a child
/// distribution over the alphabet and a successor for each positive child.
/// An explicit table of cylinder masses is the special case of one state
/// per positive-mass word.
template <typename Scalar>
struct TreeAutomaton {
  using State = std::uint32_t;
  static constexpr State kNone = std::numeric_limits<State>::max();

  std::size_t alphabet_size = 0;
  std::vector<Scalar> probs;  // row-major, state * alphabet_size + symbol
  std::vector<State> next;

  std::size_t state_count() const { return alphabet_size == 0 ? 0 : probs.size() / alphabet_size; }
};

/// Probability measure on the words of length <= depth over a finite
/// alphabet, with the ultrametric parameter rho. Immutable; copies and
/// restrictions share the underlying tables.
template <typename Scalar>
class TreeMeasure {
 public:
  using Automaton = TreeAutomaton<Scalar>;
  using State = typename Automaton::State;
  static constexpr State kNone = Automaton::kNone;

  TreeMeasure(Automaton automaton, State root, std::size_t depth, double rho);

  /// Builds the measure from masses of positive words. Missing words have
  /// mass zero; every level up to `depth` must be listed.
  static TreeMeasure from_masses(std::size_t alphabet_size, std::size_t depth, double rho,
                                 const std::map<Word, Scalar>& masses);

  std::size_t alphabet_size() const { return tables_->automaton.alphabet_size; }
  std::size_t depth() const { return depth_; }
  double rho() const { return rho_; }
  State root() const { return root_; }
  std::size_t state_count() const { return tables_->automaton.state_count(); }
  const Automaton& automaton() const { return tables_->automaton; }

  const Scalar& prob(State s, Symbol b) const { return tables_->automaton.probs[s * alphabet_size() + b]; }
  double prob_double(State s, Symbol b) const { return tables_->probs_d[s * alphabet_size() + b]; }
  State child(State s, Symbol b) const { return tables_->automaton.next[s * alphabet_size() + b]; }
  double state_entropy(State s) const { return tables_->entropy[s]; }

  /// State reached after reading `a` from the root, or kNone if μ[a] = 0.
  State walk(WordView a) const;

  /// Same tables re-rooted at `s`, with the given depth.
  TreeMeasure at_state(State s, std::size_t depth) const;

  /// Identity of the shared tables, stable across restrictions.
  const void* tables_id() const { return tables_.get(); }

 private:
  struct Tables {
    Automaton automaton;
    std::vector<double> probs_d;
    std::vector<double> entropy;
  };

  TreeMeasure(std::shared_ptr<const Tables> tables, State root, std::size_t depth, double rho)
      : tables_(std::move(tables)), root_(root), depth_(depth), rho_(rho) {}

  void validate() const;

  std::shared_ptr<const Tables> tables_;
  State root_;
  std::size_t depth_;
  double rho_;
};

namespace detail {

inline double xlogx(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

template <typename Scalar>
bool near_one(const Scalar& s) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return std::abs(s - 1.0) <= 1e-12;
  } else {
    return s == 1;
  }
}

template <typename Scalar>
bool is_zero(const Scalar& s) {
  return s == Scalar(0);
}

}  // namespace detail

template <typename Scalar>
TreeMeasure<Scalar>::TreeMeasure(Automaton automaton, State root, std::size_t depth, double rho)
    : root_(root), depth_(depth), rho_(rho) {
  if (automaton.alphabet_size == 0) throw ArgumentError("tree_measure", "alphabet must be nonempty");
  if (automaton.probs.size() % automaton.alphabet_size != 0 || automaton.next.size() != automaton.probs.size())
    throw ArgumentError("tree_measure", "automaton tables have inconsistent sizes");
  if (!(rho > 0.0 && rho < 1.0)) throw ArgumentError("tree_measure", "rho must lie in (0,1)");
  if (depth == 0) throw ArgumentError("tree_measure", "depth must be positive");
  if (root >= automaton.state_count()) throw ArgumentError("tree_measure", "root state out of range");
  auto tables = std::make_shared<Tables>();
  const std::size_t A = automaton.alphabet_size;
  tables->probs_d.resize(automaton.probs.size());
  tables->entropy.assign(automaton.state_count(), 0.0);
  for (std::size_t s = 0; s < automaton.state_count(); ++s) {
    double h = 0.0;
    for (std::size_t b = 0; b < A; ++b) {
      const double p = to_double(automaton.probs[s * A + b]);
      tables->probs_d[s * A + b] = p;
      h -= detail::xlogx(p);
    }
    tables->entropy[s] = std::max(0.0, h);
  }
  tables->automaton = std::move(automaton);
  tables_ = std::move(tables);
  validate();
}

template <typename Scalar>
void TreeMeasure<Scalar>::validate() const {
  const auto& a = tables_->automaton;
  const std::size_t A = a.alphabet_size;
  for (std::size_t s = 0; s < a.state_count(); ++s) {
    for (std::size_t b = 0; b < A; ++b) {
      const Scalar& p = a.probs[s * A + b];
      if (p < Scalar(0)) throw ConsistencyError("tree_measure", "negative mass");
      if (!detail::is_zero(p) && a.next[s * A + b] == kNone)
        throw ConsistencyError("tree_measure", "positive child without successor state");
      if (a.next[s * A + b] != kNone && a.next[s * A + b] >= a.state_count())
        throw ConsistencyError("tree_measure", "successor state out of range");
    }
  }
  // Every state reachable strictly above the last level must be a proper
  // probability row. States are visited at the first level they appear.
  std::vector<std::size_t> first_level(a.state_count(), std::numeric_limits<std::size_t>::max());
  std::vector<State> frontier{root_};
  first_level[root_] = 0;
  for (std::size_t level = 0; !frontier.empty() && level < depth_; ++level) {
    std::vector<State> next_frontier;
    for (State s : frontier) {
      Scalar total(0);
      for (std::size_t b = 0; b < A; ++b) total += a.probs[s * A + b];
      if (!detail::near_one(total))
        throw ConsistencyError("tree_measure", "child masses do not sum to the parent mass at level " +
                                                   std::to_string(level));
      for (std::size_t b = 0; b < A; ++b) {
        const State c = a.next[s * A + b];
        if (detail::is_zero(a.probs[s * A + b]) || c == kNone) continue;
        if (first_level[c] == std::numeric_limits<std::size_t>::max()) {
          first_level[c] = level + 1;
          next_frontier.push_back(c);
        }
      }
    }
    frontier = std::move(next_frontier);
  }
}

template <typename Scalar>
TreeMeasure<Scalar> TreeMeasure<Scalar>::from_masses(std::size_t alphabet_size, std::size_t depth, double rho,
                                                     const std::map<Word, Scalar>& masses) {
  if (alphabet_size == 0) throw ArgumentError("tree_measure", "alphabet must be nonempty");
  Automaton a;
  a.alphabet_size = alphabet_size;
  std::map<Word, State> ids;
  auto new_state = [&](const Word& w) {
    const State id = static_cast<State>(a.state_count());
    a.probs.resize(a.probs.size() + alphabet_size, Scalar(0));
    a.next.resize(a.next.size() + alphabet_size, kNone);
    ids.emplace(w, id);
    return id;
  };
  auto mass_of = [&](const Word& w) -> Scalar {
    if (w.empty()) return Scalar(1);
    auto it = masses.find(w);
    return it == masses.end() ? Scalar(0) : it->second;
  };
  if (auto it = masses.find(Word{}); it != masses.end() && !detail::near_one(it->second))
    throw ConsistencyError("tree_measure", "mass of the empty word must be 1");
  new_state(Word{});
  std::vector<Word> frontier{Word{}};
  for (std::size_t level = 0; level < depth; ++level) {
    std::vector<Word> next_frontier;
    for (const Word& w : frontier) {
      const Scalar parent = mass_of(w);
      const State s = ids.at(w);
      Scalar total(0);
      for (Symbol b = 0; b < alphabet_size; ++b) {
        Word child = w;
        child.push_back(b);
        const Scalar m = mass_of(child);
        if (m < Scalar(0)) throw ConsistencyError("tree_measure", "negative mass for word " + format_word(child, alphabet_size));
        total += m;
        if (detail::is_zero(m)) continue;
        a.probs[s * alphabet_size + b] = m / parent;
        a.next[s * alphabet_size + b] = new_state(child);
        next_frontier.push_back(std::move(child));
      }
      if constexpr (std::is_same_v<Scalar, double>) {
        if (std::abs(total - parent) > 1e-12)
          throw ConsistencyError("tree_measure", "mass not conserved below word '" + format_word(w, alphabet_size) + "'");
      } else {
        if (total != parent)
          throw ConsistencyError("tree_measure", "mass not conserved below word '" + format_word(w, alphabet_size) + "'");
      }
    }
    frontier = std::move(next_frontier);
  }
  for (const auto& [w, m] : masses) {
    if (w.size() > depth) throw DepthExceededError("tree_measure", "word longer than the tree depth");
    if (!detail::is_zero(m) && !ids.count(w))
      throw ConsistencyError("tree_measure", "positive mass below a zero-mass word");
  }
  return TreeMeasure(std::move(a), 0, depth, rho);
}

template <typename Scalar>
typename TreeMeasure<Scalar>::State TreeMeasure<Scalar>::walk(WordView a) const {
  if (a.size() > depth_)
    throw DepthExceededError("tree_measure", "word of length " + std::to_string(a.size()) + " exceeds depth " +
                                                 std::to_string(depth_));
  State s = root_;
  for (Symbol b : a) {
    if (b >= alphabet_size()) throw ArgumentError("tree_measure", "symbol outside the alphabet");
    if (detail::is_zero(prob(s, b))) return kNone;
    s = child(s, b);
  }
  return s;
}

template <typename Scalar>
TreeMeasure<Scalar> TreeMeasure<Scalar>::at_state(State s, std::size_t depth) const {
  if (s >= state_count()) throw ArgumentError("tree_measure", "state out of range");
  if (depth == 0) throw DepthExceededError("tree_measure", "restriction leaves an empty tree");
  return TreeMeasure(tables_, s, depth, rho_);
}

// ---------------------------------------------------------------------------

/// μ[a]; zero outside the support.
template <typename Scalar>
Scalar cylinder_mass(const TreeMeasure<Scalar>& tm, WordView a) {
  if (a.size() > tm.depth())
    throw DepthExceededError("tree_measure", "word of length " + std::to_string(a.size()) + " exceeds depth " +
                                                 std::to_string(tm.depth()));
  Scalar mass(1);
  auto s = tm.root();
  for (Symbol b : a) {
    if (b >= tm.alphabet_size()) throw ArgumentError("tree_measure", "symbol outside the alphabet");
    const Scalar& p = tm.prob(s, b);
    if (detail::is_zero(p)) return Scalar(0);
    mass *= p;
    s = tm.child(s, b);
  }
  return mass;
}

template <typename Scalar>
ChildDistribution<Scalar> child_distribution(const TreeMeasure<Scalar>& tm, WordView a) {
  if (a.size() >= tm.depth())
    throw DepthExceededError("tree_measure", "no children below the last level");
  const auto s = tm.walk(a);
  if (s == TreeMeasure<Scalar>::kNone)
    throw UndefinedConditionalError("tree_measure", "conditional on a zero-mass cylinder");
  ChildDistribution<Scalar> d;
  d.probs.reserve(tm.alphabet_size());
  for (Symbol b = 0; b < tm.alphabet_size(); ++b) d.probs.push_back(tm.prob(s, b));
  return d;
}

/// −log μ(a_n | a_1..a_{n-1}), with n counted from 1.
template <typename Scalar>
double information(const TreeMeasure<Scalar>& tm, WordView a, std::size_t n) {
  if (n == 0 || n > a.size()) throw ArgumentError("tree_measure", "information index out of range");
  if (n > tm.depth()) throw DepthExceededError("tree_measure", "information index exceeds depth");
  const auto s = tm.walk(a.first(n - 1));
  if (s == TreeMeasure<Scalar>::kNone)
    throw UndefinedConditionalError("tree_measure", "information on a zero-mass cylinder");
  const double p = tm.prob_double(s, a[n - 1]);
  if (detail::is_zero(tm.prob(s, a[n - 1])))
    throw InfiniteInformationError("tree_measure", "zero conditional probability at position " + std::to_string(n));
  return -std::log(p);
}

template <typename Scalar>
double child_entropy(const TreeMeasure<Scalar>& tm, WordView a) {
  if (a.size() >= tm.depth()) throw DepthExceededError("tree_measure", "no children below the last level");
  const auto s = tm.walk(a);
  if (s == TreeMeasure<Scalar>::kNone)
    throw UndefinedConditionalError("tree_measure", "entropy of a zero-mass cylinder");
  return tm.state_entropy(s);
}

/// Draws a symbol from state `s` using one uniform variate.
template <typename Scalar>
Symbol draw_symbol(const TreeMeasure<Scalar>& tm, typename TreeMeasure<Scalar>::State s, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  Symbol last = 0;
  for (Symbol b = 0; b < tm.alphabet_size(); ++b) {
    const double p = tm.prob_double(s, b);
    if (p <= 0.0) continue;
    acc += p;
    last = b;
    if (u < acc) return b;
  }
  return last;
}

template <typename Scalar>
Word sample_path(const TreeMeasure<Scalar>& tm, std::uint64_t seed, std::size_t n) {
  if (n > tm.depth()) throw DepthExceededError("tree_measure", "path length exceeds depth");
  Rng rng(seed);
  Word w;
  w.reserve(n);
  auto s = tm.root();
  for (std::size_t i = 0; i < n; ++i) {
    const Symbol b = draw_symbol(tm, s, rng);
    w.push_back(b);
    s = tm.child(s, b);
  }
  return w;
}

struct EntropyAverage {
  double value = 0.0;
  bool empty = false;  // set for the empty word, where the average is 0
};

template <typename Scalar>
EntropyAverage local_entropy_average(const TreeMeasure<Scalar>& tm, WordView a) {
  if (a.empty()) return {0.0, true};
  if (a.size() > tm.depth()) throw DepthExceededError("tree_measure", "word exceeds depth");
  auto s = tm.root();
  double sum = 0.0;
  for (Symbol b : a) {
    if (b >= tm.alphabet_size()) throw ArgumentError("tree_measure", "symbol outside the alphabet");
    sum += tm.state_entropy(s);
    if (detail::is_zero(tm.prob(s, b)))
      throw UndefinedConditionalError("tree_measure", "entropy average along a zero-mass path");
    s = tm.child(s, b);
  }
  return {sum / static_cast<double>(a.size()), false};
}

struct DimEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  /// max over samples of |(−log μ[x_1..x_N] − Σ H(X_k | x_1..x_{k−1})) / N|
  double lln_diagnostic = 0.0;
  std::size_t n_samples = 0;
  std::size_t n_depth = 0;
};

/// Mean of the normalized local entropy average over sampled paths.
template <typename Scalar>
DimEstimate dim_lower_estimate(const TreeMeasure<Scalar>& tm, std::size_t n_samples, std::size_t n_depth,
                               std::uint64_t seed) {
  if (n_samples == 0) throw ArgumentError("tree_measure", "zero samples requested");
  if (n_depth == 0) throw ArgumentError("tree_measure", "zero path length requested");
  if (n_depth > tm.depth()) throw DepthExceededError("tree_measure", "path length exceeds depth");
  const double scale = std::log(1.0 / tm.rho());
  double sum = 0.0, sum_sq = 0.0, diag = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    Rng rng(derive_seed(seed, i));
    auto s = tm.root();
    double entropy_sum = 0.0, info_sum = 0.0;
    for (std::size_t k = 0; k < n_depth; ++k) {
      entropy_sum += tm.state_entropy(s);
      const Symbol b = draw_symbol(tm, s, rng);
      info_sum -= std::log(tm.prob_double(s, b));
      s = tm.child(s, b);
    }
    const double n = static_cast<double>(n_depth);
    const double value = entropy_sum / n / scale;
    sum += value;
    sum_sq += value * value;
    diag = std::max(diag, std::abs(info_sum - entropy_sum) / n);
  }
  const double m = static_cast<double>(n_samples);
  DimEstimate out;
  out.mean = sum / m;
  out.std_error = n_samples > 1 ? std::sqrt(std::max(0.0, sum_sq / m - out.mean * out.mean) / (m - 1.0)) : 0.0;
  out.lln_diagnostic = diag;
  out.n_samples = n_samples;
  out.n_depth = n_depth;
  return out;
}

/// Conditional measure on [a], re-rooted and renormalized.
template <typename Scalar>
TreeMeasure<Scalar> restrict(const TreeMeasure<Scalar>& tm, WordView a) {
  if (a.size() >= tm.depth()) throw DepthExceededError("tree_measure", "restriction leaves an empty tree");
  const auto s = tm.walk(a);
  if (s == TreeMeasure<Scalar>::kNone)
    throw UndefinedConditionalError("tree_measure", "restriction to a zero-mass cylinder");
  return tm.at_state(s, tm.depth() - a.size());
}

/// True when the two measures give identical child distributions on every
/// cylinder (exact comparison of the scalars). Depths and rho must agree.
template <typename Scalar>
bool same_measure(const TreeMeasure<Scalar>& x, const TreeMeasure<Scalar>& y) {
  if (x.alphabet_size() != y.alphabet_size() || x.depth() != y.depth() || x.rho() != y.rho()) return false;
  using State = typename TreeMeasure<Scalar>::State;
  std::set<std::pair<State, State>> seen{{x.root(), y.root()}};
  std::vector<std::pair<State, State>> frontier{{x.root(), y.root()}};
  for (std::size_t level = 0; level < x.depth() && !frontier.empty(); ++level) {
    std::vector<std::pair<State, State>> next;
    for (auto [s, t] : frontier) {
      for (Symbol b = 0; b < x.alphabet_size(); ++b) {
        if (!(x.prob(s, b) == y.prob(t, b))) return false;
        if (detail::is_zero(x.prob(s, b))) continue;
        std::pair<State, State> c{x.child(s, b), y.child(t, b)};
        if (seen.insert(c).second) next.push_back(c);
      }
    }
    frontier = std::move(next);
  }
  return true;
}

/// Positive-mass words of length `level` with their masses, in lexicographic order.
template <typename Scalar>
std::vector<std::pair<Word, Scalar>> positive_words(const TreeMeasure<Scalar>& tm, std::size_t level) {
  if (level > tm.depth()) throw DepthExceededError("tree_measure", "level exceeds depth");
  std::vector<std::pair<Word, Scalar>> out;
  Word w;
  auto rec = [&](auto&& self, typename TreeMeasure<Scalar>::State s, const Scalar& mass) -> void {
    if (w.size() == level) {
      out.emplace_back(w, mass);
      return;
    }
    for (Symbol b = 0; b < tm.alphabet_size(); ++b) {
      if (detail::is_zero(tm.prob(s, b))) continue;
      w.push_back(b);
      self(self, tm.child(s, b), Scalar(mass * tm.prob(s, b)));
      w.pop_back();
    }
  };
  rec(rec, tm.root(), Scalar(1));
  return out;
}

/// One "word<TAB>mass" line per positive-mass word up to `max_level`.
template <typename Scalar>
void write_text(std::ostream& os, const TreeMeasure<Scalar>& tm, std::size_t max_level) {
  os << "# alphabet " << tm.alphabet_size() << " depth " << tm.depth() << " rho " << format_scalar(tm.rho()) << '\n';
  for (std::size_t level = 0; level <= std::min(max_level, tm.depth()); ++level)
    for (const auto& [w, m] : positive_words(tm, level))
      os << format_word(w, tm.alphabet_size()) << '\t' << format_scalar(m) << '\n';
}

/// Reads the format produced by write_text.
template <typename Scalar>
TreeMeasure<Scalar> read_text(std::istream& is);

extern template class TreeMeasure<double>;
extern template class TreeMeasure<Rational>;

}  // namespace fracproj
