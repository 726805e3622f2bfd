#include "fracproj/scenery_cp.hpp"

#include "fracproj/errors.hpp"
#include "fracproj/stats.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

namespace fracproj {

namespace {

constexpr const char* kModule = "scenery_cp";
const double kLog2 = std::log(2.0);
const double kLog3 = std::log(3.0);

struct Digits {
  int base;
  int dim;
};

Digits digits_of(const TreeMeasure<double>& tm) {
  const int b = static_cast<int>(std::lround(1.0 / tm.rho()));
  if (tm.alphabet_size() == static_cast<std::size_t>(b)) return {b, 1};
  if (tm.alphabet_size() == static_cast<std::size_t>(b) * b) return {b, 2};
  throw ArgumentError(kModule, "tree alphabet is not a digit cube");
}

void require_base(const PartitionOperator& op, int base) {
  if (op.kind != PartitionOperator::Kind::BaseB || op.base != base)
    throw ArgumentError(kModule, "operator " + op.name() + " does not match a base-" + std::to_string(base) + " state");
}

Box rw_box(double w) {
  Vec hi(2);
  hi << 1.0, std::exp(w);
  return normalize_box(Box(Vec::Zero(2), hi)).first;
}

ScaledProduct x2x3_measure(TreeMeasure<double> mu, TreeMeasure<double> nu, double w) {
  return ScaledProduct{std::move(mu), std::move(nu), std::exp(-w / 2.0), std::exp(w / 2.0)};
}

TreeMeasure<double> step_tree(const TreeMeasure<double>& tm, Symbol sym) {
  if (tm.depth() <= 1) throw ResolutionError(kModule, "tree depth exhausted along the chain");
  const auto s = tm.child(tm.root(), sym);
  if (s == TreeMeasure<double>::kNone) throw UndefinedConditionalError(kModule, "child cell has zero mass");
  return tm.at_state(s, tm.depth() - 1);
}

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::vector<double> child_masses(const CPState& state, const PartitionOperator& op) {
  return std::visit(
      [&](const auto& m) -> std::vector<double> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, TreeMeasure<double>>) {
          require_base(op, digits_of(m).base);
          std::vector<double> out(m.alphabet_size());
          for (Symbol s = 0; s < out.size(); ++s) out[s] = m.prob_double(m.root(), s);
          return out;
        } else if constexpr (std::is_same_v<T, ScaledProduct>) {
          if (op.kind != PartitionOperator::Kind::Rw) throw ArgumentError(kModule, "product states need the Rw operator");
          if (!state.w) throw ArgumentError(kModule, "Rw state without eccentricity");
          const int count = rw_children(*state.w).count;
          const auto& x = m.x_factor;
          const auto& y = m.y_factor;
          std::vector<double> out(count);
          for (int k = 0; k < count; ++k) {
            const double px = x.prob_double(x.root(), static_cast<Symbol>(k % 2));
            out[k] = count == 2 ? px : px * y.prob_double(y.root(), static_cast<Symbol>(k / 2));
          }
          return out;
        } else {
          require_base(op, m.base);
          if (m.level < 1) throw ResolutionError(kModule, "grid level exhausted along the chain");
          const Eigen::Index side = m.mass.rows() / m.base;
          const int ny = m.dim == 2 ? m.base : 1;
          std::vector<double> out(static_cast<std::size_t>(m.base * ny));
          for (int j = 0; j < ny; ++j)
            for (int i = 0; i < m.base; ++i)
              out[i + m.base * j] =
                  m.dim == 2 ? m.mass.block(i * side, j * side, side, side).sum() : m.mass.col(0).segment(i * side, side).sum();
          return out;
        }
      },
      state.measure);
}

CPState descend(const CPState& state, const PartitionOperator& op, int child) {
  const auto masses = child_masses(state, op);
  if (child < 0 || static_cast<std::size_t>(child) >= masses.size())
    throw ArgumentError(kModule, "child index out of range");
  if (!(masses[child] > 0.0)) throw UndefinedConditionalError(kModule, "child cell has zero mass");
  return std::visit(
      [&](const auto& m) -> CPState {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, TreeMeasure<double>>) {
          return CPState{step_tree(m, static_cast<Symbol>(child)), state.box, std::nullopt};
        } else if constexpr (std::is_same_v<T, ScaledProduct>) {
          const RwSplit split = rw_children(*state.w);
          auto x = step_tree(m.x_factor, static_cast<Symbol>(child % 2));
          auto y = split.count == 2 ? m.y_factor : step_tree(m.y_factor, static_cast<Symbol>(child / 2));
          return CPState{x2x3_measure(std::move(x), std::move(y), split.w_next), rw_box(split.w_next), split.w_next};
        } else {
          GridMeasure g;
          g.dim = m.dim;
          g.base = m.base;
          g.level = m.level - 1;
          const Eigen::Index side = m.mass.rows() / m.base;
          const int i = child % m.base, j = child / m.base;
          if (m.dim == 2)
            g.mass = m.mass.block(i * side, j * side, side, side) / masses[child];
          else
            g.mass = m.mass.block(i * side, 0, side, 1) / masses[child];
          return CPState{std::move(g), state.box, std::nullopt};
        }
      },
      state.measure);
}

Transition cp_step(const CPState& state, const PartitionOperator& op, Rng& rng) {
  const auto masses = child_masses(state, op);
  const double total = std::accumulate(masses.begin(), masses.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-9)
    throw ConsistencyError(kModule, "child masses sum to " + fmt6(total) + " instead of 1");
  const double u = rng.uniform() * total;
  int chosen = -1;
  double cum = 0.0;
  for (std::size_t k = 0; k < masses.size(); ++k) {
    if (masses[k] <= 0.0) continue;
    chosen = static_cast<int>(k);
    cum += masses[k];
    if (u < cum) break;
  }
  if (chosen < 0) throw ConsistencyError(kModule, "no child carries mass");
  return Transition{descend(state, op, chosen), StepRecord{chosen, std::log(masses[chosen] / total)}};
}

Transition cp_step(const CPState& state, const PartitionOperator& op, std::uint64_t seed) {
  Rng rng(seed);
  return cp_step(state, op, rng);
}

double ChainRun::average(std::size_t functional) const {
  const auto& v = values.at(functional);
  if (v.empty()) throw ArgumentError(kModule, "empty chain run");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::vector<double> ChainRun::running_average(std::size_t functional) const {
  const auto& v = values.at(functional);
  std::vector<double> out(v.size());
  double sum = 0.0;
  for (std::size_t n = 0; n < v.size(); ++n) out[n] = (sum += v[n]) / static_cast<double>(n + 1);
  return out;
}

void ChainRun::write_csv(std::ostream& os) const {
  os << "step,chosen_child,log_mass";
  for (const auto& n : names) os << ',' << n;
  os << '\n';
  for (std::size_t n = 0; n < steps.size(); ++n) {
    os << n << ',' << steps[n].child << ',' << fmt6(steps[n].log_mass);
    for (const auto& v : values) os << ',' << fmt6(v[n]);
    os << '\n';
  }
}

ChainRun cp_run(const CPState& initial, std::size_t steps, const PartitionOperator& op,
                const std::vector<Functional>& functionals, std::uint64_t seed) {
  if (steps < 1) throw ArgumentError(kModule, "a chain run needs at least one step");
  ChainRun run;
  run.seed = seed;
  run.steps.reserve(steps);
  for (const auto& f : functionals) run.names.push_back(f.name);
  run.values.assign(functionals.size(), {});
  for (auto& v : run.values) v.reserve(steps);
  Rng rng(seed);
  CPState state = initial;
  for (std::size_t n = 0; n < steps; ++n) {
    Transition t = cp_step(state, op, rng);
    for (std::size_t k = 0; k < functionals.size(); ++k) run.values[k].push_back(functionals[k].eval(state, t.record));
    run.steps.push_back(t.record);
    state = std::move(t.next);
  }
  return run;
}

ChainDimension chain_dimension(const ChainRun& run, double rho) {
  if (run.steps.empty()) throw ArgumentError(kModule, "empty chain run");
  std::vector<double> info(run.steps.size());
  for (std::size_t n = 0; n < info.size(); ++n) info[n] = -run.steps[n].log_mass;
  const double scale = std::log(1.0 / rho);
  const double mean = std::accumulate(info.begin(), info.end(), 0.0) / static_cast<double>(info.size());
  return {mean / scale, batch_means_error(info) / scale};
}

CPState tree_state(const TreeMeasure<double>& tm) {
  const auto d = digits_of(tm);
  return CPState{tm, Box::unit(d.dim), std::nullopt};
}

CPState grid_state(const GridMeasure& g) {
  check_grid(g);
  const auto side = static_cast<Eigen::Index>(std::llround(std::pow(g.base, g.level)));
  if (g.origin[0] != 0 || g.origin[1] != 0 || g.mass.rows() != side || g.mass.cols() != (g.dim == 2 ? side : 1))
    throw ArgumentError(kModule, "grid state must cover exactly the unit cube");
  return CPState{g, Box::unit(g.dim), std::nullopt};
}

CPState x2x3_initial(const MeasureSpec& mu_spec, const MeasureSpec& nu_spec, std::optional<double> w0,
                     std::uint64_t seed) {
  Rng rng(seed);
  const double w = w0 ? *w0 : rng.uniform(0.0, kLog3);
  if (!(w >= 0.0 && w < kLog3)) throw ArgumentError(kModule, "w0 must lie in [0, log 3)");
  auto factor = [&](const MeasureSpec& spec, int base) {
    return std::visit(
        [&](const auto& s) -> TreeMeasure<double> {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, BernoulliDigits> || std::is_same_v<T, MarkovDigits>) {
            if (s.base != base || s.dim != 1)
              throw ArgumentError(kModule, "x2x3 factors must be 1-d digit measures on bases 2 and 3");
            const auto tm = build_tree<double>(spec, kChainDepth);
            if constexpr (std::is_same_v<T, BernoulliDigits>) {
              return tm;
            } else {
              const Eigen::VectorXd pi = stationary_vector(to_matrix(s.transition));
              double u = rng.uniform(), cum = 0.0;
              Eigen::Index last = 0;
              for (Eigen::Index i = 0; i < pi.size(); ++i) {
                if (pi(i) <= 0.0) continue;
                last = i;
                cum += pi(i);
                if (u < cum) break;
              }
              return tm.at_state(static_cast<TreeMeasure<double>::State>(1 + last), kChainDepth);
            }
          } else {
            throw ArgumentError(kModule, "x2x3 factors must be Bernoulli or Markov digit measures");
          }
        },
        spec.kind);
  };
  auto mu = factor(mu_spec, 2);
  auto nu = factor(nu_spec, 3);
  return CPState{x2x3_measure(std::move(mu), std::move(nu), w), rw_box(w), w};
}

TreeMeasure<double> scenery(const TreeMeasure<double>& tm, WordView path, std::size_t n) {
  if (path.size() < n) throw ArgumentError(kModule, "path shorter than the scenery level");
  return restrict(tm, path.first(n));
}

CPState scenery(const CPState& state, const std::vector<int>& children, const PartitionOperator& op) {
  CPState s = state;
  for (int c : children) s = descend(s, op, c);
  return s;
}

double state_e_q(const CPState& state, const Projection& proj, int q, const PartitionOperator& op,
                 ProjectionCache* cache) {
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, TreeMeasure<double>>) {
          return e_q(m, proj, q, cache);
        } else if constexpr (std::is_same_v<T, ScaledProduct>) {
          return e_q(m, proj, q, cache);
        } else {
          if (m.dim == 2) return e_q(m, proj, q, op.rho());
          if (m.level < q) throw ResolutionError(kModule, "grid level must be at least q = " + std::to_string(q));
          GridMeasure coarse = grid_1d(m.base, q, 0, Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(std::llround(std::pow(m.base, q)))));
          const Eigen::Index block = m.mass.rows() / coarse.mass.rows();
          for (Eigen::Index i = 0; i < coarse.mass.rows(); ++i) coarse.mass(i, 0) = m.mass.col(0).segment(i * block, block).sum();
          return e_q(coarse, q, 1.0 / m.base);
        }
      },
      state.measure);
}

}  // namespace fracproj
