#pragma once

#include "fracproj/entropy.hpp"
#include "fracproj/geometry.hpp"
#include "fracproj/measure_zoo.hpp"
#include "fracproj/rng.hpp"
#include "fracproj/tree_measure.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace fracproj {

/// Depth given to trees that drive long chains. Automata are finite-state,
/// so this costs nothing.
inline constexpr std::size_t kChainDepth = std::size_t{1} << 40;

/// A measure on a normalized box.
///  - TreeMeasure: digit tree on the unit cube, for BaseB.
///  - ScaledProduct: S_w(μ × ν) with μ base 2, ν base 3, for Rw.
///  - GridMeasure: b-adic histogram on the unit cube, for BaseB.
struct CPState {
  std::variant<TreeMeasure<double>, ScaledProduct, GridMeasure> measure;
  Box box;
  std::optional<double> w;
};

struct StepRecord {
  int child = 0;
  double log_mass = 0.0;  // log μ_n(B_{n+1})
};

struct Transition {
  CPState next;
  StepRecord record;
};

/// Child masses of the state's box in the operator's child order.
std::vector<double> child_masses(const CPState& state, const PartitionOperator& op);

/// Conditions the state on child `child` and rescales.
CPState descend(const CPState& state, const PartitionOperator& op, int child);

Transition cp_step(const CPState& state, const PartitionOperator& op, Rng& rng);
Transition cp_step(const CPState& state, const PartitionOperator& op, std::uint64_t seed);

struct Functional {
  std::string name;
  std::function<double(const CPState&, const StepRecord&)> eval;
};

/// Functionals evaluated on state n with the record of the step n -> n+1.
struct ChainRun {
  std::uint64_t seed = 0;
  std::vector<StepRecord> steps;
  std::vector<std::string> names;
  std::vector<std::vector<double>> values;  // per functional, per step

  std::size_t length() const { return steps.size(); }
  double average(std::size_t functional) const;
  std::vector<double> running_average(std::size_t functional) const;
  void write_csv(std::ostream& os) const;
};

ChainRun cp_run(const CPState& initial, std::size_t steps, const PartitionOperator& op,
                const std::vector<Functional>& functionals, std::uint64_t seed);

struct ChainDimension {
  double value = 0.0;
  double std_error = 0.0;
};

/// mean(−log μ_n(B_{n+1})) / log(1/rho), batch-means standard error.
ChainDimension chain_dimension(const ChainRun& run, double rho);

/// Initial state for a digit tree on its unit cube.
CPState tree_state(const TreeMeasure<double>& tm);

/// Unit-cube state for a 1-d or 2-d grid measure.
CPState grid_state(const GridMeasure& g);

/// S_w(μ^x × ν^y) on the normalized R_w rectangle. Markov pasts end in a
/// symbol drawn from the stationary law; w0 defaults to uniform on [0, log 3).
CPState x2x3_initial(const MeasureSpec& mu_spec, const MeasureSpec& nu_spec, std::optional<double> w0,
                     std::uint64_t seed);

/// Conditional measure μ^{x,n} on the level-n BaseB cell given by `path`.
TreeMeasure<double> scenery(const TreeMeasure<double>& tm, WordView path, std::size_t n);

/// Scenery of a chain state along a fixed sequence of child indices.
CPState scenery(const CPState& state, const std::vector<int>& children, const PartitionOperator& op);

/// e_q of the state's measure under `proj` at scale rho^q of the operator.
double state_e_q(const CPState& state, const Projection& proj, int q, const PartitionOperator& op,
                 ProjectionCache* cache = nullptr);

}  // namespace fracproj
