#pragma once

#include "fracproj/tree_measure.hpp"
#include "fracproj/word.hpp"

#include <Eigen/Core>

#include <functional>
#include <ostream>
#include <vector>

namespace fracproj {

/// Closed axis-aligned box [lo, hi] in R^k.
struct Cube {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  int dim() const { return static_cast<int>(lo.size()); }
  double side() const { return (hi - lo).maxCoeff(); }
  double min_side() const { return (hi - lo).minCoeff(); }
  bool contains(const Cube& inner, double slack = 1e-12) const;
  bool contains(const Eigen::VectorXd& x) const;
};

/// 2^k N^k sub-cubes of side len(Q)/N starting at the points lo + i len(Q)/(2N),
/// clipped to Q. Index runs with the first coordinate fastest.
std::vector<Cube> cover_cube(const Cube& q, int N);

/// Cubes containing f[a] for the words of a source tree with parameter rho.
struct CylinderMap {
  std::size_t alphabet_size = 0;
  double rho = 0.5;
  int k = 1;
  double L = 1.0;
  std::function<Cube(WordView)> cube;
};

/// Closed digit cells of the base-b coding of [0,1]^d.
CylinderMap coding_map(int base, int dim);

/// f(x, y) = a x + b y (a, b >= 0) on the base-b coding of the unit square.
CylinderMap linear_map(int base, double a, double b);

/// Every cylinder goes to the cube of side rho^n centred at `point`.
CylinderMap constant_map(std::size_t alphabet_size, double rho, const Eigen::VectorXd& point);

struct LiftNode {
  std::uint32_t parent = 0;
  Symbol x = 0;   // last source symbol
  Word g;         // image word in the target tree
  Cube source;    // cube(a)
  Cube target;    // h̃[g(a)]
};

struct LiftedSystem {
  CylinderMap cmap;
  std::size_t depth = 0;
  std::vector<int> N;        // N[n] for n >= 1, N[0] = 1
  std::vector<double> P;     // P[n] = N[1]...N[n]
  std::vector<std::vector<LiftNode>> levels;

  std::size_t branching(std::size_t n) const;  // 2^k N_n^k
  Word source_word(std::size_t level, std::size_t index) const;
};

/// N_n in {floor(1/rho), floor(1/rho)+1} keeping 1/2 <= rho^n P_n <= 1. Needs rho <= 1/2.
std::vector<int> choose_N(double rho, std::size_t depth);

/// Builds the lift over all words of length <= depth, or only over the
/// positive-mass words of `support`.
LiftedSystem lift(const CylinderMap& cmap, std::size_t depth, const TreeMeasure<double>* support = nullptr);

/// g(a x) extends g(a) by exactly one symbol.
bool check_morphism(const LiftedSystem& sys);

/// cube(a) inside h̃[g(a)] for every constructed word.
bool check_containment(const LiftedSystem& sys);

/// One parent cube and the cubes of all its children.
struct CubeFamily {
  Cube parent;
  std::vector<Cube> children;
};
using CubeLevels = std::vector<std::vector<CubeFamily>>;  // index = parent level

struct FaithfulnessReport {
  double C_mult = 0.0;
  double C_decay = 0.0;
  double C = 0.0;  // max of the two
  bool ok = false;
  std::vector<double> mult_per_level;
  std::vector<double> decay_per_level;
};

/// Exact maximal multiplicity of sibling cubes (closed) and the smallest C with
/// every level-n cube between sup-norm balls of radii (rho/C)^n and (C rho)^n.
FaithfulnessReport faithfulness_check(const CubeLevels& levels, double rho, double bound);

/// Families of the lifted map: every constructed target node with its full cover.
CubeLevels lifted_families(const LiftedSystem& sys, std::size_t depth);

/// Families of the base-b coding of [0,1]^d.
CubeLevels coding_families(int base, int dim, std::size_t depth);

/// Bound 2^k + 1.
FaithfulnessReport faithfulness_check(const LiftedSystem& sys, std::size_t depth);

struct DefectReport {
  double max_defect = 0.0;
  Word argmax;
  std::vector<double> per_level;  // max over cylinders of each length
};

/// max over positive-mass cylinders a with |a| < depth of
/// |H_{rho^{n+1}}(f μ_[a]) − H_{rho^{n+1}}(g μ_[a])|, n = |a|.
DefectReport entropy_defect(const LiftedSystem& sys, const TreeMeasure<double>& tm, std::size_t depth);

void write_report(std::ostream& os, const LiftedSystem& sys, const FaithfulnessReport& faith, const DefectReport& defect);

}  // namespace fracproj
