#pragma once

#include <Eigen/Core>

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace fracproj {

/// Point or side-length vector in dimension 1 or 2.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 2, 1>;

/// Product of intervals with per-endpoint open/closed flags.
struct Box {
  Vec lo;
  Vec hi;
  std::array<bool, 2> lo_closed{true, true};
  std::array<bool, 2> hi_closed{false, false};

  Box() = default;
  Box(Vec lo, Vec hi);

  static Box unit(int dim);
  static Box closed(Vec lo, Vec hi);

  int dim() const { return static_cast<int>(lo.size()); }
  Vec sides() const { return hi - lo; }
  double volume() const { return sides().prod(); }
  bool contains(const Vec& x) const;
  bool is_cube(double tol = 1e-12) const;
};

/// x -> ratio * (x + translation).
struct NormalizationMap {
  double ratio = 1.0;
  Vec translation;

  Vec operator()(const Vec& x) const { return ratio * (x + translation); }
  Box operator()(const Box& b) const;
};

/// Volume-one box of the same shape with minimal corner at the origin, and
/// the homothety taking `box` onto it.
std::pair<Box, NormalizationMap> normalize_box(const Box& box);

struct PartitionOperator {
  enum class Kind { BaseB, Rw };
  Kind kind = Kind::BaseB;
  int base = 2;

  static PartitionOperator base_b(int b) { return {Kind::BaseB, b}; }
  static PartitionOperator rw() { return {Kind::Rw, 2}; }

  double rho() const { return kind == Kind::BaseB ? 1.0 / base : 0.5; }
  std::string name() const;
};

/// b^d congruent half-open sub-cubes, x index fastest.
std::vector<Box> base_b_children(const Box& box, int b);

struct RwSplit {
  std::vector<Box> children;  // inside [0,1] x [0,e^w], x index fastest
  double w_next = 0.0;
  int count = 0;
};

/// Split of the rectangle [0,1] x [0,e^w] for w in [0, log 3).
RwSplit rw_children(double w);

/// Eccentricity after one split: w + log 2, minus log 3 once w >= log 3 - log 2.
double rw_next(double w);

/// log(height / base) of a planar box.
double eccentricity(const Box& box);

/// Children of `box` under the operator. For Rw the eccentricity of the
/// box must lie in [0, log 3).
std::vector<Box> children(const PartitionOperator& op, const Box& box);

struct RegularityReport {
  double C = 1.0;
  bool ok = true;
  std::vector<double> per_level;
};

/// Smallest C with every level-n cell between sup-norm balls of diameter
/// rho^n / C and C rho^n, per level. ok means the second half of the levels
/// never exceeds 1.5 times the maximum over the first half.
RegularityReport check_regularity(const PartitionOperator& op, const Box& start, int n_levels);

}  // namespace fracproj
