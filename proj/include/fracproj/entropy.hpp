#pragma once

#include "fracproj/measure_zoo.hpp"
#include "fracproj/tree_measure.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace fracproj {

/// Histogram on the grid of b-adic cells of side base^-level. Cell (i, j)
/// of `mass` covers [(origin[0]+i) r, (origin[0]+i+1) r) x [...] for r the
/// resolution; 1-d grids have a single column.
struct GridMeasure {
  int dim = 1;
  int base = 2;
  int level = 0;
  std::array<std::int64_t, 2> origin{0, 0};
  Eigen::ArrayXXd mass;

  double resolution() const;
  double total() const { return mass.sum(); }
};

/// Throws unless masses are nonnegative and sum to 1 within 1e-9.
void check_grid(const GridMeasure& g);

GridMeasure grid_1d(int base, int level, std::int64_t origin, const Eigen::ArrayXd& mass);

/// "cell_index,mass" lines, cells in index order, zero cells skipped.
std::string grid_csv(const GridMeasure& g);

struct ScaleEntropy {
  double partition = 0.0;  // −Σ m log m over cells
  double ball = 0.0;       // −Σ m_c log(mass of the 3^k cells around c)
};

ScaleEntropy h_r(const GridMeasure& g);

/// Linear map R^2 -> R. Axis projections are tags of their own.
struct Projection {
  enum class Kind { Slope, AxisX, AxisY, Direction };
  Kind kind = Kind::Slope;
  double slope = 0.0;
  Eigen::Vector2d direction{1.0, 0.0};

  static Projection with_slope(double s);
  static Projection axis_x() { return {Kind::AxisX, 0.0, {1.0, 0.0}}; }
  static Projection axis_y() { return {Kind::AxisY, 0.0, {0.0, 1.0}}; }
  static Projection along(const Eigen::Vector2d& u);

  /// (a, b) with π(x, y) = a x + b y.
  Eigen::Vector2d coefficients() const;
  std::string label() const;
};

/// Measure of (sx X, sy Y) for independent X, Y coded by 1-d digit trees.
struct ScaledProduct {
  TreeMeasure<double> x_factor;
  TreeMeasure<double> y_factor;
  double sx = 1.0;
  double sy = 1.0;
};

/// Memo for repeated projections of sceneries that share automaton tables:
/// cylinder midpoints of 1-d factors and e_q values of whole trees, keyed by
/// tree state. Not thread-safe; use one per worker.
class ProjectionCache {
 public:
  struct Atoms {
    std::vector<double> position;  // cylinder midpoints in [0,1]
    std::vector<double> mass;
  };

  const Atoms& atoms(const TreeMeasure<double>& tm, std::size_t depth);

  using EqKey = std::tuple<const void*, std::uint32_t, double, double, int>;
  std::map<EqKey, double> tree_eq;

 private:
  std::map<std::tuple<const void*, std::uint32_t, std::size_t>, Atoms> atoms_;
};

/// Projected histogram of a tree on its d-dimensional digit cube. Each
/// cylinder is refined until its image is at most half a cell, then its
/// mass goes to the cell of the image midpoint. A 1-d tree is read as a
/// measure on the x axis.
GridMeasure push_grid(const TreeMeasure<double>& tm, const Projection& proj, int level, int base);

/// Same rule for a scaled product: each factor is refined until its image
/// is at most half a cell.
GridMeasure push_grid(const ScaledProduct& m, const Projection& proj, int level, int base,
                      ProjectionCache* cache = nullptr);

/// Monte-Carlo histogram of projected sample points (columns of `points`).
GridMeasure push_grid(const Eigen::MatrixXd& points, const Projection& proj, int level, int base);

/// Histogram of a general map g of the sample points.
template <typename Map>
GridMeasure push_grid_map(const Eigen::MatrixXd& points, Map&& g, int level, int base);

/// Cell masses of the tree's own digit partition at `level`.
GridMeasure tree_grid(const TreeMeasure<double>& tm, int level);

/// Projected histogram of a 2-d grid measure, cell centres mapped to the
/// level-`level` grid of the same base.
GridMeasure push_grid(const GridMeasure& g, const Projection& proj, int level);

/// H_{rho^q}(π ν) / (q log(1/rho)) for a histogram at scale rho^q.
double e_q(const GridMeasure& projected, int q, double rho);

/// e_q for a tree on its unit digit cube, with rho the tree's rho.
double e_q(const TreeMeasure<double>& tm, const Projection& proj, int q, ProjectionCache* cache = nullptr);

/// e_q for a scaled product, at scale 2^-q.
double e_q(const ScaledProduct& m, const Projection& proj, int q, ProjectionCache* cache = nullptr);

/// e_q for a 2-d grid measure on its unit box; needs grid level >= q.
double e_q(const GridMeasure& g2, const Projection& proj, int q, double rho);

/// Cyclic convolution of two histograms of R/Z with the same resolution.
GridMeasure circle_convolve(const GridMeasure& a, const GridMeasure& b);

/// A 1-d histogram folded onto [0,1) with base^level cells.
GridMeasure fold_to_circle(const GridMeasure& g);

/// H_r of a discrete measure on R: −Σ w_i log μ([x_i − r, x_i + r]).
/// Points must be sorted.
double ball_entropy(const std::vector<double>& sorted_points, const std::vector<double>& weights, double radius);

/// −Σ m log m over the cells [anchor + k r, anchor + (k+1) r).
double partition_entropy(const std::vector<double>& points, const std::vector<double>& weights, double r,
                         double anchor = 0.0);

/// Atoms of the law of Σ_{i<M} ±t^i, sorted by position.
struct Atoms1d {
  std::vector<double> position;
  std::vector<double> mass;
};
Atoms1d bernoulli_convolution_atoms(double t, double p, int terms);

// ---------------------------------------------------------------------------

namespace detail {
GridMeasure histogram_1d(const std::vector<double>& values, const std::vector<double>& weights, int level, int base);
}

template <typename Map>
GridMeasure push_grid_map(const Eigen::MatrixXd& points, Map&& g, int level, int base) {
  std::vector<double> values(static_cast<std::size_t>(points.cols()));
  for (Eigen::Index i = 0; i < points.cols(); ++i) values[i] = g(points.col(i));
  return detail::histogram_1d(values, std::vector<double>(values.size(), 1.0 / values.size()), level, base);
}

}  // namespace fracproj
