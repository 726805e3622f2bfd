#pragma once

#include "fracproj/entropy.hpp"
#include "fracproj/geometry.hpp"
#include "fracproj/measure_zoo.hpp"
#include "fracproj/scenery_cp.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace fracproj {

struct EstimatorConfig {
  int q = 8;
  std::size_t n_scenery = 400;  // N, sceneries per sampled point
  std::size_t n_samples = 200;
  std::uint64_t seed = 0;
  std::size_t sampler_points = 200000;  // sampler fallback only
  std::size_t min_cell_points = 2000;   // sampler fallback: stop descending below this
};

struct ProjectionEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  int q = 0;
  double rho = 0.0;
  std::size_t n_scenery = 0;  // mean number of sceneries actually averaged per sample
  std::size_t n_samples = 0;
  std::string method;  // "tree", "x2x3-chain" or "sampler"
  std::string caveat;
};

/// Rw for a product of a base-2 and a base-3 digit measure, BaseB(b) for
/// other exact digit trees, BaseB(2) for sampled measures.
PartitionOperator default_operator(const MeasureSpec& spec);

/// Mean over sampled x of (1/N) Σ_{n<N} e_q(π μ^{x,n}), raw: the O(1/q)
/// correction is not subtracted. Samples run in parallel.
ProjectionEstimate projection_dim_lower(const MeasureSpec& spec, const Projection& proj, const EstimatorConfig& cfg,
                                        std::optional<PartitionOperator> op = std::nullopt);

/// Same for an explicit digit tree along its own BaseB filtration.
ProjectionEstimate projection_dim_lower(const TreeMeasure<double>& tm, const Projection& proj,
                                        const EstimatorConfig& cfg);

struct ScanRow {
  double slope = 0.0;
  ProjectionEstimate result;
  bool flagged = false;  // estimate below max − epsilon
};

struct ScanResult {
  std::vector<ScanRow> rows;
  double epsilon = 0.05;
  double max_estimate = 0.0;
  std::uint64_t seed = 0;

  /// slope, estimate, stderr, q, N, n_samples, seed, flagged
  void write_csv(std::ostream& os) const;
};

/// Slope k runs with seed derive_seed(cfg.seed, k); rows keep slope order.
ScanResult scan_slopes(const MeasureSpec& spec, const std::vector<double>& slopes, const EstimatorConfig& cfg,
                       double epsilon = 0.05, std::optional<PartitionOperator> op = std::nullopt);

/// n slopes evenly spaced in [lo, hi] on each side of 0.
std::vector<double> symmetric_slope_grid(double lo, double hi, std::size_t per_side);

}  // namespace fracproj
