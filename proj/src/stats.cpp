#include "fracproj/stats.hpp"

#include "fracproj/errors.hpp"

#include <algorithm>

namespace fracproj {

double star_discrepancy(std::vector<double> points, double lo, double hi) {
  if (points.empty()) throw ArgumentError("stats", "no points");
  for (auto& x : points) x = (x - lo) / (hi - lo);
  std::sort(points.begin(), points.end());
  const double n = static_cast<double>(points.size());
  double d = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i)
    d = std::max({d, (i + 1) / n - points[i], points[i] - i / n});
  return d;
}

double ks_uniform(std::vector<double> points, double lo, double hi) { return star_discrepancy(std::move(points), lo, hi); }

double batch_means_error(const std::vector<double>& series, std::size_t batches) {
  if (series.size() < 2 * batches) {
    Accumulator acc;
    for (double x : series) acc.add(x);
    return acc.std_error();
  }
  const std::size_t len = series.size() / batches;
  Accumulator acc;
  for (std::size_t b = 0; b < batches; ++b) {
    double s = 0.0;
    for (std::size_t i = b * len; i < (b + 1) * len; ++i) s += series[i];
    acc.add(s / static_cast<double>(len));
  }
  return acc.std_error();
}

}  // namespace fracproj
