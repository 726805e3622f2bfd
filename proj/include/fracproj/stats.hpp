#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace fracproj {

/// Running mean and variance (Welford).
class Accumulator {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double std_error() const { return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Star discrepancy of points in [lo, hi) against the uniform law.
double star_discrepancy(std::vector<double> points, double lo = 0.0, double hi = 1.0);

/// Kolmogorov-Smirnov distance to the uniform law on [lo, hi].
double ks_uniform(std::vector<double> points, double lo, double hi);

/// Standard error of the mean of a correlated series by batch means.
double batch_means_error(const std::vector<double>& series, std::size_t batches = 20);

}  // namespace fracproj
