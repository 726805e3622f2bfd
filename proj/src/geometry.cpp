#include "fracproj/geometry.hpp"

#include "fracproj/errors.hpp"

#include <cmath>
#include <map>
#include <numbers>

namespace fracproj {

namespace {

constexpr const char* kModule = "geometry";
const double kLog2 = std::log(2.0);
const double kLog3 = std::log(3.0);

/// Grid of nx x ny congruent cells of `box`, x index fastest. Endpoints on
/// the parent's boundary keep the parent's flags; inner ones are half-open.
std::vector<Box> grid_split(const Box& box, int nx, int ny) {
  const int n[2] = {nx, ny};
  std::vector<Box> out;
  out.reserve(static_cast<std::size_t>(nx) * ny);
  const int d = box.dim();
  for (int iy = 0; iy < (d == 2 ? ny : 1); ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const int idx[2] = {ix, iy};
      Box c = box;
      for (int j = 0; j < d; ++j) {
        const double step = (box.hi[j] - box.lo[j]) / n[j];
        c.lo[j] = box.lo[j] + idx[j] * step;
        c.hi[j] = idx[j] + 1 == n[j] ? box.hi[j] : box.lo[j] + (idx[j] + 1) * step;
        c.lo_closed[j] = idx[j] == 0 ? box.lo_closed[j] : true;
        c.hi_closed[j] = idx[j] + 1 == n[j] ? box.hi_closed[j] : false;
      }
      out.push_back(c);
    }
  return out;
}

}  // namespace

Box::Box(Vec lo_, Vec hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo.size() != hi.size() || lo.size() < 1 || lo.size() > 2)
    throw ArgumentError(kModule, "boxes have 1 or 2 axes");
  for (int j = 0; j < lo.size(); ++j)
    if (!(hi[j] > lo[j])) throw ArgumentError(kModule, "degenerate box: every side must have positive length");
}

Box Box::unit(int dim) { return Box(Vec::Zero(dim), Vec::Ones(dim)); }

Box Box::closed(Vec lo, Vec hi) {
  Box b(std::move(lo), std::move(hi));
  b.hi_closed = {true, true};
  return b;
}

bool Box::contains(const Vec& x) const {
  for (int j = 0; j < dim(); ++j) {
    if (x[j] < lo[j] || (x[j] == lo[j] && !lo_closed[j])) return false;
    if (x[j] > hi[j] || (x[j] == hi[j] && !hi_closed[j])) return false;
  }
  return true;
}

bool Box::is_cube(double tol) const {
  const Vec s = sides();
  return (s.maxCoeff() - s.minCoeff()) <= tol * s.maxCoeff();
}

Box NormalizationMap::operator()(const Box& b) const {
  Box out = b;
  out.lo = (*this)(b.lo);
  out.hi = (*this)(b.hi);
  return out;
}

std::pair<Box, NormalizationMap> normalize_box(const Box& box) {
  const double vol = box.volume();
  if (!(vol > 0.0) || !std::isfinite(vol)) throw ArgumentError(kModule, "degenerate box");
  NormalizationMap t{std::pow(vol, -1.0 / box.dim()), -box.lo};
  Box star = t(box);
  star.lo.setZero();
  return {star, t};
}

std::string PartitionOperator::name() const {
  return kind == Kind::BaseB ? "base_b(" + std::to_string(base) + ")" : "rw";
}

std::vector<Box> base_b_children(const Box& box, int b) {
  if (b < 2) throw ArgumentError(kModule, "base must be at least 2");
  if (!box.is_cube()) throw ArgumentError(kModule, "the base-b operator needs a cube");
  return grid_split(box, b, b);
}

double rw_next(double w) {
  if (!(w >= 0.0 && w < kLog3)) throw ArgumentError(kModule, "eccentricity outside [0, log 3)");
  double next = w >= kLog3 - kLog2 ? w + kLog2 - kLog3 : w + kLog2;
  if (next < 0.0) next = 0.0;
  if (next >= kLog3) next = std::nextafter(kLog3, 0.0);
  return next;
}

RwSplit rw_children(double w) {
  RwSplit s;
  s.w_next = rw_next(w);
  const Box r(Vec::Zero(2), Vec(Eigen::Vector2d(1.0, std::exp(w))));
  s.count = w >= kLog3 - kLog2 ? 6 : 2;
  s.children = grid_split(r, 2, s.count / 2);
  return s;
}

double eccentricity(const Box& box) {
  if (box.dim() != 2) throw ArgumentError(kModule, "eccentricity needs a planar box");
  return std::log(box.sides()[1] / box.sides()[0]);
}

std::vector<Box> children(const PartitionOperator& op, const Box& box) {
  if (op.kind == PartitionOperator::Kind::BaseB) return base_b_children(box, op.base);
  double w = eccentricity(box);
  if (w < 0.0 && w > -1e-12) w = 0.0;
  if (!(w >= 0.0 && w < kLog3)) throw ArgumentError(kModule, "box eccentricity outside [0, log 3)");
  return grid_split(box, 2, w >= kLog3 - kLog2 ? 3 : 1);
}

RegularityReport check_regularity(const PartitionOperator& op, const Box& start, int n_levels) {
  if (n_levels < 1) throw ArgumentError(kModule, "need at least one level");
  RegularityReport r;
  const double rho = op.rho();
  // Cells of one level fall into few shapes; track the distinct side vectors.
  std::vector<Box> shapes{start};
  for (int n = 1; n <= n_levels; ++n) {
    std::map<std::pair<long long, long long>, Box> next;
    for (const Box& b : shapes)
      for (const Box& c : children(op, b)) {
        const Vec s = c.sides();
        const auto key = std::make_pair(std::llround(std::log(s[0]) * 1e9),
                                        c.dim() == 2 ? std::llround(std::log(s[1]) * 1e9) : 0LL);
        Box normalized(Vec::Zero(c.dim()), s);
        next.emplace(key, normalized);
      }
    shapes.clear();
    const double scale = std::pow(rho, n);
    double cn = 0.0;
    for (const auto& [key, b] : next) {
      const Vec s = b.sides();
      cn = std::max({cn, scale / s.minCoeff(), s.maxCoeff() / scale});
      shapes.push_back(b);
    }
    r.per_level.push_back(cn);
  }
  double first = 0.0, second = 0.0;
  for (int n = 0; n < n_levels; ++n) {
    double& half = 2 * n < n_levels ? first : second;
    half = std::max(half, r.per_level[n]);
  }
  r.C = std::max(first, second);
  r.ok = std::isfinite(r.C) && (n_levels < 2 || second <= 1.5 * first);
  return r;
}

}  // namespace fracproj
