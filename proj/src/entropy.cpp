#include "fracproj/entropy.hpp"

#include "fracproj/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <unsupported/Eigen/FFT>

namespace fracproj {

namespace {

constexpr const char* kModule = "entropy_proj";

/// Values within this many cells below a boundary are counted on the
/// boundary, so exact boundary hits go to the upper (half-open) cell.
constexpr double kDirectConvolutionWork = 2e7;
constexpr double kBoundarySlack = 1e-9;

std::int64_t cell_of(double v, double inv_r) { return static_cast<std::int64_t>(std::floor(v * inv_r + kBoundarySlack)); }

struct TreeCoding {
  int base;
  int dim;
};

TreeCoding coding_of(const TreeMeasure<double>& tm) {
  const int b = static_cast<int>(std::lround(1.0 / tm.rho()));
  if (b < 2 || std::abs(b * tm.rho() - 1.0) > 1e-12)
    throw ArgumentError(kModule, "tree rho is not the reciprocal of an integer base");
  if (tm.alphabet_size() == static_cast<std::size_t>(b)) return {b, 1};
  if (tm.alphabet_size() == static_cast<std::size_t>(b) * b) return {b, 2};
  throw ArgumentError(kModule, "tree alphabet is not a digit cube of dimension 1 or 2");
}

/// Smallest depth with span * h^depth <= target.
std::size_t depth_for(double span, double h, double target) {
  if (span <= 0.0) return 0;
  std::size_t d = 0;
  double len = span;
  while (len > target * (1.0 + 1e-12)) {
    len *= h;
    ++d;
  }
  return d;
}

/// Empty histogram covering the image interval [lo, hi].
GridMeasure empty_line(int base, int level, double lo, double hi) {
  GridMeasure g;
  g.dim = 1;
  g.base = base;
  g.level = level;
  const double inv_r = std::pow(base, level);
  g.origin = {cell_of(lo, inv_r), 0};
  const std::int64_t last = cell_of(hi, inv_r);
  g.mass = Eigen::ArrayXXd::Zero(last - g.origin[0] + 1, 1);
  return g;
}

std::pair<double, double> image_range(double a, double b) {
  return {std::min(0.0, a) + std::min(0.0, b), std::max(0.0, a) + std::max(0.0, b)};
}

void check_level(int level, int base) {
  if (base < 2) throw ArgumentError(kModule, "grid base must be at least 2");
  if (level < 0 || level * std::log(base) > 600.0) throw ArgumentError(kModule, "grid level outside float range");
}

}  // namespace

double GridMeasure::resolution() const { return std::pow(static_cast<double>(base), -level); }

void check_grid(const GridMeasure& g) {
  if ((g.mass < 0.0).any()) throw ConsistencyError(kModule, "negative cell mass");
  if (std::abs(g.total() - 1.0) > 1e-9) throw ConsistencyError(kModule, "grid masses do not sum to 1");
}

GridMeasure grid_1d(int base, int level, std::int64_t origin, const Eigen::ArrayXd& mass) {
  check_level(level, base);
  GridMeasure g;
  g.base = base;
  g.level = level;
  g.origin = {origin, 0};
  g.mass = mass;
  return g;
}

std::string grid_csv(const GridMeasure& g) {
  std::ostringstream os;
  os.precision(6);
  os << (g.dim == 1 ? "cell_index,mass\n" : "cell_x,cell_y,mass\n");
  for (Eigen::Index j = 0; j < g.mass.cols(); ++j)
    for (Eigen::Index i = 0; i < g.mass.rows(); ++i) {
      if (g.mass(i, j) == 0.0) continue;
      os << g.origin[0] + i << ',';
      if (g.dim == 2) os << g.origin[1] + j << ',';
      os << g.mass(i, j) << '\n';
    }
  return os.str();
}

ScaleEntropy h_r(const GridMeasure& g) {
  ScaleEntropy h;
  const Eigen::Index rows = g.mass.rows(), cols = g.mass.cols();
  Eigen::ArrayXXd padded = Eigen::ArrayXXd::Zero(rows + 2, g.dim == 2 ? cols + 2 : 1);
  if (g.dim == 2)
    padded.block(1, 1, rows, cols) = g.mass;
  else
    padded.block(1, 0, rows, 1) = g.mass;
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double m = g.mass(i, j);
      if (m <= 0.0) continue;
      h.partition -= m * std::log(m);
      const double around = g.dim == 2 ? padded.block(i, j, 3, 3).sum() : padded.block(i, 0, 3, 1).sum();
      h.ball -= m * std::log(around);
    }
  return h;
}

Projection Projection::with_slope(double s) {
  if (!std::isfinite(s)) throw ArgumentError(kModule, "slope must be finite");
  return {Kind::Slope, s, {1.0, s}};
}

Projection Projection::along(const Eigen::Vector2d& u) {
  if (!(u.norm() > 0.0)) throw ArgumentError(kModule, "direction must be nonzero");
  return {Kind::Direction, 0.0, u.normalized()};
}

Eigen::Vector2d Projection::coefficients() const {
  switch (kind) {
    case Kind::Slope:
      return {1.0, slope};
    case Kind::AxisX:
      return {1.0, 0.0};
    case Kind::AxisY:
      return {0.0, 1.0};
    case Kind::Direction:
      return direction;
  }
  return direction;
}

std::string Projection::label() const {
  std::ostringstream os;
  os.precision(6);
  switch (kind) {
    case Kind::Slope:
      os << "slope " << slope;
      break;
    case Kind::AxisX:
      os << "axis_x";
      break;
    case Kind::AxisY:
      os << "axis_y";
      break;
    case Kind::Direction:
      os << "direction (" << direction.x() << " " << direction.y() << ")";
      break;
  }
  return os.str();
}

const ProjectionCache::Atoms& ProjectionCache::atoms(const TreeMeasure<double>& tm, std::size_t depth) {
  const auto key = std::make_tuple(tm.tables_id(), tm.root(), depth);
  if (auto it = atoms_.find(key); it != atoms_.end()) return it->second;
  if (depth > tm.depth())
    throw ResolutionError(kModule, "projection needs tree depth " + std::to_string(depth) + ", tree has " +
                                       std::to_string(tm.depth()));
  const auto coding = coding_of(tm);
  if (coding.dim != 1) throw ArgumentError(kModule, "product factors must be 1-d trees");
  Atoms out;
  const double h = 1.0 / coding.base;
  const double half = std::pow(h, static_cast<double>(depth)) / 2.0;
  auto rec = [&](auto&& self, std::uint32_t s, std::size_t level, double corner, double scale, double mass) -> void {
    if (level == depth) {
      out.position.push_back(corner + half);
      out.mass.push_back(mass);
      return;
    }
    const double next = scale * h;
    for (Symbol b = 0; b < tm.alphabet_size(); ++b) {
      const double p = tm.prob_double(s, b);
      if (p <= 0.0) continue;
      self(self, tm.child(s, b), level + 1, corner + b * next, next, mass * p);
    }
  };
  rec(rec, tm.root(), 0, 0.0, 1.0, 1.0);
  return atoms_.emplace(key, std::move(out)).first->second;
}

GridMeasure push_grid(const TreeMeasure<double>& tm, const Projection& proj, int level, int base) {
  check_level(level, base);
  const auto coding = coding_of(tm);
  Eigen::Vector2d c = proj.coefficients();
  if (coding.dim == 1) c.y() = 0.0;
  const double r = std::pow(static_cast<double>(base), -level);
  const double h = 1.0 / coding.base;
  const std::size_t depth = depth_for(std::abs(c.x()) + std::abs(c.y()), h, r / 2.0);
  if (depth > tm.depth())
    throw ResolutionError(kModule, "projection at level " + std::to_string(level) + " needs tree depth " +
                                       std::to_string(depth) + ", tree has " + std::to_string(tm.depth()));
  const auto [lo, hi] = image_range(c.x(), c.y());
  GridMeasure g = empty_line(base, level, lo, hi);
  const double inv_r = 1.0 / r;
  const double half = std::pow(h, static_cast<double>(depth)) / 2.0;
  const std::size_t b = coding.base;
  auto rec = [&](auto&& self, std::uint32_t s, std::size_t lvl, double x, double y, double scale, double mass) -> void {
    if (lvl == depth) {
      const double v = c.x() * (x + half) + c.y() * (coding.dim == 2 ? y + half : 0.0);
      g.mass(cell_of(v, inv_r) - g.origin[0], 0) += mass;
      return;
    }
    const double next = scale * h;
    for (Symbol sym = 0; sym < tm.alphabet_size(); ++sym) {
      const double p = tm.prob_double(s, sym);
      if (p <= 0.0) continue;
      self(self, tm.child(s, sym), lvl + 1, x + (sym % b) * next, y + (sym / b) * next, next, mass * p);
    }
  };
  rec(rec, tm.root(), 0, 0.0, 0.0, 1.0, 1.0);
  return g;
}

GridMeasure push_grid(const ScaledProduct& m, const Projection& proj, int level, int base, ProjectionCache* cache) {
  check_level(level, base);
  ProjectionCache local;
  ProjectionCache& pc = cache ? *cache : local;
  const Eigen::Vector2d c = proj.coefficients();
  const double a = c.x() * m.sx, bcoef = c.y() * m.sy;
  const double r = std::pow(static_cast<double>(base), -level);
  const std::size_t dx = depth_for(std::abs(a), m.x_factor.rho(), r / 2.0);
  const std::size_t dy = depth_for(std::abs(bcoef), m.y_factor.rho(), r / 2.0);
  const auto& xs = pc.atoms(m.x_factor, dx);
  const auto& ys = pc.atoms(m.y_factor, dy);
  const auto [lo, hi] = image_range(a, bcoef);
  GridMeasure g = empty_line(base, level, lo, hi);
  const double inv_r = 1.0 / r;
  double* bins = g.mass.data();
  const std::int64_t origin = g.origin[0];
  // Cell indices in 32.32 fixed point: floor of the sum becomes a shift.
  constexpr double kScale = 4294967296.0;
  const std::size_t nx = xs.position.size();
  std::vector<std::int64_t> ax(nx);
  for (std::size_t i = 0; i < nx; ++i)
    ax[i] = static_cast<std::int64_t>(std::floor((a * xs.position[i] * inv_r + kBoundarySlack) * kScale));
  const double* xm = xs.mass.data();
  for (std::size_t j = 0; j < ys.position.size(); ++j) {
    const auto off = static_cast<std::int64_t>(std::floor(bcoef * ys.position[j] * inv_r * kScale)) - (origin << 32);
    const double ym = ys.mass[j];
    std::int64_t cell = (ax[0] + off) >> 32;
    double run = 0.0;
    for (std::size_t i = 0; i < nx; ++i) {
      const std::int64_t c = (ax[i] + off) >> 32;
      if (c != cell) {
        bins[cell] += run * ym;
        run = 0.0;
        cell = c;
      }
      run += xm[i];
    }
    bins[cell] += run * ym;
  }
  return g;
}

namespace detail {

GridMeasure histogram_1d(const std::vector<double>& values, const std::vector<double>& weights, int level, int base) {
  check_level(level, base);
  if (values.empty()) throw ArgumentError(kModule, "no sample points");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  GridMeasure g = empty_line(base, level, *lo, *hi);
  const double inv_r = std::pow(static_cast<double>(base), level);
  for (std::size_t i = 0; i < values.size(); ++i) g.mass(cell_of(values[i], inv_r) - g.origin[0], 0) += weights[i];
  return g;
}

}  // namespace detail

GridMeasure push_grid(const Eigen::MatrixXd& points, const Projection& proj, int level, int base) {
  const Eigen::Vector2d c = proj.coefficients();
  const bool planar = points.rows() == 2;
  return push_grid_map(
      points, [&](const auto& x) { return c.x() * x[0] + (planar ? c.y() * x[1] : 0.0); }, level, base);
}

GridMeasure tree_grid(const TreeMeasure<double>& tm, int level) {
  const auto coding = coding_of(tm);
  check_level(level, coding.base);
  if (static_cast<std::size_t>(level) > tm.depth()) throw ResolutionError(kModule, "grid level exceeds tree depth");
  GridMeasure g;
  g.dim = coding.dim;
  g.base = coding.base;
  g.level = level;
  const auto n = static_cast<Eigen::Index>(std::llround(std::pow(coding.base, level)));
  g.mass = Eigen::ArrayXXd::Zero(n, coding.dim == 2 ? n : 1);
  const Symbol b = coding.base;
  auto rec = [&](auto&& self, std::uint32_t s, int lvl, Eigen::Index ix, Eigen::Index iy, double mass) -> void {
    if (lvl == level) {
      g.mass(ix, iy) += mass;
      return;
    }
    for (Symbol sym = 0; sym < tm.alphabet_size(); ++sym) {
      const double p = tm.prob_double(s, sym);
      if (p <= 0.0) continue;
      self(self, tm.child(s, sym), lvl + 1, ix * b + sym % b, coding.dim == 2 ? iy * b + sym / b : 0, mass * p);
    }
  };
  rec(rec, tm.root(), 0, 0, 0, 1.0);
  return g;
}

GridMeasure push_grid(const GridMeasure& g, const Projection& proj, int level) {
  if (g.dim != 2) throw ArgumentError(kModule, "grid projection needs a planar grid");
  check_level(level, g.base);
  const Eigen::Vector2d c = proj.coefficients();
  const double rg = g.resolution();
  const double x0 = g.origin[0] * rg, y0 = g.origin[1] * rg;
  const double x1 = x0 + g.mass.rows() * rg, y1 = y0 + g.mass.cols() * rg;
  const double lo = std::min(c.x() * x0, c.x() * x1) + std::min(c.y() * y0, c.y() * y1);
  const double hi = std::max(c.x() * x0, c.x() * x1) + std::max(c.y() * y0, c.y() * y1);
  GridMeasure out = empty_line(g.base, level, lo, hi);
  const double inv_r = std::pow(static_cast<double>(g.base), level);
  for (Eigen::Index j = 0; j < g.mass.cols(); ++j)
    for (Eigen::Index i = 0; i < g.mass.rows(); ++i) {
      if (g.mass(i, j) == 0.0) continue;
      const double v = c.x() * (x0 + (i + 0.5) * rg) + c.y() * (y0 + (j + 0.5) * rg);
      out.mass(cell_of(v, inv_r) - out.origin[0], 0) += g.mass(i, j);
    }
  return out;
}

double e_q(const GridMeasure& projected, int q, double rho) {
  if (q < 1) throw ArgumentError(kModule, "q must be at least 1");
  if (std::abs(projected.resolution() / std::pow(rho, q) - 1.0) > 1e-9)
    throw ResolutionError(kModule, "histogram resolution does not match rho^q");
  return h_r(projected).partition / (q * std::log(1.0 / rho));
}

double e_q(const TreeMeasure<double>& tm, const Projection& proj, int q, ProjectionCache* cache) {
  const Eigen::Vector2d c = proj.coefficients();
  const ProjectionCache::EqKey key{tm.tables_id(), tm.root(), c.x(), c.y(), q};
  if (cache)
    if (auto it = cache->tree_eq.find(key); it != cache->tree_eq.end()) return it->second;
  const auto coding = coding_of(tm);
  const double value = e_q(push_grid(tm, proj, q, coding.base), q, tm.rho());
  if (cache) cache->tree_eq.emplace(key, value);
  return value;
}

double e_q(const ScaledProduct& m, const Projection& proj, int q, ProjectionCache* cache) {
  return e_q(push_grid(m, proj, q, 2, cache), q, 0.5);
}

double e_q(const GridMeasure& g2, const Projection& proj, int q, double rho) {
  if (q < 1) throw ArgumentError(kModule, "q must be at least 1");
  const int base = g2.base;
  if (std::abs(base * rho - 1.0) > 1e-12) throw ArgumentError(kModule, "rho must be 1/base for grid measures");
  if (g2.level < q)
    throw ResolutionError(kModule, "grid level " + std::to_string(g2.level) + " is too coarse; e_q needs level >= " +
                                       std::to_string(q));
  return e_q(push_grid(g2, proj, q), q, rho);
}

GridMeasure fold_to_circle(const GridMeasure& g) {
  if (g.dim != 1) throw ArgumentError(kModule, "circle histograms are 1-d");
  const auto n = static_cast<std::int64_t>(std::llround(std::pow(g.base, g.level)));
  GridMeasure out = grid_1d(g.base, g.level, 0, Eigen::ArrayXd::Zero(n));
  for (Eigen::Index i = 0; i < g.mass.rows(); ++i) {
    const std::int64_t k = ((g.origin[0] + i) % n + n) % n;
    out.mass(k, 0) += g.mass(i, 0);
  }
  return out;
}

GridMeasure circle_convolve(const GridMeasure& a, const GridMeasure& b) {
  if (a.dim != 1 || b.dim != 1) throw ArgumentError(kModule, "circle convolution needs 1-d histograms");
  if (a.base != b.base || a.level != b.level)
    throw ResolutionError(kModule, "circle convolution needs equal resolutions");
  const GridMeasure fa = fold_to_circle(a), fb = fold_to_circle(b);
  const Eigen::Index n = fa.mass.rows();
  GridMeasure out = grid_1d(a.base, a.level, 0, Eigen::ArrayXd::Zero(n));
  std::vector<Eigen::Index> sa, sb;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (fa.mass(j, 0) != 0.0) sa.push_back(j);
    if (fb.mass(j, 0) != 0.0) sb.push_back(j);
  }
  if (static_cast<double>(sa.size()) * static_cast<double>(sb.size()) <= kDirectConvolutionWork) {
    for (Eigen::Index i : sa) {
      const double ma = fa.mass(i, 0);
      for (Eigen::Index j : sb) {
        const Eigen::Index k = i + j < n ? i + j : i + j - n;
        out.mass(k, 0) += ma * fb.mass(j, 0);
      }
    }
    return out;
  }
  // Large supports: cyclic convolution by FFT, rounding noise clipped at 0.
  Eigen::FFT<double> fft;
  std::vector<double> ta(fa.mass.data(), fa.mass.data() + n), tb(fb.mass.data(), fb.mass.data() + n), tc;
  std::vector<std::complex<double>> A, B;
  fft.fwd(A, ta);
  fft.fwd(B, tb);
  for (std::size_t k = 0; k < A.size(); ++k) A[k] *= B[k];
  fft.inv(tc, A);
  for (Eigen::Index k = 0; k < n; ++k) out.mass(k, 0) = std::max(0.0, tc[static_cast<std::size_t>(k)]);
  out.mass /= out.mass.sum();
  return out;
}

double ball_entropy(const std::vector<double>& x, const std::vector<double>& w, double radius) {
  if (x.size() != w.size()) throw ArgumentError(kModule, "points and weights differ in length");
  std::vector<double> prefix(x.size() + 1, 0.0);
  std::partial_sum(w.begin(), w.end(), prefix.begin() + 1);
  double h = 0.0;
  std::size_t lo = 0, hi = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    while (x[lo] < x[i] - radius) ++lo;
    while (hi < x.size() && x[hi] <= x[i] + radius) ++hi;
    if (w[i] > 0.0) h -= w[i] * std::log(prefix[hi] - prefix[lo]);
  }
  return h;
}

double partition_entropy(const std::vector<double>& points, const std::vector<double>& weights, double r,
                         double anchor) {
  std::map<std::int64_t, double> cells;
  for (std::size_t i = 0; i < points.size(); ++i) cells[cell_of(points[i] - anchor, 1.0 / r)] += weights[i];
  double h = 0.0;
  for (const auto& [k, m] : cells)
    if (m > 0.0) h -= m * std::log(m);
  return h;
}

Atoms1d bernoulli_convolution_atoms(double t, double p, int terms) {
  if (terms < 1 || terms > 26) throw ArgumentError(kModule, "atom count 2^terms out of range");
  std::vector<double> x{0.0}, w{1.0};
  double power = 1.0;
  for (int i = 0; i < terms; ++i, power *= t) {
    const std::size_t n = x.size();
    x.resize(2 * n);
    w.resize(2 * n);
    for (std::size_t k = 0; k < n; ++k) {
      x[n + k] = x[k] - power;
      w[n + k] = w[k] * (1.0 - p);
      x[k] += power;
      w[k] *= p;
    }
  }
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });
  Atoms1d out;
  out.position.reserve(x.size());
  out.mass.reserve(x.size());
  for (std::size_t i : order) {
    out.position.push_back(x[i]);
    out.mass.push_back(w[i]);
  }
  return out;
}

}  // namespace fracproj
