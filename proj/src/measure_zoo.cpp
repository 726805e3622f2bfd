#include "fracproj/measure_zoo.hpp"

#include <Eigen/Dense>

#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace fracproj {

namespace {

constexpr const char* kModule = "measure_zoo";

template <typename Scalar>
Scalar convert(const Rational& r) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return to_double(r);
  } else {
    return r;
  }
}

Rational sum(const std::vector<Rational>& v) {
  Rational s = 0;
  for (const auto& x : v) s += x;
  return s;
}

void check_probability_vector(const std::vector<Rational>& p, const std::string& what) {
  if (p.empty()) throw ArgumentError(kModule, what + " is empty");
  for (const auto& x : p)
    if (x < 0) throw ArgumentError(kModule, what + " has a negative entry");
  if (std::abs(to_double(sum(p)) - 1.0) > 1e-12) throw ArgumentError(kModule, what + " does not sum to 1");
}

std::vector<Rational> normalized(const std::vector<Rational>& p) {
  const Rational s = sum(p);
  std::vector<Rational> out;
  out.reserve(p.size());
  for (const auto& x : p) out.push_back(x / s);
  return out;
}

void check_digits(int base, int dim, const std::vector<Digit>& digits) {
  if (base < 2) throw ArgumentError(kModule, "base must be at least 2");
  if (dim != 1 && dim != 2) throw ArgumentError(kModule, "digit measures live in dimension 1 or 2");
  if (digits.empty()) throw ArgumentError(kModule, "digit set is empty");
  std::set<Digit> seen;
  for (const auto& d : digits) {
    if (d[0] < 0 || d[0] >= base || (dim == 2 && (d[1] < 0 || d[1] >= base)) || (dim == 1 && d[1] != 0))
      throw ArgumentError(kModule, "digit outside {0..base-1}^d");
    if (!seen.insert(d).second) throw ArgumentError(kModule, "repeated digit");
  }
}

Symbol digit_symbol(const Digit& d, int base) { return static_cast<Symbol>(d[0] + base * d[1]); }

std::size_t alphabet_of(int base, int dim) { return dim == 1 ? base : static_cast<std::size_t>(base) * base; }

double entropy_of(const std::vector<double>& p) {
  double h = 0.0;
  for (double x : p)
    if (x > 0) h -= x * std::log(x);
  return h;
}

std::vector<double> to_doubles(const std::vector<Rational>& p) {
  std::vector<double> out;
  for (const auto& x : p) out.push_back(to_double(x));
  return out;
}

std::size_t draw_index(const std::vector<double>& cumulative, Rng& rng) {
  const double u = rng.uniform() * cumulative.back();
  for (std::size_t i = 0; i < cumulative.size(); ++i)
    if (u < cumulative[i]) return i;
  return cumulative.size() - 1;
}

std::vector<double> cumulative_of(const std::vector<double>& p) {
  std::vector<double> c(p.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) c[i] = acc += p[i];
  return c;
}

int terms_for(int precision_digits, double ratio) {
  if (precision_digits < 1) throw ArgumentError(kModule, "precision must be at least one digit");
  return static_cast<int>(std::ceil(precision_digits * std::log(10.0) / std::log(1.0 / ratio))) + 1;
}

bool near_integer(double x, int& k) {
  k = static_cast<int>(std::lround(x));
  return std::abs(x - k) <= 1e-9;
}

/// Draws one point of `spec` into out[0..dim).
void sample_into(const MeasureSpec& spec, Rng& rng, int precision, double* out) {
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BernoulliDigits>) {
          const auto cum = cumulative_of(to_doubles(s.probs));
          const int n = terms_for(precision, 1.0 / s.base);
          double scale = 1.0 / s.base;
          double x = 0.0, y = 0.0;
          for (int k = 0; k < n; ++k, scale /= s.base) {
            const auto& d = s.digits[draw_index(cum, rng)];
            x += d[0] * scale;
            y += d[1] * scale;
          }
          out[0] = x;
          if (s.dim == 2) out[1] = y;
        } else if constexpr (std::is_same_v<T, MarkovDigits>) {
          std::vector<std::vector<double>> rows;
          for (const auto& r : s.transition) rows.push_back(cumulative_of(to_doubles(r)));
          const int n = terms_for(precision, 1.0 / s.base);
          std::size_t i = draw_index(cumulative_of(to_doubles(s.initial)), rng);
          double scale = 1.0 / s.base;
          double x = 0.0, y = 0.0;
          for (int k = 0; k < n; ++k, scale /= s.base) {
            x += s.digits[i][0] * scale;
            y += s.digits[i][1] * scale;
            i = draw_index(rows[i], rng);
          }
          out[0] = x;
          if (s.dim == 2) out[1] = y;
        } else if constexpr (std::is_same_v<T, LinearIFS>) {
          double rmax = 0.0;
          for (const auto& m : s.maps) rmax = std::max(rmax, m.ratio);
          const int n = terms_for(precision, rmax);
          const auto cum = cumulative_of(s.weights);
          std::vector<std::size_t> address(n);
          for (auto& a : address) a = draw_index(cum, rng);
          Eigen::VectorXd x = Eigen::VectorXd::Zero(s.dim);
          for (auto it = address.rbegin(); it != address.rend(); ++it) x = s.maps[*it](x);
          for (int j = 0; j < s.dim; ++j) out[j] = x[j];
        } else if constexpr (std::is_same_v<T, Product>) {
          sample_into(*s.first, rng, precision, out);
          sample_into(*s.second, rng, precision, out + s.first->dim());
        } else {
          const int n = terms_for(precision, s.t);
          const int blocks = (n + s.block - 1) / s.block;
          const double tn = std::pow(s.t, s.block);
          std::vector<int> signs(s.block);
          double scale = 1.0, x = 0.0;
          for (int i = 0; i < blocks; ++i, scale *= tn) {
            for (auto& u : signs) u = rng.uniform() < s.p ? 1 : -1;
            x += block_polynomial(signs, s.t) * scale;
          }
          out[0] = x;
        }
      },
      spec.kind);
}

template <typename Scalar>
TreeMeasure<Scalar> bernoulli_tree(const BernoulliDigits& s, std::size_t depth) {
  TreeAutomaton<Scalar> a;
  a.alphabet_size = alphabet_of(s.base, s.dim);
  a.probs.assign(a.alphabet_size, Scalar(0));
  a.next.assign(a.alphabet_size, TreeAutomaton<Scalar>::kNone);
  const auto p = normalized(s.probs);
  for (std::size_t i = 0; i < s.digits.size(); ++i) {
    if (p[i] == 0) continue;
    const Symbol sym = digit_symbol(s.digits[i], s.base);
    a.probs[sym] = convert<Scalar>(p[i]);
    a.next[sym] = 0;
  }
  return TreeMeasure<Scalar>(std::move(a), 0, depth, 1.0 / s.base);
}

/// State 0 reads the first digit; state 1 + i follows digit i.
template <typename Scalar>
TreeMeasure<Scalar> markov_tree(const MarkovDigits& s, std::size_t depth) {
  const std::size_t n = s.digits.size();
  TreeAutomaton<Scalar> a;
  a.alphabet_size = alphabet_of(s.base, s.dim);
  a.probs.assign(a.alphabet_size * (n + 1), Scalar(0));
  a.next.assign(a.alphabet_size * (n + 1), TreeAutomaton<Scalar>::kNone);
  auto fill = [&](std::size_t state, const std::vector<Rational>& row) {
    const auto p = normalized(row);
    for (std::size_t j = 0; j < n; ++j) {
      if (p[j] == 0) continue;
      const Symbol sym = digit_symbol(s.digits[j], s.base);
      a.probs[state * a.alphabet_size + sym] = convert<Scalar>(p[j]);
      a.next[state * a.alphabet_size + sym] = static_cast<typename TreeAutomaton<Scalar>::State>(1 + j);
    }
  };
  fill(0, s.initial);
  for (std::size_t i = 0; i < n; ++i) fill(1 + i, s.transition[i]);
  return TreeMeasure<Scalar>(std::move(a), 0, depth, 1.0 / s.base);
}

template <typename Scalar>
TreeMeasure<Scalar> product_tree(const TreeMeasure<Scalar>& x, const TreeMeasure<Scalar>& y, std::size_t depth) {
  using State = typename TreeAutomaton<Scalar>::State;
  const std::size_t ax = x.alphabet_size(), ay = y.alphabet_size();
  TreeAutomaton<Scalar> a;
  a.alphabet_size = ax * ay;
  std::map<std::pair<State, State>, State> ids;
  std::vector<std::pair<State, State>> queue;
  auto id_of = [&](std::pair<State, State> st) {
    auto [it, fresh] = ids.emplace(st, static_cast<State>(ids.size()));
    if (fresh) {
      queue.push_back(st);
      a.probs.resize(a.probs.size() + a.alphabet_size, Scalar(0));
      a.next.resize(a.next.size() + a.alphabet_size, TreeAutomaton<Scalar>::kNone);
    }
    return it->second;
  };
  id_of({x.root(), y.root()});
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const auto [s, t] = queue[qi];
    const State id = ids.at(queue[qi]);
    for (Symbol bx = 0; bx < ax; ++bx) {
      if (detail::is_zero(x.prob(s, bx))) continue;
      for (Symbol by = 0; by < ay; ++by) {
        if (detail::is_zero(y.prob(t, by))) continue;
        const Symbol sym = bx + static_cast<Symbol>(ax) * by;
        const Scalar p = x.prob(s, bx) * y.prob(t, by);
        const State c = id_of({x.child(s, bx), y.child(t, by)});
        a.probs[id * a.alphabet_size + sym] = p;
        a.next[id * a.alphabet_size + sym] = c;
      }
    }
  }
  return TreeMeasure<Scalar>(std::move(a), 0, depth, x.rho());
}

}  // namespace

Eigen::MatrixXd SimilarityMap::linear_part() const {
  const auto d = translation.size();
  if (d == 1) return Eigen::MatrixXd::Constant(1, 1, reflect ? -ratio : ratio);
  Eigen::Matrix2d o = Eigen::Rotation2Dd(angle).toRotationMatrix();
  if (reflect) o = o * Eigen::Vector2d(1.0, -1.0).asDiagonal();
  return ratio * o;
}

int MeasureSpec::dim() const {
  return std::visit(
      [](const auto& s) -> int {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Product>) {
          return s.first->dim() + s.second->dim();
        } else if constexpr (std::is_same_v<T, BernoulliConvolution>) {
          return 1;
        } else {
          return s.dim;
        }
      },
      kind);
}

MeasureSpec make_product(MeasureSpec first, MeasureSpec second) {
  return MeasureSpec{Product{std::make_shared<const MeasureSpec>(std::move(first)),
                             std::make_shared<const MeasureSpec>(std::move(second))}};
}

MeasureSpec bernoulli_digits(int base, const std::vector<int>& digits, const std::vector<Rational>& probs) {
  BernoulliDigits s;
  s.base = base;
  for (int d : digits) s.digits.push_back({d, 0});
  s.probs = probs;
  return MeasureSpec{s};
}

MeasureSpec markov_digits(int base, const std::vector<int>& digits, const std::vector<std::vector<Rational>>& transition,
                          const std::vector<Rational>& initial) {
  MarkovDigits s;
  s.base = base;
  for (int d : digits) s.digits.push_back({d, 0});
  s.transition = transition;
  s.initial = initial;
  return MeasureSpec{s};
}

Rational decimal_rational(double x) {
  if (!std::isfinite(x)) throw ArgumentError(kModule, "non-finite number");
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return parse_rational(std::string(buf, ptr));
}

void validate_spec(const MeasureSpec& spec) {
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BernoulliDigits>) {
          check_digits(s.base, s.dim, s.digits);
          if (s.probs.size() != s.digits.size()) throw ArgumentError(kModule, "one probability per digit required");
          check_probability_vector(s.probs, "digit probability vector");
        } else if constexpr (std::is_same_v<T, MarkovDigits>) {
          check_digits(s.base, s.dim, s.digits);
          if (s.transition.size() != s.digits.size()) throw ArgumentError(kModule, "transition matrix must be square");
          for (const auto& row : s.transition) {
            if (row.size() != s.digits.size()) throw ArgumentError(kModule, "transition matrix must be square");
            check_probability_vector(row, "transition row");
          }
          if (s.initial.size() != s.digits.size()) throw ArgumentError(kModule, "one initial probability per digit");
          check_probability_vector(s.initial, "initial distribution");
        } else if constexpr (std::is_same_v<T, LinearIFS>) {
          if (s.dim != 1 && s.dim != 2) throw ArgumentError(kModule, "LinearIFS lives in dimension 1 or 2");
          if (s.maps.empty()) throw ArgumentError(kModule, "LinearIFS has no maps");
          if (s.weights.size() != s.maps.size()) throw ArgumentError(kModule, "one weight per map required");
          double total = 0.0;
          for (double w : s.weights) {
            if (!(w >= 0.0)) throw ArgumentError(kModule, "negative weight");
            total += w;
          }
          if (std::abs(total - 1.0) > 1e-12) throw ArgumentError(kModule, "weights do not sum to 1");
          for (const auto& m : s.maps) {
            if (!(m.ratio > 0.0 && m.ratio < 1.0)) throw ArgumentError(kModule, "contraction ratio outside (0,1)");
            if (m.translation.size() != s.dim) throw ArgumentError(kModule, "translation has the wrong dimension");
            if (s.dim == 1 && m.angle != 0.0) throw ArgumentError(kModule, "rotations need dimension 2");
          }
          if (s.strong_separation && !check_separation(s))
            throw ArgumentError(kModule, "declared strong separation fails: images of the attractor hull intersect");
        } else if constexpr (std::is_same_v<T, Product>) {
          if (!s.first || !s.second) throw ArgumentError(kModule, "product needs two components");
          validate_spec(*s.first);
          validate_spec(*s.second);
          if (spec.dim() > 2) throw ArgumentError(kModule, "products are limited to dimension 2");
        } else {
          if (!(s.t > 0.0 && s.t < 1.0)) throw ArgumentError(kModule, "contraction t outside (0,1)");
          if (!(s.p > 0.0 && s.p < 1.0)) throw ArgumentError(kModule, "sign weight p outside (0,1)");
          if (s.block < 1 || s.block > 30) throw ArgumentError(kModule, "block length outside [1,30]");
        }
      },
      spec.kind);
}

std::string describe(const MeasureSpec& spec) {
  std::ostringstream os;
  auto digits = [&](const std::vector<Digit>& ds, int dim) {
    os << '{';
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (i) os << ' ';
      if (dim == 1)
        os << ds[i][0];
      else
        os << '(' << ds[i][0] << ' ' << ds[i][1] << ')';
    }
    os << '}';
  };
  auto probs = [&](const std::vector<Rational>& p) {
    os << '{';
    for (std::size_t i = 0; i < p.size(); ++i) os << (i ? " " : "") << format_scalar(p[i]);
    os << '}';
  };
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BernoulliDigits>) {
          os << "bernoulli_digits(b=" << s.base << " D=";
          digits(s.digits, s.dim);
          os << " p=";
          probs(s.probs);
          os << ')';
        } else if constexpr (std::is_same_v<T, MarkovDigits>) {
          os << "markov_digits(b=" << s.base << " D=";
          digits(s.digits, s.dim);
          os << " T=";
          for (const auto& r : s.transition) probs(r);
          os << ')';
        } else if constexpr (std::is_same_v<T, LinearIFS>) {
          os << "linear_ifs(d=" << s.dim << " maps=" << s.maps.size() << ')';
        } else if constexpr (std::is_same_v<T, Product>) {
          os << "product(" << describe(*s.first) << " x " << describe(*s.second) << ')';
        } else {
          os << "bernoulli_convolution(t=" << s.t << " p=" << s.p << " N=" << s.block << ')';
        }
      },
      spec.kind);
  return os.str();
}

std::optional<BernoulliDigits> as_digit_system(const LinearIFS& ifs) {
  if (ifs.maps.empty()) return std::nullopt;
  int base = 0;
  if (!near_integer(1.0 / ifs.maps.front().ratio, base) || base < 2) return std::nullopt;
  std::map<Digit, Rational> weights;
  for (std::size_t i = 0; i < ifs.maps.size(); ++i) {
    const auto& m = ifs.maps[i];
    if (std::abs(m.ratio * base - 1.0) > 1e-12 || m.reflect) return std::nullopt;
    const double turns = m.angle / (2.0 * std::numbers::pi);
    if (std::abs(turns - std::round(turns)) > 1e-12) return std::nullopt;
    Digit d{0, 0};
    for (int j = 0; j < ifs.dim; ++j) {
      if (!near_integer(m.translation[j] * base, d[j]) || d[j] < 0 || d[j] >= base) return std::nullopt;
    }
    weights[d] += decimal_rational(ifs.weights[i]);
  }
  BernoulliDigits out;
  out.base = base;
  out.dim = ifs.dim;
  for (const auto& [d, w] : weights) {
    out.digits.push_back(d);
    out.probs.push_back(w);
  }
  return out;
}

bool has_exact_tree(const MeasureSpec& spec) {
  try {
    digit_coding(spec);
    return true;
  } catch (const UnsupportedExactRepresentationError&) {
    return false;
  }
}

DigitCoding digit_coding(const MeasureSpec& spec) {
  return std::visit(
      [&](const auto& s) -> DigitCoding {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BernoulliDigits> || std::is_same_v<T, MarkovDigits>) {
          return {s.base, s.dim};
        } else if constexpr (std::is_same_v<T, LinearIFS>) {
          auto d = as_digit_system(s);
          if (!d) throw UnsupportedExactRepresentationError(kModule, "LinearIFS is not digit-aligned; use the sampler");
          return {d->base, d->dim};
        } else if constexpr (std::is_same_v<T, Product>) {
          const auto a = digit_coding(*s.first), b = digit_coding(*s.second);
          if (a.base != b.base)
            throw UnsupportedExactRepresentationError(kModule, "product components use different bases");
          if (a.dim + b.dim > 2) throw UnsupportedExactRepresentationError(kModule, "product exceeds dimension 2");
          return {a.base, 2};
        } else {
          throw UnsupportedExactRepresentationError(kModule, "Bernoulli convolutions are sampler-only");
        }
      },
      spec.kind);
}

template <typename Scalar>
TreeMeasure<Scalar> build_tree(const MeasureSpec& spec, std::size_t depth) {
  validate_spec(spec);
  digit_coding(spec);
  return std::visit(
      [&](const auto& s) -> TreeMeasure<Scalar> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BernoulliDigits>) {
          return bernoulli_tree<Scalar>(s, depth);
        } else if constexpr (std::is_same_v<T, MarkovDigits>) {
          return markov_tree<Scalar>(s, depth);
        } else if constexpr (std::is_same_v<T, LinearIFS>) {
          return bernoulli_tree<Scalar>(*as_digit_system(s), depth);
        } else if constexpr (std::is_same_v<T, Product>) {
          return product_tree(build_tree<Scalar>(*s.first, depth), build_tree<Scalar>(*s.second, depth), depth);
        } else {
          throw UnsupportedExactRepresentationError(kModule, "Bernoulli convolutions are sampler-only");
        }
      },
      spec.kind);
}

template TreeMeasure<double> build_tree<double>(const MeasureSpec&, std::size_t);
template TreeMeasure<Rational> build_tree<Rational>(const MeasureSpec&, std::size_t);

Eigen::VectorXd sample_point(const MeasureSpec& spec, std::uint64_t seed, int precision_digits) {
  Rng rng(seed);
  Eigen::VectorXd x(spec.dim());
  sample_into(spec, rng, precision_digits, x.data());
  return x;
}

Eigen::MatrixXd sample_points(const MeasureSpec& spec, std::uint64_t seed, std::size_t count, int precision_digits) {
  Rng rng(seed);
  Eigen::MatrixXd out(spec.dim(), static_cast<Eigen::Index>(count));
  for (Eigen::Index i = 0; i < out.cols(); ++i) sample_into(spec, rng, precision_digits, out.col(i).data());
  return out;
}

double block_polynomial(const std::vector<int>& signs, double t) {
  double value = 0.0, power = 1.0;
  for (int u : signs) {
    value += u * power;
    power *= t;
  }
  return value;
}

Eigen::AlignedBox<double, Eigen::Dynamic> attractor_hull(const LinearIFS& ifs, int iterations) {
  const int d = ifs.dim;
  Eigen::AlignedBox<double, Eigen::Dynamic> hull(Eigen::VectorXd::Zero(d), Eigen::VectorXd::Ones(d));
  for (int it = 0; it < iterations; ++it) {
    Eigen::AlignedBox<double, Eigen::Dynamic> next(d);
    for (const auto& m : ifs.maps)
      for (int c = 0; c < (1 << d); ++c) {
        Eigen::VectorXd corner(d);
        for (int j = 0; j < d; ++j) corner[j] = (c >> j) & 1 ? hull.max()[j] : hull.min()[j];
        next.extend(m(corner));
      }
    hull = next;
  }
  return hull;
}

bool check_separation(const LinearIFS& ifs) {
  const auto hull = attractor_hull(ifs);
  const int d = ifs.dim;
  const double eps = 1e-12 * std::max(1.0, hull.diagonal().norm());
  std::vector<std::vector<Eigen::Vector2d>> polys;
  for (const auto& m : ifs.maps) {
    std::vector<Eigen::Vector2d> poly;
    const int order[4] = {0, 1, 3, 2};
    for (int c = 0; c < (1 << d); ++c) {
      const int cc = d == 2 ? order[c] : c;
      Eigen::VectorXd corner(d);
      for (int j = 0; j < d; ++j) corner[j] = (cc >> j) & 1 ? hull.max()[j] : hull.min()[j];
      const Eigen::VectorXd img = m(corner);
      poly.emplace_back(img[0], d == 2 ? img[1] : 0.0);
    }
    polys.push_back(std::move(poly));
  }
  auto separated = [&](const std::vector<Eigen::Vector2d>& a, const std::vector<Eigen::Vector2d>& b) {
    std::vector<Eigen::Vector2d> axes{{1.0, 0.0}, {0.0, 1.0}};
    for (const auto* p : {&a, &b})
      for (std::size_t i = 0; i < p->size(); ++i) {
        const Eigen::Vector2d e = (*p)[(i + 1) % p->size()] - (*p)[i];
        if (e.norm() == 0.0) continue;
        axes.push_back(e.normalized());
        axes.emplace_back(-e.y() / e.norm(), e.x() / e.norm());
      }
    for (const auto& ax : axes) {
      double amin = INFINITY, amax = -INFINITY, bmin = INFINITY, bmax = -INFINITY;
      for (const auto& v : a) amin = std::min(amin, v.dot(ax)), amax = std::max(amax, v.dot(ax));
      for (const auto& v : b) bmin = std::min(bmin, v.dot(ax)), bmax = std::max(bmax, v.dot(ax));
      if (amax < bmin - eps || bmax < amin - eps) return true;
    }
    return false;
  };
  for (std::size_t i = 0; i < polys.size(); ++i)
    for (std::size_t j = i + 1; j < polys.size(); ++j)
      if (!separated(polys[i], polys[j])) return false;
  return true;
}

Eigen::MatrixXd to_matrix(const std::vector<std::vector<Rational>>& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = to_double(rows[i][j]);
  return m;
}

Eigen::VectorXd stationary_vector(const Eigen::MatrixXd& transition) {
  const auto n = transition.rows();
  Eigen::MatrixXd a(n + 1, n);
  a.topRows(n) = transition.transpose() - Eigen::MatrixXd::Identity(n, n);
  a.row(n).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs[n] = 1.0;
  Eigen::VectorXd pi = a.colPivHouseholderQr().solve(rhs);
  return pi.cwiseMax(0.0) / pi.cwiseMax(0.0).sum();
}

DigitMeasureSummary analytic_summary(const MeasureSpec& spec) {
  validate_spec(spec);
  return std::visit(
      [&](const auto& s) -> DigitMeasureSummary {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BernoulliDigits>) {
          const double h = entropy_of(to_doubles(normalized(s.probs)));
          return {h, h / std::log(s.base), false};
        } else if constexpr (std::is_same_v<T, MarkovDigits>) {
          const Eigen::MatrixXd t = to_matrix(s.transition);
          const Eigen::VectorXd pi = stationary_vector(t);
          double h = 0.0;
          for (Eigen::Index i = 0; i < t.rows(); ++i) {
            double hi = 0.0;
            for (Eigen::Index j = 0; j < t.cols(); ++j)
              if (t(i, j) > 0) hi -= t(i, j) * std::log(t(i, j));
            h += pi[i] * hi;
          }
          return {h, h / std::log(s.base), false};
        } else if constexpr (std::is_same_v<T, LinearIFS>) {
          if (!s.strong_separation)
            throw ArgumentError(kModule, "analytic dimension needs a LinearIFS declared with strong separation");
          double plogp = 0.0, plogr = 0.0;
          for (std::size_t i = 0; i < s.maps.size(); ++i) {
            if (s.weights[i] <= 0) continue;
            plogp += s.weights[i] * std::log(s.weights[i]);
            plogr += s.weights[i] * std::log(s.maps[i].ratio);
          }
          return {-plogp, plogp / plogr, false};
        } else if constexpr (std::is_same_v<T, Product>) {
          const auto a = analytic_summary(*s.first), b = analytic_summary(*s.second);
          return {a.shannon_entropy_per_symbol + b.shannon_entropy_per_symbol,
                  a.analytic_dimension + b.analytic_dimension, true};
        } else {
          if (s.t > 0.5) throw ArgumentError(kModule, "no closed-form dimension for t > 1/2");
          const double h = entropy_of({s.p, 1.0 - s.p});
          return {h, h / std::log(1.0 / s.t), false};
        }
      },
      spec.kind);
}

}  // namespace fracproj
