#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fracproj/tree_measure.hpp"

#include <cmath>
#include <map>
#include <sstream>

using namespace fracproj;

namespace {

/// One-state automaton: i.i.d. symbols with the given law.
template <typename Scalar>
TreeMeasure<Scalar> iid(const std::vector<Scalar>& p, std::size_t depth) {
  TreeAutomaton<Scalar> a;
  a.alphabet_size = p.size();
  a.probs = p;
  for (const auto& x : p) a.next.push_back(x == Scalar(0) ? TreeAutomaton<Scalar>::kNone : 0);
  return TreeMeasure<Scalar>(a, 0, depth, 1.0 / static_cast<double>(p.size()));
}

/// Markov chain on symbols {0..n-1}: state 0 is the start, state 1+i follows symbol i.
template <typename Scalar>
TreeMeasure<Scalar> markov(const std::vector<std::vector<Scalar>>& t, const std::vector<Scalar>& init,
                           std::size_t depth) {
  const std::size_t n = init.size();
  TreeAutomaton<Scalar> a;
  a.alphabet_size = n;
  auto row = [&](const std::vector<Scalar>& r) {
    for (std::size_t j = 0; j < n; ++j) {
      a.probs.push_back(r[j]);
      a.next.push_back(r[j] == Scalar(0) ? TreeAutomaton<Scalar>::kNone : static_cast<std::uint32_t>(1 + j));
    }
  };
  row(init);
  for (const auto& r : t) row(r);
  return TreeMeasure<Scalar>(a, 0, depth, 1.0 / static_cast<double>(n));
}

/// Explicit table of the uniform binary measure.
std::map<Word, Rational> uniform_binary_masses(std::size_t depth) {
  std::map<Word, Rational> m;
  for (std::size_t len = 0; len <= depth; ++len)
    for (std::size_t code = 0; code < (std::size_t{1} << len); ++code) {
      Word w;
      for (std::size_t i = 0; i < len; ++i) w.push_back((code >> (len - 1 - i)) & 1);
      m[w] = Rational(1, std::int64_t{1} << len);
    }
  return m;
}

double shannon(const std::vector<double>& p) {
  double h = 0.0;
  for (double x : p)
    if (x > 0) h -= x * std::log(x);
  return h;
}

}  // namespace

TEST_CASE("cylinder masses") {
  const auto uniform = TreeMeasure<Rational>::from_masses(2, 6, 0.5, uniform_binary_masses(6));
  CHECK(cylinder_mass(uniform, parse_word("01")) == Rational(1, 4));
  CHECK(cylinder_mass(uniform, Word{}) == 1);

  const auto b = iid<Rational>({Rational(9, 10), Rational(1, 10)}, 10);
  CHECK(cylinder_mass(b, parse_word("00")) == Rational(81, 100));
  CHECK(cylinder_mass(iid<double>({0.9, 0.1}, 10), parse_word("00")) == doctest::Approx(0.81).epsilon(1e-15));

  const auto cantor = iid<Rational>({Rational(1, 2), Rational(0), Rational(1, 2)}, 5);
  CHECK(cylinder_mass(cantor, parse_word("01")) == 0);
  CHECK(cylinder_mass(cantor, parse_word("02")) == Rational(1, 4));

  CHECK_THROWS_AS(cylinder_mass(b, Word(11, 0)), DepthExceededError);
}

TEST_CASE("mass conservation is enforced") {
  auto masses = uniform_binary_masses(3);
  masses[parse_word("010")] = Rational(1, 7);
  CHECK_THROWS_AS(TreeMeasure<Rational>::from_masses(2, 3, 0.5, masses), ConsistencyError);

  TreeAutomaton<double> a;
  a.alphabet_size = 2;
  a.probs = {0.5, 0.4};
  a.next = {0, 0};
  CHECK_THROWS_AS(TreeMeasure<double>(a, 0, 4, 0.5), ConsistencyError);
}

TEST_CASE("child distributions") {
  const auto b = iid<double>({0.9, 0.1}, 10);
  for (const char* a : {"", "0", "1011", "111"}) {
    const auto d = child_distribution(b, parse_word(a));
    CHECK(d.probs[0] == doctest::Approx(0.9));
    CHECK(d.probs[1] == doctest::Approx(0.1));
  }

  const auto point = iid<Rational>({Rational(1), Rational(0)}, 10);
  const auto d = child_distribution(point, parse_word("00"));
  CHECK(d.probs[0] == 1);
  CHECK(d.probs[1] == 0);
  CHECK_THROWS_AS(child_distribution(point, parse_word("01")), UndefinedConditionalError);

  const std::vector<std::vector<Rational>> t{{Rational(4, 5), Rational(1, 5)}, {Rational(3, 10), Rational(7, 10)}};
  const auto m = markov<Rational>(t, {Rational(1, 2), Rational(1, 2)}, 10);
  for (const char* a : {"0", "10", "110", "1"}) {
    const Word w = parse_word(a);
    const auto row = child_distribution(m, w);
    CHECK(row.probs == t[w.back()]);
  }
}

TEST_CASE("information") {
  const auto u = iid<double>({0.5, 0.5}, 20);
  const Word w = parse_word("0110100");
  for (std::size_t n = 1; n <= w.size(); ++n) CHECK(information(u, w, n) == doctest::Approx(std::log(2.0)));

  const auto point = iid<double>({0.0, 1.0}, 20);
  CHECK(information(point, parse_word("1111"), 3) == 0.0);
  CHECK_THROWS_AS(information(point, parse_word("01"), 1), InfiniteInformationError);

  const auto b = iid<double>({0.9, 0.1}, 20);
  CHECK(information(b, parse_word("001"), 3) == doctest::Approx(-std::log(0.1)));
  CHECK(information(b, parse_word("1"), 1) == doctest::Approx(2.302585).epsilon(1e-6));
}

TEST_CASE("information additivity on sampled words") {
  const std::vector<std::vector<double>> t{{0.2, 0.5, 0.3}, {0.6, 0.1, 0.3}, {0.05, 0.05, 0.9}};
  const auto m = markov<double>(t, {0.3, 0.3, 0.4}, 200);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Word w = sample_path(m, seed, 200);
    double sum = 0.0;
    for (std::size_t k = 1; k <= w.size(); ++k) sum += information(m, w, k);
    // direct product of the transition probabilities, as the oracle
    double log_mass = std::log(std::vector<double>{0.3, 0.3, 0.4}[w[0]]);
    for (std::size_t k = 1; k < w.size(); ++k) log_mass += std::log(t[w[k - 1]][w[k]]);
    CHECK(sum == doctest::Approx(-log_mass).epsilon(1e-12));
    CHECK(std::abs(-std::log(cylinder_mass(m, Word(w.begin(), w.begin() + 60))) -
                   [&] {
                     double s = 0.0;
                     for (std::size_t k = 1; k <= 60; ++k) s += information(m, w, k);
                     return s;
                   }()) < 1e-9);
  }
}

TEST_CASE("child entropy") {
  const auto u = iid<double>({0.5, 0.5}, 10);
  CHECK(child_entropy(u, parse_word("0101")) == doctest::Approx(std::log(2.0)));
  const auto point = iid<double>({1.0, 0.0}, 10);
  CHECK(child_entropy(point, parse_word("000")) == 0.0);
  const auto b = iid<double>({0.9, 0.1}, 10);
  CHECK(child_entropy(b, Word{}) == doctest::Approx(shannon({0.9, 0.1})));
  CHECK(child_entropy(b, Word{}) == doctest::Approx(0.325083).epsilon(1e-6));

  // bounds on every state of a random table
  Rng rng(7);
  std::map<Word, double> masses;
  std::function<void(const Word&, double)> fill = [&](const Word& w, double m) {
    masses[w] = m;
    if (w.size() == 5) return;
    std::vector<double> p(4);
    double s = 0.0;
    for (auto& x : p) s += x = rng.uniform() < 0.3 ? 0.0 : rng.uniform();
    if (s == 0.0) p[0] = s = 1.0;
    double acc = 0.0;
    for (Symbol b = 0; b < 4; ++b) {
      Word c = w;
      c.push_back(b);
      const double cm = b == 3 ? m - acc : m * p[b] / s;
      acc += cm;
      fill(c, std::max(0.0, cm));
    }
  };
  fill(Word{}, 1.0);
  const auto tm = TreeMeasure<double>::from_masses(4, 5, 0.5, masses);
  for (const auto& [w, m] : masses) {
    if (w.size() == 5 || m <= 1e-300) continue;
    const double h = child_entropy(tm, w);
    CHECK(h >= 0.0);
    CHECK(h <= std::log(4.0) + 1e-15);
  }
}

TEST_CASE("sample paths") {
  const auto ones = iid<double>({0.0, 1.0}, 30);
  CHECK(sample_path(ones, 123, 30) == Word(30, 1));
  const auto zeros = iid<double>({1.0, 0.0}, 30);
  CHECK(sample_path(zeros, 5, 17) == Word(17, 0));

  const auto u = iid<double>({0.5, 0.5}, 64);
  CHECK(sample_path(u, 2024, 24) == parse_word("110000110111110001101001"));
  CHECK(sample_path(u, 99, 40) == sample_path(u, 99, 40));
  CHECK(sample_path(u, 99, 40) != sample_path(u, 100, 40));

  // symbol frequencies follow the law
  const auto b = iid<double>({0.9, 0.1}, 10000);
  const Word w = sample_path(b, 3, 10000);
  const double ones_frac = std::count(w.begin(), w.end(), 1) / 10000.0;
  CHECK(std::abs(ones_frac - 0.1) < 4.0 * std::sqrt(0.09 / 10000.0));
}

TEST_CASE("local entropy averages") {
  const auto u = iid<double>({0.5, 0.5}, 30);
  CHECK(local_entropy_average(u, parse_word("0110")).value == doctest::Approx(std::log(2.0)));
  const auto b = iid<double>({0.9, 0.1}, 30);
  CHECK(local_entropy_average(b, parse_word("00010")).value == doctest::Approx(shannon({0.9, 0.1})));
  const auto empty = local_entropy_average(b, Word{});
  CHECK(empty.empty);
  CHECK(empty.value == 0.0);
  CHECK_FALSE(local_entropy_average(b, parse_word("0")).empty);
}

TEST_CASE("dimension lower estimates") {
  const auto u = iid<double>({0.5, 0.5}, 500);
  const auto du = dim_lower_estimate(u, 20, 500, 1);
  CHECK(du.mean == doctest::Approx(1.0));
  CHECK(du.lln_diagnostic == 0.0);

  const auto cantor = iid<double>({0.5, 0.0, 0.5}, 500);
  CHECK(dim_lower_estimate(cantor, 20, 500, 1).mean == doctest::Approx(std::log(2.0) / std::log(3.0)));

  const auto b = iid<double>({0.9, 0.1}, 2000);
  const auto db = dim_lower_estimate(b, 100, 2000, 11);
  CHECK(db.mean == doctest::Approx(shannon({0.9, 0.1}) / std::log(2.0)).epsilon(1e-9));
  CHECK(db.lln_diagnostic < 0.05);

  CHECK_THROWS_AS(dim_lower_estimate(b, 0, 10, 1), ArgumentError);
  CHECK_THROWS_AS(dim_lower_estimate(b, 1, 2001, 1), DepthExceededError);
}

TEST_CASE("restriction") {
  const auto b = iid<Rational>({Rational(9, 10), Rational(1, 10)}, 12);
  const auto shorter = iid<Rational>({Rational(9, 10), Rational(1, 10)}, 9);
  CHECK(same_measure(restrict(b, parse_word("010")), shorter));
  CHECK(restrict(b, parse_word("010")).depth() == 9);

  const auto point = iid<Rational>({Rational(0), Rational(1)}, 8);
  const auto rp = restrict(point, parse_word("11"));
  CHECK(cylinder_mass(rp, Word(6, 1)) == 1);
  CHECK_THROWS_AS(restrict(point, parse_word("0")), UndefinedConditionalError);

  const std::vector<std::vector<Rational>> t{{Rational(4, 5), Rational(1, 5)}, {Rational(3, 10), Rational(7, 10)}};
  const auto m = markov<Rational>(t, {Rational(1, 2), Rational(1, 2)}, 12);
  for (Symbol i : {0u, 1u}) {
    const auto started = markov<Rational>(t, t[i], 10);
    CHECK(same_measure(restrict(m, Word{1, i}), started));
  }
  CHECK_FALSE(same_measure(restrict(m, Word{1, 0}), markov<Rational>(t, t[1], 10)));
}

TEST_CASE("text round trip") {
  const std::vector<std::vector<Rational>> t{{Rational(4, 5), Rational(1, 5)}, {Rational(1, 3), Rational(2, 3)}};
  const auto m = markov<Rational>(t, {Rational(1, 2), Rational(1, 2)}, 4);
  std::stringstream ss;
  write_text(ss, m, 4);
  const auto back = read_text<Rational>(ss);
  for (const auto& [w, mass] : positive_words(m, 4)) CHECK(cylinder_mass(back, w) == mass);
  CHECK(back.depth() == 4);

  std::stringstream line(
      "# alphabet 2 depth 1 rho 0.5\n"
      "\t1\n0\t0.25\n1\t3/4\n");
  const auto parsed = read_text<Rational>(line);
  CHECK(cylinder_mass(parsed, parse_word("1")) == Rational(3, 4));
}

TEST_CASE("rational parsing") {
  CHECK(parse_rational("3/4") == Rational(3, 4));
  CHECK(parse_rational("0.125") == Rational(1, 8));
  CHECK(parse_rational("-2.5e-1") == Rational(-1, 4));
  CHECK(parse_rational("12") == 12);
  CHECK_THROWS_AS(parse_rational("x"), ArgumentError);
}
