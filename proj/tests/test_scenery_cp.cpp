#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fracproj/errors.hpp"
#include "fracproj/projection_scan.hpp"
#include "fracproj/scenery_cp.hpp"
#include "fracproj/stats.hpp"

#include <cmath>
#include <sstream>

using namespace fracproj;

namespace {

const double kLog3 = std::log(3.0);

MeasureSpec cantor() { return bernoulli_digits(3, {0, 2}, {Rational(1, 2), Rational(1, 2)}); }
MeasureSpec uniform(int b) {
  std::vector<int> d(b);
  std::vector<Rational> p(b, Rational(1, b));
  for (int i = 0; i < b; ++i) d[i] = i;
  return bernoulli_digits(b, d, p);
}
MeasureSpec biased(int b, std::vector<int> digits) {
  return bernoulli_digits(b, std::move(digits), {Rational(9, 10), Rational(1, 10)});
}

TreeMeasure<double> lebesgue2() { return build_tree<double>(make_product(uniform(2), uniform(2)), kChainDepth); }

double log_mass_functional(const CPState&, const StepRecord& r) { return r.log_mass; }

/// e_q of Lebesgue on the square under x + s y: the image density is the
/// convolution of U[0,1] and U[0,|s|], whose differential entropy is
/// log max(1,|s|) + min(1,|s|) / (2 max(1,|s|)).
double lebesgue_e_q(double s, int q) {
  const double a = std::max(1.0, std::abs(s)), b = std::min(1.0, std::abs(s));
  return 1.0 + (std::log(a) + b / (2.0 * a)) / (q * std::log(2.0));
}

/// Equality of `a` with `b` cut to the depth of `a`.
bool same_as(const TreeMeasure<double>& a, const TreeMeasure<double>& b) {
  return same_measure(a, b.at_state(b.root(), a.depth()));
}

}  // namespace

TEST_CASE("sceneries of digit trees") {
  const auto tm = build_tree<double>(biased(2, {0, 1}), 30);
  const Word path = parse_word("0110100111");
  for (std::size_t n : {0u, 1u, 4u, 10u}) CHECK(same_as(scenery(tm, path, n), tm));

  const auto markov = build_tree<double>(markov_digits(3, {0, 1, 2}, {{Rational(1, 2), Rational(1, 4), Rational(1, 4)},
                                                                      {Rational(0), Rational(1, 3), Rational(2, 3)},
                                                                      {Rational(1, 5), Rational(0), Rational(4, 5)}},
                                                      {Rational(1, 3), Rational(1, 3), Rational(1, 3)}),
                                         20);
  for (const char* text : {"0220", "0011", "0122"}) {
    const Word p = parse_word(text);
    const auto s = scenery(markov, p, p.size());
    CHECK(same_measure(s, markov.at_state(1 + p.back(), 16)));
  }
  CHECK_THROWS_AS(scenery(markov, parse_word("21"), 2), UndefinedConditionalError);

  // point mass at 0: every scenery is the point mass at the corner
  const auto point = build_tree<double>(bernoulli_digits(2, {0}, {Rational(1)}), 10);
  CHECK(same_as(scenery(point, parse_word("0000"), 3), point));
}

TEST_CASE("single CP transitions") {
  const auto leb = tree_state(lebesgue2());
  const auto masses = child_masses(leb, PartitionOperator::base_b(2));
  REQUIRE(masses.size() == 4);
  for (double m : masses) CHECK(m == doctest::Approx(0.25));
  const auto t = cp_step(leb, PartitionOperator::base_b(2), std::uint64_t{7});
  CHECK(same_as(std::get<TreeMeasure<double>>(t.next.measure), std::get<TreeMeasure<double>>(leb.measure)));
  CHECK(t.record.log_mass == doctest::Approx(std::log(0.25)));

  const auto point = tree_state(build_tree<double>(bernoulli_digits(3, {1}, {Rational(1)}), 100));
  Rng rng(3);
  CPState s = point;
  for (int n = 0; n < 20; ++n) {
    const auto step = cp_step(s, PartitionOperator::base_b(3), rng);
    CHECK(step.record.child == 1);
    CHECK(step.record.log_mass == 0.0);
    s = step.next;
  }

  const auto c = tree_state(build_tree<double>(cantor(), kChainDepth));
  const auto cm = child_masses(c, PartitionOperator::base_b(3));
  CHECK(cm == std::vector<double>{0.5, 0.0, 0.5});
  const auto run = cp_run(c, 1000, PartitionOperator::base_b(3), {}, 11);
  std::size_t zeros = 0;
  for (const auto& r : run.steps) {
    CHECK(r.child != 1);
    zeros += r.child == 0;
  }
  CHECK(zeros > 400);
  CHECK(zeros < 600);

  CHECK_THROWS_AS(cp_step(c, PartitionOperator::base_b(2), std::uint64_t{1}), ArgumentError);
  GridMeasure leaky = grid_1d(2, 3, 0, Eigen::ArrayXd::Constant(8, 0.9 / 8));
  CHECK_THROWS_AS(cp_step(CPState{leaky, Box::unit(1), std::nullopt}, PartitionOperator::base_b(2), std::uint64_t{1}),
                  ConsistencyError);
}

TEST_CASE("grid states") {
  GridMeasure g;
  g.dim = 2;
  g.base = 2;
  g.level = 3;
  g.mass = Eigen::ArrayXXd::Zero(8, 8);
  g.mass(1, 6) = 0.25;  // child (0, 1) -> index 2
  g.mass(5, 2) = 0.75;  // child (1, 0) -> index 1
  const auto s = grid_state(g);
  const auto m = child_masses(s, PartitionOperator::base_b(2));
  CHECK(m == std::vector<double>{0.0, 0.75, 0.25, 0.0});
  const auto next = descend(s, PartitionOperator::base_b(2), 2);
  const auto& ng = std::get<GridMeasure>(next.measure);
  CHECK(ng.level == 2);
  CHECK(ng.mass(1, 2) == 1.0);
  CHECK_THROWS_AS(descend(s, PartitionOperator::base_b(2), 0), UndefinedConditionalError);
}

TEST_CASE("chain averages and dimension") {
  const auto op2 = PartitionOperator::base_b(2);
  const auto run = cp_run(tree_state(lebesgue2()), 500, op2,
                          {{"one", [](const CPState&, const StepRecord&) { return 1.0; }}, {"log_mass", log_mass_functional}}, 5);
  CHECK(run.average(0) == 1.0);
  CHECK(run.average(1) == doctest::Approx(std::log(0.25)));
  CHECK(run.running_average(0).back() == 1.0);
  const auto lebdim = chain_dimension(run, 0.5);
  CHECK(std::abs(lebdim.value - 2.0) <= 1e-9);

  const auto crun = cp_run(tree_state(build_tree<double>(cantor(), kChainDepth)), 10000, PartitionOperator::base_b(3), {}, 9);
  const auto cdim = chain_dimension(crun, 1.0 / 3);
  CHECK(std::abs(cdim.value - std::log(2.0) / kLog3) <= 2 * cdim.std_error + 1e-12);

  const auto prod = make_product(biased(2, {0, 1}), uniform(2));
  const auto prun = cp_run(tree_state(build_tree<double>(prod, kChainDepth)), 10000, op2, {}, 21);
  const auto pdim = chain_dimension(prun, 0.5);
  const double expected = analytic_summary(prod).analytic_dimension;
  CHECK(std::abs(pdim.value - expected) <= 2 * pdim.std_error);
  CHECK(pdim.std_error > 0.0);

  std::ostringstream os;
  run.write_csv(os);
  CHECK(os.str().rfind("step,chosen_child,log_mass,one,log_mass\n0,", 0) == 0);
  CHECK_THROWS_AS(cp_run(tree_state(lebesgue2()), 0, op2, {}, 1), ArgumentError);

  // Same seed, same run.
  const auto again = cp_run(tree_state(build_tree<double>(prod, kChainDepth)), 10000, op2, {}, 21);
  for (std::size_t n = 0; n < again.length(); ++n) REQUIRE(again.steps[n].child == prun.steps[n].child);
}

TEST_CASE("x2x3 chain") {
  const auto flat = x2x3_initial(uniform(2), uniform(3), 0.0, 1);
  const auto& sp = std::get<ScaledProduct>(flat.measure);
  CHECK(sp.sx == 1.0);
  CHECK(sp.sy == 1.0);
  CHECK(flat.box.is_cube());
  CHECK_THROWS_AS(x2x3_initial(uniform(3), uniform(2), 0.0, 1), ArgumentError);
  CHECK_THROWS_AS(x2x3_initial(uniform(2), make_product(uniform(3), uniform(3)), 0.0, 1), ArgumentError);

  // Markov past: the factor is the conditional measure after the last symbol.
  const auto nu_spec = markov_digits(3, {0, 2}, {{Rational(4, 5), Rational(1, 5)}, {Rational(3, 10), Rational(7, 10)}},
                                     {Rational(1, 2), Rational(1, 2)});
  const auto nu_tree = build_tree<double>(nu_spec, kChainDepth);
  std::size_t after_zero = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto s = x2x3_initial(uniform(2), nu_spec, std::nullopt, seed);
    const auto& y = std::get<ScaledProduct>(s.measure).y_factor;
    const auto r0 = restrict(nu_tree, parse_word("020"));
    const auto r2 = restrict(nu_tree, parse_word("002"));
    const bool zero = same_measure(y, r0.at_state(r0.root(), y.depth()));
    const bool two = same_measure(y, r2.at_state(r2.root(), y.depth()));
    CHECK(zero != two);
    after_zero += zero;
    CHECK(*s.w >= 0.0);
    CHECK(*s.w < kLog3);
  }
  // stationary law of the last symbol is (3/5, 2/5)
  CHECK(std::abs(after_zero / 200.0 - 0.6) < 0.1);

  const auto init = x2x3_initial(biased(2, {0, 1}), biased(3, {0, 2}), std::nullopt, 77);
  const auto run = cp_run(init, 100000, PartitionOperator::rw(),
                          {{"w", [](const CPState& s, const StepRecord&) { return *s.w; }},
                           {"total", [](const CPState& s, const StepRecord&) {
                              double t = 0.0;
                              for (double m : child_masses(s, PartitionOperator::rw())) t += m;
                              return t;
                            }}},
                          3);
  CHECK(std::abs(run.average(0) - kLog3 / 2) <= 0.01);
  std::vector<double> orbit(run.values[0]);
  for (auto& v : orbit) v /= kLog3;
  CHECK(star_discrepancy(orbit) <= 0.02);
  for (double t : run.values[1]) REQUIRE(std::abs(t - 1.0) <= 1e-9);
  for (const auto& r : run.steps) REQUIRE(r.log_mass <= 0.0);

  // Replaying the recorded children reproduces the final eccentricity.
  std::vector<int> children;
  for (std::size_t n = 0; n < 50; ++n) children.push_back(run.steps[n].child);
  const auto replay = scenery(init, children, PartitionOperator::rw());
  CHECK(*replay.w == doctest::Approx(run.values[0][50]));
  CHECK(replay.box.volume() == doctest::Approx(1.0));
}

TEST_CASE("projection estimates") {
  EstimatorConfig cfg;
  cfg.q = 8;
  cfg.n_scenery = 20;
  cfg.n_samples = 8;
  cfg.seed = 4;
  const auto leb = make_product(uniform(2), uniform(2));
  const auto l = projection_dim_lower(leb, Projection::with_slope(0.5), cfg);
  CHECK(std::abs(l.estimate - lebesgue_e_q(0.5, 8)) <= 0.005);
  CHECK(l.std_error == 0.0);
  CHECK(l.method == "tree");
  CHECK(l.caveat.find("q=8") != std::string::npos);

  const auto cc = make_product(cantor(), cantor());
  CHECK(projection_dim_lower(cc, Projection::with_slope(1.0), cfg).estimate >= 0.95);

  const auto ax = projection_dim_lower(make_product(cantor(), uniform(3)), Projection::axis_x(), cfg);
  CHECK(std::abs(ax.estimate - std::log(2.0) / kLog3) <= 0.03);

  const auto scan = scan_slopes(leb, {0.5, 1.0, 2.0}, cfg);
  REQUIRE(scan.rows.size() == 3);
  for (const auto& r : scan.rows) CHECK(std::abs(r.result.estimate - lebesgue_e_q(r.slope, 8)) <= 0.005);
  // the raw estimator grows with the image length, so small slopes get flagged
  for (const auto& r : scan.rows)
    CHECK(r.flagged == (lebesgue_e_q(r.slope, 8) < lebesgue_e_q(2.0, 8) - 0.05));
  std::ostringstream os;
  scan.write_csv(os);
  CHECK(os.str().rfind("slope,estimate,stderr,q,N,n_samples,seed,flagged\n0.5,", 0) == 0);

  EstimatorConfig small = cfg;
  small.n_samples = 4;
  small.n_scenery = 5;
  const auto x2x3 = projection_dim_lower(make_product(uniform(2), uniform(3)), Projection::with_slope(1.0), small);
  CHECK(x2x3.method == "x2x3-chain");
  CHECK(x2x3.estimate >= 0.97);
  CHECK(x2x3.estimate <= lebesgue_e_q(1.0, 8) + 0.1);

  BernoulliConvolution bc;
  const auto sampled = projection_dim_lower(MeasureSpec{bc}, Projection::axis_x(), small, PartitionOperator::base_b(2));
  CHECK(sampled.method == "sampler");
  // level 0 sees U[-2,2], which adds log 4 / (8 log 2); deeper cells are uniform
  const double levels = static_cast<double>(sampled.n_scenery);
  CHECK(std::abs(sampled.estimate - (levels + 0.25) / levels) <= 0.02);

  const auto grid = symmetric_slope_grid(0.1, 2.0, 10);
  REQUIRE(grid.size() == 20);
  CHECK(grid.front() == doctest::Approx(-2.0));
  CHECK(grid[9] == doctest::Approx(-0.1));
  CHECK(grid[10] == doctest::Approx(0.1));
}
