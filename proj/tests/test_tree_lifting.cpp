#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fracproj/errors.hpp"
#include "fracproj/measure_zoo.hpp"
#include "fracproj/tree_lifting.hpp"

#include <cmath>
#include <set>
#include <sstream>

using namespace fracproj;

namespace {

Cube unit(int k) { return Cube{Eigen::VectorXd::Zero(k), Eigen::VectorXd::Ones(k)}; }

int multiplicity_at(const std::vector<Cube>& cubes, const Eigen::VectorXd& p) {
  int count = 0;
  for (const auto& c : cubes) count += c.contains(p);
  return count;
}

MeasureSpec cantor() { return bernoulli_digits(3, {0, 2}, {Rational(1, 2), Rational(1, 2)}); }

}  // namespace

TEST_CASE("cover cubes") {
  const auto one = cover_cube(unit(1), 2);
  REQUIRE(one.size() == 4);
  const double lo[4] = {0.0, 0.25, 0.5, 0.75}, hi[4] = {0.5, 0.75, 1.0, 1.0};
  for (int i = 0; i < 4; ++i) {
    CHECK(one[i].lo(0) == lo[i]);
    CHECK(one[i].hi(0) == hi[i]);
  }
  const auto degenerate = cover_cube(unit(1), 1);
  REQUIRE(degenerate.size() == 2);
  CHECK(degenerate[0].lo(0) == 0.0);
  CHECK(degenerate[0].hi(0) == 1.0);
  CHECK(degenerate[1].lo(0) == 0.5);
  CHECK(degenerate[1].hi(0) == 1.0);

  const auto sq = cover_cube(unit(2), 2);
  REQUIRE(sq.size() == 16);
  int worst = 0;
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j) {
      Eigen::VectorXd p(2);
      p << (i + 0.5) / 64, (j + 0.5) / 64;
      worst = std::max(worst, multiplicity_at(sq, p));
    }
  CHECK(worst <= 5);

  for (int N : {1, 2, 3, 5}) {
    const auto line = cover_cube(unit(1), N);
    CHECK(line.size() == static_cast<std::size_t>(2 * N));
    for (int i = 0; i < 1000; ++i) {
      Eigen::VectorXd p(1);
      p << (i + 0.5) / 1000;
      CHECK(multiplicity_at(line, p) <= 3);
    }
    // every sub-interval of length 1/(2N) lies in some cover interval
    for (int i = 0; i <= 200; ++i) {
      const double start = (1.0 - 1.0 / (2 * N)) * i / 200.0;
      Cube small{Eigen::VectorXd::Constant(1, start), Eigen::VectorXd::Constant(1, start + 1.0 / (2 * N))};
      CHECK(std::any_of(line.begin(), line.end(), [&](const Cube& c) { return c.contains(small); }));
    }
  }
}

TEST_CASE("choice of N_n") {
  for (double rho : {0.5, 1.0 / 3, 0.4, 0.3, 0.45}) {
    const auto N = choose_N(rho, 30);
    double P = 1.0;
    for (std::size_t n = 1; n <= 30; ++n) {
      const int base = static_cast<int>(std::floor(1.0 / rho + 1e-12));
      CHECK((N[n] == base || N[n] == base + 1));
      P *= N[n];
      const double scaled = std::pow(rho, n) * P;
      CHECK(scaled >= 0.5 - 1e-9);
      CHECK(scaled <= 1.0 + 1e-9);
    }
  }
  CHECK(choose_N(1.0 / 3, 5) == std::vector<int>{1, 3, 3, 3, 3, 3});
  CHECK_THROWS_AS(choose_N(0.6, 3), ArgumentError);
}

TEST_CASE("identity and constant lifts") {
  const auto id = lift(coding_map(2, 1), 8);
  CHECK(id.levels[8].size() == 256);
  CHECK(check_morphism(id));
  CHECK(check_containment(id));
  const auto faith = faithfulness_check(id, 8);
  CHECK(faith.ok);
  CHECK(faith.C <= 8);
  CHECK(faith.C_mult <= 3);
  for (std::size_t n = 2; n + 1 < faith.decay_per_level.size(); ++n)
    CHECK(faith.decay_per_level[n + 1] <= faith.decay_per_level[n] + 1e-12);
  for (std::size_t n = 0; n <= 8; ++n) CHECK(id.branching(n == 0 ? 1 : n) == 4);

  Eigen::VectorXd point(1);
  point << 0.3;
  const auto constant = lift(constant_map(3, 1.0 / 3, point), 5);
  for (const auto& level : constant.levels) {
    std::set<Word> images;
    for (const auto& node : level) images.insert(node.g);
    CHECK(images.size() == 1);
  }

  CylinderMap broken = coding_map(2, 1);
  broken.cube = [](WordView a) {
    const double h = std::pow(0.5, a.size());
    Eigen::VectorXd lo = Eigen::VectorXd::Constant(1, a.empty() ? 0.0 : 5.0);
    return Cube{lo, lo.array() + h};
  };
  CHECK_THROWS_AS(lift(broken, 3), ConstructionViolationError);
}

TEST_CASE("faithfulness of b-adic codings") {
  for (int d : {1, 2})
    for (int p : {2, 3}) {
      const auto r = faithfulness_check(coding_families(p, d, 3), 1.0 / p, 1 << d);
      CHECK(r.C_mult == (1 << d));
      CHECK(r.C == (1 << d));
      CHECK(r.ok);
    }
  // all sub-cubes identical: multiplicity explodes
  CubeLevels bad(2);
  for (std::size_t n = 0; n < 2; ++n) {
    const double h = std::pow(0.5, n + 1);
    bad[n].push_back(CubeFamily{unit(2), std::vector<Cube>(16, Cube{Eigen::VectorXd::Zero(2), Eigen::VectorXd::Constant(2, h)})});
  }
  CHECK_FALSE(faithfulness_check(bad, 0.5, 5).ok);
}

TEST_CASE("entropy defect") {
  const auto uniform = build_tree<double>(bernoulli_digits(2, {0, 1}, {Rational(1, 2), Rational(1, 2)}), 12);
  const auto id = lift(coding_map(2, 1), 8);
  const auto d = entropy_defect(id, uniform, 8);
  for (double v : d.per_level) CHECK(v <= std::log(3.0) + 1e-12);

  const auto point = build_tree<double>(bernoulli_digits(2, {1}, {Rational(1)}), 12);
  const auto lp = lift(coding_map(2, 1), 6, &point);
  CHECK(lp.levels[6].size() == 1);
  CHECK(entropy_defect(lp, point, 6).max_defect == 0.0);

  const auto cc = build_tree<double>(make_product(cantor(), cantor()), 12);
  const auto pi1 = lift(linear_map(3, 0.5, 0.5), 8, &cc);
  CHECK(pi1.levels[8].size() == 65536);
  CHECK(check_morphism(pi1));
  CHECK(check_containment(pi1));
  CHECK(faithfulness_check(pi1, 8).C_mult <= 3);
  const auto upto3 = entropy_defect(pi1, cc, 3);
  const auto upto8 = entropy_defect(pi1, cc, 8);
  CHECK(upto8.max_defect <= upto3.max_defect + 0.2);

  std::ostringstream os;
  write_report(os, pi1, faithfulness_check(pi1, 8), upto8);
  CHECK(os.str().find("level,N,P,branching,nodes,multiplicity,decay,defect") != std::string::npos);
  CHECK_THROWS_AS(entropy_defect(pi1, cc, 9), DepthExceededError);
}
