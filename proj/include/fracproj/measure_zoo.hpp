#pragma once

#include "fracproj/rational.hpp"
#include "fracproj/tree_measure.hpp"

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace fracproj {

/// A digit of a base-b expansion in dimension 1 or 2 (y ignored when d = 1).
using Digit = std::array<int, 2>;

/// i.i.d. digits drawn from `digits` with probabilities `probs`.
struct BernoulliDigits {
  int base = 2;
  int dim = 1;
  std::vector<Digit> digits;
  std::vector<Rational> probs;
};

/// Digits forming a Markov chain on `digits`: row i of `transition` is the
/// law of the digit following digits[i]; `initial` is the law of the first.
struct MarkovDigits {
  int base = 2;
  int dim = 1;
  std::vector<Digit> digits;
  std::vector<std::vector<Rational>> transition;
  std::vector<Rational> initial;
};

/// x -> ratio * O * x + translation, O a rotation by `angle` composed with
/// the reflection (x, y) -> (x, -y) when `reflect` is set. In dimension 1
/// the angle must be zero and `reflect` means x -> -x.
struct SimilarityMap {
  double ratio = 0.5;
  double angle = 0.0;
  bool reflect = false;
  Eigen::VectorXd translation;

  Eigen::MatrixXd linear_part() const;
  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const { return linear_part() * x + translation; }
};

struct LinearIFS {
  int dim = 1;
  std::vector<SimilarityMap> maps;
  std::vector<double> weights;
  bool strong_separation = false;
};

/// Law of the sum of ±t^n (n >= 0) with independent signs, P(+) = p.
/// `block` signs are grouped into one symbol.
struct BernoulliConvolution {
  double t = 0.5;
  double p = 0.5;
  int block = 8;
};

struct MeasureSpec;

struct Product {
  std::shared_ptr<const MeasureSpec> first;
  std::shared_ptr<const MeasureSpec> second;
};

struct MeasureSpec {
  std::variant<BernoulliDigits, MarkovDigits, LinearIFS, Product, BernoulliConvolution> kind;

  int dim() const;
};

MeasureSpec make_product(MeasureSpec first, MeasureSpec second);

/// Convenience constructors for the common 1-d digit measures.
MeasureSpec bernoulli_digits(int base, const std::vector<int>& digits, const std::vector<Rational>& probs);
MeasureSpec markov_digits(int base, const std::vector<int>& digits, const std::vector<std::vector<Rational>>& transition,
                          const std::vector<Rational>& initial);

/// The rational with the shortest decimal representation that rounds to x,
/// so 0.9 becomes 9/10.
Rational decimal_rational(double x);

/// Checks probability vectors, ranges, and declared separation.
void validate_spec(const MeasureSpec& spec);

std::string describe(const MeasureSpec& spec);

/// Base and dimension of the cube coding of a tree-representable spec.
struct DigitCoding {
  int base = 2;
  int dim = 1;
};

/// Coding of the tree build_tree would produce. Throws
/// UnsupportedExactRepresentationError when the measure has no exact tree.
DigitCoding digit_coding(const MeasureSpec& spec);

bool has_exact_tree(const MeasureSpec& spec);

/// Exact cylinder masses to the given depth. Symbols are dx + base * dy.
template <typename Scalar>
TreeMeasure<Scalar> build_tree(const MeasureSpec& spec, std::size_t depth);

/// A digit-aligned LinearIFS rewritten as BernoulliDigits, or nothing.
std::optional<BernoulliDigits> as_digit_system(const LinearIFS& ifs);

/// One point of the measure, accurate to 10^-precision_digits.
Eigen::VectorXd sample_point(const MeasureSpec& spec, std::uint64_t seed, int precision_digits);

/// `count` points as the columns of a dim x count matrix, drawn from a
/// single stream.
Eigen::MatrixXd sample_points(const MeasureSpec& spec, std::uint64_t seed, std::size_t count,
                              int precision_digits);

/// Σ u_i t^i over a block of signs.
double block_polynomial(const std::vector<int>& signs, double t);

/// Bounding box of the attractor, from [0,1]^d under `iterations` rounds of
/// the hull map.
Eigen::AlignedBox<double, Eigen::Dynamic> attractor_hull(const LinearIFS& ifs, int iterations = 60);

/// True when the images of the attractor hull are pairwise disjoint;
/// touching images count as overlapping.
bool check_separation(const LinearIFS& ifs);

struct DigitMeasureSummary {
  double shannon_entropy_per_symbol = 0.0;
  double analytic_dimension = 0.0;
  bool componentwise_sum = false;
};

DigitMeasureSummary analytic_summary(const MeasureSpec& spec);

/// Stationary law of a row-stochastic matrix.
Eigen::VectorXd stationary_vector(const Eigen::MatrixXd& transition);

Eigen::MatrixXd to_matrix(const std::vector<std::vector<Rational>>& rows);

extern template TreeMeasure<double> build_tree<double>(const MeasureSpec&, std::size_t);
extern template TreeMeasure<Rational> build_tree<Rational>(const MeasureSpec&, std::size_t);

}  // namespace fracproj
