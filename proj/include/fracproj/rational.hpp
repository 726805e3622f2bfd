#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <string>

namespace fracproj {

using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend, boost::multiprecision::et_off>;

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.convert_to<double>(); }

/// Exact rational value of a binary double.
inline Rational exact_rational(double x) { return Rational(x); }

inline std::string format_scalar(const Rational& x) {
  if (denominator(x) == 1) return numerator(x).str();
  return numerator(x).str() + "/" + denominator(x).str();
}

std::string format_scalar(double x);

/// Parses "p/q", an integer, or a decimal literal.
Rational parse_rational(const std::string& text);

template <typename Scalar>
Scalar from_double(double x) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return x;
  } else {
    return exact_rational(x);
  }
}

}  // namespace fracproj
