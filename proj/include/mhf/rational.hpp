#pragma once

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace mhf {

/// Exact arbitrary-precision rational.
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(double x) noexcept { return x; }
inline double to_double(const Rational& x) { return x.convert_to<double>(); }

inline std::string to_string(const Rational& x) { return x.str(); }

}  // namespace mhf
