#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

namespace conewalk {

using Rational = boost::multiprecision::cpp_rational;

// Accepts "num/den", integers, and plain decimals ("0.25"). Rejects zero
// denominators, signs on den, exponents, and anything else.
Rational parse_rational(const std::string& text);

std::string rational_string(const Rational& r);

inline double to_double(const Rational& r) { return r.template convert_to<double>(); }

}  // namespace conewalk
