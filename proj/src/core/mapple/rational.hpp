#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace mapple {

/// Exact rational used by every communication objective.
using Rational = boost::multiprecision::cpp_rational;

/// "7", "1/3", "-5/2".
std::string to_string(const Rational& r);

double to_double(const Rational& r);

}  // namespace mapple
