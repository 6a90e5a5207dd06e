#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace dpspin {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Parses "3", "-0.125", "1/8", "+2.5e-1" into an exact rational.
/// Throws std::invalid_argument on malformed input.
Rational parse_rational(std::string_view text);

/// Terminating decimals are written as decimals ("0.125"), everything else as "p/q".
std::string format_rational(const Rational& value);

inline double to_double(const Rational& value) { return value.convert_to<double>(); }

BigInt lcm(const BigInt& a, const BigInt& b);

}  // namespace dpspin
