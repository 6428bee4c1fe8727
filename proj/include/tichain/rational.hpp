#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>

namespace tichain {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(double x) { return x; }

/// Parses "3", "-7/2" or a finite decimal such as "0.125" / "-1.5e-3" exactly.
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& r);

}  // namespace tichain
