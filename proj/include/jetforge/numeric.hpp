#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace jetforge {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

BigInt big_pow(std::uint64_t base, std::uint64_t exp);

// q^-e as an exact rational.
Rational inv_pow(std::uint64_t q, std::uint64_t e);

std::string to_decimal(const BigInt& v);
BigInt parse_decimal(const std::string& s);  // throws Error(kBadConfig)

// "num/den" in lowest terms, or "num" when den == 1.
std::string to_fraction(const Rational& r);
double to_double(const Rational& r);

// Reads "a/b" or "a".
Rational parse_fraction(const std::string& s);

}  // namespace jetforge
