#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace isoprofile {

using Rational = mpq_class;

std::string to_string(const Rational& q);
Rational parse_rational(const std::string& text);

// 2^k and 16^k for signed k
Rational pow2(std::int64_t k);
Rational pow16(std::int64_t k);

long double to_long_double(const Rational& q);
// log2 of a positive rational, accurate to long double precision even for huge values
long double log2_of(const Rational& q);

}  // namespace isoprofile
