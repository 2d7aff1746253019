#include "isoprofile/rational.hpp"

#include "isoprofile/errors.hpp"

#include <cmath>

namespace isoprofile {

std::string to_string(const Rational& q) { return q.get_str(); }

Rational parse_rational(const std::string& text)
{
    Rational q;
    if (q.set_str(text, 10) != 0)
        throw ParseError("not a rational number: '" + text + "'");
    q.canonicalize();
    return q;
}

Rational pow2(std::int64_t k)
{
    mpz_class p = 1;
    mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(k < 0 ? -k : k));
    if (k >= 0)
        return Rational(p);
    return Rational(mpz_class(1), p);
}

Rational pow16(std::int64_t k) { return pow2(4 * k); }

namespace {

long double mpz_log2(const mpz_class& z)
{
    long exp = 0;
    double m = mpz_get_d_2exp(&exp, z.get_mpz_t());
    return std::log2(static_cast<long double>(m)) + static_cast<long double>(exp);
}

}  // namespace

long double log2_of(const Rational& q)
{
    if (sgn(q) <= 0)
        throw DomainError("log2 of a non-positive rational");
    return mpz_log2(q.get_num()) - mpz_log2(q.get_den());
}

long double to_long_double(const Rational& q)
{
    int sign = sgn(q);
    if (sign == 0)
        return 0.0L;
    mpz_class num = abs(q.get_num());
    const mpz_class& den = q.get_den();
    long shift = 66 - (static_cast<long>(mpz_sizeinbase(num.get_mpz_t(), 2)) -
                       static_cast<long>(mpz_sizeinbase(den.get_mpz_t(), 2)));
    mpz_class quot;
    if (shift >= 0) {
        mpz_class scaled = num;
        mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), static_cast<mp_bitcnt_t>(shift));
        quot = scaled / den;
    } else {
        mpz_class scaled = den;
        mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), static_cast<mp_bitcnt_t>(-shift));
        quot = num / scaled;
    }
    mpz_class hi = quot >> 32;
    mpz_class lo = quot - (hi << 32);
    long double value = static_cast<long double>(hi.get_ui()) * 4294967296.0L +
                        static_cast<long double>(lo.get_ui());
    if (shift > 16000)
        return 0.0L;
    if (shift < -16000)
        return sign > 0 ? HUGE_VALL : -HUGE_VALL;
    value = std::ldexp(value, static_cast<int>(-shift));
    return sign > 0 ? value : -value;
}

}  // namespace isoprofile
