#ifndef HYPERMATCH_RATIONAL_HPP
#define HYPERMATCH_RATIONAL_HPP

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

namespace hypermatch {

using Rational = mpq_class;
using BigInt = mpz_class;

inline Rational make_rational(long num, long den = 1) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

// Parses "num" or "num/den". Throws std::invalid_argument on malformed input.
Rational parse_rational(const std::string& text);

// Prints as "num" when integral, else "num/den".
std::string format_rational(const Rational& q);

// Binomial coefficient; zero when k < 0 or k > n.
BigInt binomial(long n, long k);

// Binomial with an arbitrary-precision upper argument.
BigInt binomial_big(const BigInt& n, long k);

// Exact tail Pr[Binomial(n,1/2) >= lo] as a rational.
Rational binomial_upper_tail_half(long n, long lo);

inline long floor_to_long(const Rational& q) {
    BigInt z;
    mpz_fdiv_q(z.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return z.get_si();
}

inline BigInt pow_int(const BigInt& base, unsigned long e) {
    BigInt r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

inline Rational pow_rational(const Rational& base, long e) {
    if (e == 0) return Rational(1);
    Rational num(pow_int(BigInt(base.get_num()), static_cast<unsigned long>(e < 0 ? -e : e)),
                 pow_int(BigInt(base.get_den()), static_cast<unsigned long>(e < 0 ? -e : e)));
    num.canonicalize();
    if (e < 0) num = 1 / num;
    return num;
}

}  // namespace hypermatch

#endif
