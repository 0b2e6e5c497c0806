#include "hypermatch/rational.hpp"

#include <stdexcept>

namespace hypermatch {

Rational parse_rational(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos) {
            Rational q(text);
            q.canonicalize();
            return q;
        }
        BigInt num(text.substr(0, slash));
        BigInt den(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator: " + text);
        Rational q(num, den);
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        throw;
    } catch (...) {
        throw std::invalid_argument("malformed rational: " + text);
    }
}

std::string format_rational(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

BigInt binomial(long n, long k) {
    if (k < 0 || k > n || n < 0) return BigInt(0);
    BigInt r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return r;
}

BigInt binomial_big(const BigInt& n, long k) {
    if (k < 0 || n < k) return BigInt(0);
    BigInt r(1);
    for (long j = 0; j < k; ++j) {
        r *= (n - j);
        r /= (j + 1);  // exact: r holds C(n, j+1) * (j+1)! / (j+1)! stepwise
    }
    return r;
}

Rational binomial_upper_tail_half(long n, long lo) {
    if (lo <= 0) return Rational(1);
    if (lo > n) return Rational(0);
    BigInt sum(0);
    BigInt term = binomial(n, lo);
    for (long k = lo; k <= n; ++k) {
        sum += term;
        // C(n,k+1) = C(n,k) * (n-k) / (k+1)
        term *= (n - k);
        if (k + 1 <= n) term /= (k + 1);
    }
    Rational q(sum, pow_int(BigInt(2), static_cast<unsigned long>(n)));
    q.canonicalize();
    return q;
}

}  // namespace hypermatch
