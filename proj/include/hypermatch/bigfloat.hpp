#ifndef HYPERMATCH_BIGFLOAT_HPP
#define HYPERMATCH_BIGFLOAT_HPP

#include <mpfr.h>

#include <string>
#include <utility>

#include "hypermatch/rational.hpp"

namespace hypermatch {

// Fixed-precision binary float (128-bit significand, round-to-nearest).
// All replicas compute identically, so comparisons on BigFloat values are
// deterministic even though the underlying reals may be irrational.
class BigFloat {
  public:
    static constexpr mpfr_prec_t kPrecision = 128;

    BigFloat() { mpfr_init2(v_, kPrecision); mpfr_set_zero(v_, 1); }
    BigFloat(long x) : BigFloat() { mpfr_set_si(v_, x, MPFR_RNDN); }
    BigFloat(int x) : BigFloat(static_cast<long>(x)) {}
    BigFloat(double x) : BigFloat() { mpfr_set_d(v_, x, MPFR_RNDN); }
    BigFloat(const Rational& q) : BigFloat() { mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN); }
    BigFloat(const BigInt& z) : BigFloat() { mpfr_set_z(v_, z.get_mpz_t(), MPFR_RNDN); }

    BigFloat(const BigFloat& o) : BigFloat() { mpfr_set(v_, o.v_, MPFR_RNDN); }
    BigFloat(BigFloat&& o) noexcept { mpfr_init2(v_, kPrecision); mpfr_swap(v_, o.v_); }
    BigFloat& operator=(BigFloat o) noexcept { mpfr_swap(v_, o.v_); return *this; }
    ~BigFloat() { mpfr_clear(v_); }

    BigFloat& operator+=(const BigFloat& o) { mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
    BigFloat& operator-=(const BigFloat& o) { mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
    BigFloat& operator*=(const BigFloat& o) { mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
    BigFloat& operator/=(const BigFloat& o) { mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }

    friend BigFloat operator+(BigFloat a, const BigFloat& b) { return a += b; }
    friend BigFloat operator-(BigFloat a, const BigFloat& b) { return a -= b; }
    friend BigFloat operator*(BigFloat a, const BigFloat& b) { return a *= b; }
    friend BigFloat operator/(BigFloat a, const BigFloat& b) { return a /= b; }
    friend BigFloat operator-(const BigFloat& a) {
        BigFloat r;
        mpfr_neg(r.v_, a.v_, MPFR_RNDN);
        return r;
    }

    friend bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) < 0; }
    friend bool operator>(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) > 0; }
    friend bool operator<=(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) <= 0; }
    friend bool operator>=(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) >= 0; }
    friend bool operator==(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) == 0; }

    int sign() const { return mpfr_sgn(v_); }
    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }

    static BigFloat log2_of(const BigFloat& a) {
        BigFloat r;
        mpfr_log2(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    static BigFloat exp2_of(const BigFloat& a) {
        BigFloat r;
        mpfr_exp2(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    static BigFloat pow(const BigFloat& base, const BigFloat& e) {
        BigFloat r;
        mpfr_pow(r.v_, base.v_, e.v_, MPFR_RNDN);
        return r;
    }
    static BigFloat pow_si(const BigFloat& base, long e) {
        BigFloat r;
        mpfr_pow_si(r.v_, base.v_, e, MPFR_RNDN);
        return r;
    }
    static BigFloat euler_e() {
        BigFloat one(1L), r;
        mpfr_exp(r.v_, one.v_, MPFR_RNDN);
        return r;
    }
    static BigFloat abs(const BigFloat& a) {
        BigFloat r;
        mpfr_abs(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    long ceil_to_long() const {
        mpfr_t t;
        mpfr_init2(t, kPrecision);
        mpfr_ceil(t, v_);
        long r = mpfr_get_si(t, MPFR_RNDN);
        mpfr_clear(t);
        return r;
    }
    long floor_to_long() const {
        mpfr_t t;
        mpfr_init2(t, kPrecision);
        mpfr_floor(t, v_);
        long r = mpfr_get_si(t, MPFR_RNDN);
        mpfr_clear(t);
        return r;
    }

    std::string str() const;

  private:
    mpfr_t v_;
};

// a >= b up to relative slack 2^-80 on the larger magnitude.
bool geq_with_relative_slack(const BigFloat& a, const BigFloat& b, int slack_log2 = -80);

}  // namespace hypermatch

#endif
