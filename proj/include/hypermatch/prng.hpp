#ifndef HYPERMATCH_PRNG_HPP
#define HYPERMATCH_PRNG_HPP

#include <cstdint>

#include "hypermatch/rational.hpp"

namespace hypermatch {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t mix_seed(uint64_t a, uint64_t b) { return splitmix64(a ^ splitmix64(b)); }
inline uint64_t mix_seed(uint64_t a, uint64_t b, uint64_t c) { return mix_seed(mix_seed(a, b), c); }

// Deterministic stream; stable across platforms and runs.
class Prng {
  public:
    explicit Prng(uint64_t seed) : state_(splitmix64(seed ^ 0xd1b54a32d192ed03ULL)) {}

    uint64_t next() {
        state_ = splitmix64(state_);
        return state_;
    }

    // Uniform in [0, n) without modulo bias worth caring about at these sizes.
    uint64_t below(uint64_t n) {
        if (n <= 1) return 0;
        return next() % n;
    }

    // True with exact probability p (rational in [0,1]).
    bool bernoulli(const Rational& p) {
        if (p <= 0) return false;
        if (p >= 1) return true;
        // u/2^64 < p, evaluated exactly
        Rational u(BigInt(next()), pow_int(BigInt(2), 64));
        u.canonicalize();
        return u < p;
    }

    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Inverse-transform Poisson draw; p given as double (sampling only).
    long poisson(double mean);

  private:
    uint64_t state_;
};

}  // namespace hypermatch

#endif
