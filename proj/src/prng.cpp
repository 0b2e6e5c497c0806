#include "hypermatch/prng.hpp"

#include <cmath>

namespace hypermatch {

long Poisson_knuth(double mean, Prng& rng) {
    // Split large means so exp(-mean) stays representable.
    long total = 0;
    while (mean > 30.0) {
        // Poisson(m) = Poisson(m/2) + Poisson(m/2)
        total += Poisson_knuth(mean / 2, rng);
        mean /= 2;
    }
    double limit = std::exp(-mean);
    double prod = rng.uniform01();
    long k = 0;
    while (prod > limit) {
        prod *= rng.uniform01();
        ++k;
    }
    return total + k;
}

long Prng::poisson(double mean) {
    if (mean <= 0) return 0;
    return Poisson_knuth(mean, *this);
}

}  // namespace hypermatch
