#ifndef HYPERMATCH_FRACTIONAL_HPP
#define HYPERMATCH_FRACTIONAL_HPP

#include <cstdint>
#include <vector>

#include "hypermatch/coloring.hpp"
#include "hypermatch/hypergraph.hpp"
#include "hypermatch/rounding.hpp"

namespace hypermatch {

struct LpSolveResult {
    FractionalMatching h;
    Rational value;       // a(h), exact
    Rational dual_bound;  // exact upper bound on a*(H) from a feasible dual
    long iterations = 0;  // solver rounds, reported
};

// Feasible fractional matching with a(h) >= (1-eps) a*(H). Multiplicative
// weights guide the search; the guarantee is certified by an exact rational
// primal/dual comparison before returning. Throws Error if the iteration
// budget runs out before certification.
LpSolveResult lp_solve(const Hypergraph& h, const EdgeWeighting& a, const Rational& eps);

// Round h down to multiples of 1/(10 Delta): 10 Delta-proper,
// a(out) >= a(h) - a(E)/(10 Delta).
FractionalMatching quantize_det(const Hypergraph& h, const EdgeWeighting& a,
                                const FractionalMatching& hin);

// Poisson sampling at rate 10 h(e) log2(r) with per-vertex threshold
// 20 log2(r): ceil(20 log2 r)-proper; the weight guarantee holds in
// expectation over seeds, not per run.
FractionalMatching quantize_rand(const Hypergraph& h, const EdgeWeighting& a,
                                 const FractionalMatching& hin, uint64_t seed);

// Weight classes E_i = { e : (rq)^i <= a(e) < (rq)^{i+1} }.
long weight_class_of(const Rational& weight, long rq);

// h(e) = h_i(e)/3 unless a heavier-class neighbor (class >= i+3) is
// positive; exact feasibility and a(h) >= sum_i a(h_i) / 6.
FractionalMatching combine_weight_classes(const Hypergraph& h, const EdgeWeighting& a, long q,
                                          const std::vector<std::pair<long, FractionalMatching>>&
                                              class_matchings);

enum class FracMode { Det, Rand };

struct FractionalPipelineResult {
    FractionalMatching h;
    Rational value;           // a(h)
    Rational class_sum;       // sum_i a(h_i)
    long classes = 0;
    long lp_iterations = 0;
};

// Per-class LP solve (eps = 1/2) + quantization + combination; q = 10 Delta
// deterministically, ceil(20 log2 r) randomized.
FractionalPipelineResult fractional_matching(const Hypergraph& h, const EdgeWeighting& a,
                                             FracMode mode, uint64_t seed);

struct HmwmResult {
    Matching matching;
    Rational weight;             // a(M)
    Rational fractional_weight;  // a(h) driving the floor
    Rational floor;              // 0.09 a(h) / r
    bool used_chain = false;
};

// Fractional matching -> replicate -> direct rounding; the unconditional
// floor a(M) >= 0.09 a(h)/r survives every profile via the fallback path.
HmwmResult hmwm_det(const Hypergraph& h, const EdgeWeighting& a, const VertexColoring& good_col,
                    const RoundingParams* chain_params = nullptr);

// Parallel randomized fractional matchings, averaged, replicated, sparsified
// by a random edge coloring, then the deterministic pipeline on the result.
HmwmResult hmwm_rand(const Hypergraph& h, const EdgeWeighting& a, const Rational& delta,
                     uint64_t seed, const RoundingParams* chain_params = nullptr);

// `F <edge_id> <num>/<den>` lines.
std::string format_fractional(const FractionalMatching& h);

}  // namespace hypermatch

#endif
