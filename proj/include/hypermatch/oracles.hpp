#ifndef HYPERMATCH_ORACLES_HPP
#define HYPERMATCH_ORACLES_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hypermatch/hypergraph.hpp"

namespace hypermatch {
namespace oracles {

// Reference computations for tests and the `oracle` CLI subcommand.
// The algorithm modules never call these.

struct MwmResult {
    Matching matching;
    Rational weight;
};

// Exact maximum-weight matching by branch and bound over edge inclusion.
// Throws TooLargeError when |E| exceeds the cap.
MwmResult brute_force_mwm(const Hypergraph& h, const EdgeWeighting& a, int edge_cap = 30);

// Maximum matching cardinality (unit weights).
int max_matching_size(const Hypergraph& h, int edge_cap = 30);

// Plain exhaustive scan over all edge subsets; cross-oracle for small m.
MwmResult exhaustive_mwm(const Hypergraph& h, const EdgeWeighting& a, int edge_cap = 20);

struct LpResult {
    Rational optimum;
    FractionalMatching primal;       // optimal fractional matching
    std::vector<Rational> dual;      // per-vertex prices, dual feasible
};

// Exact rational LP optimum of the fractional-matching polytope via simplex
// with Bland's rule. Throws TooLargeError above the caps.
LpResult exact_fractional_opt(const Hypergraph& h, const EdgeWeighting& a,
                              int edge_cap = 64, int vertex_cap = 64);

struct MonteCarlo {
    double mean = 0;
    double stderr_ = 0;
    long trials = 0;
};

MonteCarlo monte_carlo_expectation(const std::function<double(uint64_t)>& statistic,
                                   long trials, uint64_t seed);

// --- instance generators --------------------------------------------------

struct GeneratedInstance {
    Hypergraph h;
    EdgeWeighting a;
};

enum class WeightKind { Unit, RandomRational };

EdgeWeighting random_weights(const Hypergraph& h, WeightKind kind, uint64_t seed);

// Cycle graph on n >= 3 vertices as a rank-2 hypergraph, unit weights.
GeneratedInstance gen_ring(int n);

// Up to m edges of size exactly r, subject to the degree cap; sampling is
// deterministic in the seed.
GeneratedInstance gen_random(int n, int r, int max_degree, int m, uint64_t seed,
                             WeightKind weights = WeightKind::Unit);

// Union of lambda random spanning forests; a multigraph of arboricity <= lambda.
GeneratedInstance gen_union_of_forests(int lambda, int n, uint64_t seed);

// Regular instance for splitting at large degree: n divisible by r, every
// vertex of degree exactly delta, edges of size exactly r.
GeneratedInstance gen_dense_split(int delta, int r, int n, uint64_t seed,
                                  WeightKind weights = WeightKind::RandomRational);

// Dispatch by kind name ("ring", "random", "forests", "dense"); params are
// positional integers per kind. Throws InfeasibleParamsError.
GeneratedInstance generate(const std::string& kind, const std::vector<long>& params,
                           uint64_t seed);

}  // namespace oracles
}  // namespace hypermatch

#endif
