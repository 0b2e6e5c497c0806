#ifndef HYPERMATCH_MAXIMAL_HPP
#define HYPERMATCH_MAXIMAL_HPP

#include <cstdint>
#include <vector>

#include "hypermatch/fractional.hpp"
#include "hypermatch/hypergraph.hpp"

namespace hypermatch {

enum class HmmMode { Det, Rand, Shatter };

struct HmmStage {
    int residual_edges = 0;
    int committed = 0;
    bool greedy_fallback = false;
};

struct HmmResult {
    Matching matching;
    int stages = 0;
    std::vector<HmmStage> log;
    int phase1_rounds = 0;        // shattering only
    int largest_component = 0;    // after phase I, measured
};

struct HmmOptions {
    Rational delta{1, 10};
    uint64_t seed = 0;
    const RoundingParams* chain_params = nullptr;
};

// Maximal matching by repeatedly matching the residual hypergraph; the
// residual is exactly empty on return. A lowest-id greedy commit guarantees
// progress whenever a stage comes back empty.
HmmResult hmm(const Hypergraph& h, HmmMode mode, const HmmOptions& opt = {});

struct SampleResult {
    Matching matching;
    Rational fractional_mass;  // h(E) = b
};

// One round of randomized selection: p_e = h(e)/(10 r) from the unit-weight
// LP, keep isolated picks. Valid per run; the size guarantee is in
// expectation. The presolved form reuses a fractional matching across seeds.
SampleResult sample_matching(const Hypergraph& h, uint64_t seed);
SampleResult sample_matching(const Hypergraph& h, uint64_t seed,
                             const FractionalMatching& presolved, const Rational& mass);

struct LubyResult {
    Matching matching;
    int rounds = 0;
};

// Maximal matching as an independent set of the line graph: random
// priorities per round, local minima join.
LubyResult luby_mis_line_graph(const Hypergraph& h, uint64_t seed);

}  // namespace hypermatch

#endif
