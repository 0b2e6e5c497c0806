#ifndef HYPERMATCH_ROUNDING_HPP
#define HYPERMATCH_ROUNDING_HPP

#include <optional>
#include <string>
#include <vector>

#include "hypermatch/bigfloat.hpp"
#include "hypermatch/coloring.hpp"
#include "hypermatch/derand.hpp"
#include "hypermatch/hypergraph.hpp"

namespace hypermatch {

enum class RoundingProfile { Paper, Scaled };

// Parameter block driving the staged potentials. Paper profile derives
// everything from (Delta, r); it degenerates (s < 1) at any desk-scale
// Delta, in which case the chain is skipped. Scaled profile takes (w, s, k)
// and derives alpha, x, beta, b_i by the same formulas.
struct RoundingParams {
    RoundingProfile profile = RoundingProfile::Paper;
    bool degenerate = false;
    int w = 0;
    int s = 0;
    BigInt delta{1};
    long rank = 2;
    BigFloat alpha;           // 2^(1/s)
    BigFloat x;               // Delta 2^-s
    BigFloat beta;            // 16 r (e x / w)^w
    std::vector<BigFloat> b;  // b_i = 2^{-(s-i)(w+1)} alpha^{s-i} / beta, i = 0..s
    long defective_k = 0;     // stage coloring colors
};

// w = ceil(2 log2(r log2 Delta)); s = ceil(log2(Delta / (w^4 log2^10(r Delta)))).
int paper_tuple_size(const BigInt& delta, long rank);
RoundingParams compute_params(const BigInt& delta, long rank);
RoundingParams compute_params_scaled(const BigInt& delta, long rank, int w, int s,
                                     long defective_k);

// b_i = alpha 2^{-(w+1)} b_{i+1}, relative error within 2^-80
bool check_b_recurrence(const RoundingParams& p, int i);
// b_i C(Delta 2^{4-i}, w) >= (1/(2 alpha))^{s-i}
bool check_discard_inequality(const RoundingParams& p, int i);

struct StageState {
    int stage = 0;
    std::vector<EdgeId> edges;  // E_i, ascending ids
};

// S_i = (1/(2a))^{s-i} a(E_i) - b_i sum_v (C(floor(D 2^-i), w) + C(d_i(v), w)) a(N(v) cap E_i)
BigFloat stage_potential(const Hypergraph& h, const EdgeWeighting& a, const StageState& st,
                         const RoundingParams& p);

struct DiscardResult {
    StageState state;
    BigFloat before, after;
    int removed_vertices = 0;
    bool monotone = false;  // after >= before (up to 2^-80 relative)
};

// Drops every N(v) with d_i(v) >= Delta 2^{4-i}. The potential cannot
// decrease whenever check_discard_inequality holds for the stage (always in
// the paper regime); asserted then, recorded otherwise.
DiscardResult discard_high_degree(const Hypergraph& h, const EdgeWeighting& a,
                                  const StageState& st, const RoundingParams& p);

// Surrogate stage potential over an edge-colored subset, exposed for
// sampling tests. value() is E[S~ | committed values].
class ChainEstimator : public MultilinearEstimator {
  public:
    virtual BigFloat value() const = 0;
};

// chi holds a color per edge index of hf; stage is the index i of the step
// selecting E_{i+1}.
std::unique_ptr<ChainEstimator> make_surrogate_estimator(const Hypergraph& hf,
                                                         const EdgeWeighting& a,
                                                         const std::vector<int>& chi,
                                                         const RoundingParams& p, int stage);

struct StageReport {
    int stage = 0;
    BigFloat s_before;          // S_i entering the split
    BigFloat s_tilde_expected;  // E[S~] under fair bits
    BigFloat s_tilde;           // achieved S~
    BigFloat s_after;           // S_{i+1}
    Rational coloring_kept;     // a(F)
    Rational input_weight;      // a(E_i)
    bool surrogate_ok = false;  // S~ >= E[S~], hard
    bool upper_ok = false;      // S_{i+1} >= S~
    bool lower_ok = false;      // E[S~] >= S_i
    bool chain_ok = false;      // S_{i+1} >= S_i
    int kept_edges = 0;
};

struct StageOptions {
    bool audit_estimator = false;  // run the A1/A2 audits before derandomizing
};

// One halving step: defective coloring of E_i, then the surrogate-potential
// derandomization picks E_{i+1} with S~ >= E[S~] (hard in every profile).
StageState stage_split(const Hypergraph& h, const EdgeWeighting& a, const StageState& st,
                       const RoundingParams& p, const VertexColoring& good_col,
                       StageReport* report, const StageOptions& opt = {});

struct DegreeReduceResult {
    StageState final_state;
    std::vector<StageReport> stages;
    BigFloat s0;
    BigFloat final_potential;
    Rational input_weight;
    Rational kept_weight;
    long degree_cap = 0;  // ceil(16 x)
    double end_ratio = 0;  // a(E_s) Delta / (x a(E))
};

// s stages of discard + split, then a final discard; ends with max degree
// <= 16 x.
DegreeReduceResult degree_reduce(const Hypergraph& h, const EdgeWeighting& a,
                                 const VertexColoring& good_col, const RoundingParams& p,
                                 const StageOptions& opt = {});

struct DirectRoundResult {
    Matching matching;
    Rational weight;
    bool used_chain = false;
    Rational floor;  // 0.09 a(E) / (r Delta), always satisfied
    std::vector<StageReport> stages;
};

// Two degree reductions followed by the pair-penalty matching; falls back to
// the pair-penalty matching on the input whenever the parameters degenerate,
// and always returns at least the fallback's weight.
DirectRoundResult direct_round(const Hypergraph& h, const EdgeWeighting& a,
                               const VertexColoring& good_col, const RoundingParams& p);

// Chain report CSV: stage, S_i, S~, E[S~], S_{i+1}, kept edges.
std::string format_chain_csv(const std::vector<StageReport>& stages);

}  // namespace hypermatch

#endif
