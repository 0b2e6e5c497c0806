#ifndef HYPERMATCH_COLORING_HPP
#define HYPERMATCH_COLORING_HPP

#include <string>
#include <unordered_map>
#include <vector>

#include "hypermatch/hypergraph.hpp"

namespace hypermatch {

struct VertexColoring {
    std::vector<int> color;  // 1..k per node of the target graph
    int k = 0;
    std::string target;      // descriptor of the graph this colors
    bool proper = false;
    int rounds = 0;          // executed priority rounds (honest count)

    int max_color() const;
};

// Proper coloring of Inc(H)^2 with at most (r*Delta)^2 + 1 colors.
// Greedy over priority rounds: a node commits once it holds the highest
// priority among uncommitted square-neighbors, taking the least free color.
// Priorities are a fixed hash of the node id, so executed round counts stay
// near the longest increasing-priority chain rather than n.
VertexColoring good_coloring(const Hypergraph& h);

// Same coloring routine on an arbitrary graph's square.
VertexColoring greedy_square_coloring(const Graph& g, const std::string& target);

// Proper coloring of g itself (not its square).
VertexColoring greedy_coloring(const Graph& g, const std::string& target);

// Stage-wise recoloring down to <= d+1 colors: stage c recolors all nodes of
// color c to their least free color. Input must be proper on g.
VertexColoring reduce_colors(const Graph& g, const VertexColoring& c, int d);

// A good coloring of a parent hypergraph, reindexed for a sub-hypergraph on
// the same vertex set (edge subsets keep their properness).
VertexColoring restrict_good_coloring(const Hypergraph& parent, const VertexColoring& col,
                                      const Hypergraph& sub);

// Good coloring of a replicate hypergraph derived from the parent's: copy j
// of parent edge e takes the pair color (color(e), j), keeping copies of the
// same or adjacent parents apart without any new neighborhood scans.
VertexColoring replicate_coloring(const Hypergraph& parent, const VertexColoring& col,
                                  const ReplicateResult& rep);

bool is_proper(const Graph& g, const std::vector<int>& color);

struct EdgeColoring {
    std::vector<EdgeId> domain;  // E' in ascending id order
    std::unordered_map<EdgeId, int> chi;
    int k = 0;
    int defectiveness = 0;  // measured: max same-color edges at a vertex

    int color_of(EdgeId id) const { return chi.at(id); }
};

int measure_defectiveness(const Hypergraph& h, const EdgeColoring& c);

struct DegreeSplitResult {
    std::vector<EdgeId> left, right;  // disjoint; deg bounded by (1+eps)Delta/2
    Rational expected_flags;          // sum of E[F_u], exact
    Rational achieved_flags;          // sum of F_u at the chosen assignment
    Rational input_weight;
    Rational kept_weight;             // a(left) + a(right)
    int virtual_nodes = 0;
    int violated_nodes = 0;
    int declared_rounds = 0;          // radius bound for locality audits
};

struct DegreeSplitOptions {
    Rational declared_delta{0};   // 0: use h.max_degree()
    long alpha_override = 0;      // 0: the 50*log2(r/eta)/eps^2 formula
    bool enforce_precondition = true;
    bool enforce_retention = true;
};

// Splits E into L1, L2 with deg_{Lj}(v) <= (1+eps)*Delta/2 for all v and j
// (always enforced by discarding) and a(L1 u L2) >= (1-eta)*a(E)
// (guaranteed when the degree precondition holds; always measured).
DegreeSplitResult degree_split(const Hypergraph& h, const EdgeWeighting& a,
                               const Rational& eps, const Rational& eta,
                               const VertexColoring& good_col,
                               const DegreeSplitOptions& opt = {});

struct DefectiveColoringResult {
    EdgeColoring coloring;
    Rational input_weight;
    Rational kept_weight;
    std::vector<Rational> stage_degree_bounds;  // Delta_i per stage
    std::vector<int> stage_max_degrees;         // measured per stage
    int declared_rounds = 0;
};

struct DefectiveColoringOptions {
    Rational c_precondition{1};  // constant C in Delta >= C k log2(r log2(k)/delta)
    bool enforce_precondition = true;
    bool enforce_postconditions = true;
    long alpha_override = 0;
};

// Partial defective edge coloring: keeps edges of total weight >= (1-delta)a(E)
// and k-colors them so every vertex sees at most 4*Delta/k edges per color.
// floor(log2 k) halving stages of degree_split with eps = 1/(4s), eta = delta/(4s).
DefectiveColoringResult defective_color(const Hypergraph& h, const EdgeWeighting& a,
                                        const Rational& delta, int k,
                                        const VertexColoring& good_col,
                                        const DefectiveColoringOptions& opt = {});

// Serialization: `C <node> <color>` lines.
std::string format_coloring(const VertexColoring& c);

}  // namespace hypermatch

#endif
