#ifndef HYPERMATCH_ORIENTATION_HPP
#define HYPERMATCH_ORIENTATION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hypermatch/hypergraph.hpp"
#include "hypermatch/maximal.hpp"

namespace hypermatch {

// Direction per multigraph edge: true orients low-id endpoint -> high-id.
struct Orientation {
    std::vector<char> forward;  // by edge index

    int out_degree(const Hypergraph& g, int v) const;
    std::vector<int> out_degrees(const Hypergraph& g) const;
};

Orientation initial_orientation(const Hypergraph& g);            // low -> high id
Orientation worst_case_orientation(const Hypergraph& g);         // everything out of one hub

// Directed auxiliary graph: the oriented edges plus a source s with
// (out_deg(v) - D) edges into each overfull v and a sink t fed by
// (D - out_deg(v)) edges from each underfull v.
struct AuxGraph {
    int num_real_nodes = 0;  // s = n, t = n + 1
    int s = 0, t = 0;
    // arcs as (from, to, edge-handle); handle < m: real edge index, else virtual
    struct Arc {
        int from, to;
        long handle;
    };
    std::vector<Arc> arcs;
    std::vector<std::vector<int>> out;  // node -> arc indices
};

AuxGraph build_aux(const Hypergraph& g, const Orientation& o, long cap_d);

// Hyperedges are the arc sets of simple length-i s->t paths; hypergraph
// vertices are the arcs of the auxiliary graph.
struct StPathHypergraph {
    Hypergraph h;
    std::vector<std::vector<int>> paths;  // arc indices per hyperedge index
};

StPathHypergraph st_path_hypergraph(const AuxGraph& aux, int length, long cap);

enum class OrientMode { Det, Rand };

struct OrientResult {
    Orientation orientation;
    int stages = 0;
    long cap_d = 0;
    bool early_exit = false;
    std::vector<int> paths_reversed_per_stage;
};

struct OrientOptions {
    OrientMode mode = OrientMode::Det;
    uint64_t seed = 0;
    Rational delta{1, 10};
    long path_cap = 2000000;
    int stage_budget_scale = 8;  // c0
    bool worst_start = false;
};

// Max out-degree <= ceil((1+eps) lambda): stage i reverses a maximal set of
// arc-disjoint length-i s->t paths; after it, no shorter s->t path exists
// (checked by BFS every stage). Randomized mode partitions the edges into
// lambda/y classes when lambda exceeds y = c log2(n)/eps^2 and recurses at
// eps/10.
OrientResult orient(const Hypergraph& g, long lambda, const Rational& eps,
                    const OrientOptions& opt = {});

// `O <edge_id> <from> <to>` lines.
std::string format_orientation(const Hypergraph& g, const Orientation& o);

}  // namespace hypermatch

#endif
