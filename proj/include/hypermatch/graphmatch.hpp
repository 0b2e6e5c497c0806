#ifndef HYPERMATCH_GRAPHMATCH_HPP
#define HYPERMATCH_GRAPHMATCH_HPP

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "hypermatch/fractional.hpp"
#include "hypermatch/hypergraph.hpp"

namespace hypermatch {

// Alternating path or cycle, stored as the edge-id sequence along the walk.
struct Augmentation {
    std::vector<EdgeId> edges;
    bool cycle = false;
    Rational gain;  // a(P - M) - a(P cap M)
};

// Hyperedges are the vertex sets of augmentations, weighted by gain.
struct PathHypergraph {
    Hypergraph h;
    EdgeWeighting gains;
    std::vector<Augmentation> back;  // by edge index of h
    bool truncated = false;          // per-vertex thinning dropped candidates
};

struct EnumerateOptions {
    long cap = 200000;          // search-node budget; overflow throws
    int per_vertex_keep = 64;   // keep the top gains through any vertex
    long max_hyperedges = 20000;
};

// All positive-gain augmentations of at most 2l edges, deduplicated up to
// traversal direction (and rotation for cycles); one hyperedge per vertex
// set, keeping the best gain. Throws EnumerationOverflowError at the cap.
PathHypergraph enumerate_augmentations(const Hypergraph& g, const EdgeWeighting& a,
                                       const Matching& m, int l,
                                       const EnumerateOptions& opt = {});

// Validity of a single augmentation for the matching m.
bool is_valid_augmentation(const Hypergraph& g, const Matching& m, const Augmentation& p);

// M xor (union of the augmentations); they must be pairwise vertex-disjoint
// and valid. Throws NotDisjointError / NotValidAugmentationError.
Matching augment(const Hypergraph& g, const EdgeWeighting& a, const Matching& m,
                 const std::vector<Augmentation>& ps);

enum class GmwmMode { Det, Rand };

struct GmwmResult {
    Matching matching;
    Rational weight;
    int stages = 0;
    bool early_exit = false;  // no positive-gain augmentation left
    long augmentations_applied = 0;
};

struct GmwmOptions {
    GmwmMode mode = GmwmMode::Det;
    Rational delta{1, 10};  // randomized failure budget, split across stages
    uint64_t seed = 0;
    EnumerateOptions enumerate;
};

// l = ceil(2/eps) augmentation rounds driven by the hypergraph matcher;
// stops early once no positive-gain augmentation exists, which pins
// a(M) >= (1 - 1/l) T.
GmwmResult gmwm(const Hypergraph& g, const EdgeWeighting& a, const Rational& eps,
                const GmwmOptions& opt = {});

}  // namespace hypermatch

#endif
