#ifndef HYPERMATCH_HYPERGRAPH_HPP
#define HYPERMATCH_HYPERGRAPH_HPP

#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "hypermatch/graph.hpp"
#include "hypermatch/rational.hpp"

namespace hypermatch {

using EdgeId = long;

struct HyperEdge {
    EdgeId id = 0;
    std::vector<int> vertices;  // sorted, duplicate-free
};

// Vertex set {0..n-1} plus a multiset of rank-<=r hyperedges. Edge ids are
// unique even across multi-edges; iteration order is ascending id.
class Hypergraph {
  public:
    Hypergraph() = default;
    Hypergraph(int declared_n, int declared_rank, int declared_max_degree,
               std::vector<HyperEdge> edges);

    // Declared bounds default to the observed maxima (at least 1).
    static Hypergraph from_edges(int n, std::vector<HyperEdge> edges);

    int num_vertices() const { return declared_n_; }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int rank() const { return declared_rank_; }
    int max_degree() const { return declared_max_degree_; }
    int observed_max_degree() const;
    int observed_rank() const;

    const HyperEdge& edge(int index) const { return edges_[index]; }
    const std::vector<HyperEdge>& edges() const { return edges_; }
    const std::vector<int>& incident_edges(int v) const { return incidence_[v]; }
    int degree(int v) const { return static_cast<int>(incidence_[v].size()); }

    // Index of the edge with this id, or -1.
    int index_of(EdgeId id) const;

    // Throws Error on any violated invariant.
    void validate() const;

  private:
    int declared_n_ = 0;
    int declared_rank_ = 1;
    int declared_max_degree_ = 1;
    std::vector<HyperEdge> edges_;               // ascending id
    std::vector<std::vector<int>> incidence_;    // vertex -> edge indices
    std::unordered_map<EdgeId, int> id_to_index_;
};

class EdgeWeighting {
  public:
    EdgeWeighting() = default;

    static EdgeWeighting constant(const Hypergraph& h, const Rational& w);

    void set(EdgeId id, const Rational& w);
    const Rational& at(EdgeId id) const;  // 0 for absent ids

    Rational total(const Hypergraph& h) const;
    template <typename Ids>
    Rational total_of(const Ids& ids) const {
        Rational s(0);
        for (EdgeId id : ids) s += at(id);
        return s;
    }

  private:
    std::unordered_map<EdgeId, Rational> w_;
    Rational zero_{0};
};

// Set of pairwise vertex-disjoint edges, stored as ascending edge ids.
struct Matching {
    std::vector<EdgeId> edge_ids;

    void normalize();
    bool contains(EdgeId id) const;
    int size() const { return static_cast<int>(edge_ids.size()); }
};

bool is_matching(const Hypergraph& h, const Matching& m);

// Edge values in [0,1] with per-vertex load <= 1; all values have
// denominator dividing q.
class FractionalMatching {
  public:
    FractionalMatching() = default;
    explicit FractionalMatching(long q) : q_(q) {}

    long q() const { return q_; }
    void set_q(long q) { q_ = q; }
    void set(EdgeId id, const Rational& v);
    const Rational& value(EdgeId id) const;  // 0 for absent ids
    const std::unordered_map<EdgeId, Rational>& values() const { return v_; }

    Rational weight(const EdgeWeighting& a) const;  // sum a(e) h(e)
    Rational load(const Hypergraph& h, int vertex) const;
    bool feasible(const Hypergraph& h) const;      // all loads <= 1, values in [0,1]
    bool proper(const Hypergraph& h) const;        // denominators divide q

  private:
    long q_ = 1;
    std::unordered_map<EdgeId, Rational> v_;
    Rational zero_{0};
};

// Bipartite incidence structure: vertex-nodes first (by vertex id), then
// edge-nodes (by edge order).
struct IncidenceGraph {
    Graph g;
    int num_vertex_nodes = 0;

    int vertex_node(int v) const { return v; }
    int edge_node(int edge_index) const { return num_vertex_nodes + edge_index; }
    bool is_edge_node(int node) const { return node >= num_vertex_nodes; }
    int edge_index_of(int node) const { return node - num_vertex_nodes; }
};

IncidenceGraph incidence_graph(const Hypergraph& h);

struct ReplicateResult {
    Hypergraph h;
    std::vector<EdgeId> parent_of;  // by edge index in h
};

// q*h(e) copies of each edge; throws NonIntegerCopyCountError when q*h(e)
// is not integral.
ReplicateResult replicate(const Hypergraph& h, const FractionalMatching& fm);

// Edges disjoint from the union of m.
Hypergraph residual(const Hypergraph& h, const Matching& m);

// Same vertex set and declared bounds, edges restricted to `keep` (ids kept).
Hypergraph subhypergraph(const Hypergraph& h, const std::vector<EdgeId>& keep);

// --- text format ---------------------------------------------------------
// Header `H <n> <m> <r>`, then `E <edge_id> <num>[/<den>] <v1> <v2> ...`
// per edge. Lines starting with '#' are comments.
struct HypergraphFile {
    Hypergraph h;
    EdgeWeighting a;
};

HypergraphFile read_hypergraph(std::istream& in);
HypergraphFile read_hypergraph_file(const std::string& path);
void write_hypergraph(std::ostream& out, const Hypergraph& h, const EdgeWeighting& a);
void write_hypergraph_file(const std::string& path, const Hypergraph& h, const EdgeWeighting& a);

}  // namespace hypermatch

#endif
