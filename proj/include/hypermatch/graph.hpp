#ifndef HYPERMATCH_GRAPH_HPP
#define HYPERMATCH_GRAPH_HPP

#include <vector>

namespace hypermatch {

// Undirected simple graph; adjacency lists kept sorted and duplicate-free.
class Graph {
  public:
    Graph() = default;
    explicit Graph(int n) : adj_(n) {}

    int num_nodes() const { return static_cast<int>(adj_.size()); }
    const std::vector<int>& neighbors(int v) const { return adj_[v]; }
    int degree(int v) const { return static_cast<int>(adj_[v].size()); }
    int max_degree() const;

    void add_edge(int u, int v);
    void finalize();  // sort + dedupe adjacency

    // Distance <= t adjacency, self-loops excluded.
    Graph power(int t) const;

    // Nodes at distance exactly 1..2 (the square graph neighborhood),
    // using scratch to avoid repeated allocation; scratch must be sized n, zeroed.
    void square_neighbors(int v, std::vector<int>& out, std::vector<int>& stamp, int tick) const;

    // BFS distances from src; -1 for unreachable.
    std::vector<int> bfs_distances(int src) const;

  private:
    std::vector<std::vector<int>> adj_;
};

}  // namespace hypermatch

#endif
