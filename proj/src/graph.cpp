#include "hypermatch/graph.hpp"

#include <algorithm>
#include <queue>

namespace hypermatch {

int Graph::max_degree() const {
    int d = 0;
    for (const auto& a : adj_) d = std::max<int>(d, static_cast<int>(a.size()));
    return d;
}

void Graph::add_edge(int u, int v) {
    if (u == v) return;
    adj_[u].push_back(v);
    adj_[v].push_back(u);
}

void Graph::finalize() {
    for (auto& a : adj_) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }
}

Graph Graph::power(int t) const {
    const int n = num_nodes();
    Graph g(n);
    std::vector<int> dist(n, -1);
    std::vector<int> touched;
    for (int s = 0; s < n; ++s) {
        std::queue<int> q;
        q.push(s);
        dist[s] = 0;
        touched.assign(1, s);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            if (dist[u] == t) continue;
            for (int w : adj_[u]) {
                if (dist[w] < 0) {
                    dist[w] = dist[u] + 1;
                    touched.push_back(w);
                    q.push(w);
                }
            }
        }
        for (int w : touched) {
            if (w != s) g.adj_[s].push_back(w);
            dist[w] = -1;
        }
    }
    g.finalize();
    return g;
}

void Graph::square_neighbors(int v, std::vector<int>& out, std::vector<int>& stamp, int tick) const {
    out.clear();
    stamp[v] = tick;
    for (int u : adj_[v]) {
        if (stamp[u] != tick) {
            stamp[u] = tick;
            out.push_back(u);
        }
        for (int w : adj_[u]) {
            if (stamp[w] != tick) {
                stamp[w] = tick;
                out.push_back(w);
            }
        }
    }
}

std::vector<int> Graph::bfs_distances(int src) const {
    std::vector<int> dist(num_nodes(), -1);
    std::queue<int> q;
    dist[src] = 0;
    q.push(src);
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (int w : adj_[u]) {
            if (dist[w] < 0) {
                dist[w] = dist[u] + 1;
                q.push(w);
            }
        }
    }
    return dist;
}

}  // namespace hypermatch
