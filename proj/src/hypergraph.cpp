#include "hypermatch/hypergraph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "hypermatch/errors.hpp"

namespace hypermatch {

Hypergraph::Hypergraph(int declared_n, int declared_rank, int declared_max_degree,
                       std::vector<HyperEdge> edges)
    : declared_n_(declared_n),
      declared_rank_(declared_rank),
      declared_max_degree_(declared_max_degree),
      edges_(std::move(edges)) {
    std::sort(edges_.begin(), edges_.end(),
              [](const HyperEdge& a, const HyperEdge& b) { return a.id < b.id; });
    for (auto& e : edges_) std::sort(e.vertices.begin(), e.vertices.end());
    incidence_.assign(declared_n_, {});
    id_to_index_.reserve(edges_.size());
    for (int i = 0; i < static_cast<int>(edges_.size()); ++i) {
        id_to_index_[edges_[i].id] = i;
        for (int v : edges_[i].vertices) {
            require(v >= 0 && v < declared_n_, "vertex out of range");
            incidence_[v].push_back(i);
        }
    }
    validate();
}

Hypergraph Hypergraph::from_edges(int n, std::vector<HyperEdge> edges) {
    int rank = 1;
    for (const auto& e : edges) rank = std::max<int>(rank, static_cast<int>(e.vertices.size()));
    std::vector<int> deg(n, 0);
    for (const auto& e : edges)
        for (int v : e.vertices) ++deg[v];
    int dmax = 1;
    for (int d : deg) dmax = std::max(dmax, d);
    return Hypergraph(n, rank, dmax, std::move(edges));
}

int Hypergraph::observed_max_degree() const {
    int d = 0;
    for (const auto& inc : incidence_) d = std::max<int>(d, static_cast<int>(inc.size()));
    return d;
}

int Hypergraph::observed_rank() const {
    int r = 0;
    for (const auto& e : edges_) r = std::max<int>(r, static_cast<int>(e.vertices.size()));
    return r;
}

int Hypergraph::index_of(EdgeId id) const {
    auto it = id_to_index_.find(id);
    return it == id_to_index_.end() ? -1 : it->second;
}

void Hypergraph::validate() const {
    require(id_to_index_.size() == edges_.size(), "duplicate edge ids");
    for (const auto& e : edges_) {
        require(!e.vertices.empty(), "empty edge");
        require(static_cast<int>(e.vertices.size()) <= declared_rank_, "edge exceeds rank");
        for (size_t i = 1; i < e.vertices.size(); ++i)
            require(e.vertices[i] != e.vertices[i - 1], "repeated vertex in edge");
    }
    for (const auto& inc : incidence_)
        require(static_cast<int>(inc.size()) <= declared_max_degree_, "vertex exceeds max degree");
}

EdgeWeighting EdgeWeighting::constant(const Hypergraph& h, const Rational& w) {
    EdgeWeighting a;
    for (const auto& e : h.edges()) a.set(e.id, w);
    return a;
}

void EdgeWeighting::set(EdgeId id, const Rational& w) {
    require(w >= 0, "edge weight must be nonnegative");
    w_[id] = w;
}

const Rational& EdgeWeighting::at(EdgeId id) const {
    auto it = w_.find(id);
    return it == w_.end() ? zero_ : it->second;
}

Rational EdgeWeighting::total(const Hypergraph& h) const {
    Rational s(0);
    for (const auto& e : h.edges()) s += at(e.id);
    return s;
}

void Matching::normalize() {
    std::sort(edge_ids.begin(), edge_ids.end());
    edge_ids.erase(std::unique(edge_ids.begin(), edge_ids.end()), edge_ids.end());
}

bool Matching::contains(EdgeId id) const {
    return std::binary_search(edge_ids.begin(), edge_ids.end(), id);
}

bool is_matching(const Hypergraph& h, const Matching& m) {
    std::vector<char> used(h.num_vertices(), 0);
    for (EdgeId id : m.edge_ids) {
        int idx = h.index_of(id);
        if (idx < 0) return false;
        for (int v : h.edge(idx).vertices) {
            if (used[v]) return false;
            used[v] = 1;
        }
    }
    return true;
}

void FractionalMatching::set(EdgeId id, const Rational& v) {
    require(v >= 0 && v <= 1, "fractional value outside [0,1]");
    if (v == 0) {
        v_.erase(id);
        return;
    }
    v_[id] = v;
}

const Rational& FractionalMatching::value(EdgeId id) const {
    auto it = v_.find(id);
    return it == v_.end() ? zero_ : it->second;
}

Rational FractionalMatching::weight(const EdgeWeighting& a) const {
    Rational s(0);
    for (const auto& [id, v] : v_) s += a.at(id) * v;
    return s;
}

Rational FractionalMatching::load(const Hypergraph& h, int vertex) const {
    Rational s(0);
    for (int idx : h.incident_edges(vertex)) s += value(h.edge(idx).id);
    return s;
}

bool FractionalMatching::feasible(const Hypergraph& h) const {
    for (const auto& [id, v] : v_) {
        if (v < 0 || v > 1) return false;
        if (h.index_of(id) < 0) return false;
    }
    for (int v = 0; v < h.num_vertices(); ++v)
        if (load(h, v) > 1) return false;
    return true;
}

bool FractionalMatching::proper(const Hypergraph& h) const {
    (void)h;
    BigInt q(q_);
    for (const auto& [id, v] : v_) {
        if (!mpz_divisible_p(q.get_mpz_t(), v.get_den_mpz_t())) return false;
    }
    return true;
}

IncidenceGraph incidence_graph(const Hypergraph& h) {
    IncidenceGraph inc;
    inc.num_vertex_nodes = h.num_vertices();
    inc.g = Graph(h.num_vertices() + h.num_edges());
    for (int i = 0; i < h.num_edges(); ++i)
        for (int v : h.edge(i).vertices) inc.g.add_edge(inc.vertex_node(v), inc.edge_node(i));
    inc.g.finalize();
    return inc;
}

ReplicateResult replicate(const Hypergraph& h, const FractionalMatching& fm) {
    std::vector<HyperEdge> out;
    std::vector<EdgeId> parents;
    const BigInt q(fm.q());
    EdgeId next_id = 0;
    for (const auto& e : h.edges()) {
        Rational copies_q = fm.value(e.id) * Rational(q);
        copies_q.canonicalize();
        if (copies_q.get_den() != 1)
            throw NonIntegerCopyCountError("q*h(e) not integral for edge " + std::to_string(e.id));
        long copies = copies_q.get_num().get_si();
        for (long c = 0; c < copies; ++c) {
            out.push_back(HyperEdge{next_id++, e.vertices});
            parents.push_back(e.id);
        }
    }
    int max_deg = std::max<long>(1, fm.q());
    Hypergraph rep(h.num_vertices(), h.rank(), max_deg, std::move(out));
    return ReplicateResult{std::move(rep), std::move(parents)};
}

Hypergraph residual(const Hypergraph& h, const Matching& m) {
    // Matching edges absent from h (already removed by an earlier residual)
    // are ignored; the edges present must be disjoint.
    std::vector<char> blocked(h.num_vertices(), 0);
    for (EdgeId id : m.edge_ids) {
        int idx = h.index_of(id);
        if (idx < 0) continue;
        for (int v : h.edge(idx).vertices) {
            require(!blocked[v], "residual: matching edges intersect");
            blocked[v] = 1;
        }
    }
    std::vector<HyperEdge> out;
    for (const auto& e : h.edges()) {
        bool hit = false;
        for (int v : e.vertices)
            if (blocked[v]) { hit = true; break; }
        if (!hit) out.push_back(e);
    }
    return Hypergraph(h.num_vertices(), h.rank(), h.max_degree(), std::move(out));
}

Hypergraph subhypergraph(const Hypergraph& h, const std::vector<EdgeId>& keep) {
    std::vector<HyperEdge> out;
    out.reserve(keep.size());
    for (EdgeId id : keep) {
        int idx = h.index_of(id);
        require(idx >= 0, "subhypergraph: unknown edge id");
        out.push_back(h.edge(idx));
    }
    return Hypergraph(h.num_vertices(), h.rank(), h.max_degree(), std::move(out));
}

HypergraphFile read_hypergraph(std::istream& in) {
    std::string line;
    int n = -1, m = -1, r = -1;
    std::vector<HyperEdge> edges;
    EdgeWeighting a;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "H") {
            if (!(ls >> n >> m >> r)) throw ParseError("bad header: " + line);
        } else if (tag == "E") {
            if (n < 0) throw ParseError("edge before header");
            HyperEdge e;
            std::string w;
            if (!(ls >> e.id >> w)) throw ParseError("bad edge line: " + line);
            int v;
            while (ls >> v) e.vertices.push_back(v);
            if (e.vertices.empty()) throw ParseError("edge with no vertices: " + line);
            a.set(e.id, parse_rational(w));
            edges.push_back(std::move(e));
        } else {
            throw ParseError("unknown line tag: " + tag);
        }
    }
    if (n < 0) throw ParseError("missing header");
    if (m >= 0 && m != static_cast<int>(edges.size()))
        throw ParseError("edge count mismatch with header");
    int dmax = 1;
    {
        std::vector<int> deg(n, 0);
        for (const auto& e : edges)
            for (int v : e.vertices) ++deg[v];
        for (int d : deg) dmax = std::max(dmax, d);
    }
    return HypergraphFile{Hypergraph(n, std::max(r, 1), dmax, std::move(edges)), std::move(a)};
}

HypergraphFile read_hypergraph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    return read_hypergraph(in);
}

void write_hypergraph(std::ostream& out, const Hypergraph& h, const EdgeWeighting& a) {
    out << "H " << h.num_vertices() << " " << h.num_edges() << " " << h.rank() << "\n";
    for (const auto& e : h.edges()) {
        out << "E " << e.id << " " << format_rational(a.at(e.id));
        for (int v : e.vertices) out << " " << v;
        out << "\n";
    }
}

void write_hypergraph_file(const std::string& path, const Hypergraph& h, const EdgeWeighting& a) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path);
    write_hypergraph(out, h, a);
}

}  // namespace hypermatch
