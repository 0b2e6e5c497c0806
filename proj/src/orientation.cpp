#include "hypermatch/orientation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <queue>
#include <sstream>

#include "hypermatch/errors.hpp"
#include "hypermatch/prng.hpp"

namespace hypermatch {

int Orientation::out_degree(const Hypergraph& g, int v) const {
    int d = 0;
    for (int e : g.incident_edges(v)) {
        const auto& vs = g.edge(e).vertices;
        int head = forward[e] ? vs[0] : vs[1];
        if (head == v) ++d;
    }
    return d;
}

std::vector<int> Orientation::out_degrees(const Hypergraph& g) const {
    std::vector<int> d(g.num_vertices(), 0);
    for (int e = 0; e < g.num_edges(); ++e) {
        const auto& vs = g.edge(e).vertices;
        ++d[forward[e] ? vs[0] : vs[1]];
    }
    return d;
}

Orientation initial_orientation(const Hypergraph& g) {
    Orientation o;
    o.forward.assign(g.num_edges(), 1);  // vertices are sorted: low -> high
    return o;
}

Orientation worst_case_orientation(const Hypergraph& g) {
    // point everything at the globally busiest vertex's direction: each edge
    // fires out of its lower-degree endpoint toward nothing in particular,
    // which concentrates out-degree on hubs
    Orientation o;
    o.forward.assign(g.num_edges(), 1);
    auto deg = std::vector<int>(g.num_vertices(), 0);
    for (const auto& e : g.edges())
        for (int v : e.vertices) ++deg[v];
    for (int e = 0; e < g.num_edges(); ++e) {
        const auto& vs = g.edge(e).vertices;
        // orient out of the higher-degree endpoint
        o.forward[e] = deg[vs[0]] >= deg[vs[1]] ? 1 : 0;
    }
    return o;
}

AuxGraph build_aux(const Hypergraph& g, const Orientation& o, long cap_d) {
    AuxGraph aux;
    aux.num_real_nodes = g.num_vertices();
    aux.s = g.num_vertices();
    aux.t = g.num_vertices() + 1;
    aux.out.assign(g.num_vertices() + 2, {});
    auto add = [&](int from, int to, long handle) {
        aux.out[from].push_back(static_cast<int>(aux.arcs.size()));
        aux.arcs.push_back({from, to, handle});
    };
    for (int e = 0; e < g.num_edges(); ++e) {
        const auto& vs = g.edge(e).vertices;
        int tail = o.forward[e] ? vs[0] : vs[1];
        int head = o.forward[e] ? vs[1] : vs[0];
        add(tail, head, e);
    }
    long virt = g.num_edges();
    auto degs = o.out_degrees(g);
    for (int v = 0; v < g.num_vertices(); ++v) {
        for (long k = degs[v]; k > cap_d; --k) add(aux.s, v, virt++);
        for (long k = degs[v]; k < cap_d; ++k) add(v, aux.t, virt++);
    }
    return aux;
}

StPathHypergraph st_path_hypergraph(const AuxGraph& aux, int length, long cap) {
    require(length >= 1, "st_path_hypergraph: length >= 1");
    StPathHypergraph out;
    std::vector<int> arc_stack;
    std::vector<char> visited(aux.num_real_nodes + 2, 0);
    long budget = cap;

    std::function<void(int)> dfs = [&](int node) {
        if (--budget < 0)
            throw EnumerationOverflowError("s-t path enumeration exceeded the cap");
        for (int ai : aux.out[node]) {
            const auto& arc = aux.arcs[ai];
            if (static_cast<int>(arc_stack.size()) + 1 == length) {
                if (arc.to == aux.t) {
                    arc_stack.push_back(ai);
                    out.paths.push_back(arc_stack);
                    arc_stack.pop_back();
                }
                continue;
            }
            if (arc.to == aux.t || arc.to == aux.s || visited[arc.to]) continue;
            visited[arc.to] = 1;
            arc_stack.push_back(ai);
            dfs(arc.to);
            arc_stack.pop_back();
            visited[arc.to] = 0;
        }
    };
    visited[aux.s] = 1;
    dfs(aux.s);

    std::vector<HyperEdge> edges;
    for (size_t i = 0; i < out.paths.size(); ++i) {
        HyperEdge e;
        e.id = static_cast<EdgeId>(i);
        for (int ai : out.paths[i]) e.vertices.push_back(ai);
        std::sort(e.vertices.begin(), e.vertices.end());
        edges.push_back(std::move(e));
    }
    int n_arcs = static_cast<int>(aux.arcs.size());
    out.h = Hypergraph::from_edges(std::max(1, n_arcs), std::move(edges));
    return out;
}

namespace {

// shortest s->t distance in arcs; -1 if unreachable
int st_distance(const AuxGraph& aux) {
    std::vector<int> dist(aux.num_real_nodes + 2, -1);
    std::queue<int> q;
    dist[aux.s] = 0;
    q.push(aux.s);
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (int ai : aux.out[u]) {
            int w = aux.arcs[ai].to;
            if (dist[w] < 0) {
                dist[w] = dist[u] + 1;
                if (w == aux.t) return dist[w];
                q.push(w);
            }
        }
    }
    return dist[aux.t];
}

OrientResult orient_single(const Hypergraph& g, long lambda, const Rational& eps,
                           const OrientOptions& opt) {
    OrientResult out;
    Rational capq = (1 + eps) * Rational(lambda);
    long cap_d = floor_to_long(capq);
    if (Rational(cap_d) < capq) ++cap_d;  // ceil((1+eps) lambda)
    out.cap_d = cap_d;

    Orientation o = opt.worst_start ? worst_case_orientation(g) : initial_orientation(g);
    const int budget = std::max(
        1, static_cast<int>(std::ceil(opt.stage_budget_scale *
                                      std::log2(static_cast<double>(g.num_vertices() + 2)) /
                                      eps.get_d())));
    for (int i = 1; i <= budget; ++i) {
        auto aux = build_aux(g, o, cap_d);
        if (aux.out[aux.s].empty()) {
            out.early_exit = true;
            break;
        }
        auto ph = st_path_hypergraph(aux, i, opt.path_cap);
        Matching chosen;
        if (ph.h.num_edges() > 0) {
            HmmOptions ho;
            ho.seed = mix_seed(opt.seed, static_cast<uint64_t>(i));
            ho.delta = opt.delta;
            auto res = hmm(ph.h, opt.mode == OrientMode::Det ? HmmMode::Det : HmmMode::Rand, ho);
            chosen = res.matching;
        }
        ++out.stages;
        out.paths_reversed_per_stage.push_back(chosen.size());
        // reverse the real edges along every chosen path
        for (EdgeId pid : chosen.edge_ids) {
            for (int ai : ph.paths[ph.h.index_of(pid)]) {
                long handle = aux.arcs[ai].handle;
                if (handle < g.num_edges()) o.forward[handle] = !o.forward[handle];
            }
        }
        // the reversal of a maximal path set leaves no shorter s-t route
        auto aux2 = build_aux(g, o, cap_d);
        int d = st_distance(aux2);
        require(d < 0 || d > i, "short s-t path survived a maximal reversal");
    }
    auto degs = o.out_degrees(g);
    int worst = 0;
    for (int d : degs) worst = std::max(worst, d);
    bool s_isolated = true;
    for (int d : degs)
        if (d > cap_d) s_isolated = false;
    require(s_isolated == (worst <= cap_d), "bookkeeping mismatch");
    require(worst <= cap_d, "orientation exceeded the out-degree target");
    out.orientation = std::move(o);
    return out;
}

}  // namespace

OrientResult orient(const Hypergraph& g, long lambda, const Rational& eps,
                    const OrientOptions& opt) {
    require(lambda >= 1, "orient: lambda >= 1");
    require(eps > 0 && eps <= 1, "orient: eps in (0,1]");
    for (const auto& e : g.edges())
        require(e.vertices.size() == 2, "orientation needs a rank-2 multigraph");
    // multiplicity pre-check from the quantization preamble
    {
        std::map<std::pair<int, int>, long> mult;
        for (const auto& e : g.edges()) ++mult[{e.vertices[0], e.vertices[1]}];
        long bound = static_cast<long>(g.num_vertices()) * g.num_vertices() *
                     (floor_to_long(1 / eps) + 1);
        for (const auto& [k, c] : mult) {
            (void)k;
            require(c <= bound, "edge multiplicity above n^2 ceil(1/eps)");
        }
    }

    const long y = static_cast<long>(std::ceil(
        4.0 * std::log2(static_cast<double>(g.num_vertices() + 2)) / (eps.get_d() * eps.get_d())));
    if (opt.mode == OrientMode::Rand && lambda > y) {
        // random partition into ceil(lambda/y) classes, recurse at eps/10
        const long k = (lambda + y - 1) / y;
        Prng rng(mix_seed(opt.seed, 0x0217));
        std::vector<std::vector<EdgeId>> classes(k);
        for (const auto& e : g.edges()) classes[rng.below(static_cast<uint64_t>(k))].push_back(e.id);
        OrientResult out;
        Orientation combined;
        combined.forward.assign(g.num_edges(), 1);
        long lambda_cls = static_cast<long>(std::ceil(y * (1.0 + eps.get_d()))) + 1;
        for (long c = 0; c < k; ++c) {
            if (classes[c].empty()) continue;
            Hypergraph sub = subhypergraph(g, classes[c]);
            OrientOptions ro = opt;
            ro.seed = mix_seed(opt.seed, static_cast<uint64_t>(c), 0x71);
            auto r = orient_single(sub, lambda_cls, eps / 10, ro);
            out.stages += r.stages;
            for (int i = 0; i < sub.num_edges(); ++i)
                combined.forward[g.index_of(sub.edge(i).id)] = r.orientation.forward[i];
        }
        out.orientation = std::move(combined);
        Rational capq = (1 + eps) * Rational(lambda);
        out.cap_d = floor_to_long(capq) + (Rational(floor_to_long(capq)) < capq ? 1 : 0);
        auto degs = out.orientation.out_degrees(g);
        for (int d : degs)
            require(d <= out.cap_d, "combined class orientations exceeded the target");
        return out;
    }
    return orient_single(g, lambda, eps, opt);
}

std::string format_orientation(const Hypergraph& g, const Orientation& o) {
    std::ostringstream os;
    for (int e = 0; e < g.num_edges(); ++e) {
        const auto& vs = g.edge(e).vertices;
        int tail = o.forward[e] ? vs[0] : vs[1];
        int head = o.forward[e] ? vs[1] : vs[0];
        os << "O " << g.edge(e).id << " " << tail << " " << head << "\n";
    }
    return os.str();
}

}  // namespace hypermatch
