#include "hypermatch/graphmatch.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "hypermatch/errors.hpp"

namespace hypermatch {

namespace {

struct WalkContext {
    const Hypergraph* g;
    const EdgeWeighting* a;
    std::vector<int> matched_edge;  // edge index of M at v, or -1
    std::vector<char> in_m;         // by edge index
    long budget = 0;
    int max_edges = 0;

    // best candidate per vertex set
    std::map<std::vector<int>, Augmentation> found;

    std::vector<int> path_edges;     // edge indices
    std::vector<char> on_path_v;     // vertex flags
    std::vector<char> on_path_e;     // edge flags
    std::vector<int> path_vertices;  // walk order, starting vertex first
    Rational gain;

    void consider(bool cycle) {
        if (gain <= 0) return;
        std::vector<int> key = path_vertices;
        std::sort(key.begin(), key.end());
        Augmentation cand;
        cand.cycle = cycle;
        cand.gain = gain;
        for (int e : path_edges) cand.edges.push_back(g->edge(e).id);
        auto it = found.find(key);
        if (it == found.end() || cand.gain > it->second.gain) found[std::move(key)] = cand;
    }

    // u: current endpoint; expect_matched: the type of the next edge
    void dfs(int start, int u, bool expect_matched) {
        if (--budget < 0) throw EnumerationOverflowError("augmentation walk budget exhausted");
        if (static_cast<int>(path_edges.size()) >= max_edges) return;
        if (expect_matched) {
            int me = matched_edge[u];
            if (me < 0 || on_path_e[me]) return;
            step(start, u, me, true);
        } else {
            for (int e : g->incident_edges(u)) {
                if (in_m[e] || on_path_e[e]) continue;
                step(start, u, e, false);
            }
        }
    }

    void step(int start, int u, int e, bool is_matched) {
        const auto& ed = g->edge(e);
        int v = ed.vertices[0] == u ? ed.vertices[1] : ed.vertices[0];
        Rational delta = is_matched ? -(*a).at(ed.id) : (*a).at(ed.id);

        if (v == start && path_edges.size() >= 2) {
            // closing a cycle: the first edge's type must be opposite so the
            // two walk edges at `start` alternate
            bool first_matched = in_m[path_edges.front()];
            if (first_matched != is_matched) {
                path_edges.push_back(e);
                gain += delta;
                consider(true);
                gain -= delta;
                path_edges.pop_back();
            }
            return;
        }
        if (on_path_v[v]) return;

        path_edges.push_back(e);
        path_vertices.push_back(v);
        on_path_v[v] = 1;
        on_path_e[e] = 1;
        gain += delta;

        // a prefix ending in a matched edge is always a legal stopping point;
        // ending on an unmatched edge needs a free outer endpoint
        if (is_matched || matched_edge[v] < 0) consider(false);
        dfs(start, v, !is_matched);

        gain -= delta;
        on_path_e[e] = 0;
        on_path_v[v] = 0;
        path_vertices.pop_back();
        path_edges.pop_back();
    }
};

}  // namespace

PathHypergraph enumerate_augmentations(const Hypergraph& g, const EdgeWeighting& a,
                                       const Matching& m, int l, const EnumerateOptions& opt) {
    require(l >= 1, "enumerate_augmentations: l >= 1");
    require(is_matching(g, m), "enumerate_augmentations: invalid matching");
    for (const auto& e : g.edges())
        require(e.vertices.size() == 2, "augmentations need a rank-2 graph");

    WalkContext ctx;
    ctx.g = &g;
    ctx.a = &a;
    ctx.budget = opt.cap;
    ctx.max_edges = 2 * l;
    ctx.matched_edge.assign(g.num_vertices(), -1);
    ctx.in_m.assign(g.num_edges(), 0);
    for (EdgeId id : m.edge_ids) {
        int idx = g.index_of(id);
        ctx.in_m[idx] = 1;
        for (int v : g.edge(idx).vertices) ctx.matched_edge[v] = idx;
    }
    ctx.on_path_v.assign(g.num_vertices(), 0);
    ctx.on_path_e.assign(g.num_edges(), 0);

    for (int v0 = 0; v0 < g.num_vertices(); ++v0) {
        ctx.path_vertices = {v0};
        ctx.on_path_v[v0] = 1;
        if (ctx.matched_edge[v0] < 0)
            ctx.dfs(v0, v0, false);  // starting unmatched needs a free endpoint
        else
            ctx.dfs(v0, v0, true);
        ctx.on_path_v[v0] = 0;
    }

    // thin per vertex to the strongest gains; rank by gain then vertex set
    PathHypergraph out;
    std::vector<const std::pair<const std::vector<int>, Augmentation>*> items;
    for (const auto& kv : ctx.found) items.push_back(&kv);
    std::sort(items.begin(), items.end(), [](const auto* x, const auto* y) {
        if (x->second.gain != y->second.gain) return x->second.gain > y->second.gain;
        return x->first < y->first;
    });
    if (static_cast<long>(items.size()) > opt.max_hyperedges) {
        items.resize(opt.max_hyperedges);
        out.truncated = true;
    }
    std::vector<int> through(g.num_vertices(), 0);
    std::vector<HyperEdge> edges;
    EdgeId next_id = 0;
    for (const auto* kv : items) {
        bool ok = true;
        for (int v : kv->first)
            if (through[v] >= opt.per_vertex_keep) { ok = false; break; }
        if (!ok) {
            out.truncated = true;
            continue;
        }
        for (int v : kv->first) ++through[v];
        edges.push_back(HyperEdge{next_id, kv->first});
        out.gains.set(next_id, kv->second.gain);
        out.back.push_back(kv->second);
        ++next_id;
    }
    out.h = Hypergraph::from_edges(g.num_vertices(), std::move(edges));
    return out;
}

bool is_valid_augmentation(const Hypergraph& g, const Matching& m, const Augmentation& p) {
    if (p.edges.empty()) return false;
    std::vector<int> idx;
    for (EdgeId id : p.edges) {
        int i = g.index_of(id);
        if (i < 0) return false;
        idx.push_back(i);
    }
    auto in_m = [&](int i) { return m.contains(g.edge(i).id); };
    auto matched_at = [&](int v) {
        for (int e : g.incident_edges(v))
            if (m.contains(g.edge(e).id)) return true;
        return false;
    };
    // rebuild the vertex walk; consecutive edges share exactly one vertex
    std::vector<int> verts;
    {
        const auto& e0 = g.edge(idx[0]).vertices;
        if (idx.size() == 1) {
            verts = {e0[0], e0[1]};
        } else {
            const auto& e1 = g.edge(idx[1]).vertices;
            int shared;
            if (e0[0] == e1[0] || e0[0] == e1[1])
                shared = e0[0];
            else if (e0[1] == e1[0] || e0[1] == e1[1])
                shared = e0[1];
            else
                return false;
            verts = {e0[0] == shared ? e0[1] : e0[0], shared};
            for (size_t i = 1; i < idx.size(); ++i) {
                const auto& ev = g.edge(idx[i]).vertices;
                int cur = verts.back();
                if (ev[0] == cur)
                    verts.push_back(ev[1]);
                else if (ev[1] == cur)
                    verts.push_back(ev[0]);
                else
                    return false;
            }
        }
    }
    bool cycle = verts.size() >= 3 && verts.front() == verts.back();
    if (cycle != p.cycle) return false;
    std::vector<int> uniq(verts.begin(), cycle ? verts.end() - 1 : verts.end());
    std::sort(uniq.begin(), uniq.end());
    for (size_t i = 1; i < uniq.size(); ++i)
        if (uniq[i] == uniq[i - 1]) return false;
    for (size_t i = 1; i < idx.size(); ++i)
        if (in_m(idx[i]) == in_m(idx[i - 1])) return false;
    if (cycle) {
        if (in_m(idx.front()) == in_m(idx.back())) return false;
    } else {
        if (!in_m(idx.front()) && matched_at(verts.front())) return false;
        if (!in_m(idx.back()) && matched_at(verts.back())) return false;
    }
    return true;
}

Matching augment(const Hypergraph& g, const EdgeWeighting& a, const Matching& m,
                 const std::vector<Augmentation>& ps) {
    for (const auto& p : ps)
        if (!is_valid_augmentation(g, m, p))
            throw NotValidAugmentationError("invalid augmentation in batch");

    std::vector<char> used(g.num_vertices(), 0);
    for (const auto& p : ps) {
        std::vector<int> verts;
        for (EdgeId id : p.edges)
            for (int v : g.edge(g.index_of(id)).vertices) verts.push_back(v);
        std::sort(verts.begin(), verts.end());
        verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
        for (int v : verts) {
            if (used[v]) throw NotDisjointError("augmentations share vertex " + std::to_string(v));
            used[v] = 1;
        }
    }

    Rational before(0), total_gain(0);
    for (EdgeId id : m.edge_ids) before += a.at(id);
    std::vector<EdgeId> result = m.edge_ids;
    auto toggle = [&](EdgeId id) {
        auto it = std::lower_bound(result.begin(), result.end(), id);
        if (it != result.end() && *it == id)
            result.erase(it);
        else
            result.insert(it, id);
    };
    for (const auto& p : ps) {
        total_gain += p.gain;
        for (EdgeId id : p.edges) toggle(id);
    }
    Matching out{result};
    out.normalize();
    require(is_matching(g, out), "augment produced a non-matching");
    Rational after(0);
    for (EdgeId id : out.edge_ids) after += a.at(id);
    require(after == before + total_gain, "gain bookkeeping mismatch");
    return out;
}

GmwmResult gmwm(const Hypergraph& g, const EdgeWeighting& a, const Rational& eps,
                const GmwmOptions& opt) {
    require(eps > 0 && eps < 1, "gmwm: eps must lie in (0,1)");
    Rational two_over = 2 / eps;
    long l = floor_to_long(two_over);
    if (Rational(l) != two_over) ++l;  // ceil(2/eps)
    const double epsd = eps.get_d();
    const int t_max = std::max(1, static_cast<int>(std::ceil(8.0 * std::log(4.0 / epsd) / epsd)));

    GmwmResult out;
    Matching m;
    for (int stage = 0; stage < t_max; ++stage) {
        auto ph = enumerate_augmentations(g, a, m, static_cast<int>(l), opt.enumerate);
        if (ph.h.num_edges() == 0) {
            out.early_exit = !ph.truncated;
            break;
        }
        ++out.stages;

        Matching chosen;
        if (opt.mode == GmwmMode::Det) {
            auto col = good_coloring(ph.h);
            chosen = hmwm_det(ph.h, ph.gains, col).matching;
        } else {
            Rational dprime = opt.delta / Rational(2L * t_max);
            chosen = hmwm_rand(ph.h, ph.gains, dprime,
                               mix_seed(opt.seed, static_cast<uint64_t>(stage)))
                         .matching;
        }
        if (chosen.size() == 0) chosen.edge_ids = {ph.h.edge(0).id};  // top gain, ensures progress

        std::vector<Augmentation> batch;
        for (EdgeId id : chosen.edge_ids) batch.push_back(ph.back[ph.h.index_of(id)]);
        out.augmentations_applied += static_cast<long>(batch.size());
        m = augment(g, a, m, batch);
    }
    out.matching = m;
    for (EdgeId id : m.edge_ids) out.weight += a.at(id);
    return out;
}

}  // namespace hypermatch
