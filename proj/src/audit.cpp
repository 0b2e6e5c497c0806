#include "hypermatch/audit.hpp"

#include <algorithm>

#include "hypermatch/coloring.hpp"
#include "hypermatch/derand.hpp"
#include "hypermatch/errors.hpp"
#include "hypermatch/oracles.hpp"
#include "hypermatch/prng.hpp"

namespace hypermatch {

namespace {

std::string vkey(int v) { return "v:" + std::to_string(v); }
std::string ekey(EdgeId e) { return "e:" + std::to_string(e); }

AlgorithmRun hook_good_coloring(const Hypergraph& h) {
    AlgorithmRun out;
    auto col = good_coloring(h);
    for (int v = 0; v < h.num_vertices(); ++v) out.outputs[vkey(v)] = std::to_string(col.color[v]);
    for (int i = 0; i < h.num_edges(); ++i)
        out.outputs[ekey(h.edge(i).id)] =
            std::to_string(col.color[h.num_vertices() + i]);
    // one priority round spans two incidence hops
    out.declared_rounds = 2 * col.rounds;
    return out;
}

AlgorithmRun hook_degree_split(const Hypergraph& h, const EdgeWeighting& a,
                               const AuditParams& p) {
    AlgorithmRun out;
    auto col = good_coloring(h);
    DegreeSplitOptions opt;
    opt.alpha_override = p.alpha_override;
    opt.enforce_precondition = p.alpha_override == 0;
    opt.enforce_retention = false;
    auto sp = degree_split(h, a, p.eps, p.eta, col, opt);
    for (const auto& e : h.edges()) out.outputs[ekey(e.id)] = "dropped";
    for (EdgeId id : sp.left) out.outputs[ekey(id)] = "left";
    for (EdgeId id : sp.right) out.outputs[ekey(id)] = "right";
    out.declared_rounds = sp.declared_rounds;
    return out;
}

AlgorithmRun hook_simple_matching(const Hypergraph& h, const EdgeWeighting& a) {
    AlgorithmRun out;
    auto col = good_coloring(h);
    auto sm = simple_matching(h, a, col);
    for (const auto& e : h.edges()) out.outputs[ekey(e.id)] = "out";
    for (EdgeId id : sm.selected) out.outputs[ekey(id)] = "selected";
    for (EdgeId id : sm.matching.edge_ids) out.outputs[ekey(id)] = "matched";
    out.declared_rounds = sm.declared_rounds;
    return out;
}

}  // namespace

AlgorithmRun run_locality_hook(const std::string& name, const Hypergraph& h,
                               const EdgeWeighting& a, const AuditParams& params) {
    if (name == "good_coloring") return hook_good_coloring(h);
    if (name == "degree_split") return hook_degree_split(h, a, params);
    if (name == "simple_matching") return hook_simple_matching(h, a);
    throw Error("unknown locality hook: " + name);
}

std::vector<int> touched_nodes(const Hypergraph& h, const Perturbation& p) {
    int idx = h.index_of(p.target);
    require(idx >= 0, "perturbation target missing");
    std::vector<int> out{h.num_vertices() + idx};
    for (int v : h.edge(idx).vertices) out.push_back(v);
    return out;
}

namespace {

HypergraphFile apply_perturbation(const Hypergraph& h, const EdgeWeighting& a,
                                  const Perturbation& p) {
    HypergraphFile out;
    std::vector<HyperEdge> edges;
    EdgeWeighting aw;
    for (const auto& e : h.edges()) {
        if (p.kind == Perturbation::Kind::DeleteEdge && e.id == p.target) continue;
        edges.push_back(e);
        if (p.kind == Perturbation::Kind::Reweight && e.id == p.target)
            aw.set(e.id, a.at(e.id) + 1);
        else
            aw.set(e.id, a.at(e.id));
    }
    out.h = Hypergraph(h.num_vertices(), h.rank(), h.max_degree(), std::move(edges));
    out.a = std::move(aw);
    return out;
}

int entity_node(const Hypergraph& h, const std::string& entity) {
    require(entity.size() > 2, "bad entity");
    long id = std::stol(entity.substr(2));
    if (entity[0] == 'v') return static_cast<int>(id);
    int idx = h.index_of(id);
    require(idx >= 0, "unknown entity edge");
    return h.num_vertices() + idx;
}

}  // namespace

bool audit_algorithm(const std::string& name, const Hypergraph& h, const EdgeWeighting& a,
                     const AuditParams& params, const std::string& entity,
                     const Perturbation& p) {
    auto base = run_locality_hook(name, h, a, params);
    const int radius = base.declared_rounds;

    auto inc = incidence_graph(h);
    auto dist = inc.g.bfs_distances(entity_node(h, entity));
    for (int node : touched_nodes(h, p)) {
        if (dist[node] >= 0 && dist[node] <= radius)
            throw InvalidPerturbationError("perturbation at distance " +
                                           std::to_string(dist[node]) + " <= radius " +
                                           std::to_string(radius));
    }

    auto changed = apply_perturbation(h, a, p);
    auto after = run_locality_hook(name, changed.h, changed.a, params);
    auto i1 = base.outputs.find(entity);
    auto i2 = after.outputs.find(entity);
    if (i1 == base.outputs.end() || i2 == after.outputs.end()) return false;
    return i1->second == i2->second;
}

namespace {

// ring of dense blobs keeps a long incidence diameter while every blob
// vertex has enough degree for virtual-node splitting
oracles::GeneratedInstance gen_blob_ring(int blobs, int multiplicity, uint64_t seed) {
    std::vector<HyperEdge> edges;
    EdgeId next = 0;
    for (int b = 0; b < blobs; ++b) {
        int u = 2 * b, v = 2 * b + 1;
        for (int k = 0; k < multiplicity; ++k) edges.push_back({next++, {u, v}});
        int w = (2 * (b + 1)) % (2 * blobs);
        edges.push_back({next++, {std::min(v, w), std::max(v, w)}});
    }
    Hypergraph h = Hypergraph::from_edges(2 * blobs, std::move(edges));
    EdgeWeighting a = oracles::random_weights(h, oracles::WeightKind::RandomRational,
                                              mix_seed(seed, 0xb10b));
    return {std::move(h), std::move(a)};
}

}  // namespace

std::vector<AuditSample> run_locality_suite(const std::string& algorithm, int samples,
                                            uint64_t seed) {
    std::vector<AuditSample> out;
    Prng rng(mix_seed(seed, 0xad17));
    int attempts = 0;
    while (static_cast<int>(out.size()) < samples && attempts < samples * 60) {
        ++attempts;
        AuditParams params;
        oracles::GeneratedInstance gi;
        if (algorithm == "degree_split") {
            params.alpha_override = 4;
            params.eps = make_rational(1, 2);
            params.eta = make_rational(1, 2);
            gi = gen_blob_ring(40 + static_cast<int>(rng.below(20)), 12, rng.next());
        } else {
            int n = 48 + static_cast<int>(rng.below(32));
            gi = oracles::gen_ring(n);
            if (rng.below(2) == 0 && algorithm == "simple_matching")
                gi.a = oracles::random_weights(gi.h, oracles::WeightKind::RandomRational,
                                               rng.next());
        }

        auto base = run_locality_hook(algorithm, gi.h, gi.a, params);
        auto inc = incidence_graph(gi.h);

        // sample an entity, then a perturbation target beyond the radius
        int node = static_cast<int>(rng.below(static_cast<uint64_t>(inc.g.num_nodes())));
        std::string entity = node < gi.h.num_vertices()
                                 ? "v:" + std::to_string(node)
                                 : "e:" + std::to_string(
                                       gi.h.edge(node - gi.h.num_vertices()).id);
        if (algorithm != "good_coloring" && node < gi.h.num_vertices()) continue;
        auto dist = inc.g.bfs_distances(node);
        std::vector<EdgeId> far;
        for (int i = 0; i < gi.h.num_edges(); ++i) {
            int en = gi.h.num_vertices() + i;
            bool ok = dist[en] > base.declared_rounds;
            for (int v : gi.h.edge(i).vertices)
                if (dist[v] >= 0 && dist[v] <= base.declared_rounds) ok = false;
            if (ok) far.push_back(gi.h.edge(i).id);
        }
        if (far.empty()) continue;

        Perturbation p;
        p.target = far[rng.below(far.size())];
        p.kind = (algorithm != "good_coloring" && rng.below(2) == 0)
                     ? Perturbation::Kind::Reweight
                     : Perturbation::Kind::DeleteEdge;

        AuditSample s;
        s.algorithm = algorithm;
        s.entity = entity;
        s.declared_rounds = base.declared_rounds;
        s.distance = dist[gi.h.num_vertices() + gi.h.index_of(p.target)];
        s.passed = audit_algorithm(algorithm, gi.h, gi.a, params, entity, p);
        out.push_back(s);
    }
    return out;
}

}  // namespace hypermatch
