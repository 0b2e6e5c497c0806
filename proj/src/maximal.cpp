#include "hypermatch/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_map>

#include "hypermatch/errors.hpp"
#include "hypermatch/prng.hpp"

namespace hypermatch {

namespace {

bool residual_empty(const Hypergraph& h, const Matching& m) {
    return residual(h, m).num_edges() == 0;
}

// components of the residual by shared vertices
std::vector<std::vector<EdgeId>> residual_components(const Hypergraph& res) {
    const int n = res.num_vertices();
    std::vector<int> parent(n);
    for (int v = 0; v < n; ++v) parent[v] = v;
    std::function<int(int)> find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (const auto& e : res.edges())
        for (size_t i = 1; i < e.vertices.size(); ++i) {
            int a = find(e.vertices[0]), b = find(e.vertices[i]);
            if (a != b) parent[a] = b;
        }
    std::unordered_map<int, std::vector<EdgeId>> by_root;
    for (const auto& e : res.edges()) by_root[find(e.vertices[0])].push_back(e.id);
    std::vector<std::vector<EdgeId>> out;
    for (auto& [root, ids] : by_root) {
        (void)root;
        std::sort(ids.begin(), ids.end());
        out.push_back(std::move(ids));
    }
    std::sort(out.begin(), out.end());
    return out;
}

// det/rand staged loop on an arbitrary sub-hypergraph, committing into m
void hmm_loop(const Hypergraph& h, HmmMode mode, const HmmOptions& opt, HmmResult& out,
              Matching& m, const std::vector<EdgeId>& scope) {
    const long stage_budget =
        8L * std::max(2, h.rank()) *
            static_cast<long>(std::ceil(std::log2(static_cast<double>(h.num_edges() + 2)))) +
        1;
    EdgeWeighting unit;
    for (EdgeId id : scope) unit.set(id, Rational(1));

    Hypergraph res = residual(subhypergraph(h, scope), m);
    long stage = 0;
    while (res.num_edges() > 0) {
        HmmStage log;
        log.residual_edges = res.num_edges();
        Matching found;
        if (static_cast<long>(out.stages) < 4 * stage_budget) {
            // tighten declared bounds on the shrinking residual
            std::vector<HyperEdge> es(res.edges().begin(), res.edges().end());
            Hypergraph tight = Hypergraph::from_edges(res.num_vertices(), std::move(es));
            if (mode == HmmMode::Rand) {
                Rational dprime = opt.delta / Rational(2 * stage_budget);
                found = hmwm_rand(tight, unit, dprime,
                                  mix_seed(opt.seed, static_cast<uint64_t>(stage), 0x517),
                                  opt.chain_params)
                            .matching;
            } else {
                auto col = good_coloring(tight);
                found = hmwm_det(tight, unit, col, opt.chain_params).matching;
            }
        }
        if (found.size() == 0) {
            // guaranteed progress: lowest-id edge of the residual
            found.edge_ids = {res.edge(0).id};
            log.greedy_fallback = true;
        }
        log.committed = found.size();
        for (EdgeId id : found.edge_ids) m.edge_ids.push_back(id);
        m.normalize();
        require(is_matching(h, m), "hmm committed a conflicting stage");
        res = residual(res, found);
        out.log.push_back(log);
        ++out.stages;
        ++stage;
        require(stage <= h.num_edges() + 1, "hmm failed to make progress");
    }
}

}  // namespace

SampleResult sample_matching(const Hypergraph& h, uint64_t seed) {
    if (h.num_edges() == 0) return {};
    EdgeWeighting unit = EdgeWeighting::constant(h, Rational(1));
    auto lp = lp_solve(h, unit, make_rational(1, 2));
    return sample_matching(h, seed, lp.h, lp.value);
}

SampleResult sample_matching(const Hypergraph& h, uint64_t seed,
                             const FractionalMatching& presolved, const Rational& mass) {
    SampleResult out;
    if (h.num_edges() == 0) return out;
    out.fractional_mass = mass;
    const long r = std::max(2, h.rank());

    std::vector<char> picked(h.num_edges(), 0);
    for (int i = 0; i < h.num_edges(); ++i) {
        Rational p = presolved.value(h.edge(i).id) / Rational(10 * r);
        Prng rng(mix_seed(seed, static_cast<uint64_t>(h.edge(i).id), 0x5a17));
        picked[i] = rng.bernoulli(p) ? 1 : 0;
    }
    std::vector<int> deg(h.num_vertices(), 0);
    for (int i = 0; i < h.num_edges(); ++i)
        if (picked[i])
            for (int v : h.edge(i).vertices) ++deg[v];
    for (int i = 0; i < h.num_edges(); ++i) {
        if (!picked[i]) continue;
        bool isolated = true;
        for (int v : h.edge(i).vertices)
            if (deg[v] > 1) { isolated = false; break; }
        if (isolated) out.matching.edge_ids.push_back(h.edge(i).id);
    }
    out.matching.normalize();
    require(is_matching(h, out.matching), "sampled set is not a matching");
    return out;
}

LubyResult luby_mis_line_graph(const Hypergraph& h, uint64_t seed) {
    LubyResult out;
    std::vector<char> alive(h.num_edges(), 1);
    std::vector<char> chosen(h.num_edges(), 0);
    int remaining = h.num_edges();
    while (remaining > 0) {
        ++out.rounds;
        std::vector<uint64_t> prio(h.num_edges(), 0);
        for (int i = 0; i < h.num_edges(); ++i)
            if (alive[i])
                prio[i] = mix_seed(seed, static_cast<uint64_t>(h.edge(i).id),
                                   static_cast<uint64_t>(out.rounds));
        // an edge joins when it beats every alive intersecting edge
        std::vector<char> winner(h.num_edges(), 0);
        for (int i = 0; i < h.num_edges(); ++i) {
            if (!alive[i]) continue;
            bool best = true;
            for (int v : h.edge(i).vertices) {
                for (int j : h.incident_edges(v)) {
                    if (j == i || !alive[j]) continue;
                    if (prio[j] < prio[i] ||
                        (prio[j] == prio[i] && h.edge(j).id < h.edge(i).id)) {
                        best = false;
                        break;
                    }
                }
                if (!best) break;
            }
            winner[i] = best;
        }
        for (int i = 0; i < h.num_edges(); ++i) {
            if (!winner[i]) continue;
            chosen[i] = 1;
            alive[i] = 0;
            --remaining;
        }
        // drop the neighborhood of the new picks
        std::vector<char> blocked(h.num_vertices(), 0);
        for (int i = 0; i < h.num_edges(); ++i)
            if (chosen[i])
                for (int v : h.edge(i).vertices) blocked[v] = 1;
        for (int i = 0; i < h.num_edges(); ++i) {
            if (!alive[i]) continue;
            for (int v : h.edge(i).vertices)
                if (blocked[v]) {
                    alive[i] = 0;
                    --remaining;
                    break;
                }
        }
        require(out.rounds <= h.num_edges() + 2, "line-graph rounds exceeded the edge count");
    }
    for (int i = 0; i < h.num_edges(); ++i)
        if (chosen[i]) out.matching.edge_ids.push_back(h.edge(i).id);
    out.matching.normalize();
    require(is_matching(h, out.matching), "line-graph selection is not a matching");
    require(residual_empty(h, out.matching), "line-graph matching is not maximal");
    return out;
}

HmmResult hmm(const Hypergraph& h, HmmMode mode, const HmmOptions& opt) {
    HmmResult out;
    Matching m;
    if (h.num_edges() == 0) return out;

    if (mode == HmmMode::Shatter) {
        // phase I: truncated random priorities on the line graph
        const long r = std::max(2, h.rank());
        const long dmax = std::max(1, h.max_degree());
        const int rounds_budget =
            4 * static_cast<int>(std::ceil(std::log2(static_cast<double>(r * dmax) + 2)));
        std::vector<char> alive(h.num_edges(), 1);
        for (int round = 1; round <= rounds_budget; ++round) {
            ++out.phase1_rounds;
            std::vector<char> winner(h.num_edges(), 0);
            std::vector<uint64_t> prio(h.num_edges(), 0);
            for (int i = 0; i < h.num_edges(); ++i)
                if (alive[i])
                    prio[i] = mix_seed(opt.seed, static_cast<uint64_t>(h.edge(i).id),
                                       static_cast<uint64_t>(round));
            for (int i = 0; i < h.num_edges(); ++i) {
                if (!alive[i]) continue;
                bool best = true;
                for (int v : h.edge(i).vertices) {
                    for (int j : h.incident_edges(v)) {
                        if (j == i || !alive[j]) continue;
                        if (prio[j] < prio[i] ||
                            (prio[j] == prio[i] && h.edge(j).id < h.edge(i).id)) {
                            best = false;
                            break;
                        }
                    }
                    if (!best) break;
                }
                if (best) winner[i] = 1;
            }
            std::vector<char> blocked(h.num_vertices(), 0);
            for (int i = 0; i < h.num_edges(); ++i)
                if (winner[i]) {
                    m.edge_ids.push_back(h.edge(i).id);
                    alive[i] = 0;
                    for (int v : h.edge(i).vertices) blocked[v] = 1;
                }
            for (int i = 0; i < h.num_edges(); ++i) {
                if (!alive[i]) continue;
                for (int v : h.edge(i).vertices)
                    if (blocked[v]) {
                        alive[i] = 0;
                        break;
                    }
            }
        }
        m.normalize();
        require(is_matching(h, m), "phase I produced a conflict");

        Hypergraph res = residual(h, m);
        auto comps = residual_components(res);
        for (const auto& c : comps)
            out.largest_component = std::max(out.largest_component, static_cast<int>(c.size()));

        // phase II: per component, sampled matchings
        const int iters = 4 * static_cast<int>(r) *
                          static_cast<int>(std::ceil(std::log2(static_cast<double>(r * dmax) + 2)));
        for (size_t c = 0; c < comps.size(); ++c) {
            for (int t = 0; t < iters; ++t) {
                Hypergraph comp = residual(subhypergraph(h, comps[c]), m);
                if (comp.num_edges() == 0) break;
                std::vector<HyperEdge> es(comp.edges().begin(), comp.edges().end());
                Hypergraph tight = Hypergraph::from_edges(comp.num_vertices(), std::move(es));
                auto s = sample_matching(tight, mix_seed(opt.seed, c * 131 + t, 0x9e2));
                for (EdgeId id : s.matching.edge_ids) m.edge_ids.push_back(id);
                m.normalize();
                require(is_matching(h, m), "phase II conflict");
            }
        }
        // phase III: deterministic finish per component
        Hypergraph res2 = residual(h, m);
        auto comps2 = residual_components(res2);
        for (const auto& ids : comps2) hmm_loop(h, HmmMode::Det, opt, out, m, ids);
    } else {
        std::vector<EdgeId> all;
        for (const auto& e : h.edges()) all.push_back(e.id);
        hmm_loop(h, mode, opt, out, m, all);
    }

    require(residual_empty(h, m), "matching is not maximal");
    out.matching = m;
    return out;
}

}  // namespace hypermatch
