#include "hypermatch/fractional.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <map>
#include <sstream>

#include "hypermatch/derand.hpp"
#include "hypermatch/errors.hpp"
#include "hypermatch/prng.hpp"

namespace hypermatch {

namespace {

// log2(r) with the project-wide LOG_BASE = 2 convention
double log2_rank(long r) { return std::log2(static_cast<double>(std::max(2L, r))); }

}  // namespace

LpSolveResult lp_solve(const Hypergraph& h, const EdgeWeighting& a, const Rational& eps) {
    require(eps > 0 && eps < 1, "lp_solve: eps must lie in (0,1)");
    LpSolveResult out;
    out.h.set_q(1);
    const int m = h.num_edges();
    const int n = h.num_vertices();
    if (m == 0) return out;

    std::vector<Rational> weight(m);
    bool any_positive = false;
    for (int i = 0; i < m; ++i) {
        weight[i] = a.at(h.edge(i).id);
        if (weight[i] > 0) any_positive = true;
    }
    if (!any_positive) return out;  // h == 0 is the optimum

    // Multiplicative weights in floats pick the columns; loads stay integral
    // so the final primal and dual are exact.
    const double eps_hat = std::max(1e-3, eps.get_d() / 4.0);
    std::vector<double> price(n, 1.0);
    std::vector<double> wd(m);
    for (int i = 0; i < m; ++i) wd[i] = weight[i].get_d();
    std::vector<long> picks(m, 0), load(n, 0);

    const long chunk = std::max<long>(64, m);
    const long budget = 400L * chunk + 200L * static_cast<long>((m + n) / (eps_hat * eps_hat));
    const Rational one_minus(1 - eps);
    Rational ratio_num(1 + Rational(std::max(1e-4, eps_hat)));  // exact dual base 1+eps_hat'
    double best_gap = -1;

    auto certify = [&]() -> bool {
        long maxload = *std::max_element(load.begin(), load.end());
        if (maxload == 0) return false;
        Rational primal(0);
        for (int i = 0; i < m; ++i)
            if (picks[i] > 0) primal += weight[i] * Rational(picks[i]);
        primal /= Rational(maxload);
        // exact dual from the integral loads: y_v = base^{load_v}
        std::vector<Rational> y(n);
        Rational ysum(0);
        for (int v = 0; v < n; ++v) {
            y[v] = pow_rational(ratio_num, load[v]);
            ysum += y[v];
        }
        // scale so that sum_{v in e} y'_v >= a(e) for every edge
        Rational scale(0);
        for (int i = 0; i < m; ++i) {
            if (weight[i] == 0) continue;
            Rational cover(0);
            for (int v : h.edge(i).vertices) cover += y[v];
            Rational need = weight[i] / cover;
            if (need > scale) scale = need;
        }
        Rational dual = scale * ysum;
        if (primal >= one_minus * dual) {
            out.dual_bound = dual;
            out.value = primal;
            out.h.set_q(maxload);
            for (int i = 0; i < m; ++i) {
                if (picks[i] == 0) continue;
                Rational v(picks[i], maxload);
                v.canonicalize();
                out.h.set(h.edge(i).id, v);
            }
            return true;
        }
        best_gap = Rational(primal / dual).get_d();
        return false;
    };

    for (long it = 0; it < budget; ++it) {
        // best column by weight over current prices
        int best = -1;
        double best_ratio = 0;
        for (int i = 0; i < m; ++i) {
            if (wd[i] <= 0) continue;
            double cost = 0;
            for (int v : h.edge(i).vertices) cost += price[v];
            double r = wd[i] / cost;
            if (r > best_ratio) {
                best_ratio = r;
                best = i;
            }
        }
        if (best < 0) break;
        ++picks[best];
        ++out.iterations;
        for (int v : h.edge(best).vertices) {
            ++load[v];
            price[v] *= 1.0 + eps_hat;
        }
        // renormalize to dodge float overflow; selection is scale-invariant
        if ((it & 1023) == 1023) {
            double mx = *std::max_element(price.begin(), price.end());
            if (mx > 1e200)
                for (auto& p : price) p /= mx;
        }
        if ((it + 1) % chunk == 0 && certify()) {
            require(out.h.feasible(h), "lp_solve: infeasible output");
            return out;
        }
    }
    if (certify()) {
        require(out.h.feasible(h), "lp_solve: infeasible output");
        return out;
    }
    throw Error("lp_solve: certification failed within budget (gap " +
                std::to_string(best_gap) + ")");
}

FractionalMatching quantize_det(const Hypergraph& h, const EdgeWeighting& a,
                                const FractionalMatching& hin) {
    (void)a;
    const long q = 10L * std::max(1, h.max_degree());
    FractionalMatching out(q);
    for (const auto& e : h.edges()) {
        const Rational& v = hin.value(e.id);
        if (v == 0) continue;
        Rational scaled = v * Rational(q);
        Rational down(floor_to_long(scaled), q);
        down.canonicalize();
        if (down > 0) out.set(e.id, down);
    }
    require(out.feasible(h), "quantize_det: infeasible");
    require(out.proper(h), "quantize_det: improper");
    return out;
}

FractionalMatching quantize_rand(const Hypergraph& h, const EdgeWeighting& a,
                                 const FractionalMatching& hin, uint64_t seed) {
    (void)a;
    const long r = std::max(2, h.rank());
    const double lr = log2_rank(r);
    const long q = static_cast<long>(std::ceil(20.0 * lr));
    const long threshold = static_cast<long>(std::floor(20.0 * lr));  // discard if > t
    FractionalMatching out(q);

    // Poisson copies per edge at rate 10 h(e) log2 r
    std::vector<long> copies(h.num_edges(), 0);
    for (int i = 0; i < h.num_edges(); ++i) {
        const Rational& v = hin.value(h.edge(i).id);
        if (v == 0) continue;
        Prng rng(mix_seed(seed, static_cast<uint64_t>(h.edge(i).id), 0x90155));
        copies[i] = rng.poisson(10.0 * v.get_d() * lr);
    }
    std::vector<long> deg(h.num_vertices(), 0);
    for (int i = 0; i < h.num_edges(); ++i)
        if (copies[i] > 0)
            for (int v : h.edge(i).vertices) deg[v] += copies[i];
    for (int i = 0; i < h.num_edges(); ++i) {
        if (copies[i] == 0) continue;
        bool keep = true;
        for (int v : h.edge(i).vertices)
            if (deg[v] > threshold) { keep = false; break; }
        if (keep) out.set(h.edge(i).id, make_rational(1, q));
    }
    require(out.feasible(h), "quantize_rand: infeasible");
    require(out.proper(h), "quantize_rand: improper");
    return out;
}

long weight_class_of(const Rational& weight, long rq) {
    require(weight > 0 && rq >= 2, "weight_class_of: bad arguments");
    long i = static_cast<long>(std::floor(std::log(weight.get_d()) /
                                          std::log(static_cast<double>(rq))));
    // fix up float error exactly
    while (pow_rational(Rational(rq), i) > weight) --i;
    while (pow_rational(Rational(rq), i + 1) <= weight) ++i;
    return i;
}

FractionalMatching combine_weight_classes(
    const Hypergraph& h, const EdgeWeighting& a, long q,
    const std::vector<std::pair<long, FractionalMatching>>& class_matchings) {
    const long rq = static_cast<long>(std::max(2, h.rank())) * q;
    // class index of every positively-valued edge; also the per-vertex top class
    std::vector<long> top(h.num_vertices(), LONG_MIN);
    for (const auto& [cls, hm] : class_matchings) {
        for (const auto& [id, v] : hm.values()) {
            if (v == 0) continue;
            int idx = h.index_of(id);
            if (idx < 0) throw ClassMismatchError("unknown edge in class matching");
            long expect = weight_class_of(a.at(id), rq);
            if (expect != cls)
                throw ClassMismatchError("edge " + std::to_string(id) + " outside its class");
            for (int vx : h.edge(idx).vertices) top[vx] = std::max(top[vx], cls);
        }
    }
    FractionalMatching out(3 * q);
    Rational total(0), class_total(0);
    for (const auto& [cls, hm] : class_matchings) {
        for (const auto& [id, v] : hm.values()) {
            if (v == 0) continue;
            class_total += v * a.at(id);
            bool blocked = false;
            for (int vx : h.edge(h.index_of(id)).vertices)
                if (top[vx] >= cls + 3) { blocked = true; break; }
            if (blocked) continue;
            Rational scaled = v / 3;
            out.set(id, scaled);
            total += scaled * a.at(id);
        }
    }
    require(out.feasible(h), "combine: load above 1");
    require(out.proper(h), "combine: improper");
    require(Rational(6) * total >= class_total, "combine lost more than 5/6 of the class weight");
    return out;
}

FractionalPipelineResult fractional_matching(const Hypergraph& h, const EdgeWeighting& a,
                                             FracMode mode, uint64_t seed) {
    FractionalPipelineResult out;
    const long r = std::max(2, h.rank());
    const long q = mode == FracMode::Det
                       ? 10L * std::max(1, h.max_degree())
                       : static_cast<long>(std::ceil(20.0 * log2_rank(r)));
    const long rq = r * q;

    // occupied weight classes; zero-weight edges dropped before classing
    std::map<long, std::vector<EdgeId>> classes;
    for (const auto& e : h.edges()) {
        const Rational& w = a.at(e.id);
        if (w > 0) classes[weight_class_of(w, rq)].push_back(e.id);
    }
    out.classes = static_cast<long>(classes.size());
    if (classes.empty()) {
        out.h.set_q(3 * q);
        return out;
    }

    std::vector<std::pair<long, FractionalMatching>> per_class;
    for (const auto& [cls, ids] : classes) {
        Hypergraph sub = subhypergraph(h, ids);
        auto lp = lp_solve(sub, a, make_rational(1, 2));
        out.lp_iterations += lp.iterations;
        FractionalMatching hq =
            mode == FracMode::Det
                ? quantize_det(h, a, lp.h)
                : quantize_rand(sub, a, lp.h, mix_seed(seed, static_cast<uint64_t>(cls)));
        per_class.push_back({cls, std::move(hq)});
    }
    out.h = combine_weight_classes(h, a, q, per_class);
    out.value = out.h.weight(a);
    for (const auto& [cls, hm] : per_class) {
        (void)cls;
        out.class_sum += hm.weight(a);
    }
    return out;
}

namespace {

HmwmResult round_fractional(const Hypergraph& h, const EdgeWeighting& a,
                            const VertexColoring& good_col, const FractionalMatching& fm,
                            const Rational& fm_value, const RoundingParams* chain_params) {
    HmwmResult out;
    out.fractional_weight = fm_value;
    out.floor = make_rational(9, 100) * fm_value / Rational(static_cast<long>(std::max(2, h.rank())));
    if (fm.values().empty()) return out;

    // support sub-hypergraph with tight declared bounds
    std::vector<HyperEdge> kept;
    for (const auto& e : h.edges())
        if (fm.value(e.id) > 0) kept.push_back(e);
    Hypergraph support = Hypergraph::from_edges(h.num_vertices(), std::move(kept));
    auto support_col = restrict_good_coloring(h, good_col, support);

    auto rep = replicate(support, fm);
    if (rep.h.num_edges() == 0) return out;
    EdgeWeighting lifted;
    for (int i = 0; i < rep.h.num_edges(); ++i) lifted.set(rep.h.edge(i).id, a.at(rep.parent_of[i]));
    auto rep_col = replicate_coloring(support, support_col, rep);

    RoundingParams params = chain_params
                                ? *chain_params
                                : compute_params(BigInt(std::max(2, rep.h.max_degree())),
                                                 std::max(2, rep.h.rank()));
    auto dr = direct_round(rep.h, lifted, rep_col, params);
    out.used_chain = dr.used_chain;

    for (EdgeId copy : dr.matching.edge_ids) {
        int idx = rep.h.index_of(copy);
        out.matching.edge_ids.push_back(rep.parent_of[idx]);
    }
    out.matching.normalize();
    require(is_matching(h, out.matching), "rounded copies do not form a matching");
    for (EdgeId id : out.matching.edge_ids) out.weight += a.at(id);
    // dr.weight counts each copy once and copies of one parent collide,
    // so the pulled-back weight equals the replicate matching weight
    require(out.weight == dr.weight, "copy pullback changed the weight");
    require(out.weight >= out.floor, "hmwm floor violated");
    return out;
}

}  // namespace

HmwmResult hmwm_det(const Hypergraph& h, const EdgeWeighting& a, const VertexColoring& good_col,
                    const RoundingParams* chain_params) {
    auto fp = fractional_matching(h, a, FracMode::Det, 0);
    return round_fractional(h, a, good_col, fp.h, fp.value, chain_params);
}

HmwmResult hmwm_rand(const Hypergraph& h, const EdgeWeighting& a, const Rational& delta,
                     uint64_t seed, const RoundingParams* chain_params) {
    require(delta > 0 && delta < make_rational(1, 2), "hmwm_rand: delta must lie in (0, 1/2)");
    HmwmResult out;
    if (h.num_edges() == 0) return out;

    // t parallel randomized fractional matchings, averaged
    const long t = std::max<long>(1, static_cast<long>(std::ceil(
                                         4.0 * std::log2(1.0 / delta.get_d()))));
    std::vector<FractionalPipelineResult> parts;
    long q_each = 0;
    for (long i = 0; i < t; ++i) {
        parts.push_back(fractional_matching(h, a, FracMode::Rand, mix_seed(seed, i, 0xab)));
        q_each = std::max(q_each, parts.back().h.q());
    }
    FractionalMatching avg(q_each * t);
    for (const auto& e : h.edges()) {
        Rational sum(0);
        for (const auto& p : parts) sum += p.h.value(e.id);
        if (sum > 0) avg.set(e.id, sum / Rational(t));
    }
    require(avg.feasible(h), "averaged fractional matching infeasible");
    require(avg.proper(h), "average must be (t q)-proper");

    // replicate and sparsify by a random edge coloring
    std::vector<HyperEdge> kept;
    for (const auto& e : h.edges())
        if (avg.value(e.id) > 0) kept.push_back(e);
    if (kept.empty()) return out;
    Hypergraph support = Hypergraph::from_edges(h.num_vertices(), std::move(kept));
    auto rep = replicate(support, avg);
    if (rep.h.num_edges() == 0) return out;

    long dprime = std::max(1, rep.h.observed_max_degree());
    long colors = static_cast<long>(
        std::ceil(4.0 * static_cast<double>(dprime) * std::max(2, h.rank()) / delta.get_d()));
    Prng rng(mix_seed(seed, 0x5a, 0xcc));
    std::vector<long> color(rep.h.num_edges());
    for (int i = 0; i < rep.h.num_edges(); ++i)
        color[i] = static_cast<long>(rng.below(static_cast<uint64_t>(colors)));
    // drop both sides of every same-colored adjacent pair
    std::vector<char> drop(rep.h.num_edges(), 0);
    for (int v = 0; v < rep.h.num_vertices(); ++v) {
        const auto& inc = rep.h.incident_edges(v);
        for (size_t i = 0; i < inc.size(); ++i)
            for (size_t j = i + 1; j < inc.size(); ++j)
                if (color[inc[i]] == color[inc[j]]) drop[inc[i]] = drop[inc[j]] = 1;
    }
    std::vector<HyperEdge> surviving;
    std::vector<EdgeId> surviving_parent;
    for (int i = 0; i < rep.h.num_edges(); ++i) {
        if (drop[i]) continue;
        surviving.push_back(rep.h.edge(i));
        surviving_parent.push_back(rep.parent_of[i]);
    }
    if (surviving.empty()) return out;
    Hypergraph sparsified = Hypergraph::from_edges(h.num_vertices(), surviving);
    EdgeWeighting lifted;
    for (int i = 0; i < sparsified.num_edges(); ++i)
        lifted.set(sparsified.edge(i).id, a.at(surviving_parent[i]));

    auto col = good_coloring(sparsified);
    auto inner = hmwm_det(sparsified, lifted, col, chain_params);

    for (EdgeId copy : inner.matching.edge_ids)
        out.matching.edge_ids.push_back(surviving_parent[sparsified.index_of(copy)]);
    out.matching.normalize();
    require(is_matching(h, out.matching), "sparsified pullback is not a matching");
    for (EdgeId id : out.matching.edge_ids) out.weight += a.at(id);
    out.fractional_weight = avg.weight(a);
    out.floor = inner.floor;
    out.used_chain = inner.used_chain;
    return out;
}

std::string format_fractional(const FractionalMatching& h) {
    std::vector<std::pair<EdgeId, Rational>> items(h.values().begin(), h.values().end());
    std::sort(items.begin(), items.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::ostringstream os;
    for (const auto& [id, v] : items) os << "F " << id << " " << format_rational(v) << "\n";
    return os.str();
}

}  // namespace hypermatch
