#include "hypermatch/derand.hpp"

#include <algorithm>
#include <map>

#include "hypermatch/errors.hpp"

namespace hypermatch {

const ValueSpace& ValueSpace::fair_bit() {
    static const ValueSpace v{{{0, make_rational(1, 2)}, {1, make_rational(1, 2)}}};
    return v;
}

ValueSpace ValueSpace::bernoulli(const Rational& p_one) {
    ValueSpace v;
    v.support = {{0, 1 - p_one}, {1, p_one}};
    v.validate();
    return v;
}

void ValueSpace::validate() const {
    Rational sum(0);
    int prev = -1;
    bool first = true;
    for (const auto& [val, p] : support) {
        require(p >= 0 && p <= 1, "value probability outside [0,1]");
        require(first || val > prev, "support values must ascend");
        prev = val;
        first = false;
        sum += p;
    }
    require(sum == 1, "support probabilities must sum to 1");
}

namespace {

// Same-colored random nodes must never write to a common flag; a proper
// coloring of the square of the communication graph guarantees this.
void check_conflicts(const std::vector<int>& coloring, BlackBoxEstimator& est) {
    std::vector<std::pair<int, int>> buf;
    for (int f = 0; f < est.num_flags(); ++f) {
        const auto& writers = est.writers_of(f);
        buf.clear();
        for (int v : writers)
            if (est.value_space(v).has_randomness()) buf.push_back({coloring[v], v});
        std::sort(buf.begin(), buf.end());
        for (size_t i = 1; i < buf.size(); ++i)
            if (buf[i].first == buf[i - 1].first && buf[i].second != buf[i - 1].second)
                throw NotProperError("same-colored nodes share flag " + std::to_string(f));
    }
}

}  // namespace

DerandResult derand_proper_core(const std::vector<int>& coloring, BlackBoxEstimator& est,
                                Sense sense) {
    const int n = est.num_nodes();
    require(static_cast<int>(coloring.size()) == n, "coloring size mismatch");
    check_conflicts(coloring, est);

    DerandResult res;
    res.assignment.assign(n, 0);
    res.expected_before = est.total_expectation();

    std::map<int, std::vector<int>> classes;
    for (int v = 0; v < n; ++v) {
        const auto& vs = est.value_space(v);
        if (vs.has_randomness())
            classes[coloring[v]].push_back(v);
        else if (!vs.support.empty())
            res.assignment[v] = vs.support.front().first;
    }

    for (const auto& [color, nodes] : classes) {
        (void)color;
        for (int v : nodes) {
            const auto& vs = est.value_space(v);
            const auto& flags = est.flags_affected_by(v);
            bool have = false;
            Rational best_obj;
            int best_val = 0;
            for (const auto& [val, p] : vs.support) {
                if (p == 0) continue;  // conditioning on a null event is undefined
                Rational obj(0);
                for (int f : flags) obj += est.flag_expectation(f, v, val);
                bool better = !have || (sense == Sense::Minimize ? obj < best_obj : obj > best_obj);
                if (better) {
                    have = true;
                    best_obj = obj;
                    best_val = val;
                }
            }
            est.commit(v, best_val);
            res.assignment[v] = best_val;
        }
        ++res.classes_processed;
    }

    res.achieved = est.total_expectation();
    if (sense == Sense::Minimize)
        require(res.achieved <= res.expected_before, "conditional expectation increased");
    else
        require(res.achieved >= res.expected_before, "conditional expectation decreased");
    return res;
}

DerandResult derand_proper(const Graph& g, const std::vector<int>& coloring,
                           BlackBoxEstimator& est, Sense sense) {
    Graph g2 = g.power(2);
    if (!is_proper(g2, coloring)) throw NotProperError("coloring not proper on the square graph");
    return derand_proper_core(coloring, est, sense);
}

// --- simple matching --------------------------------------------------------

namespace {

// Flags: one per vertex (collision penalty) and one per edge (selection gain).
// Flag ids: 0..n-1 vertices, n..n+m-1 edges. Node ids: edge indices.
class PairPenaltyEstimator final : public BlackBoxEstimator {
  public:
    PairPenaltyEstimator(const Hypergraph& h, const EdgeWeighting& a, const Rational& p)
        : h_(h), space_(ValueSpace::bernoulli(p)) {
        const int n = h.num_vertices();
        const int m = h.num_edges();
        pi_.assign(m, p);
        weight_.resize(m);
        for (int i = 0; i < m; ++i) weight_[i] = a.at(h.edge(i).id);
        sa_.assign(n, Rational(0));
        sp_.assign(n, Rational(0));
        sq_.assign(n, Rational(0));
        for (int v = 0; v < n; ++v) {
            for (int idx : h.incident_edges(v)) {
                sa_[v] += weight_[idx] * p;
                sp_[v] += p;
                sq_[v] += weight_[idx] * p * p;
            }
        }
        affected_.resize(m);
        for (int i = 0; i < m; ++i) {
            affected_[i].push_back(n + i);
            for (int v : h.edge(i).vertices) affected_[i].push_back(v);
        }
        writers_.resize(n + m);
        for (int v = 0; v < n; ++v) writers_[v] = h.incident_edges(v);
        for (int i = 0; i < m; ++i) writers_[n + i] = {i};
    }

    int num_nodes() const override { return h_.num_edges(); }
    int num_flags() const override { return h_.num_vertices() + h_.num_edges(); }
    const ValueSpace& value_space(int) const override { return space_; }
    const std::vector<int>& flags_affected_by(int node) const override { return affected_[node]; }
    const std::vector<int>& writers_of(int flag) const override { return writers_[flag]; }

    Rational flag_expectation(int flag, int node, int value) override {
        const int n = h_.num_vertices();
        if (flag >= n) {
            int e = flag - n;
            Rational pe = (node == e) ? Rational(value) : pi_[e];
            return weight_[e] * pe;
        }
        Rational sa = sa_[flag], sp = sp_[flag], sq = sq_[flag];
        if (node >= 0) {
            bool incident = false;
            for (int idx : h_.incident_edges(flag))
                if (idx == node) { incident = true; break; }
            if (incident) {
                Rational d = Rational(value) - pi_[node];
                sa += weight_[node] * d;
                sp += d;
                sq += weight_[node] * (Rational(value) * value - pi_[node] * pi_[node]);
            }
        }
        return -(sa * sp - sq);
    }

    void commit(int node, int value) override {
        Rational d = Rational(value) - pi_[node];
        for (int v : h_.edge(node).vertices) {
            sa_[v] += weight_[node] * d;
            sp_[v] += d;
            sq_[v] += weight_[node] * (Rational(value) * value - pi_[node] * pi_[node]);
        }
        pi_[node] = value;
    }

    Rational total_expectation() override {
        Rational t(0);
        for (int i = 0; i < h_.num_edges(); ++i) t += weight_[i] * pi_[i];
        for (int v = 0; v < h_.num_vertices(); ++v) t -= sa_[v] * sp_[v] - sq_[v];
        return t;
    }

  private:
    const Hypergraph& h_;
    ValueSpace space_;
    std::vector<Rational> pi_, weight_, sa_, sp_, sq_;
    std::vector<std::vector<int>> affected_, writers_;
};

}  // namespace

SimpleMatchingResult simple_matching(const Hypergraph& h, const EdgeWeighting& a,
                                     const VertexColoring& good_col) {
    const int n = h.num_vertices();
    const int m = h.num_edges();
    SimpleMatchingResult out;
    if (m == 0) return out;
    const long r = std::max(2, h.rank());
    const long delta = std::max(1, h.max_degree());
    const Rational p = make_rational(1, 10) / Rational(static_cast<long>(r * delta));

    PairPenaltyEstimator est(h, a, p);
    require(static_cast<int>(good_col.color.size()) == n + m,
            "good coloring does not match Inc(H)");
    std::vector<int> chi(m);
    for (int i = 0; i < m; ++i) chi[i] = good_col.color[n + i];
    auto res = derand_proper_core(chi, est, Sense::Maximize);

    out.expected_flags = res.expected_before;
    out.achieved_flags = res.achieved;
    // E[sum F] = p a(E) - pair penalties >= (0.1 - 0.01) a(E)/(r Delta)
    Rational aE = a.total(h);
    require(out.expected_flags >= make_rational(9, 100) * aE / Rational(r * delta),
            "pair-penalty expectation below the 0.09 floor");

    std::vector<char> in_l(m, 0);
    for (int i = 0; i < m; ++i) in_l[i] = static_cast<char>(res.assignment[i]);
    std::vector<int> l_deg(n, 0);
    for (int i = 0; i < m; ++i)
        if (in_l[i])
            for (int v : h.edge(i).vertices) ++l_deg[v];
    // keep only edges of L whose vertices see no other L-edge
    Rational matched_weight(0);
    for (int i = 0; i < m; ++i) {
        if (!in_l[i]) continue;
        out.selected.push_back(h.edge(i).id);
        bool isolated = true;
        for (int v : h.edge(i).vertices)
            if (l_deg[v] > 1) { isolated = false; break; }
        if (isolated) {
            out.matching.edge_ids.push_back(h.edge(i).id);
            matched_weight += a.at(h.edge(i).id);
        }
    }
    out.matching.normalize();
    require(matched_weight >= out.achieved_flags, "matching below the flag certificate");
    out.declared_rounds = 2 * (good_col.rounds + res.classes_processed + 2);
    return out;
}

// --- multilinear engine ------------------------------------------------------

std::vector<int> derand_multilinear(const std::vector<int>& chi, MultilinearEstimator& est,
                                    Sense sense) {
    const int n = est.num_nodes();
    require(static_cast<int>(chi.size()) == n, "coloring size mismatch");
    std::vector<int> assignment(n, 0);

    std::map<int, std::vector<int>> classes;
    for (int v = 0; v < n; ++v) {
        const auto& vs = est.value_space(v);
        if (vs.has_randomness())
            classes[chi[v]].push_back(v);
        else if (!vs.support.empty())
            assignment[v] = vs.support.front().first;
    }

    for (const auto& [color, nodes] : classes) {
        (void)color;
        // decide against the pre-class state, then commit the class at once
        std::vector<int> decision(nodes.size());
        for (size_t j = 0; j < nodes.size(); ++j) {
            int v = nodes[j];
            const auto& sup = est.value_space(v).support;
            int pick = sup.front().first;
            bool found = false;
            for (const auto& [u, pu] : sup) {
                (void)pu;
                bool ok = true;
                for (const auto& [uprime, pp] : sup) {
                    (void)pp;
                    if (uprime == u) continue;
                    int s = est.derivative_sign(v, u, uprime);
                    if ((sense == Sense::Minimize && s > 0) ||
                        (sense == Sense::Maximize && s < 0)) {
                        ok = false;
                        break;
                    }
                }
                if (ok) { pick = u; found = true; break; }
            }
            require(found, "no admissible value; derivative oracle inconsistent");
            decision[j] = pick;
        }
        for (size_t j = 0; j < nodes.size(); ++j) {
            est.commit(nodes[j], decision[j]);
            assignment[nodes[j]] = decision[j];
        }
    }
    return assignment;
}

void audit_multilinear_a1(const std::vector<int>& chi, const MultilinearEstimator& est,
                          const MultilinearAudit& cfg) {
    const int n = est.num_nodes();
    std::map<int, std::vector<int>> by_color;
    for (int v = 0; v < n; ++v)
        if (est.value_space(v).has_randomness()) by_color[chi[v]].push_back(v);
    std::vector<const std::vector<int>*> pools;
    for (const auto& [c, nodes] : by_color) {
        (void)c;
        if (nodes.size() >= 2) pools.push_back(&nodes);
    }
    if (pools.empty()) return;

    Prng rng(cfg.seed);
    for (int trial = 0; trial < cfg.same_color_pairs; ++trial) {
        const auto& pool = *pools[rng.below(pools.size())];
        int v = pool[rng.below(pool.size())];
        int w = pool[rng.below(pool.size())];
        if (v == w) continue;
        for (int pt = 0; pt < cfg.points_per_pair; ++pt) {
            std::vector<int> x(n);
            for (int i = 0; i < n; ++i) x[i] = static_cast<int>(rng.below(2));
            auto at = [&](int bv, int bw) {
                x[v] = bv;
                x[w] = bw;
                return est.phi_parts(x);
            };
            auto p11 = at(1, 1), p10 = at(1, 0), p01 = at(0, 1), p00 = at(0, 0);
            for (size_t i = 0; i < p11.size(); ++i) {
                if (p11[i] - p10[i] - p01[i] + p00[i] != 0)
                    throw A1ViolationError("nonzero second derivative for same-colored pair (" +
                                           std::to_string(v) + "," + std::to_string(w) + ")");
            }
        }
    }
}

void audit_multilinear_a2(const MultilinearEstimator& est, const MultilinearAudit& cfg) {
    const int n = est.num_nodes();
    Prng rng(mix_seed(cfg.seed, 0xa2));
    for (int trial = 0; trial < cfg.a2_nodes; ++trial) {
        int v = static_cast<int>(rng.below(static_cast<uint64_t>(n)));
        if (!est.value_space(v).has_randomness()) continue;
        auto sup = est.derivative_support(v);
        std::vector<char> local(n, 0);
        for (int s : sup) local[s] = 1;
        std::vector<int> x(n), y(n);
        for (int i = 0; i < n; ++i) x[i] = static_cast<int>(rng.below(2));
        for (int i = 0; i < n; ++i) y[i] = local[i] ? x[i] : static_cast<int>(rng.below(2));
        auto deriv = [&](std::vector<int> z) {
            z[v] = 1;
            auto hi = est.phi_parts(z);
            z[v] = 0;
            auto lo = est.phi_parts(z);
            for (size_t i = 0; i < hi.size(); ++i) hi[i] -= lo[i];
            return hi;
        };
        if (deriv(x) != deriv(y))
            throw A2ViolationError("derivative at node " + std::to_string(v) +
                                   " depends on values outside its support");
    }
}

// --- toy degree split --------------------------------------------------------

namespace {

// Per-vertex color profile with scaled masses (qin, qout): twice the
// conditional inclusion/exclusion probability summed per color class.
struct VertexProfile {
    std::vector<int> colors;
    std::vector<BigInt> qin;
    std::vector<BigInt> qout;
    std::vector<int> slot_of_color;
};

// elementary symmetric e_0..e_w of the given values
void esym(const std::vector<BigInt>& vals, int w, std::vector<BigInt>& out) {
    out.assign(w + 1, BigInt(0));
    out[0] = 1;
    int done = 0;
    for (const auto& q : vals) {
        ++done;
        for (int t = std::min(w, done); t >= 1; --t) out[t] += q * out[t - 1];
    }
}

// e_target(values minus one slot) via synthetic division of the e-polynomial
BigInt esym_excluding(const std::vector<BigInt>& poly, const BigInt& excl, int target) {
    BigInt rem(0);
    for (int t = 0; t <= target; ++t) rem = poly[t] - excl * rem;
    return rem;
}

class FamilyCountEstimator final : public MultilinearEstimator {
  public:
    FamilyCountEstimator(const Hypergraph& h, int w, const EdgeColoring& chi) : h_(h), w_(w) {
        edge_slot_.assign(h.num_edges(), -1);
        for (EdgeId id : chi.domain) {
            int idx = h.index_of(id);
            require(idx >= 0, "edge coloring refers to a missing edge");
            edge_slot_[idx] = chi.chi.at(id);
        }
        prof_.resize(h.num_vertices());
        for (int v = 0; v < h.num_vertices(); ++v) {
            auto& pr = prof_[v];
            for (int idx : h.incident_edges(v)) {
                int c = edge_slot_[idx];
                if (c < 0) continue;
                int slot = color_slot(pr, c);
                pr.qin[slot] += 1;  // free edge: 2 * 1/2
                pr.qout[slot] += 1;
            }
        }
    }

    int num_nodes() const override { return h_.num_edges(); }

    const ValueSpace& value_space(int node) const override {
        static const ValueSpace none{{{0, Rational(1)}}};
        return edge_slot_[node] >= 0 ? ValueSpace::fair_bit() : none;
    }

    int derivative_sign(int node, int u, int uprime) const override {
        int base = raw_derivative_sign(node);
        return u > uprime ? base : -base;
    }

    void commit(int node, int value) override {
        if (edge_slot_[node] < 0) return;
        for (int v : h_.edge(node).vertices) {
            auto& pr = prof_[v];
            int slot = pr.slot_of_color[edge_slot_[node]];
            pr.qin[slot] += value ? 1 : -1;
            pr.qout[slot] += value ? -1 : 1;
        }
    }

    std::vector<Rational> phi_parts(const std::vector<int>& assignment) const override {
        BigInt total(0);
        std::vector<BigInt> cin, cout, poly;
        for (int v = 0; v < h_.num_vertices(); ++v) {
            cin.assign(prof_[v].colors.size(), BigInt(0));
            cout.assign(prof_[v].colors.size(), BigInt(0));
            for (int idx : h_.incident_edges(v)) {
                int c = edge_slot_[idx];
                if (c < 0) continue;
                int s = prof_[v].slot_of_color[c];
                if (assignment[idx])
                    cin[s] += 1;
                else
                    cout[s] += 1;
            }
            esym(cin, w_, poly);
            total += poly[w_];
            esym(cout, w_, poly);
            total += poly[w_];
        }
        return {Rational(total)};
    }

    std::vector<int> derivative_support(int node) const override {
        std::vector<int> sup{node};
        for (int v : h_.edge(node).vertices)
            for (int idx : h_.incident_edges(v))
                if (edge_slot_[idx] >= 0) sup.push_back(idx);
        std::sort(sup.begin(), sup.end());
        sup.erase(std::unique(sup.begin(), sup.end()), sup.end());
        return sup;
    }

    // E[Phi' / beta] with all bits free: 2^{1-w} * sum_v |U_v|
    Rational expected_unscaled() const {
        BigInt total(0);
        std::vector<BigInt> counts, poly;
        for (int v = 0; v < h_.num_vertices(); ++v) {
            counts.clear();
            for (size_t s = 0; s < prof_[v].colors.size(); ++s)
                counts.push_back((prof_[v].qin[s] + prof_[v].qout[s]) / 2);
            esym(counts, w_, poly);
            total += poly[w_];
        }
        Rational r(2 * total, pow_int(BigInt(2), static_cast<unsigned long>(w_)));
        r.canonicalize();
        return r;
    }

  private:
    static int color_slot(VertexProfile& pr, int color) {
        if (static_cast<int>(pr.slot_of_color.size()) <= color)
            pr.slot_of_color.resize(color + 1, -1);
        if (pr.slot_of_color[color] < 0) {
            pr.slot_of_color[color] = static_cast<int>(pr.colors.size());
            pr.colors.push_back(color);
            pr.qin.emplace_back(0);
            pr.qout.emplace_back(0);
        }
        return pr.slot_of_color[color];
    }

    // sign of E[D_{node,1,0} Phi'], scaled by the positive 2^{w-1} / beta
    int raw_derivative_sign(int node) const {
        if (edge_slot_[node] < 0) return 0;
        BigInt acc(0);
        std::vector<BigInt> poly;
        for (int v : h_.edge(node).vertices) {
            const auto& pr = prof_[v];
            int slot = pr.slot_of_color[edge_slot_[node]];
            esym(pr.qin, w_ - 1, poly);
            acc += esym_excluding(poly, pr.qin[slot], w_ - 1);
            esym(pr.qout, w_ - 1, poly);
            acc -= esym_excluding(poly, pr.qout[slot], w_ - 1);
        }
        return mpz_sgn(acc.get_mpz_t());
    }

    const Hypergraph& h_;
    int w_;
    std::vector<int> edge_slot_;  // color per edge index; -1 outside the domain
    std::vector<VertexProfile> prof_;
};

}  // namespace

ToySplitResult toy_degree_split(const Hypergraph& h, long threshold, int w,
                                const EdgeColoring& chi) {
    require(w >= 1, "w must be >= 1");
    ToySplitResult out;
    out.beta = Rational(1);
    BigInt choose = binomial(threshold, w);
    if (choose > 0) {
        out.beta = Rational(BigInt(1), choose);
        out.beta.canonicalize();
    }
    if (h.num_edges() == 0) {
        out.phi_expected = 0;
        out.phi_achieved = 0;
        return out;
    }

    FamilyCountEstimator est(h, w, chi);
    out.phi_expected = out.beta * est.expected_unscaled();

    std::vector<int> colors(h.num_edges(), 0);
    for (int i = 0; i < h.num_edges(); ++i) {
        auto it = chi.chi.find(h.edge(i).id);
        colors[i] = it == chi.chi.end() ? 0 : it->second;
    }
    auto assignment = derand_multilinear(colors, est, Sense::Minimize);

    auto parts = est.phi_parts(assignment);
    out.phi_achieved = out.beta * parts[0];
    require(out.phi_achieved <= out.phi_expected, "family count above its expectation");

    std::vector<long> deg_in(h.num_vertices(), 0), deg_all(h.num_vertices(), 0);
    for (int i = 0; i < h.num_edges(); ++i) {
        auto it = chi.chi.find(h.edge(i).id);
        if (it == chi.chi.end()) continue;
        if (assignment[i]) {
            out.selected.push_back(h.edge(i).id);
            for (int v : h.edge(i).vertices) ++deg_in[v];
        }
        for (int v : h.edge(i).vertices) ++deg_all[v];
    }
    for (int v = 0; v < h.num_vertices(); ++v)
        if (deg_in[v] >= threshold || deg_all[v] - deg_in[v] >= threshold) ++out.bad_vertices;
    return out;
}

}  // namespace hypermatch
