#include "hypermatch/rounding.hpp"

#include <algorithm>

#include "hypermatch/errors.hpp"

namespace hypermatch {

namespace {

BigFloat log2_big(const BigInt& z) { return BigFloat::log2_of(BigFloat(z)); }

BigInt floor_shift(const BigInt& z, int bits) {
    BigInt r;
    mpz_fdiv_q_2exp(r.get_mpz_t(), z.get_mpz_t(), static_cast<mp_bitcnt_t>(bits));
    return r;
}

// Delta 2^{4-i} as an exact rational
Rational discard_threshold(const RoundingParams& p, int i) {
    Rational t(p.delta * 16);
    return t * pow_rational(make_rational(1, 2), i);
}

void fill_derived(RoundingParams& p) {
    p.alpha = BigFloat::exp2_of(BigFloat(1) / BigFloat(static_cast<long>(p.s)));
    p.x = BigFloat(p.delta) * BigFloat::pow_si(BigFloat(2), -p.s);
    BigFloat ex_over_w = BigFloat::euler_e() * p.x / BigFloat(static_cast<long>(p.w));
    p.beta = BigFloat(16 * p.rank) * BigFloat::pow_si(ex_over_w, p.w);
    p.b.clear();
    for (int i = 0; i <= p.s; ++i) {
        long d = static_cast<long>(p.s - i);
        BigFloat bi = BigFloat::pow_si(BigFloat(2), -d * (p.w + 1)) *
                      BigFloat::pow_si(p.alpha, d) / p.beta;
        p.b.push_back(bi);
    }
}

}  // namespace

int paper_tuple_size(const BigInt& delta, long rank) {
    BigFloat inner = BigFloat(rank) * log2_big(delta);
    return static_cast<int>((BigFloat(2) * BigFloat::log2_of(inner)).ceil_to_long());
}

RoundingParams compute_params(const BigInt& delta, long rank) {
    require(delta >= 2 && rank >= 2, "compute_params: need Delta >= 2, r >= 2");
    RoundingParams p;
    p.profile = RoundingProfile::Paper;
    p.delta = delta;
    p.rank = rank;
    p.w = paper_tuple_size(delta, rank);
    // s = ceil(log2(Delta / (w^4 log2^10(r Delta))))
    BigFloat denom = BigFloat::pow_si(BigFloat(static_cast<long>(p.w)), 4) *
                     BigFloat::pow_si(log2_big(delta * rank), 10);
    BigFloat ratio = BigFloat(delta) / denom;
    long s = BigFloat::log2_of(ratio).ceil_to_long();
    if (s < 1) {
        p.degenerate = true;
        p.s = 0;
        return p;
    }
    p.s = static_cast<int>(s);
    fill_derived(p);
    p.defective_k = (BigFloat(2048L * p.w * p.w) * log2_big(delta)).ceil_to_long();
    return p;
}

RoundingParams compute_params_scaled(const BigInt& delta, long rank, int w, int s,
                                     long defective_k) {
    require(w >= 1 && s >= 1, "compute_params_scaled: need w, s >= 1");
    require(delta >= (BigInt(1) << s), "compute_params_scaled: need Delta >= 2^s");
    RoundingParams p;
    p.profile = RoundingProfile::Scaled;
    p.delta = delta;
    p.rank = std::max(2L, rank);
    p.w = w;
    p.s = s;
    fill_derived(p);
    p.defective_k = std::max(2L, defective_k);
    return p;
}

bool check_b_recurrence(const RoundingParams& p, int i) {
    require(i >= 0 && i + 1 <= p.s, "recurrence index out of range");
    BigFloat lhs = p.alpha * BigFloat::pow_si(BigFloat(2), -(p.w + 1)) * p.b[i + 1];
    BigFloat diff = BigFloat::abs(lhs - p.b[i]);
    BigFloat slack = BigFloat::abs(p.b[i]) * BigFloat::pow_si(BigFloat(2), -80);
    return diff <= slack;
}

bool check_discard_inequality(const RoundingParams& p, int i) {
    require(i >= 0 && i <= p.s, "index out of range");
    BigInt arg = p.delta * 16;
    arg = floor_shift(arg, i);
    BigFloat lhs = p.b[i] * BigFloat(binomial_big(arg, p.w));
    BigFloat rhs = BigFloat::pow_si(BigFloat(1) / (BigFloat(2) * p.alpha),
                                    static_cast<long>(p.s - i));
    return geq_with_relative_slack(lhs, rhs);
}

BigFloat stage_potential(const Hypergraph& h, const EdgeWeighting& a, const StageState& st,
                         const RoundingParams& p) {
    require(st.stage >= 0 && st.stage <= p.s, "stage out of range");
    if (st.edges.empty()) return BigFloat(0);
    const int i = st.stage;
    Rational kept = a.total_of(st.edges);

    // per-vertex degree and incident weight within E_i
    std::vector<long> deg(h.num_vertices(), 0);
    std::vector<Rational> nb_weight(h.num_vertices(), Rational(0));
    for (EdgeId id : st.edges) {
        const auto& e = h.edge(h.index_of(id));
        for (int v : e.vertices) {
            ++deg[v];
            nb_weight[v] += a.at(id);
        }
    }
    BigInt cap = floor_shift(p.delta, i);
    BigFloat cap_binom(binomial_big(cap, p.w));
    BigFloat penalty(0);
    for (int v = 0; v < h.num_vertices(); ++v) {
        if (deg[v] == 0) continue;
        BigFloat vb = cap_binom + BigFloat(binomial(deg[v], p.w));
        penalty += vb * BigFloat(nb_weight[v]);
    }
    BigFloat head = BigFloat::pow_si(BigFloat(1) / (BigFloat(2) * p.alpha),
                                     static_cast<long>(p.s - i)) *
                    BigFloat(kept);
    return head - p.b[i] * penalty;
}

DiscardResult discard_high_degree(const Hypergraph& h, const EdgeWeighting& a,
                                  const StageState& st, const RoundingParams& p) {
    DiscardResult out;
    out.before = stage_potential(h, a, st, p);
    Rational thr = discard_threshold(p, st.stage);
    std::vector<long> deg(h.num_vertices(), 0);
    for (EdgeId id : st.edges)
        for (int v : h.edge(h.index_of(id)).vertices) ++deg[v];
    std::vector<char> heavy(h.num_vertices(), 0);
    for (int v = 0; v < h.num_vertices(); ++v)
        if (Rational(deg[v]) >= thr) {
            heavy[v] = 1;
            ++out.removed_vertices;
        }
    out.state.stage = st.stage;
    for (EdgeId id : st.edges) {
        bool hit = false;
        for (int v : h.edge(h.index_of(id)).vertices)
            if (heavy[v]) { hit = true; break; }
        if (!hit) out.state.edges.push_back(id);
    }
    out.after = stage_potential(h, a, out.state, p);
    out.monotone = geq_with_relative_slack(out.after, out.before);
    if (check_discard_inequality(p, st.stage))
        require(out.monotone, "potential decreased while discarding heavy vertices");
    return out;
}

// --- surrogate potential estimator ------------------------------------------

namespace {

// S~ = c1 a(E') - c3 sum_v sum_{e in N(v) cap E'} (R_{v,e} + c2) a(e), where
// R_{v,e} counts surviving w-subsets of N(v) cap F with colors distinct from
// each other and from chi(e). Exact rational aggregates scaled by 2^w; only
// the two leading coefficients live in floats.
class SurrogateEstimator final : public ChainEstimator {
  public:
    SurrogateEstimator(const Hypergraph& hf, const EdgeWeighting& a,
                       const std::vector<int>& chi, int w, const BigInt& c2,
                       const BigFloat& c1f, const BigFloat& c3f)
        : hf_(hf), chi_(chi), w_(w), c1f_(c1f), c3f_(c3f) {
        two_w_ = BigInt(1) << w_;
        c2_scaled_ = c2 * two_w_;
        const int m = hf.num_edges();
        weight_.resize(m);
        for (int i = 0; i < m; ++i) weight_[i] = a.at(hf.edge(i).id);
        mass_.assign(m, 1);  // 2 * P(e in E_{i+1}); free = 1
        prof_.resize(hf.num_vertices());
        for (int v = 0; v < hf.num_vertices(); ++v) {
            for (int idx : hf.incident_edges(v)) {
                int slot = color_slot(prof_[v], chi_[idx]);
                prof_[v].mass[slot] += 1;
                prof_[v].wmass[slot] += weight_[idx];
            }
        }
    }

    int num_nodes() const override { return hf_.num_edges(); }
    const ValueSpace& value_space(int) const override { return ValueSpace::fair_bit(); }

    int derivative_sign(int node, int u, int uprime) const override {
        int base = raw_sign(node);
        return u > uprime ? base : -base;
    }

    void commit(int node, int value) override {
        int d = value ? 1 : -1;  // mass 1 -> 0 or 2
        mass_[node] += d;
        for (int v : hf_.edge(node).vertices) {
            auto& pr = prof_[v];
            int slot = pr.slot_of_color[chi_[node]];
            pr.mass[slot] += d;
            pr.wmass[slot] += weight_[node] * d;
        }
    }

    // current E[S~ | committed]
    BigFloat value() const override {
        Rational lin(0);
        for (int i = 0; i < hf_.num_edges(); ++i) lin += weight_[i] * Rational(mass_[i]);
        lin /= 2;
        Rational pen(0);
        std::vector<BigInt> poly;
        for (int v = 0; v < hf_.num_vertices(); ++v) {
            const auto& pr = prof_[v];
            if (pr.colors.empty()) continue;
            epoly(pr.mass, w_, poly);
            for (size_t s = 0; s < pr.colors.size(); ++s) {
                if (pr.wmass[s] == 0) continue;
                BigInt families = divide_out(poly, BigInt(pr.mass[s]), w_);
                pen += pr.wmass[s] * Rational(c2_scaled_ + families);
            }
        }
        pen /= Rational(two_w_ * 2);
        return c1f_ * BigFloat(lin) - c3f_ * BigFloat(pen);
    }

    std::vector<Rational> phi_parts(const std::vector<int>& x) const override {
        Rational lin(0);
        for (int i = 0; i < hf_.num_edges(); ++i)
            if (x[i]) lin += weight_[i];
        Rational pen(0);
        std::vector<BigInt> poly;
        for (int v = 0; v < hf_.num_vertices(); ++v) {
            const auto& pr = prof_[v];
            if (pr.colors.empty()) continue;
            // per-color counts of the selected edges at v
            std::vector<long> sel(pr.colors.size(), 0);
            Rational wsel(0);
            for (int idx : hf_.incident_edges(v))
                if (x[idx]) sel[pr.slot_of_color[chi_[idx]]] += 1;
            epoly(sel, w_, poly);
            for (int idx : hf_.incident_edges(v)) {
                if (!x[idx]) continue;
                BigInt fam = divide_out(poly, BigInt(sel[pr.slot_of_color[chi_[idx]]]), w_);
                pen += weight_[idx] * Rational(fam * two_w_ + c2_scaled_);
            }
        }
        pen /= Rational(two_w_);
        return {lin, pen};
    }

    std::vector<int> derivative_support(int node) const override {
        std::vector<int> sup{node};
        for (int v : hf_.edge(node).vertices)
            for (int idx : hf_.incident_edges(v)) sup.push_back(idx);
        std::sort(sup.begin(), sup.end());
        sup.erase(std::unique(sup.begin(), sup.end()), sup.end());
        return sup;
    }

  private:
    struct Profile {
        std::vector<int> colors;
        std::vector<long> mass;       // scaled survival masses per color
        std::vector<Rational> wmass;  // weight-weighted masses
        std::vector<int> slot_of_color;
    };

    static int color_slot(Profile& pr, int color) {
        if (static_cast<int>(pr.slot_of_color.size()) <= color)
            pr.slot_of_color.resize(color + 1, -1);
        if (pr.slot_of_color[color] < 0) {
            pr.slot_of_color[color] = static_cast<int>(pr.colors.size());
            pr.colors.push_back(color);
            pr.mass.push_back(0);
            pr.wmass.emplace_back(0);
        }
        return pr.slot_of_color[color];
    }

    template <typename T>
    static void epoly(const std::vector<T>& vals, int w, std::vector<BigInt>& out) {
        out.assign(w + 1, BigInt(0));
        out[0] = 1;
        int done = 0;
        for (const auto& q : vals) {
            ++done;
            for (int t = std::min(w, done); t >= 1; --t) out[t] += BigInt(q) * out[t - 1];
        }
    }

    static BigInt divide_out(const std::vector<BigInt>& poly, const BigInt& excl, int target) {
        BigInt rem(0);
        for (int t = 0; t <= target; ++t) rem = poly[t] - excl * rem;
        return rem;
    }

    // sign of E[D_{node,1,0} S~ | committed], everything scaled by 2^w
    int raw_sign(int node) const {
        Rational t2(0);
        std::vector<BigInt> poly, poly_cg;
        const int cg = chi_[node];
        for (int v : hf_.edge(node).vertices) {
            const auto& pr = prof_[v];
            epoly(pr.mass, w_, poly);
            int slot_cg = pr.slot_of_color[cg];
            // coefficients with color cg divided out
            poly_cg.assign(w_ + 1, BigInt(0));
            BigInt rem(0);
            for (int t = 0; t <= w_; ++t) {
                rem = poly[t] - BigInt(pr.mass[slot_cg]) * rem;
                poly_cg[t] = rem;
            }
            t2 += weight_[node] * Rational(c2_scaled_ + poly_cg[w_]);
            for (size_t s = 0; s < pr.colors.size(); ++s) {
                if (static_cast<int>(s) == slot_cg || pr.wmass[s] == 0) continue;
                BigInt fam = divide_out(poly_cg, BigInt(pr.mass[s]), w_ - 1);
                t2 += pr.wmass[s] * Rational(fam);
            }
        }
        BigFloat lhs = c1f_ * BigFloat(weight_[node] * Rational(two_w_));
        BigFloat rhs = c3f_ * BigFloat(t2);
        BigFloat diff = lhs - rhs;
        return diff.sign();
    }

    const Hypergraph& hf_;
    std::vector<int> chi_;
    int w_;
    BigFloat c1f_, c3f_;
    BigInt two_w_, c2_scaled_;
    std::vector<Rational> weight_;
    std::vector<int> mass_;
    std::vector<Profile> prof_;
};

}  // namespace

std::unique_ptr<ChainEstimator> make_surrogate_estimator(const Hypergraph& hf,
                                                         const EdgeWeighting& a,
                                                         const std::vector<int>& chi,
                                                         const RoundingParams& p, int stage) {
    require(!p.degenerate && stage >= 0 && stage < p.s, "surrogate: bad stage");
    BigInt cap_next = floor_shift(p.delta, stage + 1);
    BigFloat c1f = BigFloat::pow_si(BigFloat(1) / (BigFloat(2) * p.alpha),
                                    static_cast<long>(p.s - (stage + 1)));
    BigFloat c3f = p.alpha * p.b[stage + 1];
    return std::make_unique<SurrogateEstimator>(hf, a, chi, p.w, binomial_big(cap_next, p.w),
                                                c1f, c3f);
}

StageState stage_split(const Hypergraph& h, const EdgeWeighting& a, const StageState& st,
                       const RoundingParams& p, const VertexColoring& good_col,
                       StageReport* report, const StageOptions& opt) {
    require(!p.degenerate && p.s >= 1, "stage_split: degenerate parameters");
    require(st.stage < p.s, "stage_split: no stages left");
    const int i = st.stage;
    StageReport rep;
    rep.stage = i;
    rep.input_weight = a.total_of(st.edges);
    rep.s_before = stage_potential(h, a, st, p);

    StageState next;
    next.stage = i + 1;
    if (st.edges.empty()) {
        rep.s_tilde = rep.s_tilde_expected = rep.s_after = BigFloat(0);
        rep.surrogate_ok = rep.upper_ok = rep.lower_ok = rep.chain_ok = true;
        if (report) *report = rep;
        return next;
    }

    Hypergraph sub = subhypergraph(h, st.edges);
    Rational thr = discard_threshold(p, i);
    for (int v = 0; v < sub.num_vertices(); ++v)
        require(Rational(sub.degree(v)) <= thr, "stage_split: degree precondition violated");

    // stage coloring: delta = 1 - 1/alpha, rationalized downward
    BigFloat d_f = BigFloat(1) - BigFloat(1) / p.alpha;
    Rational delta_col(d_f.to_double() > 0 ? std::max(1e-9, d_f.to_double() * 0.999) : 1e-9);
    delta_col.canonicalize();
    if (delta_col >= 1) delta_col = make_rational(1, 2);
    DefectiveColoringOptions dopt;
    dopt.enforce_precondition = false;
    dopt.enforce_postconditions = false;
    auto sub_col = restrict_good_coloring(h, good_col, sub);
    auto dc = defective_color(sub, a, delta_col, static_cast<int>(p.defective_k), sub_col, dopt);
    rep.coloring_kept = dc.kept_weight;

    Hypergraph hf = subhypergraph(h, dc.coloring.domain);
    std::vector<int> chi(hf.num_edges());
    for (int e = 0; e < hf.num_edges(); ++e) chi[e] = dc.coloring.chi.at(hf.edge(e).id);

    auto est = make_surrogate_estimator(hf, a, chi, p, i);

    if (opt.audit_estimator) {
        audit_multilinear_a1(chi, *est, {});
        audit_multilinear_a2(*est, {});
    }

    rep.s_tilde_expected = est->value();
    auto assignment = derand_multilinear(chi, *est, Sense::Maximize);
    rep.s_tilde = est->value();
    rep.surrogate_ok = geq_with_relative_slack(rep.s_tilde, rep.s_tilde_expected);
    require(rep.surrogate_ok, "surrogate potential fell below its expectation");

    for (int e = 0; e < hf.num_edges(); ++e)
        if (assignment[e]) next.edges.push_back(hf.edge(e).id);
    std::sort(next.edges.begin(), next.edges.end());
    rep.kept_edges = static_cast<int>(next.edges.size());

    rep.s_after = stage_potential(h, a, next, p);
    rep.upper_ok = geq_with_relative_slack(rep.s_after, rep.s_tilde);
    rep.lower_ok = geq_with_relative_slack(rep.s_tilde_expected, rep.s_before);
    rep.chain_ok = geq_with_relative_slack(rep.s_after, rep.s_before);
    if (report) *report = rep;
    return next;
}

DegreeReduceResult degree_reduce(const Hypergraph& h, const EdgeWeighting& a,
                                 const VertexColoring& good_col, const RoundingParams& p,
                                 const StageOptions& opt) {
    require(!p.degenerate && p.s >= 1, "degree_reduce: degenerate parameters");
    DegreeReduceResult out;
    out.input_weight = a.total(h);
    StageState st;
    st.stage = 0;
    for (const auto& e : h.edges()) st.edges.push_back(e.id);
    out.s0 = stage_potential(h, a, st, p);

    for (int i = 0; i < p.s; ++i) {
        auto d = discard_high_degree(h, a, st, p);
        st = d.state;
        StageReport rep;
        st = stage_split(h, a, st, p, good_col, &rep, opt);
        out.stages.push_back(rep);
    }
    auto d = discard_high_degree(h, a, st, p);
    st = d.state;

    out.final_potential = stage_potential(h, a, st, p);
    out.kept_weight = a.total_of(st.edges);
    out.degree_cap = (BigFloat(16) * p.x).ceil_to_long();
    // degrees after the final discard sit strictly below Delta 2^{4-s} = 16 x
    Hypergraph fin = subhypergraph(h, st.edges);
    require(Rational(fin.observed_max_degree()) <= Rational(p.delta * 16) *
                                                       pow_rational(make_rational(1, 2), p.s),
            "final degree above 16 x");
    if (out.input_weight > 0) {
        BigFloat ratio = BigFloat(out.kept_weight) * BigFloat(p.delta) /
                         (p.x * BigFloat(out.input_weight));
        out.end_ratio = ratio.to_double();
    }
    out.final_state = std::move(st);
    return out;
}

DirectRoundResult direct_round(const Hypergraph& h, const EdgeWeighting& a,
                               const VertexColoring& good_col, const RoundingParams& p) {
    DirectRoundResult out;
    Rational aE = a.total(h);
    const long rd = static_cast<long>(std::max(2, h.rank())) * std::max(1, h.max_degree());
    out.floor = make_rational(9, 100) * aE / Rational(rd);

    // fallback path: pair-penalty matching on the input
    auto base = simple_matching(h, a, good_col);
    Rational base_w(0);
    for (EdgeId id : base.matching.edge_ids) base_w += a.at(id);
    out.matching = base.matching;
    out.weight = base_w;

    if (!p.degenerate && p.s >= 1 && h.num_edges() > 0) {
        auto red1 = degree_reduce(h, a, good_col, p);
        out.stages = red1.stages;
        Hypergraph h1 = subhypergraph(h, red1.final_state.edges);
        if (h1.num_edges() > 0) {
            // second reduction when the degree is still large enough to halve
            std::vector<EdgeId> final_edges = red1.final_state.edges;
            long d1 = std::max(1, h1.observed_max_degree());
            if (d1 >= 8) {
                int s2 = 1;
                while ((1L << (s2 + 1)) <= d1 / 4) ++s2;
                auto p2 = compute_params_scaled(BigInt(d1), p.rank, p.w, s2, p.defective_k);
                auto col1 = restrict_good_coloring(h, good_col, h1);
                auto red2 = degree_reduce(h1, a, col1, p2);
                for (const auto& r : red2.stages) out.stages.push_back(r);
                final_edges = red2.final_state.edges;
            }
            if (!final_edges.empty()) {
                // rebuild with tight declared bounds so the matching step
                // selects at the reduced density
                std::vector<HyperEdge> kept;
                for (EdgeId id : final_edges) kept.push_back(h.edge(h.index_of(id)));
                Hypergraph target = Hypergraph::from_edges(h.num_vertices(), std::move(kept));
                auto col2 = restrict_good_coloring(h, good_col, target);
                auto sm = simple_matching(target, a, col2);
                Rational w(0);
                for (EdgeId id : sm.matching.edge_ids) w += a.at(id);
                if (w > out.weight) {
                    out.matching = sm.matching;
                    out.weight = w;
                    out.used_chain = true;
                }
            }
        }
    }
    require(out.weight >= out.floor, "direct rounding lost the 0.09/(r Delta) floor");
    return out;
}

std::string format_chain_csv(const std::vector<StageReport>& stages) {
    std::string s = "stage,s_before,s_tilde_expected,s_tilde,s_after,kept_edges,chain_ok\n";
    for (const auto& r : stages) {
        s += std::to_string(r.stage) + "," + r.s_before.str() + "," +
             r.s_tilde_expected.str() + "," + r.s_tilde.str() + "," + r.s_after.str() + "," +
             std::to_string(r.kept_edges) + "," + (r.chain_ok ? "1" : "0") + "\n";
    }
    return s;
}

}  // namespace hypermatch
