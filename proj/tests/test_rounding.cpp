#include <cmath>

#include "doctest.h"
#include "hypermatch/errors.hpp"
#include "hypermatch/oracles.hpp"
#include "hypermatch/prng.hpp"
#include "hypermatch/rounding.hpp"

using namespace hypermatch;

TEST_CASE("paper parameters at Delta = 2^20, r = 2") {
    auto p = compute_params(BigInt(1) << 20, 2);
    CHECK(p.w == 11);  // ceil(2 log2(2*20)) = ceil(2*5.3219)
    CHECK(p.degenerate);  // w^4 log2^10(r Delta) >> Delta forces s < 1
}

TEST_CASE("scaled parameters derive alpha and x by the same formulas") {
    auto p = compute_params_scaled(BigInt(64), 3, 3, 4, 8);
    CHECK(!p.degenerate);
    BigFloat a4 = BigFloat::pow_si(p.alpha, 4);
    CHECK(BigFloat::abs(a4 - BigFloat(2)).to_double() < 1e-30);  // alpha = 2^{1/4}
    CHECK(p.x.to_double() == doctest::Approx(4.0));              // 64 * 2^-4
}

TEST_CASE("b recurrence and the discard inequality at large synthetic Delta") {
    // paper w-formula with synthetic stage counts; Delta up to 2^64
    for (int bits : {30, 40, 52, 64}) {
        for (long r : {2L, 5L}) {
            BigInt delta = BigInt(1) << bits;
            int w = paper_tuple_size(delta, r);
            auto p = compute_params_scaled(delta, r, w, 8, 16);
            for (int i = 0; i + 1 <= p.s; ++i) CHECK(check_b_recurrence(p, i));
            for (int i = 0; i <= p.s; ++i) CHECK(check_discard_inequality(p, i));
        }
    }
}

TEST_CASE("stage potential: empty set and final-stage sign") {
    auto gi = oracles::gen_random(10, 3, 6, 20, 77, oracles::WeightKind::RandomRational);
    auto p = compute_params_scaled(BigInt(gi.h.max_degree()), gi.h.rank(), 3, 2, 4);

    StageState empty;
    empty.stage = 1;
    CHECK(stage_potential(gi.h, gi.a, empty, p).is_zero());

    // at i = s the head coefficient is 1, so S_s <= a(E_s)
    StageState full;
    full.stage = p.s;
    for (const auto& e : gi.h.edges()) full.edges.push_back(e.id);
    BigFloat ss = stage_potential(gi.h, gi.a, full, p);
    CHECK(ss <= BigFloat(gi.a.total(gi.h)));
}

TEST_CASE("stage potential matches an independent evaluation on a 3-edge star") {
    Hypergraph h = Hypergraph::from_edges(4, {{0, {0, 1}}, {1, {0, 2}}, {2, {0, 3}}});
    EdgeWeighting a;
    a.set(0, make_rational(3, 2));
    a.set(1, make_rational(5, 3));
    a.set(2, Rational(2));
    auto p = compute_params_scaled(BigInt(3), 2, 2, 1, 2);  // alpha = 2 exactly at s = 1

    StageState st;
    st.stage = 0;
    st.edges = {0, 1, 2};
    BigFloat got = stage_potential(h, a, st, p);

    // spreadsheet-style recomputation: (1/(2a))^1 aE - b0 sum_v (C(3,2)+C(d,2)) a(N(v))
    BigFloat head = (BigFloat(1) / (BigFloat(2) * p.alpha)) * BigFloat(a.total(h));
    Rational aN0 = a.total(h);  // center sees all three edges
    BigFloat pen = p.b[0] * ((BigFloat(binomial(3, 2)) + BigFloat(binomial(3, 2))) * BigFloat(aN0));
    for (int leaf = 1; leaf <= 3; ++leaf) {
        Rational w = a.at(leaf - 1);
        pen += p.b[0] * ((BigFloat(binomial(3, 2)) + BigFloat(binomial(1, 2))) * BigFloat(w));
    }
    BigFloat want = head - pen;
    CHECK(BigFloat::abs(got - want).to_double() <= 1e-30);
}

TEST_CASE("discard is the identity when no vertex is heavy") {
    auto gi = oracles::gen_random(12, 3, 4, 20, 5);
    auto p = compute_params_scaled(BigInt(16), gi.h.rank(), 3, 2, 4);
    StageState st;
    st.stage = 0;
    for (const auto& e : gi.h.edges()) st.edges.push_back(e.id);
    auto d = discard_high_degree(gi.h, gi.a, st, p);  // threshold 16*16 = 256
    CHECK(d.removed_vertices == 0);
    CHECK(d.state.edges == st.edges);
}

TEST_CASE("discard removes a constructed heavy vertex, potential monotone") {
    // star with 20 edges; parameter Delta = 8, so at stage 3 the threshold is
    // 8 * 2^{4-3} = 16 and the center (degree 20) is discarded
    std::vector<HyperEdge> es;
    for (int i = 0; i < 20; ++i) es.push_back({i, {0, i + 1}});
    Hypergraph h = Hypergraph::from_edges(21, es);
    EdgeWeighting a = EdgeWeighting::constant(h, Rational(1));
    auto p = compute_params_scaled(BigInt(8), 2, 3, 3, 2);
    REQUIRE(check_discard_inequality(p, 3));
    StageState st;
    st.stage = 3;
    for (const auto& e : h.edges()) st.edges.push_back(e.id);
    auto d = discard_high_degree(h, a, st, p);
    CHECK(d.removed_vertices == 1);
    CHECK(d.state.edges.empty());  // every edge met the center
    CHECK(d.monotone);             // 0 >= S_before up to slack
    CHECK(d.after.is_zero());
}

TEST_CASE("stage split keeps the surrogate above its expectation") {
    for (int it = 0; it < 6; ++it) {
        auto gi = oracles::gen_random(24, 3, 16, 120, 880 + it,
                                      oracles::WeightKind::RandomRational);
        auto p = compute_params_scaled(BigInt(std::max(4, gi.h.observed_max_degree())),
                                       gi.h.rank(), 3, 2, 4);
        auto col = good_coloring(gi.h);
        StageState st;
        st.stage = 0;
        for (const auto& e : gi.h.edges()) st.edges.push_back(e.id);
        StageReport rep;
        StageOptions so;
        so.audit_estimator = (it == 0);  // A1/A2 audits on one instance
        auto next = stage_split(gi.h, gi.a, st, p, col, &rep, so);
        CHECK(rep.surrogate_ok);
        CHECK(next.stage == 1);
        CHECK(static_cast<int>(next.edges.size()) == rep.kept_edges);
    }
}

TEST_CASE("empty stage is trivially chained") {
    Hypergraph h(4, 2, 2, {});
    EdgeWeighting a;
    auto p = compute_params_scaled(BigInt(4), 2, 2, 2, 2);
    auto col = good_coloring(h);
    StageState st;
    st.stage = 0;
    StageReport rep;
    auto next = stage_split(h, a, st, p, col, &rep);
    CHECK(next.edges.empty());
    CHECK(rep.chain_ok);
}

TEST_CASE("surrogate expectation matches Monte-Carlo sampling") {
    auto gi = oracles::gen_random(16, 3, 8, 50, 4242, oracles::WeightKind::RandomRational);
    auto p = compute_params_scaled(BigInt(std::max(4, gi.h.observed_max_degree())), 3, 2, 2, 4);
    auto col = good_coloring(gi.h);

    // build the stage-0 surrogate directly over a defective coloring
    DefectiveColoringOptions dopt;
    dopt.enforce_precondition = false;
    dopt.enforce_postconditions = false;
    auto dc = defective_color(gi.h, gi.a, make_rational(1, 4), p.defective_k, col, dopt);
    Hypergraph hf = subhypergraph(gi.h, dc.coloring.domain);
    std::vector<int> chi(hf.num_edges());
    for (int e = 0; e < hf.num_edges(); ++e) chi[e] = dc.coloring.chi.at(hf.edge(e).id);
    auto est = make_surrogate_estimator(hf, gi.a, chi, p, 0);

    BigFloat c1 = BigFloat::pow_si(BigFloat(1) / (BigFloat(2) * p.alpha),
                                   static_cast<long>(p.s - 1));
    BigFloat c3 = p.alpha * p.b[1];
    double expect = est->value().to_double();

    const int trials = 10000;
    Prng rng(99);
    double sum = 0, sumsq = 0;
    std::vector<int> x(hf.num_edges());
    for (int t = 0; t < trials; ++t) {
        for (auto& b : x) b = static_cast<int>(rng.below(2));
        auto parts = est->phi_parts(x);
        double v = (c1 * BigFloat(parts[0]) - c3 * BigFloat(parts[1])).to_double();
        sum += v;
        sumsq += v * v;
    }
    double mean = sum / trials;
    double sd = std::sqrt(std::max(0.0, sumsq / trials - mean * mean) / trials);
    CHECK(std::abs(mean - expect) <= 4 * sd + 1e-12);
}

TEST_CASE("surrogate penalty part agrees with brute-force family counts at w=1") {
    auto gi = oracles::gen_random(8, 2, 4, 10, 31, oracles::WeightKind::RandomRational);
    auto p = compute_params_scaled(BigInt(4), 2, 1, 2, 2);
    auto col = good_coloring(gi.h);
    DefectiveColoringOptions dopt;
    dopt.enforce_precondition = false;
    dopt.enforce_postconditions = false;
    auto dc = defective_color(gi.h, gi.a, make_rational(1, 4), 2, col, dopt);
    Hypergraph hf = subhypergraph(gi.h, dc.coloring.domain);
    std::vector<int> chi(hf.num_edges());
    for (int e = 0; e < hf.num_edges(); ++e) chi[e] = dc.coloring.chi.at(hf.edge(e).id);
    auto est = make_surrogate_estimator(hf, gi.a, chi, p, 0);

    BigInt c2 = binomial_big(floor_to_long(Rational(4) / 2), 1);  // floor(Delta/2) choose 1
    Prng rng(7);
    for (int t = 0; t < 20; ++t) {
        std::vector<int> x(hf.num_edges());
        for (auto& b : x) b = static_cast<int>(rng.below(2));
        auto parts = est->phi_parts(x);
        // brute force: R_{v,e} = # selected edges at v with a different color
        Rational pen(0);
        for (int v = 0; v < hf.num_vertices(); ++v) {
            for (int ei : hf.incident_edges(v)) {
                if (!x[ei]) continue;
                long r = 0;
                for (int fj : hf.incident_edges(v))
                    if (fj != ei && x[fj] && chi[fj] != chi[ei]) ++r;
                pen += gi.a.at(hf.edge(ei).id) * (Rational(r) + Rational(c2));
            }
        }
        CHECK(parts[1] == pen);
    }
}

TEST_CASE("degree reduce at s = 1 enforces the 16x cap") {
    auto gi = oracles::gen_dense_split(32, 2, 8, 55);
    auto p = compute_params_scaled(BigInt(32), 2, 3, 1, 4);
    auto col = good_coloring(gi.h);
    auto red = degree_reduce(gi.h, gi.a, col, p);
    Hypergraph fin = subhypergraph(gi.h, red.final_state.edges);
    CHECK(Rational(fin.observed_max_degree()) <= Rational(32 * 16) / 2);
    CHECK(red.stages.size() == 1);
}

TEST_CASE("degree reduce on an empty hypergraph") {
    Hypergraph h(4, 2, 4, {});
    EdgeWeighting a;
    auto p = compute_params_scaled(BigInt(4), 2, 2, 2, 2);
    auto col = good_coloring(h);
    auto red = degree_reduce(h, a, col, p);
    CHECK(red.final_state.edges.empty());
}

TEST_CASE("direct round: single edge and disjoint edges") {
    Hypergraph one = Hypergraph::from_edges(3, {{0, {0, 1, 2}}});
    EdgeWeighting a;
    a.set(0, Rational(7));
    auto col = good_coloring(one);
    auto p = compute_params(BigInt(one.max_degree() + 1), one.rank());  // degenerate
    auto r = direct_round(one, a, col, p);
    CHECK(r.matching.size() == 1);
    CHECK(r.weight == Rational(7));

    std::vector<HyperEdge> es;
    for (int i = 0; i < 5; ++i) es.push_back({i, {3 * i, 3 * i + 1, 3 * i + 2}});
    Hypergraph dis = Hypergraph::from_edges(15, es);
    EdgeWeighting b = EdgeWeighting::constant(dis, Rational(2));
    auto col2 = good_coloring(dis);
    auto r2 = direct_round(dis, b, col2, compute_params(BigInt(2), 3));
    CHECK(r2.matching.size() == 5);
    CHECK(r2.weight == Rational(10));
}

TEST_CASE("direct round keeps the 0.09/(r Delta) floor, chain or not") {
    for (int it = 0; it < 5; ++it) {
        auto gi = oracles::gen_random(20, 3, 6, 40, 3100 + it,
                                      oracles::WeightKind::RandomRational);
        auto col = good_coloring(gi.h);
        auto p = compute_params_scaled(BigInt(std::max(4, gi.h.max_degree())), 3, 3, 2, 4);
        auto r = direct_round(gi.h, gi.a, col, p);
        CHECK(is_matching(gi.h, r.matching));
        Rational aE = gi.a.total(gi.h);
        long rd = static_cast<long>(gi.h.rank()) * gi.h.max_degree();
        CHECK(r.weight * Rational(rd) >= make_rational(9, 100) * aE);
    }
}
