#include <algorithm>

#include "doctest.h"
#include "hypermatch/coloring.hpp"
#include "hypermatch/derand.hpp"
#include "hypermatch/errors.hpp"
#include "hypermatch/oracles.hpp"

using namespace hypermatch;

namespace {

// Counts monochromatic edges of a graph under random 2-coloring of nodes.
// Flags: one per graph edge; nodes: graph vertices with fair bits.
class MonochromeEdges final : public BlackBoxEstimator {
  public:
    explicit MonochromeEdges(const Graph& g) : g_(g) {
        pi_.assign(g.num_nodes(), -1);  // -1 free, else committed bit
        for (int v = 0; v < g.num_nodes(); ++v)
            for (int w : g.neighbors(v))
                if (v < w) edges_.push_back({v, w});
        affected_.resize(g.num_nodes());
        writers_.resize(edges_.size());
        for (size_t f = 0; f < edges_.size(); ++f) {
            affected_[edges_[f].first].push_back(static_cast<int>(f));
            affected_[edges_[f].second].push_back(static_cast<int>(f));
            writers_[f] = {edges_[f].first, edges_[f].second};
        }
    }

    int num_nodes() const override { return g_.num_nodes(); }
    int num_flags() const override { return static_cast<int>(edges_.size()); }
    const ValueSpace& value_space(int) const override { return ValueSpace::fair_bit(); }
    const std::vector<int>& flags_affected_by(int v) const override { return affected_[v]; }
    const std::vector<int>& writers_of(int f) const override { return writers_[f]; }

    Rational flag_expectation(int flag, int node, int value) override {
        auto [x, y] = edges_[flag];
        int bx = (x == node) ? value : pi_[x];
        int by = (y == node) ? value : pi_[y];
        if (bx >= 0 && by >= 0) return bx == by ? Rational(1) : Rational(0);
        return make_rational(1, 2);  // one side free
    }

    void commit(int node, int value) override { pi_[node] = value; }

    Rational total_expectation() override {
        Rational t(0);
        for (size_t f = 0; f < edges_.size(); ++f)
            t += flag_expectation(static_cast<int>(f), -1, 0);
        return t;
    }

    int monochromatic() const {
        int c = 0;
        for (auto [x, y] : edges_)
            if (pi_[x] == pi_[y]) ++c;
        return c;
    }

  private:
    const Graph& g_;
    std::vector<int> pi_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> affected_, writers_;
};

// Linear potential sum_v c_v X_v plus cross-color pair products; exact.
class PairProductPhi final : public MultilinearEstimator {
  public:
    PairProductPhi(int n, std::vector<std::pair<int, int>> pairs) : n_(n), pairs_(std::move(pairs)) {
        pi_.assign(n, -1);
    }
    int num_nodes() const override { return n_; }
    const ValueSpace& value_space(int) const override { return ValueSpace::fair_bit(); }
    int derivative_sign(int node, int u, int uprime) const override {
        // D_{1,0} Phi = sum over pairs containing node of E[X_other]
        Rational d(0);
        for (auto [x, y] : pairs_) {
            if (x == node) d += prob(y);
            if (y == node) d += prob(x);
        }
        int s = d > 0 ? 1 : (d < 0 ? -1 : 0);
        return u > uprime ? s : -s;
    }
    void commit(int node, int value) override { pi_[node] = value; }
    std::vector<Rational> phi_parts(const std::vector<int>& x) const override {
        Rational t(0);
        for (auto [a, b] : pairs_) t += Rational(x[a] * x[b]);
        return {t};
    }
    std::vector<int> derivative_support(int node) const override {
        std::vector<int> s{node};
        for (auto [x, y] : pairs_) {
            if (x == node) s.push_back(y);
            if (y == node) s.push_back(x);
        }
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        return s;
    }
    Rational expected() const {
        Rational t(0);
        for (auto [x, y] : pairs_) t += prob(x) * prob(y);
        return t;
    }

  private:
    Rational prob(int v) const { return pi_[v] < 0 ? make_rational(1, 2) : Rational(pi_[v]); }
    int n_;
    std::vector<std::pair<int, int>> pairs_;
    std::vector<int> pi_;
};

}  // namespace

TEST_CASE("triangle 2-coloring: at most one monochromatic edge") {
    Graph tri(3);
    tri.add_edge(0, 1);
    tri.add_edge(1, 2);
    tri.add_edge(0, 2);
    tri.finalize();
    MonochromeEdges est(tri);
    // proper coloring of the square of the triangle: all distinct
    std::vector<int> chi{1, 2, 3};
    auto res = derand_proper(tri, chi, est, Sense::Minimize);
    CHECK(res.expected_before == make_rational(3, 2));
    CHECK(res.achieved <= res.expected_before);
    CHECK(est.monochromatic() <= 1);  // E = 3/2, so the minimizer has <= 1
}

TEST_CASE("derand_proper rejects improper colorings") {
    Graph tri(3);
    tri.add_edge(0, 1);
    tri.add_edge(1, 2);
    tri.add_edge(0, 2);
    tri.finalize();
    MonochromeEdges est(tri);
    std::vector<int> chi{1, 1, 2};
    CHECK_THROWS_AS(derand_proper(tri, chi, est, Sense::Minimize), NotProperError);
}

TEST_CASE("derand beats expectation on random graphs, exhaustively verified") {
    for (int it = 0; it < 10; ++it) {
        auto gi = oracles::gen_random(9, 2, 3, 10, 40 + it);
        Graph g(9);
        for (const auto& e : gi.h.edges()) g.add_edge(e.vertices[0], e.vertices[1]);
        g.finalize();
        // exhaustive expectation over all 2^9 assignments
        long total = 0;
        int m = 0;
        for (int v = 0; v < 9; ++v)
            for (int w : g.neighbors(v))
                if (v < w) ++m;
        for (int mask = 0; mask < (1 << 9); ++mask) {
            for (int v = 0; v < 9; ++v)
                for (int w : g.neighbors(v))
                    if (v < w && ((mask >> v) & 1) == ((mask >> w) & 1)) ++total;
        }
        Rational expect(total, 1 << 9);
        expect.canonicalize();

        MonochromeEdges est(g);
        auto col = greedy_square_coloring(g, "g2");
        auto res = derand_proper(g, col.color, est, Sense::Minimize);
        CHECK(res.expected_before == expect);
        CHECK(Rational(est.monochromatic()) <= expect);
    }
}

TEST_CASE("simple_matching on a single edge") {
    Hypergraph h = Hypergraph::from_edges(2, {{0, {0, 1}}});
    EdgeWeighting a;
    a.set(0, Rational(3));
    auto col = good_coloring(h);
    auto r = simple_matching(h, a, col);
    CHECK(r.matching.size() == 1);
    CHECK(is_matching(h, r.matching));
    Rational floor = make_rational(9, 100) * Rational(3) / Rational(2 * 2);
    CHECK(r.expected_flags >= floor);
}

TEST_CASE("simple_matching floor on random instances") {
    for (int it = 0; it < 8; ++it) {
        auto gi = oracles::gen_random(12, 3, 4, 30, 700 + it, oracles::WeightKind::RandomRational);
        auto col = good_coloring(gi.h);
        auto r = simple_matching(gi.h, gi.a, col);
        CHECK(is_matching(gi.h, r.matching));
        Rational aE = gi.a.total(gi.h);
        long rd = static_cast<long>(gi.h.rank()) * gi.h.max_degree();
        Rational floor = make_rational(9, 100) * aE / Rational(rd);
        Rational got(0);
        for (EdgeId id : r.matching.edge_ids) got += gi.a.at(id);
        CHECK(got >= floor);
    }
}

TEST_CASE("simple_matching with zero weights is vacuous but valid") {
    auto gi = oracles::gen_random(8, 2, 3, 8, 5);
    EdgeWeighting zero = EdgeWeighting::constant(gi.h, Rational(0));
    auto col = good_coloring(gi.h);
    auto r = simple_matching(gi.h, zero, col);
    CHECK(is_matching(gi.h, r.matching));
}

TEST_CASE("multilinear: linear potential optimizes per node") {
    // Phi = X_0 - X_1 with both nodes the same color: no interactions at all
    class LinearPhi final : public MultilinearEstimator {
      public:
        int num_nodes() const override { return 2; }
        const ValueSpace& value_space(int) const override { return ValueSpace::fair_bit(); }
        int derivative_sign(int node, int u, int uprime) const override {
            int s = node == 0 ? 1 : -1;
            return u > uprime ? s : -s;
        }
        void commit(int, int) override {}
        std::vector<Rational> phi_parts(const std::vector<int>& x) const override {
            return {Rational(x[0]), Rational(x[1])};
        }
        std::vector<int> derivative_support(int node) const override { return {node}; }
    } est;
    std::vector<int> chi{1, 1};
    auto asg = derand_multilinear(chi, est, Sense::Minimize);
    CHECK(asg[0] == 0);
    CHECK(asg[1] == 1);
}

TEST_CASE("multilinear pair potential: achieved <= expectation, exhaustive") {
    // pairs crossing a 2-class coloring; n <= 10 exhaustive
    const int n = 8;
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i + 1 < n; i += 2) pairs.push_back({i, i + 1});
    pairs.push_back({0, 3});
    pairs.push_back({2, 5});
    std::vector<int> chi(n);
    for (int i = 0; i < n; ++i) chi[i] = i % 2 ? 2 : 1;  // pairs all cross-color

    PairProductPhi est(n, pairs);
    Rational expect = est.expected();
    // exhaustive expectation cross-check
    Rational sum(0);
    for (int mask = 0; mask < (1 << n); ++mask) {
        std::vector<int> x(n);
        for (int i = 0; i < n; ++i) x[i] = (mask >> i) & 1;
        sum += est.phi_parts(x)[0];
    }
    CHECK(sum / Rational(1 << n) == expect);

    audit_multilinear_a1(chi, est, {});
    audit_multilinear_a2(est, {});
    auto asg = derand_multilinear(chi, est, Sense::Minimize);
    CHECK(est.phi_parts(asg)[0] <= expect);
}

TEST_CASE("multilinear A1 audit fires on a same-color quadratic term") {
    PairProductPhi est(4, {{0, 1}});
    std::vector<int> chi{1, 1, 2, 2};  // nodes 0,1 share a color and a pair
    CHECK_THROWS_AS(audit_multilinear_a1(chi, est, {}), A1ViolationError);
}

TEST_CASE("toy split: w=1 degenerates to degree counting") {
    auto gi = oracles::gen_random(10, 2, 6, 20, 13);
    auto col = good_coloring(gi.h);
    auto dc = defective_color(gi.h, gi.a, make_rational(1, 4), 2, col,
                              [] {
                                  DefectiveColoringOptions o;
                                  o.enforce_precondition = false;
                                  o.enforce_postconditions = false;
                                  return o;
                              }());
    auto ts = toy_degree_split(gi.h, 6, 1, dc.coloring);
    CHECK(ts.phi_achieved <= ts.phi_expected);
}

TEST_CASE("toy split on a dense instance with w=3") {
    auto gi = oracles::gen_dense_split(64, 3, 12, 31);
    auto col = good_coloring(gi.h);
    DefectiveColoringOptions o;
    o.enforce_precondition = false;
    o.enforce_postconditions = false;
    auto dc = defective_color(gi.h, gi.a, make_rational(1, 4), 8, col, o);
    // threshold (1+1/2) * Delta/2 = 48
    auto ts = toy_degree_split(gi.h, 48, 3, dc.coloring);
    CHECK(ts.phi_achieved <= ts.phi_expected);
    CHECK(ts.bad_vertices == 0);  // reported, and expected to be clean here
}

TEST_CASE("toy split on the empty hypergraph") {
    Hypergraph h(3, 2, 1, {});
    EdgeColoring chi;
    chi.k = 2;
    auto ts = toy_degree_split(h, 4, 2, chi);
    CHECK(ts.selected.empty());
    CHECK(ts.phi_achieved == Rational(0));
}

TEST_CASE("binomial tail bound backs the family counter") {
    // beta * C(deg, w) * 2^-w >= Pr[Binomial(deg,1/2) >= t] for deg <= 30
    for (long deg = 4; deg <= 30; deg += 2) {
        long t = (3 * deg) / 4;
        for (int w = 1; w <= std::min(4L, t); ++w) {
            Rational beta(BigInt(1), binomial(t, w));
            beta.canonicalize();
            Rational lhs = beta * Rational(binomial(deg, w), pow_int(BigInt(2), w));
            lhs.canonicalize();
            CHECK(lhs >= binomial_upper_tail_half(deg, t));
        }
    }
}
