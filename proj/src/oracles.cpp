#include "hypermatch/oracles.hpp"

#include <algorithm>
#include <cmath>

#include "hypermatch/errors.hpp"
#include "hypermatch/prng.hpp"

namespace hypermatch {
namespace oracles {

namespace {

struct BnbState {
    const Hypergraph* h;
    const EdgeWeighting* a;
    std::vector<int> order;          // edge indices, heaviest first
    std::vector<Rational> suffix;    // suffix weight sums over `order`
    std::vector<char> used;          // vertex occupancy
    std::vector<EdgeId> current;
    std::vector<EdgeId> best_set;
    Rational best;

    void search(size_t pos, Rational acc) {
        if (acc > best) {
            best = acc;
            best_set = current;
        }
        if (pos >= order.size()) return;
        if (acc + suffix[pos] <= best) return;
        const auto& e = h->edge(order[pos]);
        bool free = true;
        for (int v : e.vertices)
            if (used[v]) { free = false; break; }
        if (free) {
            for (int v : e.vertices) used[v] = 1;
            current.push_back(e.id);
            search(pos + 1, acc + a->at(e.id));
            current.pop_back();
            for (int v : e.vertices) used[v] = 0;
        }
        search(pos + 1, acc);
    }
};

}  // namespace

MwmResult brute_force_mwm(const Hypergraph& h, const EdgeWeighting& a, int edge_cap) {
    if (h.num_edges() > edge_cap)
        throw TooLargeError("brute_force_mwm: " + std::to_string(h.num_edges()) +
                            " edges exceeds cap " + std::to_string(edge_cap));
    BnbState st;
    st.h = &h;
    st.a = &a;
    st.order.resize(h.num_edges());
    for (int i = 0; i < h.num_edges(); ++i) st.order[i] = i;
    std::sort(st.order.begin(), st.order.end(), [&](int x, int y) {
        const Rational &wx = a.at(h.edge(x).id), &wy = a.at(h.edge(y).id);
        if (wx != wy) return wx > wy;
        return h.edge(x).id < h.edge(y).id;
    });
    st.suffix.assign(h.num_edges() + 1, Rational(0));
    for (int i = h.num_edges() - 1; i >= 0; --i)
        st.suffix[i] = st.suffix[i + 1] + a.at(h.edge(st.order[i]).id);
    st.used.assign(h.num_vertices(), 0);
    st.best = 0;
    st.search(0, Rational(0));
    Matching m{st.best_set};
    m.normalize();
    return MwmResult{std::move(m), st.best};
}

int max_matching_size(const Hypergraph& h, int edge_cap) {
    auto r = brute_force_mwm(h, EdgeWeighting::constant(h, Rational(1)), edge_cap);
    return r.matching.size();
}

MwmResult exhaustive_mwm(const Hypergraph& h, const EdgeWeighting& a, int edge_cap) {
    const int m = h.num_edges();
    if (m > edge_cap) throw TooLargeError("exhaustive_mwm: too many edges");
    MwmResult best;
    best.weight = 0;
    for (uint32_t mask = 0; mask < (1u << m); ++mask) {
        std::vector<char> used(h.num_vertices(), 0);
        Rational w(0);
        bool ok = true;
        Matching cand;
        for (int i = 0; i < m && ok; ++i) {
            if (!(mask & (1u << i))) continue;
            for (int v : h.edge(i).vertices) {
                if (used[v]) { ok = false; break; }
                used[v] = 1;
            }
            if (ok) {
                w += a.at(h.edge(i).id);
                cand.edge_ids.push_back(h.edge(i).id);
            }
        }
        if (ok && w > best.weight) {
            best.weight = w;
            cand.normalize();
            best.matching = cand;
        }
    }
    return best;
}

// --- exact simplex ---------------------------------------------------------
//
// maximize c.x subject to Ax <= b, x >= 0, all rational. Dense tableau,
// Bland's pivot rule for guaranteed termination.
namespace {

class Simplex {
  public:
    Simplex(std::vector<std::vector<Rational>> A, std::vector<Rational> b,
            std::vector<Rational> c)
        : n_(static_cast<int>(A.size())), m_(static_cast<int>(c.size())) {
        // tableau rows: n_ constraints; columns: m_ structural + n_ slacks + rhs
        tab_.assign(n_ + 1, std::vector<Rational>(m_ + n_ + 1, Rational(0)));
        basis_.resize(n_);
        for (int i = 0; i < n_; ++i) {
            for (int j = 0; j < m_; ++j) tab_[i][j] = A[i][j];
            tab_[i][m_ + i] = 1;
            tab_[i][m_ + n_] = b[i];
            basis_[i] = m_ + i;
        }
        for (int j = 0; j < m_; ++j) tab_[n_][j] = -c[j];  // minimize -c.x
    }

    void solve() {
        for (;;) {
            int enter = -1;
            for (int j = 0; j < m_ + n_; ++j)
                if (tab_[n_][j] < 0) { enter = j; break; }
            if (enter < 0) return;
            int leave = -1;
            Rational best_ratio;
            for (int i = 0; i < n_; ++i) {
                if (tab_[i][enter] <= 0) continue;
                Rational ratio = tab_[i][m_ + n_] / tab_[i][enter];
                if (leave < 0 || ratio < best_ratio ||
                    (ratio == best_ratio && basis_[i] < basis_[leave])) {
                    leave = i;
                    best_ratio = ratio;
                }
            }
            require(leave >= 0, "unbounded LP");
            pivot(leave, enter);
        }
    }

    Rational objective() const { return tab_[n_][m_ + n_]; }

    std::vector<Rational> primal() const {
        std::vector<Rational> x(m_, Rational(0));
        for (int i = 0; i < n_; ++i)
            if (basis_[i] < m_) x[basis_[i]] = tab_[i][m_ + n_];
        return x;
    }

    // Duals are the reduced costs of the slack columns.
    std::vector<Rational> dual() const {
        std::vector<Rational> y(n_);
        for (int i = 0; i < n_; ++i) y[i] = tab_[n_][m_ + i];
        return y;
    }

  private:
    void pivot(int row, int col) {
        Rational p = tab_[row][col];
        for (auto& v : tab_[row]) v /= p;
        for (int i = 0; i <= n_; ++i) {
            if (i == row || tab_[i][col] == 0) continue;
            Rational f = tab_[i][col];
            for (int j = 0; j <= m_ + n_; ++j) tab_[i][j] -= f * tab_[row][j];
        }
        basis_[row] = col;
    }

    int n_, m_;
    std::vector<std::vector<Rational>> tab_;
    std::vector<int> basis_;
};

}  // namespace

LpResult exact_fractional_opt(const Hypergraph& h, const EdgeWeighting& a,
                              int edge_cap, int vertex_cap) {
    if (h.num_edges() > edge_cap || h.num_vertices() > vertex_cap)
        throw TooLargeError("exact_fractional_opt: instance exceeds caps");
    const int m = h.num_edges();
    const int n = h.num_vertices();
    std::vector<std::vector<Rational>> A(n, std::vector<Rational>(m, Rational(0)));
    for (int i = 0; i < m; ++i)
        for (int v : h.edge(i).vertices) A[v][i] = 1;
    std::vector<Rational> b(n, Rational(1));
    std::vector<Rational> c(m);
    for (int i = 0; i < m; ++i) c[i] = a.at(h.edge(i).id);

    Simplex sx(A, b, c);
    sx.solve();

    LpResult out;
    out.optimum = sx.objective();
    auto x = sx.primal();
    BigInt q(1);
    for (const auto& v : x) {
        BigInt den = v.get_den();
        mpz_lcm(q.get_mpz_t(), q.get_mpz_t(), den.get_mpz_t());
    }
    out.primal.set_q(q.get_si());
    for (int i = 0; i < m; ++i) out.primal.set(h.edge(i).id, x[i]);
    out.dual = sx.dual();

    // strong duality + dual feasibility, exact
    Rational dual_obj(0);
    for (const auto& y : out.dual) {
        require(y >= 0, "negative dual");
        dual_obj += y;
    }
    require(dual_obj == out.optimum, "duality gap in exact simplex");
    for (int i = 0; i < m; ++i) {
        Rational cover(0);
        for (int v : h.edge(i).vertices) cover += out.dual[v];
        require(cover >= c[i], "dual infeasible in exact simplex");
    }
    require(out.primal.feasible(h), "primal infeasible in exact simplex");
    return out;
}

MonteCarlo monte_carlo_expectation(const std::function<double(uint64_t)>& statistic,
                                   long trials, uint64_t seed) {
    require(trials >= 1, "trials must be >= 1");
    double sum = 0, sumsq = 0;
    for (long t = 0; t < trials; ++t) {
        double v = statistic(mix_seed(seed, static_cast<uint64_t>(t)));
        sum += v;
        sumsq += v * v;
    }
    MonteCarlo mc;
    mc.trials = trials;
    mc.mean = sum / static_cast<double>(trials);
    double var = std::max(0.0, sumsq / trials - mc.mean * mc.mean);
    mc.stderr_ = trials > 1 ? std::sqrt(var / (trials - 1)) : 0.0;
    return mc;
}

// --- generators -------------------------------------------------------------

EdgeWeighting random_weights(const Hypergraph& h, WeightKind kind, uint64_t seed) {
    EdgeWeighting a;
    Prng rng(mix_seed(seed, 0x77e1));
    for (const auto& e : h.edges()) {
        if (kind == WeightKind::Unit) {
            a.set(e.id, Rational(1));
        } else {
            long num = 1 + static_cast<long>(rng.below(64));
            long den = 1 + static_cast<long>(rng.below(16));
            a.set(e.id, make_rational(num, den));
        }
    }
    return a;
}

GeneratedInstance gen_ring(int n) {
    if (n < 3) throw InfeasibleParamsError("ring needs n >= 3");
    std::vector<HyperEdge> edges;
    for (int i = 0; i < n; ++i)
        edges.push_back(HyperEdge{i, {i, (i + 1) % n}});
    for (auto& e : edges) std::sort(e.vertices.begin(), e.vertices.end());
    Hypergraph h(n, 2, 2, std::move(edges));
    EdgeWeighting a = EdgeWeighting::constant(h, Rational(1));
    return GeneratedInstance{std::move(h), std::move(a)};
}

GeneratedInstance gen_random(int n, int r, int max_degree, int m, uint64_t seed,
                             WeightKind weights) {
    if (n < r || r < 1 || max_degree < 1 || m < 0)
        throw InfeasibleParamsError("gen_random: bad parameters");
    Prng rng(seed);
    std::vector<int> deg(n, 0);
    std::vector<HyperEdge> edges;
    long attempts = 0;
    const long max_attempts = 200L * (m + 1);
    while (static_cast<int>(edges.size()) < m && attempts++ < max_attempts) {
        std::vector<int> vs;
        while (static_cast<int>(vs.size()) < r) {
            int v = static_cast<int>(rng.below(static_cast<uint64_t>(n)));
            if (std::find(vs.begin(), vs.end(), v) == vs.end()) vs.push_back(v);
        }
        bool ok = true;
        for (int v : vs)
            if (deg[v] >= max_degree) { ok = false; break; }
        if (!ok) continue;
        for (int v : vs) ++deg[v];
        std::sort(vs.begin(), vs.end());
        edges.push_back(HyperEdge{static_cast<EdgeId>(edges.size()), std::move(vs)});
    }
    Hypergraph h(n, r, max_degree, std::move(edges));
    EdgeWeighting a = random_weights(h, weights, mix_seed(seed, 1));
    return GeneratedInstance{std::move(h), std::move(a)};
}

GeneratedInstance gen_union_of_forests(int lambda, int n, uint64_t seed) {
    if (lambda < 1 || n < 2) throw InfeasibleParamsError("gen_union_of_forests: bad parameters");
    Prng rng(seed);
    std::vector<HyperEdge> edges;
    EdgeId next = 0;
    for (int f = 0; f < lambda; ++f) {
        // random attachment order gives a spanning tree; drop ~1/4 of the
        // edges so forests differ in shape
        std::vector<int> perm(n);
        for (int i = 0; i < n; ++i) perm[i] = i;
        for (int i = n - 1; i > 0; --i)
            std::swap(perm[i], perm[rng.below(static_cast<uint64_t>(i + 1))]);
        for (int i = 1; i < n; ++i) {
            if (rng.below(4) == 0) continue;
            int u = perm[i];
            int v = perm[rng.below(static_cast<uint64_t>(i))];
            std::vector<int> vs{std::min(u, v), std::max(u, v)};
            edges.push_back(HyperEdge{next++, std::move(vs)});
        }
    }
    int dmax = 1;
    {
        std::vector<int> deg(n, 0);
        for (const auto& e : edges)
            for (int v : e.vertices) ++deg[v];
        for (int d : deg) dmax = std::max(dmax, d);
    }
    Hypergraph h(n, 2, dmax, std::move(edges));
    EdgeWeighting a = EdgeWeighting::constant(h, Rational(1));
    return GeneratedInstance{std::move(h), std::move(a)};
}

GeneratedInstance gen_dense_split(int delta, int r, int n, uint64_t seed, WeightKind weights) {
    if (n % r != 0 || n < r || delta < 1)
        throw InfeasibleParamsError("gen_dense_split: need r | n, delta >= 1");
    Prng rng(seed);
    std::vector<HyperEdge> edges;
    EdgeId next = 0;
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    // each round partitions the vertices into n/r edges, adding exactly one
    // to every degree; after delta rounds all degrees equal delta
    for (int round = 0; round < delta; ++round) {
        for (int i = n - 1; i > 0; --i)
            std::swap(perm[i], perm[rng.below(static_cast<uint64_t>(i + 1))]);
        for (int base = 0; base < n; base += r) {
            std::vector<int> vs(perm.begin() + base, perm.begin() + base + r);
            std::sort(vs.begin(), vs.end());
            edges.push_back(HyperEdge{next++, std::move(vs)});
        }
    }
    Hypergraph h(n, r, delta, std::move(edges));
    EdgeWeighting a = random_weights(h, weights, mix_seed(seed, 2));
    return GeneratedInstance{std::move(h), std::move(a)};
}

GeneratedInstance generate(const std::string& kind, const std::vector<long>& params,
                           uint64_t seed) {
    auto need = [&](size_t k) {
        if (params.size() < k)
            throw InfeasibleParamsError("generator '" + kind + "' needs " + std::to_string(k) +
                                        " params");
    };
    if (kind == "ring") {
        need(1);
        return gen_ring(static_cast<int>(params[0]));
    }
    if (kind == "random") {
        need(4);
        WeightKind w = params.size() >= 5 && params[4] != 0 ? WeightKind::RandomRational
                                                            : WeightKind::Unit;
        return gen_random(static_cast<int>(params[0]), static_cast<int>(params[1]),
                          static_cast<int>(params[2]), static_cast<int>(params[3]), seed, w);
    }
    if (kind == "forests") {
        need(2);
        return gen_union_of_forests(static_cast<int>(params[0]), static_cast<int>(params[1]),
                                    seed);
    }
    if (kind == "dense") {
        need(3);
        return gen_dense_split(static_cast<int>(params[0]), static_cast<int>(params[1]),
                               static_cast<int>(params[2]), seed);
    }
    throw InfeasibleParamsError("unknown generator kind: " + kind);
}

}  // namespace oracles
}  // namespace hypermatch
