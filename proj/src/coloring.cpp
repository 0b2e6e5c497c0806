#include "hypermatch/coloring.hpp"

#include <algorithm>
#include <sstream>

#include "hypermatch/bigfloat.hpp"
#include "hypermatch/derand.hpp"
#include "hypermatch/errors.hpp"
#include "hypermatch/prng.hpp"

namespace hypermatch {

int VertexColoring::max_color() const {
    int m = 0;
    for (int c : color) m = std::max(m, c);
    return m;
}

bool is_proper(const Graph& g, const std::vector<int>& color) {
    for (int v = 0; v < g.num_nodes(); ++v)
        for (int w : g.neighbors(v))
            if (color[v] == color[w]) return false;
    return true;
}

namespace {

// Priority greedy. Processing in decreasing priority order reproduces the
// round-based run where a node commits once it beats all uncommitted
// neighbors; round_of tracks the committing round for honest reporting.
// Priorities hash stable unique ids, never positional indices, so far-away
// edits cannot reshuffle local decisions.
VertexColoring priority_greedy(const Graph& g, bool on_square, const std::string& target,
                               const std::vector<uint64_t>* uids = nullptr) {
    const int n = g.num_nodes();
    std::vector<uint64_t> prio(n);
    for (int v = 0; v < n; ++v) {
        uint64_t uid = uids ? (*uids)[v] : static_cast<uint64_t>(v);
        prio[v] = splitmix64(uid + 0x5851f42d);
    }
    std::vector<int> order(n);
    for (int v = 0; v < n; ++v) order[v] = v;
    std::sort(order.begin(), order.end(), [&](int x, int y) {
        if (prio[x] != prio[y]) return prio[x] > prio[y];
        return x < y;
    });

    VertexColoring out;
    out.color.assign(n, 0);
    out.target = target;
    std::vector<int> round_of(n, 0);
    std::vector<int> stamp(n, -1);
    std::vector<int> seen_color(n + 2, -1);
    std::vector<int> nb;
    int tick = 0;
    auto higher = [&](int w, int v) {
        return prio[w] > prio[v] || (prio[w] == prio[v] && w < v);
    };
    for (int v : order) {
        ++tick;
        if (on_square)
            g.square_neighbors(v, nb, stamp, tick);
        else
            nb = g.neighbors(v);
        int round = 1;
        for (int w : nb) {
            if (out.color[w] > 0 && out.color[w] <= n + 1) seen_color[out.color[w]] = tick;
            if (higher(w, v)) round = std::max(round, round_of[w] + 1);
        }
        int c = 1;
        while (seen_color[c] == tick) ++c;
        out.color[v] = c;
        out.k = std::max(out.k, c);
        round_of[v] = round;
        out.rounds = std::max(out.rounds, round);
    }
    out.proper = true;
    return out;
}

}  // namespace

VertexColoring greedy_square_coloring(const Graph& g, const std::string& target) {
    return priority_greedy(g, true, target);
}

VertexColoring greedy_coloring(const Graph& g, const std::string& target) {
    return priority_greedy(g, false, target);
}

VertexColoring good_coloring(const Hypergraph& h) {
    auto inc = incidence_graph(h);
    std::vector<uint64_t> uids(inc.g.num_nodes());
    for (int v = 0; v < h.num_vertices(); ++v)
        uids[v] = mix_seed(0x7e57, static_cast<uint64_t>(v));
    for (int i = 0; i < h.num_edges(); ++i)
        uids[h.num_vertices() + i] = mix_seed(0xed6e, static_cast<uint64_t>(h.edge(i).id));
    auto col = priority_greedy(inc.g, true, "inc2", &uids);
    long rd = static_cast<long>(std::max(2, h.rank())) * std::max(1, h.max_degree());
    require(col.k <= rd * rd + 1, "good coloring exceeded (r*Delta)^2 + 1 colors");
    return col;
}

VertexColoring reduce_colors(const Graph& g, const VertexColoring& c, int d) {
    require(d >= g.max_degree(), "reduce_colors: need d >= max degree");
    if (!is_proper(g, c.color)) throw NotProperError("reduce_colors: input not proper");
    VertexColoring out = c;
    const int n = g.num_nodes();
    std::vector<std::vector<int>> by_color(std::max(out.k, d + 1) + 1);
    for (int v = 0; v < n; ++v) by_color[out.color[v]].push_back(v);
    int stages = 0;
    for (int stage = d + 2; stage <= out.k; ++stage) {
        ++stages;
        for (int v : by_color[stage]) {
            std::vector<char> used(d + 2, 0);
            for (int w : g.neighbors(v))
                if (out.color[w] <= d + 1) used[out.color[w]] = 1;
            int cc = 1;
            while (used[cc]) ++cc;
            out.color[v] = cc;  // cc <= deg+1 <= d
        }
    }
    out.k = out.max_color();
    out.rounds = c.rounds + stages;
    require(out.k <= d + 1, "reduce_colors: failed to reach d+1 colors");
    require(is_proper(g, out.color), "reduce_colors: output not proper");
    return out;
}

int measure_defectiveness(const Hypergraph& h, const EdgeColoring& c) {
    int worst = 0;
    std::vector<std::pair<int, int>> counts;  // (color, count) scratch per vertex
    for (int v = 0; v < h.num_vertices(); ++v) {
        counts.clear();
        for (int idx : h.incident_edges(v)) {
            auto it = c.chi.find(h.edge(idx).id);
            if (it == c.chi.end()) continue;
            counts.push_back({it->second, 1});
        }
        std::sort(counts.begin(), counts.end());
        int run = 0;
        for (size_t i = 0; i < counts.size(); ++i) {
            run = (i > 0 && counts[i].first == counts[i - 1].first) ? run + 1 : 1;
            worst = std::max(worst, run);
        }
    }
    return worst;
}

// --- degree splitting --------------------------------------------------------

namespace {

struct VirtualNode {
    int vertex;
    std::vector<int> members;  // edge indices
    Rational weight;           // a(N(u))
    long hi_min = 0;           // bad iff z >= hi_min ...
    long lo_max = -1;          // ... or z <= lo_max
    long committed_one = 0;
    long free_count = 0;
    std::vector<BigInt> row;   // C(free_count, k)
};

// Flags are virtual nodes; the random nodes are edges choosing a side.
// Each flag is weight * [side-1 degree or side-2 degree beyond threshold],
// with exact binomial-tail conditional expectations.
class SplitTailEstimator final : public BlackBoxEstimator {
  public:
    SplitTailEstimator(const Hypergraph& h, std::vector<VirtualNode> vnodes)
        : h_(h), vnodes_(std::move(vnodes)) {
        affected_.resize(h.num_edges());
        writers_.resize(vnodes_.size());
        for (size_t u = 0; u < vnodes_.size(); ++u) {
            auto& vn = vnodes_[u];
            vn.free_count = static_cast<long>(vn.members.size());
            vn.row.assign(vn.free_count + 1, BigInt(0));
            vn.row[0] = 1;
            for (long k = 1; k <= vn.free_count; ++k)
                vn.row[k] = vn.row[k - 1] * (vn.free_count - k + 1) / k;
            for (int e : vn.members) affected_[e].push_back(static_cast<int>(u));
            writers_[u] = vn.members;
        }
    }

    int num_nodes() const override { return h_.num_edges(); }
    int num_flags() const override { return static_cast<int>(vnodes_.size()); }
    const ValueSpace& value_space(int) const override { return ValueSpace::fair_bit(); }
    const std::vector<int>& flags_affected_by(int node) const override { return affected_[node]; }
    const std::vector<int>& writers_of(int flag) const override { return writers_[flag]; }

    Rational flag_expectation(int flag, int node, int value) override {
        if (node >= 0) prepare(node);
        const auto& vn = vnodes_[flag];
        long c1 = vn.committed_one + (node >= 0 ? value : 0);
        return vn.weight * tail_probability(vn, c1);
    }

    void commit(int node, int value) override {
        prepare(node);
        for (int u : affected_[node]) vnodes_[u].committed_one += value;
        prepared_ = -1;
    }

    Rational total_expectation() override {
        require(prepared_ == -1, "pending tentative evaluation");
        Rational t(0);
        for (const auto& vn : vnodes_) t += vn.weight * tail_probability(vn, vn.committed_one);
        return t;
    }

    long realized_side1(int flag) const { return vnodes_[flag].committed_one; }
    const VirtualNode& vnode(int flag) const { return vnodes_[flag]; }

  private:
    void prepare(int node) {
        if (prepared_ == node) return;
        require(prepared_ == -1, "interleaved tentative evaluations");
        for (int u : affected_[node]) {
            auto& vn = vnodes_[u];
            // row <- C(free_count - 1, .) in place
            for (long k = 1; k < vn.free_count; ++k) vn.row[k] -= vn.row[k - 1];
            vn.row.pop_back();
            --vn.free_count;
        }
        prepared_ = node;
    }

    // Pr[Z1 >= hi_min or Z1 <= lo_max] with Z1 = c1 + Binomial(free, 1/2)
    Rational tail_probability(const VirtualNode& vn, long c1) const {
        const long f = vn.free_count;
        long hi_start = vn.hi_min - c1;  // in terms of the free part
        long lo_end = vn.lo_max - c1;
        if (hi_start < 0) hi_start = 0;
        if (lo_end > f) lo_end = f;
        BigInt num(0);
        if (lo_end >= hi_start - 1) {
            num = pow_int(BigInt(2), static_cast<unsigned long>(f));  // everything bad
        } else {
            for (long k = hi_start; k <= f; ++k) num += vn.row[k];
            for (long k = 0; k <= lo_end; ++k) num += vn.row[k];
        }
        Rational p(num, pow_int(BigInt(2), static_cast<unsigned long>(f)));
        p.canonicalize();
        return p;
    }

    const Hypergraph& h_;
    std::vector<VirtualNode> vnodes_;
    std::vector<std::vector<int>> affected_, writers_;
    int prepared_ = -1;
};

}  // namespace

DegreeSplitResult degree_split(const Hypergraph& h, const EdgeWeighting& a,
                               const Rational& eps, const Rational& eta,
                               const VertexColoring& good_col, const DegreeSplitOptions& opt) {
    require(eps > 0 && eps <= make_rational(1, 2), "eps must lie in (0, 1/2]");
    require(eta > 0 && eta <= make_rational(1, 2), "eta must lie in (0, 1/2]");
    DegreeSplitResult out;
    out.input_weight = a.total(h);
    if (h.num_edges() == 0) {
        out.kept_weight = 0;
        return out;
    }

    const long r = std::max(2, h.rank());
    Rational delta = opt.declared_delta > 0 ? opt.declared_delta : Rational(h.max_degree());
    for (int v = 0; v < h.num_vertices(); ++v)
        require(Rational(h.degree(v)) <= delta, "vertex degree above the declared bound");

    // alpha = 50 log2(r/eta) / eps^2; the splitting precondition asks for
    // delta >= 2*alpha
    BigFloat log_term = BigFloat::log2_of(BigFloat(Rational(r) / eta));
    BigFloat alpha_f = BigFloat(50) * log_term / BigFloat(eps * eps);
    if (opt.enforce_precondition) {
        if (!(BigFloat(delta) >= BigFloat(2) * alpha_f))
            throw PreconditionError("degree_split: Delta below 100 log2(r/eta)/eps^2");
    }
    long alpha = opt.alpha_override > 0 ? opt.alpha_override : std::max(1L, alpha_f.ceil_to_long());

    // virtual nodes for vertices of degree > Delta/2, blocks of size alpha
    // with the tail merged into the last block
    std::vector<VirtualNode> vnodes;
    Rational half_delta = delta / 2;
    for (int v = 0; v < h.num_vertices(); ++v) {
        long deg = h.degree(v);
        if (Rational(deg) <= half_delta) continue;  // already within the bound
        long blocks = std::max(1L, deg / alpha);
        const auto& inc = h.incident_edges(v);
        for (long b = 0; b < blocks; ++b) {
            VirtualNode vn;
            vn.vertex = v;
            long lo = b * alpha;
            long hi = (b + 1 == blocks) ? deg : (b + 1) * alpha;
            for (long j = lo; j < hi; ++j) vn.members.push_back(inc[j]);
            vn.weight = 0;
            for (int e : vn.members) vn.weight += a.at(h.edge(e).id);
            // bad iff Z1 > theta or deg(u) - Z1 > theta. The per-node slack
            // Delta/deg(v) >= 1 keeps the vertex sum at (1+eps) Delta / 2
            // while vertices under the declared bound breathe.
            long du = static_cast<long>(vn.members.size());
            Rational theta = (1 + eps) * Rational(du) * delta / (2 * Rational(deg));
            vn.hi_min = floor_to_long(theta) + 1;
            vn.lo_max = du - vn.hi_min;
            vnodes.push_back(std::move(vn));
        }
    }
    out.virtual_nodes = static_cast<int>(vnodes.size());

    SplitTailEstimator est(h, std::move(vnodes));
    require(static_cast<int>(good_col.color.size()) == h.num_vertices() + h.num_edges(),
            "good coloring does not match Inc(H)");
    std::vector<int> chi(h.num_edges());
    for (int i = 0; i < h.num_edges(); ++i) chi[i] = good_col.color[h.num_vertices() + i];
    auto res = derand_proper_core(chi, est, Sense::Minimize);
    out.expected_flags = res.expected_before;
    out.achieved_flags = res.achieved;

    // discard the edges of violated virtual nodes from both sides
    std::vector<char> dropped(h.num_edges(), 0);
    for (int u = 0; u < est.num_flags(); ++u) {
        const auto& vn = est.vnode(u);
        long z1 = est.realized_side1(u);
        if (z1 >= vn.hi_min || z1 <= vn.lo_max) {
            ++out.violated_nodes;
            for (int e : vn.members) dropped[e] = 1;
        }
    }
    for (int i = 0; i < h.num_edges(); ++i) {
        if (dropped[i]) continue;
        if (res.assignment[i])
            out.left.push_back(h.edge(i).id);
        else
            out.right.push_back(h.edge(i).id);
    }
    out.kept_weight = a.total_of(out.left) + a.total_of(out.right);

    // hard postcondition: deg_{Lj}(v) <= (1+eps) Delta / 2, exact
    Rational bound = (1 + eps) * delta / 2;
    std::vector<long> dl(h.num_vertices(), 0), dr(h.num_vertices(), 0);
    for (EdgeId id : out.left)
        for (int v : h.edge(h.index_of(id)).vertices) ++dl[v];
    for (EdgeId id : out.right)
        for (int v : h.edge(h.index_of(id)).vertices) ++dr[v];
    for (int v = 0; v < h.num_vertices(); ++v) {
        require(Rational(dl[v]) <= bound, "left split exceeds the degree bound");
        require(Rational(dr[v]) <= bound, "right split exceeds the degree bound");
    }
    // kept weight is accounted for by the flag certificate
    require(out.kept_weight >= out.input_weight - out.achieved_flags,
            "discarded more weight than the flags certify");
    if (opt.enforce_retention)
        require(out.kept_weight >= (1 - eta) * out.input_weight,
                "retention below (1 - eta) a(E)");
    out.declared_rounds = 2 * (good_col.rounds + res.classes_processed + 2);
    return out;
}

VertexColoring restrict_good_coloring(const Hypergraph& parent, const VertexColoring& col,
                                      const Hypergraph& sub) {
    require(parent.num_vertices() == sub.num_vertices(),
            "restriction requires a shared vertex set");
    require(static_cast<int>(col.color.size()) == parent.num_vertices() + parent.num_edges(),
            "coloring does not match the parent incidence graph");
    VertexColoring out;
    out.k = col.k;
    out.target = col.target;
    out.proper = col.proper;
    out.rounds = col.rounds;
    out.color.resize(sub.num_vertices() + sub.num_edges());
    for (int v = 0; v < sub.num_vertices(); ++v) out.color[v] = col.color[v];
    for (int i = 0; i < sub.num_edges(); ++i) {
        int pidx = parent.index_of(sub.edge(i).id);
        require(pidx >= 0, "sub-hypergraph edge missing from the parent");
        out.color[sub.num_vertices() + i] = col.color[parent.num_vertices() + pidx];
    }
    return out;
}

DefectiveColoringResult defective_color(const Hypergraph& h, const EdgeWeighting& a,
                                        const Rational& delta, int k,
                                        const VertexColoring& good_col,
                                        const DefectiveColoringOptions& opt) {
    require(k >= 2, "defective_color: k must be >= 2");
    require(delta > 0 && delta < 1, "defective_color: delta must lie in (0,1)");
    DefectiveColoringResult out;
    out.input_weight = a.total(h);

    int s = 0;
    while ((2 << s) <= k) ++s;  // s = floor(log2 k)
    const Rational eps = Rational(1) / Rational(4 * s);
    const Rational eta = delta / Rational(4 * s);
    const long r = std::max(2, h.rank());
    const long dmax = std::max(1, h.max_degree());

    if (opt.enforce_precondition) {
        // Delta >= C k log2(r log2(k)/delta)
        BigFloat lhs(static_cast<long>(dmax));
        BigFloat inner = BigFloat(Rational(r)) * BigFloat::log2_of(BigFloat(static_cast<long>(k)));
        BigFloat rhs = BigFloat(opt.c_precondition) * BigFloat(static_cast<long>(k)) *
                       BigFloat::log2_of(inner / BigFloat(delta));
        if (!(lhs >= rhs))
            throw PreconditionError("defective_color: Delta below C k log2(r log2(k)/delta)");
    }

    std::vector<std::vector<EdgeId>> classes(1);
    for (const auto& e : h.edges()) classes[0].push_back(e.id);

    Rational stage_bound(dmax);
    int rounds = 0;
    for (int stage = 0; stage < s; ++stage) {
        out.stage_degree_bounds.push_back(stage_bound);
        std::vector<std::vector<EdgeId>> next;
        int stage_rounds = 0;
        int stage_deg = 0;
        for (const auto& cls : classes) {
            Hypergraph sub = subhypergraph(h, cls);
            stage_deg = std::max(stage_deg, sub.observed_max_degree());
            require(Rational(sub.observed_max_degree()) <= stage_bound,
                    "stage degree above the halving schedule");
            DegreeSplitOptions dso;
            dso.declared_delta = stage_bound;
            dso.enforce_precondition = false;  // vetted once via the C-form above
            dso.enforce_retention = false;     // retention asserted on the final union
            dso.alpha_override = opt.alpha_override;
            auto sub_col = restrict_good_coloring(h, good_col, sub);
            auto sp = degree_split(sub, a, eps, eta, sub_col, dso);
            stage_rounds = std::max(stage_rounds, sp.declared_rounds);
            next.push_back(std::move(sp.left));
            next.push_back(std::move(sp.right));
        }
        out.stage_max_degrees.push_back(stage_deg);
        rounds += stage_rounds;
        classes = std::move(next);
        stage_bound = stage_bound * (1 + eps) / 2;
    }

    out.coloring.k = k;
    Rational kept(0);
    for (size_t j = 0; j < classes.size(); ++j) {
        for (EdgeId id : classes[j]) {
            out.coloring.domain.push_back(id);
            out.coloring.chi[id] = static_cast<int>(j) + 1;
            kept += a.at(id);
        }
    }
    std::sort(out.coloring.domain.begin(), out.coloring.domain.end());
    out.kept_weight = kept;
    out.coloring.defectiveness = measure_defectiveness(h, out.coloring);
    out.declared_rounds = rounds + 2 * good_col.rounds;

    if (opt.enforce_postconditions) {
        require(kept >= (1 - delta) * out.input_weight, "retention below (1 - delta) a(E)");
        require(Rational(out.coloring.defectiveness) <= Rational(4 * dmax) / Rational(k),
                "defectiveness above 4 Delta / k");
    }
    return out;
}

VertexColoring replicate_coloring(const Hypergraph& parent, const VertexColoring& col,
                                  const ReplicateResult& rep) {
    require(static_cast<int>(col.color.size()) == parent.num_vertices() + parent.num_edges(),
            "coloring does not match the parent incidence graph");
    const int n = parent.num_vertices();
    VertexColoring out;
    out.target = "inc2-replicate";
    out.proper = col.proper;
    out.rounds = col.rounds + 1;
    out.color.resize(n + rep.h.num_edges());
    for (int v = 0; v < n; ++v) out.color[v] = col.color[v];
    // copy index within its parent, in edge order
    long q = 1;
    {
        std::unordered_map<EdgeId, long> seen;
        for (int i = 0; i < rep.h.num_edges(); ++i) q = std::max(q, ++seen[rep.parent_of[i]]);
    }
    std::unordered_map<EdgeId, long> counter;
    int kmax = col.k;
    for (int i = 0; i < rep.h.num_edges(); ++i) {
        int pidx = parent.index_of(rep.parent_of[i]);
        require(pidx >= 0, "replicate parent missing");
        long j = counter[rep.parent_of[i]]++;
        int c = static_cast<int>(col.k + (col.color[n + pidx] - 1) * q + j + 1);
        out.color[n + i] = c;
        kmax = std::max(kmax, c);
    }
    out.k = kmax;
    return out;
}

std::string format_coloring(const VertexColoring& c) {
    std::ostringstream os;
    for (size_t v = 0; v < c.color.size(); ++v) os << "C " << v << " " << c.color[v] << "\n";
    return os.str();
}

}  // namespace hypermatch
