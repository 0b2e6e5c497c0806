#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "hypermatch/audit.hpp"
#include "hypermatch/fractional.hpp"
#include "hypermatch/graphmatch.hpp"
#include "hypermatch/localsim.hpp"
#include "hypermatch/maximal.hpp"
#include "hypermatch/oracles.hpp"
#include "hypermatch/orientation.hpp"
#include "hypermatch/rounding.hpp"

using namespace hypermatch;
using nlohmann::json;

namespace {

uint64_t fnv1a64(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

HypergraphFile load(const std::string& path) { return read_hypergraph_file(path); }

std::ostream& out_stream(std::ofstream& file, const std::string& path) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw Error("cannot open output file " + path);
    return file;
}

std::vector<long> parse_longs(const std::string& csv) {
    std::vector<long> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stol(item));
    return out;
}

RoundingParams params_from_flags(const Hypergraph& h, const std::string& profile, int w, int s,
                                 long kdefect) {
    BigInt delta(std::max(2, h.max_degree()));
    long rank = std::max(2, h.rank());
    if (profile == "scaled") return compute_params_scaled(delta, rank, w, s, kdefect);
    return compute_params(delta, rank);
}

int cmd_gen(const std::string& kind, const std::string& params, uint64_t seed,
            const std::string& out) {
    auto gi = oracles::generate(kind, parse_longs(params), seed);
    std::ofstream f;
    write_hypergraph(out_stream(f, out), gi.h, gi.a);
    return 0;
}

int cmd_oracle(const std::string& in, int cap) {
    auto [h, a] = load(in);
    auto mwm = oracles::brute_force_mwm(h, a, cap);
    auto lp = oracles::exact_fractional_opt(h, a, cap, cap);
    int tau = oracles::max_matching_size(h, cap);
    std::cout << "a_mwm " << format_rational(mwm.weight) << "\n";
    for (EdgeId id : mwm.matching.edge_ids) std::cout << "M " << id << "\n";
    std::cout << "a_star " << format_rational(lp.optimum) << "\n";
    std::cout << "tau " << tau << "\n";
    return 0;
}

int cmd_hmwm(const std::string& in, const std::string& mode, const std::string& delta,
             uint64_t seed, const std::string& profile, int w, int s, long kdefect,
             const std::string& out, const std::string& chain_csv) {
    auto [h, a] = load(in);
    auto col = good_coloring(h);
    RoundingParams p = params_from_flags(h, profile, w, s, kdefect);
    HmwmResult r = mode == "rand"
                       ? hmwm_rand(h, a, parse_rational(delta), seed,
                                   profile == "scaled" ? &p : nullptr)
                       : hmwm_det(h, a, col, profile == "scaled" ? &p : nullptr);
    std::ofstream f;
    auto& os = out_stream(f, out);
    for (EdgeId id : r.matching.edge_ids) os << "M " << id << "\n";
    std::cout << "# a_M " << format_rational(r.weight) << " a_h "
              << format_rational(r.fractional_weight) << " floor " << format_rational(r.floor)
              << " chain " << (r.used_chain ? 1 : 0) << "\n";
    if (!chain_csv.empty()) {
        // per-stage chain report from a standalone scaled reduction
        std::ofstream cf(chain_csv);
        if (!cf) throw Error("cannot open " + chain_csv);
        if (profile == "scaled" && !p.degenerate) {
            auto red = degree_reduce(h, a, col, p);
            cf << format_chain_csv(red.stages);
        } else {
            cf << format_chain_csv({});
        }
    }
    return 0;
}

int cmd_gmwm(const std::string& in, const std::string& eps, const std::string& mode,
             const std::string& delta, uint64_t seed, const std::string& out) {
    auto [h, a] = load(in);
    GmwmOptions opt;
    opt.mode = mode == "rand" ? GmwmMode::Rand : GmwmMode::Det;
    opt.delta = parse_rational(delta);
    opt.seed = seed;
    auto r = gmwm(h, a, parse_rational(eps), opt);
    std::ofstream f;
    auto& os = out_stream(f, out);
    for (EdgeId id : r.matching.edge_ids) os << "M " << id << "\n";
    std::cout << "# a_M " << format_rational(r.weight) << " stages " << r.stages
              << " early_exit " << (r.early_exit ? 1 : 0) << "\n";
    return 0;
}

int cmd_hmm(const std::string& in, const std::string& mode, const std::string& delta,
            uint64_t seed, const std::string& out) {
    auto [h, a] = load(in);
    (void)a;
    HmmOptions opt;
    opt.delta = parse_rational(delta);
    opt.seed = seed;
    HmmMode m = mode == "rand" ? HmmMode::Rand : mode == "shatter" ? HmmMode::Shatter
                                                                   : HmmMode::Det;
    auto r = hmm(h, m, opt);
    std::ofstream f;
    auto& os = out_stream(f, out);
    for (EdgeId id : r.matching.edge_ids) os << "M " << id << "\n";
    std::cout << "# edges " << r.matching.size() << " stages " << r.stages << "\n";
    return 0;
}

int cmd_orient(const std::string& in, long lambda, const std::string& eps,
               const std::string& mode, uint64_t seed, const std::string& out) {
    auto [h, a] = load(in);
    (void)a;
    OrientOptions opt;
    opt.mode = mode == "rand" ? OrientMode::Rand : OrientMode::Det;
    opt.seed = seed;
    auto r = orient(h, lambda, parse_rational(eps), opt);
    std::ofstream f;
    out_stream(f, out) << format_orientation(h, r.orientation);
    std::cout << "# stages " << r.stages << " cap " << r.cap_d << "\n";
    return 0;
}

struct MaxIdProg {
    using State = uint64_t;
    using Output = uint64_t;
    State init(const NodeInit& c) const { return c.unique_id; }
    State step(const StepCtx&, const State& own, std::span<const State> nb) const {
        State m = own;
        for (const auto& s : nb) m = std::max(m, s);
        return m;
    }
    Output output(const State& s) const { return s; }
};

struct BfsProg {
    int source = 0;
    using State = int;
    using Output = int;
    State init(const NodeInit& c) const { return c.node == source ? 0 : -1; }
    State step(const StepCtx&, const State& own, std::span<const State> nb) const {
        if (own >= 0) return own;
        int best = -1;
        for (int s : nb)
            if (s >= 0) best = best < 0 ? s + 1 : std::min(best, s + 1);
        return best;
    }
    Output output(const State& s) const { return s; }
};

int cmd_run(const std::string& demo, int n, int rounds, uint64_t seed, int snapshot_every) {
    auto gi = oracles::gen_ring(n);
    Graph g(n);
    for (const auto& e : gi.h.edges()) g.add_edge(e.vertices[0], e.vertices[1]);
    g.finalize();
    RoundTrace trace;
    std::ostringstream lines;
    if (demo == "bfs") {
        auto r = run_local(g, BfsProg{0}, rounds, seed, snapshot_every);
        trace = r.trace;
        for (int v = 0; v < n; ++v) lines << v << " " << r.outputs[v] << "\n";
    } else {
        auto r = run_local(g, MaxIdProg{}, rounds, seed, snapshot_every);
        trace = r.trace;
        for (int v = 0; v < n; ++v) lines << v << " " << r.outputs[v] << "\n";
    }
    std::cout << "rounds " << trace.rounds << "\n" << lines.str();
    for (const auto& snap : trace.snapshots) std::cout << snap << "\n";
    return 0;
}

int cmd_audit(const std::string& algo, int samples, uint64_t seed) {
    std::vector<std::string> algos;
    if (algo == "all")
        algos = {"good_coloring", "degree_split", "simple_matching"};
    else
        algos = {algo};
    int failed = 0;
    for (const auto& name : algos) {
        auto res = run_locality_suite(name, samples, seed);
        for (const auto& s : res) {
            std::cout << name << " entity " << s.entity << " radius " << s.declared_rounds
                      << " perturb_at " << s.distance << " " << (s.passed ? "ok" : "CHANGED")
                      << "\n";
            if (!s.passed) ++failed;
        }
    }
    std::cout << "# failures " << failed << "\n";
    return failed == 0 ? 0 : 1;
}

int cmd_suite(const std::string& spec_path, const std::string& out_path) {
    std::ifstream in(spec_path);
    if (!in) throw Error("cannot open spec " + spec_path);
    json spec = json::parse(in);

    std::ofstream f;
    auto& os = out_stream(f, out_path);
    os << "instance,hash,algorithm,seed,n,m,r,delta,aM,aMstar,astar,tau,ratio_frac\n";

    const std::string algorithm = spec.value("algorithm", "hmwm_det");
    const bool want_oracles = spec.value("oracles", true);
    const Rational eps = parse_rational(spec.value("epsilon", "1/4"));
    const Rational delta = parse_rational(spec.value("delta", "1/5"));
    std::vector<uint64_t> seeds{0};
    if (spec.contains("seeds")) {
        seeds.clear();
        for (const auto& s : spec["seeds"]) seeds.push_back(s.get<uint64_t>());
    }

    std::vector<double> ratios;
    int idx = 0;
    for (const auto& inst : spec["instances"]) {
        std::vector<long> params;
        for (const auto& p : inst["params"]) params.push_back(p.get<long>());
        auto gi = oracles::generate(inst["kind"].get<std::string>(), params,
                                    inst.value("seed", 0ULL));
        std::ostringstream ser;
        write_hypergraph(ser, gi.h, gi.a);
        uint64_t hash = fnv1a64(ser.str());

        Rational a_mstar(0), a_star(0);
        int tau = -1;
        if (want_oracles && gi.h.num_edges() <= 30) {
            a_mstar = oracles::brute_force_mwm(gi.h, gi.a).weight;
            a_star = oracles::exact_fractional_opt(gi.h, gi.a).optimum;
            tau = oracles::max_matching_size(gi.h);
        }

        for (uint64_t seed : seeds) {
            Matching m;
            if (algorithm == "hmwm_det") {
                auto col = good_coloring(gi.h);
                m = hmwm_det(gi.h, gi.a, col).matching;
            } else if (algorithm == "hmwm_rand") {
                m = hmwm_rand(gi.h, gi.a, delta, seed).matching;
            } else if (algorithm == "gmwm") {
                GmwmOptions opt;
                opt.seed = seed;
                m = gmwm(gi.h, gi.a, eps, opt).matching;
            } else if (algorithm == "hmm") {
                HmmOptions opt;
                opt.seed = seed;
                m = hmm(gi.h, HmmMode::Det, opt).matching;
            } else {
                throw Error("unknown suite algorithm " + algorithm);
            }
            Rational aM(0);
            for (EdgeId id : m.edge_ids) aM += gi.a.at(id);
            os << idx << "," << hash << "," << algorithm << "," << seed << ","
               << gi.h.num_vertices() << "," << gi.h.num_edges() << "," << gi.h.rank() << ","
               << gi.h.max_degree() << "," << format_rational(aM) << ","
               << format_rational(a_mstar) << "," << format_rational(a_star) << "," << tau
               << ",";
            if (aM > 0 && a_star > 0) {
                Rational ratio = a_star / aM;
                os << format_rational(ratio);
                ratios.push_back(ratio.get_d());
            }
            os << "\n";
        }
        ++idx;
    }
    if (!ratios.empty()) {
        std::sort(ratios.begin(), ratios.end());
        os << "# min_ratio_frac " << ratios.front() << " median_ratio_frac "
           << ratios[ratios.size() / 2] << " max_ratio_frac " << ratios.back() << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"distributed matching laboratory"};
    app.require_subcommand(1);
    int log_base = 2;
    app.add_option("--log-base", log_base, "log base for parameter formulas (fixed)")
        ->check(CLI::IsMember({2}));

    std::string kind = "random", params = "12,3,4,20", in, out, chain_csv, spec;
    std::string mode = "det", eps = "1/4", delta = "1/5", profile = "paper", algo = "all";
    std::string demo = "bfs";
    uint64_t seed = 0;
    int cap = 30, w = 3, s = 2, n = 16, rounds = 8, snapshot = 0, samples = 17;
    long kdefect = 8, lambda = 2;

    auto* g = app.add_subcommand("gen", "generate an instance");
    g->add_option("--kind", kind, "ring|random|forests|dense");
    g->add_option("--params", params, "comma-separated generator parameters");
    g->add_option("--seed", seed);
    g->add_option("--out", out);

    auto* o = app.add_subcommand("oracle", "exact reference values");
    o->add_option("--in", in)->required();
    o->add_option("--cap", cap);

    auto* hw = app.add_subcommand("hmwm", "hypergraph maximum-weight matching");
    hw->add_option("--in", in)->required();
    hw->add_option("--mode", mode, "det|rand");
    hw->add_option("--delta", delta);
    hw->add_option("--seed", seed);
    hw->add_option("--profile", profile, "paper|scaled");
    hw->add_option("--w", w);
    hw->add_option("--s", s);
    hw->add_option("--kdefect", kdefect);
    hw->add_option("--out", out);
    hw->add_option("--chain-csv", chain_csv);

    auto* gm = app.add_subcommand("gmwm", "graph (1+eps) matching");
    gm->add_option("--in", in)->required();
    gm->add_option("--epsilon", eps);
    gm->add_option("--mode", mode);
    gm->add_option("--delta", delta);
    gm->add_option("--seed", seed);
    gm->add_option("--out", out);

    auto* hm = app.add_subcommand("hmm", "hypergraph maximal matching");
    hm->add_option("--in", in)->required();
    hm->add_option("--mode", mode, "det|rand|shatter");
    hm->add_option("--delta", delta);
    hm->add_option("--seed", seed);
    hm->add_option("--out", out);

    auto* on = app.add_subcommand("orient", "bounded out-degree orientation");
    on->add_option("--in", in)->required();
    on->add_option("--lambda", lambda)->required();
    on->add_option("--epsilon", eps);
    on->add_option("--mode", mode);
    on->add_option("--seed", seed);
    on->add_option("--out", out);

    auto* rn = app.add_subcommand("run", "synchronous simulator demo");
    rn->add_option("--demo", demo, "bfs|maxid");
    rn->add_option("--n", n);
    rn->add_option("--rounds", rounds);
    rn->add_option("--seed", seed);
    rn->add_option("--snapshot-every", snapshot);

    auto* au = app.add_subcommand("audit", "locality audits");
    au->add_option("--algo", algo, "good_coloring|degree_split|simple_matching|all");
    au->add_option("--samples", samples);
    au->add_option("--seed", seed);

    auto* su = app.add_subcommand("suite", "experiment suite from a JSON spec");
    su->add_option("--spec", spec)->required();
    su->add_option("--out", out);

    CLI11_PARSE(app, argc, argv);
    try {
        if (g->parsed()) return cmd_gen(kind, params, seed, out);
        if (o->parsed()) return cmd_oracle(in, cap);
        if (hw->parsed())
            return cmd_hmwm(in, mode, delta, seed, profile, w, s, kdefect, out, chain_csv);
        if (gm->parsed()) return cmd_gmwm(in, eps, mode, delta, seed, out);
        if (hm->parsed()) return cmd_hmm(in, mode, delta, seed, out);
        if (on->parsed()) return cmd_orient(in, lambda, eps, mode, seed, out);
        if (rn->parsed()) return cmd_run(demo, n, rounds, seed, snapshot);
        if (au->parsed()) return cmd_audit(algo, samples, seed);
        if (su->parsed()) return cmd_suite(spec, out);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
    return 0;
}
