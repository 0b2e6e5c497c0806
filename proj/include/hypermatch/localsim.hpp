#ifndef HYPERMATCH_LOCALSIM_HPP
#define HYPERMATCH_LOCALSIM_HPP

#include <cstdint>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "hypermatch/errors.hpp"
#include "hypermatch/graph.hpp"
#include "hypermatch/prng.hpp"

namespace hypermatch {

// Synchronous message-passing execution. A program supplies:
//
//   struct Prog {
//     using State = ...;   // copyable; must support operator<< for snapshots
//     using Output = ...;  // equality-comparable
//     State init(const NodeInit&) const;
//     State step(const StepCtx&, const State& own,
//                std::span<const State> neighbor_states) const;
//     Output output(const State&) const;
//   };
//
// step() must be a pure function of its arguments; neighbor states are the
// previous round's, in adjacency-list order. Per-node randomness comes from
// ctx.rand, derived from (seed, unique id, round) only.

struct NodeInit {
    int node = 0;
    uint64_t unique_id = 0;
    uint64_t rand = 0;
    int degree = 0;
};

struct StepCtx {
    int node = 0;
    int round = 0;  // 1-based
    uint64_t rand = 0;
};

struct RoundTrace {
    int rounds = 0;
    std::vector<std::string> snapshots;
};

inline uint64_t node_rand(uint64_t seed, uint64_t unique_id, int round) {
    return mix_seed(seed, unique_id, static_cast<uint64_t>(round));
}

template <typename Prog>
struct RunResult {
    std::vector<typename Prog::Output> outputs;
    RoundTrace trace;
};

template <typename Prog>
RunResult<Prog> run_local(const Graph& g, const Prog& prog, int rounds, uint64_t seed,
                          int snapshot_every = 0) {
    require(rounds >= 0, "rounds must be >= 0");
    const int n = g.num_nodes();
    std::vector<typename Prog::State> cur, next;
    cur.reserve(n);
    for (int v = 0; v < n; ++v) {
        uint64_t uid = static_cast<uint64_t>(v);
        cur.push_back(prog.init(NodeInit{v, uid, node_rand(seed, uid, 0), g.degree(v)}));
    }
    RunResult<Prog> result;
    auto snapshot = [&](int round) {
        std::ostringstream os;
        os << "round " << round;
        for (int v = 0; v < n; ++v) os << "\n" << v << " " << cur[v];
        result.trace.snapshots.push_back(os.str());
    };
    if (snapshot_every > 0) snapshot(0);
    std::vector<typename Prog::State> neigh;
    for (int round = 1; round <= rounds; ++round) {
        next.clear();
        next.reserve(n);
        for (int v = 0; v < n; ++v) {
            neigh.clear();
            for (int w : g.neighbors(v)) neigh.push_back(cur[w]);
            uint64_t uid = static_cast<uint64_t>(v);
            next.push_back(prog.step(StepCtx{v, round, node_rand(seed, uid, round)}, cur[v],
                                     std::span<const typename Prog::State>(neigh)));
        }
        cur.swap(next);
        ++result.trace.rounds;
        if (snapshot_every > 0 && round % snapshot_every == 0) snapshot(round);
    }
    result.outputs.reserve(n);
    for (int v = 0; v < n; ++v) result.outputs.push_back(prog.output(cur[v]));
    return result;
}

// Checks the defining property of a T-round algorithm: a perturbation
// touching only nodes at distance > T from `node` cannot change its output.
// The perturbed graph must keep the same node numbering.
template <typename Prog>
bool locality_audit(const Graph& g, const Prog& prog, const Graph& perturbed,
                    const Prog& perturbed_prog, const std::vector<int>& touched, int rounds,
                    int node, uint64_t seed) {
    auto dist = g.bfs_distances(node);
    for (int t : touched) {
        if (t < 0 || t >= g.num_nodes())
            throw InvalidPerturbationError("touched node out of range");
        if (dist[t] >= 0 && dist[t] <= rounds)
            throw InvalidPerturbationError("perturbation inside radius " +
                                           std::to_string(rounds));
    }
    auto a = run_local(g, prog, rounds, seed);
    auto b = run_local(perturbed, perturbed_prog, rounds, seed);
    return a.outputs[node] == b.outputs[node];
}

// Iterated base-2 logarithm; log_star(x) = 0 for x <= 1.
int log_star(double x);

}  // namespace hypermatch

#endif
