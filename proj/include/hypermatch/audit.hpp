#ifndef HYPERMATCH_AUDIT_HPP
#define HYPERMATCH_AUDIT_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hypermatch/hypergraph.hpp"

namespace hypermatch {

// Locality hooks: each registered algorithm runs centrally but declares the
// radius (in Inc(H) hops) its per-entity outputs depend on, so a perturbation
// outside that radius must leave the entity's output unchanged.

struct AlgorithmRun {
    std::map<std::string, std::string> outputs;  // "v:<id>" or "e:<id>" -> value
    int declared_rounds = 0;
};

struct AuditParams {
    Rational eps{1, 2};
    Rational eta{1, 2};
    long alpha_override = 0;  // degree_split only; 0 keeps the formula value
};

// name: good_coloring | degree_split | simple_matching
AlgorithmRun run_locality_hook(const std::string& name, const Hypergraph& h,
                               const EdgeWeighting& a, const AuditParams& params);

struct Perturbation {
    enum class Kind { DeleteEdge, Reweight } kind = Kind::DeleteEdge;
    EdgeId target = 0;
};

// Nodes of Inc(H) the perturbation touches: the edge node plus its vertices.
std::vector<int> touched_nodes(const Hypergraph& h, const Perturbation& p);

// Verifies the radius precondition (InvalidPerturbationError otherwise), runs
// the hook on both instances, and compares the entity's output.
bool audit_algorithm(const std::string& name, const Hypergraph& h, const EdgeWeighting& a,
                     const AuditParams& params, const std::string& entity,
                     const Perturbation& p);

struct AuditSample {
    std::string algorithm;
    std::string entity;
    int declared_rounds = 0;
    int distance = 0;
    bool passed = false;
};

// Samples (instance, entity, perturbation) triples with the perturbation
// outside the declared radius and audits each; instances come from the
// generators keyed on the algorithm's feasible regime.
std::vector<AuditSample> run_locality_suite(const std::string& algorithm, int samples,
                                            uint64_t seed);

}  // namespace hypermatch

#endif
