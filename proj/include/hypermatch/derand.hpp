#ifndef HYPERMATCH_DERAND_HPP
#define HYPERMATCH_DERAND_HPP

#include <memory>
#include <vector>

#include "hypermatch/coloring.hpp"
#include "hypermatch/graph.hpp"
#include "hypermatch/hypergraph.hpp"
#include "hypermatch/prng.hpp"

namespace hypermatch {

enum class Sense { Minimize, Maximize };

// Finite per-node value distribution with rational probabilities.
struct ValueSpace {
    std::vector<std::pair<int, Rational>> support;  // (value, prob), values ascending

    static const ValueSpace& fair_bit();
    static ValueSpace bernoulli(const Rational& p_one);
    bool has_randomness() const { return support.size() > 1; }
    void validate() const;  // probabilities sum to 1
};

// Flags F_u with an exact conditional-expectation oracle. Nodes holding
// randomness are the estimator's nodes; each flag depends only on the values
// of the nodes listed as its writers.
class BlackBoxEstimator {
  public:
    virtual ~BlackBoxEstimator() = default;

    virtual int num_nodes() const = 0;
    virtual int num_flags() const = 0;
    virtual const ValueSpace& value_space(int node) const = 0;
    virtual const std::vector<int>& flags_affected_by(int node) const = 0;
    virtual const std::vector<int>& writers_of(int flag) const = 0;

    // E[F_flag | committed values, R_node = value]; node -1 means no override.
    virtual Rational flag_expectation(int flag, int node, int value) = 0;
    virtual void commit(int node, int value) = 0;

    // sum over flags of E[F | committed]
    virtual Rational total_expectation() = 0;
};

struct DerandResult {
    std::vector<int> assignment;
    Rational expected_before;  // E[sum F] at the start
    Rational achieved;         // sum F at the final assignment
    int classes_processed = 0;
};

// Conditional expectations over the classes of `coloring`; requires that
// same-colored random nodes never share a flag (which a proper coloring of
// the square of the communication graph guarantees). Throws NotProperError.
DerandResult derand_proper_core(const std::vector<int>& coloring, BlackBoxEstimator& est,
                                Sense sense);

// Spec-facing form: validates that `coloring` is proper on g^2 first.
DerandResult derand_proper(const Graph& g, const std::vector<int>& coloring,
                           BlackBoxEstimator& est, Sense sense);

struct SimpleMatchingResult {
    Matching matching;
    std::vector<EdgeId> selected;  // the derandomized set L
    Rational expected_flags;       // >= 0.09 a(E)/(r Delta), exact
    Rational achieved_flags;
    int declared_rounds = 0;
};

// Matching of weight >= 0.09 a(E) / (r Delta): each edge joins L with
// probability 0.1/(r Delta), derandomized, then intersecting pairs drop out.
SimpleMatchingResult simple_matching(const Hypergraph& h, const EdgeWeighting& a,
                                     const VertexColoring& good_col);

// --- multilinear derandomization ------------------------------------------

// Potential over binary per-node values, multilinear with respect to a
// (not necessarily proper) coloring: same-colored nodes have identically
// zero second derivatives (A1), and derivatives are locally computable (A2).
class MultilinearEstimator {
  public:
    virtual ~MultilinearEstimator() = default;

    virtual int num_nodes() const = 0;
    virtual const ValueSpace& value_space(int node) const = 0;

    // sign of E[D_{node,u,u'} Phi | committed], in the estimator's arithmetic
    virtual int derivative_sign(int node, int u, int uprime) const = 0;
    virtual void commit(int node, int value) = 0;

    // Phi = sum_i coeff_i * part_i with positive coefficients; each part is
    // exactly evaluable. Used by the (A1)/(A2) audits and enumeration tests.
    virtual std::vector<Rational> phi_parts(const std::vector<int>& assignment) const = 0;

    // nodes whose values D_{node} Phi may read (N[node])
    virtual std::vector<int> derivative_support(int node) const = 0;
};

struct MultilinearAudit {
    int same_color_pairs = 100;  // sampled pairs for the A1 check
    int points_per_pair = 20;
    int a2_nodes = 20;
    uint64_t seed = 1;
};

// One simultaneous commit per color class: each node picks the value u with
// E[D_{v,u,u'} Phi] <= 0 for all u' (>= 0 when maximizing), ties to the least
// value; decisions within a class are taken against the pre-class state.
std::vector<int> derand_multilinear(const std::vector<int>& chi, MultilinearEstimator& est,
                                    Sense sense);

// Throw A1/A2 violation errors on failed samples.
void audit_multilinear_a1(const std::vector<int>& chi, const MultilinearEstimator& est,
                          const MultilinearAudit& cfg);
void audit_multilinear_a2(const MultilinearEstimator& est, const MultilinearAudit& cfg);

// --- degree-splitting estimator over a balanced edge coloring --------------

struct ToySplitResult {
    std::vector<EdgeId> selected;  // L
    Rational phi_expected;         // E[Phi'] in closed form
    Rational phi_achieved;         // Phi'(L)
    Rational beta;                 // 1/C(t,w)
    int bad_vertices = 0;          // deg_L(v) >= t or deg_{E-L}(v) >= t
};

// Splits E by derandomizing the distinct-color family counter
// Phi' = beta * sum_v |U_v cap 2^L| + |U_v cap 2^{E-L}|, where U_v collects
// w-subsets of N(v) with pairwise-distinct colors.
ToySplitResult toy_degree_split(const Hypergraph& h, long threshold, int w,
                                const EdgeColoring& chi);

}  // namespace hypermatch

#endif
