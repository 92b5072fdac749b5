#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mpexpr/expr.hpp"
#include "mpexpr/graph.hpp"
#include "mpexpr/oneplayer.hpp"
#include "mpexpr/realizability.hpp"

namespace mpexpr {

struct Budget {
    long long bnb_nodes = 200000;
    long long enum_steps = 500000;

    /// Reads MPEXPR_BNB_NODES / MPEXPR_ENUM_STEPS when set.
    static Budget from_env();
};

struct AnalysisOptions {
    Rat eps = Rat(1, 100);
    Budget budget;
    bool both_finite = false;  // rewrite every atom to lim-inf before solving
    int jobs = 1;
};

/// Normalizes an expression for analysis, applying the both-players-finite
/// rewrite first when requested.
NormalFormExpression prepare_expression(const Expression& expr, int k, bool both_finite);

/// ---- certificates -------------------------------------------------------

/// One row choice per term plus convex weights over the terms; the combined
/// linear form dominates the bound at every simplex corner.
struct SelectionBound {
    std::vector<int> rows;
    Vec term_weights;
};

struct ExactMinCertificate {
    std::vector<SelectionBound> selections;
};

/// Bisection tree over a product of sub-simplices. Children replace vertex
/// `va` (resp. `vb`) of the split component by the midpoint of (va, vb);
/// leaf bounds are re-derived by evaluation, so only the shape is stored.
struct BnbNodeRec {
    bool leaf = true;
    int component = -1;
    int va = -1, vb = -1;
    int child_a = -1, child_b = -1;
};

struct BnbCertificate {
    std::vector<BnbNodeRec> nodes;  // nodes[0] is the root
};

struct TupleCertificate {
    Rat bound;
    std::variant<ExactMinCertificate, BnbCertificate> data;
};

struct ProcessedTuple {
    std::vector<int> choice;  // per family: index into its bases list
    TupleCertificate cert;
};

/// Certifies inf over every Eulerian tuple and simplex mixing >= lo. Tuples
/// not listed explicitly are covered by a per-basis floor that already
/// clears lo.
struct LowerBoundCertificate {
    Rat lo;
    std::vector<std::vector<Rat>> basis_floor;  // [family][maximal basis]
    std::vector<std::vector<TupleCertificate>> basis_floor_cert;
    std::vector<ProcessedTuple> tuples;
};

/// ---- analysis results ---------------------------------------------------

struct TupleWitness {
    std::vector<RealizabilityWitness::PerStrategy> parts;  // one per family
    std::vector<Vec> points() const;
};

struct ValueInterval {
    Rat lo;
    Rat hi;
    std::optional<TupleWitness> witness;  // evaluates to exactly hi
    LowerBoundCertificate lb_cert;
    std::string method;
};

class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded(const std::string& what, ValueInterval best)
        : std::runtime_error(what), best_so_far(std::move(best)) {}
    ValueInterval best_so_far;
};

enum class VerdictKind { Yes, No, Unknown };

struct Verdict {
    VerdictKind kind = VerdictKind::Unknown;
    ValueInterval interval;
    std::optional<TupleWitness> witness;  // present on Yes
};

/// ---- the per-strategy Eulerian structure --------------------------------

struct TupleFamily {
    MemorylessStrategy tau;  // representative player-2 memoryless strategy
    std::vector<CycleMixtureBasis> bases;
    std::vector<int> maximal;  // indices of inclusion-maximal bases
};

/// Deduplicated per-player-2-strategy Eulerian basis families, quantified
/// over in every lower bound. Deterministic order.
std::vector<TupleFamily> build_tuple_families(const GameGraph& g, long long enum_budget);

/// ---- operations ---------------------------------------------------------

/// Certified bracket around the best value player 1 can approach with finite
/// memory: hi is attained by a rational witness tuple, lo is certified over
/// all Eulerian tuples and closed simplex mixings, hi - lo <= eps.
ValueInterval inf_value(const GameGraph& g, const NormalFormExpression& nf,
                        const AnalysisOptions& opts);

/// Three-valued threshold test at nu. Yes carries an exact witness with value
/// <= nu; No certifies lo > nu; Unknown reports the bracket.
Verdict decide(const GameGraph& g, const NormalFormExpression& nf, const Rat& nu,
               const AnalysisOptions& opts);

struct WinningRegionResult {
    std::vector<VerdictKind> verdicts;                    // per vertex
    std::vector<std::optional<ValueInterval>> intervals;  // backing analysis
    std::vector<int> region_of;                           // Yes region index or -1
    std::vector<std::optional<MooreStrategy>> strategies;  // per Yes vertex
};

WinningRegionResult winning_region(const GameGraph& g, const NormalFormExpression& nf,
                                   const Rat& nu, const AnalysisOptions& opts);

/// The tie-break picks the smallest vertex id by default; the flag flips it
/// (assigned intervals are independent of the choice).
std::vector<ValueInterval> value_region(const GameGraph& g, const NormalFormExpression& nf,
                                        const AnalysisOptions& opts,
                                        bool tie_break_largest_id = false);

/// Witness-driven synthesis: realizes the inf_value witness hull; the result
/// is checked to satisfy eval_strategy <= hi + eps. Enumerates memoryless
/// strategies as a fallback when the primary construction cannot be built.
MooreStrategy epsilon_optimal_strategy(const GameGraph& g, const NormalFormExpression& nf,
                                       const AnalysisOptions& opts);

/// Value of a fixed player-1 strategy: the best response of the unrestricted
/// opponent, computed as the one-player solution of the product graph.
Rat eval_strategy(const GameGraph& g, const MooreStrategy& sigma,
                  const NormalFormExpression& nf);

/// Re-derives the families and checks every numeric claim of the certificate
/// by exact arithmetic and re-evaluation. Returns false on any mismatch.
bool verify_lower_bound_certificate(const GameGraph& g, const NormalFormExpression& nf,
                                    const LowerBoundCertificate& cert);

}  // namespace mpexpr
