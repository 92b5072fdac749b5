#pragma once

#include <optional>
#include <vector>

#include "mpexpr/geometry.hpp"
#include "mpexpr/graph.hpp"

namespace mpexpr {

/// One witness per player-2 memoryless strategy: a mixture basis of the
/// resolved graph (cycles in parent edge ids), an interior mixing whose point
/// lands in the target hull, and the hull coefficients placing it there.
struct RealizabilityWitness {
    struct PerStrategy {
        MemorylessStrategy tau;
        CycleMixtureBasis basis;
        Vec mixing;  // strictly positive, sums to one
        Vec point;
        Vec hull_coefficients;
    };
    std::vector<PerStrategy> strategies;
};

struct RealizabilityResult {
    bool realizable = false;
    RealizabilityWitness witness;
    MemorylessStrategy blocking_tau;  // no basis mixture lands in the hull
};

/// Decides whether some finite-memory player-1 strategy confines every cycle
/// average of the resulting play graph to the hull of `v`.
RealizabilityResult is_realizable(const GameGraph& g, const Polytope& v);

/// Mode-switching combination of two strategies around a shared player-2
/// choice: sigma2 (built without e2) plays first; traversing e2 hands control
/// to sigma1 (built without e1), traversing e1 hands it back. The inactive
/// strategy's memory is frozen.
MooreStrategy compose_strategies(const GameGraph& g, const MooreStrategy& sigma1,
                                 const MooreStrategy& sigma2, int e1, int e2);

/// Builds a strategy realizing the hull of `v`, by induction over player-2
/// choices with pumped-lasso strategies at the leaves. The result is verified:
/// the hull of the product's cycle averages must sit inside hull(v) exactly.
MooreStrategy realizing_strategy(const GameGraph& g, const Polytope& v);
MooreStrategy realizing_strategy(const GameGraph& g, const Polytope& v,
                                 const RealizabilityWitness& witness);

/// Pure position-counter strategy that walks prefix + (pumping walk)^omega.
/// Exposed for the one-player case and for tests.
MooreStrategy lasso_strategy(const GameGraph& g, const std::vector<bool>& alive_edges,
                             const CycleMixtureBasis& basis, const Vec& mixing);

}  // namespace mpexpr
