#pragma once

#include <optional>
#include <vector>

#include "mpexpr/expr.hpp"
#include "mpexpr/graph.hpp"
#include "mpexpr/linprog.hpp"

namespace mpexpr {

/// Feasibility system for one max-free term at a fixed threshold. Variables
/// are one mixing vector per lim-sup atom dimension (a single shared vector
/// when the term has none) followed by one free atom-value variable per atom
/// dimension. Rows: each mixing sums to one and is nonnegative, mixtures
/// dominate the atom values on the guarded dimensions, and every min-of-sums
/// row clears the threshold.
struct MaxFreeConstraintSystem {
    LinearProgram lp;
    int num_points = 0;
    int mixing_vectors = 0;
    std::vector<int> limsup_dims;  // one mixing vector per entry when nonempty
    std::vector<int> liminf_dims;
    std::vector<int> r_dims;  // atom dims in r-variable order
    Rat threshold;

    int x_var(int mixing, int point) const { return mixing * num_points + point; }
    int r_var(int idx) const { return mixing_vectors * num_points + idx; }
};

MaxFreeConstraintSystem build_constraints(const MaxFreeTerm& term, const std::vector<Vec>& points,
                                          const Rat& nu);

struct FeasibleOutcome {
    bool feasible = false;
    Vec solution;  // LP variable assignment when feasible
    /// On infeasibility: a weak-row system equivalent to the constraints and
    /// verified transposition multipliers for it.
    MixedSystem system;
    MotzkinCertificate certificate;
};

FeasibleOutcome feasible(const MaxFreeConstraintSystem& sys);

/// Optimal threshold for one term over a point set, with the witness mixing.
struct TermValue {
    Rat value;
    std::vector<Vec> mixings;            // one simplex vector per mixing vector
    std::vector<std::pair<int, Rat>> r;  // (dim, value)
    Vec duals;                           // optimality certificate for the term LP
};

/// Point coordinates are in the extended dimension space of the term.
TermValue value_of_term(const MaxFreeTerm& term, const std::vector<Vec>& points);

struct PointSetValue {
    Rat value;
    int best_term = 0;
    TermValue best;
};

/// The one-player solution on an abstract point set: max over the normal
/// form's terms of the term LP optimum. Points are given in the original
/// weight space and lifted through the dimension map.
PointSetValue value_of_point_set_detailed(const std::vector<Vec>& points,
                                          const NormalFormExpression& nf);
Rat value_of_point_set(const std::vector<Vec>& points, const NormalFormExpression& nf);

struct OnePlayerValue {
    Rat value;
    std::vector<int> scc;     // vertices of the component attaining the value
    std::vector<Vec> points;  // its cycle averages (original space)
    PointSetValue detail;
};

/// Exact value of a one-player game for the maximizing player: the best
/// value_of_point_set over the cycle averages of the reachable SCCs.
/// When `maximizer` is unset it is deduced as the only player with a choice.
OnePlayerValue solve(const GameGraph& g, const NormalFormExpression& nf,
                     std::optional<Player> maximizer = std::nullopt);

}  // namespace mpexpr
