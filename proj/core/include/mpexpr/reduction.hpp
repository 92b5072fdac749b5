#pragma once

#include <array>
#include <optional>
#include <vector>

#include "mpexpr/expr.hpp"
#include "mpexpr/graph.hpp"
#include "mpexpr/twoplayer.hpp"

namespace mpexpr {

/// Final-stage bilinear constraint system: rational rows sum_i alpha_i q_i <= 0
/// and sum_i alpha_i p_i <= 0, plus product couplings q_i p_j = q_k p_l, all
/// solved over strictly positive rationals.
struct ConstraintSystem5 {
    int n = 0;
    std::vector<std::vector<Rat>> q_rows;            // dense, length n
    std::vector<std::vector<Rat>> p_rows;            // dense, length n
    std::vector<std::array<int, 4>> bilinear;        // 1-based (i, j, k, l)

    static ConstraintSystem5 from_json_text(const std::string& text);
    std::string to_json_text() const;
    void validate() const;

    bool satisfied_by(const std::vector<Rat>& q, const std::vector<Rat>& p) const;
};

/// Single polynomial equation q0 * P(q1/q0, ..., qn/q0) = 0 with side
/// conditions 1 <= q0 <= qi; monomials are given over q1..qn.
struct PolynomialSystem {
    int n = 0;
    struct Monomial {
        Rat coeff;
        std::vector<int> exponents;  // length n, nonnegative
    };
    std::vector<Monomial> monomials;
};

/// One optional linear equation plus product couplings q_i q_j = q_k q_l over
/// variables q_0..q_n, solved with 1 <= q_0 <= q_i. Indices are 0-based into
/// the variable vector (index 0 is q_0).
struct ProductSystem {
    int num_vars = 0;  // total variable count including q_0
    std::optional<std::vector<Rat>> linear;
    std::vector<std::array<int, 4>> products;
};

/// Equation-form system over equally sized Q and P: linear q-equations,
/// couplings q_i p_j = q_k p_l, and half-sum pins; solved with q_1 <= q_i,
/// q_i, p_i >= 1 and sum(P) = sum(Q). Indices are 1-based.
struct EquationSystem {
    int n = 0;
    std::vector<std::vector<Rat>> q_equations;  // dense rows, sum = 0
    std::vector<std::array<int, 4>> bilinear;
    std::vector<int> q_half_sums;  // q_i = (1/2) * sum of all q
    std::vector<int> p_half_sums;
};

/// Monomial decomposition: every power chain becomes a fresh variable pinned
/// by x * q0 = y * z equations; the polynomial collapses to one linear row.
ProductSystem reduce_polynomial(const PolynomialSystem& system);

/// Rewrites q-q products as q-p couplings through a shared half-sum pair.
EquationSystem reduce_products(const ProductSystem& system);

/// Splits equations into inequality pairs and drops the normalization side
/// conditions, which scaling recovers.
ConstraintSystem5 reduce_equations(const EquationSystem& system);

ConstraintSystem5 reduce_chain(const PolynomialSystem& system);

struct ReductionGame {
    GameGraph graph;
    Expression objective;
    Rat threshold;  // always 0
    int t1 = 0;     // padded row count per side
    // edge ids for readback
    std::vector<int> a2_loop_edges;  // per variable index
    std::vector<int> b2_loop_edges;
};

/// Five-vertex hardness witness game: player 1 wins at s0 with threshold 0
/// iff the constraint system has a strictly positive rational solution.
ReductionGame constraints_to_game(const ConstraintSystem5& system);

/// Reads a positive assignment back from a threshold witness: the mixture
/// weights on the a2 self-loops give Q, the b2 self-loops give P.
struct ReductionAssignment {
    std::vector<Rat> q;
    std::vector<Rat> p;
};
std::optional<ReductionAssignment> read_back_assignment(const ReductionGame& game,
                                                        const TupleWitness& witness);

struct VectorLemmaReport {
    bool ratios_equal = false;
    bool condition_holds = false;  // MAX(MIN(x1,x2),MIN(x3,x4)) <= 0 on all samples
    std::optional<std::pair<Rat, Rat>> violator;  // (m, n) when ratios differ
    long samples_checked = 0;
};

/// Checks the equivalence between the ratio equality b1/a1 = b2/a2 and the
/// nonpositivity of the paired-minimum form over nonnegative combinations.
/// When the ratios differ the violator is constructed analytically and
/// verified by direct evaluation.
VectorLemmaReport vector_lemma_check(const Rat& a1, const Rat& a2, const Rat& b1, const Rat& b2,
                                     long samples, unsigned long seed);

}  // namespace mpexpr
