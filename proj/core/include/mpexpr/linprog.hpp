#pragma once

#include <optional>
#include <vector>

#include "mpexpr/rational.hpp"

namespace mpexpr {

enum class Rel { Le, Ge, Eq };

struct LinRow {
    Vec coeffs;
    Rel rel = Rel::Le;
    Rat rhs = 0;
};

/// A linear program over exact rationals. The objective is always maximized;
/// variables are nonnegative unless flagged free.
struct LinearProgram {
    int num_vars = 0;
    std::vector<LinRow> rows;
    std::vector<bool> free_var;
    Vec objective;

    explicit LinearProgram(int vars = 0)
        : num_vars(vars), free_var(vars, false), objective(vars, Rat(0)) {}

    void add_row(Vec coeffs, Rel rel, Rat rhs);
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

/// Row multipliers proving Ax {<=,>=,=} b, x >= 0 (or free) has no solution.
/// Sign convention: y_i >= 0 on Le rows, y_i <= 0 on Ge rows, free on Eq rows.
/// Then g = sum_i y_i a_i satisfies g_j >= 0 on nonnegative columns and
/// g_j = 0 on free columns, while sum_i y_i b_i < 0.
struct FarkasCertificate {
    Vec row_multipliers;
};

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Vec solution;
    Rat objective_value;
    /// Row duals at the optimum, same sign convention as FarkasCertificate;
    /// they prove c.x <= sum_i y_i b_i = objective_value for every feasible x.
    Vec duals;
    FarkasCertificate farkas;
};

/// Exact two-phase simplex with Bland's rule. Certificates (duals on Optimal,
/// Farkas multipliers on Infeasible) are verified before being returned.
LpResult solve_lp(const LinearProgram& lp);

bool verify_farkas(const LinearProgram& lp, const FarkasCertificate& cert);

/// Checks that `duals` is dual feasible for `lp` and proves the given bound:
/// c.x <= bound for every feasible x, with sum_i y_i b_i == bound.
bool verify_dual_bound(const LinearProgram& lp, const Vec& duals, const Rat& bound);

bool is_feasible_point(const LinearProgram& lp, const Vec& x);

/// Mixed weak/strict system: weak rows a.x <= b, strict rows d.x < e.
struct MixedSystem {
    int num_vars = 0;
    std::vector<LinRow> weak;    // rel field ignored, all treated as <=
    std::vector<LinRow> strict;  // treated as <
    std::vector<bool> free_var;  // empty means all variables are free
};

/// Multipliers (y, z) >= 0 witnessing infeasibility of a MixedSystem via the
/// transposition alternative: either z = 0, A^T y = 0 (>= 0 on nonnegative
/// columns) and b^T y < 0, or z != 0, A^T y + B^T z = 0 (>= 0 likewise) and
/// b^T y + e^T z <= 0.
struct MotzkinCertificate {
    Vec y;
    Vec z;
};

bool verify_motzkin(const MixedSystem& system, const MotzkinCertificate& cert);

/// Rewrites an infeasible LP and its Farkas multipliers as an equivalent
/// all-weak MixedSystem over free variables plus verifying transposition
/// multipliers: Ge rows are negated, Eq rows split, and the nonnegativity of
/// each bounded variable becomes an explicit -x_j <= 0 row.
std::pair<MixedSystem, MotzkinCertificate> to_motzkin(const LinearProgram& lp,
                                                      const FarkasCertificate& cert);

}  // namespace mpexpr
