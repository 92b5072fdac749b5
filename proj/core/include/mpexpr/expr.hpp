#pragma once

#include <map>
#include <string>
#include <vector>

#include "mpexpr/rational.hpp"

namespace mpexpr {

enum class AtomKind { LimInf, LimSup };
enum class ExprOp { Atom, Neg, Min, Max, Sum };

/// Immutable expression tree over long-run-average atoms. Atoms carry a
/// 1-based dimension index; Min/Max/Sum are n-ary (>= 2 children).
class Expression {
public:
    static Expression lim_inf(int dim);
    static Expression lim_sup(int dim);
    static Expression neg(Expression child);
    static Expression min(std::vector<Expression> children);
    static Expression max(std::vector<Expression> children);
    static Expression sum(std::vector<Expression> children);

    ExprOp op() const { return op_; }
    AtomKind atom_kind() const { return kind_; }
    int atom_dim() const { return dim_; }
    const std::vector<Expression>& children() const { return children_; }

    int max_atom_dim() const;
    int atom_count() const;

    /// Prefix s-expression text, e.g. "(sum (min (li 1) (ls 2)) (neg (li 3)))".
    std::string to_text() const;
    static Expression parse(const std::string& text);

    bool operator==(const Expression& other) const;

private:
    Expression() = default;
    ExprOp op_ = ExprOp::Atom;
    AtomKind kind_ = AtomKind::LimInf;
    int dim_ = 1;
    std::vector<Expression> children_;
};

/// Exact value of the expression on the ultimately periodic play
/// prefix cycle^omega. The prefix never affects the result.
Rat evaluate_periodic(const Expression& expr, const std::vector<Vec>& prefix,
                      const std::vector<Vec>& cycle);

/// Replaces every LimSup atom by LimInf; used by the both-players-finite mode.
Expression liminf_only_rewrite(const Expression& expr);

/// How an extended dimension reads the original weight function.
struct DimensionMapEntry {
    int source_dim;  // 1-based
    int sign;        // +1 or -1
};

/// Max-free tree (Min/Sum/Atom only); atoms reference extended dimensions and
/// each extended dimension occurs at most once in the term.
struct MaxFreeTerm {
    Expression tree;

    std::vector<int> liminf_dims() const;
    std::vector<int> limsup_dims() const;
    std::vector<int> atom_dims() const;  // sorted, distinct
};

/// One row of the min-of-sums decomposition: coefficients count atom
/// occurrences per dimension. A max-free term t satisfies
/// t(r) = min over rows of sum_d coeff_d * r_d.
struct LinearForm {
    std::map<int, int> coeffs;
};

std::vector<LinearForm> min_of_sums(const MaxFreeTerm& term);

struct NormalFormExpression {
    std::vector<MaxFreeTerm> terms;
    /// Entry d-1 describes extended dimension d. The first k entries are the
    /// identity on the original dimensions.
    std::vector<DimensionMapEntry> dimension_map;

    int extended_dimension() const { return static_cast<int>(dimension_map.size()); }

    /// Lifts an original weight vector into the extended space.
    Vec extend(const Vec& w) const;

    /// MAX over the max-free terms, as a plain expression over extended dims.
    Expression as_expression() const;

    /// Value shift per unit of uniform point perturbation; the max over rows
    /// of the min-of-sums coefficient sums.
    Rat lipschitz_bound() const;
};

/// Lemma-style normal form: negation pushed into the weights, MAX distributed
/// outward, repeated atoms split onto duplicated dimensions.
NormalFormExpression normalize(const Expression& expr, int k);

}  // namespace mpexpr
