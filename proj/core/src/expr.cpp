#include "mpexpr/expr.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "mpexpr/errors.hpp"

namespace mpexpr {

namespace {

void require_dim(int dim) {
    if (dim < 1) throw InputError("atom dimension must be >= 1");
}

void require_arity(const std::vector<Expression>& children) {
    if (children.size() < 2) throw InputError("min/max/sum need at least 2 operands");
}

}  // namespace

Expression Expression::lim_inf(int dim) {
    require_dim(dim);
    Expression e;
    e.op_ = ExprOp::Atom;
    e.kind_ = AtomKind::LimInf;
    e.dim_ = dim;
    return e;
}

Expression Expression::lim_sup(int dim) {
    require_dim(dim);
    Expression e;
    e.op_ = ExprOp::Atom;
    e.kind_ = AtomKind::LimSup;
    e.dim_ = dim;
    return e;
}

Expression Expression::neg(Expression child) {
    Expression e;
    e.op_ = ExprOp::Neg;
    e.children_.push_back(std::move(child));
    return e;
}

Expression Expression::min(std::vector<Expression> children) {
    require_arity(children);
    Expression e;
    e.op_ = ExprOp::Min;
    e.children_ = std::move(children);
    return e;
}

Expression Expression::max(std::vector<Expression> children) {
    require_arity(children);
    Expression e;
    e.op_ = ExprOp::Max;
    e.children_ = std::move(children);
    return e;
}

Expression Expression::sum(std::vector<Expression> children) {
    require_arity(children);
    Expression e;
    e.op_ = ExprOp::Sum;
    e.children_ = std::move(children);
    return e;
}

bool Expression::operator==(const Expression& other) const {
    if (op_ != other.op_) return false;
    if (op_ == ExprOp::Atom) return kind_ == other.kind_ && dim_ == other.dim_;
    return children_ == other.children_;
}

int Expression::max_atom_dim() const {
    if (op_ == ExprOp::Atom) return dim_;
    int m = 0;
    for (const Expression& c : children_) m = std::max(m, c.max_atom_dim());
    return m;
}

int Expression::atom_count() const {
    if (op_ == ExprOp::Atom) return 1;
    int n = 0;
    for (const Expression& c : children_) n += c.atom_count();
    return n;
}

std::string Expression::to_text() const {
    std::ostringstream out;
    switch (op_) {
        case ExprOp::Atom:
            out << "(" << (kind_ == AtomKind::LimInf ? "li" : "ls") << " " << dim_ << ")";
            break;
        case ExprOp::Neg:
            out << "(neg " << children_[0].to_text() << ")";
            break;
        case ExprOp::Min:
        case ExprOp::Max:
        case ExprOp::Sum: {
            out << "(" << (op_ == ExprOp::Min ? "min" : op_ == ExprOp::Max ? "max" : "sum");
            for (const Expression& c : children_) out << " " << c.to_text();
            out << ")";
            break;
        }
    }
    return out.str();
}

namespace {

struct Parser {
    const std::string& text;
    size_t pos = 0;

    explicit Parser(const std::string& t) : text(t) {}

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    std::string next_token() {
        skip_ws();
        if (pos >= text.size()) throw InputError("unexpected end of expression");
        char c = text[pos];
        if (c == '(' || c == ')') {
            ++pos;
            return std::string(1, c);
        }
        size_t start = pos;
        while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
               text[pos] != '(' && text[pos] != ')') {
            ++pos;
        }
        return text.substr(start, pos - start);
    }

    Expression parse_expr() {
        std::string tok = next_token();
        if (tok != "(") throw InputError("expected '(' at position " + std::to_string(pos));
        std::string head = next_token();
        if (head == "li" || head == "ls") {
            std::string dim_tok = next_token();
            int dim;
            try {
                size_t used = 0;
                dim = std::stoi(dim_tok, &used);
                if (used != dim_tok.size()) throw std::invalid_argument("");
            } catch (const std::exception&) {
                throw InputError("bad atom dimension '" + dim_tok + "'");
            }
            expect_close();
            return head == "li" ? Expression::lim_inf(dim) : Expression::lim_sup(dim);
        }
        if (head == "neg") {
            Expression child = parse_expr();
            expect_close();
            return Expression::neg(std::move(child));
        }
        if (head == "min" || head == "max" || head == "sum") {
            std::vector<Expression> children;
            for (;;) {
                skip_ws();
                if (pos < text.size() && text[pos] == ')') {
                    ++pos;
                    break;
                }
                children.push_back(parse_expr());
            }
            if (head == "min") return Expression::min(std::move(children));
            if (head == "max") return Expression::max(std::move(children));
            return Expression::sum(std::move(children));
        }
        throw InputError("unknown operator '" + head + "'");
    }

    void expect_close() {
        std::string tok = next_token();
        if (tok != ")") throw InputError("expected ')' near position " + std::to_string(pos));
    }
};

}  // namespace

Expression Expression::parse(const std::string& text) {
    Parser p(text);
    Expression e = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size()) throw InputError("trailing input after expression");
    return e;
}

namespace {

Rat eval_on_averages(const Expression& e, const Vec& avg) {
    switch (e.op()) {
        case ExprOp::Atom: {
            int d = e.atom_dim();
            if (d > static_cast<int>(avg.size())) {
                throw InputError("atom dimension " + std::to_string(d) +
                                 " exceeds weight dimension " + std::to_string(avg.size()));
            }
            return avg[d - 1];
        }
        case ExprOp::Neg:
            return -eval_on_averages(e.children()[0], avg);
        case ExprOp::Min: {
            Rat r = eval_on_averages(e.children()[0], avg);
            for (size_t i = 1; i < e.children().size(); ++i)
                r = rat_min(r, eval_on_averages(e.children()[i], avg));
            return r;
        }
        case ExprOp::Max: {
            Rat r = eval_on_averages(e.children()[0], avg);
            for (size_t i = 1; i < e.children().size(); ++i)
                r = rat_max(r, eval_on_averages(e.children()[i], avg));
            return r;
        }
        case ExprOp::Sum: {
            Rat r = 0;
            for (const Expression& c : e.children()) r += eval_on_averages(c, avg);
            return r;
        }
    }
    throw InternalError("unreachable expression op");
}

}  // namespace

Rat evaluate_periodic(const Expression& expr, const std::vector<Vec>& prefix,
                      const std::vector<Vec>& cycle) {
    if (cycle.empty()) throw InputError("periodic play needs a nonempty cycle");
    size_t k = cycle[0].size();
    for (const Vec& v : cycle) {
        if (v.size() != k) throw InputError("cycle vectors have mixed dimensions");
    }
    for (const Vec& v : prefix) {
        if (v.size() != k) throw InputError("prefix vectors have mixed dimensions");
    }
    // On an ultimately periodic play both lim inf and lim sup of every
    // per-dimension average equal the cycle average.
    Vec avg(k, Rat(0));
    for (const Vec& v : cycle) {
        for (size_t d = 0; d < k; ++d) avg[d] += v[d];
    }
    Rat len(static_cast<long>(cycle.size()));
    for (size_t d = 0; d < k; ++d) avg[d] /= len;
    return eval_on_averages(expr, avg);
}

Expression liminf_only_rewrite(const Expression& expr) {
    switch (expr.op()) {
        case ExprOp::Atom:
            return Expression::lim_inf(expr.atom_dim());
        case ExprOp::Neg:
            return Expression::neg(liminf_only_rewrite(expr.children()[0]));
        case ExprOp::Min:
        case ExprOp::Max:
        case ExprOp::Sum: {
            std::vector<Expression> cs;
            cs.reserve(expr.children().size());
            for (const Expression& c : expr.children()) cs.push_back(liminf_only_rewrite(c));
            if (expr.op() == ExprOp::Min) return Expression::min(std::move(cs));
            if (expr.op() == ExprOp::Max) return Expression::max(std::move(cs));
            return Expression::sum(std::move(cs));
        }
    }
    throw InternalError("unreachable expression op");
}

namespace {

void collect_atom_dims(const Expression& e, AtomKind want, std::set<int>& out) {
    if (e.op() == ExprOp::Atom) {
        if (e.atom_kind() == want) out.insert(e.atom_dim());
        return;
    }
    for (const Expression& c : e.children()) collect_atom_dims(c, want, out);
}

}  // namespace

std::vector<int> MaxFreeTerm::liminf_dims() const {
    std::set<int> s;
    collect_atom_dims(tree, AtomKind::LimInf, s);
    return {s.begin(), s.end()};
}

std::vector<int> MaxFreeTerm::limsup_dims() const {
    std::set<int> s;
    collect_atom_dims(tree, AtomKind::LimSup, s);
    return {s.begin(), s.end()};
}

std::vector<int> MaxFreeTerm::atom_dims() const {
    std::set<int> s;
    collect_atom_dims(tree, AtomKind::LimInf, s);
    collect_atom_dims(tree, AtomKind::LimSup, s);
    return {s.begin(), s.end()};
}

namespace {

std::vector<LinearForm> rows_of(const Expression& e) {
    switch (e.op()) {
        case ExprOp::Atom: {
            LinearForm f;
            f.coeffs[e.atom_dim()] = 1;
            return {f};
        }
        case ExprOp::Min: {
            std::vector<LinearForm> rows;
            for (const Expression& c : e.children()) {
                auto sub = rows_of(c);
                rows.insert(rows.end(), sub.begin(), sub.end());
            }
            return rows;
        }
        case ExprOp::Sum: {
            std::vector<LinearForm> rows{LinearForm{}};
            for (const Expression& c : e.children()) {
                auto sub = rows_of(c);
                std::vector<LinearForm> next;
                next.reserve(rows.size() * sub.size());
                for (const LinearForm& a : rows) {
                    for (const LinearForm& b : sub) {
                        LinearForm merged = a;
                        for (auto& [dim, cnt] : b.coeffs) merged.coeffs[dim] += cnt;
                        next.push_back(std::move(merged));
                    }
                }
                rows = std::move(next);
            }
            return rows;
        }
        default:
            throw PreconditionError("min_of_sums requires a max-free term");
    }
}

}  // namespace

std::vector<LinearForm> min_of_sums(const MaxFreeTerm& term) { return rows_of(term.tree); }

Vec NormalFormExpression::extend(const Vec& w) const {
    Vec out(dimension_map.size());
    for (size_t d = 0; d < dimension_map.size(); ++d) {
        const DimensionMapEntry& entry = dimension_map[d];
        if (entry.source_dim > static_cast<int>(w.size())) {
            throw InputError("weight vector shorter than the dimension map source");
        }
        out[d] = Rat(entry.sign) * w[entry.source_dim - 1];
    }
    return out;
}

Expression NormalFormExpression::as_expression() const {
    if (terms.empty()) throw InternalError("normal form with no terms");
    if (terms.size() == 1) return terms[0].tree;
    std::vector<Expression> cs;
    cs.reserve(terms.size());
    for (const MaxFreeTerm& t : terms) cs.push_back(t.tree);
    return Expression::max(std::move(cs));
}

Rat NormalFormExpression::lipschitz_bound() const {
    long best = 1;
    for (const MaxFreeTerm& t : terms) {
        for (const LinearForm& row : min_of_sums(t)) {
            long s = 0;
            for (auto& [dim, cnt] : row.coeffs) s += cnt;
            best = std::max(best, s);
        }
    }
    return Rat(best);
}

namespace {

// Signed atom produced by pushing numerical complements into the weights:
// -LimInf over w equals LimSup over -w.
struct SignedAtom {
    AtomKind kind;
    int source;
    int sign;
};

struct NnfTree {
    bool is_atom = false;
    SignedAtom atom{AtomKind::LimInf, 1, 1};
    ExprOp op = ExprOp::Min;  // Min/Max/Sum for internal nodes
    std::vector<NnfTree> children;
};

NnfTree push_negation(const Expression& e, bool positive) {
    switch (e.op()) {
        case ExprOp::Atom: {
            NnfTree t;
            t.is_atom = true;
            AtomKind k = e.atom_kind();
            if (!positive) k = (k == AtomKind::LimInf) ? AtomKind::LimSup : AtomKind::LimInf;
            t.atom = SignedAtom{k, e.atom_dim(), positive ? 1 : -1};
            return t;
        }
        case ExprOp::Neg:
            return push_negation(e.children()[0], !positive);
        case ExprOp::Min:
        case ExprOp::Max:
        case ExprOp::Sum: {
            NnfTree t;
            ExprOp op = e.op();
            if (!positive) {
                if (op == ExprOp::Min) op = ExprOp::Max;
                else if (op == ExprOp::Max) op = ExprOp::Min;
            }
            t.op = op;
            t.children.reserve(e.children().size());
            for (const Expression& c : e.children()) t.children.push_back(push_negation(c, positive));
            return t;
        }
    }
    throw InternalError("unreachable expression op");
}

// Distributes Max outward; the results contain only Min/Sum/Atom nodes.
std::vector<NnfTree> distribute_max(const NnfTree& t) {
    if (t.is_atom) return {t};
    std::vector<std::vector<NnfTree>> child_terms;
    child_terms.reserve(t.children.size());
    for (const NnfTree& c : t.children) child_terms.push_back(distribute_max(c));
    if (t.op == ExprOp::Max) {
        std::vector<NnfTree> out;
        for (auto& ts : child_terms) out.insert(out.end(), ts.begin(), ts.end());
        return out;
    }
    // Min/Sum: one term per combination of child terms
    std::vector<std::vector<NnfTree>> combos{{}};
    for (auto& ts : child_terms) {
        std::vector<std::vector<NnfTree>> next;
        next.reserve(combos.size() * ts.size());
        for (auto& combo : combos) {
            for (auto& pick : ts) {
                auto extended = combo;
                extended.push_back(pick);
                next.push_back(std::move(extended));
            }
        }
        combos = std::move(next);
    }
    std::vector<NnfTree> out;
    out.reserve(combos.size());
    for (auto& combo : combos) {
        NnfTree node;
        node.op = t.op;
        node.children = std::move(combo);
        out.push_back(std::move(node));
    }
    return out;
}

Expression rebuild_term(const NnfTree& t, std::vector<DimensionMapEntry>& dim_map,
                        std::map<std::pair<int, int>, std::vector<int>>& pool,
                        std::map<std::pair<int, int>, int>& used_in_term) {
    if (t.is_atom) {
        std::pair<int, int> key{t.atom.source, t.atom.sign};
        int idx = used_in_term[key]++;
        auto& dims = pool[key];
        while (static_cast<int>(dims.size()) <= idx) {
            dim_map.push_back(DimensionMapEntry{t.atom.source, t.atom.sign});
            dims.push_back(static_cast<int>(dim_map.size()));
        }
        int dim = dims[idx];
        return t.atom.kind == AtomKind::LimInf ? Expression::lim_inf(dim)
                                               : Expression::lim_sup(dim);
    }
    std::vector<Expression> cs;
    cs.reserve(t.children.size());
    for (const NnfTree& c : t.children) cs.push_back(rebuild_term(c, dim_map, pool, used_in_term));
    if (cs.size() == 1) return cs[0];
    return t.op == ExprOp::Min ? Expression::min(std::move(cs)) : Expression::sum(std::move(cs));
}

}  // namespace

NormalFormExpression normalize(const Expression& expr, int k) {
    if (expr.max_atom_dim() > k) {
        throw InputError("expression references dimension " +
                         std::to_string(expr.max_atom_dim()) + " but k = " + std::to_string(k));
    }
    NormalFormExpression nf;
    std::map<std::pair<int, int>, std::vector<int>> pool;
    for (int d = 1; d <= k; ++d) {
        nf.dimension_map.push_back(DimensionMapEntry{d, 1});
        pool[{d, 1}].push_back(d);
    }
    NnfTree nnf = push_negation(expr, true);
    for (const NnfTree& term : distribute_max(nnf)) {
        std::map<std::pair<int, int>, int> used_in_term;
        Expression tree = rebuild_term(term, nf.dimension_map, pool, used_in_term);
        nf.terms.push_back(MaxFreeTerm{std::move(tree)});
    }
    return nf;
}

}  // namespace mpexpr
