#include "mpexpr/linprog.hpp"

#include <algorithm>

#include "mpexpr/errors.hpp"

namespace mpexpr {

void LinearProgram::add_row(Vec coeffs, Rel rel, Rat rhs) {
    if (static_cast<int>(coeffs.size()) != num_vars) {
        throw InternalError("LP row width mismatch");
    }
    rows.push_back(LinRow{std::move(coeffs), rel, std::move(rhs)});
}

namespace {

// Canonical form: maximize c.x subject to Ax <= b, x >= 0.
// Free variables are split x = u - w; Ge rows are negated; Eq rows become a
// Le/Ge pair. `col_of` maps an original variable to its positive column (the
// negative column, when present, is col_of[j] + 1). `row_origin` maps each
// canonical row to (original row, sign).
struct Canonical {
    int n = 0;  // structural columns
    std::vector<Vec> a;
    Vec b;
    Vec c;
    std::vector<int> col_of;
    std::vector<bool> split;
    std::vector<std::pair<int, Rat>> row_origin;
};

Canonical canonicalize(const LinearProgram& lp) {
    Canonical cf;
    cf.col_of.resize(lp.num_vars);
    cf.split.resize(lp.num_vars);
    int n = 0;
    for (int j = 0; j < lp.num_vars; ++j) {
        cf.col_of[j] = n;
        bool fr = j < static_cast<int>(lp.free_var.size()) && lp.free_var[j];
        cf.split[j] = fr;
        n += fr ? 2 : 1;
    }
    cf.n = n;
    cf.c.assign(n, Rat(0));
    for (int j = 0; j < lp.num_vars; ++j) {
        cf.c[cf.col_of[j]] = lp.objective[j];
        if (cf.split[j]) cf.c[cf.col_of[j] + 1] = -lp.objective[j];
    }
    auto emit = [&](const LinRow& row, int origin, const Rat& sign) {
        Vec a(n, Rat(0));
        for (int j = 0; j < lp.num_vars; ++j) {
            a[cf.col_of[j]] = sign * row.coeffs[j];
            if (cf.split[j]) a[cf.col_of[j] + 1] = -sign * row.coeffs[j];
        }
        cf.a.push_back(std::move(a));
        cf.b.push_back(sign * row.rhs);
        cf.row_origin.emplace_back(origin, sign);
    };
    for (size_t i = 0; i < lp.rows.size(); ++i) {
        const LinRow& row = lp.rows[i];
        switch (row.rel) {
            case Rel::Le: emit(row, static_cast<int>(i), Rat(1)); break;
            case Rel::Ge: emit(row, static_cast<int>(i), Rat(-1)); break;
            case Rel::Eq:
                emit(row, static_cast<int>(i), Rat(1));
                emit(row, static_cast<int>(i), Rat(-1));
                break;
        }
    }
    return cf;
}

// Dense tableau simplex for max c.x, Ax <= b, x >= 0, with one artificial
// column for phase 1 and Bland's rule throughout.
class Tableau {
public:
    Tableau(const Canonical& cf)
        : m_(static_cast<int>(cf.a.size())), n_(cf.n), art_(-1) {
        cols_ = n_ + m_ + 2;  // structural | slacks | artificial | rhs
        art_ = n_ + m_;
        t_.assign(m_ + 1, Vec(cols_, Rat(0)));
        basis_.resize(m_);
        for (int i = 0; i < m_; ++i) {
            for (int j = 0; j < n_; ++j) t_[i][j] = cf.a[i][j];
            t_[i][n_ + i] = 1;
            t_[i][art_] = -1;
            t_[i].back() = cf.b[i];
            basis_[i] = n_ + i;
        }
        c_ = cf.c;
    }

    // Returns false when infeasible; fills farkas_y (canonical-row duals).
    bool run(Vec& farkas_y) {
        bool need_phase1 = false;
        int worst = -1;
        for (int i = 0; i < m_; ++i) {
            if (t_[i].back() < 0 && (worst < 0 || t_[i].back() < t_[worst].back())) {
                worst = i;
                need_phase1 = true;
            }
        }
        if (need_phase1) {
            // objective: max -x0
            for (int j = 0; j < cols_; ++j) t_[m_][j] = 0;
            t_[m_][art_] = 1;
            pivot(worst, art_);
            simplex(true);
            if (t_[m_].back() < 0) {
                farkas_y.assign(m_, Rat(0));
                for (int i = 0; i < m_; ++i) farkas_y[i] = t_[m_][n_ + i];
                return false;
            }
            if (basis_contains(art_)) {
                // basic at value zero; pivot it out if possible
                int row = basis_row(art_);
                for (int j = 0; j < n_ + m_; ++j) {
                    if (t_[row][j] != 0) {
                        pivot(row, j);
                        break;
                    }
                }
            }
        }
        // phase-2 objective, eliminated against the current basis
        for (int j = 0; j < cols_; ++j) t_[m_][j] = 0;
        for (int j = 0; j < n_; ++j) t_[m_][j] = -c_[j];
        for (int i = 0; i < m_; ++i) {
            int bj = basis_[i];
            if (bj < n_ && c_[bj] != 0) {
                Rat f = c_[bj];
                for (int j = 0; j < cols_; ++j) t_[m_][j] += f * t_[i][j];
            }
        }
        simplex(false);
        return true;
    }

    bool unbounded() const { return unbounded_; }

    Vec solution() const {
        Vec x(n_, Rat(0));
        for (int i = 0; i < m_; ++i) {
            if (basis_[i] < n_) x[basis_[i]] = t_[i].back();
        }
        return x;
    }

    Rat objective_value() const { return t_[m_].back(); }

    Vec duals() const {
        Vec y(m_, Rat(0));
        for (int i = 0; i < m_; ++i) y[i] = t_[m_][n_ + i];
        return y;
    }

private:
    bool basis_contains(int col) const {
        return std::find(basis_.begin(), basis_.end(), col) != basis_.end();
    }
    int basis_row(int col) const {
        for (int i = 0; i < m_; ++i)
            if (basis_[i] == col) return i;
        throw InternalError("column not basic");
    }

    void pivot(int row, int col) {
        Rat inv = 1 / t_[row][col];
        for (int j = 0; j < cols_; ++j) t_[row][j] *= inv;
        for (int i = 0; i <= m_; ++i) {
            if (i == row || t_[i][col] == 0) continue;
            Rat f = t_[i][col];
            for (int j = 0; j < cols_; ++j) t_[i][j] -= f * t_[row][j];
        }
        basis_[row] = col;
    }

    // Bland's rule: smallest eligible entering column, smallest basis index
    // on ratio ties. Terminates without cycling.
    void simplex(bool phase1) {
        int limit = n_ + m_ + (phase1 ? 1 : 0);
        for (;;) {
            int enter = -1;
            for (int j = 0; j < limit; ++j) {
                if (!phase1 && j == art_) continue;
                if (t_[m_][j] < 0) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return;
            int leave = -1;
            Rat best_ratio;
            for (int i = 0; i < m_; ++i) {
                if (t_[i][enter] <= 0) continue;
                Rat ratio = t_[i].back() / t_[i][enter];
                if (leave < 0 || ratio < best_ratio ||
                    (ratio == best_ratio && basis_[i] < basis_[leave])) {
                    leave = i;
                    best_ratio = ratio;
                }
            }
            if (leave < 0) {
                if (phase1) throw InternalError("phase-1 LP unbounded");
                unbounded_ = true;
                return;
            }
            pivot(leave, enter);
        }
    }

    int m_, n_, cols_, art_;
    std::vector<Vec> t_;
    std::vector<int> basis_;
    Vec c_;
    bool unbounded_ = false;
};

Vec fold_row_multipliers(const LinearProgram& lp, const Canonical& cf, const Vec& y_canon) {
    Vec y(lp.rows.size(), Rat(0));
    for (size_t i = 0; i < cf.row_origin.size(); ++i) {
        y[cf.row_origin[i].first] += cf.row_origin[i].second * y_canon[i];
    }
    return y;
}

}  // namespace

bool is_feasible_point(const LinearProgram& lp, const Vec& x) {
    if (static_cast<int>(x.size()) != lp.num_vars) return false;
    for (int j = 0; j < lp.num_vars; ++j) {
        bool fr = j < static_cast<int>(lp.free_var.size()) && lp.free_var[j];
        if (!fr && x[j] < 0) return false;
    }
    for (const LinRow& row : lp.rows) {
        Rat lhs = dot(row.coeffs, x);
        if (row.rel == Rel::Le && lhs > row.rhs) return false;
        if (row.rel == Rel::Ge && lhs < row.rhs) return false;
        if (row.rel == Rel::Eq && lhs != row.rhs) return false;
    }
    return true;
}

bool verify_farkas(const LinearProgram& lp, const FarkasCertificate& cert) {
    const Vec& y = cert.row_multipliers;
    if (y.size() != lp.rows.size()) return false;
    Rat rhs = 0;
    Vec g(lp.num_vars, Rat(0));
    for (size_t i = 0; i < lp.rows.size(); ++i) {
        const LinRow& row = lp.rows[i];
        if (row.rel == Rel::Le && y[i] < 0) return false;
        if (row.rel == Rel::Ge && y[i] > 0) return false;
        for (int j = 0; j < lp.num_vars; ++j) g[j] += y[i] * row.coeffs[j];
        rhs += y[i] * row.rhs;
    }
    for (int j = 0; j < lp.num_vars; ++j) {
        bool fr = j < static_cast<int>(lp.free_var.size()) && lp.free_var[j];
        if (fr ? g[j] != 0 : g[j] < 0) return false;
    }
    return rhs < 0;
}

bool verify_dual_bound(const LinearProgram& lp, const Vec& duals, const Rat& bound) {
    if (duals.size() != lp.rows.size()) return false;
    Rat rhs = 0;
    Vec g(lp.num_vars, Rat(0));
    for (size_t i = 0; i < lp.rows.size(); ++i) {
        const LinRow& row = lp.rows[i];
        if (row.rel == Rel::Le && duals[i] < 0) return false;
        if (row.rel == Rel::Ge && duals[i] > 0) return false;
        for (int j = 0; j < lp.num_vars; ++j) g[j] += duals[i] * row.coeffs[j];
        rhs += duals[i] * row.rhs;
    }
    for (int j = 0; j < lp.num_vars; ++j) {
        bool fr = j < static_cast<int>(lp.free_var.size()) && lp.free_var[j];
        if (fr ? g[j] != lp.objective[j] : g[j] < lp.objective[j]) return false;
    }
    return rhs == bound;
}

LpResult solve_lp(const LinearProgram& lp) {
    Canonical cf = canonicalize(lp);
    Tableau tab(cf);
    LpResult res;
    Vec farkas_canon;
    if (!tab.run(farkas_canon)) {
        res.status = LpStatus::Infeasible;
        res.farkas.row_multipliers = fold_row_multipliers(lp, cf, farkas_canon);
        if (!verify_farkas(lp, res.farkas)) {
            throw InternalError("simplex produced a non-verifying Farkas certificate");
        }
        return res;
    }
    if (tab.unbounded()) {
        res.status = LpStatus::Unbounded;
        return res;
    }
    res.status = LpStatus::Optimal;
    Vec xc = tab.solution();
    res.solution.assign(lp.num_vars, Rat(0));
    for (int j = 0; j < lp.num_vars; ++j) {
        res.solution[j] = xc[cf.col_of[j]];
        if (cf.split[j]) res.solution[j] -= xc[cf.col_of[j] + 1];
    }
    res.objective_value = tab.objective_value();
    res.duals = fold_row_multipliers(lp, cf, tab.duals());
    if (!is_feasible_point(lp, res.solution) ||
        dot(lp.objective, res.solution) != res.objective_value ||
        !verify_dual_bound(lp, res.duals, res.objective_value)) {
        throw InternalError("simplex optimum failed self-verification");
    }
    return res;
}

std::pair<MixedSystem, MotzkinCertificate> to_motzkin(const LinearProgram& lp,
                                                      const FarkasCertificate& cert) {
    MixedSystem sys;
    sys.num_vars = lp.num_vars;
    MotzkinCertificate mc;
    const Vec& y = cert.row_multipliers;
    Vec g(lp.num_vars, Rat(0));
    for (size_t i = 0; i < lp.rows.size(); ++i) {
        const LinRow& row = lp.rows[i];
        for (int j = 0; j < lp.num_vars; ++j) g[j] += y[i] * row.coeffs[j];
        switch (row.rel) {
            case Rel::Le:
                sys.weak.push_back(row);
                mc.y.push_back(y[i]);
                break;
            case Rel::Ge: {
                LinRow neg{Vec(lp.num_vars), Rel::Le, -row.rhs};
                for (int j = 0; j < lp.num_vars; ++j) neg.coeffs[j] = -row.coeffs[j];
                sys.weak.push_back(std::move(neg));
                mc.y.push_back(-y[i]);
                break;
            }
            case Rel::Eq: {
                sys.weak.push_back(row);
                LinRow neg{Vec(lp.num_vars), Rel::Le, -row.rhs};
                for (int j = 0; j < lp.num_vars; ++j) neg.coeffs[j] = -row.coeffs[j];
                sys.weak.push_back(std::move(neg));
                if (y[i] >= 0) {
                    mc.y.push_back(y[i]);
                    mc.y.push_back(Rat(0));
                } else {
                    mc.y.push_back(Rat(0));
                    mc.y.push_back(-y[i]);
                }
                break;
            }
        }
    }
    for (int j = 0; j < lp.num_vars; ++j) {
        bool fr = j < static_cast<int>(lp.free_var.size()) && lp.free_var[j];
        if (fr) continue;
        LinRow bound{Vec(lp.num_vars, Rat(0)), Rel::Le, Rat(0)};
        bound.coeffs[j] = -1;
        sys.weak.push_back(std::move(bound));
        mc.y.push_back(g[j]);
    }
    if (!verify_motzkin(sys, mc)) {
        throw InternalError("Farkas-to-transposition rewrite failed verification");
    }
    return {std::move(sys), std::move(mc)};
}

bool verify_motzkin(const MixedSystem& system, const MotzkinCertificate& cert) {
    if (cert.y.size() != system.weak.size()) return false;
    if (cert.z.size() != system.strict.size()) return false;
    for (const Rat& v : cert.y)
        if (v < 0) return false;
    for (const Rat& v : cert.z)
        if (v < 0) return false;

    Vec g(system.num_vars, Rat(0));
    Rat yb = 0, ze = 0;
    bool z_nonzero = false;
    for (size_t i = 0; i < system.weak.size(); ++i) {
        for (int j = 0; j < system.num_vars; ++j) g[j] += cert.y[i] * system.weak[i].coeffs[j];
        yb += cert.y[i] * system.weak[i].rhs;
    }
    for (size_t i = 0; i < system.strict.size(); ++i) {
        if (cert.z[i] > 0) z_nonzero = true;
        for (int j = 0; j < system.num_vars; ++j) g[j] += cert.z[i] * system.strict[i].coeffs[j];
        ze += cert.z[i] * system.strict[i].rhs;
    }
    for (int j = 0; j < system.num_vars; ++j) {
        bool fr = system.free_var.empty() ||
                  (j < static_cast<int>(system.free_var.size()) && system.free_var[j]);
        if (fr ? g[j] != 0 : g[j] < 0) return false;
    }
    if (!z_nonzero) return yb < 0;
    return yb + ze <= 0;
}

}  // namespace mpexpr
