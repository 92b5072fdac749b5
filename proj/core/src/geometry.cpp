#include "mpexpr/geometry.hpp"

#include "mpexpr/errors.hpp"
#include "mpexpr/linprog.hpp"

namespace mpexpr {

int Polytope::dimension() const {
    validate();
    return static_cast<int>(points[0].size());
}

void Polytope::validate() const {
    if (points.empty()) throw InputError("polytope needs at least one generating point");
    for (const Vec& p : points) {
        if (p.size() != points[0].size()) throw InputError("polytope points have mixed dimensions");
    }
}

std::optional<Vec> member(const Vec& p, const Polytope& poly) {
    poly.validate();
    int k = static_cast<int>(p.size());
    if (k != static_cast<int>(poly.points[0].size())) {
        throw InputError("point dimension differs from polytope dimension");
    }
    int n = static_cast<int>(poly.points.size());
    LinearProgram lp(n);
    for (int d = 0; d < k; ++d) {
        Vec row(n);
        for (int i = 0; i < n; ++i) row[i] = poly.points[i][d];
        lp.add_row(std::move(row), Rel::Eq, p[d]);
    }
    lp.add_row(Vec(n, Rat(1)), Rel::Eq, Rat(1));
    LpResult res = solve_lp(lp);
    if (res.status != LpStatus::Optimal) return std::nullopt;
    // reconstruction check is exact by construction; assert anyway
    Vec recon(k, Rat(0));
    for (int i = 0; i < n; ++i) recon = add(recon, scale(res.solution[i], poly.points[i]));
    if (recon != p) throw InternalError("membership coefficients fail to reconstruct the point");
    return res.solution;
}

bool contained(const Polytope& inner, const Polytope& outer) {
    inner.validate();
    for (const Vec& p : inner.points) {
        if (!member(p, outer)) return false;
    }
    return true;
}

std::optional<Vec> intersects(const Polytope& a, const Polytope& b) {
    a.validate();
    b.validate();
    int k = a.dimension();
    if (k != b.dimension()) throw InputError("polytope dimensions differ");
    int n = static_cast<int>(a.points.size());
    int m = static_cast<int>(b.points.size());
    // lambda over a's points, mu over b's points, equal combinations
    LinearProgram lp(n + m);
    for (int d = 0; d < k; ++d) {
        Vec row(n + m, Rat(0));
        for (int i = 0; i < n; ++i) row[i] = a.points[i][d];
        for (int j = 0; j < m; ++j) row[n + j] = -b.points[j][d];
        lp.add_row(std::move(row), Rel::Eq, Rat(0));
    }
    {
        Vec row(n + m, Rat(0));
        for (int i = 0; i < n; ++i) row[i] = 1;
        lp.add_row(std::move(row), Rel::Eq, Rat(1));
    }
    {
        Vec row(n + m, Rat(0));
        for (int j = 0; j < m; ++j) row[n + j] = 1;
        lp.add_row(std::move(row), Rel::Eq, Rat(1));
    }
    LpResult res = solve_lp(lp);
    if (res.status != LpStatus::Optimal) return std::nullopt;
    Vec witness(k, Rat(0));
    for (int i = 0; i < n; ++i) witness = add(witness, scale(res.solution[i], a.points[i]));
    return witness;
}

}  // namespace mpexpr
