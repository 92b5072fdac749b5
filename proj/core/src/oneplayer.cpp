#include "mpexpr/oneplayer.hpp"

#include <algorithm>

#include "mpexpr/errors.hpp"

namespace mpexpr {

namespace {

// Shared layout between the fixed-threshold and optimizing variants. When
// `optimize` is set, one extra free variable nu is appended and maximized.
MaxFreeConstraintSystem build_system(const MaxFreeTerm& term, const std::vector<Vec>& points,
                                     const Rat& nu, bool optimize) {
    if (points.empty()) throw PreconditionError("constraint system needs at least one point");
    MaxFreeConstraintSystem sys;
    sys.num_points = static_cast<int>(points.size());
    sys.limsup_dims = term.limsup_dims();
    sys.liminf_dims = term.liminf_dims();
    sys.r_dims = term.atom_dims();
    sys.mixing_vectors = sys.limsup_dims.empty() ? 1 : static_cast<int>(sys.limsup_dims.size());
    sys.threshold = nu;

    int width = static_cast<int>(points[0].size());
    for (int d : sys.r_dims) {
        if (d > width) throw InputError("term references dimension beyond the point width");
    }

    int num_r = static_cast<int>(sys.r_dims.size());
    int nvars = sys.mixing_vectors * sys.num_points + num_r + (optimize ? 1 : 0);
    LinearProgram lp(nvars);
    for (int i = 0; i < num_r; ++i) lp.free_var[sys.r_var(i)] = true;
    int nu_var = nvars - 1;
    if (optimize) {
        lp.free_var[nu_var] = true;
        lp.objective[nu_var] = 1;
    }
    auto r_index = [&](int dim) {
        for (size_t i = 0; i < sys.r_dims.size(); ++i) {
            if (sys.r_dims[i] == dim) return static_cast<int>(i);
        }
        throw InternalError("atom dimension missing from r layout");
    };

    for (int b = 0; b < sys.mixing_vectors; ++b) {
        Vec one(nvars, Rat(0));
        for (int c = 0; c < sys.num_points; ++c) one[sys.x_var(b, c)] = 1;
        lp.add_row(std::move(one), Rel::Eq, Rat(1));

        std::vector<int> guarded = sys.liminf_dims;
        if (!sys.limsup_dims.empty()) guarded.push_back(sys.limsup_dims[b]);
        for (int dim : guarded) {
            Vec row(nvars, Rat(0));
            for (int c = 0; c < sys.num_points; ++c) row[sys.x_var(b, c)] = points[c][dim - 1];
            row[sys.r_var(r_index(dim))] = -1;
            lp.add_row(std::move(row), Rel::Ge, Rat(0));
        }
    }
    for (const LinearForm& form : min_of_sums(term)) {
        Vec row(nvars, Rat(0));
        for (auto& [dim, count] : form.coeffs) {
            row[sys.r_var(r_index(dim))] += Rat(count);
        }
        if (optimize) {
            row[nu_var] = -1;
            lp.add_row(std::move(row), Rel::Ge, Rat(0));
        } else {
            lp.add_row(std::move(row), Rel::Ge, nu);
        }
    }
    sys.lp = std::move(lp);
    return sys;
}

}  // namespace

MaxFreeConstraintSystem build_constraints(const MaxFreeTerm& term, const std::vector<Vec>& points,
                                          const Rat& nu) {
    return build_system(term, points, nu, false);
}

FeasibleOutcome feasible(const MaxFreeConstraintSystem& sys) {
    FeasibleOutcome out;
    LpResult res = solve_lp(sys.lp);
    if (res.status == LpStatus::Optimal) {
        out.feasible = true;
        out.solution = res.solution;
        return out;
    }
    if (res.status != LpStatus::Infeasible) {
        throw InternalError("feasibility system reported unbounded");
    }
    auto [system, cert] = to_motzkin(sys.lp, res.farkas);
    out.system = std::move(system);
    out.certificate = std::move(cert);
    return out;
}

TermValue value_of_term(const MaxFreeTerm& term, const std::vector<Vec>& points) {
    MaxFreeConstraintSystem sys = build_system(term, points, Rat(0), true);
    LpResult res = solve_lp(sys.lp);
    if (res.status != LpStatus::Optimal) {
        throw InternalError("term value LP must have an optimum");
    }
    TermValue tv;
    tv.value = res.objective_value;
    tv.duals = res.duals;
    for (int b = 0; b < sys.mixing_vectors; ++b) {
        Vec mix(sys.num_points);
        for (int c = 0; c < sys.num_points; ++c) mix[c] = res.solution[sys.x_var(b, c)];
        tv.mixings.push_back(std::move(mix));
    }
    for (size_t i = 0; i < sys.r_dims.size(); ++i) {
        tv.r.emplace_back(sys.r_dims[i], res.solution[sys.r_var(static_cast<int>(i))]);
    }
    return tv;
}

PointSetValue value_of_point_set_detailed(const std::vector<Vec>& points,
                                          const NormalFormExpression& nf) {
    if (points.empty()) throw PreconditionError("value_of_point_set needs a nonempty point set");
    std::vector<Vec> lifted;
    lifted.reserve(points.size());
    for (const Vec& p : points) lifted.push_back(nf.extend(p));
    PointSetValue out;
    bool first = true;
    for (size_t t = 0; t < nf.terms.size(); ++t) {
        TermValue tv = value_of_term(nf.terms[t], lifted);
        if (first || tv.value > out.value) {
            out.value = tv.value;
            out.best_term = static_cast<int>(t);
            out.best = std::move(tv);
            first = false;
        }
    }
    return out;
}

Rat value_of_point_set(const std::vector<Vec>& points, const NormalFormExpression& nf) {
    return value_of_point_set_detailed(points, nf).value;
}

OnePlayerValue solve(const GameGraph& g, const NormalFormExpression& nf,
                     std::optional<Player> maximizer) {
    if (!maximizer) {
        bool p1_choice = false, p2_choice = false;
        for (int v = 0; v < g.num_vertices(); ++v) {
            if (g.out_edges(v).size() > 1) {
                (g.vertex(v).owner == Player::P1 ? p1_choice : p2_choice) = true;
            }
        }
        if (p1_choice && p2_choice) {
            throw InputError("graph is not a one-player game: both players have choices");
        }
        maximizer = p2_choice ? Player::P2 : Player::P1;
    } else {
        for (int v = 0; v < g.num_vertices(); ++v) {
            if (g.vertex(v).owner != *maximizer && g.out_edges(v).size() > 1) {
                throw InputError("vertex '" + g.vertex(v).id +
                                 "' is a non-maximizer choice vertex");
            }
        }
    }

    SccDecomposition scc = scc_decompose(g);
    std::vector<SimpleCycle> cycles = simple_cycles(g);
    OnePlayerValue best;
    bool found = false;
    for (int ci : reachable_sccs(g, scc)) {
        const std::vector<int>& comp = scc.components[ci];
        std::vector<bool> inside(g.num_vertices(), false);
        for (int v : comp) inside[v] = true;
        std::vector<Vec> averages;
        for (const SimpleCycle& c : cycles) {
            bool in = true;
            for (int e : c.edges) {
                if (!inside[g.edge(e).from] || !inside[g.edge(e).to]) {
                    in = false;
                    break;
                }
            }
            if (in) averages.push_back(c.average());
        }
        if (averages.empty()) continue;
        PointSetValue pv = value_of_point_set_detailed(averages, nf);
        if (!found || pv.value > best.value) {
            best.value = pv.value;
            best.scc = comp;
            best.points = std::move(averages);
            best.detail = std::move(pv);
            found = true;
        }
    }
    if (!found) throw InternalError("no reachable cycle in a finite graph");
    return best;
}

}  // namespace mpexpr
