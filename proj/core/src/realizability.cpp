#include "mpexpr/realizability.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "mpexpr/errors.hpp"
#include "mpexpr/linprog.hpp"

namespace mpexpr {

namespace {

// Interior mixing x over the basis columns with basis*x inside hull(v):
// maximize the slack s with x_c >= s; accepted only when s > 0.
std::optional<std::pair<Vec, Vec>> interior_mixture_in_hull(const CycleMixtureBasis& basis,
                                                            const Polytope& v) {
    int t = static_cast<int>(basis.columns.size());
    int h = static_cast<int>(v.points.size());
    int k = static_cast<int>(v.points[0].size());
    // vars: x (t), lambda (h), s
    LinearProgram lp(t + h + 1);
    lp.objective[t + h] = 1;
    {
        Vec row(t + h + 1, Rat(0));
        for (int c = 0; c < t; ++c) row[c] = 1;
        lp.add_row(std::move(row), Rel::Eq, Rat(1));
    }
    {
        Vec row(t + h + 1, Rat(0));
        for (int j = 0; j < h; ++j) row[t + j] = 1;
        lp.add_row(std::move(row), Rel::Eq, Rat(1));
    }
    for (int d = 0; d < k; ++d) {
        Vec row(t + h + 1, Rat(0));
        for (int c = 0; c < t; ++c) row[c] = basis.columns[c][d];
        for (int j = 0; j < h; ++j) row[t + j] = -v.points[j][d];
        lp.add_row(std::move(row), Rel::Eq, Rat(0));
    }
    for (int c = 0; c < t; ++c) {
        Vec row(t + h + 1, Rat(0));
        row[c] = 1;
        row[t + h] = -1;
        lp.add_row(std::move(row), Rel::Ge, Rat(0));
    }
    LpResult res = solve_lp(lp);
    if (res.status != LpStatus::Optimal || res.objective_value <= 0) return std::nullopt;
    Vec mixing(res.solution.begin(), res.solution.begin() + t);
    Vec hull(res.solution.begin() + t, res.solution.begin() + t + h);
    return std::make_pair(std::move(mixing), std::move(hull));
}

CycleMixtureBasis translate_basis(const CycleMixtureBasis& basis,
                                  const std::vector<int>& edge_to_parent) {
    CycleMixtureBasis out = basis;
    for (SimpleCycle& c : out.cycles) {
        for (int& e : c.edges) e = edge_to_parent[e];
    }
    return out;
}

}  // namespace

RealizabilityResult is_realizable(const GameGraph& g, const Polytope& v) {
    v.validate();
    if (v.dimension() != g.dimension()) {
        throw InputError("polytope dimension differs from the graph weight dimension");
    }
    RealizabilityResult result;
    MemorylessStrategyRange range(g, Player::P2);
    MemorylessStrategy tau;
    while (range.next(tau)) {
        Subgraph resolved = resolve_strategy(g, tau, Player::P2);
        bool found = false;
        for (const CycleMixtureBasis& basis : reachable_cycle_bases(resolved.graph)) {
            auto hit = interior_mixture_in_hull(basis, v);
            if (!hit) continue;
            RealizabilityWitness::PerStrategy w;
            w.tau = tau;
            w.basis = translate_basis(basis, resolved.edge_to_parent);
            w.mixing = hit->first;
            w.hull_coefficients = hit->second;
            w.point = Vec(g.dimension(), Rat(0));
            for (size_t c = 0; c < basis.columns.size(); ++c) {
                w.point = add(w.point, scale(w.mixing[c], basis.columns[c]));
            }
            result.witness.strategies.push_back(std::move(w));
            found = true;
            break;
        }
        if (!found) {
            result.realizable = false;
            result.blocking_tau = tau;
            result.witness.strategies.clear();
            return result;
        }
    }
    result.realizable = true;
    return result;
}

MooreStrategy compose_strategies(const GameGraph& g, const MooreStrategy& sigma1,
                                 const MooreStrategy& sigma2, int e1, int e2) {
    if (e1 < 0 || e2 < 0 || e1 >= g.num_edges() || e2 >= g.num_edges() || e1 == e2) {
        throw InputError("compose_strategies needs two distinct edges");
    }
    if (g.edge(e1).from != g.edge(e2).from) {
        throw InputError("compose_strategies edges must share their source vertex");
    }
    int m1 = sigma1.memory_count, m2 = sigma2.memory_count;
    auto idx = [&](int a, int b, int mode) { return (a * m2 + b) * 2 + mode; };

    MooreStrategy out;
    out.memory_count = m1 * m2 * 2;
    out.initial_memory = idx(sigma1.initial_memory, sigma2.initial_memory, 0);
    out.update.assign(out.memory_count, std::vector<int>(g.num_edges(), 0));
    out.next.assign(out.memory_count, std::vector<int>(g.num_vertices(), -1));
    for (int a = 0; a < m1; ++a) {
        for (int b = 0; b < m2; ++b) {
            for (int mode = 0; mode < 2; ++mode) {
                int m = idx(a, b, mode);
                for (int e = 0; e < g.num_edges(); ++e) {
                    // mode 0 follows sigma2 and leaves on e2; mode 1 follows
                    // sigma1 and leaves on e1. The entering strategy observes
                    // the switching edge, the frozen one does not.
                    if (mode == 0) {
                        out.update[m][e] = (e == e2) ? idx(sigma1.update[a][e], b, 1)
                                                     : idx(a, sigma2.update[b][e], 0);
                    } else {
                        out.update[m][e] = (e == e1) ? idx(a, sigma2.update[b][e], 0)
                                                     : idx(sigma1.update[a][e], b, 1);
                    }
                }
                for (int vtx = 0; vtx < g.num_vertices(); ++vtx) {
                    out.next[m][vtx] = mode == 0 ? sigma2.next[b][vtx] : sigma1.next[a][vtx];
                }
            }
        }
    }
    return out;
}

MooreStrategy lasso_strategy(const GameGraph& g, const std::vector<bool>& alive_edges,
                             const CycleMixtureBasis& basis, const Vec& mixing) {
    if (basis.cycles.empty() || mixing.size() != basis.cycles.size()) {
        throw PreconditionError("lasso strategy needs a basis with a matching mixing");
    }
    for (const Rat& x : mixing) {
        if (x <= 0) throw PreconditionError("lasso mixing must be strictly positive");
    }
    // integer repetition counts: n_c = mixing_c * L / |c| with L the lcm of
    // the denominators of mixing_c / |c|; the walk then has length L
    mpz_class big_l = 1;
    std::vector<Rat> per_step(basis.cycles.size());
    for (size_t c = 0; c < basis.cycles.size(); ++c) {
        per_step[c] = mixing[c] / Rat(static_cast<long>(basis.cycles[c].edges.size()));
        per_step[c].canonicalize();
        mpz_class den = per_step[c].get_den();
        mpz_class gcd;
        mpz_gcd(gcd.get_mpz_t(), big_l.get_mpz_t(), den.get_mpz_t());
        big_l = big_l / gcd * den;
    }
    std::vector<long> reps(basis.cycles.size());
    mpz_class total = 0;
    for (size_t c = 0; c < basis.cycles.size(); ++c) {
        mpz_class n = per_step[c].get_num() * (big_l / per_step[c].get_den());
        if (!n.fits_slong_p()) throw InputError("pumping walk too long to materialize");
        reps[c] = n.get_si();
        total += n * static_cast<long>(basis.cycles[c].edges.size());
    }
    if (total != big_l) throw InternalError("pumping counts do not add up");
    if (!big_l.fits_slong_p() || big_l.get_si() > 2000000) {
        throw InputError("pumping walk too long to materialize");
    }

    // interleave the cycles into one closed walk over their connected union
    std::map<int, std::vector<size_t>> cycles_at;  // vertex -> cycle indices
    for (size_t c = 0; c < basis.cycles.size(); ++c) {
        for (int e : basis.cycles[c].edges) cycles_at[g.edge(e).from].push_back(c);
    }
    for (auto& [vtx, list] : cycles_at) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    int anchor = g.edge(basis.cycles[0].edges[0]).from;
    std::vector<long> remaining(reps);
    std::vector<int> walk;
    std::function<void(int)> expand = [&](int at) {
        auto it = cycles_at.find(at);
        if (it == cycles_at.end()) return;
        for (size_t c : it->second) {
            while (remaining[c] > 0) {
                --remaining[c];
                // rotate cycle c to start at `at`
                const auto& edges = basis.cycles[c].edges;
                size_t start = 0;
                while (g.edge(edges[start]).from != at) ++start;
                for (size_t i = 0; i < edges.size(); ++i) {
                    int e = edges[(start + i) % edges.size()];
                    walk.push_back(e);
                    expand(g.edge(e).to);
                }
            }
        }
    };
    expand(anchor);
    if (static_cast<long>(walk.size()) != big_l.get_si()) {
        throw InternalError("pumping walk failed to consume every cycle copy");
    }

    // alive-edge path from the initial vertex to the anchor
    std::vector<int> prefix;
    {
        std::vector<int> via_edge(g.num_vertices(), -1);
        std::vector<bool> seen(g.num_vertices(), false);
        std::deque<int> queue{g.initial()};
        seen[g.initial()] = true;
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            if (u == anchor) break;
            for (int e : g.out_edges(u)) {
                if (!alive_edges[e]) continue;
                int t = g.edge(e).to;
                if (!seen[t]) {
                    seen[t] = true;
                    via_edge[t] = e;
                    queue.push_back(t);
                }
            }
        }
        if (!seen[anchor]) throw PreconditionError("pumping anchor unreachable");
        for (int u = anchor; u != g.initial();) {
            int e = via_edge[u];
            prefix.push_back(e);
            u = g.edge(e).from;
        }
        std::reverse(prefix.begin(), prefix.end());
    }

    long p = static_cast<long>(prefix.size());
    long n = static_cast<long>(walk.size());
    MooreStrategy s;
    s.memory_count = static_cast<int>(p + n);
    s.initial_memory = 0;
    auto succ = [&](long m) { return m + 1 < p + n ? m + 1 : p; };
    s.update.assign(s.memory_count, {});
    s.next.assign(s.memory_count, {});
    std::vector<int> default_next(g.num_vertices());
    for (int vtx = 0; vtx < g.num_vertices(); ++vtx) {
        default_next[vtx] = g.out_edges(vtx)[0];
        for (int e : g.out_edges(vtx)) {
            if (alive_edges[e]) {
                default_next[vtx] = e;
                break;
            }
        }
    }
    for (long m = 0; m < p + n; ++m) {
        s.update[m].assign(g.num_edges(), static_cast<int>(succ(m)));
        s.next[m] = default_next;
        int planned = m < p ? prefix[m] : walk[m - p];
        s.next[m][g.edge(planned).from] = planned;
    }
    return s;
}

namespace {

// Reachable (vertex, memory) states of sigma on the alive part of g.
// Successors follow sigma at P1 vertices and every alive edge at P2 vertices.
std::vector<std::pair<int, int>> reachable_states(const GameGraph& g,
                                                  const std::vector<bool>& alive,
                                                  const MooreStrategy& sigma) {
    std::set<std::pair<int, int>> seen;
    std::deque<std::pair<int, int>> queue;
    auto push = [&](int vtx, int m) {
        if (seen.insert({vtx, m}).second) queue.push_back({vtx, m});
    };
    push(g.initial(), sigma.initial_memory);
    while (!queue.empty()) {
        auto [vtx, m] = queue.front();
        queue.pop_front();
        if (g.vertex(vtx).owner == Player::P1) {
            int e = sigma.next[m][vtx];
            if (e < 0 || !alive[e]) {
                throw InternalError("strategy leaves the alive edge set");
            }
            push(g.edge(e).to, sigma.update[m][e]);
        } else {
            for (int e : g.out_edges(vtx)) {
                if (alive[e]) push(g.edge(e).to, sigma.update[m][e]);
            }
        }
    }
    return {seen.begin(), seen.end()};
}

struct Realizer {
    const GameGraph& g;
    const RealizabilityWitness& witness;

    MooreStrategy build(std::vector<bool> alive) {
        // first player-2 vertex that still has a choice, smallest id first
        int split = -1;
        std::vector<int> alive_out;
        for (int vtx = 0; vtx < g.num_vertices() && split < 0; ++vtx) {
            if (g.vertex(vtx).owner != Player::P2) continue;
            alive_out.clear();
            for (int e : g.out_edges(vtx)) {
                if (alive[e]) alive_out.push_back(e);
            }
            if (alive_out.size() >= 2) split = vtx;
        }
        if (split < 0) return leaf(alive);

        int e1 = alive_out[0];
        int e2 = alive_out[1];
        std::vector<bool> alive1 = alive, alive2 = alive;
        alive1[e1] = false;
        alive2[e2] = false;
        MooreStrategy sigma1 = build(std::move(alive1));

        // if the split vertex never occurs under sigma1, sigma1 already covers
        // the whole game (the removed edge can never be played)
        std::vector<bool> alive1_mask = alive;
        alive1_mask[e1] = false;
        int anchor_memory = -1;
        for (auto [vtx, m] : reachable_states(g, alive1_mask, sigma1)) {
            if (vtx == split) {
                anchor_memory = m;
                break;
            }
        }
        if (anchor_memory < 0) return sigma1;

        MooreStrategy sigma2 = build(std::move(alive2));
        return compose_strategies(g, sigma1.with_initial_memory(anchor_memory), sigma2, e1, e2);
    }

    MooreStrategy leaf(const std::vector<bool>& alive) {
        // the alive choices define one player-2 memoryless strategy
        for (const auto& w : witness.strategies) {
            bool matches = true;
            for (int vtx = 0; vtx < g.num_vertices() && matches; ++vtx) {
                if (g.vertex(vtx).owner != Player::P2) continue;
                matches = alive[w.tau.choice[vtx]];
            }
            if (matches) return lasso_strategy(g, alive, w.basis, w.mixing);
        }
        throw InternalError("no witness matches a fully resolved strategy leaf");
    }
};

}  // namespace

MooreStrategy realizing_strategy(const GameGraph& g, const Polytope& v,
                                 const RealizabilityWitness& witness) {
    Realizer realizer{g, witness};
    MooreStrategy sigma = realizer.build(std::vector<bool>(g.num_edges(), true));

    ProductResult prod = product(g, sigma, Player::P1, true);
    std::vector<Vec> averages;
    for (const SimpleCycle& c : simple_cycles(prod.graph)) averages.push_back(c.average());
    if (!averages.empty() && !contained(Polytope{averages}, v)) {
        throw InternalError("realizing strategy failed the containment check");
    }
    return sigma;
}

MooreStrategy realizing_strategy(const GameGraph& g, const Polytope& v) {
    RealizabilityResult res = is_realizable(g, v);
    if (!res.realizable) {
        throw PreconditionError("realizing_strategy called on a non-realizable input");
    }
    return realizing_strategy(g, v, res.witness);
}

}  // namespace mpexpr
