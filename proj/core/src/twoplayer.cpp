#include "mpexpr/twoplayer.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <thread>

#include "mpexpr/errors.hpp"
#include "mpexpr/geometry.hpp"

namespace mpexpr {

Budget Budget::from_env() {
    Budget b;
    if (const char* s = std::getenv("MPEXPR_BNB_NODES")) b.bnb_nodes = std::atoll(s);
    if (const char* s = std::getenv("MPEXPR_ENUM_STEPS")) b.enum_steps = std::atoll(s);
    return b;
}

NormalFormExpression prepare_expression(const Expression& expr, int k, bool both_finite) {
    return normalize(both_finite ? liminf_only_rewrite(expr) : expr, k);
}

std::vector<Vec> TupleWitness::points() const {
    std::vector<Vec> out;
    out.reserve(parts.size());
    for (const auto& p : parts) out.push_back(p.point);
    return out;
}

namespace {

std::string basis_signature(const CycleMixtureBasis& basis) {
    std::vector<std::string> cols;
    for (const Vec& c : basis.columns) cols.push_back(format_vec(c));
    std::sort(cols.begin(), cols.end());
    std::string out;
    for (auto& s : cols) {
        out += s;
        out += "|";
    }
    return out;
}

std::set<int> basis_edge_set(const CycleMixtureBasis& basis) {
    std::set<int> edges;
    for (const SimpleCycle& c : basis.cycles) edges.insert(c.edges.begin(), c.edges.end());
    return edges;
}

}  // namespace

std::vector<TupleFamily> build_tuple_families(const GameGraph& g, long long enum_budget) {
    std::vector<TupleFamily> families;
    std::set<std::string> seen;
    MemorylessStrategyRange range(g, Player::P2);
    if (range.count() > mpz_class(static_cast<long>(enum_budget))) {
        throw BudgetExceeded("player-2 memoryless strategy space exceeds the enumeration budget",
                             ValueInterval{Rat(0), Rat(0), std::nullopt, {}, "none"});
    }
    MemorylessStrategy tau;
    while (range.next(tau)) {
        Subgraph resolved = resolve_strategy(g, tau, Player::P2);
        std::vector<CycleMixtureBasis> bases;
        for (CycleMixtureBasis& b : reachable_cycle_bases(resolved.graph)) {
            for (SimpleCycle& c : b.cycles) {
                for (int& e : c.edges) e = resolved.edge_to_parent[e];
            }
            bases.push_back(std::move(b));
        }
        if (bases.empty()) {
            throw InternalError("a resolved graph has no reachable cycle");
        }
        std::vector<std::string> sigs;
        for (const auto& b : bases) sigs.push_back(basis_signature(b));
        std::vector<size_t> order(bases.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return sigs[a] < sigs[b]; });
        std::string family_sig;
        for (size_t i : order) family_sig += sigs[i] + "#";
        if (!seen.insert(family_sig).second) continue;

        TupleFamily fam;
        fam.tau = tau;
        fam.bases = std::move(bases);
        std::vector<std::set<int>> edge_sets;
        for (const auto& b : fam.bases) edge_sets.push_back(basis_edge_set(b));
        for (size_t i = 0; i < fam.bases.size(); ++i) {
            bool maximal = true;
            for (size_t j = 0; j < fam.bases.size() && maximal; ++j) {
                if (i == j) continue;
                if (edge_sets[j].size() <= edge_sets[i].size()) continue;
                maximal = !std::includes(edge_sets[j].begin(), edge_sets[j].end(),
                                         edge_sets[i].begin(), edge_sets[i].end());
            }
            if (maximal) fam.maximal.push_back(static_cast<int>(i));
        }
        families.push_back(std::move(fam));
    }
    return families;
}

namespace {

struct BasisData {
    const CycleMixtureBasis* basis = nullptr;
    std::vector<Vec> ext_cols;
    Rat spread;  // max_j |ext_col_j - ext_col_0|_inf
};

// Sub-simplices of a product of standard simplices, stored by vertex lists.
struct Box {
    std::vector<std::vector<Vec>> verts;
};

Vec barycenter(const std::vector<Vec>& verts) {
    Vec c(verts[0].size(), Rat(0));
    for (const Vec& v : verts) c = add(c, v);
    Rat inv = Rat(1) / Rat(static_cast<long>(verts.size()));
    for (Rat& x : c) x *= inv;
    return c;
}

struct EngineMode {
    bool deciding = false;
    Rat nu;
};

constexpr long kSelectionCap = 4096;
constexpr long long kFloorNodeCap = 400;
constexpr int kSweepPoolCap = 400;

class Engine {
public:
    Engine(const GameGraph& g, const NormalFormExpression& nf, const AnalysisOptions& opts)
        : g_(g), nf_(nf), opts_(opts), lipschitz_(nf.lipschitz_bound()) {
        if (opts_.eps < 0) throw InputError("eps must be nonnegative");
        families_ = build_tuple_families(g, opts_.budget.enum_steps);
        data_.resize(families_.size());
        for (size_t f = 0; f < families_.size(); ++f) {
            for (const CycleMixtureBasis& b : families_[f].bases) {
                BasisData d;
                d.basis = &b;
                for (const Vec& col : b.columns) d.ext_cols.push_back(nf.extend(col));
                d.spread = Rat(0);
                for (const Vec& col : d.ext_cols) {
                    d.spread = rat_max(d.spread, linf_dist(col, d.ext_cols[0]));
                }
                data_[f].push_back(std::move(d));
            }
        }
        for (const MaxFreeTerm& term : nf_.terms) term_rows_.push_back(min_of_sums(term));
    }

    ValueInterval value() {
        EngineMode mode;
        run(mode);
        ValueInterval out = snapshot();
        if (!out.witness) {
            throw InternalError("analysis finished without a witness");
        }
        return out;
    }

    Verdict decide(const Rat& nu) {
        EngineMode mode;
        mode.deciding = true;
        mode.nu = nu;
        run(mode);
        Verdict v;
        v.interval = snapshot();
        if (best_value_ && *best_value_ <= nu) {
            v.kind = VerdictKind::Yes;
            v.witness = v.interval.witness;
        } else if (lo_set_ && lo_ > nu) {
            v.kind = VerdictKind::No;
        } else {
            v.kind = VerdictKind::Unknown;
        }
        return v;
    }

private:
    const GameGraph& g_;
    const NormalFormExpression& nf_;
    AnalysisOptions opts_;
    Rat lipschitz_;
    std::vector<TupleFamily> families_;
    std::vector<std::vector<BasisData>> data_;
    std::vector<std::vector<LinearForm>> term_rows_;

    std::vector<std::vector<Rat>> floor_;  // [family][maximal index]
    std::vector<std::vector<TupleCertificate>> floor_cert_;
    Rat global_floor_;
    bool floors_done_ = false;

    Rat lo_;
    bool lo_set_ = false;
    std::optional<Rat> best_value_;
    std::optional<TupleWitness> best_witness_;
    std::vector<ProcessedTuple> processed_;
    std::string method_;

    long long bnb_used_ = 0;
    long long enum_used_ = 0;

    void charge_bnb() {
        if (++bnb_used_ > opts_.budget.bnb_nodes) {
            throw BudgetExceeded("branch-and-bound node budget exceeded", snapshot());
        }
    }
    void charge_enum(long long n = 1) {
        enum_used_ += n;
        if (enum_used_ > opts_.budget.enum_steps) {
            throw BudgetExceeded("enumeration budget exceeded", snapshot());
        }
    }

    ValueInterval snapshot() const {
        ValueInterval out;
        if (lo_set_) {
            out.lo = lo_;
        } else if (floors_done_) {
            out.lo = global_floor_;
        } else if (best_value_) {
            out.lo = *best_value_;
        } else {
            out.lo = Rat(0);
        }
        out.hi = best_value_ ? *best_value_ : out.lo;
        out.witness = best_witness_;
        out.method = method_;
        out.lb_cert.lo = out.lo;
        out.lb_cert.basis_floor = floor_;
        out.lb_cert.basis_floor_cert = floor_cert_;
        out.lb_cert.tuples = processed_;
        return out;
    }

    Rat eval_ext(const std::vector<Vec>& ext_points) {
        charge_enum();
        Rat best;
        bool first = true;
        for (const MaxFreeTerm& term : nf_.terms) {
            Rat v = value_of_term(term, ext_points).value;
            if (first || v > best) {
                best = v;
                first = false;
            }
        }
        return best;
    }

    // f({p}) at a single extended point folds pointwise, no LP needed.
    Rat eval_point(const Vec& ext_point) const {
        Rat best;
        bool first = true;
        for (const auto& rows : term_rows_) {
            Rat tv;
            bool tfirst = true;
            for (const LinearForm& row : rows) {
                Rat s = 0;
                for (auto& [dim, cnt] : row.coeffs) s += Rat(cnt) * ext_point[dim - 1];
                if (tfirst || s < tv) {
                    tv = s;
                    tfirst = false;
                }
            }
            if (first || tv > best) {
                best = tv;
                first = false;
            }
        }
        return best;
    }

    Vec mix_ext(const BasisData& d, const Vec& x) const {
        Vec p(d.ext_cols[0].size(), Rat(0));
        for (size_t c = 0; c < d.ext_cols.size(); ++c) p = add(p, scale(x[c], d.ext_cols[c]));
        return p;
    }

    Vec mix_original(const BasisData& d, const Vec& x) const {
        Vec p(d.basis->columns[0].size(), Rat(0));
        for (size_t c = 0; c < d.basis->columns.size(); ++c) {
            p = add(p, scale(x[c], d.basis->columns[c]));
        }
        return p;
    }

    // Tuple witness: per family a basis (possibly a connected sub-basis) and
    // a strictly positive mixing.
    void offer_witness(const std::vector<CycleMixtureBasis>& bases, const std::vector<Vec>& mixes,
                       const Rat& value) {
        if (best_value_ && value >= *best_value_) return;
        TupleWitness w;
        for (size_t f = 0; f < families_.size(); ++f) {
            RealizabilityWitness::PerStrategy part;
            part.tau = families_[f].tau;
            part.basis = bases[f];
            part.mixing = mixes[f];
            part.point = Vec(g_.dimension(), Rat(0));
            for (size_t c = 0; c < bases[f].columns.size(); ++c) {
                part.point = add(part.point, scale(mixes[f][c], bases[f].columns[c]));
            }
            part.hull_coefficients.assign(families_.size(), Rat(0));
            part.hull_coefficients[f] = 1;
            w.parts.push_back(std::move(part));
        }
        best_value_ = value;
        best_witness_ = std::move(w);
    }

    void offer_witness_indexed(const std::vector<int>& family_basis, const std::vector<Vec>& mixes,
                               const Rat& value) {
        if (best_value_ && value >= *best_value_) return;
        std::vector<CycleMixtureBasis> bases;
        for (size_t f = 0; f < families_.size(); ++f) {
            bases.push_back(*data_[f][family_basis[f]].basis);
        }
        offer_witness(bases, mixes, value);
    }

    bool connected_cycles(const CycleMixtureBasis& basis) const {
        size_t n = basis.cycles.size();
        if (n <= 1) return true;
        std::vector<std::set<int>> verts(n);
        for (size_t i = 0; i < n; ++i) {
            for (int e : basis.cycles[i].edges) {
                verts[i].insert(g_.edge(e).from);
                verts[i].insert(g_.edge(e).to);
            }
        }
        std::vector<bool> seen(n, false);
        std::deque<size_t> queue{0};
        seen[0] = true;
        size_t reached = 1;
        while (!queue.empty()) {
            size_t i = queue.front();
            queue.pop_front();
            for (size_t j = 0; j < n; ++j) {
                if (seen[j]) continue;
                bool share = false;
                for (int v : verts[i]) {
                    if (verts[j].count(v)) {
                        share = true;
                        break;
                    }
                }
                if (share) {
                    seen[j] = true;
                    ++reached;
                    queue.push_back(j);
                }
            }
        }
        return reached == n;
    }

    /// ---- single-basis exact path (selection LPs) -------------------------

    std::vector<std::vector<Vec>> selection_rows(const BasisData& d) const {
        std::vector<std::vector<Vec>> rows(term_rows_.size());
        for (size_t t = 0; t < term_rows_.size(); ++t) {
            for (const LinearForm& row : term_rows_[t]) {
                Vec coef(d.ext_cols.size(), Rat(0));
                for (size_t c = 0; c < d.ext_cols.size(); ++c) {
                    for (auto& [dim, cnt] : row.coeffs) {
                        coef[c] += Rat(cnt) * d.ext_cols[c][dim - 1];
                    }
                }
                rows[t].push_back(std::move(coef));
            }
        }
        return rows;
    }

    static long selection_count(const std::vector<std::vector<Vec>>& rows, long cap) {
        long n = 1;
        for (const auto& r : rows) {
            n *= static_cast<long>(r.size());
            if (n > cap) return cap + 1;
        }
        return n;
    }

    struct SingleOutcome {
        Rat bound;
        TupleCertificate cert;
        std::optional<Vec> witness_mix;
        std::optional<Rat> witness_value;
        std::optional<CycleMixtureBasis> witness_basis;
    };

    std::optional<SingleOutcome> exact_single(int family, int basis) {
        const BasisData& d = data_[family][basis];
        auto rows = selection_rows(d);
        if (selection_count(rows, kSelectionCap) > kSelectionCap) return std::nullopt;
        int t = static_cast<int>(d.ext_cols.size());
        int terms = static_cast<int>(rows.size());

        SingleOutcome out;
        ExactMinCertificate cert;
        Vec best_x;
        bool first = true;
        std::vector<int> pick(terms, 0);
        for (;;) {
            charge_enum();
            // min over the simplex of the max over terms of the selected rows
            LinearProgram lp(t + 1);
            lp.free_var[t] = true;
            lp.objective[t] = -1;
            {
                Vec row(t + 1, Rat(0));
                for (int c = 0; c < t; ++c) row[c] = 1;
                lp.add_row(std::move(row), Rel::Eq, Rat(1));
            }
            for (int T = 0; T < terms; ++T) {
                Vec row(t + 1, Rat(0));
                for (int c = 0; c < t; ++c) row[c] = rows[T][pick[T]][c];
                row[t] = -1;
                lp.add_row(std::move(row), Rel::Le, Rat(0));
            }
            LpResult res = solve_lp(lp);
            if (res.status != LpStatus::Optimal) {
                throw InternalError("selection LP must be solvable");
            }
            Rat val = -res.objective_value;
            {
                // convex term weights whose combined row clears val at every
                // simplex corner; existence is LP duality
                LinearProgram dual(terms);
                dual.add_row(Vec(terms, Rat(1)), Rel::Eq, Rat(1));
                for (int c = 0; c < t; ++c) {
                    Vec row(terms, Rat(0));
                    for (int T = 0; T < terms; ++T) row[T] = rows[T][pick[T]][c];
                    dual.add_row(std::move(row), Rel::Ge, val);
                }
                LpResult dres = solve_lp(dual);
                if (dres.status != LpStatus::Optimal) {
                    throw InternalError("selection bound multipliers must exist");
                }
                SelectionBound sb;
                sb.rows = pick;
                sb.term_weights = dres.solution;
                cert.selections.push_back(std::move(sb));
            }
            if (first || val < out.bound) {
                out.bound = val;
                best_x = Vec(res.solution.begin(), res.solution.begin() + t);
                first = false;
            }
            int i = terms - 1;
            while (i >= 0 && ++pick[i] == static_cast<int>(rows[i].size())) {
                pick[i] = 0;
                --i;
            }
            if (i < 0) break;
        }
        out.cert.bound = out.bound;
        out.cert.data = std::move(cert);

        std::vector<int> support;
        for (int c = 0; c < t; ++c) {
            if (best_x[c] > 0) support.push_back(c);
        }
        if (static_cast<int>(support.size()) == t) {
            out.witness_mix = best_x;
            out.witness_value = out.bound;
            out.witness_basis = *d.basis;
        } else {
            CycleMixtureBasis sub;
            Vec mix;
            for (int c : support) {
                sub.cycles.push_back(d.basis->cycles[c]);
                sub.columns.push_back(d.basis->columns[c]);
                mix.push_back(best_x[c]);
            }
            if (connected_cycles(sub)) {
                // the optimum lives on a boundary face that is itself a basis
                out.witness_mix = mix;
                out.witness_value = out.bound;
                out.witness_basis = std::move(sub);
            } else {
                // unattained boundary optimum; approach it from the interior
                Vec bary(t, Rat(1) / Rat(t));
                Rat theta(1, 4);
                for (int iter = 0; iter < 80; ++iter) {
                    Vec x(t);
                    for (int c = 0; c < t; ++c) {
                        x[c] = (1 - theta) * best_x[c] + theta * bary[c];
                    }
                    Rat v = eval_point(mix_ext(d, x));
                    if (!out.witness_value || v < *out.witness_value) {
                        out.witness_mix = x;
                        out.witness_value = v;
                        out.witness_basis = *d.basis;
                    }
                    if (opts_.eps > 0 && *out.witness_value - out.bound <= opts_.eps) break;
                    theta /= 4;
                }
            }
        }
        return out;
    }

    /// ---- branch and bound -------------------------------------------------

    struct HeapEntry {
        Rat bound;
        int node;
        bool operator<(const HeapEntry& other) const {
            if (bound != other.bound) return bound > other.bound;
            return node > other.node;
        }
    };

    struct BnbOutcome {
        Rat bound;
        TupleCertificate cert;
        bool early_yes = false;
    };

    // Branch and bound over the product of the chosen bases' simplices.
    // `components` lists (family, basis) pairs; when it covers all families
    // the box centers are offered as global witnesses.
    BnbOutcome bnb(const std::vector<std::pair<int, int>>& components, const EngineMode& mode,
                   long long node_cap) {
        size_t m = components.size();
        bool full_tuple = m == families_.size();
        std::vector<const BasisData*> comp(m);
        for (size_t i = 0; i < m; ++i) comp[i] = &data_[components[i].first][components[i].second];

        BnbCertificate tree;
        std::vector<Box> boxes;
        std::priority_queue<HeapEntry> heap;
        std::optional<Rat> local_best;

        auto eval_box = [&](const Box& box) -> Rat {
            std::vector<Vec> centers(m), pts(m);
            for (size_t i = 0; i < m; ++i) {
                centers[i] = barycenter(box.verts[i]);
                pts[i] = mix_ext(*comp[i], centers[i]);
            }
            Rat value = eval_ext(pts);
            if (!local_best || value < *local_best) local_best = value;
            if (full_tuple) {
                std::vector<int> fb(m);
                for (size_t i = 0; i < m; ++i) fb[i] = components[i].second;
                offer_witness_indexed(fb, centers, value);
            }
            Rat penalty = 0;
            for (size_t i = 0; i < m; ++i) {
                Rat radius = 0;
                for (const Vec& v : box.verts[i]) {
                    radius = rat_max(radius, l1_dist(v, centers[i]));
                }
                penalty = rat_max(penalty, comp[i]->spread * radius);
            }
            return value - lipschitz_ * penalty;
        };

        Box root;
        root.verts.resize(m);
        for (size_t i = 0; i < m; ++i) {
            int t = static_cast<int>(comp[i]->ext_cols.size());
            for (int c = 0; c < t; ++c) {
                Vec corner(t, Rat(0));
                corner[c] = 1;
                root.verts[i].push_back(std::move(corner));
            }
        }
        boxes.push_back(root);
        tree.nodes.push_back(BnbNodeRec{});
        heap.push(HeapEntry{eval_box(boxes[0]), 0});

        Rat gap_target = opts_.eps > 0 ? opts_.eps : Rat(1, 1024);
        long long local_nodes = 0;
        BnbOutcome out;
        for (;;) {
            HeapEntry top = heap.top();
            out.bound = top.bound;
            Rat reference = *local_best;
            if (best_value_ && *best_value_ < reference) reference = *best_value_;
            if (mode.deciding && full_tuple && best_value_ && *best_value_ <= mode.nu) {
                out.early_yes = true;
                break;
            }
            if (mode.deciding && top.bound > mode.nu) break;
            if (reference - top.bound <= gap_target) break;
            if (node_cap > 0 && local_nodes >= node_cap) break;
            heap.pop();
            charge_bnb();
            ++local_nodes;

            const Box& box = boxes[top.node];
            int split_i = -1, va = -1, vb = -1;
            Rat best_w(-1);
            for (size_t i = 0; i < m; ++i) {
                const auto& vs = box.verts[i];
                for (size_t a = 0; a < vs.size(); ++a) {
                    for (size_t b = a + 1; b < vs.size(); ++b) {
                        Rat w = comp[i]->spread * l1_dist(vs[a], vs[b]);
                        if (w > best_w) {
                            best_w = w;
                            split_i = static_cast<int>(i);
                            va = static_cast<int>(a);
                            vb = static_cast<int>(b);
                        }
                    }
                }
            }
            if (best_w <= 0) break;  // a point box: the bound is already exact

            Vec mid = scale(Rat(1, 2), add(box.verts[split_i][va], box.verts[split_i][vb]));
            Box child_a = box, child_b = box;
            child_a.verts[split_i][va] = mid;
            child_b.verts[split_i][vb] = mid;
            int ia = static_cast<int>(boxes.size());
            boxes.push_back(std::move(child_a));
            tree.nodes.push_back(BnbNodeRec{});
            int ib = static_cast<int>(boxes.size());
            boxes.push_back(std::move(child_b));
            tree.nodes.push_back(BnbNodeRec{});
            tree.nodes[top.node] = BnbNodeRec{false, split_i, va, vb, ia, ib};
            heap.push(HeapEntry{rat_max(eval_box(boxes[ia]), top.bound), ia});
            heap.push(HeapEntry{rat_max(eval_box(boxes[ib]), top.bound), ib});
        }
        out.cert.bound = out.bound;
        out.cert.data = std::move(tree);
        return out;
    }

    /// ---- floors -----------------------------------------------------------

    void compute_floors(const EngineMode& mode) {
        size_t m = families_.size();
        floor_.assign(m, {});
        floor_cert_.assign(m, {});
        for (size_t f = 0; f < m; ++f) {
            floor_[f].resize(families_[f].maximal.size());
            floor_cert_[f].resize(families_[f].maximal.size());
        }
        bool single = m == 1;
        for (size_t f = 0; f < m; ++f) {
            for (size_t bi = 0; bi < families_[f].maximal.size(); ++bi) {
                int basis = families_[f].maximal[bi];
                if (auto exact = exact_single(static_cast<int>(f), basis)) {
                    if (method_.find("exact-lp") == std::string::npos) method_ += "exact-lp;";
                    floor_[f][bi] = exact->bound;
                    floor_cert_[f][bi] = exact->cert;
                    if (single && exact->witness_value) {
                        offer_witness({*exact->witness_basis}, {*exact->witness_mix},
                                      *exact->witness_value);
                    }
                } else {
                    if (method_.find("branch-and-bound") == std::string::npos) {
                        method_ += "branch-and-bound;";
                    }
                    BnbOutcome r = bnb({{static_cast<int>(f), basis}}, mode,
                                       single ? 0 : kFloorNodeCap);
                    floor_[f][bi] = r.bound;
                    floor_cert_[f][bi] = r.cert;
                }
            }
        }
        global_floor_ = floor_[0][0];
        for (size_t f = 0; f < m; ++f) {
            Rat fam_min = floor_[f][0];
            for (const Rat& b : floor_[f]) fam_min = rat_min(fam_min, b);
            if (f == 0) {
                global_floor_ = fam_min;
            } else {
                global_floor_ = rat_max(global_floor_, fam_min);
            }
        }
        floors_done_ = true;
    }

    /// ---- witness sweep (threshold mode) ------------------------------------

    void sweep_for_witness(const Rat& nu, int dmax) {
        size_t m = families_.size();
        struct Candidate {
            const CycleMixtureBasis* basis;
            Vec mixing;
            Vec point_ext;
        };
        std::vector<std::vector<Candidate>> pools(m);
        for (size_t f = 0; f < m; ++f) {
            for (size_t b = 0; b < families_[f].bases.size(); ++b) {
                const BasisData& d = data_[f][b];
                int t = static_cast<int>(d.ext_cols.size());
                int hi_den = t == 1 ? 1 : dmax;
                for (int den = t; den <= hi_den; ++den) {
                    std::vector<int> parts(t, 1);
                    std::function<void(int, int)> emit = [&](int idx, int left) {
                        if (static_cast<int>(pools[f].size()) >= kSweepPoolCap) return;
                        if (idx == t - 1) {
                            parts[idx] = 1 + left;
                            Vec x(t);
                            for (int c = 0; c < t; ++c) x[c] = Rat(parts[c], den);
                            charge_enum();
                            Vec p = mix_ext(d, x);
                            if (eval_point(p) <= nu) {
                                pools[f].push_back(Candidate{d.basis, std::move(x), std::move(p)});
                            }
                            return;
                        }
                        for (int take = 0; take <= left; ++take) {
                            parts[idx] = 1 + take;
                            emit(idx + 1, left - take);
                        }
                    };
                    emit(0, den - t);
                }
            }
            if (pools[f].empty()) return;
        }
        std::vector<size_t> pick(m, 0);
        for (;;) {
            std::vector<Vec> pts(m);
            for (size_t f = 0; f < m; ++f) pts[f] = pools[f][pick[f]].point_ext;
            Rat value = eval_ext(pts);
            if (value <= nu) {
                std::vector<CycleMixtureBasis> bases;
                std::vector<Vec> mixes;
                for (size_t f = 0; f < m; ++f) {
                    bases.push_back(*pools[f][pick[f]].basis);
                    mixes.push_back(pools[f][pick[f]].mixing);
                }
                offer_witness(bases, mixes, value);
                return;
            }
            size_t i = m;
            for (;;) {
                if (i == 0) return;
                --i;
                if (++pick[i] < pools[i].size()) break;
                pick[i] = 0;
            }
        }
    }

    /// ---- main loop ----------------------------------------------------------

    void run(const EngineMode& mode) {
        compute_floors(mode);
        size_t m = families_.size();

        if (m == 1) {
            Rat lo = floor_[0][0];
            for (const Rat& f : floor_[0]) lo = rat_min(lo, f);
            lo_ = lo;
            lo_set_ = true;
            for (size_t bi = 0; bi < floor_[0].size(); ++bi) {
                ProcessedTuple pt;
                pt.choice = {families_[0].maximal[bi]};
                pt.cert = floor_cert_[0][bi];
                processed_.push_back(std::move(pt));
            }
            if (mode.deciding && (!best_value_ || *best_value_ > mode.nu) && lo_ <= mode.nu) {
                sweep_for_witness(mode.nu, 10);
            }
            return;
        }

        method_ += "tuple-enumeration;";
        Rat lo;
        bool lo_init = false;
        auto note_bound = [&](const Rat& b) {
            if (!lo_init || b < lo) {
                lo = b;
                lo_init = true;
            }
        };
        auto components_of = [&](const std::vector<int>& choice) {
            std::vector<std::pair<int, int>> comps(m);
            for (size_t f = 0; f < m; ++f) comps[f] = {static_cast<int>(f), choice[f]};
            return comps;
        };

        // seed with the per-family floor argmin, then enumerate with pruning
        std::vector<int> diagonal(m);
        for (size_t f = 0; f < m; ++f) {
            size_t best = 0;
            for (size_t bi = 1; bi < floor_[f].size(); ++bi) {
                if (floor_[f][bi] < floor_[f][best]) best = bi;
            }
            diagonal[f] = families_[f].maximal[best];
        }
        {
            BnbOutcome r = bnb(components_of(diagonal), mode, 0);
            processed_.push_back(ProcessedTuple{diagonal, r.cert});
            note_bound(r.bound);
            if (r.early_yes) {
                lo_ = global_floor_;
                lo_set_ = true;
                return;
            }
        }

        bool yes_found = false;
        std::vector<int> choice(m, 0);
        std::function<void(size_t, Rat, bool)> enumerate = [&](size_t f, Rat partial,
                                                               bool has_partial) {
            if (yes_found) return;
            if (f == m) {
                if (choice == diagonal) return;
                BnbOutcome r = bnb(components_of(choice), mode, 0);
                processed_.push_back(ProcessedTuple{choice, r.cert});
                note_bound(r.bound);
                if (r.early_yes) yes_found = true;
                return;
            }
            for (size_t bi = 0; bi < families_[f].maximal.size(); ++bi) {
                Rat next = has_partial ? rat_max(partial, floor_[f][bi]) : floor_[f][bi];
                bool prune;
                if (mode.deciding) {
                    prune = next > mode.nu;
                } else {
                    prune = best_value_ && next >= *best_value_ - opts_.eps;
                }
                if (prune) {
                    note_bound(next);
                    continue;
                }
                choice[f] = families_[f].maximal[bi];
                enumerate(f + 1, next, true);
                if (yes_found) return;
            }
        };
        enumerate(0, Rat(0), false);
        if (yes_found) {
            lo_ = global_floor_;
            lo_set_ = true;
            return;
        }
        lo_ = lo;
        lo_set_ = true;

        if (mode.deciding && (!best_value_ || *best_value_ > mode.nu) && lo_ <= mode.nu) {
            sweep_for_witness(mode.nu, 8);
        }
    }
};

}  // namespace

ValueInterval inf_value(const GameGraph& g, const NormalFormExpression& nf,
                        const AnalysisOptions& opts) {
    if (opts.eps <= 0) throw InputError("inf_value needs eps > 0");
    Engine engine(g, nf, opts);
    return engine.value();
}

Verdict decide(const GameGraph& g, const NormalFormExpression& nf, const Rat& nu,
               const AnalysisOptions& opts) {
    Engine engine(g, nf, opts);
    return engine.decide(nu);
}

Rat eval_strategy(const GameGraph& g, const MooreStrategy& sigma,
                  const NormalFormExpression& nf) {
    ProductResult prod = product(g, sigma, Player::P1, true);
    return solve(prod.graph, nf, Player::P2).value;
}

namespace {

// Lifts a strategy built on a subgraph to the parent graph. Foreign edges
// freeze the memory and foreign vertices get no move; the region assembly
// fills those gaps.
MooreStrategy lift_strategy(const MooreStrategy& s, const Subgraph& sub, const GameGraph& g) {
    std::vector<int> sub_vertex(g.num_vertices(), -1);
    for (size_t v = 0; v < sub.vertex_to_parent.size(); ++v) {
        sub_vertex[sub.vertex_to_parent[v]] = static_cast<int>(v);
    }
    std::vector<int> sub_edge(g.num_edges(), -1);
    for (size_t e = 0; e < sub.edge_to_parent.size(); ++e) {
        sub_edge[sub.edge_to_parent[e]] = static_cast<int>(e);
    }
    MooreStrategy out;
    out.memory_count = s.memory_count;
    out.initial_memory = s.initial_memory;
    out.update.assign(s.memory_count, std::vector<int>(g.num_edges()));
    out.next.assign(s.memory_count, std::vector<int>(g.num_vertices(), -1));
    for (int m = 0; m < s.memory_count; ++m) {
        for (int e = 0; e < g.num_edges(); ++e) {
            out.update[m][e] = sub_edge[e] >= 0 ? s.update[m][sub_edge[e]] : m;
        }
        for (int v = 0; v < g.num_vertices(); ++v) {
            if (sub_vertex[v] >= 0) {
                int se = s.next[m][sub_vertex[v]];
                if (se >= 0) out.next[m][v] = sub.edge_to_parent[se];
            }
        }
    }
    return out;
}

struct Region {
    std::vector<int> vertices;   // parent indices
    int target = -1;             // parent index
    MemorylessStrategy attract;  // parent edge ids at P1 vertices
    MooreStrategy sigma;         // lifted to the parent graph
};

// One Moore machine covering every winning region: reach the region's target,
// then follow its realizing strategy; when the opponent escapes into an
// earlier region, restart that region's machinery. Region indices strictly
// decrease along escapes, so every play eventually obeys a single strategy.
MooreStrategy assemble_region_machine(const GameGraph& g, const std::vector<Region>& regions,
                                      const std::vector<int>& region_of) {
    std::vector<int> offset(regions.size());
    int total = 0;
    for (size_t r = 0; r < regions.size(); ++r) {
        offset[r] = total;
        total += 1 + regions[r].sigma.memory_count;
    }
    auto attract_state = [&](int r) { return offset[r]; };
    auto sigma_state = [&](int r, int m) { return offset[r] + 1 + m; };
    auto round_of = [&](int v) {
        return region_of[v] >= 0 ? region_of[v] : static_cast<int>(regions.size());
    };
    auto enter = [&](int target_vertex) {
        int r = region_of[target_vertex];
        if (regions[r].target == target_vertex) {
            return sigma_state(r, regions[r].sigma.initial_memory);
        }
        return attract_state(r);
    };

    MooreStrategy out;
    out.memory_count = total;
    out.initial_memory = 0;
    out.update.assign(total, std::vector<int>(g.num_edges(), 0));
    out.next.assign(total, std::vector<int>(g.num_vertices(), -1));

    std::vector<int> default_edge(g.num_vertices());
    for (int v = 0; v < g.num_vertices(); ++v) default_edge[v] = g.out_edges(v)[0];

    for (size_t r = 0; r < regions.size(); ++r) {
        const Region& region = regions[r];
        int ri = static_cast<int>(r);
        // attract phase
        {
            int st = attract_state(ri);
            for (int e = 0; e < g.num_edges(); ++e) {
                int t = g.edge(e).to;
                if (round_of(t) >= ri) {
                    out.update[st][e] = (t == region.target)
                                            ? sigma_state(ri, region.sigma.initial_memory)
                                            : st;
                } else {
                    out.update[st][e] = enter(t);
                }
            }
            for (int v = 0; v < g.num_vertices(); ++v) {
                if (v == region.target) {
                    int move = region.sigma.next[region.sigma.initial_memory][v];
                    out.next[st][v] = move >= 0 ? move : default_edge[v];
                } else if (region.attract.choice.size() > static_cast<size_t>(v) &&
                           region.attract.choice[v] >= 0) {
                    out.next[st][v] = region.attract.choice[v];
                } else {
                    out.next[st][v] = default_edge[v];
                }
            }
        }
        // strategy phase
        for (int m = 0; m < region.sigma.memory_count; ++m) {
            int st = sigma_state(ri, m);
            for (int e = 0; e < g.num_edges(); ++e) {
                int t = g.edge(e).to;
                if (round_of(t) >= ri) {
                    out.update[st][e] = sigma_state(ri, region.sigma.update[m][e]);
                } else {
                    out.update[st][e] = enter(t);
                }
            }
            for (int v = 0; v < g.num_vertices(); ++v) {
                int move = region.sigma.next[m][v];
                out.next[st][v] = move >= 0 ? move : default_edge[v];
            }
        }
    }
    return out;
}

}  // namespace

WinningRegionResult winning_region(const GameGraph& g, const NormalFormExpression& nf,
                                   const Rat& nu, const AnalysisOptions& opts) {
    int n = g.num_vertices();
    WinningRegionResult out;
    out.verdicts.assign(n, VerdictKind::Unknown);
    out.intervals.assign(n, std::nullopt);
    out.region_of.assign(n, -1);
    out.strategies.assign(n, std::nullopt);

    std::vector<Region> regions;
    std::vector<bool> alive(n, true);
    int alive_count = n;

    while (alive_count > 0) {
        std::vector<bool> drop(n);
        int first_alive = -1;
        for (int v = 0; v < n; ++v) {
            drop[v] = !alive[v];
            if (alive[v] && first_alive < 0) first_alive = v;
        }
        Subgraph sub = remove_vertices(g, drop, first_alive);
        bool found = false;
        std::vector<std::optional<Verdict>> round(sub.graph.num_vertices());
        for (int sv = 0; sv < sub.graph.num_vertices(); ++sv) {
            GameGraph from_sv = sub.graph.with_initial(sv);
            Verdict verdict = decide(from_sv, nf, nu, opts);
            int gv = sub.vertex_to_parent[sv];
            out.intervals[gv] = verdict.interval;
            round[sv] = verdict;
            if (verdict.kind != VerdictKind::Yes) continue;

            Polytope hull{verdict.witness->points()};
            RealizabilityResult rr = is_realizable(from_sv, hull);
            if (!rr.realizable) {
                throw InternalError("threshold witness is not realizable");
            }
            MooreStrategy sigma_sub = realizing_strategy(from_sv, hull, rr.witness);

            std::vector<bool> target(sub.graph.num_vertices(), false);
            target[sv] = true;
            auto [att, att_strat] = attractor(sub.graph, Player::P1, target);

            Region region;
            region.target = gv;
            region.sigma = lift_strategy(sigma_sub, sub, g);
            region.attract.choice.assign(n, -1);
            for (int u = 0; u < sub.graph.num_vertices(); ++u) {
                if (att_strat.choice[u] >= 0) {
                    region.attract.choice[sub.vertex_to_parent[u]] =
                        sub.edge_to_parent[att_strat.choice[u]];
                }
                if (att[u]) region.vertices.push_back(sub.vertex_to_parent[u]);
            }
            for (int pv : region.vertices) {
                alive[pv] = false;
                --alive_count;
                out.verdicts[pv] = VerdictKind::Yes;
                out.region_of[pv] = static_cast<int>(regions.size());
            }
            regions.push_back(std::move(region));
            found = true;
            break;
        }
        if (!found) {
            for (int sv = 0; sv < sub.graph.num_vertices(); ++sv) {
                int gv = sub.vertex_to_parent[sv];
                const Verdict& v = *round[sv];
                out.verdicts[gv] =
                    v.kind == VerdictKind::No ? VerdictKind::No : VerdictKind::Unknown;
            }
            break;
        }
    }

    if (!regions.empty()) {
        MooreStrategy machine = assemble_region_machine(g, regions, out.region_of);
        for (int v = 0; v < n; ++v) {
            if (out.region_of[v] < 0) continue;
            int r = out.region_of[v];
            int initial;
            if (regions[r].target == v) {
                int off = 0;
                for (int i = 0; i < r; ++i) off += 1 + regions[i].sigma.memory_count;
                initial = off + 1 + regions[r].sigma.initial_memory;
            } else {
                int off = 0;
                for (int i = 0; i < r; ++i) off += 1 + regions[i].sigma.memory_count;
                initial = off;
            }
            out.strategies[v] = machine.with_initial_memory(initial);
        }
    }
    return out;
}

std::vector<ValueInterval> value_region(const GameGraph& g, const NormalFormExpression& nf,
                                        const AnalysisOptions& opts, bool tie_break_largest_id) {
    int n = g.num_vertices();
    std::vector<std::optional<ValueInterval>> out(n);
    std::vector<bool> alive(n, true);
    int alive_count = n;
    std::optional<ValueInterval> lower;

    while (alive_count > 0) {
        std::vector<bool> drop(n);
        int first_alive = -1;
        for (int v = 0; v < n; ++v) {
            drop[v] = !alive[v];
            if (alive[v] && first_alive < 0) first_alive = v;
        }
        Subgraph sub = remove_vertices(g, drop, first_alive);
        std::vector<ValueInterval> ivs;
        ivs.reserve(sub.graph.num_vertices());
        for (int sv = 0; sv < sub.graph.num_vertices(); ++sv) {
            ValueInterval iv = inf_value(sub.graph.with_initial(sv), nf, opts);
            if (lower) {
                // threading the bound: assigned values never decrease
                Rat new_lo = rat_max(iv.lo, lower->lo);
                Rat new_hi = rat_max(iv.hi, lower->hi);
                if (new_hi != iv.hi) iv.witness.reset();
                iv.lo = new_lo;
                iv.hi = new_hi;
            }
            ivs.push_back(std::move(iv));
        }
        int u = 0;
        for (int sv = 1; sv < sub.graph.num_vertices(); ++sv) {
            bool better = false;
            if (ivs[sv].hi != ivs[u].hi) {
                better = ivs[sv].hi < ivs[u].hi;
            } else if (ivs[sv].lo != ivs[u].lo) {
                better = ivs[sv].lo < ivs[u].lo;
            } else if (tie_break_largest_id) {
                better = true;  // later vertex wins ties
            }
            if (better) u = sv;
        }
        std::vector<bool> target(sub.graph.num_vertices(), false);
        target[u] = true;
        auto [att, att_strat] = attractor(sub.graph, Player::P1, target);
        for (int sv = 0; sv < sub.graph.num_vertices(); ++sv) {
            if (!att[sv]) continue;
            int gv = sub.vertex_to_parent[sv];
            out[gv] = ivs[u];
            alive[gv] = false;
            --alive_count;
        }
        lower = ivs[u];
    }
    std::vector<ValueInterval> result;
    result.reserve(n);
    for (int v = 0; v < n; ++v) result.push_back(*out[v]);
    return result;
}

MooreStrategy epsilon_optimal_strategy(const GameGraph& g, const NormalFormExpression& nf,
                                       const AnalysisOptions& opts) {
    if (opts.eps < 0) throw InputError("eps must be nonnegative");
    AnalysisOptions iopts = opts;
    if (iopts.eps == 0) iopts.eps = Rat(1, 1 << 20);
    ValueInterval iv = inf_value(g, nf, iopts);
    try {
        Polytope hull{iv.witness->points()};
        RealizabilityResult rr = is_realizable(g, hull);
        if (!rr.realizable) {
            throw InternalError("inf_value witness is not realizable");
        }
        MooreStrategy sigma = realizing_strategy(g, hull, rr.witness);
        Rat value = eval_strategy(g, sigma, nf);
        if (value > iv.hi + opts.eps) {
            throw InternalError("synthesized strategy misses its bound");
        }
        return sigma;
    } catch (const InputError&) {
        // the pumped walk was not materializable; enumerate plain strategies
        MemorylessStrategyRange range(g, Player::P1);
        MemorylessStrategy s;
        long long steps = 0;
        while (range.next(s)) {
            if (++steps > opts.budget.enum_steps) break;
            MooreStrategy sigma = MooreStrategy::from_memoryless(g, s);
            if (eval_strategy(g, sigma, nf) <= iv.hi + opts.eps) return sigma;
        }
        throw BudgetExceeded("strategy enumeration fallback exhausted", iv);
    }
}

/// ---- certificate verification ---------------------------------------------

namespace {

struct VerifierBasis {
    std::vector<Vec> ext_cols;
    Rat spread;
};

struct Verifier {
    const GameGraph& g;
    const NormalFormExpression& nf;
    std::vector<TupleFamily> families;
    std::vector<std::vector<VerifierBasis>> data;
    std::vector<std::vector<LinearForm>> term_rows;
    Rat lipschitz;

    Verifier(const GameGraph& graph, const NormalFormExpression& expr)
        : g(graph), nf(expr), lipschitz(expr.lipschitz_bound()) {
        families = build_tuple_families(graph, std::numeric_limits<long long>::max());
        data.resize(families.size());
        for (size_t f = 0; f < families.size(); ++f) {
            for (const CycleMixtureBasis& b : families[f].bases) {
                VerifierBasis vb;
                for (const Vec& col : b.columns) vb.ext_cols.push_back(nf.extend(col));
                vb.spread = Rat(0);
                for (const Vec& col : vb.ext_cols) {
                    vb.spread = rat_max(vb.spread, linf_dist(col, vb.ext_cols[0]));
                }
                data[f].push_back(std::move(vb));
            }
        }
        for (const MaxFreeTerm& term : nf.terms) term_rows.push_back(min_of_sums(term));
    }

    Rat eval_ext(const std::vector<Vec>& pts) const {
        Rat best;
        bool first = true;
        for (const MaxFreeTerm& term : nf.terms) {
            Rat v = value_of_term(term, pts).value;
            if (first || v > best) {
                best = v;
                first = false;
            }
        }
        return best;
    }

    bool verify_exact(const std::vector<std::pair<int, int>>& comps,
                      const ExactMinCertificate& cert, const Rat& bound) const {
        if (comps.size() != 1) return false;
        const VerifierBasis& d = data[comps[0].first][comps[0].second];
        size_t t = d.ext_cols.size();
        // row coefficient vectors per term over the basis corners
        std::vector<std::vector<Vec>> rows(term_rows.size());
        for (size_t T = 0; T < term_rows.size(); ++T) {
            for (const LinearForm& row : term_rows[T]) {
                Vec coef(t, Rat(0));
                for (size_t c = 0; c < t; ++c) {
                    for (auto& [dim, cnt] : row.coeffs) {
                        coef[c] += Rat(cnt) * d.ext_cols[c][dim - 1];
                    }
                }
                rows[T].push_back(std::move(coef));
            }
        }
        std::map<std::vector<int>, const SelectionBound*> by_rows;
        for (const SelectionBound& sb : cert.selections) by_rows[sb.rows] = &sb;
        std::vector<int> pick(rows.size(), 0);
        for (;;) {
            auto it = by_rows.find(pick);
            if (it == by_rows.end()) return false;
            const SelectionBound& sb = *it->second;
            if (sb.term_weights.size() != rows.size()) return false;
            Rat sum = 0;
            for (const Rat& w : sb.term_weights) {
                if (w < 0) return false;
                sum += w;
            }
            if (sum != 1) return false;
            for (size_t c = 0; c < t; ++c) {
                Rat combined = 0;
                for (size_t T = 0; T < rows.size(); ++T) {
                    combined += sb.term_weights[T] * rows[T][pick[T]][c];
                }
                if (combined < bound) return false;
            }
            int i = static_cast<int>(rows.size()) - 1;
            while (i >= 0 && ++pick[i] == static_cast<int>(rows[i].size())) {
                pick[i] = 0;
                --i;
            }
            if (i < 0) break;
        }
        return true;
    }

    bool verify_bnb(const std::vector<std::pair<int, int>>& comps, const BnbCertificate& cert,
                    const Rat& bound) const {
        if (cert.nodes.empty()) return false;
        size_t m = comps.size();
        std::vector<const VerifierBasis*> comp(m);
        for (size_t i = 0; i < m; ++i) comp[i] = &data[comps[i].first][comps[i].second];

        Box root;
        root.verts.resize(m);
        for (size_t i = 0; i < m; ++i) {
            size_t t = comp[i]->ext_cols.size();
            for (size_t c = 0; c < t; ++c) {
                Vec corner(t, Rat(0));
                corner[c] = 1;
                root.verts[i].push_back(std::move(corner));
            }
        }
        auto local_bound = [&](const Box& box) -> Rat {
            std::vector<Vec> pts(m);
            std::vector<Vec> centers(m);
            for (size_t i = 0; i < m; ++i) {
                centers[i] = barycenter(box.verts[i]);
                Vec p(comp[i]->ext_cols[0].size(), Rat(0));
                for (size_t c = 0; c < comp[i]->ext_cols.size(); ++c) {
                    p = add(p, scale(centers[i][c], comp[i]->ext_cols[c]));
                }
                pts[i] = std::move(p);
            }
            Rat value = eval_ext(pts);
            Rat penalty = 0;
            for (size_t i = 0; i < m; ++i) {
                Rat radius = 0;
                for (const Vec& v : box.verts[i]) {
                    radius = rat_max(radius, l1_dist(v, centers[i]));
                }
                penalty = rat_max(penalty, comp[i]->spread * radius);
            }
            return value - lipschitz * penalty;
        };

        bool ok = true;
        std::optional<Rat> min_leaf;
        std::function<void(int, const Box&, const Rat&)> walk = [&](int node_id, const Box& box,
                                                                    const Rat& inherited) {
            if (!ok || node_id < 0 || node_id >= static_cast<int>(cert.nodes.size())) {
                ok = false;
                return;
            }
            const BnbNodeRec& node = cert.nodes[node_id];
            Rat effective = rat_max(local_bound(box), inherited);
            if (node.leaf) {
                if (!min_leaf || effective < *min_leaf) min_leaf = effective;
                return;
            }
            if (node.component < 0 || node.component >= static_cast<int>(m)) {
                ok = false;
                return;
            }
            const auto& vs = box.verts[node.component];
            if (node.va < 0 || node.vb < 0 || node.va >= static_cast<int>(vs.size()) ||
                node.vb >= static_cast<int>(vs.size()) || node.va == node.vb) {
                ok = false;
                return;
            }
            Vec mid = scale(Rat(1, 2), add(vs[node.va], vs[node.vb]));
            Box child_a = box, child_b = box;
            child_a.verts[node.component][node.va] = mid;
            child_b.verts[node.component][node.vb] = mid;
            walk(node.child_a, child_a, effective);
            walk(node.child_b, child_b, effective);
        };
        Rat very_low = local_bound(root) - 1;
        walk(0, root, very_low);
        return ok && min_leaf && *min_leaf >= bound;
    }

    bool verify_tuple(const std::vector<std::pair<int, int>>& comps,
                      const TupleCertificate& cert) const {
        if (std::holds_alternative<ExactMinCertificate>(cert.data)) {
            return verify_exact(comps, std::get<ExactMinCertificate>(cert.data), cert.bound);
        }
        return verify_bnb(comps, std::get<BnbCertificate>(cert.data), cert.bound);
    }
};

}  // namespace

bool verify_lower_bound_certificate(const GameGraph& g, const NormalFormExpression& nf,
                                    const LowerBoundCertificate& cert) {
    Verifier ctx(g, nf);
    size_t m = ctx.families.size();
    if (cert.basis_floor.size() != m || cert.basis_floor_cert.size() != m) return false;
    for (size_t f = 0; f < m; ++f) {
        if (cert.basis_floor[f].size() != ctx.families[f].maximal.size()) return false;
        if (cert.basis_floor_cert[f].size() != ctx.families[f].maximal.size()) return false;
        for (size_t bi = 0; bi < cert.basis_floor[f].size(); ++bi) {
            const TupleCertificate& tc = cert.basis_floor_cert[f][bi];
            if (cert.basis_floor[f][bi] > tc.bound) return false;
            std::vector<std::pair<int, int>> comps{
                {static_cast<int>(f), ctx.families[f].maximal[bi]}};
            if (!ctx.verify_tuple(comps, tc)) return false;
        }
    }
    // explicit tuples
    std::map<std::vector<int>, Rat> tuple_bound;
    for (const ProcessedTuple& pt : cert.tuples) {
        if (pt.choice.size() != m) return false;
        std::vector<std::pair<int, int>> comps(m);
        for (size_t f = 0; f < m; ++f) {
            if (pt.choice[f] < 0 ||
                pt.choice[f] >= static_cast<int>(ctx.families[f].bases.size())) {
                return false;
            }
            comps[f] = {static_cast<int>(f), pt.choice[f]};
        }
        if (!ctx.verify_tuple(comps, pt.cert)) return false;
        auto it = tuple_bound.find(pt.choice);
        if (it == tuple_bound.end() || it->second < pt.cert.bound) {
            tuple_bound[pt.choice] = pt.cert.bound;
        }
    }
    // coverage: every maximal tuple is either floored above lo or listed
    bool covered = true;
    std::vector<int> choice(m, 0);
    std::function<void(size_t, Rat, bool)> cover = [&](size_t f, Rat partial, bool has_partial) {
        if (!covered) return;
        if (has_partial && partial >= cert.lo) return;  // whole subtree cleared by floors
        if (f == m) {
            auto it = tuple_bound.find(choice);
            if (it == tuple_bound.end() || it->second < cert.lo) covered = false;
            return;
        }
        for (size_t bi = 0; bi < ctx.families[f].maximal.size(); ++bi) {
            Rat next = has_partial ? rat_max(partial, cert.basis_floor[f][bi])
                                   : cert.basis_floor[f][bi];
            choice[f] = ctx.families[f].maximal[bi];
            cover(f + 1, next, true);
            if (!covered) return;
        }
    };
    cover(0, Rat(0), false);
    return covered;
}

}  // namespace mpexpr
