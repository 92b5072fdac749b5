#include "mpexpr/reduction.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mpexpr/errors.hpp"

namespace mpexpr {

using nlohmann::json;

void ConstraintSystem5::validate() const {
    if (n < 1) throw InputError("constraint system needs at least one variable");
    for (const auto& row : q_rows) {
        if (static_cast<int>(row.size()) != n) throw InputError("q row width differs from n");
    }
    for (const auto& row : p_rows) {
        if (static_cast<int>(row.size()) != n) throw InputError("p row width differs from n");
    }
    for (const auto& b : bilinear) {
        for (int idx : b) {
            if (idx < 1 || idx > n) throw InputError("bilinear index out of range");
        }
    }
}

bool ConstraintSystem5::satisfied_by(const std::vector<Rat>& q, const std::vector<Rat>& p) const {
    if (static_cast<int>(q.size()) != n || static_cast<int>(p.size()) != n) return false;
    for (const Rat& v : q)
        if (v <= 0) return false;
    for (const Rat& v : p)
        if (v <= 0) return false;
    for (const auto& row : q_rows) {
        Rat s = 0;
        for (int i = 0; i < n; ++i) s += row[i] * q[i];
        if (s > 0) return false;
    }
    for (const auto& row : p_rows) {
        Rat s = 0;
        for (int i = 0; i < n; ++i) s += row[i] * p[i];
        if (s > 0) return false;
    }
    for (const auto& b : bilinear) {
        if (q[b[0] - 1] * p[b[1] - 1] != q[b[2] - 1] * p[b[3] - 1]) return false;
    }
    return true;
}

namespace {

std::vector<std::vector<Rat>> parse_rows(const json& rows, int n, const char* side) {
    std::vector<std::vector<Rat>> out;
    for (const auto& jrow : rows) {
        std::vector<Rat> row(n, Rat(0));
        for (const auto& entry : jrow) {
            if (!entry.is_array() || entry.size() != 2) {
                throw InputError(std::string(side) + " row entries must be [coeff, index] pairs");
            }
            Rat coeff = entry[0].is_string() ? parse_rational(entry[0].get<std::string>())
                                             : Rat(static_cast<long>(entry[0].get<long long>()));
            int idx = entry[1].is_string() ? std::stoi(entry[1].get<std::string>())
                                           : entry[1].get<int>();
            if (idx < 1 || idx > n) {
                throw InputError(std::string(side) + " row index out of range");
            }
            row[idx - 1] += coeff;
        }
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace

ConstraintSystem5 ConstraintSystem5::from_json_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& ex) {
        throw InputError(std::string("constraint JSON parse error: ") + ex.what());
    }
    try {
        ConstraintSystem5 sys;
        sys.n = doc.at("n").get<int>();
        if (doc.contains("q_rows")) sys.q_rows = parse_rows(doc["q_rows"], sys.n, "q");
        if (doc.contains("p_rows")) sys.p_rows = parse_rows(doc["p_rows"], sys.n, "p");
        if (doc.contains("bilinear")) {
            for (const auto& jb : doc["bilinear"]) {
                if (!jb.is_array() || jb.size() != 4) {
                    throw InputError("bilinear entries must be [i, j, k, l]");
                }
                std::array<int, 4> b;
                for (int i = 0; i < 4; ++i) {
                    b[i] = jb[i].is_string() ? std::stoi(jb[i].get<std::string>())
                                             : jb[i].get<int>();
                }
                sys.bilinear.push_back(b);
            }
        }
        sys.validate();
        return sys;
    } catch (const json::exception& ex) {
        throw InputError(std::string("constraint JSON field error: ") + ex.what());
    }
}

std::string ConstraintSystem5::to_json_text() const {
    json doc;
    doc["n"] = n;
    auto rows_json = [&](const std::vector<std::vector<Rat>>& rows) {
        json out = json::array();
        for (const auto& row : rows) {
            json jrow = json::array();
            for (int i = 0; i < n; ++i) {
                if (row[i] != 0) {
                    jrow.push_back({format_rational(row[i]), std::to_string(i + 1)});
                }
            }
            out.push_back(std::move(jrow));
        }
        return out;
    };
    doc["q_rows"] = rows_json(q_rows);
    doc["p_rows"] = rows_json(p_rows);
    doc["bilinear"] = json::array();
    for (const auto& b : bilinear) doc["bilinear"].push_back({b[0], b[1], b[2], b[3]});
    return doc.dump(2);
}

ProductSystem reduce_polynomial(const PolynomialSystem& system) {
    if (system.n < 1) throw InputError("polynomial system needs at least one variable");
    ProductSystem out;
    // variable layout: index 0 = q0, 1..n = q1..qn, then chain variables
    out.num_vars = system.n + 1;
    auto fresh = [&] { return out.num_vars++; };

    // value of a chain variable: product of base powers divided by q0^(deg-1)
    std::map<std::pair<int, int>, int> power_var;  // (base var, power) -> var
    auto power_of = [&](int base, int power) {
        if (power == 1) return base;
        for (int k = 2; ; ++k) {
            auto it = power_var.find({base, k});
            int prev = k == 2 ? base : power_var.at({base, k - 1});
            if (it == power_var.end()) {
                int v = fresh();
                // v * q0 = prev * base
                out.products.push_back({v, 0, prev, base});
                power_var[{base, k}] = v;
            }
            if (k == power) return power_var.at({base, power});
        }
    };
    std::map<std::pair<int, int>, int> pair_var;  // (var a, var b) -> folded var
    auto fold = [&](int a, int b) {
        if (a > b) std::swap(a, b);
        auto it = pair_var.find({a, b});
        if (it != pair_var.end()) return it->second;
        int v = fresh();
        out.products.push_back({v, 0, a, b});
        pair_var[{a, b}] = v;
        return v;
    };

    std::vector<Rat> linear(out.num_vars, Rat(0));
    auto coeff_at = [&](int var) -> Rat& {
        if (static_cast<int>(linear.size()) <= var) linear.resize(var + 1, Rat(0));
        return linear[var];
    };
    for (const auto& mono : system.monomials) {
        if (static_cast<int>(mono.exponents.size()) != system.n) {
            throw InputError("monomial exponent vector has the wrong length");
        }
        // fold power-chain tops first, then the power-one factors
        int acc = -1;
        for (int i = 0; i < system.n; ++i) {
            if (mono.exponents[i] < 2) continue;
            int top = power_of(i + 1, mono.exponents[i]);
            acc = acc < 0 ? top : fold(acc, top);
        }
        for (int i = 0; i < system.n; ++i) {
            if (mono.exponents[i] != 1) continue;
            acc = acc < 0 ? i + 1 : fold(acc, i + 1);
        }
        if (acc < 0) acc = 0;  // constant monomial contributes through q0
        coeff_at(acc) += mono.coeff;
    }
    linear.resize(out.num_vars, Rat(0));
    out.linear = std::move(linear);
    return out;
}

EquationSystem reduce_products(const ProductSystem& system) {
    EquationSystem out;
    // q side: all product-system variables (q0 becomes q_1), one coupling var
    int base = system.num_vars;
    int q_count = base + 1;            // + coupling q
    int coupling_q = q_count;          // 1-based index
    int p_count = 1 + 2 * static_cast<int>(system.products.size());
    int coupling_p = 1;                // 1-based index on the p side
    out.n = std::max(q_count, p_count);
    out.q_half_sums.push_back(coupling_q);
    out.p_half_sums.push_back(coupling_p);

    if (system.linear) {
        std::vector<Rat> row(out.n, Rat(0));
        for (size_t i = 0; i < system.linear->size(); ++i) row[i] = (*system.linear)[i];
        out.q_equations.push_back(std::move(row));
    }
    int next_p = 2;
    for (const auto& prod : system.products) {
        // q_i q_j = q_k q_l becomes three couplings through the half-sum pair
        int i = prod[0] + 1, j = prod[1] + 1, k = prod[2] + 1, l = prod[3] + 1;
        int pa = next_p++;
        int pb = next_p++;
        out.bilinear.push_back({j, coupling_p, coupling_q, pa});
        out.bilinear.push_back({l, coupling_p, coupling_q, pb});
        out.bilinear.push_back({i, pa, k, pb});
    }
    return out;
}

ConstraintSystem5 reduce_equations(const EquationSystem& system) {
    ConstraintSystem5 out;
    out.n = system.n;
    auto push_pair = [&](std::vector<std::vector<Rat>>& rows, const std::vector<Rat>& row) {
        rows.push_back(row);
        std::vector<Rat> neg(row.size());
        for (size_t i = 0; i < row.size(); ++i) neg[i] = -row[i];
        rows.push_back(std::move(neg));
    };
    for (const auto& eq : system.q_equations) push_pair(out.q_rows, eq);
    auto half_sum_row = [&](int pin) {
        std::vector<Rat> row(out.n, Rat(1, 2));
        row[pin - 1] = Rat(-1, 2);
        return row;
    };
    for (int pin : system.q_half_sums) push_pair(out.q_rows, half_sum_row(pin));
    for (int pin : system.p_half_sums) push_pair(out.p_rows, half_sum_row(pin));
    // ordering rows q_1 <= q_i
    for (int i = 2; i <= out.n; ++i) {
        std::vector<Rat> row(out.n, Rat(0));
        row[0] = 1;
        row[i - 1] = -1;
        out.q_rows.push_back(std::move(row));
    }
    out.bilinear = system.bilinear;
    return out;
}

ConstraintSystem5 reduce_chain(const PolynomialSystem& system) {
    return reduce_equations(reduce_products(reduce_polynomial(system)));
}

ReductionGame constraints_to_game(const ConstraintSystem5& system) {
    system.validate();
    int n = system.n;
    int t1 = static_cast<int>(std::max(system.q_rows.size(), system.p_rows.size()));
    int t2 = static_cast<int>(system.bilinear.size());
    int k = 2 + n + t1 + 4 * t2;

    auto zeros = [&] { return Vec(k, Rat(0)); };
    auto loop_weight = [&](bool q_side, int var) {
        Vec w = zeros();
        w[0] = -1;
        w[1] = 1;
        w[2 + var] = -1;  // forces every loop to be visited
        const auto& rows = q_side ? system.q_rows : system.p_rows;
        for (size_t j = 0; j < rows.size(); ++j) {
            w[2 + n + static_cast<int>(j)] = rows[j][var];
        }
        for (int j = 0; j < t2; ++j) {
            const auto& b = system.bilinear[j];
            int base = 2 + n + t1 + 4 * j;
            if (q_side) {
                if (b[0] - 1 == var) {  // q_i
                    w[base + 0] += -1;
                    w[base + 2] += 1;
                }
                if (b[2] - 1 == var) {  // q_k
                    w[base + 1] += 1;
                    w[base + 3] += -1;
                }
            } else {
                if (b[3] - 1 == var) {  // p_l
                    w[base + 0] += 1;
                    w[base + 2] += -1;
                }
                if (b[1] - 1 == var) {  // p_j
                    w[base + 1] += -1;
                    w[base + 3] += 1;
                }
            }
        }
        return w;
    };

    std::vector<Vertex> vertices = {{"s0", Player::P2},
                                    {"a1", Player::P1},
                                    {"a2", Player::P1},
                                    {"b1", Player::P1},
                                    {"b2", Player::P1}};
    std::vector<Edge> edges;
    ReductionGame game{GameGraph({{"tmp", Player::P1}}, {{0, 0, {Rat(0)}}}, 0, 1),
                       Expression::lim_inf(1), Rat(0), t1, {}, {}};

    Vec entry = zeros();
    for (int i = 0; i < n; ++i) entry[2 + i] = 1;
    Vec ticker = zeros();
    ticker[0] = 1;
    ticker[1] = -1;

    edges.push_back({0, 1, entry});   // s0 -> a1
    edges.push_back({1, 1, ticker});  // a1 self-loop
    edges.push_back({1, 2, zeros()}); // a1 -> a2
    for (int i = 0; i < n; ++i) {
        game.a2_loop_edges.push_back(static_cast<int>(edges.size()));
        edges.push_back({2, 2, loop_weight(true, i)});
    }
    edges.push_back({2, 0, zeros()});  // a2 -> s0
    edges.push_back({0, 3, entry});    // s0 -> b1
    edges.push_back({3, 3, ticker});   // b1 self-loop
    edges.push_back({3, 4, zeros()});  // b1 -> b2
    for (int i = 0; i < n; ++i) {
        game.b2_loop_edges.push_back(static_cast<int>(edges.size()));
        edges.push_back({4, 4, loop_weight(false, i)});
    }
    edges.push_back({4, 0, zeros()});  // b2 -> s0

    game.graph = GameGraph(std::move(vertices), std::move(edges), 0, k);

    std::vector<Expression> parts;
    for (int d = 1; d <= 2 + n + t1; ++d) parts.push_back(Expression::lim_inf(d));
    for (int j = 0; j < t2; ++j) {
        int base = 2 + n + t1 + 4 * j;
        parts.push_back(Expression::min(
            {Expression::lim_inf(base + 1), Expression::lim_inf(base + 2)}));
        parts.push_back(Expression::min(
            {Expression::lim_inf(base + 3), Expression::lim_inf(base + 4)}));
    }
    game.objective = parts.size() == 1 ? parts[0] : Expression::max(std::move(parts));
    game.threshold = Rat(0);
    return game;
}

std::optional<ReductionAssignment> read_back_assignment(const ReductionGame& game,
                                                        const TupleWitness& witness) {
    ReductionAssignment out;
    out.q.assign(game.a2_loop_edges.size(), Rat(0));
    out.p.assign(game.b2_loop_edges.size(), Rat(0));
    std::map<int, Rat*> slot;
    for (size_t i = 0; i < game.a2_loop_edges.size(); ++i) {
        slot[game.a2_loop_edges[i]] = &out.q[i];
    }
    for (size_t i = 0; i < game.b2_loop_edges.size(); ++i) {
        slot[game.b2_loop_edges[i]] = &out.p[i];
    }
    for (const auto& part : witness.parts) {
        for (size_t c = 0; c < part.basis.cycles.size(); ++c) {
            const SimpleCycle& cycle = part.basis.cycles[c];
            if (cycle.edges.size() == 1) {
                auto it = slot.find(cycle.edges[0]);
                if (it != slot.end()) *it->second += part.mixing[c];
            }
        }
    }
    for (const Rat& v : out.q) {
        if (v <= 0) return std::nullopt;
    }
    for (const Rat& v : out.p) {
        if (v <= 0) return std::nullopt;
    }
    return out;
}

VectorLemmaReport vector_lemma_check(const Rat& a1, const Rat& a2, const Rat& b1, const Rat& b2,
                                     long samples, unsigned long seed) {
    if (a1 <= 0 || a2 <= 0 || b1 <= 0 || b2 <= 0) {
        throw InputError("the vector lemma needs strictly positive inputs");
    }
    VectorLemmaReport report;
    Rat r1 = b1 / a1;
    Rat r2 = b2 / a2;
    report.ratios_equal = (r1 == r2);

    auto paired_min_form = [&](const Rat& m, const Rat& n) {
        Rat x1 = -m * a1 + n * b1;
        Rat x2 = m * a2 - n * b2;
        Rat x3 = -x1;
        Rat x4 = -x2;
        return rat_max(rat_min(x1, x2), rat_min(x3, x4));
    };

    if (report.ratios_equal) {
        std::mt19937_64 rng(seed);
        report.condition_holds = true;
        for (long i = 0; i < samples; ++i) {
            Rat m(static_cast<long>(rng() % 64), static_cast<long>(1 + rng() % 16));
            Rat n(static_cast<long>(rng() % 64), static_cast<long>(1 + rng() % 16));
            ++report.samples_checked;
            if (paired_min_form(m, n) > 0) {
                report.condition_holds = false;
                break;
            }
        }
        return report;
    }
    // a ratio strictly between the two yields two positive paired coordinates
    Rat mid = (r1 + r2) / 2;
    Rat m = mid.get_num();
    Rat n = mid.get_den();
    report.violator = {m, n};
    report.condition_holds = !(paired_min_form(m, n) > 0);
    report.samples_checked = 1;
    return report;
}

}  // namespace mpexpr
