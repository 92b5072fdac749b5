#include "mpexpr/graph.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mpexpr/errors.hpp"

namespace mpexpr {

using nlohmann::json;

Player opponent(Player p) { return p == Player::P1 ? Player::P2 : Player::P1; }

GameGraph::GameGraph(std::vector<Vertex> vertices, std::vector<Edge> edges, int initial,
                     int dimension)
    : vertices_(std::move(vertices)), edges_(std::move(edges)), initial_(initial),
      dimension_(dimension) {
    if (vertices_.empty()) throw InputError("graph has no vertices");
    if (dimension_ < 1) throw InputError("weight dimension must be >= 1");
    if (initial_ < 0 || initial_ >= num_vertices()) throw InputError("initial vertex out of range");
    out_.assign(vertices_.size(), {});
    for (size_t e = 0; e < edges_.size(); ++e) {
        const Edge& edge = edges_[e];
        if (edge.from < 0 || edge.from >= num_vertices() || edge.to < 0 ||
            edge.to >= num_vertices()) {
            throw InputError("edge endpoint out of range");
        }
        if (static_cast<int>(edge.weight.size()) != dimension_) {
            throw InputError("edge weight has wrong dimension");
        }
        out_[edge.from].push_back(static_cast<int>(e));
    }
    for (size_t v = 0; v < vertices_.size(); ++v) {
        if (out_[v].empty()) {
            throw InputError("vertex '" + vertices_[v].id + "' has out-degree 0");
        }
    }
    std::set<std::string> ids;
    for (const Vertex& v : vertices_) {
        if (!ids.insert(v.id).second) throw InputError("duplicate vertex id '" + v.id + "'");
    }
}

int GameGraph::vertex_index(const std::string& id) const {
    auto v = find_vertex(id);
    if (!v) throw InputError("unknown vertex id '" + id + "'");
    return *v;
}

std::optional<int> GameGraph::find_vertex(const std::string& id) const {
    for (int v = 0; v < num_vertices(); ++v) {
        if (vertices_[v].id == id) return v;
    }
    return std::nullopt;
}

GameGraph GameGraph::with_initial(int v) const {
    if (v < 0 || v >= num_vertices()) throw InputError("initial vertex out of range");
    return GameGraph(vertices_, edges_, v, dimension_);
}

std::vector<bool> GameGraph::reachable_from(int v) const {
    std::vector<bool> seen(vertices_.size(), false);
    std::deque<int> queue{v};
    seen[v] = true;
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (int e : out_[u]) {
            int t = edges_[e].to;
            if (!seen[t]) {
                seen[t] = true;
                queue.push_back(t);
            }
        }
    }
    return seen;
}

GameGraph GameGraph::from_json_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& ex) {
        throw InputError(std::string("graph JSON parse error: ") + ex.what());
    }
    try {
        int k = doc.at("k").get<int>();
        std::vector<Vertex> vertices;
        for (const auto& jv : doc.at("vertices")) {
            Vertex v;
            v.id = jv.at("id").get<std::string>();
            int owner = jv.at("owner").get<int>();
            if (owner != 1 && owner != 2) {
                throw InputError("vertex '" + v.id + "': owner must be 1 or 2");
            }
            v.owner = owner == 1 ? Player::P1 : Player::P2;
            vertices.push_back(std::move(v));
        }
        auto index_of = [&](const std::string& id) {
            for (size_t i = 0; i < vertices.size(); ++i) {
                if (vertices[i].id == id) return static_cast<int>(i);
            }
            throw InputError("edge references unknown vertex '" + id + "'");
        };
        std::vector<Edge> edges;
        for (const auto& je : doc.at("edges")) {
            Edge e;
            e.from = index_of(je.at("from").get<std::string>());
            e.to = index_of(je.at("to").get<std::string>());
            for (const auto& jw : je.at("weight")) {
                if (jw.is_string()) {
                    e.weight.push_back(parse_rational(jw.get<std::string>()));
                } else if (jw.is_number_integer()) {
                    e.weight.push_back(Rat(static_cast<long>(jw.get<long long>())));
                } else {
                    throw InputError("edge weights must be rational strings or integers");
                }
            }
            if (static_cast<int>(e.weight.size()) != k) {
                throw InputError("edge weight length differs from k");
            }
            edges.push_back(std::move(e));
        }
        int initial = index_of(doc.at("initial").get<std::string>());
        return GameGraph(std::move(vertices), std::move(edges), initial, k);
    } catch (const json::exception& ex) {
        throw InputError(std::string("graph JSON field error: ") + ex.what());
    }
}

std::string GameGraph::to_json_text() const {
    json doc;
    doc["k"] = dimension_;
    doc["initial"] = vertices_[initial_].id;
    doc["vertices"] = json::array();
    for (const Vertex& v : vertices_) {
        doc["vertices"].push_back({{"id", v.id}, {"owner", v.owner == Player::P1 ? 1 : 2}});
    }
    doc["edges"] = json::array();
    for (const Edge& e : edges_) {
        json weights = json::array();
        for (const Rat& w : e.weight) weights.push_back(format_rational(w));
        doc["edges"].push_back({{"from", vertices_[e.from].id},
                                {"to", vertices_[e.to].id},
                                {"weight", std::move(weights)}});
    }
    return doc.dump(2);
}

Subgraph remove_vertices(const GameGraph& g, const std::vector<bool>& drop, int new_initial) {
    std::vector<int> old_to_new(g.num_vertices(), -1);
    std::vector<Vertex> vertices;
    std::vector<int> vertex_to_parent;
    for (int v = 0; v < g.num_vertices(); ++v) {
        if (!drop[v]) {
            old_to_new[v] = static_cast<int>(vertices.size());
            vertices.push_back(g.vertex(v));
            vertex_to_parent.push_back(v);
        }
    }
    if (new_initial < 0 || drop[new_initial]) {
        throw InputError("subgraph initial vertex was removed");
    }
    std::vector<Edge> edges;
    std::vector<int> edge_to_parent;
    for (int e = 0; e < g.num_edges(); ++e) {
        const Edge& edge = g.edge(e);
        if (drop[edge.from] || drop[edge.to]) continue;
        edges.push_back(Edge{old_to_new[edge.from], old_to_new[edge.to], edge.weight});
        edge_to_parent.push_back(e);
    }
    return Subgraph{GameGraph(std::move(vertices), std::move(edges), old_to_new[new_initial],
                              g.dimension()),
                    std::move(vertex_to_parent), std::move(edge_to_parent)};
}

Subgraph filter_edges(const GameGraph& g, const std::vector<bool>& keep) {
    std::vector<Edge> edges;
    std::vector<int> edge_to_parent;
    for (int e = 0; e < g.num_edges(); ++e) {
        if (!keep[e]) continue;
        edges.push_back(g.edge(e));
        edge_to_parent.push_back(e);
    }
    std::vector<int> vertex_to_parent(g.num_vertices());
    for (int v = 0; v < g.num_vertices(); ++v) vertex_to_parent[v] = v;
    return Subgraph{GameGraph(g.vertices(), std::move(edges), g.initial(), g.dimension()),
                    std::move(vertex_to_parent), std::move(edge_to_parent)};
}

MooreStrategy MooreStrategy::from_memoryless(const GameGraph& g, const MemorylessStrategy& s) {
    MooreStrategy m;
    m.memory_count = 1;
    m.initial_memory = 0;
    m.update.assign(1, std::vector<int>(g.num_edges(), 0));
    m.next.assign(1, s.choice);
    m.next[0].resize(g.num_vertices(), -1);
    return m;
}

MooreStrategy MooreStrategy::with_initial_memory(int m) const {
    MooreStrategy out = *this;
    if (m < 0 || m >= memory_count) throw InputError("initial memory out of range");
    out.initial_memory = m;
    return out;
}

MooreStrategy MooreStrategy::from_json_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& ex) {
        throw InputError(std::string("strategy JSON parse error: ") + ex.what());
    }
    try {
        MooreStrategy s;
        s.memory_count = doc.at("memory").get<int>();
        s.initial_memory = doc.at("initial").get<int>();
        s.update = doc.at("update").get<std::vector<std::vector<int>>>();
        s.next = doc.at("next").get<std::vector<std::vector<int>>>();
        if (s.memory_count < 1 || s.initial_memory < 0 || s.initial_memory >= s.memory_count ||
            static_cast<int>(s.update.size()) != s.memory_count ||
            static_cast<int>(s.next.size()) != s.memory_count) {
            throw InputError("strategy tables do not match the declared memory count");
        }
        return s;
    } catch (const json::exception& ex) {
        throw InputError(std::string("strategy JSON field error: ") + ex.what());
    }
}

std::string MooreStrategy::to_json_text() const {
    json doc;
    doc["memory"] = memory_count;
    doc["initial"] = initial_memory;
    doc["update"] = update;
    doc["next"] = next;
    return doc.dump(2);
}

ProductResult product(const GameGraph& g, const MooreStrategy& sigma, Player owner,
                      bool restrict_reachable) {
    auto state_key = [&](int v, int m) { return v * sigma.memory_count + m; };
    auto check_tables = [&](int m, int v) {
        if (m >= static_cast<int>(sigma.update.size()) ||
            static_cast<int>(sigma.update[m].size()) != g.num_edges() ||
            m >= static_cast<int>(sigma.next.size()) ||
            static_cast<int>(sigma.next[m].size()) != g.num_vertices()) {
            throw InputError("strategy tables do not cover the graph");
        }
        (void)v;
    };

    std::vector<int> index(g.num_vertices() * sigma.memory_count, -1);
    std::vector<std::pair<int, int>> states;
    std::deque<int> queue;

    auto intern = [&](int v, int m) {
        int key = state_key(v, m);
        if (index[key] < 0) {
            index[key] = static_cast<int>(states.size());
            states.emplace_back(v, m);
            queue.push_back(index[key]);
        }
        return index[key];
    };

    if (restrict_reachable) {
        intern(g.initial(), sigma.initial_memory);
    } else {
        for (int v = 0; v < g.num_vertices(); ++v) {
            for (int m = 0; m < sigma.memory_count; ++m) intern(v, m);
        }
    }

    std::vector<Edge> edges;
    std::vector<int> edge_origin;
    std::vector<std::pair<int, std::pair<int, int>>> pending;  // (from state, (edge, to state))

    // Successor memory is the update on the traversed edge.
    while (!queue.empty()) {
        int s = queue.front();
        queue.pop_front();
        auto [v, m] = states[s];
        check_tables(m, v);
        if (g.vertex(v).owner == owner) {
            int e = sigma.next[m][v];
            if (e < 0 || e >= g.num_edges() || g.edge(e).from != v) {
                throw InputError("strategy has no valid move at vertex '" + g.vertex(v).id +
                                 "' with memory " + std::to_string(m));
            }
            int t = intern(g.edge(e).to, sigma.update[m][e]);
            pending.push_back({s, {e, t}});
        } else {
            for (int e : g.out_edges(v)) {
                int t = intern(g.edge(e).to, sigma.update[m][e]);
                pending.push_back({s, {e, t}});
            }
        }
    }

    std::vector<Vertex> vertices;
    vertices.reserve(states.size());
    for (auto [v, m] : states) {
        Vertex pv;
        pv.id = g.vertex(v).id + "@" + std::to_string(m);
        pv.owner = g.vertex(v).owner;
        vertices.push_back(std::move(pv));
    }
    for (auto& [from, em] : pending) {
        edges.push_back(Edge{from, em.second, g.edge(em.first).weight});
        edge_origin.push_back(em.first);
    }
    int initial = index[state_key(g.initial(), sigma.initial_memory)];
    return ProductResult{GameGraph(std::move(vertices), std::move(edges), initial, g.dimension()),
                         std::move(states), std::move(edge_origin)};
}

namespace {

struct TarjanState {
    const GameGraph& g;
    std::vector<int> index, low, comp;
    std::vector<bool> on_stack;
    std::vector<int> stack;
    int next_index = 0;
    int next_comp = 0;

    explicit TarjanState(const GameGraph& graph)
        : g(graph), index(graph.num_vertices(), -1), low(graph.num_vertices(), 0),
          comp(graph.num_vertices(), -1), on_stack(graph.num_vertices(), false) {}

    void run(int root) {
        // Iterative Tarjan to keep deep graphs off the call stack.
        struct Frame {
            int v;
            size_t edge_pos;
        };
        std::vector<Frame> frames{{root, 0}};
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.edge_pos < g.out_edges(f.v).size()) {
                int e = g.out_edges(f.v)[f.edge_pos++];
                int w = g.edge(e).to;
                if (index[w] < 0) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
            } else {
                if (low[f.v] == index[f.v]) {
                    for (;;) {
                        int w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if (w == f.v) break;
                    }
                    ++next_comp;
                }
                int child = f.v;
                frames.pop_back();
                if (!frames.empty()) {
                    low[frames.back().v] = std::min(low[frames.back().v], low[child]);
                }
            }
        }
    }
};

}  // namespace

SccDecomposition scc_decompose(const GameGraph& g) {
    TarjanState ts(g);
    for (int v = 0; v < g.num_vertices(); ++v) {
        if (ts.index[v] < 0) ts.run(v);
    }
    SccDecomposition out;
    out.component_of = ts.comp;
    out.components.assign(ts.next_comp, {});
    for (int v = 0; v < g.num_vertices(); ++v) out.components[ts.comp[v]].push_back(v);
    for (auto& c : out.components) std::sort(c.begin(), c.end());
    out.terminal.assign(ts.next_comp, true);
    for (int e = 0; e < g.num_edges(); ++e) {
        int a = ts.comp[g.edge(e).from];
        int b = ts.comp[g.edge(e).to];
        if (a != b) out.terminal[a] = false;
    }
    return out;
}

std::vector<int> reachable_sccs(const GameGraph& g, const SccDecomposition& scc) {
    std::vector<bool> seen = g.reachable_from(g.initial());
    std::set<int> comps;
    for (int v = 0; v < g.num_vertices(); ++v) {
        if (seen[v]) comps.insert(scc.component_of[v]);
    }
    return {comps.begin(), comps.end()};
}

std::pair<std::vector<bool>, MemorylessStrategy> attractor(const GameGraph& g, Player player,
                                                           const std::vector<bool>& target) {
    bool any = false;
    for (bool b : target) any = any || b;
    if (!any) throw PreconditionError("attractor target must be nonempty");

    std::vector<bool> in_set = target;
    MemorylessStrategy strat;
    strat.choice.assign(g.num_vertices(), -1);

    std::vector<int> escape_count(g.num_vertices(), 0);
    std::vector<std::vector<int>> in_edges(g.num_vertices());
    for (int e = 0; e < g.num_edges(); ++e) in_edges[g.edge(e).to].push_back(e);
    for (int v = 0; v < g.num_vertices(); ++v) {
        escape_count[v] = static_cast<int>(g.out_edges(v).size());
    }

    std::deque<int> queue;
    for (int v = 0; v < g.num_vertices(); ++v) {
        if (in_set[v]) queue.push_back(v);
    }
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (int e : in_edges[v]) {
            int u = g.edge(e).from;
            if (in_set[u]) {
                if (g.vertex(u).owner == player && strat.choice[u] < 0 && !target[u]) {
                    // already attracted via another edge; keep the first choice
                }
                continue;
            }
            if (g.vertex(u).owner == player) {
                in_set[u] = true;
                strat.choice[u] = e;
                queue.push_back(u);
            } else {
                if (--escape_count[u] == 0) {
                    in_set[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    return {std::move(in_set), std::move(strat)};
}

Vec SimpleCycle::average() const {
    Vec avg(total.size());
    Rat len(static_cast<long>(edges.size()));
    for (size_t d = 0; d < total.size(); ++d) avg[d] = total[d] / len;
    return avg;
}

std::vector<SimpleCycle> simple_cycles(const GameGraph& g) {
    std::vector<SimpleCycle> cycles;
    std::vector<bool> on_path(g.num_vertices(), false);
    std::vector<int> path_edges;

    // Each vertex-simple cycle is rooted at its smallest vertex; the search
    // below only descends into vertices larger than the root.
    for (int root = 0; root < g.num_vertices(); ++root) {
        struct Frame {
            int v;
            size_t pos;
        };
        std::vector<Frame> stack{{root, 0}};
        on_path[root] = true;
        while (!stack.empty()) {
            Frame& f = stack.back();
            if (f.pos < g.out_edges(f.v).size()) {
                int e = g.out_edges(f.v)[f.pos++];
                int t = g.edge(e).to;
                if (t == root) {
                    SimpleCycle c;
                    c.edges = path_edges;
                    c.edges.push_back(e);
                    c.total.assign(g.dimension(), Rat(0));
                    for (int ce : c.edges) c.total = add(c.total, g.edge(ce).weight);
                    cycles.push_back(std::move(c));
                } else if (t > root && !on_path[t]) {
                    on_path[t] = true;
                    path_edges.push_back(e);
                    stack.push_back({t, 0});
                }
            } else {
                if (f.v != root) {
                    on_path[f.v] = false;
                    path_edges.pop_back();
                }
                stack.pop_back();
            }
        }
        on_path[root] = false;
    }
    return cycles;
}

namespace {

std::vector<int> cycle_vertices(const GameGraph& g, const SimpleCycle& c) {
    std::set<int> vs;
    for (int e : c.edges) {
        vs.insert(g.edge(e).from);
        vs.insert(g.edge(e).to);
    }
    return {vs.begin(), vs.end()};
}

bool connected_union(const std::vector<std::vector<int>>& vertex_sets,
                     const std::vector<int>& selected) {
    if (selected.size() <= 1) return true;
    std::vector<int> label(selected.size());
    for (size_t i = 0; i < selected.size(); ++i) label[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int x) {
        while (label[x] != x) x = label[x] = label[label[x]];
        return x;
    };
    for (size_t i = 0; i < selected.size(); ++i) {
        for (size_t j = i + 1; j < selected.size(); ++j) {
            const auto& a = vertex_sets[selected[i]];
            const auto& b = vertex_sets[selected[j]];
            bool share = false;
            size_t x = 0, y = 0;
            while (x < a.size() && y < b.size()) {
                if (a[x] == b[y]) {
                    share = true;
                    break;
                }
                if (a[x] < b[y]) ++x;
                else ++y;
            }
            if (share) label[find(static_cast<int>(i))] = find(static_cast<int>(j));
        }
    }
    int root = find(0);
    for (size_t i = 1; i < selected.size(); ++i) {
        if (find(static_cast<int>(i)) != root) return false;
    }
    return true;
}

}  // namespace

std::vector<CycleMixtureBasis> eulerian_cycle_sets(const GameGraph& g,
                                                   const std::vector<int>& scc_vertices) {
    std::set<int> members(scc_vertices.begin(), scc_vertices.end());
    std::vector<SimpleCycle> cycles;
    for (SimpleCycle& c : simple_cycles(g)) {
        bool inside = true;
        for (int e : c.edges) {
            if (!members.count(g.edge(e).from) || !members.count(g.edge(e).to)) {
                inside = false;
                break;
            }
        }
        if (inside) cycles.push_back(std::move(c));
    }
    std::vector<std::vector<int>> vertex_sets;
    std::vector<std::set<int>> edge_sets;
    for (const SimpleCycle& c : cycles) {
        vertex_sets.push_back(cycle_vertices(g, c));
        edge_sets.emplace_back(c.edges.begin(), c.edges.end());
    }

    std::vector<CycleMixtureBasis> bases;
    std::vector<int> selected;
    std::function<void(size_t)> recurse = [&](size_t idx) {
        if (!selected.empty() && connected_union(vertex_sets, selected)) {
            CycleMixtureBasis basis;
            for (int i : selected) {
                basis.cycles.push_back(cycles[i]);
                basis.columns.push_back(cycles[i].average());
            }
            bases.push_back(std::move(basis));
        }
        for (size_t next = idx; next < cycles.size(); ++next) {
            bool disjoint = true;
            for (int i : selected) {
                for (int e : cycles[next].edges) {
                    if (edge_sets[i].count(e)) {
                        disjoint = false;
                        break;
                    }
                }
                if (!disjoint) break;
            }
            if (!disjoint) continue;
            selected.push_back(static_cast<int>(next));
            recurse(next + 1);
            selected.pop_back();
        }
    };
    recurse(0);
    return bases;
}

std::vector<CycleMixtureBasis> reachable_cycle_bases(const GameGraph& g) {
    SccDecomposition scc = scc_decompose(g);
    std::vector<CycleMixtureBasis> all;
    for (int ci : reachable_sccs(g, scc)) {
        auto bases = eulerian_cycle_sets(g, scc.components[ci]);
        all.insert(all.end(), bases.begin(), bases.end());
    }
    return all;
}

MemorylessStrategyRange::MemorylessStrategyRange(const GameGraph& g, Player player) : g_(g) {
    for (int v = 0; v < g.num_vertices(); ++v) {
        if (g.vertex(v).owner == player) owned_.push_back(v);
    }
    pos_.assign(owned_.size(), 0);
}

mpz_class MemorylessStrategyRange::count() const {
    mpz_class n = 1;
    for (int v : owned_) n *= static_cast<long>(g_.out_edges(v).size());
    return n;
}

void MemorylessStrategyRange::reset() {
    pos_.assign(owned_.size(), 0);
    done_ = false;
}

bool MemorylessStrategyRange::next(MemorylessStrategy& out) {
    if (done_) return false;
    out.choice.assign(g_.num_vertices(), -1);
    for (size_t i = 0; i < owned_.size(); ++i) {
        out.choice[owned_[i]] = g_.out_edges(owned_[i])[pos_[i]];
    }
    // advance odometer
    size_t i = owned_.size();
    for (;;) {
        if (i == 0) {
            done_ = true;
            break;
        }
        --i;
        if (++pos_[i] < g_.out_edges(owned_[i]).size()) break;
        pos_[i] = 0;
    }
    return true;
}

Subgraph resolve_strategy(const GameGraph& g, const MemorylessStrategy& tau, Player owner) {
    std::vector<bool> keep(g.num_edges(), true);
    for (int v = 0; v < g.num_vertices(); ++v) {
        if (g.vertex(v).owner != owner) continue;
        int chosen = tau.choice[v];
        if (chosen < 0 || g.edge(chosen).from != v) {
            throw InputError("memoryless strategy undefined at '" + g.vertex(v).id + "'");
        }
        for (int e : g.out_edges(v)) keep[e] = (e == chosen);
    }
    return filter_edges(g, keep);
}

}  // namespace mpexpr
