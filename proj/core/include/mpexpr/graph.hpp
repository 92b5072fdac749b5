#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mpexpr/rational.hpp"

namespace mpexpr {

enum class Player { P1 = 1, P2 = 2 };

Player opponent(Player p);

struct Vertex {
    std::string id;
    Player owner = Player::P1;
};

struct Edge {
    int from = 0;
    int to = 0;
    Vec weight;
};

/// Directed multigraph with a vertex ownership partition, an initial vertex
/// and k-dimensional exact rational edge weights. Parallel edges and
/// self-loops are allowed; every vertex must have out-degree >= 1.
class GameGraph {
public:
    GameGraph(std::vector<Vertex> vertices, std::vector<Edge> edges, int initial, int dimension);

    static GameGraph from_json_text(const std::string& text);
    std::string to_json_text() const;

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int dimension() const { return dimension_; }
    int initial() const { return initial_; }

    const Vertex& vertex(int v) const { return vertices_[v]; }
    const Edge& edge(int e) const { return edges_[e]; }
    const std::vector<Vertex>& vertices() const { return vertices_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<int>& out_edges(int v) const { return out_[v]; }

    int vertex_index(const std::string& id) const;  // throws InputError if absent
    std::optional<int> find_vertex(const std::string& id) const;

    GameGraph with_initial(int v) const;

    std::vector<bool> reachable_from(int v) const;

private:
    std::vector<Vertex> vertices_;
    std::vector<Edge> edges_;
    int initial_;
    int dimension_;
    std::vector<std::vector<int>> out_;
};

/// A graph derived from a parent graph, with index maps back into the parent.
struct Subgraph {
    GameGraph graph;
    std::vector<int> vertex_to_parent;
    std::vector<int> edge_to_parent;
};

/// Drops the masked vertices and every edge touching them. Preserves
/// out-degree >= 1 only if the caller removes attractor-closed sets.
Subgraph remove_vertices(const GameGraph& g, const std::vector<bool>& drop, int new_initial);

/// Keeps exactly the edges with keep[e] set. Vertices are unchanged.
Subgraph filter_edges(const GameGraph& g, const std::vector<bool>& keep);

struct MemorylessStrategy {
    std::vector<int> choice;  // vertex -> edge id, -1 on vertices it does not own
};

/// Finite-memory strategy as a Moore machine. The update map observes edges
/// (parallel edges are distinguishable); the next-move map picks an out-edge.
struct MooreStrategy {
    int memory_count = 1;
    int initial_memory = 0;
    std::vector<std::vector<int>> update;  // [memory][edge] -> memory
    std::vector<std::vector<int>> next;    // [memory][vertex] -> edge id or -1

    static MooreStrategy from_memoryless(const GameGraph& g, const MemorylessStrategy& s);
    MooreStrategy with_initial_memory(int m) const;

    static MooreStrategy from_json_text(const std::string& text);
    std::string to_json_text() const;
};

struct ProductResult {
    GameGraph graph;
    std::vector<std::pair<int, int>> state;  // product vertex -> (base vertex, memory)
    std::vector<int> edge_origin;            // product edge -> base edge
};

/// Game graph according to a strategy for `owner`: the owner's choices are
/// resolved by the Moore machine, so all its product vertices have out-degree
/// one. By default only the part reachable from (initial, m0) is kept.
ProductResult product(const GameGraph& g, const MooreStrategy& sigma, Player owner = Player::P1,
                      bool restrict_reachable = true);

struct SccDecomposition {
    std::vector<std::vector<int>> components;  // each sorted ascending
    std::vector<int> component_of;
    std::vector<bool> terminal;  // no edge leaves the component
};

SccDecomposition scc_decompose(const GameGraph& g);

/// Indices of components reachable from the initial vertex.
std::vector<int> reachable_sccs(const GameGraph& g, const SccDecomposition& scc);

/// Least fixpoint of "player can force the pebble into `target`", plus a
/// memoryless strategy that reaches the target in at most |V| rounds.
std::pair<std::vector<bool>, MemorylessStrategy> attractor(const GameGraph& g, Player player,
                                                           const std::vector<bool>& target);

/// Vertex-simple cycle as an edge sequence, canonically rotated.
struct SimpleCycle {
    std::vector<int> edges;
    Vec total;
    Vec average() const;
};

std::vector<SimpleCycle> simple_cycles(const GameGraph& g);

/// Averages of the simple cycles of one Eulerian cyclic path; mixtures over
/// the open simplex of the columns realize exactly the cyclic-path averages.
struct CycleMixtureBasis {
    std::vector<SimpleCycle> cycles;
    std::vector<Vec> columns;  // cycle averages, same order
};

/// All sets of pairwise edge-disjoint simple cycles with a connected union,
/// restricted to the vertices of one SCC. These are exactly the cycle
/// decompositions of the Eulerian cyclic paths inside the component.
std::vector<CycleMixtureBasis> eulerian_cycle_sets(const GameGraph& g,
                                                   const std::vector<int>& scc_vertices);

/// Bases pooled over every SCC reachable from the initial vertex.
std::vector<CycleMixtureBasis> reachable_cycle_bases(const GameGraph& g);

/// Enumerates the Cartesian product of per-vertex choices for `player`,
/// in ascending lexicographic order of edge choices.
class MemorylessStrategyRange {
public:
    MemorylessStrategyRange(const GameGraph& g, Player player);

    mpz_class count() const;
    /// Fills `out` with the next strategy; returns false when exhausted.
    bool next(MemorylessStrategy& out);
    void reset();

private:
    const GameGraph& g_;
    std::vector<int> owned_;  // vertices with a real choice to make
    std::vector<size_t> pos_;
    bool done_ = false;
};

/// G^tau for a player-2 memoryless strategy: non-chosen P2 edges deleted.
Subgraph resolve_strategy(const GameGraph& g, const MemorylessStrategy& tau, Player owner);

}  // namespace mpexpr
