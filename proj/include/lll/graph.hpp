#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lll/bitset.hpp"
#include "lll/common.hpp"

namespace lll {

// Undirected simple graph over dense node ids 0..n-1. Adjacency lists are
// kept sorted; max_degree is cached at construction.
struct Graph {
    int n = 0;
    std::vector<std::vector<int>> adj;
    int max_degree = 0;

    Graph() = default;
    explicit Graph(int n_) : n(n_), adj(n_) {}

    static Graph from_edges(int n, const std::vector<std::pair<int, int>>& edges);

    int degree(int v) const { return int(adj[v].size()); }
    bool has_edge(int u, int v) const;
    std::size_t edge_count() const;

    // Checks symmetry, sortedness, no self-loops, no duplicates, cached degree.
    void check_invariants() const;
};

// Implicit view of the graph g^k restricted to a node subset: u and w are
// view-adjacent iff both lie in the subset and dist_g(u,w) is in [1,k].
// Paths realizing the distance may leave the subset.
struct PowerView {
    const Graph* g = nullptr;
    int k = 1;
    const NodeSubset* sub = nullptr;  // null means all nodes

    bool member(int v) const { return sub == nullptr || sub->contains(v); }
    int universe() const { return g->n; }

    // Collects the view-neighbors of v (ascending), using scratch buffers
    // sized g->n; stamp/queue are reused across calls.
    void neighbors(int v, std::vector<int>& stamp, int& stamp_gen,
                   std::vector<int>& queue, std::vector<int>& out) const;
};

// --- spec operations -------------------------------------------------------

Graph power_graph(const Graph& g, int k);
Graph annulus_graph(const Graph& g, int a, int b);
std::vector<NodeSubset> components(const Graph& g, const NodeSubset& s);
NodeSubset ball(const Graph& g, int v, int r);
std::vector<int> distance_k_coloring(const Graph& g, int k);
NodeSubset ruling_set(const Graph& g, int alpha, int beta);

// --- helpers used across modules -------------------------------------------

// BFS distances from src inside g restricted to `within` (if non-null);
// unreachable entries are -1.
std::vector<int> bfs_distances(const Graph& g, int src, const NodeSubset* within = nullptr,
                               int max_depth = -1);

// Exact diameter of g[comp] (comp must be connected in g[comp]).
int component_diameter(const Graph& g, const NodeSubset& comp);

// Induced subgraph on s; `to_local`/`to_global` map ids (global ids ascending).
struct InducedGraph {
    Graph graph;
    std::vector<int> to_global;         // local -> global
    std::vector<int> to_local;          // global -> local (-1 outside)
};
InducedGraph induced_subgraph(const Graph& g, const NodeSubset& s);

// Connected components of a power-subset view, ordered by minimum node id.
std::vector<std::vector<int>> view_components(const PowerView& view);

// Eccentricity of src within its view-component (view hops).
int view_eccentricity(const PowerView& view, int src);

// Greedy ruling set of one view-component: pairwise view-distance >= alpha,
// every component node within view-distance beta of the set.
std::vector<int> view_ruling_set(const PowerView& view, const std::vector<int>& comp,
                                 int alpha);

// --- edge-list text format --------------------------------------------------
// First line "n m", then m lines "u v" with 0 <= u < v < n. The parser
// rejects self-loops, duplicates, and out-of-order endpoints.
Graph read_edge_list(const std::string& path);
Graph parse_edge_list(const std::string& text);
std::string format_edge_list(const Graph& g);
void write_edge_list(const Graph& g, const std::string& path);

}  // namespace lll
