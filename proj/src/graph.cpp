#include "lll/graph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>

namespace lll {

Graph Graph::from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
    Graph g(n);
    for (auto [u, v] : edges) {
        if (u < 0 || v < 0 || u >= n || v >= n)
            throw parameter_error("edge endpoint out of range");
        if (u == v) throw parameter_error("self-loop rejected");
        g.adj[u].push_back(v);
        g.adj[v].push_back(u);
    }
    for (int v = 0; v < n; ++v) {
        auto& a = g.adj[v];
        std::sort(a.begin(), a.end());
        if (std::adjacent_find(a.begin(), a.end()) != a.end())
            throw parameter_error("duplicate edge rejected");
        g.max_degree = std::max(g.max_degree, int(a.size()));
    }
    return g;
}

bool Graph::has_edge(int u, int v) const {
    const auto& a = adj[u];
    return std::binary_search(a.begin(), a.end(), v);
}

std::size_t Graph::edge_count() const {
    std::size_t total = 0;
    for (const auto& a : adj) total += a.size();
    return total / 2;
}

void Graph::check_invariants() const {
    int md = 0;
    for (int v = 0; v < n; ++v) {
        const auto& a = adj[v];
        LLL_CHECK(std::is_sorted(a.begin(), a.end()), "adjacency not sorted");
        LLL_CHECK(std::adjacent_find(a.begin(), a.end()) == a.end(), "duplicate edge");
        for (int u : a) {
            LLL_CHECK(u != v, "self-loop");
            LLL_CHECK(0 <= u && u < n, "edge endpoint range");
            const auto& b = adj[u];
            LLL_CHECK(std::binary_search(b.begin(), b.end(), v), "asymmetric adjacency");
        }
        md = std::max(md, int(a.size()));
    }
    LLL_CHECK(md == max_degree, "cached max_degree stale");
}

std::vector<int> bfs_distances(const Graph& g, int src, const NodeSubset* within,
                               int max_depth) {
    std::vector<int> dist(g.n, -1);
    if (within && !within->contains(src)) return dist;
    std::deque<int> q;
    dist[src] = 0;
    q.push_back(src);
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        if (max_depth >= 0 && dist[v] >= max_depth) continue;
        for (int u : g.adj[v]) {
            if (dist[u] != -1) continue;
            if (within && !within->contains(u)) continue;
            dist[u] = dist[v] + 1;
            q.push_back(u);
        }
    }
    return dist;
}

Graph power_graph(const Graph& g, int k) {
    if (k < 1) throw parameter_error("power_graph: k must be >= 1");
    if (k == 1) return g;
    Graph out(g.n);
    std::vector<int> dist(g.n, -1);
    std::vector<int> touched;
    std::vector<int> queue;
    for (int v = 0; v < g.n; ++v) {
        touched.clear();
        queue.clear();
        dist[v] = 0;
        queue.push_back(v);
        touched.push_back(v);
        for (std::size_t head = 0; head < queue.size(); ++head) {
            int x = queue[head];
            if (dist[x] >= k) continue;
            for (int u : g.adj[x]) {
                if (dist[u] != -1) continue;
                dist[u] = dist[x] + 1;
                queue.push_back(u);
                touched.push_back(u);
                if (u != v) out.adj[v].push_back(u);
            }
        }
        for (int x : touched) dist[x] = -1;
    }
    for (int v = 0; v < g.n; ++v) {
        auto& a = out.adj[v];
        std::sort(a.begin(), a.end());
        out.max_degree = std::max(out.max_degree, int(a.size()));
    }
    return out;
}

Graph annulus_graph(const Graph& g, int a, int b) {
    if (a < 1 || b < a) throw parameter_error("annulus_graph: need 1 <= a <= b");
    Graph out(g.n);
    std::vector<int> dist(g.n, -1);
    std::vector<int> touched, queue;
    for (int v = 0; v < g.n; ++v) {
        touched.clear();
        queue.clear();
        dist[v] = 0;
        queue.push_back(v);
        touched.push_back(v);
        for (std::size_t head = 0; head < queue.size(); ++head) {
            int x = queue[head];
            if (dist[x] >= b) continue;
            for (int u : g.adj[x]) {
                if (dist[u] != -1) continue;
                dist[u] = dist[x] + 1;
                queue.push_back(u);
                touched.push_back(u);
                if (u != v && dist[u] >= a) out.adj[v].push_back(u);
            }
        }
        for (int x : touched) dist[x] = -1;
    }
    for (int v = 0; v < g.n; ++v) {
        auto& aa = out.adj[v];
        std::sort(aa.begin(), aa.end());
        out.max_degree = std::max(out.max_degree, int(aa.size()));
    }
    return out;
}

std::vector<NodeSubset> components(const Graph& g, const NodeSubset& s) {
    LLL_CHECK(s.universe_size() == g.n, "components: subset universe mismatch");
    std::vector<NodeSubset> out;
    std::vector<bool> seen(g.n, false);
    std::vector<int> queue;
    for (int v = 0; v < g.n; ++v) {
        if (!s.contains(v) || seen[v]) continue;
        NodeSubset comp(g.n);
        queue.clear();
        queue.push_back(v);
        seen[v] = true;
        comp.add(v);
        for (std::size_t head = 0; head < queue.size(); ++head) {
            int x = queue[head];
            for (int u : g.adj[x]) {
                if (seen[u] || !s.contains(u)) continue;
                seen[u] = true;
                comp.add(u);
                queue.push_back(u);
            }
        }
        out.push_back(std::move(comp));
    }
    return out;
}

NodeSubset ball(const Graph& g, int v, int r) {
    if (v < 0 || v >= g.n) throw parameter_error("ball: node out of range");
    if (r < 0) throw parameter_error("ball: radius must be >= 0");
    NodeSubset out(g.n);
    auto dist = bfs_distances(g, v, nullptr, r);
    for (int u = 0; u < g.n; ++u)
        if (dist[u] != -1) out.add(u);
    return out;
}

std::vector<int> distance_k_coloring(const Graph& g, int k) {
    if (k < 1) throw parameter_error("distance_k_coloring: k must be >= 1");
    // Greedy over ascending ids: smallest color unused within distance k.
    std::vector<int> color(g.n, -1);
    std::vector<int> dist(g.n, -1);
    std::vector<int> touched, queue, used;
    for (int v = 0; v < g.n; ++v) {
        touched.clear();
        queue.clear();
        used.clear();
        dist[v] = 0;
        queue.push_back(v);
        touched.push_back(v);
        for (std::size_t head = 0; head < queue.size(); ++head) {
            int x = queue[head];
            if (dist[x] >= k) continue;
            for (int u : g.adj[x]) {
                if (dist[u] != -1) continue;
                dist[u] = dist[x] + 1;
                queue.push_back(u);
                touched.push_back(u);
                if (color[u] >= 0) used.push_back(color[u]);
            }
        }
        std::sort(used.begin(), used.end());
        int c = 0;
        for (int uc : used) {
            if (uc == c) ++c;
            else if (uc > c) break;
        }
        color[v] = c;
        for (int x : touched) dist[x] = -1;
    }
    return color;
}

NodeSubset ruling_set(const Graph& g, int alpha, int beta) {
    if (alpha < 2) throw parameter_error("ruling_set: alpha must be >= 2");
    if (beta < alpha - 1)
        throw parameter_error("ruling_set: beta must be >= alpha - 1");
    NodeSubset s(g.n);
    // dist_to_s[v] = distance to nearest selected node seen so far, capped at
    // alpha (values >= alpha are not tracked).
    std::vector<int> dist_to_s(g.n, -1);
    std::vector<int> queue;
    for (int v = 0; v < g.n; ++v) {
        if (dist_to_s[v] != -1) continue;  // within alpha-1 of the set
        s.add(v);
        queue.clear();
        dist_to_s[v] = 0;
        queue.push_back(v);
        for (std::size_t head = 0; head < queue.size(); ++head) {
            int x = queue[head];
            if (dist_to_s[x] >= alpha - 1) continue;
            for (int u : g.adj[x]) {
                int nd = dist_to_s[x] + 1;
                if (dist_to_s[u] == -1 || dist_to_s[u] > nd) {
                    dist_to_s[u] = nd;
                    queue.push_back(u);
                }
            }
        }
    }
    return s;
}

int component_diameter(const Graph& g, const NodeSubset& comp) {
    int diam = 0;
    comp.for_each([&](int v) {
        auto dist = bfs_distances(g, v, &comp);
        comp.for_each([&](int u) {
            LLL_CHECK(dist[u] >= 0, "component_diameter: set not connected");
            diam = std::max(diam, dist[u]);
        });
    });
    return diam;
}

InducedGraph induced_subgraph(const Graph& g, const NodeSubset& s) {
    InducedGraph out;
    out.to_local.assign(g.n, -1);
    s.for_each([&](int v) {
        out.to_local[v] = int(out.to_global.size());
        out.to_global.push_back(v);
    });
    out.graph = Graph(int(out.to_global.size()));
    for (int lv = 0; lv < out.graph.n; ++lv) {
        int v = out.to_global[lv];
        for (int u : g.adj[v]) {
            int lu = out.to_local[u];
            if (lu != -1) out.graph.adj[lv].push_back(lu);
        }
        out.graph.max_degree =
            std::max(out.graph.max_degree, int(out.graph.adj[lv].size()));
    }
    return out;
}

void PowerView::neighbors(int v, std::vector<int>& stamp, int& stamp_gen,
                          std::vector<int>& queue, std::vector<int>& out) const {
    out.clear();
    ++stamp_gen;
    queue.clear();
    stamp[v] = stamp_gen;
    queue.push_back(v);
    std::size_t level_end = 1;
    int depth = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        if (head == level_end) {
            ++depth;
            level_end = queue.size();
        }
        if (depth >= k) break;
        int x = queue[head];
        for (int u : g->adj[x]) {
            if (stamp[u] == stamp_gen) continue;
            stamp[u] = stamp_gen;
            queue.push_back(u);
            if (u != v && member(u)) out.push_back(u);
        }
    }
    std::sort(out.begin(), out.end());
}

std::vector<std::vector<int>> view_components(const PowerView& view) {
    const int n = view.universe();
    std::vector<std::vector<int>> comps;
    std::vector<bool> seen(n, false);
    std::vector<int> stamp(n, 0), scratch_q, nbrs, queue;
    int gen = 0;
    for (int v = 0; v < n; ++v) {
        if (!view.member(v) || seen[v]) continue;
        std::vector<int> comp;
        queue.clear();
        queue.push_back(v);
        seen[v] = true;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            int x = queue[head];
            comp.push_back(x);
            view.neighbors(x, stamp, gen, scratch_q, nbrs);
            for (int u : nbrs) {
                if (!seen[u]) {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
    }
    return comps;
}

int view_eccentricity(const PowerView& view, int src) {
    const int n = view.universe();
    std::vector<int> dist(n, -1), stamp(n, 0), scratch_q, nbrs, queue;
    int gen = 0;
    dist[src] = 0;
    queue.push_back(src);
    int ecc = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        int x = queue[head];
        ecc = std::max(ecc, dist[x]);
        view.neighbors(x, stamp, gen, scratch_q, nbrs);
        for (int u : nbrs) {
            if (dist[u] == -1) {
                dist[u] = dist[x] + 1;
                queue.push_back(u);
            }
        }
    }
    return ecc;
}

std::vector<int> view_ruling_set(const PowerView& view, const std::vector<int>& comp,
                                 int alpha) {
    const int n = view.universe();
    std::vector<int> dist_to_s(n, -1), stamp(n, 0), scratch_q, nbrs, queue;
    int gen = 0;
    std::vector<int> s;
    for (int v : comp) {
        if (dist_to_s[v] != -1) continue;
        s.push_back(v);
        queue.clear();
        dist_to_s[v] = 0;
        queue.push_back(v);
        for (std::size_t head = 0; head < queue.size(); ++head) {
            int x = queue[head];
            if (dist_to_s[x] >= alpha - 1) continue;
            view.neighbors(x, stamp, gen, scratch_q, nbrs);
            for (int u : nbrs) {
                int nd = dist_to_s[x] + 1;
                if (dist_to_s[u] == -1 || dist_to_s[u] > nd) {
                    dist_to_s[u] = nd;
                    queue.push_back(u);
                }
            }
        }
    }
    return s;
}

Graph parse_edge_list(const std::string& text) {
    std::istringstream in(text);
    int n = 0;
    long long m = -1;
    if (!(in >> n >> m)) throw parameter_error("edge list: bad header");
    if (n < 0 || m < 0) throw parameter_error("edge list: negative header");
    std::vector<std::pair<int, int>> edges;
    edges.reserve(std::size_t(m));
    for (long long i = 0; i < m; ++i) {
        int u, v;
        if (!(in >> u >> v)) throw parameter_error("edge list: truncated");
        if (!(0 <= u && u < v && v < n))
            throw parameter_error("edge list: requires 0 <= u < v < n");
        edges.emplace_back(u, v);
    }
    auto sorted = edges;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw parameter_error("edge list: duplicate edge");
    return Graph::from_edges(n, edges);
}

Graph read_edge_list(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw parameter_error("cannot open graph file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_edge_list(ss.str());
}

std::string format_edge_list(const Graph& g) {
    std::ostringstream out;
    out << g.n << ' ' << g.edge_count() << '\n';
    for (int v = 0; v < g.n; ++v)
        for (int u : g.adj[v])
            if (v < u) out << v << ' ' << u << '\n';
    return out.str();
}

void write_edge_list(const Graph& g, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw parameter_error("cannot write graph file: " + path);
    f << format_edge_list(g);
}

}  // namespace lll
