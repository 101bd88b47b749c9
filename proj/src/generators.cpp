#include "lll/generators.hpp"

#include <algorithm>
#include <set>

namespace lll {

Graph path_graph(int n) {
    if (n < 1) throw parameter_error("path_graph: n must be >= 1");
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return Graph::from_edges(n, e);
}

Graph cycle_graph(int n) {
    if (n < 3) throw parameter_error("cycle_graph: n must be >= 3");
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i)
        e.emplace_back(std::min(i, (i + 1) % n), std::max(i, (i + 1) % n));
    return Graph::from_edges(n, e);
}

Graph grid_graph(int rows, int cols) {
    if (rows < 1 || cols < 1) throw parameter_error("grid_graph: dimensions must be >= 1");
    std::vector<std::pair<int, int>> e;
    auto id = [&](int r, int c) { return r * cols + c; };
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            if (c + 1 < cols) e.emplace_back(id(r, c), id(r, c + 1));
            if (r + 1 < rows) e.emplace_back(id(r, c), id(r + 1, c));
        }
    return Graph::from_edges(rows * cols, e);
}

Graph random_regular_graph(int n, int d, Rng& rng, int max_retries) {
    if (n < 1 || d < 0) throw parameter_error("random_regular_graph: bad parameters");
    if (d >= n) throw parameter_error("random_regular_graph: d must be < n");
    if ((std::int64_t(n) * d) % 2 != 0)
        throw parameter_error("random_regular_graph: n*d must be even");
    if (d == 0) return Graph(n);

    std::vector<int> stubs(std::size_t(n) * std::size_t(d));
    for (int v = 0; v < n; ++v)
        for (int i = 0; i < d; ++i) stubs[std::size_t(v) * d + i] = v;

    for (int attempt = 0; attempt < max_retries; ++attempt) {
        auto pool = stubs;
        for (std::size_t i = pool.size(); i > 1; --i)
            std::swap(pool[i - 1], pool[std::size_t(rng.below(i))]);
        std::set<std::pair<int, int>> seen;
        bool stuck = false;
        while (!pool.empty() && !stuck) {
            int a = pool.back();
            pool.pop_back();
            // match the stub against a random partner, rejecting loops and
            // parallel edges locally before giving up on the whole pairing
            int tries = 0;
            while (true) {
                std::size_t idx = std::size_t(rng.below(pool.size()));
                int b = pool[idx];
                auto key = std::make_pair(std::min(a, b), std::max(a, b));
                if (b != a && !seen.count(key)) {
                    seen.insert(key);
                    pool[idx] = pool.back();
                    pool.pop_back();
                    break;
                }
                if (++tries > 200) {
                    stuck = true;
                    break;
                }
            }
        }
        if (!stuck) return Graph::from_edges(n, {seen.begin(), seen.end()});
    }
    throw parameter_error("random_regular_graph: retries exhausted (parameters infeasible?)");
}

Graph gnp_capped_graph(int n, double p, int degree_cap, Rng& rng) {
    if (n < 1 || p < 0.0 || p > 1.0 || degree_cap < 0)
        throw parameter_error("gnp_capped_graph: bad parameters");
    std::vector<int> deg(n, 0);
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) {
            if (!rng.bernoulli(p)) continue;
            if (deg[u] >= degree_cap || deg[v] >= degree_cap) continue;
            edges.emplace_back(u, v);
            ++deg[u];
            ++deg[v];
        }
    return Graph::from_edges(n, edges);
}

namespace {

VariableSpec bernoulli_var(int id, double q) { return {id, 2, {1.0 - q, q}}; }

EventSpec all_ones(int id, std::vector<int> scope) {
    EventSpec ev;
    ev.id = id;
    ev.scope = std::move(scope);
    ev.kind = PredicateKind::Conjunction;
    ev.conj_values.assign(ev.scope.size(), 1);
    return ev;
}

}  // namespace

LLLInstance conjunction_chain_instance(int num_events, int window, double q) {
    if (num_events < 1 || window < 1)
        throw parameter_error("conjunction_chain_instance: bad parameters");
    LLLInstance inst;
    int nvars = num_events + window - 1;
    for (int i = 0; i < nvars; ++i) inst.variables.push_back(bernoulli_var(i, q));
    for (int e = 0; e < num_events; ++e) {
        std::vector<int> scope;
        for (int i = 0; i < window; ++i) scope.push_back(e + i);
        inst.events.push_back(all_ones(e, std::move(scope)));
    }
    inst.finalize();
    return inst;
}

LLLInstance regular_conjunction_instance(int num_events, int d, double q, Rng& rng) {
    auto dep = random_regular_graph(num_events, d, rng);
    LLLInstance inst;
    // one variable per dependency edge
    std::vector<std::vector<int>> incident;
    incident.resize(std::size_t(num_events));
    int var_id = 0;
    for (int v = 0; v < dep.n; ++v)
        for (int u : dep.adj[v]) {
            if (u < v) continue;
            inst.variables.push_back(bernoulli_var(var_id, q));
            incident[std::size_t(v)].push_back(var_id);
            incident[std::size_t(u)].push_back(var_id);
            ++var_id;
        }
    for (int e = 0; e < num_events; ++e)
        inst.events.push_back(all_ones(e, incident[std::size_t(e)]));
    inst.finalize();
    LLL_CHECK(inst.d == d, "regular_conjunction_instance: dependency degree mismatch");
    return inst;
}

LLLInstance threshold_instance(const Graph& g, double q, int t) {
    LLLInstance inst;
    for (int v = 0; v < g.n; ++v) inst.variables.push_back(bernoulli_var(v, q));
    for (int v = 0; v < g.n; ++v) {
        EventSpec ev;
        ev.id = v;
        ev.scope.push_back(v);
        for (int u : g.adj[v]) ev.scope.push_back(u);
        std::sort(ev.scope.begin(), ev.scope.end());
        ev.kind = PredicateKind::Threshold;
        ev.threshold.center = false;
        ev.threshold.targets.assign(ev.scope.size(), 1);
        ev.threshold.cmp = ThresholdCmp::Ge;
        ev.threshold.t = t;
        inst.events.push_back(std::move(ev));
    }
    inst.finalize();
    return inst;
}

}  // namespace lll
