#include "lll/decomp.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace lll {

namespace {

// Grows a ball around v inside the live set until the growth ratio drops
// below 1 + 1/s, i.e. s*|B_r| < (s+1)*|B_{r-1}|. The ratio test at r=0 is
// defined to fail (B_{-1} empty), so r* >= 1 and inner balls are non-empty.
struct CarvedBall {
    int radius = 0;
    std::vector<int> inner;
    std::vector<int> boundary;
};

CarvedBall grow_ball(const Graph& g, int v, std::uint64_t s,
                     const std::vector<char>& live) {
    CarvedBall out;
    std::vector<int> cur{v}, nxt;
    std::vector<int> seen_nodes{v};
    std::vector<char> seen(g.n, 0);
    seen[v] = 1;
    std::uint64_t prev_size = 1;
    std::vector<int> inner{v};
    int r = 0;
    while (true) {
        ++r;
        nxt.clear();
        for (int x : cur) {
            for (int u : g.adj[x]) {
                if (seen[u] || !live[u]) continue;
                seen[u] = 1;
                seen_nodes.push_back(u);
                nxt.push_back(u);
            }
        }
        std::uint64_t cur_size = prev_size + nxt.size();
        if (s * cur_size < (s + 1) * prev_size) {
            out.radius = r;
            out.inner = inner;
            out.boundary = nxt;
            // boundary mass strictly below inner mass / s
            LLL_CHECK(s * out.boundary.size() < out.inner.size(),
                      "ball carving: boundary too heavy");
            return out;
        }
        inner.insert(inner.end(), nxt.begin(), nxt.end());
        prev_size = cur_size;
        cur.swap(nxt);
    }
}

int exact_block_diameter(const Graph& g, const NodeSubset& block) {
    int d = 0;
    for (const auto& comp : components(g, block))
        d = std::max(d, component_diameter(g, comp));
    return d;
}

}  // namespace

NetworkDecomposition ball_carve(const Graph& g, int lambda, std::uint64_t nominal_n,
                                CarveReport* report) {
    if (lambda < 1) throw parameter_error("ball_carve: lambda must be >= 1");
    if (g.n == 0) throw parameter_error("ball_carve: graph must be non-empty");
    std::uint64_t nominal = nominal_n == 0 ? std::uint64_t(g.n) : nominal_n;
    const bool honest = nominal == std::uint64_t(g.n);
    std::uint64_t s = ceil_nth_root(nominal, lambda);
    if (s < 1) s = 1;
    std::uint64_t cap = carve_radius_cap(nominal, lambda);

    CarveReport local;
    CarveReport& rep = report ? *report : local;
    rep = CarveReport{};

    NetworkDecomposition nd;
    nd.universe = NodeSubset::full(g.n);
    std::vector<char> in_block(g.n, 0);
    int max_inner_radius = 0;

    for (int epoch = 1; epoch <= lambda; ++epoch) {
        std::vector<char> live(g.n, 0);
        int remaining = 0;
        for (int v = 0; v < g.n; ++v)
            if (!in_block[v]) {
                live[v] = 1;
                ++remaining;
            }
        if (remaining == 0) break;
        NodeSubset block(g.n);
        bool any = false;
        for (int v = 0; v < g.n; ++v) {
            if (!live[v]) continue;
            auto ballv = grow_ball(g, v, s, live);
            if (honest)
                LLL_CHECK(std::uint64_t(ballv.radius) <= cap,
                          "ball carving: radius exceeds cap");
            rep.steps.push_back({epoch, v, ballv.radius, int(ballv.inner.size()),
                                 int(ballv.boundary.size())});
            rep.max_radius = std::max(rep.max_radius, ballv.radius);
            max_inner_radius = std::max(max_inner_radius, ballv.radius - 1);
            for (int u : ballv.inner) {
                block.add(u);
                in_block[u] = 1;
                live[u] = 0;
            }
            for (int u : ballv.boundary) live[u] = 0;  // deferred to later epochs
            any = true;
        }
        if (any) nd.blocks.push_back(std::move(block));
    }

    int leftovers = 0;
    for (int v = 0; v < g.n; ++v) leftovers += !in_block[v];
    int cleanup_diam = 0;
    if (leftovers > 0) {
        NodeSubset block(g.n);
        for (int v = 0; v < g.n; ++v)
            if (!in_block[v]) block.add(v);
        cleanup_diam = exact_block_diameter(g, block);
        nd.blocks.push_back(std::move(block));
        nd.cleanup_used = true;
        rep.cleanup_used = true;
    }

    nd.claimed_C = int(nd.blocks.size());
    nd.claimed_D = std::max(2 * max_inner_radius, cleanup_diam);
    return nd;
}

int helper_power_radius(const Graph& g, int lambda, std::uint64_t nominal_n) {
    std::uint64_t nominal = nominal_n == 0 ? std::uint64_t(g.n) : nominal_n;
    return int(2 * carve_radius_cap(nominal, lambda) + 1);
}

NetworkDecomposition default_carve_helper(const Graph& g, int lambda,
                                          std::uint64_t nominal_n) {
    // Stand-in for a round-efficient helper construction: carve the power
    // graph directly. Only validity of the result matters downstream.
    int dd = helper_power_radius(g, lambda, nominal_n);
    auto gpow = power_graph(g, dd);
    std::uint64_t nominal = nominal_n == 0 ? std::uint64_t(g.n) : nominal_n;
    int helper_lambda =
        std::max<int>(1, int(std::ceil(std::sqrt(std::log2(std::max<double>(2.0, double(nominal)))))));
    return ball_carve(gpow, helper_lambda);
}

NetworkDecomposition ball_carve_distributed(const Graph& g, int lambda,
                                            const NetworkDecomposition& helper,
                                            RoundLedger& ledger,
                                            std::uint64_t nominal_n,
                                            CarveReport* report) {
    if (lambda < 1) throw parameter_error("ball_carve_distributed: lambda must be >= 1");
    if (g.n == 0) throw parameter_error("ball_carve_distributed: graph must be non-empty");
    std::uint64_t nominal = nominal_n == 0 ? std::uint64_t(g.n) : nominal_n;
    const bool honest = nominal == std::uint64_t(g.n);
    std::uint64_t s = ceil_nth_root(nominal, lambda);
    if (s < 1) s = 1;
    std::uint64_t cap = carve_radius_cap(nominal, lambda);
    int dd = helper_power_radius(g, lambda, nominal_n);

    auto gpow = power_graph(g, dd);
    auto helper_check = validate_decomposition(gpow, helper);
    if (!helper_check.pass)
        throw validation_error("ball_carve_distributed: helper decomposition invalid: " +
                               helper_check.detail);

    // Units: components of each helper color class in g^dd; two units of the
    // same class are > dd apart in g, so their carvings cannot interact.
    std::vector<std::vector<std::vector<int>>> units(helper.blocks.size());
    for (std::size_t j = 0; j < helper.blocks.size(); ++j)
        for (const auto& comp : components(gpow, helper.blocks[j]))
            units[j].push_back(comp.to_vector());

    CarveReport local;
    CarveReport& rep = report ? *report : local;
    rep = CarveReport{};

    NetworkDecomposition nd;
    nd.universe = NodeSubset::full(g.n);
    // status: 0 unprocessed, 1 in block, 2 discarded this epoch
    std::vector<char> status(g.n, 0);
    int max_inner_radius = 0;

    for (int epoch = 1; epoch <= lambda; ++epoch) {
        NodeSubset block(g.n);
        bool block_used = false;
        for (std::size_t j = 0; j < units.size(); ++j) {
            int phase_max_radius = 0;
            bool phase_work = false;
            for (const auto& unit : units[j]) {
                std::vector<char> live(g.n, 0);
                for (int v = 0; v < g.n; ++v) live[v] = (status[v] == 0);
                for (int v : unit) {
                    if (status[v] != 0) continue;
                    auto ballv = grow_ball(g, v, s, live);
                    if (honest)
                        LLL_CHECK(std::uint64_t(ballv.radius) <= cap,
                                  "distributed carving: radius exceeds cap");
                    rep.steps.push_back({epoch, v, ballv.radius, int(ballv.inner.size()),
                                         int(ballv.boundary.size())});
                    rep.max_radius = std::max(rep.max_radius, ballv.radius);
                    max_inner_radius = std::max(max_inner_radius, ballv.radius - 1);
                    phase_max_radius = std::max(phase_max_radius, ballv.radius);
                    for (int u : ballv.inner) {
                        block.add(u);
                        status[u] = 1;
                        live[u] = 0;
                    }
                    for (int u : ballv.boundary) {
                        status[u] = 2;
                        live[u] = 0;
                    }
                    phase_work = true;
                    block_used = true;
                }
            }
            if (phase_work) {
                std::ostringstream label;
                label << "carve:epoch" << epoch << ":phase" << j;
                ledger.charge(label.str(),
                              std::uint64_t(helper.claimed_D) * std::uint64_t(dd) +
                                  std::uint64_t(phase_max_radius));
            }
        }
        if (block_used) nd.blocks.push_back(std::move(block));
        for (int v = 0; v < g.n; ++v)
            if (status[v] == 2) status[v] = 0;
    }

    int leftovers = 0;
    for (int v = 0; v < g.n; ++v) leftovers += (status[v] == 0);
    int cleanup_diam = 0;
    if (leftovers > 0) {
        NodeSubset block(g.n);
        for (int v = 0; v < g.n; ++v)
            if (status[v] == 0) block.add(v);
        cleanup_diam = exact_block_diameter(g, block);
        nd.blocks.push_back(std::move(block));
        nd.cleanup_used = true;
        rep.cleanup_used = true;
    }
    nd.claimed_C = int(nd.blocks.size());
    nd.claimed_D = std::max(2 * max_inner_radius, cleanup_diam);
    return nd;
}

DecompositionReport validate_decomposition(const Graph& g, const NetworkDecomposition& nd) {
    DecompositionReport rep;
    std::ostringstream detail;

    NodeSubset seen(g.n);
    rep.partition_ok = true;
    for (const auto& block : nd.blocks) {
        if (block.universe_size() != g.n) {
            rep.partition_ok = false;
            detail << "block universe mismatch; ";
            break;
        }
        if (block.intersects(seen)) {
            rep.partition_ok = false;
            detail << "blocks overlap; ";
            break;
        }
        block.for_each([&](int v) { seen.add(v); });
    }
    if (rep.partition_ok && !(seen == nd.universe)) {
        rep.partition_ok = false;
        detail << "blocks do not cover the universe; ";
    }

    int nonempty = 0;
    for (const auto& block : nd.blocks) nonempty += !block.empty();
    rep.measured_C = nonempty;
    rep.count_ok = int(nd.blocks.size()) <= nd.claimed_C;
    if (!rep.count_ok) detail << "block count exceeds claimed C; ";

    rep.measured_D = 0;
    if (rep.partition_ok) {
        for (const auto& block : nd.blocks)
            for (const auto& comp : components(g, block))
                rep.measured_D = std::max(rep.measured_D, component_diameter(g, comp));
    }
    rep.diameter_ok = rep.partition_ok && rep.measured_D <= nd.claimed_D;
    if (!rep.diameter_ok)
        detail << "measured diameter " << rep.measured_D << " exceeds claimed "
               << nd.claimed_D << "; ";

    rep.pass = rep.partition_ok && rep.count_ok && rep.diameter_ok;
    rep.detail = detail.str();
    return rep;
}

namespace {

// Shared pipeline: ruling set per view-component, nearest-ruler clustering
// (ties to the minimum ruler id), carve the contracted cluster graph, lift.
NetworkDecomposition shatter_impl(const PowerView& view, int lambda, RoundLedger& ledger,
                                  std::uint64_t nominal_n, int* out_max_carve_radius) {
    const int n = view.universe();
    const int alpha = 11;  // 4*c2 + 3 with c2 = 2
    const int beta = alpha - 1;

    NetworkDecomposition nd;
    nd.universe = view.sub ? *view.sub : NodeSubset::full(n);
    if (nd.universe.empty()) {
        nd.claimed_C = 0;
        nd.claimed_D = 0;
        return nd;
    }

    auto comps = view_components(view);
    nd.blocks.assign(std::size_t(lambda) + 1, NodeSubset(n));
    int blocks_used = 0;
    bool cleanup = false;
    int max_carve_radius = 0;

    std::vector<int> stamp(n, 0), scratch_q, nbrs;
    int gen = 0;

    for (const auto& comp : comps) {
        auto rulers = view_ruling_set(view, comp, alpha);
        // Nearest-ruler clustering by level-synchronized BFS; a node's owner
        // is the minimum owner among its previous-level parents, which equals
        // the minimum-id nearest ruler.
        std::vector<int> owner(n, -1);
        std::vector<int> level(n, -1);
        std::vector<int> frontier, next;
        for (int r : rulers) {
            owner[r] = r;
            level[r] = 0;
            frontier.push_back(r);
        }
        int cur_level = 0;
        while (!frontier.empty()) {
            next.clear();
            for (int x : frontier) {
                view.neighbors(x, stamp, gen, scratch_q, nbrs);
                for (int u : nbrs) {
                    if (owner[u] == -1) {
                        owner[u] = owner[x];
                        level[u] = cur_level + 1;
                        next.push_back(u);
                    } else if (level[u] == cur_level + 1 && owner[x] < owner[u]) {
                        // Same-level relaxation keeps the min-id nearest ruler.
                        owner[u] = owner[x];
                    }
                }
            }
            frontier.swap(next);
            ++cur_level;
        }

        // Contract clusters and carve the contracted graph.
        std::vector<int> ruler_index(n, -1);
        std::vector<std::vector<int>> cluster_members(rulers.size());
        for (std::size_t i = 0; i < rulers.size(); ++i) ruler_index[rulers[i]] = int(i);
        for (int u : comp) cluster_members[std::size_t(ruler_index[owner[u]])].push_back(u);
        std::set<std::pair<int, int>> cedges;
        for (int u : comp) {
            view.neighbors(u, stamp, gen, scratch_q, nbrs);
            for (int w : nbrs) {
                int a = ruler_index[owner[u]], b = ruler_index[owner[w]];
                if (a != b) cedges.insert({std::min(a, b), std::max(a, b)});
            }
        }
        Graph contracted = Graph::from_edges(
            int(rulers.size()), {cedges.begin(), cedges.end()});
        CarveReport crep;
        std::uint64_t carve_nominal =
            nominal_n == 0 ? std::uint64_t(contracted.n)
                           : std::min<std::uint64_t>(nominal_n, std::uint64_t(contracted.n));
        auto cnd = ball_carve(contracted, lambda, carve_nominal, &crep);
        max_carve_radius = std::max(max_carve_radius, crep.max_radius);
        cleanup = cleanup || cnd.cleanup_used;

        for (std::size_t bi = 0; bi < cnd.blocks.size(); ++bi) {
            bool used = false;
            cnd.blocks[bi].for_each([&](int cluster_local) {
                for (int u : cluster_members[std::size_t(cluster_local)])
                    nd.blocks[bi].add(u);
                used = true;
            });
            if (used) blocks_used = std::max(blocks_used, int(bi) + 1);
        }
    }

    nd.blocks.resize(std::size_t(blocks_used));
    nd.claimed_C = blocks_used;
    nd.cleanup_used = cleanup;
    if (out_max_carve_radius) *out_max_carve_radius = max_carve_radius;

    ledger.charge("shatter:ruling-set", alpha);
    ledger.charge("shatter:cluster", beta);
    ledger.charge("shatter:carve",
                  std::uint64_t(2 * beta + 1) * std::uint64_t(2 * max_carve_radius + 1));
    return nd;
}

}  // namespace

NetworkDecomposition shattered_decomposition(const Graph& g, const NodeSubset& b,
                                             int lambda, RoundLedger& ledger,
                                             std::uint64_t nominal_n) {
    PowerView view{&g, 1, &b};
    NetworkDecomposition nd = shatter_impl(view, lambda, ledger, nominal_n, nullptr);
    // Exact measured diameter; the output must validate against itself.
    int measured = 0;
    for (const auto& block : nd.blocks)
        for (const auto& comp : components(g, block))
            measured = std::max(measured, component_diameter(g, comp));
    nd.claimed_D = measured;
    auto rep = validate_decomposition(g, nd);
    LLL_CHECK(rep.pass, "shattered decomposition failed self-validation");
    return nd;
}

NetworkDecomposition shattered_decomposition_view(const PowerView& view, int lambda,
                                                  RoundLedger& ledger,
                                                  std::uint64_t nominal_n) {
    NetworkDecomposition nd = shatter_impl(view, lambda, ledger, nominal_n, nullptr);
    // Diameter bound per block component: 2 * eccentricity of min-id node.
    int bound = 0;
    for (const auto& block : nd.blocks) {
        PowerView bview{view.g, view.k, &block};
        for (const auto& comp : view_components(bview))
            bound = std::max(bound, 2 * view_eccentricity(bview, comp.front()));
    }
    nd.claimed_D = bound;
    return nd;
}

}  // namespace lll
