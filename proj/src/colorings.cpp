#include "lll/colorings.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace lll {

namespace {

double log2sq(double x) {
    double l = std::log2(std::max(2.0, x));
    return l * l;
}

int count_distinct(const std::vector<int>& xs) {
    auto s = xs;
    std::sort(s.begin(), s.end());
    return int(std::unique(s.begin(), s.end()) - s.begin());
}

//
// --- bucketing ---------------------------------------------------------------
//

void assert_bucket_caps(const Graph& g, const std::vector<int>& bucket_of, int delta_p) {
    for (int v = 0; v < g.n; ++v) {
        int same = 0;
        for (int u : g.adj[v]) same += (bucket_of[u] == bucket_of[v]);
        LLL_CHECK(same <= delta_p, "bucketing: same-bucket degree exceeds bound");
    }
}

}  // namespace

BucketState bucket_once(const Graph& g, int delta_p, int k, const SeedContext& ctx,
                        RoundLedger& ledger, std::uint64_t phase_salt) {
    if (k < 1) throw parameter_error("bucket_once: k must be >= 1");
    if (delta_p < 1) throw parameter_error("bucket_once: delta_p must be >= 1");

    BucketState st;
    st.k = k;
    st.delta_p = delta_p;
    st.bucket_of.assign(g.n, 0);
    st.overflow = NodeSubset(g.n);

    std::uint64_t draw_phase = phase_id(PhaseKind::BucketDraw, phase_salt);
    for (int v = 0; v < g.n; ++v) {
        auto rng = ctx.stream(std::uint64_t(v), draw_phase);
        st.bucket_of[v] = int(rng.below(std::uint64_t(k)));
    }
    ledger.charge("bucket:overflow-count", 1);
    for (int v = 0; v < g.n; ++v) {
        int same = 0;
        for (int u : g.adj[v]) same += (st.bucket_of[u] == st.bucket_of[v]);
        if (same > delta_p) st.overflow.add(v);
    }

    if (!st.overflow.empty()) {
        // Re-bucket the overflow set into k fresh buckets: one center-match
        // threshold event per overflow node over its overflow neighbors.
        auto members = st.overflow.to_vector();
        std::vector<int> local(g.n, -1);
        for (std::size_t i = 0; i < members.size(); ++i) local[members[i]] = int(i);

        LLLInstance inst;
        int dom = std::max(2, k);  // variable domains are at least binary
        std::vector<double> uniform(std::size_t(dom), 0.0);
        for (int c = 0; c < k; ++c) uniform[std::size_t(c)] = 1.0 / double(k);
        double s = 0;
        for (double q : uniform) s += q;
        uniform[0] += 1.0 - s;
        for (std::size_t i = 0; i < members.size(); ++i)
            inst.variables.push_back({int(i), dom, uniform});
        for (std::size_t i = 0; i < members.size(); ++i) {
            EventSpec ev;
            ev.id = int(i);
            ev.scope.push_back(int(i));
            for (int u : g.adj[members[i]])
                if (local[u] != -1) ev.scope.push_back(local[u]);
            ev.kind = PredicateKind::Threshold;
            ev.threshold.center = true;
            ev.threshold.cmp = ThresholdCmp::Ge;
            ev.threshold.t = delta_p + 1;
            inst.events.push_back(std::move(ev));
        }
        inst.finalize();

        // Decomposition of g^2 on the overflow set, mapped onto event ids
        // (events and overflow nodes are in 1:1 correspondence).
        PowerView view{&g, 2, &st.overflow};
        auto nd_nodes = shattered_decomposition_view(view, 2, ledger);
        NetworkDecomposition nd;
        nd.universe = NodeSubset::full(int(members.size()));
        nd.claimed_C = nd_nodes.claimed_C;
        nd.claimed_D = nd_nodes.claimed_D;
        nd.cleanup_used = nd_nodes.cleanup_used;
        for (const auto& block : nd_nodes.blocks) {
            NodeSubset eb(int(members.size()));
            block.for_each([&](int v) { eb.add(local[v]); });
            nd.blocks.push_back(std::move(eb));
        }

        PartialAssignment pa(inst.num_vars());
        SolverConfig cfg;
        cfg.det_retry_fallback = true;
        det_lll(inst, pa, nd, inst.p, ledger, cfg, &ctx, phase_salt);
        for (std::size_t i = 0; i < members.size(); ++i)
            st.bucket_of[members[i]] = k + pa.value(int(i));
    }

    assert_bucket_caps(g, st.bucket_of, delta_p);
    return st;
}

ColoringResult defective_coloring(const Graph& g, int f, const SeedContext& ctx,
                                  RoundLedger& ledger, std::uint64_t phase_salt) {
    if (f < 0) throw parameter_error("defective_coloring: f must be >= 0");
    ColoringResult res;
    const int delta = g.max_degree;

    if (f >= delta) {
        res.color_of.assign(g.n, 0);
        res.cap = 1.0;
    } else if (f == 0) {
        res.color_of = distance_k_coloring(g, 1);
        res.cap = double(delta) + 1.0;
        ledger.charge("defective:greedy", std::uint64_t(log2_star(double(std::max(2, g.n)))));
    } else {
        // Bucketing schedule; each level splits every current group. The map
        // x -> ceil(log2(x)^5) contracts only for astronomically large x, so
        // at this scale the pipeline jumps straight to the final step.
        std::vector<std::pair<int, int>> levels;  // (target degree, k)
        double cap = 1.0;
        int cur = delta;
        while (true) {
            int next = int(std::ceil(std::pow(std::log2(double(cur)), 5.0)));
            if (next >= cur) {
                if (cur > f) res.clamped = true;
                break;
            }
            if (next <= f) break;
            double eps = log2sq(double(cur)) / std::sqrt(double(next));
            int kk = std::max(1, int(std::ceil((1.0 + eps) * double(cur) / double(next))));
            levels.emplace_back(next, kk);
            cur = next;
        }
        {
            double eps = log2sq(double(cur)) / std::sqrt(double(f));
            int kk = std::max(1, int(std::ceil((1.0 + eps) * double(cur) / double(f))));
            levels.emplace_back(f, kk);
        }

        // group nodes by bucket path; each group is re-bucketed independently
        std::vector<std::int64_t> path(g.n, 0);
        std::uint64_t level_idx = 0;
        for (auto [target, kk] : levels) {
            cap *= 2.0 * double(kk);
            std::map<std::int64_t, std::vector<int>> groups;
            for (int v = 0; v < g.n; ++v) groups[path[v]].push_back(v);
            for (auto& [pid, nodes] : groups) {
                NodeSubset sub = NodeSubset::of(g.n, nodes);
                auto ind = induced_subgraph(g, sub);
                auto st = bucket_once(ind.graph, target, kk, ctx, ledger,
                                      phase_id(PhaseKind::BucketDraw,
                                               phase_salt * 7919 + level_idx,
                                               std::uint64_t(pid)));
                for (int lv = 0; lv < ind.graph.n; ++lv)
                    path[ind.to_global[lv]] =
                        path[ind.to_global[lv]] * (2 * kk) + st.bucket_of[lv];
            }
            ++level_idx;
        }
        res.color_of.assign(g.n, 0);
        // compact path ids into dense colors, order-preserving
        {
            std::vector<std::int64_t> sorted(path.begin(), path.end());
            std::sort(sorted.begin(), sorted.end());
            sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
            for (int v = 0; v < g.n; ++v)
                res.color_of[v] = int(std::lower_bound(sorted.begin(), sorted.end(), path[v]) -
                                      sorted.begin());
        }
        res.cap = cap;
    }

    VerifyMode mode;
    mode.kind = VerifyMode::Defective;
    mode.f = f;
    res.report = verify_coloring(g, res.color_of, mode);
    res.report.cap = res.cap;
    res.colors_used = res.report.colors_used;
    res.verified = res.report.pass;
    res.palette_watermark = res.colors_used;
    LLL_CHECK(res.verified, "defective_coloring: verification failed");
    return res;
}

//
// --- frugal coloring ----------------------------------------------------------
//

PartialFrugal make_frugal_state(const Graph& g, int beta) {
    PartialFrugal st;
    st.color_of.assign(g.n, -1);
    st.uncolored = NodeSubset::full(g.n);
    st.beta = beta;
    st.palette_watermark = 0;
    return st;
}

namespace {

// Checks the partial-frugal invariants: proper on colored nodes, and no node
// of the base graph sees any color more than beta times.
void assert_partial_frugal(const Graph& g, const std::vector<int>& color_of, int beta) {
    std::vector<int> nbr_colors;
    for (int v = 0; v < g.n; ++v) {
        nbr_colors.clear();
        for (int u : g.adj[v]) {
            if (color_of[u] < 0) continue;
            if (color_of[v] >= 0)
                LLL_CHECK(color_of[u] != color_of[v], "frugal: properness violated");
            nbr_colors.push_back(color_of[u]);
        }
        std::sort(nbr_colors.begin(), nbr_colors.end());
        int run = 1;
        for (std::size_t i = 1; i < nbr_colors.size(); ++i) {
            run = (nbr_colors[i] == nbr_colors[i - 1]) ? run + 1 : 1;
            LLL_CHECK(run <= beta, "frugal: frugality violated");
        }
    }
}

struct FrugalSampleOutcome {
    std::vector<std::pair<int, int>> kept;  // (node, color)
    std::vector<int> still_uncolored;
};

// One x-step pass of the partial-coloring sampling process restricted to
// `participants` (a subset of the currently uncolored nodes). All draws come
// from fresh disjoint palettes starting at palette_base, so they can never
// collide with previously assigned colors. When `step_check` is non-null the
// partial-frugal invariants are asserted after every step against that
// baseline coloring.
FrugalSampleOutcome frugal_sample_pass(const Graph& g,
                                       const std::vector<int>& participants, int beta,
                                       int x, int palette_size,
                                       std::int64_t palette_base, const SeedContext& ctx,
                                       std::uint64_t phase_base,
                                       const std::vector<int>* step_check = nullptr) {
    FrugalSampleOutcome out;
    const int n = g.n;
    std::vector<char> is_part(n, 0);
    for (int v : participants) is_part[v] = 1;

    // all draws upfront: draws[j][v]
    std::vector<std::vector<int>> draws;
    draws.resize(std::size_t(x));
    for (int j = 0; j < x; ++j) {
        draws[std::size_t(j)].assign(n, -1);
        for (int v : participants) {
            auto rng = ctx.stream(std::uint64_t(v), phase_base + std::uint64_t(j));
            draws[std::size_t(j)][v] = int(rng.below(std::uint64_t(palette_size)));
        }
    }

    std::vector<char> undecided(n, 0);
    for (int v : participants) undecided[v] = 1;
    std::vector<char> flagged(n, 0);
    std::vector<std::pair<int, int>> hist;  // (color, node) scratch

    for (int j = 0; j < x; ++j) {
        const auto& cj = draws[std::size_t(j)];
        for (int v : participants) flagged[v] = 0;

        // M_j: a participant neighbor drew the same color this step.
        for (int v : participants) {
            if (!undecided[v]) continue;
            for (int u : g.adj[v])
                if (is_part[u] && cj[u] == cj[v]) {
                    flagged[v] = 1;
                    break;
                }
        }
        // F_j: some base node u has beta+1 participant neighbors sharing one
        // draw; all of them are involved in a potentially non-frugal group.
        for (int u = 0; u < n; ++u) {
            hist.clear();
            for (int w : g.adj[u])
                if (is_part[w]) hist.emplace_back(cj[w], w);
            if (int(hist.size()) <= beta) continue;
            std::sort(hist.begin(), hist.end());
            std::size_t i = 0;
            while (i < hist.size()) {
                std::size_t e = i;
                while (e < hist.size() && hist[e].first == hist[i].first) ++e;
                if (int(e - i) >= beta + 1)
                    for (std::size_t t = i; t < e; ++t) flagged[hist[t].second] = 1;
                i = e;
            }
        }
        for (int v : participants) {
            if (!undecided[v] || flagged[v]) continue;
            undecided[v] = 0;
            out.kept.emplace_back(
                v, int(palette_base + std::int64_t(j) * palette_size + cj[v]));
        }
        if (step_check) {
            std::vector<int> snapshot = *step_check;
            for (auto [v, c] : out.kept) snapshot[std::size_t(v)] = c;
            assert_partial_frugal(g, snapshot, beta);
        }
    }
    for (int v : participants)
        if (undecided[v]) out.still_uncolored.push_back(v);
    return out;
}

void apply_frugal_outcome(PartialFrugal& st, const FrugalSampleOutcome& out) {
    for (auto [v, c] : out.kept) {
        st.color_of[v] = c;
        st.uncolored.remove(v);
    }
}

int base_degree_into(const Graph& g, const NodeSubset& set, int v) {
    int d = 0;
    for (int u : g.adj[v]) d += set.contains(u);
    return d;
}

int palette_size_for(int delta_p, int delta, int beta) {
    return std::max(1, int(std::ceil(20.0 * double(delta_p) *
                                     std::pow(double(delta), 1.0 / double(beta)))));
}

}  // namespace

PartialFrugal sample_partial_frugal(const Graph& g, const PartialFrugal& state, int delta_p,
                                    int x, const SeedContext& ctx, RoundLedger& ledger,
                                    std::uint64_t phase_salt) {
    if (x < 1) throw parameter_error("sample_partial_frugal: x must be >= 1");
    if (delta_p < 1) throw parameter_error("sample_partial_frugal: delta_p must be >= 1");
    for (int v = 0; v < g.n; ++v)
        LLL_CHECK(base_degree_into(g, state.uncolored, v) <= delta_p,
                  "sample_partial_frugal: delta_p below the actual base-graph degree");

    PartialFrugal st = state;
    int ps = palette_size_for(delta_p, g.max_degree, st.beta);
    auto participants = st.uncolored.to_vector();
    auto out = frugal_sample_pass(g, participants, st.beta, x, ps, st.palette_watermark,
                                  ctx, phase_id(PhaseKind::FrugalDraw, phase_salt),
                                  &st.color_of);
    st.palette_watermark += std::int64_t(x) * ps;
    apply_frugal_outcome(st, out);
    ledger.charge("frugal:sample", 2 * std::uint64_t(x));
    assert_partial_frugal(g, st.color_of, st.beta);
    return st;
}

PartialFrugal frugal_progress_step(const Graph& g, const PartialFrugal& state, int delta_p,
                                   int x, const SeedContext& ctx, RoundLedger& ledger,
                                   std::uint64_t phase_salt) {
    if (state.uncolored.empty()) return state;
    const int delta = g.max_degree;
    PartialFrugal st = sample_partial_frugal(g, state, delta_p, x, ctx, ledger, phase_salt);

    int delta_pp = std::max(1, int(std::ceil(std::pow(5.0, -double(x)) * double(delta_p))));

    // D: nodes still too exposed to the uncolored residue; B: their uncolored
    // neighbors. All of a D-node's B-neighbors share one g^2 component.
    NodeSubset dset(g.n);
    for (int v = 0; v < g.n; ++v)
        if (base_degree_into(g, st.uncolored, v) > delta_pp) dset.add(v);
    NodeSubset bset(g.n);
    dset.for_each([&](int v) {
        for (int u : g.adj[v])
            if (st.uncolored.contains(u)) bset.add(u);
    });

    if (!bset.empty()) {
        int ps = palette_size_for(delta_p, delta, st.beta);
        std::int64_t retry_base = st.palette_watermark;
        st.palette_watermark += std::int64_t(x) * ps;

        PowerView view{&g, 2, &bset};
        auto nd = shattered_decomposition_view(view, 2, ledger);
        (void)nd;  // decomposition drives the round accounting only
        auto comps = view_components(view);
        std::uint64_t comp_idx = 0;
        SolverConfig cfg;
        for (const auto& comp : comps) {
            std::vector<int> watchers;  // D-nodes adjacent to this component
            {
                std::vector<char> seen(g.n, 0);
                for (int u : comp)
                    for (int w : g.adj[u])
                        if (dset.contains(w) && !seen[w]) {
                            seen[w] = 1;
                            watchers.push_back(w);
                        }
            }
            bool ok = false;
            std::uint64_t attempts = 0;
            std::vector<char> uncol(g.n, 0);
            while (!ok && attempts < cfg.bootstrap_retry_cap) {
                ++attempts;
                auto pass = frugal_sample_pass(
                    g, comp, st.beta, x, ps, retry_base, ctx,
                    phase_id(PhaseKind::FrugalRetry,
                             phase_salt * 1000003 + comp_idx, attempts),
                    &st.color_of);
                for (int u : comp) uncol[u] = 0;
                for (int u : pass.still_uncolored) uncol[u] = 1;
                ok = true;
                // A watcher's uncolored neighbors all lie in this component
                // (any two of them are within distance 2, hence g^2-adjacent).
                for (int w : watchers) {
                    int cnt = 0;
                    for (int u : g.adj[w])
                        if (bset.contains(u) && uncol[u]) ++cnt;
                    if (cnt > delta_pp) {
                        ok = false;
                        break;
                    }
                }
                if (ok) {
                    apply_frugal_outcome(st, pass);
                    assert_partial_frugal(g, st.color_of, st.beta);
                }
            }
            if (!ok)
                throw nonconvergence_error(
                    "frugal_progress_step: component retry cap exhausted");
            ledger.charge("frugal:retry", attempts * 5);
            ++comp_idx;
        }
    }

    for (int v = 0; v < g.n; ++v)
        LLL_CHECK(base_degree_into(g, st.uncolored, v) <= delta_pp,
                  "frugal_progress_step: residual base degree exceeds target");
    return st;
}

ColoringResult frugal_coloring(const Graph& g, int beta, const SeedContext& ctx,
                               RoundLedger& ledger) {
    if (beta < 1) throw parameter_error("frugal_coloring: beta must be >= 1");
    ColoringResult res;
    const int delta = g.max_degree;
    res.cap = 120.0 * std::pow(double(delta), 1.0 + 1.0 / double(beta));

    if (beta >= delta) {
        // any proper coloring is beta-frugal here
        res.color_of = distance_k_coloring(g, 1);
        res.palette_watermark = count_distinct(res.color_of);
        ledger.charge("frugal:greedy", std::uint64_t(log2_star(double(std::max(2, g.n)))));
    } else {
        PartialFrugal st = make_frugal_state(g, beta);
        double target = std::sqrt(double(delta));  // completion threshold, c = 1
        int cur = delta;
        int x = 1;
        std::uint64_t iter = 0;
        while (double(cur) > target) {
            int next = int(std::ceil(std::pow(5.0, -double(x)) * double(cur)));
            if (next >= cur) {
                res.clamped = true;
                break;
            }
            st = frugal_progress_step(g, st, cur, x, ctx, ledger, iter);
            cur = next;
            x = int(std::ceil(std::pow(1.25, double(x))));
            ++iter;
        }
        if (!st.uncolored.empty()) {
            // completion: one sampling with x = ceil(delta / delta'), then
            // per-component retries on the residue until fully colored
            int actual = 1;
            for (int v = 0; v < g.n; ++v)
                actual = std::max(actual, base_degree_into(g, st.uncolored, v));
            int xfin = std::max(1, int(std::ceil(double(delta) / double(actual))));
            int ps = palette_size_for(actual, delta, beta);
            auto participants = st.uncolored.to_vector();
            auto pass = frugal_sample_pass(g, participants, beta, xfin, ps,
                                           st.palette_watermark, ctx,
                                           phase_id(PhaseKind::FrugalDraw, 1u << 20),
                                           &st.color_of);
            st.palette_watermark += std::int64_t(xfin) * ps;
            apply_frugal_outcome(st, pass);
            ledger.charge("frugal:completion-sample", 2 * std::uint64_t(xfin));
            assert_partial_frugal(g, st.color_of, beta);

            if (!st.uncolored.empty()) {
                std::int64_t retry_base = st.palette_watermark;
                st.palette_watermark += std::int64_t(xfin) * ps;
                NodeSubset residue = st.uncolored;
                PowerView view{&g, 2, &residue};
                auto nd = shattered_decomposition_view(view, 2, ledger);
                (void)nd;
                SolverConfig cfg;
                std::uint64_t comp_idx = 0;
                for (const auto& comp : view_components(view)) {
                    bool ok = false;
                    std::uint64_t attempts = 0;
                    while (!ok && attempts < cfg.bootstrap_retry_cap) {
                        ++attempts;
                        auto retry = frugal_sample_pass(
                            g, comp, beta, xfin, ps, retry_base, ctx,
                            phase_id(PhaseKind::FrugalRetry, (1u << 21) + comp_idx,
                                     attempts),
                            &st.color_of);
                        if (retry.still_uncolored.empty()) {
                            apply_frugal_outcome(st, retry);
                            assert_partial_frugal(g, st.color_of, beta);
                            ok = true;
                        }
                    }
                    if (!ok)
                        throw nonconvergence_error(
                            "frugal_coloring: completion retry cap exhausted");
                    ledger.charge("frugal:completion-retry", attempts * 5);
                    ++comp_idx;
                }
            }
        }
        LLL_CHECK(st.uncolored.empty(), "frugal_coloring: uncolored nodes survived");
        res.color_of = st.color_of;
        res.palette_watermark = st.palette_watermark;
    }

    VerifyMode mode;
    mode.kind = VerifyMode::Frugal;
    mode.beta = beta;
    res.report = verify_coloring(g, res.color_of, mode);
    res.report.cap = res.cap;
    res.colors_used = res.report.colors_used;
    res.verified = res.report.pass;
    LLL_CHECK(res.verified, "frugal_coloring: verification failed");
    return res;
}

//
// --- list coloring -------------------------------------------------------------
//

ColorChoiceGraph build_color_choice_graph(const Graph& g,
                                          const std::vector<std::vector<int>>& lists) {
    ColorChoiceGraph cc;
    cc.offset.assign(g.n + 1, 0);
    for (int v = 0; v < g.n; ++v)
        cc.offset[v + 1] = cc.offset[v] + int(lists[v].size());
    int nh = cc.offset[g.n];
    cc.owner.assign(nh, 0);
    cc.color_of.assign(nh, 0);
    for (int v = 0; v < g.n; ++v)
        for (std::size_t i = 0; i < lists[v].size(); ++i) {
            cc.owner[cc.offset[v] + int(i)] = v;
            cc.color_of[cc.offset[v] + int(i)] = lists[v][i];
        }
    std::vector<std::pair<int, int>> edges;
    for (int v = 0; v < g.n; ++v)
        for (std::size_t i = 0; i < lists[v].size(); ++i)
            for (std::size_t j = i + 1; j < lists[v].size(); ++j)
                edges.emplace_back(cc.offset[v] + int(i), cc.offset[v] + int(j));
    for (int v = 0; v < g.n; ++v)
        for (int u : g.adj[v]) {
            if (u < v) continue;
            std::size_t i = 0, j = 0;
            while (i < lists[v].size() && j < lists[u].size()) {
                if (lists[v][i] < lists[u][j]) ++i;
                else if (lists[v][i] > lists[u][j]) ++j;
                else {
                    edges.emplace_back(cc.offset[v] + int(i), cc.offset[u] + int(j));
                    ++i;
                    ++j;
                }
            }
        }
    cc.h = Graph::from_edges(nh, edges);
    return cc;
}

namespace {

enum class VtxState : char { Undecided, Included, Excluded, Frozen };

}  // namespace

ListState prune_once(const Graph& g, const ListState& state, const SeedContext& ctx,
                     RoundLedger& ledger, std::uint64_t phase_salt) {
    const double C = state.C;
    const int L = state.L;
    if (L < int(std::ceil(4.0 * C)))
        throw parameter_error("prune_once: list size below the 4C minimum");
    const double lsq = log2sq(double(L));
    const double k0 = 1.0;  // phase constant

    auto cc = build_color_choice_graph(g, state.lists);
    const int nh = cc.h.n;

    // Schedule: defective coloring of the color-choice graph, one sampling
    // phase per schedule color.
    int fdef = std::max(1, int(std::ceil(double(L) / (2.0 * lsq))));
    auto sched = defective_coloring(cc.h, fdef, ctx, ledger,
                                    phase_id(PhaseKind::PruneFlip, phase_salt, 1));
    std::vector<std::vector<int>> phases;
    {
        std::vector<std::pair<int, int>> by_color(nh);
        for (int w = 0; w < nh; ++w) by_color[w] = {sched.color_of[w], w};
        std::sort(by_color.begin(), by_color.end());
        for (std::size_t i = 0; i < by_color.size();) {
            std::size_t e = i;
            phases.emplace_back();
            while (e < by_color.size() && by_color[e].first == by_color[i].first)
                phases.back().push_back(by_color[e++].second);
            i = e;
        }
    }
    ledger.charge("prune:phases", 2 * std::uint64_t(phases.size()));

    const double t_node = double(L) / (16.0 * k0 * lsq * lsq * lsq);
    const double t_color = double(L) / (16.0 * k0 * C * lsq * lsq * lsq);
    const int out_cap = int(std::ceil((1.0 + 1.0 / lsq) * double(L) / (2.0 * C)));

    std::vector<VtxState> vstate(nh, VtxState::Undecided);
    // included count per (v, color slot): for the cross cap we track, per
    // H-vertex (v,q), how many neighbors u of v currently include q.
    std::vector<int> cross_included(nh, 0);
    auto cross_bump = [&](int w) {
        // H-vertex w = (u,q) became included: bump (v,q) counters of
        // neighbors; exactly the same-color H-edges of w.
        for (int z : cc.h.adj[w])
            if (cc.owner[z] != cc.owner[w]) ++cross_included[z];
    };

    std::uint64_t flip_phase = phase_id(PhaseKind::PruneFlip, phase_salt, 2);
    std::vector<int> z_owner(g.n, 0), kept_owner(g.n, 0);
    std::vector<int> z_cross(nh, 0), kept_cross(nh, 0);
    std::vector<int> touched_owners, touched_cross;

    for (const auto& phase : phases) {
        touched_owners.clear();
        touched_cross.clear();
        for (int w : phase) {
            if (vstate[w] != VtxState::Undecided) continue;
            int v = cc.owner[w];
            auto rng = ctx.stream(std::uint64_t(w), flip_phase);
            bool heads = rng.bernoulli(0.5);
            if (heads) {
                // Cap guard: an include that would break the output conflict
                // cap freezes the choice for the completion stage instead.
                bool would_break = false;
                for (int z : cc.h.adj[w])
                    if (cc.owner[z] != cc.owner[w] && cross_included[z] + 1 > out_cap) {
                        would_break = true;
                        break;
                    }
                if (would_break) {
                    vstate[w] = VtxState::Frozen;
                    continue;
                }
            }
            if (z_owner[v] == 0) touched_owners.push_back(v);
            ++z_owner[v];
            for (int z : cc.h.adj[w])
                if (cc.owner[z] != cc.owner[w]) {
                    if (z_cross[z] == 0) touched_cross.push_back(z);
                    ++z_cross[z];
                }
            if (heads) {
                vstate[w] = VtxState::Included;
                ++kept_owner[v];
                cross_bump(w);
                for (int z : cc.h.adj[w])
                    if (cc.owner[z] != cc.owner[w]) ++kept_cross[z];
            } else {
                vstate[w] = VtxState::Excluded;
            }
        }
        // node rule: too few of this phase's samples kept
        for (int v : touched_owners) {
            int z = z_owner[v];
            if (z >= std::max(1, int(std::floor(t_node))) &&
                kept_owner[v] < int(std::ceil(double(z) / 2.0 - t_node))) {
                for (int w = cc.offset[v]; w < cc.offset[v + 1]; ++w)
                    if (vstate[w] == VtxState::Undecided) vstate[w] = VtxState::Frozen;
            }
        }
        // color rule: too many of this phase's same-color samples kept around
        // some node; freezes all unsampled colors of its neighbors
        for (int z : touched_cross) {
            int zc = z_cross[z];
            if (zc >= std::max(1, int(std::floor(t_color))) &&
                kept_cross[z] > int(std::ceil(double(zc) / 2.0 + t_color))) {
                int v = cc.owner[z];
                for (int u : g.adj[v])
                    for (int w = cc.offset[u]; w < cc.offset[u + 1]; ++w)
                        if (vstate[w] == VtxState::Undecided) vstate[w] = VtxState::Frozen;
            }
        }
        for (int v : touched_owners) z_owner[v] = kept_owner[v] = 0;
        for (int z : touched_cross) z_cross[z] = kept_cross[z] = 0;
    }

    // discard rule
    for (int v = 0; v < g.n; ++v) {
        int fv = 0;
        for (int w = cc.offset[v]; w < cc.offset[v + 1]; ++w)
            fv += (vstate[w] == VtxState::Frozen);
        if (fv > 0 && double(fv) < double(L) / (2.0 * lsq)) {
            for (int w = cc.offset[v]; w < cc.offset[v + 1]; ++w)
                if (vstate[w] == VtxState::Frozen) vstate[w] = VtxState::Excluded;
        }
    }

    // Completion instance over frozen choices: per-node lower bounds and
    // per-(node, color) caps, both phrased against what validity requires.
    std::vector<int> frozen_vertices;
    std::vector<int> var_of(nh, -1);
    for (int w = 0; w < nh; ++w)
        if (vstate[w] == VtxState::Frozen) {
            var_of[w] = int(frozen_vertices.size());
            frozen_vertices.push_back(w);
        }

    auto need_bound = [&](int v) {
        int lv = cc.offset[v + 1] - cc.offset[v];
        return int(std::ceil(double(lv) / 2.0 * (1.0 - 1.0 / lsq)));
    };

    if (!frozen_vertices.empty()) {
        LLLInstance inst;
        for (std::size_t i = 0; i < frozen_vertices.size(); ++i)
            inst.variables.push_back({int(i), 2, {0.5, 0.5}});
        for (int v = 0; v < g.n; ++v) {
            std::vector<int> scope;
            int included = 0;
            for (int w = cc.offset[v]; w < cc.offset[v + 1]; ++w) {
                if (var_of[w] != -1) scope.push_back(var_of[w]);
                included += (vstate[w] == VtxState::Included);
            }
            if (scope.empty()) continue;
            int need = need_bound(v) - included;
            if (need <= 0) continue;
            LLL_CHECK(need <= int(scope.size()),
                      "prune_once: per-node need exceeds frozen supply");
            EventSpec ev;  // bad iff fewer than `need` frozen colors chosen
            ev.id = int(inst.events.size());
            ev.scope = std::move(scope);
            ev.kind = PredicateKind::Threshold;
            ev.threshold.center = false;
            ev.threshold.targets.assign(ev.scope.size(), 1);
            ev.threshold.cmp = ThresholdCmp::Le;
            ev.threshold.t = need - 1;
            inst.events.push_back(std::move(ev));
        }
        for (int z = 0; z < nh; ++z) {
            // cap event around H-vertex z = (v,q): frozen same-color choices
            // of v's neighbors may not push the count past out_cap
            std::vector<int> scope;
            for (int w : cc.h.adj[z])
                if (cc.owner[w] != cc.owner[z] && var_of[w] != -1)
                    scope.push_back(var_of[w]);
            if (scope.empty()) continue;
            int allowance = out_cap - cross_included[z];
            LLL_CHECK(allowance >= 0, "prune_once: cap already exceeded");
            if (allowance >= int(scope.size())) continue;  // cannot overflow
            EventSpec ev;  // bad iff more than `allowance` chosen
            ev.id = int(inst.events.size());
            ev.scope = std::move(scope);
            ev.kind = PredicateKind::Threshold;
            ev.threshold.center = false;
            ev.threshold.targets.assign(ev.scope.size(), 1);
            ev.threshold.cmp = ThresholdCmp::Ge;
            ev.threshold.t = allowance + 1;
            inst.events.push_back(std::move(ev));
        }

        PartialAssignment pa(int(frozen_vertices.size()));
        if (!inst.events.empty()) {
            inst.finalize();
            NodeSubset frozen_set = NodeSubset::of(nh, frozen_vertices);
            PowerView view{&cc.h, 2, &frozen_set};
            auto nd_nodes = shattered_decomposition_view(view, 2, ledger);
            // map H-vertex blocks onto event ids via each event's min vertex
            std::vector<int> block_of_vertex(nh, -1);
            for (std::size_t bi = 0; bi < nd_nodes.blocks.size(); ++bi)
                nd_nodes.blocks[bi].for_each(
                    [&](int w) { block_of_vertex[w] = int(bi); });
            NetworkDecomposition nd;
            nd.universe = NodeSubset::full(inst.num_events());
            nd.blocks.assign(nd_nodes.blocks.size(), NodeSubset(inst.num_events()));
            nd.claimed_C = nd_nodes.claimed_C;
            nd.claimed_D = nd_nodes.claimed_D;
            for (const auto& ev : inst.events) {
                int w_min = nh;
                for (int var : ev.scope)
                    w_min = std::min(w_min, frozen_vertices[std::size_t(var)]);
                nd.blocks[std::size_t(block_of_vertex[w_min])].add(ev.id);
            }
            SolverConfig cfg;
            cfg.det_retry_fallback = true;
            det_lll(inst, pa, nd, inst.p, ledger, cfg, &ctx,
                    phase_id(PhaseKind::ListCompletion, phase_salt));
        }
        for (std::size_t i = 0; i < frozen_vertices.size(); ++i) {
            int w = frozen_vertices[i];
            // unconstrained frozen choices are included
            bool include = !pa.is_set(int(i)) || pa.value(int(i)) == 1;
            vstate[w] = include ? VtxState::Included : VtxState::Excluded;
            if (include) cross_bump(w);
        }
    }

    // Assemble the pruned lists and assert both output inequalities exactly.
    ListState out;
    out.C = C;
    out.lists.assign(g.n, {});
    for (int v = 0; v < g.n; ++v)
        for (int w = cc.offset[v]; w < cc.offset[v + 1]; ++w)
            if (vstate[w] == VtxState::Included) out.lists[v].push_back(cc.color_of[w]);
    out.L = nh > 0 ? int(1e9) : 0;
    for (int v = 0; v < g.n; ++v) {
        LLL_CHECK(int(out.lists[v].size()) >= need_bound(v),
                  "prune_once: pruned list below the size bound");
        out.L = std::min(out.L, int(out.lists[v].size()));
    }
    for (int v = 0; v < g.n; ++v)
        for (int q : out.lists[v]) {
            int cnt = 0;
            for (int u : g.adj[v])
                cnt += std::binary_search(out.lists[u].begin(), out.lists[u].end(), q);
            LLL_CHECK(cnt <= out_cap, "prune_once: per-color conflict above the cap");
        }
    return out;
}

ColoringResult list_coloring(const Graph& g, const std::vector<std::vector<int>>& lists_in,
                             double C, const SeedContext& ctx, RoundLedger& ledger) {
    if (int(lists_in.size()) != g.n)
        throw parameter_error("list_coloring: one list per node required");
    if (C <= 0) throw parameter_error("list_coloring: C must be positive");
    ListState st;
    st.C = C;
    st.lists = lists_in;
    for (auto& lv : st.lists) {
        std::sort(lv.begin(), lv.end());
        lv.erase(std::unique(lv.begin(), lv.end()), lv.end());
        if (lv.empty()) throw parameter_error("list_coloring: empty color list");
    }
    const std::vector<std::vector<int>> original = st.lists;

    auto min_list = [&]() {
        int m = int(1e9);
        for (const auto& lv : st.lists) m = std::min(m, int(lv.size()));
        return m;
    };
    auto max_conflict = [&]() {
        int worst = 0;
        for (int v = 0; v < g.n; ++v)
            for (int q : st.lists[v]) {
                int cnt = 0;
                for (int u : g.adj[v])
                    cnt += std::binary_search(st.lists[u].begin(), st.lists[u].end(), q);
                worst = std::max(worst, cnt);
            }
        return worst;
    };

    st.L = min_list();
    if (double(max_conflict()) > double(st.L) / C)
        throw validation_error("list_coloring: entry conflict bound |N_q(v)| <= L/C violated");

    // Large lists: retain a random log^2 n sample of each list (skipped when
    // the cap would dip below the pipeline minimum of 4C).
    int lcap = int(std::ceil(log2sq(double(std::max(2, g.n)))));
    if (st.L > lcap && double(lcap) >= 4.0 * C) {
        for (int v = 0; v < g.n; ++v) {
            auto rng = ctx.stream(std::uint64_t(v), phase_id(PhaseKind::ListDraw, 0));
            auto& lv = st.lists[v];
            // deterministic partial shuffle, keep lcap colors
            for (std::size_t i = 0; i + 1 < lv.size(); ++i) {
                std::size_t j = i + std::size_t(rng.below(std::uint64_t(lv.size() - i)));
                std::swap(lv[i], lv[j]);
            }
            lv.resize(std::size_t(std::min<int>(lcap, int(lv.size()))));
            std::sort(lv.begin(), lv.end());
        }
        st.L = min_list();
        ledger.charge("list:downsample", 0);
    }

    ColoringResult res;
    res.cap = double(st.L);
    std::vector<int> color_of(g.n, -1);

    const int round_cap = 2 * int(std::ceil(std::log2(double(std::max(2, st.L))))) + 8;
    bool done = false;
    for (int round = 0; round <= round_cap && !done; ++round) {
        // finishing condition: every node holds a color no neighbor holds
        bool finished = true;
        std::vector<int> private_color(g.n, -1);
        for (int v = 0; v < g.n && finished; ++v) {
            private_color[v] = -1;
            for (int q : st.lists[v]) {
                bool shared = false;
                for (int u : g.adj[v])
                    if (std::binary_search(st.lists[u].begin(), st.lists[u].end(), q)) {
                        shared = true;
                        break;
                    }
                if (!shared) {
                    private_color[v] = q;
                    break;
                }
            }
            if (private_color[v] == -1) finished = false;
        }
        if (finished) {
            color_of = private_color;
            done = true;
            break;
        }
        if (st.L < int(std::ceil(4.0 * C))) {
            // direct completion: solve the per-edge conflict system on the
            // remaining lists with the baseline resampler
            LLLInstance inst;
            for (int v = 0; v < g.n; ++v) {
                int dom = std::max<int>(2, int(st.lists[v].size()));
                std::vector<double> dist(std::size_t(dom), 0.0);
                double w = 1.0 / double(st.lists[v].size());
                for (std::size_t i = 0; i < st.lists[v].size(); ++i) dist[i] = w;
                double s = 0;
                for (double q : dist) s += q;
                dist[0] += 1.0 - s;
                inst.variables.push_back({v, dom, dist});
            }
            for (int v = 0; v < g.n; ++v)
                for (int u : g.adj[v]) {
                    if (u < v) continue;
                    EventSpec ev;
                    ev.id = int(inst.events.size());
                    ev.scope = {v, u};
                    ev.kind = PredicateKind::Table;
                    for (std::size_t i = 0; i < st.lists[v].size(); ++i)
                        for (std::size_t j = 0; j < st.lists[u].size(); ++j)
                            if (st.lists[v][i] == st.lists[u][j])
                                ev.accepted.push_back({int(i), int(j)});
                    if (!ev.accepted.empty()) inst.events.push_back(std::move(ev));
                }
            if (inst.events.empty()) {
                for (int v = 0; v < g.n; ++v) color_of[v] = st.lists[v].front();
                done = true;
                break;
            }
            inst.finalize();
            auto out = moser_tardos(inst, ctx.derived(0xC0DEC0DEULL), {});
            ledger.charge("list:direct-completion", 2 * out.stats.resamplings + 2);
            for (int v = 0; v < g.n; ++v)
                color_of[v] = st.lists[v][std::size_t(
                    std::min<int>(out.assignment.value(v), int(st.lists[v].size()) - 1))];
            done = true;
            break;
        }
        st = prune_once(g, st, ctx, ledger, std::uint64_t(round));
        st.L = min_list();
    }
    if (!done) throw nonconvergence_error("list_coloring: finishing condition unreachable");

    res.color_of = color_of;
    VerifyMode mode;
    mode.kind = VerifyMode::List;
    mode.lists = &original;
    res.report = verify_coloring(g, res.color_of, mode);
    res.report.cap = res.cap;
    res.colors_used = res.report.colors_used;
    res.verified = res.report.pass;
    res.palette_watermark = res.colors_used;
    LLL_CHECK(res.verified, "list_coloring: verification failed");
    return res;
}

ColorVerifyReport verify_coloring(const Graph& g, const std::vector<int>& color_of,
                                  const VerifyMode& mode) {
    ColorVerifyReport rep;
    if (int(color_of.size()) != g.n)
        throw parameter_error("verify_coloring: coloring size mismatch");
    rep.colors_used = count_distinct(color_of);
    std::ostringstream detail;
    bool ok = true;

    switch (mode.kind) {
        case VerifyMode::Defective: {
            rep.mode = "defective";
            for (int v = 0; v < g.n && ok; ++v) {
                int same = 0;
                for (int u : g.adj[v]) same += (color_of[u] == color_of[v]);
                if (same > mode.f) {
                    ok = false;
                    detail << "node " << v << " has defect " << same << " > " << mode.f;
                }
            }
            break;
        }
        case VerifyMode::Frugal: {
            rep.mode = "frugal";
            std::vector<int> nbr;
            for (int v = 0; v < g.n && ok; ++v) {
                nbr.clear();
                for (int u : g.adj[v]) {
                    if (color_of[u] == color_of[v]) {
                        ok = false;
                        detail << "edge (" << v << "," << u << ") monochromatic";
                        break;
                    }
                    nbr.push_back(color_of[u]);
                }
                if (!ok) break;
                std::sort(nbr.begin(), nbr.end());
                int run = 1;
                for (std::size_t i = 1; i < nbr.size(); ++i) {
                    run = (nbr[i] == nbr[i - 1]) ? run + 1 : 1;
                    if (run > mode.beta) {
                        ok = false;
                        detail << "color " << nbr[i] << " appears " << run
                               << " times around node " << v;
                        break;
                    }
                }
            }
            break;
        }
        case VerifyMode::List: {
            rep.mode = "list";
            for (int v = 0; v < g.n && ok; ++v) {
                const auto& lv = (*mode.lists)[v];
                if (std::find(lv.begin(), lv.end(), color_of[v]) == lv.end()) {
                    ok = false;
                    detail << "node " << v << " picked a color outside its list";
                    break;
                }
                for (int u : g.adj[v])
                    if (color_of[u] == color_of[v]) {
                        ok = false;
                        detail << "edge (" << v << "," << u << ") monochromatic";
                        break;
                    }
            }
            break;
        }
    }
    rep.pass = ok;
    rep.detail = detail.str();
    return rep;
}

}  // namespace lll
