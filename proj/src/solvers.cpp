#include "lll/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lll {

namespace {

void warn_or_throw(const SolverConfig& cfg, SolverStats* stats, const std::string& msg) {
    if (cfg.enforce_criteria) throw parameter_error(msg);
    if (stats) stats->warnings.push_back(msg);
}

NodeSubset unresolved_events(const LLLInstance& inst, const PartialAssignment& pa) {
    NodeSubset out(inst.num_events());
    for (const auto& ev : inst.events)
        for (int v : ev.scope)
            if (!pa.is_set(v)) {
                out.add(ev.id);
                break;
            }
    return out;
}

// --- deterministic per-component search --------------------------------------

// True when the event is violated for every completion of the current partial
// assignment. Sound but not complete; the leaf check is authoritative.
bool certainly_violated(const EventSpec& ev, const PartialAssignment& pa) {
    switch (ev.kind) {
        case PredicateKind::Conjunction: {
            for (std::size_t i = 0; i < ev.scope.size(); ++i) {
                int v = ev.scope[i];
                if (!pa.is_set(v) || pa.value(v) != ev.conj_values[i]) return false;
            }
            return true;
        }
        case PredicateKind::Threshold: {
            const auto& th = ev.threshold;
            int center_val = -1;
            std::size_t first = 0;
            if (th.center) {
                if (!pa.is_set(ev.scope[0])) break;  // fall through to full check
                center_val = pa.value(ev.scope[0]);
                first = 1;
            }
            int matches = 0, unassigned = 0;
            for (std::size_t i = first; i < ev.scope.size(); ++i) {
                int v = ev.scope[i];
                if (!pa.is_set(v)) {
                    ++unassigned;
                } else {
                    int want = th.center ? center_val : th.targets[i];
                    matches += (pa.value(v) == want);
                }
            }
            if (th.cmp == ThresholdCmp::Ge) return matches >= th.t;
            return matches + unassigned <= th.t;
        }
        default:
            break;
    }
    // Full-assignment fallback.
    std::vector<int> values;
    values.reserve(ev.scope.size());
    for (int v : ev.scope) {
        if (!pa.is_set(v)) return false;
        values.push_back(pa.value(v));
    }
    return ev.eval(values);
}

bool event_fully_assigned(const EventSpec& ev, const PartialAssignment& pa) {
    for (int v : ev.scope)
        if (!pa.is_set(v)) return false;
    return true;
}

bool event_violated_now(const EventSpec& ev, const PartialAssignment& pa) {
    std::vector<int> values;
    values.reserve(ev.scope.size());
    for (int v : ev.scope) values.push_back(pa.value(v));
    return ev.eval(values);
}

struct ComponentProblem {
    std::vector<int> vars;      // unset variables, ascending
    std::vector<int> affected;  // component events plus their dep-neighbors
    double threshold = 1.0;     // block condition; >= 1 means unconstrained
};

bool leaf_accepts(const LLLInstance& inst, const PartialAssignment& pa,
                  const ComponentProblem& prob) {
    for (int e : prob.affected) {
        const auto& ev = inst.events[e];
        if (event_fully_assigned(ev, pa)) {
            if (event_violated_now(ev, pa)) return false;
        }
        if (prob.threshold < 1.0 &&
            cond_prob(ev, pa, inst) > prob.threshold + 1e-12)
            return false;
    }
    return true;
}

// Lexicographic backtracking: variables ascending by id, values ascending;
// the first joint assignment passing the block condition wins.
bool det_search(const LLLInstance& inst, PartialAssignment& pa,
                const ComponentProblem& prob, std::uint64_t node_cap,
                std::uint64_t& nodes_used, bool& capped) {
    const auto& vars = prob.vars;
    if (vars.empty()) return true;
    std::vector<int> val(vars.size(), -1);
    std::size_t i = 0;
    capped = false;
    while (true) {
        int v = vars[i];
        int dom = inst.variables[v].domain;
        int cand = val[i] + 1;
        bool found = false;
        for (; cand < dom; ++cand) {
            if (++nodes_used > node_cap) {
                for (std::size_t j = 0; j <= i; ++j)
                    if (val[j] >= 0) pa.unset(vars[j]);
                capped = true;
                return false;
            }
            pa.set(v, cand);
            bool pruned = false;
            for (int e : inst.var_events[v]) {
                const auto& ev = inst.events[e];
                if (certainly_violated(ev, pa)) {
                    pruned = true;
                    break;
                }
            }
            if (!pruned) {
                found = true;
                break;
            }
            pa.unset(v);
        }
        if (!found) {
            if (val[i] >= 0) pa.unset(v);
            val[i] = -1;
            if (i == 0) return false;
            --i;
            continue;
        }
        val[i] = cand;
        if (i + 1 == vars.size()) {
            if (leaf_accepts(inst, pa, prob)) return true;
            // stay at this level; the loop advances val[i]
            continue;
        }
        ++i;
    }
}

void assign_from_tape(const LLLInstance& inst, PartialAssignment& pa,
                      const std::vector<int>& vars, const SeedContext& ctx,
                      std::uint64_t phase) {
    for (int v : vars) {
        if (pa.is_set(v)) pa.unset(v);
        auto rng = ctx.stream(std::uint64_t(v), phase);
        pa.set(v, rng.sample_pmf(inst.variables[v].dist));
    }
}

}  // namespace

std::vector<std::vector<int>> residual_components(const LLLInstance& inst,
                                                  const PartialAssignment& pa) {
    NodeSubset unresolved = unresolved_events(inst, pa);
    PowerView view{&inst.dep, 2, &unresolved};
    return view_components(view);
}

SolverOutcome moser_tardos(const LLLInstance& inst, const SeedContext& ctx,
                           const SolverConfig& cfg) {
    SolverOutcome out;
    out.assignment = PartialAssignment(inst.num_vars());
    if (!check_criterion(inst.p, inst.d, CriterionForm::Epd))
        warn_or_throw(cfg, &out.stats, "moser_tardos: epd criterion not satisfied");

    auto& pa = out.assignment;
    for (int v = 0; v < inst.num_vars(); ++v) {
        auto rng = ctx.stream(std::uint64_t(v), phase_id(PhaseKind::MtInitial));
        pa.set(v, rng.sample_pmf(inst.variables[v].dist));
    }
    // Persistent resample streams, one per variable.
    std::vector<Rng> resample;
    resample.reserve(inst.num_vars());
    for (int v = 0; v < inst.num_vars(); ++v)
        resample.push_back(ctx.stream(std::uint64_t(v), phase_id(PhaseKind::MtResample)));

    while (true) {
        auto bad = violated_events(inst, pa);
        if (bad.empty()) break;
        if (out.stats.resamplings >= cfg.mt_resample_cap)
            throw nonconvergence_error("moser_tardos: resample cap exceeded");
        int target = bad.front();  // minimum-id violated event
        for (int v : inst.events[target].scope) {
            pa.unset(v);
            pa.set(v, resample[v].sample_pmf(inst.variables[v].dist));
        }
        ++out.stats.resamplings;
    }
    out.verified = violated_events(inst, pa).empty();
    return out;
}

PartialAssignment random_partial_setting(const LLLInstance& inst, int lambda,
                                         const SeedContext& ctx, RoundLedger& ledger,
                                         const SolverConfig& cfg,
                                         std::uint64_t phase_salt, SolverStats* stats) {
    if (lambda < 1) throw parameter_error("random_partial_setting: lambda must be >= 1");
    if (!check_criterion(inst.p, inst.d, CriterionForm::Poly, 4 * lambda))
        warn_or_throw(cfg, stats, "random_partial_setting: p(ed)^{4*lambda} >= 1");

    const double sqrt_p = std::sqrt(inst.p);
    auto coloring = distance_k_coloring(inst.dep, 2);
    int num_classes = 0;
    for (int c : coloring) num_classes = std::max(num_classes, c + 1);
    std::vector<std::vector<int>> classes(num_classes);
    for (int e = 0; e < inst.num_events(); ++e) classes[coloring[e]].push_back(e);

    ledger.charge("rps:coloring", std::uint64_t(log2_star(double(std::max(2, inst.num_events())))));
    ledger.charge("rps:classes", 2 * std::uint64_t(num_classes));

    PartialAssignment pa(inst.num_vars());
    // Non-interference instrumentation: within a color class, no event may be
    // touched by two class members.
    std::vector<int> touch_gen(inst.num_events(), -1), touch_owner(inst.num_events(), -1);

    std::uint64_t draw_phase = phase_id(PhaseKind::RpsDraw, phase_salt);
    for (int cls = 0; cls < num_classes; ++cls) {
        for (int a : classes[cls]) {
            auto scope = inst.events[a].scope;
            std::sort(scope.begin(), scope.end());
            for (int v : scope) {
                if (pa.is_set(v) || pa.is_frozen(v)) continue;
                for (int e : inst.var_events[v]) {
                    if (touch_gen[e] == cls && touch_owner[e] != a)
                        throw internal_error("rps: color class members interfere");
                    touch_gen[e] = cls;
                    touch_owner[e] = a;
                }
                auto rng = ctx.stream(std::uint64_t(v), draw_phase);
                pa.set(v, rng.sample_pmf(inst.variables[v].dist));
                // Dangerousness: any event containing v with conditional
                // probability >= sqrt(p) undoes the draw and freezes. An
                // event at probability 0 can never occur and is exempt, which
                // only matters in the degenerate p = 0 case.
                std::vector<int> dangerous;
                for (int e : inst.var_events[v]) {
                    double cp = cond_prob(inst.events[e], pa, inst);
                    if (cp >= sqrt_p && cp > 0.0) dangerous.push_back(e);
                }
                if (!dangerous.empty()) {
                    pa.unset(v);
                    pa.freeze(v);
                    for (int e : dangerous)
                        for (int u : inst.events[e].scope)
                            if (!pa.is_set(u) && !pa.is_frozen(u)) pa.freeze(u);
                }
            }
        }
    }

    // Partial-setting guarantee, asserted on every run: every event's
    // conditional probability stays at most sqrt(p).
    for (const auto& ev : inst.events)
        LLL_CHECK(cond_prob(ev, pa, inst) <= sqrt_p + 1e-10,
                  "rps: conditional probability exceeds sqrt(p)");
    if (stats) stats->frozen_count = pa.frozen_count();
    return pa;
}

void det_lll(const LLLInstance& inst, PartialAssignment& pa, const NetworkDecomposition& nd,
             double p_eff, RoundLedger& ledger, const SolverConfig& cfg,
             const SeedContext* ctx, std::uint64_t phase_salt, DetTrace* trace,
             SolverStats* stats) {
    const int m = inst.num_events();
    const double d_eff = double(std::max(inst.d, 1));
    const int C = int(nd.blocks.size());

    // Every event with an unset variable must be covered by the decomposition.
    NodeSubset covered(m);
    for (const auto& block : nd.blocks)
        block.for_each([&](int e) { covered.add(e); });
    for (const auto& ev : inst.events) {
        bool unset = !event_fully_assigned(ev, pa);
        if (unset && !covered.contains(ev.id))
            throw validation_error("det_lll: event with unset variable not covered");
    }
    if (C > 0 && !(p_eff * std::pow(kEulerE * d_eff, double(C)) < 1.0))
        warn_or_throw(cfg, stats, "det_lll: p_eff*(e*d)^C >= 1");

    std::uint64_t nodes_used = 0;
    for (int i = 1; i <= C; ++i) {
        double thr = p_eff * std::pow(kEulerE * d_eff, double(i));
        NodeSubset active(m);
        nd.blocks[std::size_t(i - 1)].for_each([&](int e) {
            if (!event_fully_assigned(inst.events[e], pa)) active.add(e);
        });
        std::uint64_t block_radius = 0;
        if (!active.empty()) {
            PowerView view{&inst.dep, 2, &active};
            auto comps = view_components(view);
            for (const auto& comp : comps) {
                ComponentProblem prob;
                prob.threshold = thr;
                NodeSubset in_comp(m);
                for (int e : comp) in_comp.add(e);
                std::vector<char> aff(m, 0);
                std::vector<int> var_set;
                for (int e : comp) {
                    aff[e] = 1;
                    for (int f : inst.dep.adj[e]) aff[f] = 1;
                    for (int v : inst.events[e].scope)
                        if (!pa.is_set(v)) var_set.push_back(v);
                }
                for (int e = 0; e < m; ++e)
                    if (aff[e]) prob.affected.push_back(e);
                std::sort(var_set.begin(), var_set.end());
                var_set.erase(std::unique(var_set.begin(), var_set.end()), var_set.end());
                prob.vars = std::move(var_set);
                if (prob.vars.empty()) continue;

                NodeSubset comp_set(m);
                for (int e : comp) comp_set.add(e);
                PowerView cview{&inst.dep, 2, &comp_set};
                block_radius = std::max(
                    block_radius, 2 * std::uint64_t(view_eccentricity(cview, comp.front())) + 1);

                bool capped = false;
                bool ok = det_search(inst, pa, prob, cfg.det_node_cap, nodes_used, capped);
                if (!ok && cfg.det_retry_fallback && ctx != nullptr) {
                    for (std::uint64_t att = 1; att <= cfg.det_retry_cap && !ok; ++att) {
                        assign_from_tape(inst, pa, prob.vars, *ctx,
                                         phase_id(PhaseKind::DetRetry,
                                                  phase_salt * 1000003 + std::uint64_t(comp.front()),
                                                  att));
                        ok = leaf_accepts(inst, pa, prob);
                        if (!ok)
                            for (int v : prob.vars) pa.unset(v);
                    }
                    if (!ok)
                        throw nonconvergence_error(
                            "det_lll: randomized retry cap exhausted on component");
                }
                if (!ok) {
                    if (cfg.tolerate_failures && ctx != nullptr) {
                        assign_from_tape(inst, pa, prob.vars, *ctx,
                                         phase_id(PhaseKind::DetRetry,
                                                  phase_salt * 1000003 + std::uint64_t(comp.front()),
                                                  0));
                        if (stats)
                            for (int e : comp) stats->failed_events.push_back(e);
                    } else if (capped) {
                        throw capacity_error("det_lll: backtracking node cap exceeded");
                    } else {
                        std::ostringstream msg;
                        msg << "det_lll: infeasible component (min event " << comp.front()
                            << ", block " << i << ")";
                        throw infeasible_error(msg.str());
                    }
                }
            }
        }
        if (!active.empty()) {
            std::ostringstream label;
            label << "det-lll:block" << i;
            ledger.charge(label.str(), block_radius);
        }
        if (stats) ++stats->blocks_processed;

        // Per-block invariant, asserted exactly whenever it binds.
        bool tolerated_failures = stats && !stats->failed_events.empty();
        if (thr < 1.0 && !tolerated_failures) {
            double worst = 0.0;
            for (const auto& ev : inst.events)
                worst = std::max(worst, cond_prob(ev, pa, inst));
            LLL_CHECK(worst <= thr + 1e-10, "det_lll: block invariant violated");
            if (trace) {
                trace->block_thresholds.push_back(thr);
                trace->block_max_cond.push_back(worst);
            }
        } else if (trace) {
            double worst = 0.0;
            for (const auto& ev : inst.events)
                worst = std::max(worst, cond_prob(ev, pa, inst));
            trace->block_thresholds.push_back(thr);
            trace->block_max_cond.push_back(worst);
        }
    }

    // After the last block every covered event is fully assigned and clean.
    for (const auto& ev : inst.events) {
        if (!covered.contains(ev.id)) continue;
        LLL_CHECK(event_fully_assigned(ev, pa), "det_lll: unset variable survived");
        if (!(stats && !stats->failed_events.empty()))
            LLL_CHECK(!event_violated_now(ev, pa), "det_lll: violated event survived");
    }
}

SolverOutcome base_lll(const LLLInstance& inst, int lambda, const SeedContext& ctx,
                       RoundLedger& ledger, const SolverConfig& cfg,
                       std::uint64_t nominal_n, std::uint64_t phase_salt) {
    if (lambda < 1) throw parameter_error("base_lll: lambda must be >= 1");
    SolverOutcome out;
    if (lambda < 8)
        out.stats.warnings.push_back("base_lll: lambda below the analyzed minimum of 8");
    RoundLedger local;

    out.assignment =
        random_partial_setting(inst, lambda, ctx, local, cfg, phase_salt, &out.stats);
    if (cfg.capture_rps) out.rps_snapshot = out.assignment;
    auto& pa = out.assignment;

    auto comps = residual_components(inst, pa);
    for (const auto& c : comps) out.stats.residual_component_sizes.push_back(int(c.size()));

    for (int v = 0; v < inst.num_vars(); ++v)
        if (pa.is_frozen(v)) pa.unfreeze(v);

    NodeSubset unresolved = unresolved_events(inst, pa);
    if (!unresolved.empty()) {
        PowerView view{&inst.dep, 2, &unresolved};
        auto nd = shattered_decomposition_view(view, lambda, local, nominal_n);
        det_lll(inst, pa, nd, std::sqrt(inst.p), local, cfg, &ctx, phase_salt, nullptr,
                &out.stats);
    }

    // Variables in no event's scope are sampled independently.
    for (int v = 0; v < inst.num_vars(); ++v) {
        if (pa.is_set(v)) continue;
        auto rng = ctx.stream(std::uint64_t(v), phase_id(PhaseKind::StrayFill, phase_salt));
        pa.set(v, rng.sample_pmf(inst.variables[v].dist));
    }

    auto bad = violated_events(inst, pa);
    if (cfg.tolerate_failures) {
        out.stats.failed_events = bad;
    } else {
        LLL_CHECK(bad.empty(), "base_lll: violated events on exit");
    }
    out.verified = bad.empty();
    out.ledger = local;
    for (const auto& ph : local.phases) ledger.charge(ph.label, ph.rounds);
    return out;
}

DerivedLLL build_derived_lll(const LLLInstance& inst, const std::vector<int>& failed,
                             std::uint64_t T, int n_star) {
    DerivedLLL der;
    der.base_alg = "base_lll";
    der.T = T;
    der.dep_radius = int(std::min<std::uint64_t>(2 * T + 1, std::uint64_t(1) << 30));
    der.event_ids = failed;
    der.p_prime = n_star > 0 ? 1.0 / double(n_star) : 1.0;

    std::vector<int> index(inst.num_events(), -1);
    for (std::size_t i = 0; i < failed.size(); ++i) index[failed[i]] = int(i);
    std::vector<std::pair<int, int>> edges;
    for (std::size_t i = 0; i < failed.size(); ++i) {
        auto dist = bfs_distances(inst.dep, failed[i], nullptr, der.dep_radius);
        for (std::size_t j = i + 1; j < failed.size(); ++j)
            if (dist[failed[j]] != -1) edges.emplace_back(int(i), int(j));
    }
    der.dep = Graph::from_edges(int(failed.size()), edges);
    der.d_prime = der.dep.max_degree;
    return der;
}

SolverOutcome bootstrap_lll(const LLLInstance& inst, int n_star, int lambda_inner,
                            const SeedContext& ctx, RoundLedger& ledger,
                            const SolverConfig& cfg, DerivedLLL* derived_out) {
    const int n = inst.num_events();
    if (n_star <= 0)
        n_star = std::max(2, int(std::ceil(std::log2(std::max(2.0, double(n))))));
    if (n_star < 2) throw parameter_error("bootstrap_lll: n_star must be >= 2");

    SolverConfig inner_cfg = cfg;
    inner_cfg.tolerate_failures = true;
    RoundLedger inner_ledger;
    SolverOutcome out = base_lll(inst, lambda_inner, ctx, inner_ledger, inner_cfg,
                                 std::uint64_t(n_star), 0);
    std::uint64_t T = inner_ledger.total;

    auto failed = violated_events(inst, out.assignment);
    out.stats.failed_events = failed;
    DerivedLLL der = build_derived_lll(inst, failed, T, n_star);
    if (derived_out) *derived_out = der;

    if (!failed.empty()) {
        auto comps = components(der.dep, NodeSubset::full(der.dep.n));
        std::uint64_t comp_idx = 0;
        for (const auto& comp : comps) {
            // Variables of the component's failed events; re-randomized until
            // every event touching them is clean.
            std::vector<int> vars;
            comp.for_each([&](int li) {
                for (int v : inst.events[der.event_ids[std::size_t(li)]].scope)
                    vars.push_back(v);
            });
            std::sort(vars.begin(), vars.end());
            vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
            std::vector<int> incident;
            {
                std::vector<char> seen(inst.num_events(), 0);
                for (int v : vars)
                    for (int e : inst.var_events[v])
                        if (!seen[e]) {
                            seen[e] = 1;
                            incident.push_back(e);
                        }
            }
            bool ok = false;
            std::uint64_t attempts = 0;
            while (!ok && attempts < cfg.bootstrap_retry_cap) {
                ++attempts;
                assign_from_tape(inst, out.assignment, vars, ctx,
                                 phase_id(PhaseKind::BootstrapRetry, comp_idx, attempts));
                ok = true;
                for (int e : incident)
                    if (event_violated_now(inst.events[e], out.assignment)) {
                        ok = false;
                        break;
                    }
            }
            if (!ok)
                throw nonconvergence_error("bootstrap_lll: component retry cap exhausted");
            out.ledger.charge("bootstrap:retry", attempts * (2 * T + 1));
            ++comp_idx;
        }
    }

    auto bad = violated_events(inst, out.assignment);
    LLL_CHECK(bad.empty(), "bootstrap_lll: violated events on exit");
    out.verified = true;
    for (const auto& ph : out.ledger.phases) ledger.charge(ph.label, ph.rounds);
    return out;
}

}  // namespace lll
