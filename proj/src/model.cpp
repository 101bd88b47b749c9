#include "lll/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace lll {

void VariableSpec::validate() const {
    if (domain < 2) throw parameter_error("variable domain must be >= 2");
    if (int(dist.size()) != domain)
        throw parameter_error("distribution size must equal domain");
    double sum = 0.0;
    for (double p : dist) {
        if (p < 0.0) throw parameter_error("negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw parameter_error("distribution must sum to 1 within 1e-12");
}

bool EventSpec::eval(std::span<const int> values) const {
    switch (kind) {
        case PredicateKind::Conjunction: {
            for (std::size_t i = 0; i < scope.size(); ++i)
                if (values[i] != conj_values[i]) return false;
            return true;
        }
        case PredicateKind::Threshold: {
            int matches = 0;
            if (threshold.center) {
                int c = values[0];
                for (std::size_t i = 1; i < scope.size(); ++i) matches += (values[i] == c);
            } else {
                for (std::size_t i = 0; i < scope.size(); ++i)
                    matches += (values[i] == threshold.targets[i]);
            }
            return threshold.cmp == ThresholdCmp::Ge ? matches >= threshold.t
                                                     : matches <= threshold.t;
        }
        case PredicateKind::Table: {
            for (const auto& tup : accepted) {
                bool eq = true;
                for (std::size_t i = 0; i < scope.size(); ++i)
                    if (tup[i] != values[i]) {
                        eq = false;
                        break;
                    }
                if (eq) return true;
            }
            return false;
        }
        case PredicateKind::Custom:
            return custom(values);
    }
    return false;
}

void LLLInstance::finalize() {
    for (int i = 0; i < num_vars(); ++i) {
        if (variables[i].id != i) throw parameter_error("variable ids must be dense 0..k-1");
        variables[i].validate();
    }
    for (int i = 0; i < num_events(); ++i) {
        const auto& ev = events[i];
        if (ev.id != i) throw parameter_error("event ids must be dense 0..m-1");
        if (ev.scope.empty()) throw parameter_error("event scope must be non-empty");
        std::set<int> uniq(ev.scope.begin(), ev.scope.end());
        if (uniq.size() != ev.scope.size())
            throw parameter_error("event scope must be duplicate-free");
        for (int v : ev.scope)
            if (v < 0 || v >= num_vars()) throw parameter_error("scope variable out of range");
        switch (ev.kind) {
            case PredicateKind::Conjunction:
                if (ev.conj_values.size() != ev.scope.size())
                    throw parameter_error("conjunction values size mismatch");
                for (std::size_t j = 0; j < ev.scope.size(); ++j)
                    if (ev.conj_values[j] < 0 ||
                        ev.conj_values[j] >= variables[ev.scope[j]].domain)
                        throw parameter_error("conjunction value out of domain");
                break;
            case PredicateKind::Threshold:
                if (!ev.threshold.center &&
                    ev.threshold.targets.size() != ev.scope.size())
                    throw parameter_error("threshold targets size mismatch");
                break;
            case PredicateKind::Table:
                for (const auto& tup : ev.accepted)
                    if (tup.size() != ev.scope.size())
                        throw parameter_error("table tuple size mismatch");
                break;
            case PredicateKind::Custom:
                if (!ev.custom) throw parameter_error("custom predicate missing");
                break;
        }
    }
    recompute_caches(&dep, &p, &d);
    var_events.assign(num_vars(), {});
    for (const auto& ev : events)
        for (int v : ev.scope) var_events[v].push_back(ev.id);
}

void LLLInstance::recompute_caches(Graph* dep_out, double* p_out, int* d_out) const {
    std::vector<std::vector<int>> per_var(num_vars());
    for (const auto& ev : events)
        for (int v : ev.scope) per_var[v].push_back(ev.id);
    std::vector<std::set<int>> nbr(num_events());
    for (const auto& evs : per_var)
        for (std::size_t i = 0; i < evs.size(); ++i)
            for (std::size_t j = i + 1; j < evs.size(); ++j) {
                nbr[evs[i]].insert(evs[j]);
                nbr[evs[j]].insert(evs[i]);
            }
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < num_events(); ++a)
        for (int b : nbr[a])
            if (a < b) edges.emplace_back(a, b);
    *dep_out = Graph::from_edges(num_events(), edges);
    *d_out = dep_out->max_degree;

    PartialAssignment empty(num_vars());
    double pmax = 0.0;
    for (const auto& ev : events) {
        try {
            pmax = std::max(pmax, cond_prob(ev, empty, *this));
        } catch (const capacity_error&) {
            // Custom predicate beyond the enumeration cap: p is unknown, use
            // the trivial upper bound. Solvers relying on exact p treat such
            // instances as criterion-violating (warn path).
            pmax = 1.0;
        }
    }
    *p_out = pmax;
}

bool check_criterion(double p, int d, CriterionForm form, int lambda) {
    if (p < 0.0 || p > 1.0) throw parameter_error("check_criterion: p out of [0,1]");
    if (d < 0) throw parameter_error("check_criterion: d must be >= 0");
    // d = 0 instances are legal; the formulas substitute max(d, 1).
    double de = std::max(d, 1);
    if (form == CriterionForm::Epd) return kEulerE * p * de <= 1.0;
    if (lambda < 1) throw parameter_error("check_criterion: lambda must be >= 1");
    return p * std::pow(kEulerE * de, double(lambda)) < 1.0;
}

Graph dependency_graph(const LLLInstance& inst) {
    Graph dep;
    double p;
    int d;
    inst.recompute_caches(&dep, &p, &d);
    return dep;
}

namespace {

// Poisson-binomial tail by DP: distribution of the number of successes among
// independent indicators with probabilities ps, then compare to (cmp, t).
double threshold_tail(const std::vector<double>& ps, ThresholdCmp cmp, int t) {
    const int m = int(ps.size());
    std::vector<double> dp(m + 1, 0.0);
    dp[0] = 1.0;
    int hi = 0;
    for (double q : ps) {
        for (int c = hi + 1; c > 0; --c) dp[c] = dp[c] * (1.0 - q) + dp[c - 1] * q;
        dp[0] *= (1.0 - q);
        ++hi;
    }
    double acc = 0.0;
    if (cmp == ThresholdCmp::Ge) {
        for (int c = std::max(t, 0); c <= m; ++c) acc += dp[c];
        if (t <= 0) acc = 1.0;
    } else {
        for (int c = 0; c <= std::min(t, m); ++c) acc += dp[c];
        if (t >= m) acc = 1.0;
    }
    return std::min(1.0, std::max(0.0, acc));
}

double conjunction_prob(const EventSpec& ev, const PartialAssignment& pa,
                        const LLLInstance& inst) {
    double prob = 1.0;
    for (std::size_t i = 0; i < ev.scope.size(); ++i) {
        int v = ev.scope[i];
        int want = ev.conj_values[i];
        if (pa.is_set(v)) {
            if (pa.value(v) != want) return 0.0;
        } else {
            prob *= inst.variables[v].dist[want];
        }
    }
    return prob;
}

double table_prob(const EventSpec& ev, const PartialAssignment& pa,
                  const LLLInstance& inst) {
    double prob = 0.0;
    for (const auto& tup : ev.accepted) {
        double term = 1.0;
        for (std::size_t i = 0; i < ev.scope.size(); ++i) {
            int v = ev.scope[i];
            if (pa.is_set(v)) {
                if (pa.value(v) != tup[i]) {
                    term = 0.0;
                    break;
                }
            } else {
                term *= inst.variables[v].dist[tup[i]];
            }
        }
        prob += term;
    }
    return std::min(1.0, prob);
}

double threshold_prob(const EventSpec& ev, const PartialAssignment& pa,
                      const LLLInstance& inst) {
    const auto& th = ev.threshold;
    if (!th.center) {
        std::vector<double> ps;
        ps.reserve(ev.scope.size());
        for (std::size_t i = 0; i < ev.scope.size(); ++i) {
            int v = ev.scope[i];
            if (pa.is_set(v))
                ps.push_back(pa.value(v) == th.targets[i] ? 1.0 : 0.0);
            else
                ps.push_back(inst.variables[v].dist[th.targets[i]]);
        }
        return threshold_tail(ps, th.cmp, th.t);
    }
    // Center mode: marginalize the center value, then Poisson-binomial over
    // the peers matching that value.
    int center = ev.scope[0];
    const auto& cvar = inst.variables[center];
    double prob = 0.0;
    for (int c = 0; c < cvar.domain; ++c) {
        double pc = pa.is_set(center) ? (pa.value(center) == c ? 1.0 : 0.0) : cvar.dist[c];
        if (pc == 0.0) continue;
        std::vector<double> ps;
        ps.reserve(ev.scope.size() - 1);
        for (std::size_t i = 1; i < ev.scope.size(); ++i) {
            int v = ev.scope[i];
            if (pa.is_set(v))
                ps.push_back(pa.value(v) == c ? 1.0 : 0.0);
            else
                ps.push_back(c < inst.variables[v].domain ? inst.variables[v].dist[c] : 0.0);
        }
        prob += pc * threshold_tail(ps, th.cmp, th.t);
    }
    return std::min(1.0, prob);
}

}  // namespace

double cond_prob_enumerated(const EventSpec& ev, const PartialAssignment& pa,
                            const LLLInstance& inst) {
    std::vector<int> unset;
    std::vector<int> values(ev.scope.size(), 0);
    std::uint64_t space = 1;
    for (std::size_t i = 0; i < ev.scope.size(); ++i) {
        int v = ev.scope[i];
        if (pa.is_set(v)) {
            values[i] = pa.value(v);
        } else {
            unset.push_back(int(i));
            std::uint64_t dom = inst.variables[v].domain;
            if (space > inst.enum_cap / dom + 1) space = inst.enum_cap + 1;
            else space *= dom;
        }
    }
    if (space > inst.enum_cap)
        throw capacity_error("cond_prob: enumeration cap exceeded and no closed form");
    double prob = 0.0;
    // Odometer over the unset positions.
    std::vector<int> idx(unset.size(), 0);
    while (true) {
        double w = 1.0;
        for (std::size_t j = 0; j < unset.size(); ++j) {
            int pos = unset[j];
            values[pos] = idx[j];
            w *= inst.variables[ev.scope[pos]].dist[idx[j]];
        }
        if (w > 0.0 && ev.eval(values)) prob += w;
        std::size_t j = 0;
        for (; j < unset.size(); ++j) {
            if (++idx[j] < inst.variables[ev.scope[unset[j]]].domain) break;
            idx[j] = 0;
        }
        if (j == unset.size()) break;
    }
    return std::min(1.0, prob);
}

double cond_prob(const EventSpec& ev, const PartialAssignment& pa, const LLLInstance& inst) {
    switch (ev.kind) {
        case PredicateKind::Conjunction:
            return conjunction_prob(ev, pa, inst);
        case PredicateKind::Threshold:
            return threshold_prob(ev, pa, inst);
        case PredicateKind::Table:
            return table_prob(ev, pa, inst);
        case PredicateKind::Custom:
            return cond_prob_enumerated(ev, pa, inst);
    }
    return 0.0;
}

std::vector<int> violated_events(const LLLInstance& inst, const PartialAssignment& pa) {
    if (!pa.complete())
        throw incomplete_assignment_error("violated_events: assignment incomplete");
    std::vector<int> out;
    std::vector<int> values;
    for (const auto& ev : inst.events) {
        values.clear();
        for (int v : ev.scope) values.push_back(pa.value(v));
        if (ev.eval(values)) out.push_back(ev.id);
    }
    return out;
}

}  // namespace lll
