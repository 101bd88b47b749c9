#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lll/model.hpp"
#include "lll/runtime.hpp"

using namespace lll;

namespace {

VariableSpec uniform_bit(int id) { return {id, 2, {0.5, 0.5}}; }

EventSpec conj_event(int id, std::vector<int> scope, std::vector<int> vals) {
    EventSpec ev;
    ev.id = id;
    ev.scope = std::move(scope);
    ev.kind = PredicateKind::Conjunction;
    ev.conj_values = std::move(vals);
    return ev;
}

LLLInstance bits_instance(int nvars, std::vector<EventSpec> events) {
    LLLInstance inst;
    for (int i = 0; i < nvars; ++i) inst.variables.push_back(uniform_bit(i));
    inst.events = std::move(events);
    inst.finalize();
    return inst;
}

}  // namespace

TEST_CASE("dependency graph") {
    // disjoint scopes -> edgeless
    auto inst = bits_instance(4, {conj_event(0, {0, 1}, {1, 1}), conj_event(1, {2, 3}, {1, 1})});
    CHECK(inst.dep.edge_count() == 0);
    // shared variable -> edge
    auto inst2 = bits_instance(3, {conj_event(0, {0, 1}, {1, 1}), conj_event(1, {1, 2}, {1, 1})});
    CHECK(inst2.dep.has_edge(0, 1));
    CHECK(inst2.d == 1);
    // star of k events sharing one variable -> clique (pairwise-intersection oracle)
    std::vector<EventSpec> evs;
    const int k = 5;
    for (int i = 0; i < k; ++i) evs.push_back(conj_event(i, {0, i + 1}, {1, 1}));
    auto inst3 = bits_instance(k + 1, std::move(evs));
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b) {
            bool share = false;  // oracle: explicit scope intersection
            for (int x : inst3.events[a].scope)
                for (int y : inst3.events[b].scope) share |= (x == y);
            CHECK(inst3.dep.has_edge(a, b) == share);
        }
    CHECK(inst3.d == k - 1);
}

TEST_CASE("check_criterion") {
    CHECK(check_criterion(0.25, 1, CriterionForm::Epd));
    CHECK(!check_criterion(0.5, 1, CriterionForm::Epd));
    // 2^-20 * (2e)^4 ~= 8.33e-4 < 1
    CHECK(check_criterion(std::pow(2.0, -20), 2, CriterionForm::Poly, 4));
    CHECK(!check_criterion(0.5, 2, CriterionForm::Poly, 4));
    // d=0 is legal: formulas substitute max(d,1)
    CHECK(check_criterion(0.25, 0, CriterionForm::Epd));
    CHECK_THROWS_AS(check_criterion(0.25, 2, CriterionForm::Poly, 0), parameter_error);
    CHECK_THROWS_AS(check_criterion(-0.1, 2, CriterionForm::Epd), parameter_error);
}

TEST_CASE("cond_prob basics") {
    auto inst = bits_instance(2, {conj_event(0, {0, 1}, {1, 1})});
    PartialAssignment pa(2);
    CHECK(cond_prob(inst.events[0], pa, inst) == doctest::Approx(0.25).epsilon(1e-12));
    pa.set(0, 1);
    CHECK(cond_prob(inst.events[0], pa, inst) == doctest::Approx(0.5).epsilon(1e-12));
    pa.set(1, 1);
    CHECK(cond_prob(inst.events[0], pa, inst) == 1.0);
    pa.unset(1);
    pa.set(1, 0);
    CHECK(cond_prob(inst.events[0], pa, inst) == 0.0);

    auto inst4 = bits_instance(4, {conj_event(0, {0, 1, 2, 3}, {1, 1, 1, 1})});
    PartialAssignment pa4(4);
    pa4.set(0, 1);
    pa4.set(1, 1);
    CHECK(cond_prob(inst4.events[0], pa4, inst4) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("parity via table equals enumeration") {
    EventSpec ev;
    ev.id = 0;
    ev.scope = {0, 1, 2};
    ev.kind = PredicateKind::Table;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                if ((a ^ b ^ c) == 1) ev.accepted.push_back({a, b, c});
    LLLInstance inst;
    for (int i = 0; i < 3; ++i) inst.variables.push_back(uniform_bit(i));
    inst.events = {ev};
    inst.finalize();
    PartialAssignment pa(3);
    CHECK(cond_prob(inst.events[0], pa, inst) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(cond_prob_enumerated(inst.events[0], pa, inst) ==
          doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("closed forms agree with enumeration") {
    SeedContext ctx{2024};
    auto rng = ctx.stream(0, 0);
    for (int trial = 0; trial < 200; ++trial) {
        int nvars = 2 + int(rng.below(5));
        LLLInstance inst;
        for (int i = 0; i < nvars; ++i) {
            int dom = 2 + int(rng.below(3));
            std::vector<double> dist(dom);
            double sum = 0;
            for (auto& x : dist) {
                x = 0.05 + rng.real53();
                sum += x;
            }
            for (auto& x : dist) x /= sum;
            // renormalize exactly within 1e-12
            double s2 = 0;
            for (double x : dist) s2 += x;
            dist[0] += 1.0 - s2;
            inst.variables.push_back({i, dom, dist});
        }
        EventSpec ev;
        ev.id = 0;
        for (int i = 0; i < nvars; ++i) ev.scope.push_back(i);
        switch (rng.below(3)) {
            case 0: {
                ev.kind = PredicateKind::Conjunction;
                for (int i = 0; i < nvars; ++i)
                    ev.conj_values.push_back(int(rng.below(inst.variables[i].domain)));
                break;
            }
            case 1: {
                ev.kind = PredicateKind::Threshold;
                ev.threshold.center = false;
                for (int i = 0; i < nvars; ++i)
                    ev.threshold.targets.push_back(int(rng.below(inst.variables[i].domain)));
                ev.threshold.cmp = rng.bernoulli(0.5) ? ThresholdCmp::Ge : ThresholdCmp::Le;
                ev.threshold.t = int(rng.below(nvars + 1));
                break;
            }
            default: {
                ev.kind = PredicateKind::Threshold;
                ev.threshold.center = true;
                ev.threshold.cmp = rng.bernoulli(0.5) ? ThresholdCmp::Ge : ThresholdCmp::Le;
                ev.threshold.t = int(rng.below(nvars));
                break;
            }
        }
        inst.events = {ev};
        inst.finalize();
        PartialAssignment pa(nvars);
        for (int i = 0; i < nvars; ++i)
            if (rng.bernoulli(0.4)) pa.set(i, int(rng.below(inst.variables[i].domain)));
        double closed = cond_prob(inst.events[0], pa, inst);
        double enumed = cond_prob_enumerated(inst.events[0], pa, inst);
        CHECK(std::abs(closed - enumed) <= 1e-10);
    }
}

TEST_CASE("violated_events") {
    auto inst = bits_instance(3, {conj_event(0, {0, 1}, {1, 1}), conj_event(1, {1, 2}, {1, 1})});
    PartialAssignment pa(3);
    pa.set(0, 1);
    pa.set(1, 0);
    pa.set(2, 1);
    CHECK(violated_events(inst, pa).empty());  // b=0 kills both
    pa.unset(1);
    CHECK_THROWS_AS(violated_events(inst, pa), incomplete_assignment_error);
    pa.set(1, 1);
    auto bad = violated_events(inst, pa);
    CHECK(bad == std::vector<int>{0, 1});
}

TEST_CASE("p and d caches match recomputation") {
    auto inst = bits_instance(4, {conj_event(0, {0, 1}, {1, 1}), conj_event(1, {1, 2}, {1, 1}),
                                  conj_event(2, {2, 3}, {0, 0})});
    Graph dep;
    double p;
    int d;
    inst.recompute_caches(&dep, &p, &d);
    CHECK(p == inst.p);
    CHECK(d == inst.d);
    CHECK(dep.edge_count() == inst.dep.edge_count());
    CHECK(inst.p == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(inst.d == 2);
}

TEST_CASE("enumeration cap errors without closed form") {
    LLLInstance inst;
    const int nvars = 25;
    for (int i = 0; i < nvars; ++i) inst.variables.push_back(uniform_bit(i));
    EventSpec ev;
    ev.id = 0;
    for (int i = 0; i < nvars; ++i) ev.scope.push_back(i);
    ev.kind = PredicateKind::Custom;
    ev.custom = [](std::span<const int> vals) {
        int ones = 0;
        for (int v : vals) ones += v;
        return ones % 2 == 1;
    };
    inst.events = {ev};
    inst.enum_cap = 1 << 20;
    inst.finalize();
    PartialAssignment pa(nvars);
    CHECK_THROWS_AS(cond_prob(inst.events[0], pa, inst), capacity_error);
    for (int i = 0; i < 10; ++i) pa.set(i, 0);
    CHECK(cond_prob(inst.events[0], pa, inst) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("partial assignment invariants") {
    PartialAssignment pa(3);
    pa.freeze(0);
    CHECK_THROWS_AS(pa.set(0, 1), internal_error);
    pa.set(1, 1);
    CHECK_THROWS_AS(pa.freeze(1), internal_error);
    CHECK(pa.frozen_count() == 1);
    CHECK(pa.set_count() == 1);
}

TEST_CASE("variable validation") {
    LLLInstance inst;
    inst.variables.push_back({0, 2, {0.7, 0.2}});
    CHECK_THROWS_AS(inst.finalize(), parameter_error);
}
