#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lll/graph.hpp"

namespace lll {

inline constexpr std::uint64_t kDefaultEnumCap = std::uint64_t(1) << 20;
inline constexpr double kEulerE = 2.718281828459045235360287471352662498;

// Finite-domain random variable with an explicit distribution.
struct VariableSpec {
    int id = 0;
    int domain = 2;
    std::vector<double> dist;  // probabilities over 0..domain-1, sums to 1

    void validate() const;
};

enum class PredicateKind { Conjunction, Threshold, Table, Custom };
enum class ThresholdCmp { Ge, Le };  // bad iff matches >= t, resp. <= t

// Threshold predicates count per-position "matches". Fixed mode: position i
// matches iff scope value equals targets[i]. Center mode: scope[0] is the
// center; positions 1..m match iff they equal the center's value.
struct ThresholdParams {
    bool center = false;
    std::vector<int> targets;  // fixed mode only, one per scope position
    ThresholdCmp cmp = ThresholdCmp::Ge;
    int t = 0;
};

struct EventSpec {
    int id = 0;
    std::vector<int> scope;  // variable ids, duplicate-free, sampling order
    PredicateKind kind = PredicateKind::Conjunction;
    std::vector<int> conj_values;                 // Conjunction
    ThresholdParams threshold;                    // Threshold
    std::vector<std::vector<int>> accepted;       // Table: accepted scope tuples
    std::function<bool(std::span<const int>)> custom;  // Custom

    bool eval(std::span<const int> values) const;
    bool has_closed_form() const { return kind != PredicateKind::Custom; }
};

// Partial assignment plus per-variable frozen flags; frozen variables are
// unset by definition.
class PartialAssignment {
  public:
    PartialAssignment() = default;
    explicit PartialAssignment(int num_vars) : value_(num_vars, -1), frozen_(num_vars, false) {}

    int num_vars() const { return int(value_.size()); }
    bool is_set(int v) const { return value_[v] >= 0; }
    bool is_frozen(int v) const { return frozen_[v]; }
    int value(int v) const { return value_[v]; }

    void set(int v, int val) {
        LLL_CHECK(!frozen_[v], "assigning a frozen variable");
        value_[v] = val;
    }
    void unset(int v) { value_[v] = -1; }
    void freeze(int v) {
        LLL_CHECK(value_[v] < 0, "freezing a set variable");
        frozen_[v] = true;
    }
    void unfreeze(int v) { frozen_[v] = false; }

    int set_count() const {
        int c = 0;
        for (int x : value_) c += (x >= 0);
        return c;
    }
    int frozen_count() const {
        int c = 0;
        for (bool b : frozen_) c += b;
        return c;
    }
    bool complete() const {
        for (int x : value_)
            if (x < 0) return false;
        return true;
    }
    const std::vector<int>& raw_values() const { return value_; }

  private:
    std::vector<int> value_;
    std::vector<bool> frozen_;
};

struct LLLInstance {
    std::vector<VariableSpec> variables;
    std::vector<EventSpec> events;

    // Cached on finalize().
    Graph dep;                                  // dependency graph over event ids
    std::vector<std::vector<int>> var_events;   // variable id -> event ids
    double p = 0.0;                             // max unconditional event probability
    int d = 0;                                  // max dependency degree
    std::uint64_t enum_cap = kDefaultEnumCap;

    int num_vars() const { return int(variables.size()); }
    int num_events() const { return int(events.size()); }

    // Validates specs, builds the dependency graph and the p/d caches.
    void finalize();
    void recompute_caches(Graph* dep_out, double* p_out, int* d_out) const;
};

enum class CriterionForm { Epd, Poly };

// e*p*max(d,1) <= 1, resp. p*(e*max(d,1))^lambda < 1.
bool check_criterion(double p, int d, CriterionForm form, int lambda = 1);

Graph dependency_graph(const LLLInstance& inst);

// Exact Pr[event | pa]: assigned scope variables are fixed, unset ones are
// marginalized by their distributions. Closed forms exist for conjunction,
// threshold (Poisson-binomial DP), and table events; custom predicates fall
// back to enumeration, capped at inst.enum_cap joint outcomes.
double cond_prob(const EventSpec& ev, const PartialAssignment& pa, const LLLInstance& inst);
double cond_prob_enumerated(const EventSpec& ev, const PartialAssignment& pa,
                            const LLLInstance& inst);

// Event ids whose predicate is true under a complete assignment.
std::vector<int> violated_events(const LLLInstance& inst, const PartialAssignment& pa);

}  // namespace lll
