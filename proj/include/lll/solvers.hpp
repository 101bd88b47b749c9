#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lll/decomp.hpp"
#include "lll/model.hpp"
#include "lll/runtime.hpp"

namespace lll {

struct SolverConfig {
    std::uint64_t mt_resample_cap = 1'000'000;
    std::uint64_t det_node_cap = 10'000'000;
    bool det_retry_fallback = false;   // randomized per-component retry on search failure
    std::uint64_t det_retry_cap = 10'000;
    std::uint64_t bootstrap_retry_cap = 10'000;
    bool enforce_criteria = false;     // criterion prechecks error instead of warning
    bool tolerate_failures = false;    // best-effort assignments on infeasible components
    bool capture_rps = false;          // snapshot the partial setting for inspection
};

struct SolverStats {
    std::uint64_t resamplings = 0;
    int frozen_count = 0;
    std::vector<int> residual_component_sizes;
    int blocks_processed = 0;
    std::vector<int> failed_events;  // only under tolerate_failures
    std::vector<std::string> warnings;
};

struct SolverOutcome {
    PartialAssignment assignment;
    RoundLedger ledger;
    SolverStats stats;
    bool verified = false;
    std::optional<PartialAssignment> rps_snapshot;  // when capture_rps is set
};

// Derived system used by bootstrapping: one event per violated original
// event, dependencies within graph distance 2T+1 of each other.
struct DerivedLLL {
    std::string base_alg;
    std::uint64_t T = 0;
    int dep_radius = 1;
    std::vector<int> event_ids;
    Graph dep;       // over indices into event_ids
    int d_prime = 0;
    double p_prime = 0.0;
};

// Per-block trace of the deterministic solver, for invariant tests.
struct DetTrace {
    std::vector<double> block_thresholds;
    std::vector<double> block_max_cond;  // max cond_prob over all events after block i
};

// Baseline resampling solver (sequential semantics): sample everything, then
// repeatedly resample the variables of the minimum-id violated event.
SolverOutcome moser_tardos(const LLLInstance& inst, const SeedContext& ctx,
                           const SolverConfig& cfg = {});

// Randomized partial setting: color classes of the square dependency graph,
// single-variable draws, undo-and-freeze on dangerous events. Postcondition:
// every event's conditional probability is at most sqrt(p).
PartialAssignment random_partial_setting(const LLLInstance& inst, int lambda,
                                         const SeedContext& ctx, RoundLedger& ledger,
                                         const SolverConfig& cfg = {},
                                         std::uint64_t phase_salt = 0,
                                         SolverStats* stats = nullptr);

// Deterministic solver over a network decomposition of the square
// dependency graph restricted to events with unset variables. After block i,
// every event's conditional probability is at most p_eff*(e*max(d,1))^i; after
// the last block nothing is violated.
void det_lll(const LLLInstance& inst, PartialAssignment& pa, const NetworkDecomposition& nd,
             double p_eff, RoundLedger& ledger, const SolverConfig& cfg = {},
             const SeedContext* ctx = nullptr, std::uint64_t phase_salt = 0,
             DetTrace* trace = nullptr, SolverStats* stats = nullptr);

// Composed algorithm: partial setting, shattering of the residual square
// graph, then the deterministic solver with p_eff = sqrt(p).
SolverOutcome base_lll(const LLLInstance& inst, int lambda, const SeedContext& ctx,
                       RoundLedger& ledger, const SolverConfig& cfg = {},
                       std::uint64_t nominal_n = 0, std::uint64_t phase_salt = 0);

// Bootstrap: run the base algorithm as if the instance had n_star
// events, tolerate per-event failures, build the derived system over the
// violated events, and re-randomize failed regions per derived component.
SolverOutcome bootstrap_lll(const LLLInstance& inst, int n_star, int lambda_inner,
                            const SeedContext& ctx, RoundLedger& ledger,
                            const SolverConfig& cfg = {}, DerivedLLL* derived_out = nullptr);

DerivedLLL build_derived_lll(const LLLInstance& inst, const std::vector<int>& failed,
                             std::uint64_t T, int n_star);

// Components of the square dependency graph restricted to events with at
// least one unset variable (ascending by minimum event id).
std::vector<std::vector<int>> residual_components(const LLLInstance& inst,
                                                  const PartialAssignment& pa);

}  // namespace lll
