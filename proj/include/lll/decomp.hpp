#pragma once

#include <string>
#include <vector>

#include "lll/graph.hpp"
#include "lll/runtime.hpp"

namespace lll {

// Partition of a node set into blocks whose induced components each have
// diameter at most claimed_D.
struct NetworkDecomposition {
    std::vector<NodeSubset> blocks;
    NodeSubset universe;
    int claimed_C = 0;
    int claimed_D = 0;
    bool cleanup_used = false;
};

struct CarveStep {
    int epoch = 0;
    int center = 0;
    int radius = 0;  // r*; the inner ball has radius r*-1
    int inner_size = 0;
    int boundary_size = 0;
};

struct CarveReport {
    std::vector<CarveStep> steps;
    int max_radius = 0;
    bool cleanup_used = false;
};

struct DecompositionReport {
    bool partition_ok = false;
    bool count_ok = false;
    bool diameter_ok = false;
    bool pass = false;
    int measured_C = 0;
    int measured_D = 0;
    std::string detail;
};

// Sequential ball carving. nominal_n = 0 means "use g.n"; bootstrapped runs
// pass a smaller nominal size, which reparameterizes the growth threshold
// and may leave stragglers for the cleanup block.
NetworkDecomposition ball_carve(const Graph& g, int lambda, std::uint64_t nominal_n = 0,
                                CarveReport* report = nullptr);

// Phase-structured distributed simulation on top of a helper decomposition of
// power_graph(g, d) for d = 2*ceil(n^(1/lambda) log2 n) + 1. Charges the
// ledger per helper color class processed.
NetworkDecomposition ball_carve_distributed(const Graph& g, int lambda,
                                            const NetworkDecomposition& helper,
                                            RoundLedger& ledger,
                                            std::uint64_t nominal_n = 0,
                                            CarveReport* report = nullptr);

int helper_power_radius(const Graph& g, int lambda, std::uint64_t nominal_n = 0);

NetworkDecomposition default_carve_helper(const Graph& g, int lambda,
                                          std::uint64_t nominal_n = 0);

DecompositionReport validate_decomposition(const Graph& g, const NetworkDecomposition& nd);

// Shattering decomposition of g[b]: greedy ruling set per component,
// cluster to nearest ruling node, carve the contracted graph, lift back.
NetworkDecomposition shattered_decomposition(const Graph& g, const NodeSubset& b,
                                             int lambda, RoundLedger& ledger,
                                             std::uint64_t nominal_n = 0);

// Same pipeline over an implicit power-subset view (avoids materializing the
// square of large graphs). Component diameters in the result are measured as
// 2 * eccentricity of the minimum-id node (an exact upper bound).
NetworkDecomposition shattered_decomposition_view(const PowerView& view, int lambda,
                                                  RoundLedger& ledger,
                                                  std::uint64_t nominal_n = 0);

}  // namespace lll
