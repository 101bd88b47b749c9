#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lll/solvers.hpp"

namespace lll {

struct ColorVerifyReport {
    bool pass = false;
    std::string mode;
    int colors_used = 0;
    double cap = 0.0;
    std::string detail;
};

struct ColoringResult {
    std::vector<int> color_of;
    int colors_used = 0;
    double cap = 0.0;
    bool clamped = false;
    bool verified = false;
    std::int64_t palette_watermark = 0;
    ColorVerifyReport report;
};

// Bucketing state: buckets 0..k-1 are the random draw, k..2k-1 the fresh
// buckets assigned to resolved overflow nodes.
struct BucketState {
    std::vector<int> bucket_of;
    NodeSubset overflow;
    int k = 1;
    int delta_p = 1;
};

// Partial proper coloring where no node of the base graph sees any color more
// than beta times; -1 means uncolored.
struct PartialFrugal {
    std::vector<int> color_of;
    NodeSubset uncolored;
    int beta = 1;
    std::int64_t palette_watermark = 0;
};

struct ListState {
    std::vector<std::vector<int>> lists;  // sorted color lists
    int L = 0;                            // common lower bound on list size
    double C = 0.0;                       // conflict constant
};

struct VerifyMode {
    enum Kind { Defective, Frugal, List } kind = Defective;
    int f = 0;
    int beta = 1;
    const std::vector<std::vector<int>>* lists = nullptr;
};

// --- operations --------------------------------------------------------------

BucketState bucket_once(const Graph& g, int delta_p, int k, const SeedContext& ctx,
                        RoundLedger& ledger, std::uint64_t phase_salt = 0);

ColoringResult defective_coloring(const Graph& g, int f, const SeedContext& ctx,
                                  RoundLedger& ledger, std::uint64_t phase_salt = 0);

PartialFrugal make_frugal_state(const Graph& g, int beta);

PartialFrugal sample_partial_frugal(const Graph& g, const PartialFrugal& state, int delta_p,
                                    int x, const SeedContext& ctx, RoundLedger& ledger,
                                    std::uint64_t phase_salt = 0);

PartialFrugal frugal_progress_step(const Graph& g, const PartialFrugal& state, int delta_p,
                                   int x, const SeedContext& ctx, RoundLedger& ledger,
                                   std::uint64_t phase_salt = 0);

ColoringResult frugal_coloring(const Graph& g, int beta, const SeedContext& ctx,
                               RoundLedger& ledger);

ListState prune_once(const Graph& g, const ListState& state, const SeedContext& ctx,
                     RoundLedger& ledger, std::uint64_t phase_salt = 0);

ColoringResult list_coloring(const Graph& g, const std::vector<std::vector<int>>& lists,
                             double C, const SeedContext& ctx, RoundLedger& ledger);

ColorVerifyReport verify_coloring(const Graph& g, const std::vector<int>& color_of,
                                  const VerifyMode& mode);

// Color-choice graph: one vertex per (node, list color); edges join same-node
// pairs and same-color pairs across graph edges.
struct ColorChoiceGraph {
    Graph h;
    std::vector<int> offset;      // node -> first H-vertex id
    std::vector<int> owner;       // H-vertex -> node
    std::vector<int> color_of;    // H-vertex -> color value
};
ColorChoiceGraph build_color_choice_graph(const Graph& g,
                                          const std::vector<std::vector<int>>& lists);

}  // namespace lll
