#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "lll/colorings.hpp"
#include "lll/decomp.hpp"
#include "lll/model.hpp"
#include "lll/solvers.hpp"

namespace lll {

using json = nlohmann::json;

json ledger_to_json(const RoundLedger& ledger);
json decomposition_to_json(const NetworkDecomposition& nd, const DecompositionReport& rep);

// Instance schema:
//   {"variables":[{"id":0,"domain":2,"dist":[0.5,0.5]}],
//    "events":[{"id":0,"scope":[0,1],
//               "predicate":{"kind":"conjunction","params":{"values":[1,1]}}}]}
// Threshold params: {"mode":"fixed"|"center","targets":[...],"cmp":"ge"|"le","t":3};
// table params: {"accepted":[[...],...]} listing accepted scope tuples.
json instance_to_json(const LLLInstance& inst);
LLLInstance instance_from_json(const json& j);

json outcome_to_json(const LLLInstance& inst, const SolverOutcome& out);
json coloring_to_json(const ColoringResult& res, const RoundLedger& ledger);

std::vector<std::vector<int>> lists_from_json(const json& j, int n);

json load_json_file(const std::string& path);
void save_json_file(const json& j, const std::string& path);

}  // namespace lll
