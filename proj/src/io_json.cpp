#include "lll/io_json.hpp"

#include <fstream>

namespace lll {

json ledger_to_json(const RoundLedger& ledger) {
    json phases = json::array();
    for (const auto& ph : ledger.phases)
        phases.push_back({{"label", ph.label}, {"rounds", ph.rounds}});
    return {{"phases", phases}, {"total", ledger.total}};
}

json decomposition_to_json(const NetworkDecomposition& nd, const DecompositionReport& rep) {
    json blocks = json::array();
    for (const auto& b : nd.blocks) blocks.push_back(b.to_vector());
    return {{"blocks", blocks},
            {"measured_C", rep.measured_C},
            {"measured_D", rep.measured_D},
            {"cleanup_used", nd.cleanup_used},
            {"claimed_C", nd.claimed_C},
            {"claimed_D", nd.claimed_D},
            {"pass", rep.pass}};
}

json instance_to_json(const LLLInstance& inst) {
    json vars = json::array();
    for (const auto& v : inst.variables)
        vars.push_back({{"id", v.id}, {"domain", v.domain}, {"dist", v.dist}});
    json events = json::array();
    for (const auto& ev : inst.events) {
        json pred;
        switch (ev.kind) {
            case PredicateKind::Conjunction:
                pred = {{"kind", "conjunction"}, {"params", {{"values", ev.conj_values}}}};
                break;
            case PredicateKind::Threshold: {
                json params = {{"mode", ev.threshold.center ? "center" : "fixed"},
                               {"cmp", ev.threshold.cmp == ThresholdCmp::Ge ? "ge" : "le"},
                               {"t", ev.threshold.t}};
                if (!ev.threshold.center) params["targets"] = ev.threshold.targets;
                pred = {{"kind", "threshold"}, {"params", params}};
                break;
            }
            case PredicateKind::Table:
                pred = {{"kind", "table"}, {"params", {{"accepted", ev.accepted}}}};
                break;
            case PredicateKind::Custom:
                throw parameter_error("custom predicates are not serializable");
        }
        events.push_back({{"id", ev.id}, {"scope", ev.scope}, {"predicate", pred}});
    }
    return {{"variables", vars}, {"events", events}};
}

LLLInstance instance_from_json(const json& j) {
    LLLInstance inst;
    for (const auto& v : j.at("variables")) {
        VariableSpec spec;
        spec.id = v.at("id").get<int>();
        spec.domain = v.at("domain").get<int>();
        spec.dist = v.at("dist").get<std::vector<double>>();
        inst.variables.push_back(std::move(spec));
    }
    for (const auto& e : j.at("events")) {
        EventSpec ev;
        ev.id = e.at("id").get<int>();
        ev.scope = e.at("scope").get<std::vector<int>>();
        const auto& pred = e.at("predicate");
        std::string kind = pred.at("kind").get<std::string>();
        const auto& params = pred.at("params");
        if (kind == "conjunction") {
            ev.kind = PredicateKind::Conjunction;
            ev.conj_values = params.at("values").get<std::vector<int>>();
        } else if (kind == "threshold") {
            ev.kind = PredicateKind::Threshold;
            ev.threshold.center = params.at("mode").get<std::string>() == "center";
            if (!ev.threshold.center)
                ev.threshold.targets = params.at("targets").get<std::vector<int>>();
            ev.threshold.cmp =
                params.at("cmp").get<std::string>() == "ge" ? ThresholdCmp::Ge : ThresholdCmp::Le;
            ev.threshold.t = params.at("t").get<int>();
        } else if (kind == "table") {
            ev.kind = PredicateKind::Table;
            ev.accepted = params.at("accepted").get<std::vector<std::vector<int>>>();
        } else {
            throw parameter_error("unknown predicate kind: " + kind);
        }
        inst.events.push_back(std::move(ev));
    }
    inst.finalize();
    return inst;
}

json outcome_to_json(const LLLInstance& inst, const SolverOutcome& out) {
    json stats = {{"resamplings", out.stats.resamplings},
                  {"frozen_count", out.stats.frozen_count},
                  {"residual_component_sizes", out.stats.residual_component_sizes},
                  {"blocks_processed", out.stats.blocks_processed},
                  {"failed_events", out.stats.failed_events},
                  {"warnings", out.stats.warnings}};
    (void)inst;
    return {{"assignment", out.assignment.raw_values()},
            {"stats", stats},
            {"ledger", ledger_to_json(out.ledger)},
            {"verified", out.verified}};
}

json coloring_to_json(const ColoringResult& res, const RoundLedger& ledger) {
    return {{"colors", res.color_of},
            {"count", res.colors_used},
            {"cap", res.cap},
            {"clamped", res.clamped},
            {"watermark", res.palette_watermark},
            {"verified", res.verified},
            {"detail", res.report.detail},
            {"ledger", ledger_to_json(ledger)}};
}

std::vector<std::vector<int>> lists_from_json(const json& j, int n) {
    std::vector<std::vector<int>> lists;
    lists.resize(std::size_t(n));
    for (auto it = j.begin(); it != j.end(); ++it) {
        int v = std::stoi(it.key());
        if (v < 0 || v >= n) throw parameter_error("lists file: node id out of range");
        lists[std::size_t(v)] = it.value().get<std::vector<int>>();
    }
    for (const auto& lv : lists)
        if (lv.empty()) throw parameter_error("lists file: every node needs a list");
    return lists;
}

json load_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw parameter_error("cannot open file: " + path);
    json j;
    f >> j;
    return j;
}

void save_json_file(const json& j, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw parameter_error("cannot write file: " + path);
    f << j.dump(2) << '\n';
}

}  // namespace lll
