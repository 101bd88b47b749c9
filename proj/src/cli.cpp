#include "lll/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lll/generators.hpp"
#include "lll/io_json.hpp"

namespace lll {

namespace {

struct GeneratorSpec {
    std::string kind = "path";
    int d = 3;
    double p = 0.01;
    int degree_cap = 8;
    int rows = 0, cols = 0;
};

Graph make_graph(const GeneratorSpec& spec, int n, const SeedContext& ctx) {
    auto rng = ctx.stream(0, phase_id(PhaseKind::Generator));
    if (spec.kind == "path") return path_graph(n);
    if (spec.kind == "cycle") return cycle_graph(n);
    if (spec.kind == "grid") {
        int rows = spec.rows, cols = spec.cols;
        if (rows <= 0 || cols <= 0) {
            rows = std::max(1, int(std::sqrt(double(n))));
            cols = (n + rows - 1) / rows;
        }
        return grid_graph(rows, cols);
    }
    if (spec.kind == "random_regular") return random_regular_graph(n, spec.d, rng);
    if (spec.kind == "gnp_capped") return gnp_capped_graph(n, spec.p, spec.degree_cap, rng);
    throw parameter_error("unknown generator kind: " + spec.kind);
}

GeneratorSpec generator_from_json(const json& j) {
    GeneratorSpec spec;
    spec.kind = j.value("kind", "path");
    spec.d = j.value("d", 3);
    spec.p = j.value("p", 0.01);
    spec.degree_cap = j.value("degree_cap", 8);
    spec.rows = j.value("rows", 0);
    spec.cols = j.value("cols", 0);
    return spec;
}

LLLInstance make_family_instance(const json& family, int n, const GeneratorSpec& gen,
                                 const SeedContext& ctx) {
    std::string kind = family.at("kind").get<std::string>();
    if (kind == "conj-chain")
        return conjunction_chain_instance(n, family.value("window", 2),
                                          family.value("q", 1e-13));
    if (kind == "regular-conj") {
        auto rng = ctx.stream(1, phase_id(PhaseKind::Generator, 1));
        return regular_conjunction_instance(n, family.value("d", 3), family.value("q", 1e-10),
                                            rng);
    }
    if (kind == "threshold") {
        auto g = make_graph(gen, n, ctx);
        return threshold_instance(g, family.value("q", 1e-12), family.value("t", 3));
    }
    throw parameter_error("unknown instance family: " + kind);
}

int write_or_print(const json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << '\n';
    } else {
        save_json_file(j, out_path);
    }
    return 0;
}

// --- subcommand payloads -----------------------------------------------------

struct GenArgs {
    GeneratorSpec spec;
    int n = 10;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_gen(const GenArgs& a) {
    auto g = make_graph(a.spec, a.n, SeedContext{a.seed});
    if (a.out.empty())
        std::cout << format_edge_list(g);
    else
        write_edge_list(g, a.out);
    return 0;
}

struct DecomposeArgs {
    std::string graph_path;
    int lambda = 2;
    std::string mode = "seq";
    std::string out;
};

int cmd_decompose(const DecomposeArgs& a) {
    auto g = read_edge_list(a.graph_path);
    RoundLedger ledger;
    NetworkDecomposition nd;
    if (a.mode == "seq") {
        nd = ball_carve(g, a.lambda);
    } else if (a.mode == "dist") {
        auto helper = default_carve_helper(g, a.lambda);
        nd = ball_carve_distributed(g, a.lambda, helper, ledger);
    } else {
        throw parameter_error("decompose: mode must be seq or dist");
    }
    auto rep = validate_decomposition(g, nd);
    json j = decomposition_to_json(nd, rep);
    j["ledger"] = ledger_to_json(ledger);
    write_or_print(j, a.out);
    return rep.pass ? 0 : 1;
}

struct SolveArgs {
    std::string instance_path;
    std::string family;
    int n = 100;
    double q = 1e-13;
    int window = 2;
    int d = 3;
    int t = 3;
    std::string alg = "base";
    int lambda = 8;
    int n_star = 0;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_solve(const SolveArgs& a) {
    SeedContext ctx{a.seed};
    LLLInstance inst;
    if (!a.instance_path.empty()) {
        inst = instance_from_json(load_json_file(a.instance_path));
    } else if (!a.family.empty()) {
        json family = {{"kind", a.family}, {"q", a.q},      {"window", a.window},
                       {"d", a.d},         {"t", a.t}};
        GeneratorSpec gen;
        gen.kind = "cycle";
        inst = make_family_instance(family, a.n, gen, ctx);
    } else {
        throw parameter_error("solve: need --instance or --family");
    }
    RoundLedger ledger;
    SolverOutcome out;
    if (a.alg == "mt") {
        out = moser_tardos(inst, ctx);
    } else if (a.alg == "base") {
        out = base_lll(inst, a.lambda, ctx, ledger);
    } else if (a.alg == "bootstrap") {
        out = bootstrap_lll(inst, a.n_star, a.lambda, ctx, ledger);
    } else {
        throw parameter_error("solve: alg must be mt, base, or bootstrap");
    }
    write_or_print(outcome_to_json(inst, out), a.out);
    return out.verified ? 0 : 1;
}

struct ColorArgs {
    std::string graph_path;
    std::uint64_t seed = 0;
    std::string out;
    int f = 0;
    int beta = 1;
    std::string lists_path;
    double C = 8.0;
};

int cmd_color(const std::string& mode, const ColorArgs& a) {
    auto g = read_edge_list(a.graph_path);
    SeedContext ctx{a.seed};
    RoundLedger ledger;
    ColoringResult res;
    if (mode == "defective") {
        res = defective_coloring(g, a.f, ctx, ledger);
    } else if (mode == "frugal") {
        res = frugal_coloring(g, a.beta, ctx, ledger);
    } else {
        auto lists = lists_from_json(load_json_file(a.lists_path), g.n);
        res = list_coloring(g, lists, a.C, ctx, ledger);
    }
    write_or_print(coloring_to_json(res, ledger), a.out);
    return res.verified ? 0 : 1;
}

struct VerifyArgs {
    std::string graph_path;
    std::string result_path;
    std::string mode = "defective";
    int f = 0;
    int beta = 1;
    std::string lists_path;
    std::string instance_path;
};

int cmd_verify(const VerifyArgs& a) {
    if (!a.instance_path.empty()) {
        auto inst = instance_from_json(load_json_file(a.instance_path));
        auto j = load_json_file(a.result_path);
        auto values = j.at("assignment").get<std::vector<int>>();
        PartialAssignment pa(inst.num_vars());
        for (int v = 0; v < inst.num_vars(); ++v) pa.set(v, values.at(std::size_t(v)));
        auto bad = violated_events(inst, pa);
        json out = {{"violated", bad}, {"pass", bad.empty()}};
        std::cout << out.dump(2) << '\n';
        return bad.empty() ? 0 : 1;
    }
    auto g = read_edge_list(a.graph_path);
    auto j = load_json_file(a.result_path);
    auto colors = j.at("colors").get<std::vector<int>>();
    VerifyMode mode;
    std::vector<std::vector<int>> lists;
    if (a.mode == "defective") {
        mode.kind = VerifyMode::Defective;
        mode.f = a.f;
    } else if (a.mode == "frugal") {
        mode.kind = VerifyMode::Frugal;
        mode.beta = a.beta;
    } else if (a.mode == "list") {
        mode.kind = VerifyMode::List;
        lists = lists_from_json(load_json_file(a.lists_path), g.n);
        for (auto& lv : lists) std::sort(lv.begin(), lv.end());
        mode.lists = &lists;
    } else {
        throw parameter_error("verify: unknown mode " + a.mode);
    }
    auto rep = verify_coloring(g, colors, mode);
    json out = {{"pass", rep.pass}, {"colors", rep.colors_used}, {"detail", rep.detail}};
    std::cout << out.dump(2) << '\n';
    return rep.pass ? 0 : 1;
}

struct BenchArgs {
    std::string config_path;
    std::string out;
    std::string format = "json";
};

int cmd_bench(const BenchArgs& a) {
    json cfg = load_json_file(a.config_path);
    GeneratorSpec gen = generator_from_json(cfg.value("generator", json::object()));
    auto sizes = cfg.value("sizes", std::vector<int>{});
    auto seeds = cfg.value("seeds", std::vector<std::uint64_t>{});
    json task = cfg.at("task");
    std::string type = task.at("type").get<std::string>();

    json runs = json::array();
    bool all_verified = true;
    std::map<int, std::pair<double, int>> ledger_acc;  // n -> (sum, count)

    for (int n : sizes) {
        for (auto seed : seeds) {
            SeedContext ctx{seed};
            json row = {{"n", n}, {"seed", seed}};
            bool verified = false;
            std::uint64_t ledger_total = 0;
            try {
                if (type == "solve") {
                    auto inst = make_family_instance(task.at("family"), n, gen, ctx);
                    RoundLedger ledger;
                    SolverOutcome out;
                    std::string alg = task.value("alg", "base");
                    if (alg == "mt") out = moser_tardos(inst, ctx);
                    else if (alg == "base")
                        out = base_lll(inst, task.value("lambda", 8), ctx, ledger);
                    else
                        out = bootstrap_lll(inst, task.value("n_star", 0),
                                            task.value("lambda", 8), ctx, ledger);
                    verified = out.verified;
                    ledger_total = ledger.total;
                    row["resamplings"] = out.stats.resamplings;
                } else if (type == "color") {
                    auto g = make_graph(gen, n, ctx);
                    RoundLedger ledger;
                    ColoringResult res;
                    std::string mode = task.at("mode").get<std::string>();
                    if (mode == "defective")
                        res = defective_coloring(g, task.value("f", 0), ctx, ledger);
                    else if (mode == "frugal")
                        res = frugal_coloring(g, task.value("beta", 1), ctx, ledger);
                    else
                        throw parameter_error("bench: list tasks need explicit lists");
                    verified = res.verified;
                    ledger_total = ledger.total;
                    row["colors"] = res.colors_used;
                    row["cap"] = res.cap;
                    row["clamped"] = res.clamped;
                } else if (type == "decompose") {
                    auto g = make_graph(gen, n, ctx);
                    auto nd = ball_carve(g, task.value("lambda", 2));
                    auto rep = validate_decomposition(g, nd);
                    verified = rep.pass;
                    row["measured_D"] = rep.measured_D;
                } else {
                    throw parameter_error("bench: unknown task type " + type);
                }
            } catch (const std::exception& e) {
                row["error"] = e.what();
                verified = false;
            }
            row["verified"] = verified;
            row["ledger_total"] = ledger_total;
            all_verified = all_verified && verified;
            auto& acc = ledger_acc[n];
            acc.first += double(ledger_total);
            acc.second += 1;
            runs.push_back(row);
        }
    }

    json aggregate = json::array();
    for (const auto& [n, acc] : ledger_acc)
        aggregate.push_back(
            {{"n", n}, {"mean_ledger_total", acc.second ? acc.first / acc.second : 0.0}});

    json report = {{"config", cfg},
                   {"runs", runs},
                   {"aggregate", aggregate},
                   {"all_verified", all_verified}};

    if (a.format == "csv") {
        std::ostringstream csv;
        csv << "n,seed,verified,ledger_total\n";
        for (const auto& row : runs)
            csv << row.at("n").get<int>() << ',' << row.at("seed").get<std::uint64_t>() << ','
                << (row.at("verified").get<bool>() ? 1 : 0) << ','
                << row.at("ledger_total").get<std::uint64_t>() << '\n';
        if (a.out.empty()) {
            std::cout << csv.str();
        } else {
            std::ofstream f(a.out);
            if (!f) throw parameter_error("cannot write file: " + a.out);
            f << csv.str();
        }
    } else {
        write_or_print(report, a.out);
    }
    return all_verified ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"round-accounted local algorithms: constraint solvers, "
                 "decompositions, and coloring pipelines"};
    app.require_subcommand(1);

    GenArgs gen_args;
    auto* gen = app.add_subcommand("gen", "generate a graph (edge-list format)");
    gen->add_option("--kind", gen_args.spec.kind,
                    "path|cycle|grid|random_regular|gnp_capped");
    gen->add_option("--n", gen_args.n, "node count");
    gen->add_option("--rows", gen_args.spec.rows, "grid rows");
    gen->add_option("--cols", gen_args.spec.cols, "grid cols");
    gen->add_option("--d", gen_args.spec.d, "regular degree");
    gen->add_option("--p", gen_args.spec.p, "gnp edge probability");
    gen->add_option("--cap", gen_args.spec.degree_cap, "gnp degree cap");
    gen->add_option("--seed", gen_args.seed, "seed");
    gen->add_option("--out", gen_args.out, "output file");

    DecomposeArgs dec_args;
    auto* dec = app.add_subcommand("decompose", "network decomposition via ball carving");
    dec->add_option("--graph", dec_args.graph_path, "edge-list file")->required();
    dec->add_option("--lambda", dec_args.lambda, "block budget");
    dec->add_option("--mode", dec_args.mode, "seq|dist");
    dec->add_option("--out", dec_args.out, "output file");

    SolveArgs solve_args;
    auto* solve = app.add_subcommand("solve", "run a constraint solver");
    solve->add_option("--instance", solve_args.instance_path, "instance JSON file");
    solve->add_option("--family", solve_args.family,
                      "conj-chain|regular-conj|threshold (built-in families)");
    solve->add_option("--n", solve_args.n, "instance size for families");
    solve->add_option("--q", solve_args.q, "family variable bias");
    solve->add_option("--window", solve_args.window, "conj-chain window");
    solve->add_option("--d", solve_args.d, "regular-conj degree");
    solve->add_option("--t", solve_args.t, "threshold family bound");
    solve->add_option("--alg", solve_args.alg, "mt|base|bootstrap");
    solve->add_option("--lambda", solve_args.lambda, "criterion exponent budget");
    solve->add_option("--n-star", solve_args.n_star, "bootstrap nominal size (0 = auto)");
    solve->add_option("--seed", solve_args.seed, "seed");
    solve->add_option("--out", solve_args.out, "output file");

    ColorArgs color_args;
    auto* color = app.add_subcommand("color", "coloring pipelines");
    color->require_subcommand(1);
    auto* cdef = color->add_subcommand("defective", "f-defective coloring");
    cdef->add_option("--f", color_args.f, "defect bound")->required();
    auto* cfru = color->add_subcommand("frugal", "beta-frugal coloring");
    cfru->add_option("--beta", color_args.beta, "frugality bound")->required();
    auto* clist = color->add_subcommand("list", "list coloring");
    clist->add_option("--lists", color_args.lists_path, "lists JSON file")->required();
    clist->add_option("--C", color_args.C, "conflict constant");
    for (auto* sub : {cdef, cfru, clist}) {
        sub->add_option("--graph", color_args.graph_path, "edge-list file")->required();
        sub->add_option("--seed", color_args.seed, "seed");
        sub->add_option("--out", color_args.out, "output file");
    }

    VerifyArgs verify_args;
    auto* verify = app.add_subcommand("verify", "re-check a result file");
    verify->add_option("--graph", verify_args.graph_path, "edge-list file");
    verify->add_option("--result", verify_args.result_path, "result JSON")->required();
    verify->add_option("--mode", verify_args.mode, "defective|frugal|list");
    verify->add_option("--f", verify_args.f, "defect bound");
    verify->add_option("--beta", verify_args.beta, "frugality bound");
    verify->add_option("--lists", verify_args.lists_path, "lists JSON file");
    verify->add_option("--instance", verify_args.instance_path,
                       "instance JSON (verify a solver outcome)");

    BenchArgs bench_args;
    auto* bench = app.add_subcommand("bench", "run an experiment config");
    bench->add_option("--config", bench_args.config_path, "config JSON")->required();
    bench->add_option("--out", bench_args.out, "output file");
    bench->add_option("--format", bench_args.format, "json|csv");

    // CLI11 wants argv-style reversed input
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        std::ostringstream dummy;
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << e.what() << '\n';
        return 2;
    }

    try {
        if (gen->parsed()) return cmd_gen(gen_args);
        if (dec->parsed()) return cmd_decompose(dec_args);
        if (solve->parsed()) return cmd_solve(solve_args);
        if (color->parsed()) {
            if (cdef->parsed()) return cmd_color("defective", color_args);
            if (cfru->parsed()) return cmd_color("frugal", color_args);
            return cmd_color("list", color_args);
        }
        if (verify->parsed()) return cmd_verify(verify_args);
        if (bench->parsed()) return cmd_bench(bench_args);
    } catch (const parameter_error& e) {
        std::cerr << "parameter error: " << e.what() << '\n';
        return 2;
    } catch (const validation_error& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace lll
