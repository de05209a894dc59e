// Command-line front end: generate graphs, score and scan edge toggles, run
// the greedy FoEDI edge-addition loop, and produce Kuramoto predictions and
// simulations. Every command writes CSV data plus manifest.json into --out.

#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "foedi/cli.hpp"

namespace {

foedi::Toggle parse_mode(const std::string& s) {
    if (s == "add") return foedi::Toggle::add;
    if (s == "remove") return foedi::Toggle::remove;
    throw CLI::ValidationError("--mode", "expected add or remove, got '" + s + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"First-order edge dynamical importance toolkit"};
    app.require_subcommand(1);

    foedi::cli::RunConfig cfg;
    std::string graph_spec;
    std::string edge_list;
    std::string mode;
    std::string steps;
    std::string out = ".";
    std::uint64_t seed = 0;
    std::vector<double> k_multiples;
    std::size_t max_pairs = 0;

    for (const auto& name : foedi::cli::commands()) {
        CLI::App* sub = app.add_subcommand(name);
        auto* spec_opt = sub->add_option("--graph-spec", graph_spec, "JSON generator spec");
        auto* list_opt = sub->add_option("--edge-list", edge_list, "edge-list text file");
        spec_opt->excludes(list_opt);
        sub->add_option("--out", out, "output directory");
        sub->add_option("--seed", seed, "seed (overrides the graph spec seed)");
        if (name == "score" || name == "scan" || name == "eigvec-delta" || name == "greedy") {
            sub->add_option("--mode", mode, "add or remove");
        }
        if (name == "scan" || name == "eigvec-delta" || name == "kuramoto-rank") {
            sub->add_option("--max-pairs", max_pairs, "random subsample of candidate pairs (0: all)");
        }
        if (name == "scan" || name == "eigvec-delta") {
            sub->add_flag("--exact-dlambda", cfg.exact_delta_lambda,
                          "use the exact eigenvalue change in the eigenvector equation");
        }
        if (name == "scan") {
            sub->add_flag("--no-eigvec", cfg.skip_eigenvectors, "skip eigenvector and angle columns");
        }
        if (name == "greedy") {
            sub->add_option("--steps", steps, "number of steps, or 'complete'");
        }
        if (name.rfind("kuramoto", 0) == 0) {
            sub->add_option("--k-multiples", k_multiples, "coupling multiples of k_c, comma separated")->delimiter(',');
        }
        if (name == "kuramoto-sim") {
            sub->add_option("--dt", cfg.dt, "RK4 step");
            sub->add_option("--horizon", cfg.horizon, "integration horizon");
        }
    }

    try {
        app.parse(argc, argv);
        cfg.command = app.get_subcommands().front()->get_name();
        const CLI::App* sub = app.get_subcommands().front();
        if (!graph_spec.empty()) cfg.graph_spec = graph_spec;
        if (!edge_list.empty()) cfg.edge_list = edge_list;
        if (!mode.empty()) cfg.mode = parse_mode(mode);
        if (sub->count("--seed") > 0) cfg.seed = seed;
        if (!k_multiples.empty()) cfg.k_multiples = k_multiples;
        if (max_pairs > 0) cfg.max_pairs = max_pairs;
        if (steps == "complete" || steps == "until_complete") {
            cfg.steps_complete = true;
        } else if (!steps.empty()) {
            try {
                cfg.steps = static_cast<std::size_t>(std::stoull(steps));
            } catch (const std::exception&) {
                throw CLI::ValidationError("--steps", "expected a count or 'complete', got '" + steps + "'");
            }
        } else if (cfg.command == "greedy") {
            cfg.steps_complete = true;
        }
        cfg.output_dir = out;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return foedi::cli::exit_invalid_config;
    }
    return foedi::cli::run(cfg);
}
