#pragma once

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "foedi/error.hpp"
#include "foedi/generators.hpp"
#include "foedi/graph.hpp"
#include "foedi/greedy.hpp"
#include "foedi/importance.hpp"
#include "foedi/io.hpp"
#include "foedi/kuramoto.hpp"
#include "foedi/perturbation.hpp"
#include "foedi/rng.hpp"
#include "foedi/spectral.hpp"

namespace foedi::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_invalid_config = 2;
inline constexpr int exit_numerical = 3;

inline const std::vector<std::string>& commands() {
    static const std::vector<std::string> names{"generate", "score",         "scan",          "eigvec-delta",
                                                "greedy",   "kuramoto-predict", "kuramoto-rank", "kuramoto-sim"};
    return names;
}

struct RunConfig {
    std::string command;
    std::optional<std::filesystem::path> graph_spec;
    std::optional<std::filesystem::path> edge_list;
    std::optional<Toggle> mode;
    std::filesystem::path output_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> steps;  // greedy; unset with steps_complete = until complete
    bool steps_complete = false;
    std::optional<std::vector<double>> k_multiples;
    double dt = SimOptions{}.dt;
    double horizon = SimOptions{}.horizon;
    std::optional<std::size_t> max_pairs;  // random subsample of candidate pairs
    bool exact_delta_lambda = false;
    bool skip_eigenvectors = false;
};

namespace detail {

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ErrorCode::invalid_argument, what) {}
};

struct LoadedGraph {
    Graph raw;
    Graph graph;  // largest connected component
    nlohmann::json source;
    std::uint64_t seed = 0;
};

inline LoadedGraph load_graph(const RunConfig& cfg) {
    if (cfg.graph_spec.has_value() == cfg.edge_list.has_value()) {
        throw ConfigError("exactly one of --graph-spec or --edge-list is required");
    }
    LoadedGraph out;
    if (cfg.graph_spec) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(io::read_file(*cfg.graph_spec));
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("graph spec is not valid JSON: ") + e.what());
        }
        GeneratorSpec spec = spec_from_json(j);
        if (cfg.seed) spec.seed = *cfg.seed;
        out.seed = spec.seed;
        out.source = {{"graph_spec", spec_to_json(spec)}};
        out.raw = generate(spec);
    } else {
        out.seed = cfg.seed.value_or(0);
        out.source = {{"edge_list", cfg.edge_list->generic_string()}};
        out.raw = io::read_edge_list(*cfg.edge_list);
    }
    out.graph = largest_connected_component(out.raw).graph;
    return out;
}

inline std::vector<Edge> subsample(std::vector<Edge> pairs, std::optional<std::size_t> limit, std::uint64_t seed) {
    if (!limit || *limit >= pairs.size()) return pairs;
    Rng rng(seed, "subsample");
    rng.shuffle(pairs);
    pairs.resize(*limit);
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

inline nlohmann::json config_json(const RunConfig& cfg, const LoadedGraph& lg) {
    nlohmann::json c;
    c["command"] = cfg.command;
    c["source"] = lg.source;
    c["seed"] = lg.seed;
    if (cfg.mode) c["mode"] = to_string(*cfg.mode);
    if (cfg.steps) c["steps"] = *cfg.steps;
    if (cfg.steps_complete) c["steps"] = "complete";
    if (cfg.k_multiples) c["k_multiples"] = *cfg.k_multiples;
    if (cfg.max_pairs) c["max_pairs"] = *cfg.max_pairs;
    c["dt"] = cfg.dt;
    c["horizon"] = cfg.horizon;
    c["exact_delta_lambda"] = cfg.exact_delta_lambda;
    c["skip_eigenvectors"] = cfg.skip_eigenvectors;
    return c;
}

inline std::string scan_csv(const std::vector<PerturbationReport>& rows) {
    io::CsvWriter csv({"i", "j", "mode", "iota", "iota_dag", "delta_lambda_true", "delta_lambda_rel_true", "rel_err_dv",
                       "sin_angle", "gap_bound", "disconnected"});
    for (const auto& r : rows) {
        csv.cell(r.i).cell(r.j).cell(to_string(r.mode)).cell(r.iota).cell(r.iota_dag).cell(r.delta_lambda_true);
        csv.cell(r.delta_lambda_rel_true).cell(r.rel_err_dv).cell(r.sin_angle).cell(r.gap_bound).cell(r.disconnected);
        csv.end_row();
    }
    return csv.str();
}

inline nlohmann::json summary_json(const ScanSummary& s) {
    return {{"rows", s.rows},
            {"rayleigh_bound_violations", s.rayleigh_violations},
            {"angle_bound_violations", s.angle_violations},
            {"angle_bound_vacuous_rows", s.vacuous},
            {"disconnected_rows", s.disconnected},
            {"eigvec_failures", s.eigvec_failures},
            {"rel_err_dv_below_one", s.rel_err_below_one},
            {"foedi_relative_error", s.foedi_relative_error}};
}

class Runner {
public:
    Runner(const RunConfig& cfg, std::ostream& log) : cfg_(cfg), log_(log) {}

    int run() {
        try {
            stage_ = "configuration";
            validate();
            stage_ = "graph loading";
            lg_ = load_graph(cfg_);
            std::filesystem::create_directories(cfg_.output_dir);
            manifest_["config"] = config_json(cfg_, lg_);
            manifest_["command"] = cfg_.command;
            manifest_["seed"] = lg_.seed;
            describe_graph();
            dispatch();
            manifest_["status"] = "ok";
            write("manifest.json", manifest_.dump(2) + "\n");
            return exit_ok;
        } catch (const ConfigError& e) {
            log_ << "foedi: invalid configuration: " << e.what() << "\n";
            return exit_invalid_config;
        } catch (const Error& e) {
            switch (e.code()) {
                case ErrorCode::invalid_argument:
                case ErrorCode::invalid_node:
                case ErrorCode::self_loop_rejected:
                case ErrorCode::edge_state_conflict:
                case ErrorCode::io_error:
                    log_ << "foedi: invalid configuration during " << stage_ << ": " << e.what() << "\n";
                    return exit_invalid_config;
                default:
                    log_ << "foedi: numerical failure during " << stage_ << ": " << e.what() << "\n";
                    return exit_numerical;
            }
        } catch (const std::filesystem::filesystem_error& e) {
            log_ << "foedi: cannot write outputs: " << e.what() << "\n";
            return exit_invalid_config;
        }
    }

private:
    void validate() const {
        const auto& names = commands();
        if (std::find(names.begin(), names.end(), cfg_.command) == names.end()) {
            throw ConfigError("unknown command '" + cfg_.command + "'");
        }
        if (!(cfg_.dt > 0.0) || !(cfg_.horizon > 0.0)) throw ConfigError("--dt and --horizon must be positive");
        if (cfg_.k_multiples) {
            if (cfg_.k_multiples->empty()) throw ConfigError("--k-multiples must not be empty");
            for (const double m : *cfg_.k_multiples) {
                if (!(m > 0.0)) throw ConfigError("--k-multiples entries must be positive");
            }
        }
        if (cfg_.command == "kuramoto-rank" && cfg_.mode == Toggle::remove) {
            throw ConfigError("kuramoto-rank only ranks edge additions");
        }
        if (cfg_.command == "greedy" && cfg_.mode == Toggle::remove && !cfg_.steps) {
            throw ConfigError("greedy --mode remove needs a numeric --steps");
        }
    }

    void write(const std::string& name, const std::string& contents) {
        io::atomic_write(cfg_.output_dir / name, contents);
    }

    void describe_graph() {
        nlohmann::json g;
        g["n_input"] = lg_.raw.node_count();
        g["m_input"] = lg_.raw.edge_count();
        g["n"] = lg_.graph.node_count();
        g["m"] = lg_.graph.edge_count();
        manifest_["graph"] = g;
        if (lg_.graph.node_count() < 1) throw Error(ErrorCode::degenerate_spectrum, "empty graph");
        const DegreeStats ds = degree_stats(lg_.graph);
        manifest_["mean_degree"] = ds.mean;
        manifest_["sigma_d"] = ds.std;
        manifest_["d_max"] = ds.max;
        stage_ = "eigensolve";
        if (cfg_.command == "generate" && (lg_.graph.node_count() < 2 || lg_.graph.edge_count() == 0)) {
            manifest_["lambda"] = nullptr;
            manifest_["lambda2"] = nullptr;
            manifest_["homogeneity"] = nullptr;
            return;
        }
        spectrum_.emplace(decompose(lg_.graph));
        const EigenPair& ep = spectrum_->leading();
        manifest_["lambda"] = ep.lambda;
        manifest_["lambda2"] = ep.lambda2;
        manifest_["homogeneity"] = ep.lambda / ds.mean;
    }

    const EigenPair& ep() const { return spectrum_->leading(); }

    void dispatch() {
        const std::string& c = cfg_.command;
        stage_ = c;
        if (c == "generate") return generate_cmd();
        if (c == "score") return score_cmd();
        if (c == "scan") return scan_cmd(false);
        if (c == "eigvec-delta") return scan_cmd(true);
        if (c == "greedy") return greedy_cmd();
        if (c == "kuramoto-predict") return predict_cmd();
        if (c == "kuramoto-rank") return rank_cmd();
        if (c == "kuramoto-sim") return sim_cmd();
    }

    void generate_cmd() {
        write("graph.edgelist", io::format_edge_list(lg_.raw));
        write("lcc.edgelist", io::format_edge_list(lg_.graph));
    }

    void score_cmd() {
        const Toggle mode = cfg_.mode.value_or(Toggle::remove);
        auto scores = score_all(lg_.graph, ep(), mode == Toggle::remove ? PairSet::edges : PairSet::non_edges);
        sort_by_iota(scores);
        io::CsvWriter csv({"i", "j", "iota", "iota_dag"});
        for (const auto& s : scores) csv.cell(s.i).cell(s.j).cell(s.iota).cell(s.iota_dag).end_row();
        write("scores.csv", csv.str());
        const double sum = foedi_sum_check(lg_.graph, ep());
        manifest_["results"] = {{"mode", to_string(mode)},
                                {"rows", scores.size()},
                                {"foedi_sum", sum},
                                {"foedi_sum_minus_lambda", sum - ep().lambda}};
    }

    void scan_cmd(bool by_rel_err) {
        const Toggle mode = cfg_.mode.value_or(Toggle::remove);
        ScanOptions opt;
        opt.eigenvectors = by_rel_err || !cfg_.skip_eigenvectors;
        opt.exact_delta_lambda = cfg_.exact_delta_lambda;
        auto candidates = mode == Toggle::remove ? lg_.graph.edges() : complement_edges(lg_.graph);
        opt.pairs = subsample(std::move(candidates), cfg_.max_pairs, lg_.seed);
        auto rows = edge_scan(lg_.graph, mode, opt);
        const ScanSummary summary = summarize(rows);
        if (by_rel_err) sort_by_rel_err(rows);
        write(by_rel_err ? "eigvec_delta.csv" : "scan.csv", scan_csv(rows));
        auto res = summary_json(summary);
        res["mode"] = to_string(mode);
        res["gap_bound"] = rows.empty() ? 0.0 : gap_bound();
        manifest_["results"] = res;
        if (summary.vacuous > 0) log_ << "foedi: note: angle bound is vacuous (1/(lambda-lambda2) > 1)\n";
    }

    double gap_bound() const {
        const double gap = ep().lambda - ep().lambda2;
        return gap > 0.0 ? 1.0 / gap : std::numeric_limits<double>::infinity();
    }

    void greedy_cmd() {
        const Toggle mode = cfg_.mode.value_or(Toggle::add);
        GreedyResult result;
        if (mode == Toggle::add) {
            result = greedy_add(lg_.graph, cfg_.steps_complete ? std::nullopt : cfg_.steps);
        } else {
            result = greedy_remove(lg_.graph, *cfg_.steps);
        }
        io::CsvWriter csv({"step", "i", "j", "iota_dag", "lambda", "sigma_d"});
        for (const auto& t : result.trace) {
            csv.cell(t.step).cell(t.chosen.i).cell(t.chosen.j).cell(t.iota_dag).cell(t.lambda).cell(t.sigma_d).end_row();
        }
        write("greedy.csv", csv.str());
        manifest_["results"] = {{"mode", to_string(mode)},
                                {"steps_taken", result.trace.size()},
                                {"stop_reason", to_string(result.reason)},
                                {"initial_lambda", result.initial_lambda},
                                {"final_lambda", result.trace.empty() ? result.initial_lambda : result.trace.back().lambda}};
    }

    nlohmann::json prediction_json(const KuramotoPrediction& p) const {
        return {{"k_c", p.k_c},
                {"eta", p.eta},
                {"alpha", p.alpha},
                {"beta", p.beta},
                {"gamma", p.gamma},
                {"homogeneity", p.homogeneity},
                {"min_degree", p.min_degree}};
    }

    void warn_homogeneity(const KuramotoPrediction& p) const {
        if (p.homogeneity < 0.95 || p.homogeneity > 1.05) {
            log_ << "foedi: warning: lambda/<d> = " << p.homogeneity
                 << " is outside [0.95, 1.05]; the closed-form order parameter assumes a homogeneous degree distribution\n";
        }
    }

    void predict_cmd() {
        const FrequencyModel fm = parabolic_frequency_model();
        const KuramotoPrediction p = predict(lg_.graph, ep(), fm);
        warn_homogeneity(p);
        const auto multiples = cfg_.k_multiples.value_or(std::vector<double>{1.0, 1.1, 1.2, 1.3});
        io::CsvWriter csv({"k_multiple", "k", "r_squared", "r", "below_onset", "beyond_validity"});
        for (const double m : multiples) {
            const OrderParameter op = p.r_squared_at(m * p.k_c);
            csv.cell(m).cell(m * p.k_c).cell(op.r_squared).cell(op.r).cell(op.below_onset).cell(op.beyond_validity);
            csv.end_row();
        }
        write("kuramoto_predict.csv", csv.str());
        manifest_["results"] = prediction_json(p);
    }

    void rank_cmd() {
        const FrequencyModel fm = parabolic_frequency_model();
        RankingOptions opt;
        if (cfg_.k_multiples) opt.k_multiples = *cfg_.k_multiples;
        opt.pairs = subsample(complement_edges(lg_.graph), cfg_.max_pairs, lg_.seed);
        const DeltaRTable table = delta_r_ranking(lg_.graph, ep(), fm, opt);
        warn_homogeneity(table.base);
        io::CsvWriter csv({"edge_index", "i", "j", "iota_dag", "k_multiple", "delta_r", "ln_delta_r"});
        for (const auto& r : table.rows) {
            csv.cell(r.edge_index).cell(r.i).cell(r.j).cell(r.iota_dag).cell(r.k_multiple).cell(r.delta_r).cell(r.ln_delta_r);
            csv.end_row();
        }
        write("delta_r.csv", csv.str());
        auto res = prediction_json(table.base);
        res["homogeneous"] = table.homogeneous;
        res["pairs"] = opt.pairs->size();
        manifest_["results"] = res;
    }

    void sim_cmd() {
        const FrequencyModel fm = parabolic_frequency_model();
        const KuramotoPrediction p = predict(lg_.graph, ep(), fm);
        warn_homogeneity(p);
        const double multiple = cfg_.k_multiples ? cfg_.k_multiples->front() : 1.2;
        SimOptions opt;
        opt.dt = cfg_.dt;
        opt.horizon = cfg_.horizon;
        opt.seed = lg_.seed;
        const SimResult sim = simulate(lg_.graph, fm, multiple * p.k_c, opt);
        io::CsvWriter csv({"t", "r"});
        for (std::size_t k = 0; k < sim.times.size(); ++k) csv.cell(sim.times[k]).cell(sim.r_time_series[k]).end_row();
        write("sim.csv", csv.str());
        auto res = prediction_json(p);
        res["k_multiple"] = multiple;
        res["k"] = sim.k;
        res["r_steady"] = sim.r_steady;
        res["r_predicted"] = p.r_squared_at(sim.k).r;
        manifest_["results"] = res;
    }

    const RunConfig& cfg_;
    std::ostream& log_;
    std::string stage_;
    LoadedGraph lg_;
    std::optional<SpectralDecomposition> spectrum_;
    nlohmann::json manifest_;
};

}  // namespace detail

// Executes one command and returns the process exit status:
// 0 success, 2 invalid configuration, 3 numerical failure.
inline int run(const RunConfig& cfg, std::ostream& log = std::cerr) { return detail::Runner(cfg, log).run(); }

}  // namespace foedi::cli
