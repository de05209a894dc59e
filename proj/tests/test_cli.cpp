#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "foedi/cli.hpp"
#include "json.hpp"
#include "oracle/oracles.hpp"

using namespace foedi;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("foedi_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_spec(const fs::path& dir, const std::string& json) {
    const auto p = dir / "spec.json";
    io::atomic_write(p, json);
    return p;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(io::read_file(p));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream cs(line);
        std::string c;
        while (std::getline(cs, c, ',')) cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

nlohmann::json manifest(const fs::path& dir) { return nlohmann::json::parse(io::read_file(dir / "manifest.json")); }

cli::RunConfig config(const std::string& command, const fs::path& spec, const fs::path& out) {
    cli::RunConfig cfg;
    cfg.command = command;
    cfg.graph_spec = spec;
    cfg.output_dir = out;
    return cfg;
}

const char* er30 = R"({"model": "ER", "n": 30, "p": 0.3, "seed": 1})";

// Cells compare as text unless both parse as numbers, which then agree to 1e-9.
void compare_tables(const std::vector<std::vector<std::string>>& got, const std::vector<std::vector<std::string>>& want) {
    REQUIRE(got.size() == want.size());
    CHECK(got[0] == want[0]);
    for (std::size_t r = 1; r < got.size(); ++r) {
        REQUIRE(got[r].size() == want[r].size());
        for (std::size_t c = 0; c < got[r].size(); ++c) {
            char* end_a = nullptr;
            char* end_b = nullptr;
            const double a = std::strtod(got[r][c].c_str(), &end_a);
            const double b = std::strtod(want[r][c].c_str(), &end_b);
            if (*end_a != '\0' || *end_b != '\0' || got[r][c].empty()) {
                CHECK(got[r][c] == want[r][c]);
            } else if (std::isnan(a) || std::isnan(b)) {
                CHECK(std::isnan(a) == std::isnan(b));
            } else {
                CHECK(std::abs(a - b) <= 1e-9);
            }
        }
    }
}

}  // namespace

TEST_CASE("score output matches the stored reference") {
    const auto dir = scratch("golden");
    std::ostringstream log;
    REQUIRE(cli::run(config("score", write_spec(dir, er30), dir / "out"), log) == cli::exit_ok);
    compare_tables(read_csv(dir / "out" / "scores.csv"), read_csv(fs::path(FOEDI_GOLDEN_DIR) / "er30_scores.csv"));
}

TEST_CASE("removal scan of ER(200, 0.15) matches the stored reference") {
    const auto dir = scratch("golden_scan");
    std::ostringstream log;
    auto cfg = config("scan", fs::path(FOEDI_DATA_DIR) / "er200.json", dir);
    cfg.mode = Toggle::remove;
    cfg.skip_eigenvectors = true;
    REQUIRE(cli::run(cfg, log) == cli::exit_ok);
    const auto want = read_csv(fs::path(FOEDI_GOLDEN_DIR) / "er200_scan_remove.csv");
    compare_tables(read_csv(dir / "scan.csv"), want);
    // relative error of the score curve against the measured changes, from the reference rows
    double diff = 0.0;
    double base = 0.0;
    for (std::size_t r = 1; r < want.size(); ++r) {
        const double iota = std::stod(want[r][3]);
        const double measured = std::abs(std::stod(want[r][6]));
        diff += (iota - measured) * (iota - measured);
        base += iota * iota;
        CHECK(std::abs(std::stod(want[r][5])) <= std::stod(want[r][4]) + 1e-9);
    }
    const auto m = manifest(dir);
    CHECK(std::abs(m["results"]["foedi_relative_error"].get<double>() - std::sqrt(diff / base)) < 1e-12);
    CHECK(m["results"]["rows"] == want.size() - 1);
    CHECK(m["seed"] == 1);
}

TEST_CASE("stored reference agrees with an independent eigenvector") {
    const auto dir = scratch("golden_check");
    std::ostringstream log;
    REQUIRE(cli::run(config("generate", write_spec(dir, er30), dir), log) == cli::exit_ok);
    const Graph g = io::read_edge_list(dir / "lcc.edgelist");
    std::vector<std::pair<int, int>> pairs;
    for (const Edge& e : g.edges()) pairs.emplace_back(e.i, e.j);
    const auto [lam, v] = oracle::perron(oracle::adjacency(g.node_count(), pairs));
    const auto want = read_csv(fs::path(FOEDI_GOLDEN_DIR) / "er30_scores.csv");
    REQUIRE(want.size() == g.edge_count() + 1);
    for (std::size_t r = 1; r < want.size(); ++r) {
        const auto i = static_cast<std::size_t>(std::stoi(want[r][0]));
        const auto j = static_cast<std::size_t>(std::stoi(want[r][1]));
        CHECK(std::abs(std::stod(want[r][3]) - 2.0 * v[i] * v[j]) < 1e-9);
        CHECK(std::abs(std::stod(want[r][2]) - 2.0 * v[i] * v[j] / lam) < 1e-9);
    }
}

TEST_CASE("manifest records the run") {
    const auto dir = scratch("manifest");
    std::ostringstream log;
    auto cfg = config("scan", write_spec(dir, er30), dir / "out");
    cfg.mode = Toggle::add;
    cfg.max_pairs = 25;
    REQUIRE(cli::run(cfg, log) == cli::exit_ok);
    const auto m = manifest(dir / "out");
    CHECK(m["status"] == "ok");
    CHECK(m["command"] == "scan");
    CHECK(m["seed"] == 1);
    CHECK(m["config"]["source"]["graph_spec"]["model"] == "ER");
    CHECK(m["results"]["rows"] == 25);
    CHECK(m["results"]["rayleigh_bound_violations"] == 0);
    CHECK(m["lambda"].get<double>() > 0.0);
    CHECK(m["graph"]["n"].get<int>() <= 30);
    const auto rows = read_csv(dir / "out" / "scan.csv");
    CHECK(rows.size() == 26);
    CHECK(rows[0] == std::vector<std::string>{"i", "j", "mode", "iota", "iota_dag", "delta_lambda_true",
                                              "delta_lambda_rel_true", "rel_err_dv", "sin_angle", "gap_bound",
                                              "disconnected"});
}

TEST_CASE("seed flag overrides the spec seed") {
    const auto dir = scratch("seed");
    const auto spec = write_spec(dir, er30);
    std::ostringstream log;
    auto a = config("generate", spec, dir / "a");
    auto b = config("generate", spec, dir / "b");
    b.seed = 2;
    REQUIRE(cli::run(a, log) == 0);
    REQUIRE(cli::run(b, log) == 0);
    CHECK(manifest(dir / "b")["seed"] == 2);
    CHECK(io::read_file(dir / "a" / "graph.edgelist") != io::read_file(dir / "b" / "graph.edgelist"));
}

TEST_CASE("every command writes its table") {
    const auto dir = scratch("all");
    const auto spec = write_spec(dir, er30);
    const std::vector<std::pair<std::string, std::string>> expected{
        {"generate", "lcc.edgelist"},         {"score", "scores.csv"},
        {"scan", "scan.csv"},                 {"eigvec-delta", "eigvec_delta.csv"},
        {"greedy", "greedy.csv"},             {"kuramoto-predict", "kuramoto_predict.csv"},
        {"kuramoto-rank", "delta_r.csv"},     {"kuramoto-sim", "sim.csv"}};
    for (const auto& [cmd, file] : expected) {
        auto cfg = config(cmd, spec, dir / cmd);
        cfg.steps = 3;
        cfg.horizon = 2.0;
        cfg.max_pairs = 20;
        std::ostringstream log;
        CAPTURE(cmd, log.str());
        CHECK(cli::run(cfg, log) == cli::exit_ok);
        CHECK(fs::exists(dir / cmd / file));
        CHECK(fs::exists(dir / cmd / "manifest.json"));
    }
    const auto greedy = read_csv(dir / "greedy" / "greedy.csv");
    CHECK(greedy.size() == 4);
    const auto predict = read_csv(dir / "kuramoto-predict" / "kuramoto_predict.csv");
    CHECK(predict.size() == 5);
    const auto rank = read_csv(dir / "kuramoto-rank" / "delta_r.csv");
    CHECK(rank.size() == 1 + 4 * 20);
}

TEST_CASE("invalid configurations exit with status 2") {
    const auto dir = scratch("invalid");
    const auto spec = write_spec(dir, er30);
    std::ostringstream log;
    SECTION("unknown command") { CHECK(cli::run(config("bogus", spec, dir / "o"), log) == cli::exit_invalid_config); }
    SECTION("missing graph source") {
        cli::RunConfig cfg;
        cfg.command = "score";
        cfg.output_dir = dir / "o";
        CHECK(cli::run(cfg, log) == cli::exit_invalid_config);
    }
    SECTION("missing spec file") {
        CHECK(cli::run(config("score", dir / "nope.json", dir / "o"), log) == cli::exit_invalid_config);
    }
    SECTION("bad model") {
        const auto bad = write_spec(dir, R"({"model": "XY"})");
        CHECK(cli::run(config("score", bad, dir / "o"), log) == cli::exit_invalid_config);
    }
    SECTION("too many greedy steps") {
        auto cfg = config("greedy", spec, dir / "o");
        cfg.steps = 100000;
        CHECK(cli::run(cfg, log) == cli::exit_invalid_config);
    }
    SECTION("ranking removals") {
        auto cfg = config("kuramoto-rank", spec, dir / "o");
        cfg.mode = Toggle::remove;
        CHECK(cli::run(cfg, log) == cli::exit_invalid_config);
    }
    SECTION("non-positive k multiple") {
        auto cfg = config("kuramoto-predict", spec, dir / "o");
        cfg.k_multiples = std::vector<double>{1.0, -1.0};
        CHECK(cli::run(cfg, log) == cli::exit_invalid_config);
    }
    CHECK(log.str().find("invalid configuration") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "o" / "manifest.json"));
}

TEST_CASE("numerical failures exit with status 3") {
    const auto dir = scratch("numerical");
    io::atomic_write(dir / "empty.edgelist", "# nodes 4\n");
    cli::RunConfig cfg;
    cfg.command = "score";
    cfg.edge_list = dir / "empty.edgelist";
    cfg.output_dir = dir / "o";
    std::ostringstream log;
    CHECK(cli::run(cfg, log) == cli::exit_numerical);
    CHECK(log.str().find("DegenerateSpectrum") != std::string::npos);
    cfg.command = "generate";
    std::ostringstream log2;
    CHECK(cli::run(cfg, log2) == cli::exit_ok);
    CHECK(manifest(dir / "o")["lambda"].is_null());
}

TEST_CASE("edge-list input and heterogeneity warning") {
    const auto dir = scratch("edgelist");
    io::atomic_write(dir / "star.edgelist", "0 1\n0 2\n0 3\n0 4\n0 5\n");
    cli::RunConfig cfg;
    cfg.command = "kuramoto-predict";
    cfg.edge_list = dir / "star.edgelist";
    cfg.output_dir = dir / "o";
    std::ostringstream log;
    CHECK(cli::run(cfg, log) == cli::exit_ok);
    CHECK(log.str().find("warning") != std::string::npos);
    CHECK(manifest(dir / "o")["config"]["source"]["edge_list"].is_string());
}
