#include <catch_amalgamated.hpp>

#include <cmath>

#include "foedi/generators.hpp"
#include "foedi/perturbation.hpp"
#include "oracle/oracles.hpp"

using namespace foedi;
using Catch::Matchers::WithinAbs;

namespace {

Graph complete(int n) {
    std::vector<Edge> e;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) e.push_back({i, j});
    return Graph(n, e);
}

Graph lcc(const GeneratorSpec& spec) { return largest_connected_component(generate(spec)).graph; }

oracle::Matrix matrix_of(const Graph& g) {
    std::vector<std::pair<int, int>> pairs;
    for (const Edge& e : g.edges()) pairs.emplace_back(e.i, e.j);
    return oracle::adjacency(g.node_count(), pairs);
}

}  // namespace

TEST_CASE("exact eigenvalue changes on small graphs") {
    CHECK_THAT(true_delta_lambda(Graph(2, {{0, 1}}), 0, 1, Toggle::remove).value, WithinAbs(-1.0, 1e-12));
    CHECK_THAT(true_delta_lambda(Graph(3, {{0, 1}, {1, 2}}), 0, 2, Toggle::add).value,
               WithinAbs(2.0 - std::sqrt(2.0), 1e-12));
    const auto k3 = true_delta_lambda(complete(3), 0, 1, Toggle::remove);
    CHECK_THAT(k3.value, WithinAbs(std::sqrt(2.0) - 2.0, 1e-12));
    CHECK_THAT(k3.lambda_after, WithinAbs(std::sqrt(2.0), 1e-12));
    CHECK_FALSE(k3.disconnected);
    CHECK(true_delta_lambda(Graph(3, {{0, 1}, {1, 2}}), 0, 1, Toggle::remove).disconnected);
}

TEST_CASE("toggles must match the edge state") {
    const Graph g(3, {{0, 1}, {1, 2}});
    const EigenPair ep = leading_eigenpair(g);
    CHECK_THROWS_AS(true_delta_lambda(g, 0, 1, Toggle::add), Error);
    CHECK_THROWS_AS(true_delta_lambda(g, 0, 2, Toggle::remove), Error);
    CHECK_THROWS_AS(predict_delta_v(g, ep, 1, 1, Toggle::add), Error);
    try {
        angle_bound_check(g, ep, 0, 2, Toggle::remove);
        FAIL("no throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::edge_state_conflict);
    }
}

TEST_CASE("variational bounds hold on random graphs") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const Graph g = lcc({ErdosRenyiParams{40, 0.15}, seed});
        ScanOptions opt;
        opt.eigenvectors = false;
        for (const Toggle mode : {Toggle::add, Toggle::remove}) {
            const auto rows = edge_scan(g, mode, opt);
            for (const auto& r : rows) {
                if (mode == Toggle::add) {
                    CHECK(r.delta_lambda_true >= r.iota_dag - 1e-9);
                } else {
                    CHECK(std::abs(r.delta_lambda_true) <= r.iota_dag + 1e-9);
                }
                CHECK(r.rayleigh_bound_holds);
            }
        }
    }
}

TEST_CASE("scan rows are sorted by iota and complete") {
    const Graph g = lcc({ErdosRenyiParams{30, 0.2}, 2});
    const auto rows = edge_scan(g, Toggle::remove);
    REQUIRE(rows.size() == g.edge_count());
    for (std::size_t k = 1; k < rows.size(); ++k) CHECK(rows[k - 1].iota <= rows[k].iota);
    const auto adds = edge_scan(g, Toggle::add);
    CHECK(adds.size() == complement_edges(g).size());
}

TEST_CASE("scan results do not depend on the thread count") {
    const Graph g = lcc({ErdosRenyiParams{30, 0.2}, 3});
    ScanOptions one;
    one.threads = 1;
    ScanOptions many;
    many.threads = 4;
    const auto a = edge_scan(g, Toggle::remove, one);
    const auto b = edge_scan(g, Toggle::remove, many);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].i == b[k].i);
        CHECK(a[k].j == b[k].j);
        CHECK(a[k].delta_lambda_true == b[k].delta_lambda_true);
        CHECK(std::isnan(a[k].rel_err_dv) == std::isnan(b[k].rel_err_dv));
        if (!std::isnan(a[k].rel_err_dv)) CHECK(a[k].rel_err_dv == b[k].rel_err_dv);
    }
}

TEST_CASE("predicted eigenvector change matches a finite-difference derivative") {
    const Graph g = lcc({ErdosRenyiParams{25, 0.25}, 5});
    const EigenPair ep = leading_eigenpair(g);
    const oracle::Matrix a = matrix_of(g);
    const std::vector<std::pair<Edge, Toggle>> cases{
        {g.edges().front(), Toggle::remove}, {g.edges().back(), Toggle::remove}, {complement_edges(g)[3], Toggle::add}};
    for (const auto& [e, mode] : cases) {
        oracle::Matrix dir(a.size(), std::vector<double>(a.size(), 0.0));
        const double s = mode == Toggle::add ? 1.0 : -1.0;
        dir[static_cast<std::size_t>(e.i)][static_cast<std::size_t>(e.j)] = s;
        dir[static_cast<std::size_t>(e.j)][static_cast<std::size_t>(e.i)] = s;
        const Eigen::VectorXd ref = oracle::to_eigen(oracle::perron_derivative(a, dir, 1e-4));
        const Eigen::VectorXd pred = predict_delta_v(g, ep, e.i, e.j, mode);
        CHECK((pred - ref).norm() < 1e-6 * (1.0 + ref.norm()));
        CHECK(std::abs(pred.dot(ep.v)) < 1e-10);
    }
}

TEST_CASE("predicted eigenvector change matches the pseudoinverse formula") {
    const Graph g = lcc({BarabasiAlbertParams{30, 2, 2.0, 1.0}, 1});
    const EigenPair ep = leading_eigenpair(g);
    const int n = g.node_count();
    const Eigen::MatrixXd m = ep.lambda * Eigen::MatrixXd::Identity(n, n) - g.adjacency_matrix();
    const Eigen::MatrixXd pinv = oracle::pseudo_inverse(m, 1e-9);
    const Edge e = complement_edges(g)[10];
    const double dl = 0.3;
    Eigen::MatrixXd da = Eigen::MatrixXd::Zero(n, n);
    da(e.i, e.j) = da(e.j, e.i) = 1.0;
    const Eigen::VectorXd rhs = (da - dl * Eigen::MatrixXd::Identity(n, n)) * ep.v;
    const Eigen::VectorXd pred = predict_delta_v(g, ep, e.i, e.j, Toggle::add, dl);
    CHECK((pred - pinv * rhs).norm() < 1e-8);
}

TEST_CASE("true eigenvector change lives orthogonal to v") {
    const Graph g = lcc({ErdosRenyiParams{30, 0.2}, 9});
    const EigenPair ep = leading_eigenpair(g);
    const Edge e = g.edges()[5];
    const Eigen::VectorXd dv = true_delta_v(g, ep, e.i, e.j, Toggle::remove);
    CHECK(std::abs(dv.dot(ep.v)) < 1e-10);
    const auto [lam, v_after] = oracle::perron(matrix_of(toggle_edge(g, e.i, e.j, Toggle::remove)));
    const Eigen::VectorXd w = oracle::to_eigen(v_after);
    CHECK((ep.v + dv - w / w.dot(ep.v)).norm() < 1e-9);
}

TEST_CASE("eigenvector error is small for a dense random graph") {
    const Graph g = lcc({ErdosRenyiParams{50, 0.2}, 1});
    const auto s = summarize(edge_scan(g, Toggle::remove));
    CHECK(s.rows == g.edge_count());
    CHECK(s.rel_err_below_one * 100 >= s.rows * 95);
    CHECK(s.rayleigh_violations == 0);
    CHECK(s.angle_violations == 0);
}

TEST_CASE("exact eigenvalue change inside the eigenvector equation") {
    const Graph g = lcc({ErdosRenyiParams{40, 0.2}, 4});
    ScanOptions exact;
    exact.exact_delta_lambda = true;
    const auto a = edge_scan(g, Toggle::remove);
    const auto b = edge_scan(g, Toggle::remove, exact);
    double sa = 0.0;
    double sb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].delta_lambda_true == b[k].delta_lambda_true);
        sa += a[k].rel_err_dv;
        sb += b[k].rel_err_dv;
    }
    CHECK(std::isfinite(sa));
    CHECK(std::isfinite(sb));
}

TEST_CASE("angle bound on the triangle") {
    const Graph g = complete(3);
    const EigenPair ep = leading_eigenpair(g);
    const AngleBound ab = angle_bound_check(g, ep, 0, 1, Toggle::remove);
    const double cos_theta = (2.0 + std::sqrt(2.0)) / (2.0 * std::sqrt(3.0));
    CHECK_THAT(ab.sin_angle, WithinAbs(std::sqrt(1.0 - cos_theta * cos_theta), 1e-12));
    CHECK_THAT(ab.sin_angle, WithinAbs(0.1691, 1e-4));
    CHECK_THAT(ab.gap_bound, WithinAbs(1.0 / 3.0, 1e-12));
    CHECK(ab.sin_angle <= ab.gap_bound);
    CHECK_FALSE(ab.vacuous);
}

TEST_CASE("gap bound of complete graphs is 1/n") {
    for (const int n : {4, 10, 20}) {
        const Graph g = complete(n);
        const EigenPair ep = leading_eigenpair(g);
        CHECK_THAT(detail::gap_bound_of(ep), WithinAbs(1.0 / n, 1e-10));
    }
}

TEST_CASE("angle bound holds and vacuity is flagged") {
    SECTION("dense ER") {
        const auto s = summarize(edge_scan(lcc({ErdosRenyiParams{60, 0.2}, 2}), Toggle::remove));
        CHECK(s.angle_violations == 0);
        CHECK(s.vacuous == 0);
    }
    SECTION("sparse ring lattice") {
        const auto rows = edge_scan(lcc({WattsStrogatzParams{60, 4, 0.05}, 2}), Toggle::remove);
        for (const auto& r : rows) {
            CHECK(r.bound_vacuous);
            CHECK(r.gap_bound > 1.0);
            CHECK(r.angle_bound_holds);
        }
    }
}

TEST_CASE("bipartite perturbations keep a simple leading eigenvalue") {
    const Graph g(3, {{0, 1}, {1, 2}});
    const auto rows = edge_scan(g, Toggle::add);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].eigvec_status == EigvecStatus::ok);
}

TEST_CASE("ordering by eigenvector error puts missing values last") {
    std::vector<PerturbationReport> rows(3);
    rows[0].rel_err_dv = 0.5;
    rows[2].rel_err_dv = 0.1;
    sort_by_rel_err(rows);
    CHECK(rows[0].rel_err_dv == 0.1);
    CHECK(rows[1].rel_err_dv == 0.5);
    CHECK(std::isnan(rows[2].rel_err_dv));
}
