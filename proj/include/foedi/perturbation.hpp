#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "foedi/error.hpp"
#include "foedi/graph.hpp"
#include "foedi/importance.hpp"
#include "foedi/parallel.hpp"
#include "foedi/spectral.hpp"

namespace foedi {

struct DeltaLambda {
    double value = 0.0;         // lambda(G') - lambda(G)
    double lambda_after = 0.0;  // top eigenvalue of the full perturbed matrix
    bool disconnected = false;  // removal split the graph
};

struct AngleBound {
    double sin_angle = 0.0;  // sin of the angle between unit v and unit perturbed v
    double gap_bound = 0.0;  // 1 / (lambda - lambda2), unperturbed gap
    bool vacuous = false;    // gap_bound > 1 carries no information
};

enum class EigvecStatus { ok, degenerate, alignment_failure, skipped };

inline const char* to_string(EigvecStatus s) {
    switch (s) {
        case EigvecStatus::ok: return "ok";
        case EigvecStatus::degenerate: return "degenerate";
        case EigvecStatus::alignment_failure: return "alignment_failure";
        case EigvecStatus::skipped: return "skipped";
    }
    return "unknown";
}

// Predicted versus exact effect of toggling one pair.
struct PerturbationReport {
    int i = 0;
    int j = 0;
    Toggle mode = Toggle::remove;
    double iota = 0.0;
    double iota_dag = 0.0;
    double delta_lambda_true = 0.0;
    double delta_lambda_rel_true = 0.0;  // divided by the unperturbed lambda
    bool disconnected = false;
    bool rayleigh_bound_holds = true;
    double rel_err_dv = std::numeric_limits<double>::quiet_NaN();
    double sin_angle = std::numeric_limits<double>::quiet_NaN();
    double gap_bound = std::numeric_limits<double>::quiet_NaN();
    bool bound_vacuous = false;
    bool angle_bound_holds = true;
    EigvecStatus eigvec_status = EigvecStatus::skipped;
    Eigen::VectorXd dv_pred;  // filled only when ScanOptions::keep_vectors
    Eigen::VectorXd dv_true;
};

namespace detail {

inline void check_toggle(const Graph& g, int i, int j, Toggle mode) {
    if (i == j) throw Error(ErrorCode::self_loop_rejected, "cannot toggle self-loop on node " + std::to_string(i));
    const bool present = g.has_edge(i, j);
    if (mode == Toggle::add && present) {
        throw Error(ErrorCode::edge_state_conflict,
                    "(" + std::to_string(i) + "," + std::to_string(j) + ") is already an edge");
    }
    if (mode == Toggle::remove && !present) {
        throw Error(ErrorCode::edge_state_conflict, "(" + std::to_string(i) + "," + std::to_string(j) + ") is not an edge");
    }
}

inline double toggle_sign(Toggle mode) { return mode == Toggle::add ? 1.0 : -1.0; }

inline void apply_toggle(Eigen::MatrixXd& a, int i, int j, Toggle mode) {
    const double value = mode == Toggle::add ? 1.0 : 0.0;
    a(i, j) = value;
    a(j, i) = value;
}

inline Eigen::VectorXd unit(const Eigen::VectorXd& v) { return v / v.norm(); }

struct PerturbedVector {
    double lambda_after = 0.0;
    Eigen::VectorXd v_after;  // unit, sign-fixed
    EigvecStatus status = EigvecStatus::ok;
    double alignment = 0.0;  // v^T v_after
};

inline PerturbedVector perturbed_vector(const Eigen::MatrixXd& toggled, const Eigen::VectorXd& v) {
    const SpectralDecomposition after(toggled);
    PerturbedVector out;
    out.lambda_after = after.leading().lambda;
    out.v_after = after.leading().v;
    out.alignment = v.dot(out.v_after);
    if (!(after.perron_gap() > 1e-10)) {
        out.status = EigvecStatus::degenerate;
    } else if (out.alignment <= 1e-6) {
        out.status = EigvecStatus::alignment_failure;
    }
    return out;
}

inline double sin_between_unit(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const double c = std::clamp(a.dot(b), -1.0, 1.0);
    return std::sqrt(std::max(0.0, 1.0 - c * c));
}

inline Eigen::VectorXd rhs_for_toggle(const EigenPair& ep, int i, int j, Toggle mode, double delta_lambda) {
    const double s = toggle_sign(mode);
    Eigen::VectorXd rhs = -delta_lambda * ep.v;
    rhs(i) += s * ep.v(j);
    rhs(j) += s * ep.v(i);
    return rhs;
}

inline double gap_bound_of(const EigenPair& ep) {
    const double gap = ep.lambda - ep.lambda2;
    return gap > 0.0 ? 1.0 / gap : std::numeric_limits<double>::infinity();
}

}  // namespace detail

inline DeltaLambda true_delta_lambda(const Graph& g, const EigenPair& ep, int i, int j, Toggle mode) {
    detail::check_toggle(g, i, j, mode);
    Eigen::MatrixXd a = g.adjacency_matrix();
    detail::apply_toggle(a, i, j, mode);
    DeltaLambda out;
    out.lambda_after = largest_eigenvalue(a);
    out.value = out.lambda_after - ep.lambda;
    out.disconnected = mode == Toggle::remove && is_bridge(g, i, j);
    return out;
}

inline DeltaLambda true_delta_lambda(const Graph& g, int i, int j, Toggle mode) {
    return true_delta_lambda(g, leading_eigenpair(g, EigenMethod::dense), i, j, mode);
}

// First-order eigenvector change: the minimum-norm solution of
//   (lambda I - A) dv = (dA - dlambda I) v,
// with dA = +-1 at (i,j),(j,i) and dlambda = +-iota_dag unless the caller
// supplies another eigenvalue change (e.g. the exact one). The result is
// orthogonal to v.
inline Eigen::VectorXd predict_delta_v(const Graph& g, const SpectralDecomposition& spectrum, const EigenPair& ep,
                                       int i, int j, Toggle mode, std::optional<double> delta_lambda = std::nullopt) {
    detail::check_toggle(g, i, j, mode);
    if (spectrum.size() != g.node_count() || ep.v.size() != g.node_count()) {
        throw Error(ErrorCode::shape_error, "spectrum, eigenpair and graph sizes disagree");
    }
    const double dl = delta_lambda.value_or(detail::toggle_sign(mode) * foedi(ep, i, j).iota_dag);
    return minnorm_solve(spectrum, ep.lambda, detail::rhs_for_toggle(ep, i, j, mode, dl));
}

inline Eigen::VectorXd predict_delta_v(const Graph& g, const EigenPair& ep, int i, int j, Toggle mode,
                                       std::optional<double> delta_lambda = std::nullopt) {
    return predict_delta_v(g, SpectralDecomposition(g), ep, i, j, mode, delta_lambda);
}

// Exact eigenvector change in the gauge v^T (v + dv) = 1: the unit perturbed
// Perron vector is rescaled by 1 / (v^T v_after) before subtracting v, which
// puts the change in the hyperplane orthogonal to v, like the prediction.
inline Eigen::VectorXd true_delta_v(const Graph& g, const EigenPair& ep, int i, int j, Toggle mode) {
    detail::check_toggle(g, i, j, mode);
    Eigen::MatrixXd a = g.adjacency_matrix();
    detail::apply_toggle(a, i, j, mode);
    const auto after = detail::perturbed_vector(a, ep.v);
    if (after.status == EigvecStatus::degenerate) {
        throw Error(ErrorCode::degenerate_spectrum, "perturbed leading eigenvalue is not simple");
    }
    if (after.status == EigvecStatus::alignment_failure) {
        throw Error(ErrorCode::alignment_failure, "perturbed leading vector is (nearly) orthogonal to v");
    }
    return after.v_after / after.alignment - ep.v;
}

inline AngleBound angle_bound_check(const Graph& g, const EigenPair& ep, int i, int j, Toggle mode) {
    detail::check_toggle(g, i, j, mode);
    Eigen::MatrixXd a = g.adjacency_matrix();
    detail::apply_toggle(a, i, j, mode);
    const SpectralDecomposition after(a);
    AngleBound out;
    out.sin_angle = detail::sin_between_unit(detail::unit(ep.v), after.leading().v);
    out.gap_bound = detail::gap_bound_of(ep);
    out.vacuous = out.gap_bound > 1.0;
    return out;
}

struct ScanOptions {
    bool eigenvectors = true;         // compute dv / angle columns (full eigensolve per pair)
    bool exact_delta_lambda = false;  // use the exact eigenvalue change inside the dv equation
    bool keep_vectors = false;        // store dv_pred / dv_true in each row
    std::optional<std::vector<Edge>> pairs;  // default: every edge (remove) or non-edge (add)
    unsigned threads = 0;                    // 0: worker_count()
};

// One report per toggled pair, sorted by iota ascending (ties keep
// lexicographic order). Per-pair eigenvector degeneracies are recorded in the
// row instead of aborting the scan.
inline std::vector<PerturbationReport> edge_scan(const Graph& g, Toggle mode, const ScanOptions& options = {}) {
    const SpectralDecomposition spectrum = decompose(g);
    const EigenPair& ep = spectrum.leading();
    const Eigen::MatrixXd a = g.adjacency_matrix();
    std::vector<Edge> pairs;
    if (options.pairs) {
        pairs = *options.pairs;
        for (auto& e : pairs) {
            detail::check_toggle(g, e.i, e.j, mode);
            e = make_edge(e.i, e.j);
        }
        std::sort(pairs.begin(), pairs.end());
    } else {
        pairs = mode == Toggle::remove ? g.edges() : complement_edges(g);
    }
    const double gap_bound = detail::gap_bound_of(ep);
    const double s = detail::toggle_sign(mode);

    std::vector<PerturbationReport> rows(pairs.size());
    parallel_for(
        pairs.size(),
        [&](std::size_t k) {
            const Edge e = pairs[k];
            PerturbationReport& r = rows[k];
            const EdgeScore score = foedi(ep, e.i, e.j);
            r.i = e.i;
            r.j = e.j;
            r.mode = mode;
            r.iota = score.iota;
            r.iota_dag = score.iota_dag;
            r.disconnected = mode == Toggle::remove && is_bridge(g, e.i, e.j);

            Eigen::MatrixXd toggled = a;
            detail::apply_toggle(toggled, e.i, e.j, mode);
            if (!options.eigenvectors) {
                r.delta_lambda_true = largest_eigenvalue(toggled) - ep.lambda;
            } else {
                const auto after = detail::perturbed_vector(toggled, ep.v);
                r.delta_lambda_true = after.lambda_after - ep.lambda;
                r.sin_angle = detail::sin_between_unit(ep.v, after.v_after);
                r.gap_bound = gap_bound;
                r.bound_vacuous = gap_bound > 1.0;
                r.angle_bound_holds = r.sin_angle <= std::min(1.0, gap_bound) + 1e-9;
                r.eigvec_status = after.status;
                if (after.status == EigvecStatus::ok) {
                    const double dl = options.exact_delta_lambda ? r.delta_lambda_true : s * score.iota_dag;
                    const Eigen::VectorXd dv_pred =
                        minnorm_solve(spectrum, ep.lambda, detail::rhs_for_toggle(ep, e.i, e.j, mode, dl));
                    const Eigen::VectorXd dv_true = after.v_after / after.alignment - ep.v;
                    const double denom = dv_true.norm();
                    r.rel_err_dv = denom > 0.0 ? (dv_pred - dv_true).norm() / denom
                                               : std::numeric_limits<double>::quiet_NaN();
                    if (options.keep_vectors) {
                        r.dv_pred = dv_pred;
                        r.dv_true = dv_true;
                    }
                }
            }
            r.delta_lambda_rel_true = r.delta_lambda_true / ep.lambda;
            r.rayleigh_bound_holds = mode == Toggle::add ? r.delta_lambda_true >= score.iota_dag - 1e-9
                                                         : std::abs(r.delta_lambda_true) <= score.iota_dag + 1e-9;
        },
        options.threads);

    std::stable_sort(rows.begin(), rows.end(),
                     [](const PerturbationReport& x, const PerturbationReport& y) { return x.iota < y.iota; });
    return rows;
}

// Ascending relative eigenvector error; rows without a value go last.
inline void sort_by_rel_err(std::vector<PerturbationReport>& rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const PerturbationReport& x, const PerturbationReport& y) {
        const bool xn = std::isnan(x.rel_err_dv);
        const bool yn = std::isnan(y.rel_err_dv);
        if (xn != yn) return yn;
        return !xn && x.rel_err_dv < y.rel_err_dv;
    });
}

// ||x - y||_2 / ||x||_2 with x the FoEDI curve and y the measured |delta lambda| / lambda.
inline double foedi_relative_error(const std::vector<PerturbationReport>& rows) {
    double diff = 0.0;
    double base = 0.0;
    for (const auto& r : rows) {
        const double y = std::abs(r.delta_lambda_rel_true);
        diff += (r.iota - y) * (r.iota - y);
        base += r.iota * r.iota;
    }
    return base > 0.0 ? std::sqrt(diff / base) : 0.0;
}

struct ScanSummary {
    std::size_t rows = 0;
    std::size_t rayleigh_violations = 0;
    std::size_t angle_violations = 0;
    std::size_t vacuous = 0;
    std::size_t disconnected = 0;
    std::size_t eigvec_failures = 0;
    std::size_t rel_err_below_one = 0;
    double foedi_relative_error = 0.0;
};

inline ScanSummary summarize(const std::vector<PerturbationReport>& rows) {
    ScanSummary s;
    s.rows = rows.size();
    for (const auto& r : rows) {
        s.rayleigh_violations += !r.rayleigh_bound_holds;
        s.angle_violations += !r.angle_bound_holds;
        s.vacuous += r.bound_vacuous;
        s.disconnected += r.disconnected;
        s.eigvec_failures += r.eigvec_status == EigvecStatus::degenerate ||
                             r.eigvec_status == EigvecStatus::alignment_failure;
        s.rel_err_below_one += r.rel_err_dv < 1.0;
    }
    s.foedi_relative_error = foedi_relative_error(rows);
    return s;
}

}  // namespace foedi
