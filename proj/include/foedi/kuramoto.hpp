#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "foedi/error.hpp"
#include "foedi/graph.hpp"
#include "foedi/importance.hpp"
#include "foedi/perturbation.hpp"
#include "foedi/rng.hpp"
#include "foedi/spectral.hpp"

namespace foedi {

// Natural-frequency density g, symmetric about a local maximum at 0.
// Only g(0) and g''(0) enter the closed forms; the sampler feeds the
// simulator.
class FrequencyModel {
public:
    using Sampler = std::function<double(Rng&)>;

    FrequencyModel(double g0, double g2, Sampler sampler) : g0_(g0), g2_(g2), sampler_(std::move(sampler)) {
        if (!(g0 > 0.0)) throw Error(ErrorCode::invalid_frequency_model, "g(0) must be positive");
        if (!(g2 < 0.0)) throw Error(ErrorCode::invalid_frequency_model, "g''(0) must be negative (maximum at 0)");
        if (!sampler_) throw Error(ErrorCode::invalid_frequency_model, "missing sampler");
    }

    double g0() const { return g0_; }
    double g2() const { return g2_; }
    double alpha() const { return -g2_ / (8.0 * g0_); }

    double sample(Rng& rng) const { return sampler_(rng); }

    std::vector<double> sample(std::size_t count, Rng& rng) const {
        std::vector<double> out(count);
        for (auto& w : out) w = sampler_(rng);
        return out;
    }

private:
    double g0_;
    double g2_;
    Sampler sampler_;
};

// CDF of g(w) = (3/4)(1 - w^2) on (-1, 1).
inline double parabolic_cdf(double w) {
    if (w <= -1.0) return 0.0;
    if (w >= 1.0) return 1.0;
    return 0.5 + 0.75 * (w - w * w * w / 3.0);
}

// Inverse CDF by bisection to 1e-12.
inline double parabolic_inverse_cdf(double u) {
    double lo = -1.0;
    double hi = 1.0;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (parabolic_cdf(mid) < u) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// g(w) = (3/4)(1 - w^2): g(0) = 3/4, g''(0) = -3/2, alpha = 1/4.
inline FrequencyModel parabolic_frequency_model() {
    return FrequencyModel(0.75, -1.5, [](Rng& rng) { return parabolic_inverse_cdf(rng.uniform()); });
}

struct OrderParameter {
    double r_squared = 0.0;
    double r = 0.0;                // sqrt(r_squared) clamped to [0, 1]
    bool below_onset = false;      // k < k_c, reported as 0
    bool clamped = false;          // r_squared exceeded 1
    bool beyond_validity = false;  // k / k_c > 1.3
};

namespace detail {

// beta (x - 1) x^-3 with x = k / k_c.
inline OrderParameter order_parameter(double beta, double k, double k_c) {
    if (!(k > 0.0)) throw Error(ErrorCode::invalid_coupling, "coupling must be positive");
    OrderParameter out;
    const double x = k / k_c;
    out.beyond_validity = x > 1.3 + 1e-12;
    if (x < 1.0) {
        out.below_onset = true;
        return out;
    }
    out.r_squared = beta * (x - 1.0) / (x * x * x);
    out.clamped = out.r_squared > 1.0;
    out.r = std::sqrt(std::clamp(out.r_squared, 0.0, 1.0));
    return out;
}

}  // namespace detail

inline double critical_coupling(double lambda, const FrequencyModel& fm) {
    if (!(lambda > 0.0)) throw Error(ErrorCode::invalid_argument, "critical coupling needs lambda > 0");
    return 2.0 / (std::numbers::pi * lambda * fm.g0());
}

inline double critical_coupling(const EigenPair& ep, const FrequencyModel& fm) { return critical_coupling(ep.lambda, fm); }

// <v>^2 lambda^2 / (N <d>^2 <v^4>) with the moments of the unit vector
// v / |v|, so any positive rescaling of v gives the same value.
inline double eta_from(const Eigen::VectorXd& v, double lambda, double mean_degree) {
    const double n = static_cast<double>(v.size());
    const Eigen::VectorXd u = v / v.norm();
    const double mean_v = u.sum() / n;
    const double mean_v4 = u.array().pow(4.0).sum() / n;
    return mean_v * mean_v * lambda * lambda / (n * mean_degree * mean_degree * mean_v4);
}

inline double eta(const Graph& g, const EigenPair& ep) {
    if (ep.v.size() != g.node_count()) throw Error(ErrorCode::shape_error, "eigenpair does not match graph size");
    return eta_from(ep.v, ep.lambda, degree_stats(g).mean);
}

struct KuramotoPrediction {
    double k_c = 0.0;
    double eta = 0.0;
    double alpha = 0.0;
    double beta = 0.0;   // pi^2 g(0)^2 eta / (4 alpha)
    double gamma = 0.0;  // pi g(0) / 2
    double lambda = 0.0;
    double mean_degree = 0.0;
    double homogeneity = 0.0;  // lambda / <d>
    int min_degree = 0;        // d_i >> 1 diagnostic

    OrderParameter r_squared_at(double k) const { return detail::order_parameter(beta, k, k_c); }
};

inline double beta_from(double eta_value, const FrequencyModel& fm) {
    const double pi = std::numbers::pi;
    return pi * pi * fm.g0() * fm.g0() * eta_value / (4.0 * fm.alpha());
}

inline KuramotoPrediction predict(const Graph& g, const EigenPair& ep, const FrequencyModel& fm) {
    KuramotoPrediction p;
    const DegreeStats ds = degree_stats(g);
    p.k_c = critical_coupling(ep, fm);
    p.eta = eta(g, ep);
    p.alpha = fm.alpha();
    p.beta = beta_from(p.eta, fm);
    p.gamma = std::numbers::pi * fm.g0() / 2.0;
    p.lambda = ep.lambda;
    p.mean_degree = ds.mean;
    p.homogeneity = ep.lambda / ds.mean;
    p.min_degree = *std::min_element(g.degrees().begin(), g.degrees().end());
    return p;
}

inline OrderParameter order_parameter_sq(const KuramotoPrediction& pred, double k) { return pred.r_squared_at(k); }

enum class PredictionMethod { exact, first_order };

// Order-parameter prediction after adding one edge.
//  exact:       lambda' and the perturbed Perron vector are recomputed,
//               <d> grows by 2/N, and beta is rebuilt from the new eta.
//  first_order: lambda' = lambda + iota_dag with beta and gamma frozen,
//               giving beta (k gamma (lambda + iota_dag) - 1) (k gamma (lambda + iota_dag))^-3.
//               eta_hat is still reported from v + dv when a spectrum is supplied.
struct PerturbedPrediction {
    PredictionMethod method = PredictionMethod::exact;
    Edge edge;
    KuramotoPrediction base;
    double delta_lambda = 0.0;
    double k_c_hat = 0.0;
    double eta_hat = 0.0;
    double mean_degree_hat = 0.0;
    double beta_hat = 0.0;

    OrderParameter r_squared_at(double k) const { return detail::order_parameter(beta_hat, k, k_c_hat); }
};

namespace detail {

inline PerturbedPrediction perturbed_prediction_impl(const Graph& g, const EigenPair& ep, const FrequencyModel& fm, int i,
                                                     int j, PredictionMethod method,
                                                     const SpectralDecomposition* spectrum) {
    check_toggle(g, i, j, Toggle::add);
    PerturbedPrediction p;
    p.method = method;
    p.edge = make_edge(i, j);
    p.base = predict(g, ep, fm);
    p.mean_degree_hat = p.base.mean_degree + 2.0 / g.node_count();
    if (method == PredictionMethod::exact) {
        Eigen::MatrixXd a = g.adjacency_matrix();
        apply_toggle(a, i, j, Toggle::add);
        const SpectralDecomposition after(a);
        p.delta_lambda = after.leading().lambda - ep.lambda;
        p.eta_hat = eta_from(after.leading().v, after.leading().lambda, p.mean_degree_hat);
        p.beta_hat = beta_from(p.eta_hat, fm);
    } else {
        p.delta_lambda = foedi(ep, i, j).iota_dag;
        if (spectrum != nullptr) {
            const Eigen::VectorXd v_est = ep.v + predict_delta_v(g, *spectrum, ep, i, j, Toggle::add);
            p.eta_hat = eta_from(v_est, ep.lambda + p.delta_lambda, p.mean_degree_hat);
        } else {
            p.eta_hat = p.base.eta;
        }
        p.beta_hat = p.base.beta;
    }
    p.k_c_hat = critical_coupling(ep.lambda + p.delta_lambda, fm);
    return p;
}

}  // namespace detail

inline PerturbedPrediction perturbed_prediction(const Graph& g, const EigenPair& ep, const FrequencyModel& fm, int i,
                                                int j, PredictionMethod method) {
    return detail::perturbed_prediction_impl(g, ep, fm, i, j, method, nullptr);
}

inline PerturbedPrediction perturbed_prediction(const Graph& g, const SpectralDecomposition& spectrum,
                                                const FrequencyModel& fm, int i, int j, PredictionMethod method) {
    return detail::perturbed_prediction_impl(g, spectrum.leading(), fm, i, j, method, &spectrum);
}

struct DeltaRRow {
    std::size_t edge_index = 0;  // rank within its k multiple after sorting
    int i = 0;
    int j = 0;
    double iota_dag = 0.0;
    double k_multiple = 0.0;
    double delta_r = 0.0;
    double ln_delta_r = 0.0;
};

struct RankingOptions {
    std::vector<double> k_multiples{1.0, 1.1, 1.2, 1.3};
    double band_lo = 0.95;
    double band_hi = 1.05;
    std::optional<std::vector<Edge>> pairs;  // default: every non-edge
};

struct DeltaRTable {
    KuramotoPrediction base;
    bool homogeneous = true;  // lambda / <d> inside the band; otherwise the closed form is unreliable
    std::vector<DeltaRRow> rows;
};

// First-order order-parameter gain r_check - r for each candidate addition at
// each k = multiple * k_c. Rows are grouped by multiple (input order) and
// sorted by increasing gain inside each group.
inline DeltaRTable delta_r_ranking(const Graph& g, const EigenPair& ep, const FrequencyModel& fm,
                                   const RankingOptions& options = {}) {
    DeltaRTable table;
    table.base = predict(g, ep, fm);
    table.homogeneous = table.base.homogeneity >= options.band_lo && table.base.homogeneity <= options.band_hi;
    std::vector<Edge> pairs = options.pairs ? *options.pairs : complement_edges(g);
    for (auto& e : pairs) {
        detail::check_toggle(g, e.i, e.j, Toggle::add);
        e = make_edge(e.i, e.j);
    }
    std::sort(pairs.begin(), pairs.end());
    const std::vector<EdgeScore> scores = score_pairs(ep, pairs);

    const KuramotoPrediction& b = table.base;
    table.rows.reserve(pairs.size() * options.k_multiples.size());
    for (const double multiple : options.k_multiples) {
        const double k = multiple * b.k_c;
        const double r = b.r_squared_at(k).r;
        std::vector<DeltaRRow> group;
        group.reserve(scores.size());
        for (const auto& s : scores) {
            const double k_c_hat = critical_coupling(b.lambda + s.iota_dag, fm);
            const double r_check = detail::order_parameter(b.beta, k, k_c_hat).r;
            DeltaRRow row;
            row.i = s.i;
            row.j = s.j;
            row.iota_dag = s.iota_dag;
            row.k_multiple = multiple;
            row.delta_r = r_check - r;
            row.ln_delta_r = row.delta_r > 0.0 ? std::log(row.delta_r) : std::numeric_limits<double>::quiet_NaN();
            group.push_back(row);
        }
        std::stable_sort(group.begin(), group.end(),
                         [](const DeltaRRow& x, const DeltaRRow& y) { return x.delta_r < y.delta_r; });
        for (std::size_t idx = 0; idx < group.size(); ++idx) group[idx].edge_index = idx;
        table.rows.insert(table.rows.end(), group.begin(), group.end());
    }
    return table;
}

struct SimOptions {
    double dt = 0.01;
    double horizon = 400.0 * std::numbers::pi;  // 200 periods of a unit-frequency oscillator
    std::uint64_t seed = 0;
    double steady_fraction = 0.25;  // averaging window at the end of the run
    std::size_t max_samples = 2000;
};

struct SimResult {
    double k = 0.0;
    std::vector<double> times;
    std::vector<double> r_time_series;
    double r_steady = 0.0;
    std::vector<double> phases;  // final, wrapped to [-pi, pi)
};

namespace detail {

// |mean of exp(i theta)|
inline double global_order(const Eigen::VectorXd& theta) {
    const double n = static_cast<double>(theta.size());
    const double c = theta.array().cos().sum() / n;
    const double s = theta.array().sin().sum() / n;
    return std::hypot(c, s);
}

}  // namespace detail

// Fixed-step RK4 integration of
//   dtheta_i/dt = omega_i + k sum_j A_ij sin(theta_j - theta_i)
// from uniform random initial phases (stream "kuramoto-phases"). The
// coupling sum is evaluated as cos(theta_i) S_i - sin(theta_i) C_i with
// S_i, C_i the neighbor sums of sin and cos, so each stage costs O(N + m).
inline SimResult simulate(const Graph& g, std::span<const double> omega, double k, const SimOptions& options = {}) {
    const int n = g.node_count();
    if (static_cast<int>(omega.size()) != n) {
        throw Error(ErrorCode::shape_error, "need one natural frequency per node");
    }
    if (!(options.dt > 0.0) || !(options.horizon > 0.0)) {
        throw Error(ErrorCode::invalid_argument, "dt and horizon must be positive");
    }
    if (!(k >= 0.0) || !std::isfinite(k)) throw Error(ErrorCode::invalid_coupling, "coupling must be finite and >= 0");

    std::vector<int> offset(static_cast<std::size_t>(n) + 1, 0);
    std::vector<int> nbr;
    nbr.reserve(2 * g.edge_count());
    for (int v = 0; v < n; ++v) {
        const auto& row = g.neighbors(v);
        nbr.insert(nbr.end(), row.begin(), row.end());
        offset[static_cast<std::size_t>(v) + 1] = static_cast<int>(nbr.size());
    }
    const Eigen::Map<const Eigen::VectorXd> w(omega.data(), n);
    Eigen::VectorXd sn(n);
    Eigen::VectorXd cs(n);
    auto rhs = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& out) {
        for (int v = 0; v < n; ++v) {
            sn(v) = std::sin(theta(v));
            cs(v) = std::cos(theta(v));
        }
        for (int v = 0; v < n; ++v) {
            double ssum = 0.0;
            double csum = 0.0;
            for (int p = offset[static_cast<std::size_t>(v)]; p < offset[static_cast<std::size_t>(v) + 1]; ++p) {
                const int u = nbr[static_cast<std::size_t>(p)];
                ssum += sn(u);
                csum += cs(u);
            }
            out(v) = w(v) + k * (cs(v) * ssum - sn(v) * csum);
        }
    };

    Rng rng(options.seed, "kuramoto-phases");
    Eigen::VectorXd theta(n);
    for (int v = 0; v < n; ++v) theta(v) = rng.uniform(0.0, 2.0 * std::numbers::pi);

    const auto steps = static_cast<std::size_t>(std::ceil(options.horizon / options.dt - 1e-9));
    const std::size_t stride = std::max<std::size_t>(1, steps / std::max<std::size_t>(1, options.max_samples));
    const double window_start = (1.0 - options.steady_fraction) * options.horizon;

    SimResult res;
    res.k = k;
    res.times.push_back(0.0);
    res.r_time_series.push_back(detail::global_order(theta));
    double r_sum = 0.0;
    std::size_t r_count = 0;

    Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), tmp(n);
    const double h = options.dt;
    for (std::size_t step = 1; step <= steps; ++step) {
        rhs(theta, k1);
        tmp = theta + 0.5 * h * k1;
        rhs(tmp, k2);
        tmp = theta + 0.5 * h * k2;
        rhs(tmp, k3);
        tmp = theta + h * k3;
        rhs(tmp, k4);
        theta += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!theta.allFinite()) {
            throw Error(ErrorCode::numerical_blowup, "non-finite phase at step " + std::to_string(step));
        }
        const double t = static_cast<double>(step) * h;
        const bool in_window = t >= window_start;
        const bool record = step % stride == 0 || step == steps;
        if (in_window || record) {
            const double r = detail::global_order(theta);
            if (in_window) {
                r_sum += r;
                ++r_count;
            }
            if (record) {
                res.times.push_back(t);
                res.r_time_series.push_back(r);
            }
        }
    }
    res.r_steady = r_count > 0 ? r_sum / static_cast<double>(r_count) : res.r_time_series.back();
    res.phases.resize(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
        res.phases[static_cast<std::size_t>(v)] =
            std::remainder(theta(v), 2.0 * std::numbers::pi);
        if (res.phases[static_cast<std::size_t>(v)] >= std::numbers::pi) res.phases[static_cast<std::size_t>(v)] -= 2.0 * std::numbers::pi;
    }
    return res;
}

// Natural frequencies drawn from fm on stream "kuramoto-frequencies".
inline std::vector<double> sample_frequencies(const FrequencyModel& fm, int n, std::uint64_t seed) {
    Rng rng(seed, "kuramoto-frequencies");
    return fm.sample(static_cast<std::size_t>(n), rng);
}

inline SimResult simulate(const Graph& g, const FrequencyModel& fm, double k, const SimOptions& options = {}) {
    const std::vector<double> omega = sample_frequencies(fm, g.node_count(), options.seed);
    return simulate(g, omega, k, options);
}

}  // namespace foedi
