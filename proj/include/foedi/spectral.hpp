#pragma once

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "foedi/error.hpp"
#include "foedi/graph.hpp"
#include "foedi/rng.hpp"

namespace foedi {

// Perron pair of an adjacency matrix plus the second-largest-magnitude
// eigenvalue. v has unit 2-norm and nonnegative entries. For symmetric A the
// left eigenvector coincides with v, so it is not stored separately.
struct EigenPair {
    double lambda = 0.0;
    Eigen::VectorXd v;
    double lambda2 = 0.0;
    double residual = 0.0;  // ||A v - lambda v||_2
};

enum class EigenMethod {
    automatic,  // dense up to dense_limit nodes, power iteration beyond
    dense,
    power,
};

inline constexpr int dense_limit = 2000;

namespace detail {

// Flip so the entries sum positive, then clamp round-off negatives to zero.
inline void fix_sign(Eigen::VectorXd& v) {
    if (v.sum() < 0.0) v = -v;
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        if (v(k) < 0.0 && v(k) >= -1e-12) v(k) = 0.0;
    }
}

// Largest-magnitude eigenvalue among all but the last entry of an ascending
// spectrum. Magnitude ties resolve to the algebraically larger value.
inline double second_by_magnitude(const Eigen::VectorXd& ascending) {
    const Eigen::Index n = ascending.size();
    if (n < 2) return 0.0;
    double best_abs = 0.0;
    for (Eigen::Index k = 0; k + 1 < n; ++k) best_abs = std::max(best_abs, std::abs(ascending(k)));
    const double tie = 1e-10 * std::max(1.0, std::abs(ascending(n - 1)));
    double pick = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        if (std::abs(ascending(k)) >= best_abs - tie) pick = std::max(pick, ascending(k));
    }
    return pick;
}

inline Eigen::VectorXd multiply(const Graph& g, const Eigen::VectorXd& x) {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(x.size());
    for (const Edge& e : g.edges()) {
        y(e.i) += x(e.j);
        y(e.j) += x(e.i);
    }
    return y;
}

inline void check_spectral_preconditions(const Graph& g) {
    if (g.node_count() < 2 || g.edge_count() == 0) {
        throw Error(ErrorCode::degenerate_spectrum, "graph needs at least two nodes and one edge");
    }
    if (!is_connected(g)) {
        throw Error(ErrorCode::not_connected, "leading eigenpair requires a connected graph");
    }
}

// Power iteration on A + I (the shift separates lambda from -lambda on
// bipartite graphs). The second eigenvalue comes from iterating the square of
// the deflated operator A - lambda v v^T, whose top eigenvalue is lambda2^2;
// the sign is read off the Rayleigh quotient of the converged vector.
inline EigenPair power_eigenpair(const Graph& g) {
    constexpr int max_iterations = 100000;
    constexpr double tolerance = 1e-12;
    const int n = g.node_count();

    Eigen::VectorXd x(n);
    for (int k = 0; k < n; ++k) x(k) = 1.0 + g.degree(k);
    x.normalize();
    double mu = x.dot(multiply(g, x));
    for (int it = 0; it < max_iterations; ++it) {
        Eigen::VectorXd y = multiply(g, x) + x;
        y.normalize();
        const Eigen::VectorXd ay = multiply(g, y);
        const double next = y.dot(ay);
        const double change = std::abs(next - mu) / std::max(1.0, std::abs(next));
        x = y;
        mu = next;
        if (change < tolerance && (ay - mu * x).norm() <= 1e-10 * std::max(1.0, mu)) break;
    }
    EigenPair ep;
    ep.lambda = mu;
    ep.v = x;
    fix_sign(ep.v);
    ep.residual = (multiply(g, ep.v) - ep.lambda * ep.v).norm();

    auto deflated = [&](const Eigen::VectorXd& z) -> Eigen::VectorXd {
        return multiply(g, z) - ep.lambda * ep.v * ep.v.dot(z);
    };
    Rng start(0, "power-deflation");
    Eigen::VectorXd z(n);
    for (int k = 0; k < n; ++k) z(k) = start.uniform(-1.0, 1.0);
    z -= ep.v * ep.v.dot(z);
    z.normalize();
    double sq = 0.0;
    for (int it = 0; it < max_iterations; ++it) {
        Eigen::VectorXd w = deflated(deflated(z));
        w -= ep.v * ep.v.dot(w);
        sq = z.dot(w);
        const double norm = w.norm();
        if (norm == 0.0) {
            sq = 0.0;
            break;
        }
        const double residual = (w - sq * z).norm();
        z = w / norm;
        if (residual <= 1e-10 * std::max(1.0, sq)) break;
    }
    const double magnitude = std::sqrt(std::max(0.0, sq));
    const double rho = z.dot(deflated(z));
    ep.lambda2 = (rho < 0.0 && std::abs(rho) > 0.999 * magnitude) ? -magnitude : magnitude;
    return ep;
}

}  // namespace detail

// Full symmetric eigendecomposition of a graph's adjacency matrix, kept
// around for minimum-norm solves against lambda I - A.
class SpectralDecomposition {
public:
    explicit SpectralDecomposition(const Eigen::MatrixXd& adjacency) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(adjacency, Eigen::ComputeEigenvectors);
        if (solver.info() != Eigen::Success) {
            throw Error(ErrorCode::degenerate_spectrum, "symmetric eigensolver did not converge");
        }
        values_ = solver.eigenvalues();
        vectors_ = solver.eigenvectors();
        const Eigen::Index n = values_.size();
        if (n > 0) {
            leading_.lambda = values_(n - 1);
            leading_.v = vectors_.col(n - 1);
            detail::fix_sign(leading_.v);
            leading_.lambda2 = detail::second_by_magnitude(values_);
            leading_.residual = (adjacency * leading_.v - leading_.lambda * leading_.v).norm();
        }
    }

    explicit SpectralDecomposition(const Graph& g) : SpectralDecomposition(g.adjacency_matrix()) {}

    Eigen::Index size() const { return values_.size(); }
    const Eigen::VectorXd& eigenvalues() const { return values_; }  // ascending
    const Eigen::MatrixXd& eigenvectors() const { return vectors_; }
    const EigenPair& leading() const { return leading_; }

    // Gap between the top eigenvalue and the next one algebraically.
    double perron_gap() const {
        const Eigen::Index n = values_.size();
        return n < 2 ? std::numeric_limits<double>::infinity() : values_(n - 1) - values_(n - 2);
    }

private:
    Eigen::VectorXd values_;
    Eigen::MatrixXd vectors_;
    EigenPair leading_;
};

inline SpectralDecomposition decompose(const Graph& g) {
    detail::check_spectral_preconditions(g);
    return SpectralDecomposition(g);
}

inline EigenPair leading_eigenpair(const Graph& g, EigenMethod method = EigenMethod::automatic) {
    detail::check_spectral_preconditions(g);
    const bool dense = method == EigenMethod::dense ||
                       (method == EigenMethod::automatic && g.node_count() <= dense_limit);
    if (dense) return SpectralDecomposition(g).leading();
    return detail::power_eigenpair(g);
}

// Top eigenvalue of a symmetric matrix; for a nonnegative matrix this is its
// spectral radius.
inline double largest_eigenvalue(const Eigen::MatrixXd& symmetric) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::degenerate_spectrum, "symmetric eigensolver did not converge");
    }
    return solver.eigenvalues()(solver.eigenvalues().size() - 1);
}

inline double rayleigh_quotient(const Graph& g, const Eigen::VectorXd& x) {
    if (x.size() != g.node_count()) {
        throw Error(ErrorCode::shape_error, "vector length " + std::to_string(x.size()) + " != node count " +
                                                std::to_string(g.node_count()));
    }
    const double xx = x.squaredNorm();
    if (!(xx > 0.0)) {
        throw Error(ErrorCode::invalid_vector, "Rayleigh quotient of the zero vector");
    }
    double xax = 0.0;
    for (const Edge& e : g.edges()) xax += 2.0 * x(e.i) * x(e.j);
    return xax / xx;
}

// x = (lambda I - A)^+ b through the eigenbasis of A. Eigenvalues of
// lambda I - A with magnitude <= n * eps * lambda count as zero, which drops
// the Perron direction whenever lambda is simple.
inline Eigen::VectorXd minnorm_solve(const SpectralDecomposition& spectrum, double lambda, const Eigen::VectorXd& b) {
    const Eigen::Index n = spectrum.size();
    if (b.size() != n) {
        throw Error(ErrorCode::shape_error,
                    "right-hand side length " + std::to_string(b.size()) + " != " + std::to_string(n));
    }
    const double cutoff = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * std::abs(lambda);
    const Eigen::VectorXd coeff = spectrum.eigenvectors().transpose() * b;
    Eigen::VectorXd scaled = Eigen::VectorXd::Zero(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double d = lambda - spectrum.eigenvalues()(k);
        if (std::abs(d) > cutoff) scaled(k) = coeff(k) / d;
    }
    return spectrum.eigenvectors() * scaled;
}

inline Eigen::VectorXd minnorm_solve(const Graph& g, const EigenPair& ep, const Eigen::VectorXd& b) {
    if (ep.v.size() != g.node_count() || b.size() != g.node_count()) {
        throw Error(ErrorCode::shape_error, "eigenpair, right-hand side and graph sizes disagree");
    }
    return minnorm_solve(SpectralDecomposition(g), ep.lambda, b);
}

}  // namespace foedi
