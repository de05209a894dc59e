#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "foedi/error.hpp"
#include "foedi/graph.hpp"
#include "foedi/spectral.hpp"

namespace foedi {

// First-order edge dynamical importance of one node pair.
//   iota_dag = 2 v_i v_j / (v^T v)   first-order estimate of |delta lambda|
//   iota     = iota_dag / lambda     first-order estimate of |delta lambda| / lambda
// The same score applies to present edges (removal) and absent pairs
// (addition). Only the undirected case is implemented; for a directed graph
// the general form is A_ij u_i v_j / (lambda u^T v) with u the left vector.
struct EdgeScore {
    int i = 0;
    int j = 0;
    double iota = 0.0;
    double iota_dag = 0.0;
};

enum class PairSet { edges, non_edges };

// v^T v is evaluated rather than assumed to be 1, so unnormalized vectors
// give the same scores as their unit rescaling.
inline EdgeScore foedi(const EigenPair& ep, int i, int j) {
    const auto n = static_cast<int>(ep.v.size());
    if (i < 0 || j < 0 || i >= n || j >= n) {
        throw Error(ErrorCode::invalid_node, "pair (" + std::to_string(i) + "," + std::to_string(j) + ") outside 0.." +
                                                 std::to_string(n - 1));
    }
    if (i == j) {
        throw Error(ErrorCode::self_loop_rejected, "no importance for self-loop on node " + std::to_string(i));
    }
    const Edge e = make_edge(i, j);
    EdgeScore s;
    s.i = e.i;
    s.j = e.j;
    s.iota_dag = 2.0 * ep.v(e.i) * ep.v(e.j) / ep.v.squaredNorm();
    s.iota = s.iota_dag / ep.lambda;
    return s;
}

inline std::vector<EdgeScore> score_pairs(const EigenPair& ep, std::span<const Edge> pairs) {
    std::vector<EdgeScore> out;
    out.reserve(pairs.size());
    for (const Edge& e : pairs) out.push_back(foedi(ep, e.i, e.j));
    return out;
}

// Scores in lexicographic (i,j) order.
inline std::vector<EdgeScore> score_all(const Graph& g, const EigenPair& ep, PairSet which) {
    if (ep.v.size() != g.node_count()) {
        throw Error(ErrorCode::shape_error, "eigenpair does not match graph size");
    }
    if (which == PairSet::edges) return score_pairs(ep, g.edges());
    return score_pairs(ep, complement_edges(g));
}

// Sum of iota_dag over undirected edges. Each edge stands for the two
// directed terms u_i A_ij v_j + u_j A_ji v_i, so the sum is the Rayleigh
// quotient v^T A v / v^T v and equals lambda for the Perron vector.
inline double foedi_sum_check(const Graph& g, const EigenPair& ep) {
    if (ep.v.size() != g.node_count()) {
        throw Error(ErrorCode::shape_error, "eigenpair does not match graph size");
    }
    double total = 0.0;
    for (const Edge& e : g.edges()) total += foedi(ep, e.i, e.j).iota_dag;
    return total;
}

// Index of the largest iota_dag. Scores within a relative 1e-12 of the
// running best count as ties and keep the earlier (lexicographically smaller)
// pair, so round-off between symmetric pairs cannot change the pick.
inline std::optional<std::size_t> argmax_score(std::span<const EdgeScore> scores) {
    std::optional<std::size_t> best;
    for (std::size_t k = 0; k < scores.size(); ++k) {
        if (!best) {
            best = k;
            continue;
        }
        const double top = scores[*best].iota_dag;
        if (scores[k].iota_dag > top + 1e-12 * std::abs(top)) best = k;
    }
    return best;
}

// Stable sort by iota ascending (lexicographic order among equal scores).
inline void sort_by_iota(std::vector<EdgeScore>& scores) {
    std::stable_sort(scores.begin(), scores.end(),
                     [](const EdgeScore& a, const EdgeScore& b) { return a.iota < b.iota; });
}

}  // namespace foedi
