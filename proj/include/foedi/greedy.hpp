#pragma once

#include <optional>
#include <string>
#include <vector>

#include "foedi/error.hpp"
#include "foedi/graph.hpp"
#include "foedi/importance.hpp"
#include "foedi/spectral.hpp"

namespace foedi {

struct GreedyTrace {
    int step = 0;  // 1-based
    Edge chosen;
    double iota_dag = 0.0;  // score of the chosen pair before the toggle
    double lambda = 0.0;    // after the toggle
    double sigma_d = 0.0;   // after the toggle
};

enum class StopReason { completed, would_disconnect };

inline const char* to_string(StopReason r) { return r == StopReason::completed ? "Completed" : "WouldDisconnect"; }

struct GreedyResult {
    Graph graph;
    std::vector<GreedyTrace> trace;
    StopReason reason = StopReason::completed;
    double initial_lambda = 0.0;
};

// Repeatedly adds the non-edge with the largest FoEDI, recomputing the
// eigenpair from scratch after every addition. steps = nullopt runs until the
// graph is complete.
inline GreedyResult greedy_add(const Graph& g, std::optional<std::size_t> steps = std::nullopt) {
    const int n = g.node_count();
    const std::size_t available =
        static_cast<std::size_t>(n) * static_cast<std::size_t>(std::max(n - 1, 0)) / 2 - g.edge_count();
    const std::size_t total = steps.value_or(available);
    if (total > available) {
        throw Error(ErrorCode::invalid_argument, "requested " + std::to_string(total) + " additions but only " +
                                                     std::to_string(available) + " non-edges exist");
    }
    GreedyResult out;
    out.graph = g;
    EigenPair ep = leading_eigenpair(g);
    out.initial_lambda = ep.lambda;
    out.trace.reserve(total);
    for (std::size_t step = 1; step <= total; ++step) {
        const auto scores = score_all(out.graph, ep, PairSet::non_edges);
        const EdgeScore best = scores[*argmax_score(scores)];
        out.graph = toggle_edge(out.graph, best.i, best.j, Toggle::add);
        ep = leading_eigenpair(out.graph);
        out.trace.push_back({static_cast<int>(step), {best.i, best.j}, best.iota_dag, ep.lambda,
                             degree_stats(out.graph).std});
    }
    return out;
}

// Removal counterpart: drops the edge with the largest FoEDI each step. Stops
// early, with reason would_disconnect, when that edge is a bridge.
inline GreedyResult greedy_remove(const Graph& g, std::size_t steps) {
    if (steps >= g.edge_count()) {
        throw Error(ErrorCode::invalid_argument, "greedy removal needs steps < edge count (" +
                                                     std::to_string(g.edge_count()) + ")");
    }
    GreedyResult out;
    out.graph = g;
    EigenPair ep = leading_eigenpair(g);
    out.initial_lambda = ep.lambda;
    for (std::size_t step = 1; step <= steps; ++step) {
        const auto scores = score_all(out.graph, ep, PairSet::edges);
        const EdgeScore best = scores[*argmax_score(scores)];
        if (is_bridge(out.graph, best.i, best.j)) {
            out.reason = StopReason::would_disconnect;
            break;
        }
        out.graph = toggle_edge(out.graph, best.i, best.j, Toggle::remove);
        ep = leading_eigenpair(out.graph);
        out.trace.push_back({static_cast<int>(step), {best.i, best.j}, best.iota_dag, ep.lambda,
                             degree_stats(out.graph).std});
    }
    return out;
}

}  // namespace foedi
