#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <numeric>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "foedi/error.hpp"

namespace foedi {

// Unordered node pair, always stored with i < j.
struct Edge {
    int i = 0;
    int j = 0;

    auto operator<=>(const Edge&) const = default;
};

enum class Toggle { add, remove };

inline const char* to_string(Toggle mode) { return mode == Toggle::add ? "add" : "remove"; }

struct DegreeStats {
    double mean = 0.0;
    double std = 0.0;  // population convention (divide by n)
    int max = 0;
    double fourth_moment = 0.0;
};

// Immutable undirected simple graph on nodes 0..n-1.
//
// The edge set is kept sorted lexicographically; per-node neighbor lists are
// sorted as well so membership tests are a binary search. A dense 0/1
// adjacency matrix is produced on demand for the spectral routines.
class Graph {
public:
    Graph() = default;

    // Builds a graph from an arbitrary pair list. Duplicates and flipped
    // duplicates collapse to one edge.
    Graph(int n, std::span<const Edge> pairs) : n_(n) {
        if (n < 0) {
            throw Error(ErrorCode::invalid_argument, "node count must be non-negative");
        }
        edges_.reserve(pairs.size());
        for (const Edge& e : pairs) {
            if (e.i < 0 || e.i >= n || e.j < 0 || e.j >= n) {
                throw Error(ErrorCode::invalid_node, "pair (" + std::to_string(e.i) + "," +
                                                         std::to_string(e.j) + ") outside 0.." +
                                                         std::to_string(n - 1));
            }
            if (e.i == e.j) {
                throw Error(ErrorCode::self_loop_rejected, "self-loop on node " + std::to_string(e.i));
            }
            edges_.push_back({std::min(e.i, e.j), std::max(e.i, e.j)});
        }
        std::sort(edges_.begin(), edges_.end());
        edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
        rebuild_index();
    }

    Graph(int n, std::initializer_list<Edge> pairs) : Graph(n, std::span<const Edge>(pairs.begin(), pairs.size())) {}

    int node_count() const { return n_; }
    std::size_t edge_count() const { return edges_.size(); }

    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<int>& degrees() const { return degrees_; }
    int degree(int node) const { return degrees_.at(static_cast<std::size_t>(node)); }
    const std::vector<int>& neighbors(int node) const { return adjacency_.at(static_cast<std::size_t>(node)); }

    bool has_edge(int i, int j) const {
        check_node(i);
        check_node(j);
        const auto& row = adjacency_[static_cast<std::size_t>(i)];
        return std::binary_search(row.begin(), row.end(), j);
    }

    void check_node(int node) const {
        if (node < 0 || node >= n_) {
            throw Error(ErrorCode::invalid_node,
                        "node " + std::to_string(node) + " outside 0.." + std::to_string(n_ - 1));
        }
    }

    Eigen::MatrixXd adjacency_matrix() const {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_, n_);
        for (const Edge& e : edges_) {
            a(e.i, e.j) = 1.0;
            a(e.j, e.i) = 1.0;
        }
        return a;
    }

    friend bool operator==(const Graph& a, const Graph& b) { return a.n_ == b.n_ && a.edges_ == b.edges_; }

private:
    void rebuild_index() {
        degrees_.assign(static_cast<std::size_t>(n_), 0);
        adjacency_.assign(static_cast<std::size_t>(n_), {});
        for (const Edge& e : edges_) {
            adjacency_[static_cast<std::size_t>(e.i)].push_back(e.j);
            adjacency_[static_cast<std::size_t>(e.j)].push_back(e.i);
        }
        for (std::size_t v = 0; v < adjacency_.size(); ++v) {
            std::sort(adjacency_[v].begin(), adjacency_[v].end());
            degrees_[v] = static_cast<int>(adjacency_[v].size());
        }
    }

    int n_ = 0;
    std::vector<Edge> edges_;
    std::vector<int> degrees_;
    std::vector<std::vector<int>> adjacency_;
};

inline Graph build_graph(int n, std::span<const Edge> pairs) { return Graph(n, pairs); }

inline Edge make_edge(int i, int j) { return {std::min(i, j), std::max(i, j)}; }

// All non-adjacent unordered pairs in lexicographic order.
inline std::vector<Edge> complement_edges(const Graph& g) {
    const int n = g.node_count();
    std::vector<Edge> out;
    const std::size_t all = static_cast<std::size_t>(n) * static_cast<std::size_t>(std::max(n - 1, 0)) / 2;
    out.reserve(all - g.edge_count());
    for (int i = 0; i < n; ++i) {
        const auto& row = g.neighbors(i);
        auto it = std::upper_bound(row.begin(), row.end(), i);
        for (int j = i + 1; j < n; ++j) {
            if (it != row.end() && *it == j) {
                ++it;
                continue;
            }
            out.push_back({i, j});
        }
    }
    return out;
}

inline Graph toggle_edge(const Graph& g, int i, int j, Toggle mode) {
    if (i == j) {
        throw Error(ErrorCode::self_loop_rejected, "cannot toggle self-loop on node " + std::to_string(i));
    }
    const bool present = g.has_edge(i, j);
    const Edge e = make_edge(i, j);
    std::vector<Edge> edges = g.edges();
    if (mode == Toggle::add) {
        if (present) {
            throw Error(ErrorCode::edge_state_conflict,
                        "edge (" + std::to_string(e.i) + "," + std::to_string(e.j) + ") already present");
        }
        edges.insert(std::lower_bound(edges.begin(), edges.end(), e), e);
    } else {
        if (!present) {
            throw Error(ErrorCode::edge_state_conflict,
                        "edge (" + std::to_string(e.i) + "," + std::to_string(e.j) + ") not present");
        }
        edges.erase(std::lower_bound(edges.begin(), edges.end(), e));
    }
    return Graph(g.node_count(), edges);
}

inline DegreeStats degree_stats(const Graph& g) {
    const int n = g.node_count();
    if (n < 1) {
        throw Error(ErrorCode::invalid_argument, "degree statistics need at least one node");
    }
    DegreeStats s;
    s.mean = 2.0 * static_cast<double>(g.edge_count()) / n;
    double var = 0.0;
    double fourth = 0.0;
    for (const int d : g.degrees()) {
        const double dd = d;
        var += (dd - s.mean) * (dd - s.mean);
        fourth += dd * dd * dd * dd;
        s.max = std::max(s.max, d);
    }
    s.std = std::sqrt(var / n);
    s.fourth_moment = fourth / n;
    return s;
}

// Component id per node; components are numbered in order of their smallest node.
inline std::vector<int> component_labels(const Graph& g) {
    const int n = g.node_count();
    std::vector<int> label(static_cast<std::size_t>(n), -1);
    int next = 0;
    std::vector<int> stack;
    for (int s = 0; s < n; ++s) {
        if (label[static_cast<std::size_t>(s)] >= 0) continue;
        label[static_cast<std::size_t>(s)] = next;
        stack.push_back(s);
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (const int w : g.neighbors(u)) {
                if (label[static_cast<std::size_t>(w)] < 0) {
                    label[static_cast<std::size_t>(w)] = next;
                    stack.push_back(w);
                }
            }
        }
        ++next;
    }
    return label;
}

inline bool is_connected(const Graph& g) {
    if (g.node_count() <= 1) return true;
    const auto label = component_labels(g);
    return std::all_of(label.begin(), label.end(), [](int c) { return c == 0; });
}

// True when deleting the existing edge (i,j) would split its component.
inline bool is_bridge(const Graph& g, int i, int j) {
    std::vector<char> seen(static_cast<std::size_t>(g.node_count()), 0);
    std::vector<int> stack{i};
    seen[static_cast<std::size_t>(i)] = 1;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (const int w : g.neighbors(u)) {
            if ((u == i && w == j) || (u == j && w == i)) continue;
            if (w == j) return false;
            if (!seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = 1;
                stack.push_back(w);
            }
        }
    }
    return true;
}

}  // namespace foedi
