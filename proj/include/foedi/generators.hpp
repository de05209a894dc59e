#pragma once

#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "json.hpp"

#include "foedi/error.hpp"
#include "foedi/graph.hpp"
#include "foedi/rng.hpp"

namespace foedi {

struct ErdosRenyiParams {
    int n = 200;
    double p = 0.15;
};

// Nonlinear preferential attachment grown from one isolated node. Each new
// node links to m_attach distinct existing nodes drawn without replacement
// with weight (degree + epsilon)^power.
struct BarabasiAlbertParams {
    int n = 200;
    int m_attach = 5;
    double power = 4.0;
    double epsilon = 1.0;
};

struct WattsStrogatzParams {
    int n = 200;
    int k = 4;  // even; each node starts adjacent to k/2 neighbors per side
    double p_rewire = 0.05;
};

struct StochasticBlockParams {
    std::vector<int> block_sizes{100, 100};
    std::vector<double> p_in{0.2, 0.2};
    double p_out = 0.01;
};

// Either an explicit degree sequence, or n degrees drawn uniformly from
// [degree_min, degree_max] (redrawn until the sum is even).
struct ConfigurationParams {
    int n = 1000;
    int degree_min = 75;
    int degree_max = 125;
    std::vector<int> degrees;
};

using ModelParams =
    std::variant<ErdosRenyiParams, BarabasiAlbertParams, WattsStrogatzParams, StochasticBlockParams, ConfigurationParams>;

struct GeneratorSpec {
    ModelParams params;
    std::uint64_t seed = 0;
};

inline std::string model_name(const GeneratorSpec& spec) {
    static const char* names[] = {"ER", "BA", "WS", "SBM", "CONFIG"};
    return names[spec.params.index()];
}

namespace detail {

inline void require(bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::invalid_argument, what);
}

inline void require_probability(double p, const char* name) {
    require(p >= 0.0 && p <= 1.0, std::string(name) + " must lie in [0,1]");
}

inline Graph erdos_renyi(const ErdosRenyiParams& prm, std::uint64_t seed) {
    require(prm.n > 0, "ER: n must be positive");
    require_probability(prm.p, "ER: p");
    Rng rng(seed, "er");
    std::vector<Edge> edges;
    for (int i = 0; i < prm.n; ++i) {
        for (int j = i + 1; j < prm.n; ++j) {
            if (rng.bernoulli(prm.p)) edges.push_back({i, j});
        }
    }
    return Graph(prm.n, edges);
}

inline Graph barabasi_albert(const BarabasiAlbertParams& prm, std::uint64_t seed) {
    require(prm.n > 0, "BA: n must be positive");
    require(prm.m_attach > 0, "BA: m_attach must be positive");
    require(prm.epsilon > 0.0, "BA: epsilon must be positive");
    Rng rng(seed, "ba");
    std::vector<int> degree(static_cast<std::size_t>(prm.n), 0);
    std::vector<Edge> edges;
    std::vector<double> weight;
    for (int t = 1; t < prm.n; ++t) {
        weight.assign(static_cast<std::size_t>(t), 0.0);
        double total = 0.0;
        for (int u = 0; u < t; ++u) {
            weight[static_cast<std::size_t>(u)] = std::pow(degree[static_cast<std::size_t>(u)] + prm.epsilon, prm.power);
            total += weight[static_cast<std::size_t>(u)];
        }
        const int picks = std::min(prm.m_attach, t);
        for (int k = 0; k < picks; ++k) {
            double x = rng.uniform() * total;
            int chosen = -1;
            for (int u = 0; u < t; ++u) {
                const double w = weight[static_cast<std::size_t>(u)];
                if (w <= 0.0) continue;
                chosen = u;
                if (x < w) break;
                x -= w;
            }
            total -= weight[static_cast<std::size_t>(chosen)];
            weight[static_cast<std::size_t>(chosen)] = 0.0;
            edges.push_back({chosen, t});
        }
        for (int k = static_cast<int>(edges.size()) - picks; k < static_cast<int>(edges.size()); ++k) {
            ++degree[static_cast<std::size_t>(edges[static_cast<std::size_t>(k)].i)];
        }
        degree[static_cast<std::size_t>(t)] += picks;
    }
    return Graph(prm.n, edges);
}

inline Graph watts_strogatz(const WattsStrogatzParams& prm, std::uint64_t seed) {
    require(prm.n > 0, "WS: n must be positive");
    require(prm.k >= 0 && prm.k % 2 == 0 && prm.k < prm.n, "WS: k must be even and below n");
    require_probability(prm.p_rewire, "WS: p_rewire");
    Rng rng(seed, "ws");
    const int n = prm.n;
    std::vector<std::set<int>> adj(static_cast<std::size_t>(n));
    auto link = [&](int a, int b) {
        adj[static_cast<std::size_t>(a)].insert(b);
        adj[static_cast<std::size_t>(b)].insert(a);
    };
    auto unlink = [&](int a, int b) {
        adj[static_cast<std::size_t>(a)].erase(b);
        adj[static_cast<std::size_t>(b)].erase(a);
    };
    for (int s = 1; s <= prm.k / 2; ++s) {
        for (int i = 0; i < n; ++i) link(i, (i + s) % n);
    }
    // Rewire the far endpoint of each lattice edge, one ring offset at a time.
    for (int s = 1; s <= prm.k / 2; ++s) {
        for (int i = 0; i < n; ++i) {
            const int j = (i + s) % n;
            if (!adj[static_cast<std::size_t>(i)].count(j)) continue;
            if (!rng.bernoulli(prm.p_rewire)) continue;
            if (static_cast<int>(adj[static_cast<std::size_t>(i)].size()) >= n - 1) continue;
            int w = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
            while (w == i || adj[static_cast<std::size_t>(i)].count(w)) {
                w = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
            }
            unlink(i, j);
            link(i, w);
        }
    }
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
        for (const int j : adj[static_cast<std::size_t>(i)]) {
            if (i < j) edges.push_back({i, j});
        }
    }
    return Graph(n, edges);
}

inline Graph stochastic_block(const StochasticBlockParams& prm, std::uint64_t seed) {
    require(!prm.block_sizes.empty(), "SBM: need at least one block");
    require(prm.p_in.size() == prm.block_sizes.size(), "SBM: p_in must have one entry per block");
    require_probability(prm.p_out, "SBM: p_out");
    std::vector<int> block;
    for (std::size_t b = 0; b < prm.block_sizes.size(); ++b) {
        require(prm.block_sizes[b] > 0, "SBM: block sizes must be positive");
        require_probability(prm.p_in[b], "SBM: p_in");
        block.insert(block.end(), static_cast<std::size_t>(prm.block_sizes[b]), static_cast<int>(b));
    }
    const int n = static_cast<int>(block.size());
    Rng rng(seed, "sbm");
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const int bi = block[static_cast<std::size_t>(i)];
            const double p = bi == block[static_cast<std::size_t>(j)] ? prm.p_in[static_cast<std::size_t>(bi)] : prm.p_out;
            if (rng.bernoulli(p)) edges.push_back({i, j});
        }
    }
    return Graph(n, edges);
}

inline std::uint64_t pair_key(int a, int b) {
    const auto lo = static_cast<std::uint64_t>(std::min(a, b));
    const auto hi = static_cast<std::uint64_t>(std::max(a, b));
    return (lo << 32) | hi;
}

// Stub matching followed by degree-preserving double-edge swaps that first
// remove every self-loop and multi-edge, then randomize. Restarts from a fresh
// stub shuffle when repair stalls for 100*m attempts.
inline Graph configuration_model(const std::vector<int>& degrees, Rng& rng) {
    constexpr int max_restarts = 50;
    const int n = static_cast<int>(degrees.size());
    long long stub_total = 0;
    for (const int d : degrees) {
        if (d < 0 || d > n - 1) throw Error(ErrorCode::generation_failed, "degree outside 0..n-1");
        stub_total += d;
    }
    if (stub_total % 2 != 0) throw Error(ErrorCode::generation_failed, "degree sum is odd");
    const std::size_t m = static_cast<std::size_t>(stub_total / 2);
    if (m == 0) return Graph(n, std::vector<Edge>{});

    std::vector<int> stubs;
    stubs.reserve(static_cast<std::size_t>(stub_total));
    for (int v = 0; v < n; ++v) stubs.insert(stubs.end(), static_cast<std::size_t>(degrees[static_cast<std::size_t>(v)]), v);

    for (int attempt = 0; attempt < max_restarts; ++attempt) {
        rng.shuffle(stubs);
        std::vector<std::pair<int, int>> edges(m);
        std::unordered_map<std::uint64_t, int> count;
        count.reserve(2 * m);
        std::vector<std::size_t> bad;
        for (std::size_t e = 0; e < m; ++e) {
            edges[e] = {stubs[2 * e], stubs[2 * e + 1]};
            const int c = ++count[pair_key(edges[e].first, edges[e].second)];
            if (edges[e].first == edges[e].second || c > 1) bad.push_back(e);
        }
        auto is_bad = [&](std::size_t e) {
            const auto [a, b] = edges[e];
            return a == b || count[pair_key(a, b)] > 1;
        };
        // Swap (a,b),(c,d) -> (a,d),(c,b) when both new pairs are fresh non-loops.
        auto try_swap = [&](std::size_t e1, std::size_t e2) {
            auto [a, b] = edges[e1];
            auto [c, d] = edges[e2];
            if (rng.bernoulli(0.5)) std::swap(c, d);
            if (a == d || c == b) return false;
            const std::uint64_t k1 = pair_key(a, d);
            const std::uint64_t k2 = pair_key(c, b);
            if (k1 == k2) return false;
            const auto f1 = count.find(k1);
            const auto f2 = count.find(k2);
            if ((f1 != count.end() && f1->second > 0) || (f2 != count.end() && f2->second > 0)) return false;
            --count[pair_key(a, b)];
            --count[pair_key(c, d)];
            ++count[k1];
            ++count[k2];
            edges[e1] = {a, d};
            edges[e2] = {c, b};
            return true;
        };

        std::size_t failures = 0;
        bool stalled = false;
        while (!bad.empty()) {
            const std::size_t e1 = bad.back();
            if (!is_bad(e1)) {
                bad.pop_back();
                continue;
            }
            if (m < 2) {
                stalled = true;
                break;
            }
            std::size_t e2 = static_cast<std::size_t>(rng.below(m));
            if (e2 == e1 || !try_swap(e1, e2)) {
                if (++failures > 100 * m) {
                    stalled = true;
                    break;
                }
                continue;
            }
            bad.pop_back();
        }
        if (stalled) continue;

        for (std::size_t s = 0; s < 10 * m && m >= 2; ++s) {
            const std::size_t e1 = static_cast<std::size_t>(rng.below(m));
            const std::size_t e2 = static_cast<std::size_t>(rng.below(m));
            if (e1 != e2) try_swap(e1, e2);
        }

        std::vector<Edge> out;
        out.reserve(m);
        for (const auto& [a, b] : edges) out.push_back(make_edge(a, b));
        return Graph(n, out);
    }
    throw Error(ErrorCode::generation_failed,
                "configuration model: could not realize a simple graph after " + std::to_string(max_restarts) + " restarts");
}

inline std::vector<int> sample_degree_sequence(const ConfigurationParams& prm, std::uint64_t seed) {
    if (!prm.degrees.empty()) return prm.degrees;
    require(prm.n > 0, "CONFIG: n must be positive");
    require(prm.degree_min >= 0 && prm.degree_min <= prm.degree_max, "CONFIG: need 0 <= degree_min <= degree_max");
    constexpr int max_resamples = 1000;
    Rng draw(seed, "config-degrees");
    std::vector<int> degrees(static_cast<std::size_t>(prm.n), 0);
    for (int r = 0; r < max_resamples; ++r) {
        long long sum = 0;
        for (auto& d : degrees) {
            d = static_cast<int>(draw.between(prm.degree_min, prm.degree_max));
            sum += d;
        }
        if (sum % 2 == 0) return degrees;
    }
    throw Error(ErrorCode::generation_failed, "CONFIG: no even-sum degree sequence after resampling");
}

inline Graph configuration(const ConfigurationParams& prm, std::uint64_t seed) {
    const std::vector<int> degrees = sample_degree_sequence(prm, seed);
    Rng rng(seed, "config-match");
    return configuration_model(degrees, rng);
}

}  // namespace detail

// The degree sequence a CONFIG spec realizes, drawn exactly as generate() draws it.
inline std::vector<int> sampled_degrees(const ConfigurationParams& prm, std::uint64_t seed) {
    return detail::sample_degree_sequence(prm, seed);
}

inline Graph generate(const GeneratorSpec& spec) {
    return std::visit(
        [&](const auto& prm) -> Graph {
            using P = std::decay_t<decltype(prm)>;
            if constexpr (std::is_same_v<P, ErdosRenyiParams>) return detail::erdos_renyi(prm, spec.seed);
            if constexpr (std::is_same_v<P, BarabasiAlbertParams>) return detail::barabasi_albert(prm, spec.seed);
            if constexpr (std::is_same_v<P, WattsStrogatzParams>) return detail::watts_strogatz(prm, spec.seed);
            if constexpr (std::is_same_v<P, StochasticBlockParams>) return detail::stochastic_block(prm, spec.seed);
            if constexpr (std::is_same_v<P, ConfigurationParams>) return detail::configuration(prm, spec.seed);
        },
        spec.params);
}

struct Component {
    Graph graph;
    std::vector<int> original;  // new label -> original node
};

// Induced subgraph on the largest component; equal sizes resolve to the
// component holding the smallest original node.
inline Component largest_connected_component(const Graph& g) {
    const auto label = component_labels(g);
    int best = 0;
    if (!label.empty()) {
        std::vector<int> size(static_cast<std::size_t>(*std::max_element(label.begin(), label.end()) + 1), 0);
        for (const int c : label) ++size[static_cast<std::size_t>(c)];
        best = static_cast<int>(std::max_element(size.begin(), size.end()) - size.begin());
    }
    Component out;
    std::vector<int> relabel(label.size(), -1);
    for (std::size_t v = 0; v < label.size(); ++v) {
        if (label[v] == best) {
            relabel[v] = static_cast<int>(out.original.size());
            out.original.push_back(static_cast<int>(v));
        }
    }
    std::vector<Edge> edges;
    for (const Edge& e : g.edges()) {
        if (label[static_cast<std::size_t>(e.i)] == best) {
            edges.push_back(make_edge(relabel[static_cast<std::size_t>(e.i)], relabel[static_cast<std::size_t>(e.j)]));
        }
    }
    out.graph = Graph(static_cast<int>(out.original.size()), edges);
    return out;
}

// JSON form: {"model": "ER", "seed": 1, "n": 200, "p": 0.15} and analogous
// keys per model (see README).
inline GeneratorSpec spec_from_json(const nlohmann::json& j) {
    try {
        GeneratorSpec spec;
        spec.seed = j.value("seed", std::uint64_t{0});
        const std::string model = j.at("model").get<std::string>();
        if (model == "ER") {
            ErdosRenyiParams p;
            p.n = j.value("n", p.n);
            p.p = j.value("p", p.p);
            spec.params = p;
        } else if (model == "BA") {
            BarabasiAlbertParams p;
            p.n = j.value("n", p.n);
            p.m_attach = j.value("m_attach", p.m_attach);
            p.power = j.value("power", p.power);
            p.epsilon = j.value("epsilon", p.epsilon);
            spec.params = p;
        } else if (model == "WS") {
            WattsStrogatzParams p;
            p.n = j.value("n", p.n);
            p.k = j.value("k", p.k);
            p.p_rewire = j.value("p_rewire", p.p_rewire);
            spec.params = p;
        } else if (model == "SBM") {
            StochasticBlockParams p;
            p.block_sizes = j.value("block_sizes", p.block_sizes);
            if (j.contains("p_in") && j.at("p_in").is_number()) {
                p.p_in.assign(p.block_sizes.size(), j.at("p_in").get<double>());
            } else {
                p.p_in = j.value("p_in", std::vector<double>(p.block_sizes.size(), 0.2));
            }
            p.p_out = j.value("p_out", p.p_out);
            spec.params = p;
        } else if (model == "CONFIG") {
            ConfigurationParams p;
            p.n = j.value("n", p.n);
            p.degree_min = j.value("degree_min", p.degree_min);
            p.degree_max = j.value("degree_max", p.degree_max);
            p.degrees = j.value("degrees", p.degrees);
            if (!p.degrees.empty()) p.n = static_cast<int>(p.degrees.size());
            spec.params = p;
        } else {
            throw Error(ErrorCode::invalid_argument, "unknown model '" + model + "'");
        }
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::invalid_argument, std::string("generator spec: ") + e.what());
    }
}

inline nlohmann::json spec_to_json(const GeneratorSpec& spec) {
    nlohmann::json j;
    j["model"] = model_name(spec);
    j["seed"] = spec.seed;
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, ErdosRenyiParams>) {
                j["n"] = p.n;
                j["p"] = p.p;
            } else if constexpr (std::is_same_v<P, BarabasiAlbertParams>) {
                j["n"] = p.n;
                j["m_attach"] = p.m_attach;
                j["power"] = p.power;
                j["epsilon"] = p.epsilon;
            } else if constexpr (std::is_same_v<P, WattsStrogatzParams>) {
                j["n"] = p.n;
                j["k"] = p.k;
                j["p_rewire"] = p.p_rewire;
            } else if constexpr (std::is_same_v<P, StochasticBlockParams>) {
                j["block_sizes"] = p.block_sizes;
                j["p_in"] = p.p_in;
                j["p_out"] = p.p_out;
            } else {
                j["n"] = p.n;
                if (p.degrees.empty()) {
                    j["degree_min"] = p.degree_min;
                    j["degree_max"] = p.degree_max;
                } else {
                    j["degrees"] = p.degrees;
                }
            }
        },
        spec.params);
    return j;
}

}  // namespace foedi
