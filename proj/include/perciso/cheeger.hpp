#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "perciso/error.hpp"
#include "perciso/lattice.hpp"
#include "perciso/maxflow.hpp"
#include "perciso/parallel.hpp"
#include "perciso/rational.hpp"
#include "perciso/rng.hpp"

namespace perciso {

/// Simple undirected graph; coordinates drive the geometric seeds of the search.
struct Graph {
    std::vector<std::vector<int>> adj;
    std::vector<Vertex> coords;

    static Graph from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
        Graph g;
        g.adj.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) g.coords.push_back({i, 0});
        for (auto [a, b] : edges) {
            if (a == b || a < 0 || b < 0 || a >= n || b >= n) throw ArgumentError("bad edge");
            g.adj[static_cast<std::size_t>(a)].push_back(b);
            g.adj[static_cast<std::size_t>(b)].push_back(a);
        }
        return g;
    }

    [[nodiscard]] int size() const { return static_cast<int>(adj.size()); }
    [[nodiscard]] int degree(int v) const { return static_cast<int>(adj[static_cast<std::size_t>(v)].size()); }
};

inline std::int64_t boundary_size(const Graph& g, const std::vector<int>& h) {
    std::vector<std::uint8_t> in(static_cast<std::size_t>(g.size()), 0);
    for (int v : h) in[static_cast<std::size_t>(v)] = 1;
    std::int64_t b = 0;
    for (int v : h)
        for (int w : g.adj[static_cast<std::size_t>(v)]) b += !in[static_cast<std::size_t>(w)];
    return b;
}

/// Connected components of the subgraph induced by h (all of g when h is empty).
inline std::vector<std::vector<int>> components(const Graph& g, const std::vector<int>& h) {
    const auto n = static_cast<std::size_t>(g.size());
    std::vector<std::uint8_t> in(n, h.empty() ? 1 : 0);
    for (int v : h) in[static_cast<std::size_t>(v)] = 1;
    std::vector<std::uint8_t> seen(n, 0);
    std::vector<std::vector<int>> out;
    for (std::size_t s = 0; s < n; ++s) {
        if (!in[s] || seen[s]) continue;
        auto& comp = out.emplace_back();
        std::vector<int> stack{static_cast<int>(s)};
        seen[s] = 1;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            comp.push_back(v);
            for (int w : g.adj[static_cast<std::size_t>(v)])
                if (in[static_cast<std::size_t>(w)] && !seen[static_cast<std::size_t>(w)]) {
                    seen[static_cast<std::size_t>(w)] = 1;
                    stack.push_back(w);
                }
        }
        std::sort(comp.begin(), comp.end());
    }
    return out;
}

inline bool is_connected(const Graph& g) { return g.size() > 0 && components(g, {}).size() == 1; }

/// Host graph of a subgraph of C_n: its vertices and the open edges among them.
struct HostGraph {
    Graph graph;
    std::vector<Vertex> vertices;
    std::shared_ptr<const ClusterContext> context;

    [[nodiscard]] Subgraph subgraph(const std::vector<int>& h) const {
        std::vector<Vertex> vs;
        for (int i : h) vs.push_back(vertices[static_cast<std::size_t>(i)]);
        return Subgraph(context, std::move(vs));
    }
};

inline HostGraph host_graph(const Subgraph& s) {
    HostGraph h;
    h.context = s.context_ptr();
    h.vertices.assign(s.vertices().begin(), s.vertices().end());
    const Config& cfg = s.config();
    std::vector<std::int32_t> id(cfg.vertex_count(), -1);
    for (std::size_t i = 0; i < h.vertices.size(); ++i) id[cfg.index(h.vertices[i])] = static_cast<std::int32_t>(i);
    h.graph.adj.resize(h.vertices.size());
    h.graph.coords = h.vertices;
    for (std::size_t i = 0; i < h.vertices.size(); ++i)
        for (Dir d : all_dirs) {
            if (!cfg.is_open(h.vertices[i], d)) continue;
            const Vertex w = step(h.vertices[i], d);
            const auto j = id[cfg.index(w)];
            if (j >= 0) h.graph.adj[i].push_back(j);
        }
    return h;
}

struct CheegerResult {
    Fraction phi_upper{0};
    Fraction phi_lower{0};
    std::vector<std::vector<int>> optimizers;
    std::string upper_method;
    std::string lower_method;
};

inline void write_cheeger_result(std::ostream& os, const CheegerResult& r, const std::vector<Vertex>& labels = {}) {
    os << "phi_upper " << r.phi_upper << ' ' << r.phi_upper.value() << '\n';
    os << "phi_lower " << r.phi_lower << ' ' << r.phi_lower.value() << '\n';
    os << "upper_method " << r.upper_method << '\n';
    os << "lower_method " << r.lower_method << '\n';
    os << "optimizers " << r.optimizers.size() << '\n';
    for (const auto& h : r.optimizers) {
        os << h.size();
        for (int v : h) {
            if (labels.empty())
                os << ' ' << v;
            else
                os << ' ' << labels[static_cast<std::size_t>(v)].x << ',' << labels[static_cast<std::size_t>(v)].y;
        }
        os << '\n';
    }
}

inline constexpr int exhaustive_threshold = 22;

/// Exact Cheeger constant by enumerating every subset with 0 < |H| <= |V|/2.
inline CheegerResult cheeger_exact(const Graph& g, int threshold = exhaustive_threshold) {
    const int n = g.size();
    if (n > threshold || n > 30)
        throw CapacityError("host has " + std::to_string(n) + " vertices; exhaustive search is limited to " + std::to_string(threshold));
    if (n < 2) throw DomainError("host needs at least two vertices");
    std::vector<std::uint32_t> nbr(static_cast<std::size_t>(n), 0);
    for (int v = 0; v < n; ++v)
        for (int w : g.adj[static_cast<std::size_t>(v)]) nbr[static_cast<std::size_t>(v)] |= 1U << w;
    const int cap = n / 2;
    std::int64_t best_b = -1;
    std::int64_t best_s = 1;
    std::vector<std::uint32_t> best;
    for (std::uint32_t mask = 1; mask < (1U << n); ++mask) {
        const int size = std::popcount(mask);
        if (size > cap) continue;
        std::int64_t b = 0;
        for (std::uint32_t m = mask; m; m &= m - 1) b += std::popcount(nbr[static_cast<std::size_t>(std::countr_zero(m))] & ~mask);
        const __int128 lhs = static_cast<__int128>(b) * best_s;
        const __int128 rhs = static_cast<__int128>(best_b) * size;
        if (best_b < 0 || lhs < rhs) {
            best_b = b;
            best_s = size;
            best.assign(1, mask);
        } else if (lhs == rhs) {
            best.push_back(mask);
        }
    }
    CheegerResult r;
    r.phi_upper = Fraction(best_b, best_s);
    r.phi_lower = r.phi_upper;
    r.upper_method = "exhaustive";
    r.lower_method = "exhaustive";
    for (auto mask : best) {
        auto& h = r.optimizers.emplace_back();
        for (int v = 0; v < n; ++v)
            if (mask >> v & 1U) h.push_back(v);
    }
    return r;
}

struct UncappedBound {
    Fraction value{0};
    std::vector<int> minimizer;
    std::string method;
};

namespace detail {

/// Bridges with the size of the side hanging below them in a DFS tree.
inline std::vector<std::pair<int, int>> bridge_sides(const Graph& g, std::vector<int>& below) {
    const int n = g.size();
    std::vector<int> tin(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0), sub(static_cast<std::size_t>(n), 1),
        parent(static_cast<std::size_t>(n), -1);
    std::vector<std::pair<int, int>> bridges;  // (parent, child)
    int timer = 0;
    struct Frame {
        int v;
        std::size_t next;
    };
    std::vector<Frame> stack;
    tin[0] = low[0] = timer++;
    stack.push_back({0, 0});
    while (!stack.empty()) {
        auto& f = stack.back();
        const int v = f.v;
        if (f.next < g.adj[static_cast<std::size_t>(v)].size()) {
            const int w = g.adj[static_cast<std::size_t>(v)][f.next++];
            if (tin[static_cast<std::size_t>(w)] < 0) {
                parent[static_cast<std::size_t>(w)] = v;
                tin[static_cast<std::size_t>(w)] = low[static_cast<std::size_t>(w)] = timer++;
                stack.push_back({w, 0});
            } else if (w != parent[static_cast<std::size_t>(v)]) {
                low[static_cast<std::size_t>(v)] = std::min(low[static_cast<std::size_t>(v)], tin[static_cast<std::size_t>(w)]);
            }
        } else {
            stack.pop_back();
            const int p = parent[static_cast<std::size_t>(v)];
            if (p >= 0) {
                low[static_cast<std::size_t>(p)] = std::min(low[static_cast<std::size_t>(p)], low[static_cast<std::size_t>(v)]);
                sub[static_cast<std::size_t>(p)] += sub[static_cast<std::size_t>(v)];
                if (low[static_cast<std::size_t>(v)] > tin[static_cast<std::size_t>(p)]) bridges.push_back({p, v});
            }
        }
    }
    below = sub;
    return bridges;
}

/// Vertices of the subtree below `child` in the DFS tree that produced the bridge.
inline std::vector<int> side_of_bridge(const Graph& g, int parent, int child) {
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(g.size()), 0);
    seen[static_cast<std::size_t>(parent)] = 1;
    seen[static_cast<std::size_t>(child)] = 1;
    std::vector<int> out{child};
    for (std::size_t i = 0; i < out.size(); ++i)
        for (int w : g.adj[static_cast<std::size_t>(out[i])]) {
            if (out[i] == child && w == parent) continue;
            if (!seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = 1;
                out.push_back(w);
            }
        }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<int> complement(int n, const std::vector<int>& h) {
    std::vector<std::uint8_t> in(static_cast<std::size_t>(n), 0);
    for (int v : h) in[static_cast<std::size_t>(v)] = 1;
    std::vector<int> out;
    for (int v = 0; v < n; ++v)
        if (!in[static_cast<std::size_t>(v)]) out.push_back(v);
    return out;
}

/// Dinkelbach iteration; each step minimises b|dH| - a|H| over proper H by
/// one minimum cut per vertex forced outside H.
inline UncappedBound uncapped_by_flow(const Graph& g, std::vector<int> start) {
    const int n = g.size();
    Fraction lambda(boundary_size(g, start), static_cast<std::int64_t>(start.size()));
    std::vector<int> best = std::move(start);
    for (int iter = 0; iter < 64; ++iter) {
        const std::int64_t a = lambda.num;
        const std::int64_t b = lambda.den;
        __int128 best_obj = 0;
        std::vector<int> improved;
        for (int u = 0; u < n; ++u) {
            MaxFlow mf(n + 2);
            const int s = n;
            const int t = n + 1;
            for (int v = 0; v < n; ++v) {
                mf.add_edge(s, v, a);
                for (int w : g.adj[static_cast<std::size_t>(v)])
                    if (v < w) mf.add_edge(v, w, b, b);
            }
            mf.add_edge(u, t, MaxFlow::infinite);
            const std::int64_t cut = mf.run(s, t);
            const __int128 obj = static_cast<__int128>(cut) - static_cast<__int128>(a) * n;
            if (obj < best_obj) {
                const auto side = mf.source_side(s);
                std::vector<int> h;
                for (int v = 0; v < n; ++v)
                    if (side[static_cast<std::size_t>(v)]) h.push_back(v);
                if (!h.empty()) {
                    best_obj = obj;
                    improved = std::move(h);
                }
            }
        }
        if (improved.empty()) break;
        lambda = Fraction(boundary_size(g, improved), static_cast<std::int64_t>(improved.size()));
        best = std::move(improved);
    }
    return {lambda, best, "dinkelbach-mincut"};
}

}  // namespace detail

/// min |dH|/|H| over nonempty proper H with no size cap; a lower bound on the
/// Cheeger constant.
inline UncappedBound cheeger_lower_uncapped(const Graph& g, bool force_flow = false) {
    const int n = g.size();
    if (n < 2) throw DomainError("host needs at least two vertices");
    if (!is_connected(g)) throw DomainError("host graph is disconnected");
    int dmin = g.degree(0);
    int vmin = 0;
    for (int v = 1; v < n; ++v)
        if (g.degree(v) < dmin) {
            dmin = g.degree(v);
            vmin = v;
        }
    std::vector<int> without_min;
    for (int v = 0; v < n; ++v)
        if (v != vmin) without_min.push_back(v);
    if (force_flow) return detail::uncapped_by_flow(g, without_min);

    // Any proper H has |dH| >= 1 and |H| <= n - 1. A ratio of 1/|H| needs a
    // bridge; without bridges |dH| >= 2, and 2/(n-1) is reached by dropping a
    // degree-2 vertex.
    std::vector<int> below;
    const auto bridges = detail::bridge_sides(g, below);
    if (!bridges.empty()) {
        std::pair<int, int> arg = bridges.front();
        int smallest = n;
        for (auto [p, c] : bridges) {
            const int side = std::min(below[static_cast<std::size_t>(c)], n - below[static_cast<std::size_t>(c)]);
            if (side < smallest) {
                smallest = side;
                arg = {p, c};
            }
        }
        auto low_side = detail::side_of_bridge(g, arg.first, arg.second);
        auto h = static_cast<int>(low_side.size()) == smallest ? detail::complement(n, low_side) : low_side;
        return {Fraction(1, n - smallest), h, dmin == 1 ? "leaf" : "bridge"};
    }
    if (dmin == 2) return {Fraction(2, n - 1), without_min, "degree-two"};
    return detail::uncapped_by_flow(g, without_min);
}

// ---------------------------------------------------------------------------

struct SearchOptions {
    std::uint64_t budget = 20000;  // annealing iterations per restart
    int restarts = 8;
    std::uint64_t seed = 0;
    double t_start = 2.0;
    double t_end = 0.05;
    std::size_t max_optimizers = 32;
    unsigned workers = default_workers();
};

namespace detail {

class IndexedSet {
public:
    explicit IndexedSet(std::size_t n) : pos_(n, -1) {}
    void insert(int v) {
        if (pos_[static_cast<std::size_t>(v)] >= 0) return;
        pos_[static_cast<std::size_t>(v)] = static_cast<int>(items_.size());
        items_.push_back(v);
    }
    void erase(int v) {
        const int p = pos_[static_cast<std::size_t>(v)];
        if (p < 0) return;
        const int last = items_.back();
        items_[static_cast<std::size_t>(p)] = last;
        pos_[static_cast<std::size_t>(last)] = p;
        items_.pop_back();
        pos_[static_cast<std::size_t>(v)] = -1;
    }
    [[nodiscard]] bool empty() const { return items_.empty(); }
    [[nodiscard]] std::size_t size() const { return items_.size(); }
    [[nodiscard]] int at(std::size_t i) const { return items_[i]; }

private:
    std::vector<int> pos_;
    std::vector<int> items_;
};

class CutState {
public:
    explicit CutState(const Graph& g) : g_(g), in_(static_cast<std::size_t>(g.size()), 0), deg_in_(static_cast<std::size_t>(g.size()), 0),
                                        outer_(static_cast<std::size_t>(g.size())), inner_(static_cast<std::size_t>(g.size())) {}

    [[nodiscard]] std::int64_t boundary() const { return boundary_; }
    [[nodiscard]] int size() const { return size_; }
    [[nodiscard]] bool contains(int v) const { return in_[static_cast<std::size_t>(v)] != 0; }
    [[nodiscard]] int delta_add(int v) const { return g_.degree(v) - 2 * deg_in_[static_cast<std::size_t>(v)]; }
    [[nodiscard]] int delta_remove(int v) const { return 2 * deg_in_[static_cast<std::size_t>(v)] - g_.degree(v); }
    [[nodiscard]] const IndexedSet& outer() const { return outer_; }
    [[nodiscard]] const IndexedSet& inner() const { return inner_; }

    void add(int v) {
        boundary_ += delta_add(v);
        in_[static_cast<std::size_t>(v)] = 1;
        ++size_;
        for (int w : g_.adj[static_cast<std::size_t>(v)]) {
            ++deg_in_[static_cast<std::size_t>(w)];
            refresh(w);
        }
        refresh(v);
    }

    void remove(int v) {
        boundary_ += delta_remove(v);
        in_[static_cast<std::size_t>(v)] = 0;
        --size_;
        for (int w : g_.adj[static_cast<std::size_t>(v)]) {
            --deg_in_[static_cast<std::size_t>(w)];
            refresh(w);
        }
        refresh(v);
    }

    [[nodiscard]] std::vector<int> members() const {
        std::vector<int> out;
        for (int v = 0; v < g_.size(); ++v)
            if (in_[static_cast<std::size_t>(v)]) out.push_back(v);
        return out;
    }

private:
    void refresh(int v) {
        const auto i = static_cast<std::size_t>(v);
        if (!in_[i] && deg_in_[i] > 0)
            outer_.insert(v);
        else
            outer_.erase(v);
        if (in_[i] && deg_in_[i] < g_.degree(v))
            inner_.insert(v);
        else
            inner_.erase(v);
    }

    const Graph& g_;
    std::vector<std::uint8_t> in_;
    std::vector<int> deg_in_;
    IndexedSet outer_;
    IndexedSet inner_;
    std::int64_t boundary_ = 0;
    int size_ = 0;
};

/// Ratio comparison b1/s1 < b2/s2 without rounding.
inline bool ratio_less(std::int64_t b1, std::int64_t s1, std::int64_t b2, std::int64_t s2) {
    return static_cast<__int128>(b1) * s2 < static_cast<__int128>(b2) * s1;
}

struct Candidate {
    std::int64_t boundary = 0;
    std::int64_t size = 0;
    std::vector<int> members;
};

/// Best prefix of an ordering, subject to the size cap.
inline Candidate sweep(const Graph& g, const std::vector<int>& order, int cap) {
    std::vector<std::uint8_t> in(static_cast<std::size_t>(g.size()), 0);
    std::int64_t b = 0;
    std::int64_t best_b = -1;
    std::int64_t best_s = 1;
    for (int k = 0; k < cap && k < static_cast<int>(order.size()); ++k) {
        const int v = order[static_cast<std::size_t>(k)];
        int inside = 0;
        for (int w : g.adj[static_cast<std::size_t>(v)]) inside += in[static_cast<std::size_t>(w)];
        b += g.degree(v) - 2 * inside;
        in[static_cast<std::size_t>(v)] = 1;
        if (best_b < 0 || ratio_less(b, k + 1, best_b, best_s)) {
            best_b = b;
            best_s = k + 1;
        }
    }
    Candidate c{best_b, best_s, std::vector<int>(order.begin(), order.begin() + best_s)};
    std::sort(c.members.begin(), c.members.end());
    return c;
}

inline std::vector<Candidate> seed_candidates(const Graph& g, int cap) {
    const int n = g.size();
    std::vector<int> base(static_cast<std::size_t>(n));
    std::iota(base.begin(), base.end(), 0);
    std::vector<Candidate> out;
    auto by = [&](auto key) {
        auto order = base;
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return key(a) < key(b); });
        out.push_back(sweep(g, order, cap));
    };
    auto c = [&](int v) { return g.coords[static_cast<std::size_t>(v)]; };
    // Half-box cuts along both axes, from both sides.
    by([&](int v) { return std::pair(c(v).x, c(v).y); });
    by([&](int v) { return std::pair(-c(v).x, -c(v).y); });
    by([&](int v) { return std::pair(c(v).y, c(v).x); });
    by([&](int v) { return std::pair(-c(v).y, -c(v).x); });
    // Corner regions: l-infinity quarters, l-2 quarter discs, l-1 triangles.
    int lox = 0, hix = 0, loy = 0, hiy = 0;
    for (int v = 0; v < n; ++v) {
        lox = std::min(lox, c(v).x), hix = std::max(hix, c(v).x);
        loy = std::min(loy, c(v).y), hiy = std::max(hiy, c(v).y);
    }
    for (int cx : {lox, hix})
        for (int cy : {loy, hiy}) {
            by([&](int v) { return std::max(std::abs(c(v).x - cx), std::abs(c(v).y - cy)); });
            by([&](int v) {
                const std::int64_t dx = c(v).x - cx, dy = c(v).y - cy;
                return dx * dx + dy * dy;
            });
            by([&](int v) { return std::abs(c(v).x - cx) + std::abs(c(v).y - cy); });
        }
    // Uncapped minimiser trimmed to the cap in breadth-first order.
    if (is_connected(g)) {
        const auto low = cheeger_lower_uncapped(g);
        std::vector<std::uint8_t> in(static_cast<std::size_t>(n), 0), seen(static_cast<std::size_t>(n), 0);
        for (int v : low.minimizer) in[static_cast<std::size_t>(v)] = 1;
        std::vector<int> order;
        for (int s : low.minimizer) {
            if (seen[static_cast<std::size_t>(s)]) continue;
            seen[static_cast<std::size_t>(s)] = 1;
            order.push_back(s);
            for (std::size_t i = order.size() - 1; i < order.size(); ++i)
                for (int w : g.adj[static_cast<std::size_t>(order[i])])
                    if (in[static_cast<std::size_t>(w)] && !seen[static_cast<std::size_t>(w)]) {
                        seen[static_cast<std::size_t>(w)] = 1;
                        order.push_back(w);
                    }
        }
        out.push_back(sweep(g, order, cap));
    }
    return out;
}

struct RestartOutcome {
    std::int64_t boundary = 0;
    std::int64_t size = 1;
    std::vector<std::vector<int>> ties;
};

inline RestartOutcome anneal(const Graph& g, const Candidate& start, int cap, std::uint64_t iterations, std::uint64_t seed,
                             const SearchOptions& opt) {
    CutState st(g);
    for (int v : start.members) st.add(v);
    RestartOutcome out{st.boundary(), st.size(), {start.members}};
    Xoshiro256 rng(seed);
    const double ratio_cool = iterations > 0 ? std::log(opt.t_end / opt.t_start) / static_cast<double>(iterations) : 0.0;
    for (std::uint64_t it = 0; it < iterations; ++it) {
        const double temp = opt.t_start * std::exp(ratio_cool * static_cast<double>(it));
        const double lambda = static_cast<double>(out.boundary) / static_cast<double>(out.size);
        const bool grow = st.inner().empty() || (!st.outer().empty() && rng.below(2) == 0);
        int v = 0;
        int db = 0;
        int ds = 0;
        if (grow) {
            if (st.outer().empty() || st.size() >= cap) continue;
            v = st.outer().at(rng.below(st.outer().size()));
            db = st.delta_add(v);
            ds = 1;
        } else {
            if (st.size() <= 1) continue;
            v = st.inner().at(rng.below(st.inner().size()));
            db = st.delta_remove(v);
            ds = -1;
        }
        const double de = db - lambda * ds;
        if (de > 0 && rng.uniform() >= std::exp(-de / temp)) continue;
        if (grow)
            st.add(v);
        else
            st.remove(v);
        if (ratio_less(st.boundary(), st.size(), out.boundary, out.size)) {
            out.boundary = st.boundary();
            out.size = st.size();
            out.ties.assign(1, st.members());
        } else if (!ratio_less(out.boundary, out.size, st.boundary(), st.size()) && out.ties.size() < opt.max_optimizers) {
            out.ties.push_back(st.members());
        }
    }
    return out;
}

}  // namespace detail

/// Stochastic upper bound on the Cheeger constant with the uncapped lower bound.
inline CheegerResult cheeger_search(const Graph& g, const SearchOptions& opt = {}) {
    const int n = g.size();
    if (n < 2) throw DomainError("host needs at least two vertices");
    if (!is_connected(g)) throw DomainError("host graph is disconnected");
    const int cap = n / 2;
    const auto seeds = detail::seed_candidates(g, cap);

    const std::size_t runs = opt.budget == 0 ? 0 : static_cast<std::size_t>(std::max(1, opt.restarts));
    std::vector<detail::RestartOutcome> outcomes(runs);
    parallel_for(
        runs,
        [&](std::size_t r) {
            const auto& start = seeds[r % seeds.size()];
            outcomes[r] = detail::anneal(g, start, cap, opt.budget, hash_key(opt.seed, Stream::restart, r), opt);
        },
        opt.workers);
    for (const auto& s : seeds) outcomes.push_back({s.boundary, s.size, {s.members}});

    std::int64_t bb = outcomes.front().boundary;
    std::int64_t bs = outcomes.front().size;
    for (const auto& o : outcomes)
        if (detail::ratio_less(o.boundary, o.size, bb, bs)) {
            bb = o.boundary;
            bs = o.size;
        }
    std::vector<std::vector<int>> tied;
    for (const auto& o : outcomes)
        if (!detail::ratio_less(bb, bs, o.boundary, o.size))
            for (const auto& h : o.ties) tied.push_back(h);

    // Component repair: some component of a disconnected subset is at least
    // as good as the subset itself, so its components join the candidates.
    std::vector<std::vector<int>> repaired;
    for (const auto& h : tied) {
        repaired.push_back(h);
        const auto comps = components(g, h);
        if (comps.size() == 1) continue;
        for (const auto& c : comps) {
            const auto cb = boundary_size(g, c);
            const auto cs = static_cast<std::int64_t>(c.size());
            if (detail::ratio_less(cb, cs, bb, bs)) {
                bb = cb;
                bs = cs;
                repaired.clear();
            }
            if (!detail::ratio_less(bb, bs, cb, cs)) repaired.push_back(c);
        }
    }
    std::erase_if(repaired, [&](const std::vector<int>& h) {
        return detail::ratio_less(bb, bs, boundary_size(g, h), static_cast<std::int64_t>(h.size()));
    });
    std::sort(repaired.begin(), repaired.end());
    repaired.erase(std::unique(repaired.begin(), repaired.end()), repaired.end());
    if (repaired.size() > opt.max_optimizers) repaired.resize(opt.max_optimizers);

    CheegerResult r;
    r.phi_upper = Fraction(bb, bs);
    r.optimizers = std::move(repaired);
    r.upper_method = opt.budget == 0 ? "seeded-sweep" : "annealing";
    const auto low = cheeger_lower_uncapped(g);
    r.phi_lower = low.value;
    r.lower_method = "uncapped-" + low.method;
    return r;
}

/// Conductance of the best optimizer scaled by n, from the exact rational.
inline double scaled_phi(const CheegerResult& r, int n) { return (r.phi_upper * n).value(); }

}  // namespace perciso
