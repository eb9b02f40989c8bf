#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <queue>
#include <vector>

namespace perciso {

/// Dinic's algorithm on integer capacities.
class MaxFlow {
public:
    static constexpr std::int64_t infinite = std::numeric_limits<std::int64_t>::max() / 4;

    explicit MaxFlow(int nodes) : graph_(static_cast<std::size_t>(nodes)), level_(static_cast<std::size_t>(nodes)), iter_(static_cast<std::size_t>(nodes)) {}

    void add_edge(int from, int to, std::int64_t cap, std::int64_t reverse_cap = 0) {
        graph_[static_cast<std::size_t>(from)].push_back({to, static_cast<int>(graph_[static_cast<std::size_t>(to)].size()), cap});
        graph_[static_cast<std::size_t>(to)].push_back({from, static_cast<int>(graph_[static_cast<std::size_t>(from)].size()) - 1, reverse_cap});
    }

    std::int64_t run(int s, int t) {
        std::int64_t flow = 0;
        while (bfs(s, t)) {
            std::fill(iter_.begin(), iter_.end(), 0);
            for (std::int64_t f; (f = dfs(s, t, infinite)) > 0;) flow += f;
        }
        return flow;
    }

    /// Nodes reachable from s in the residual graph after run(): the source side of a minimum cut.
    [[nodiscard]] std::vector<std::uint8_t> source_side(int s) const {
        std::vector<std::uint8_t> seen(graph_.size(), 0);
        std::vector<int> stack{s};
        seen[static_cast<std::size_t>(s)] = 1;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (const auto& e : graph_[static_cast<std::size_t>(v)])
                if (e.cap > 0 && !seen[static_cast<std::size_t>(e.to)]) {
                    seen[static_cast<std::size_t>(e.to)] = 1;
                    stack.push_back(e.to);
                }
        }
        return seen;
    }

private:
    struct Arc {
        int to;
        int rev;
        std::int64_t cap;
    };

    bool bfs(int s, int t) {
        std::fill(level_.begin(), level_.end(), -1);
        std::queue<int> q;
        level_[static_cast<std::size_t>(s)] = 0;
        q.push(s);
        while (!q.empty()) {
            const int v = q.front();
            q.pop();
            for (const auto& e : graph_[static_cast<std::size_t>(v)])
                if (e.cap > 0 && level_[static_cast<std::size_t>(e.to)] < 0) {
                    level_[static_cast<std::size_t>(e.to)] = level_[static_cast<std::size_t>(v)] + 1;
                    q.push(e.to);
                }
        }
        return level_[static_cast<std::size_t>(t)] >= 0;
    }

    std::int64_t dfs(int v, int t, std::int64_t f) {
        if (v == t) return f;
        auto& adj = graph_[static_cast<std::size_t>(v)];
        for (int& i = iter_[static_cast<std::size_t>(v)]; i < static_cast<int>(adj.size()); ++i) {
            Arc& e = adj[static_cast<std::size_t>(i)];
            if (e.cap <= 0 || level_[static_cast<std::size_t>(v)] >= level_[static_cast<std::size_t>(e.to)]) continue;
            const std::int64_t d = dfs(e.to, t, std::min(f, e.cap));
            if (d > 0) {
                e.cap -= d;
                graph_[static_cast<std::size_t>(e.to)][static_cast<std::size_t>(e.rev)].cap += d;
                return d;
            }
        }
        return 0;
    }

    std::vector<std::vector<Arc>> graph_;
    std::vector<int> level_;
    std::vector<int> iter_;
};

}  // namespace perciso
