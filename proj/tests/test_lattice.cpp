#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "perciso/lattice.hpp"

using namespace perciso;

namespace {

// Breadth-first cluster sizes, independent of the union-find labelling.
std::size_t bfs_cluster_size(const Config& cfg, Vertex start) {
    std::set<Vertex> seen{start};
    std::queue<Vertex> q;
    q.push(start);
    while (!q.empty()) {
        const Vertex v = q.front();
        q.pop();
        for (Dir d : all_dirs)
            if (cfg.is_open(v, d) && seen.insert(step(v, d)).second) q.push(step(v, d));
    }
    return seen.size();
}

}  // namespace

TEST(Lattice, ExtremeParameters) {
    const Config all = sample_config(2, 1.0, 42, 0);
    EXPECT_EQ(all.open_count(), all.edge_count());
    EXPECT_EQ(all.edge_count(), 2u * 4 * 5);
    const Config none = sample_config(2, 0.0, 42, 0);
    EXPECT_EQ(none.open_count(), 0u);
}

TEST(Lattice, OpenFractionConcentrates) {
    const Config cfg = sample_config(50, 0.6, 7, 0);
    const double frac = static_cast<double>(cfg.open_count()) / static_cast<double>(cfg.edge_count());
    EXPECT_NEAR(frac, 0.6, 0.01);
}

TEST(Lattice, InvalidArguments) {
    EXPECT_THROW(sample_config(0, 0.5, 1, 0), ArgumentError);
    EXPECT_THROW(sample_config(2, 1.5, 1, 0), ArgumentError);
    EXPECT_THROW(sample_config(2, 0.5, 1, -1), ArgumentError);
    EXPECT_THROW(sample_config(40000, 0.5, 1, 0), CapacityError);
}

TEST(Lattice, DeterministicAndCoupled) {
    EXPECT_EQ(sample_config(10, 0.7, 9, 3), sample_config(10, 0.7, 9, 3));
    const Config lo = sample_config(10, 0.6, 9, 5);
    const Config hi = sample_config(10, 0.8, 9, 5);
    const int r = lo.radius();
    for (int y = -r; y <= r; ++y)
        for (int x = -r; x <= r; ++x)
            for (Dir d : all_dirs) {
                EXPECT_TRUE(!lo.is_open({x, y}, d) || hi.is_open({x, y}, d));
            }
    // Shared edges agree across pads.
    const Config small = sample_config(10, 0.7, 9, 0);
    const Config big = sample_config(10, 0.7, 9, 6);
    for (int y = -10; y < 10; ++y)
        for (int x = -10; x < 10; ++x)
            EXPECT_EQ(small.is_open({x, y}, Dir::east), big.is_open({x, y}, Dir::east));
}

TEST(Lattice, GiantGrowsWithP) {
    std::size_t prev = 0;
    for (double p : {0.55, 0.65, 0.75, 0.9, 1.0}) {
        const auto g = giant_component(sample_config(15, p, 21, 15));
        EXPECT_GE(g.size(), prev);
        prev = g.size();
    }
}

TEST(Lattice, ClusterLabelsMatchBreadthFirstSearch) {
    const Config cfg = sample_config(6, 0.55, 13, 2);
    const auto labels = cluster(cfg);
    std::size_t total = 0;
    for (std::size_t i = 0; i < cfg.vertex_count(); ++i) {
        const auto id = labels.label[i];
        EXPECT_LE(id, static_cast<std::int32_t>(i));
        if (id == static_cast<std::int32_t>(i)) total += static_cast<std::size_t>(labels.size_of(id));
        EXPECT_EQ(static_cast<std::size_t>(labels.size_of(id)), bfs_cluster_size(cfg, cfg.vertex(i)));
    }
    EXPECT_EQ(total, cfg.vertex_count());
}

TEST(Lattice, ClusterExtremes) {
    const Config all = sample_config(3, 1.0, 1, 1);
    auto l = cluster(all);
    EXPECT_EQ(l.size_of(l.largest), 81);
    const Config none = sample_config(3, 0.0, 1, 1);
    l = cluster(none);
    EXPECT_EQ(l.size_of(l.largest), 1);
    EXPECT_EQ(l.largest, 0);
}

TEST(Lattice, GiantComponentBasics) {
    EXPECT_EQ(giant_component(sample_config(2, 1.0, 5, 2)).size(), 25u);
    EXPECT_THROW(giant_component(sample_config(10, 0.3, 5, 10)), DomainError);
}

TEST(Lattice, DensityEstimate) {
    const auto one = density_estimate(1.0, 5, 3, 1);
    EXPECT_EQ(one.theta_hat, 1.0);
    const auto a = density_estimate(0.9, 200, 50, 4);
    const auto b = density_estimate(0.9, 200, 50, 4);
    EXPECT_EQ(a.theta_hat, b.theta_hat);
    EXPECT_EQ(a.stderr_, b.stderr_);
    EXPECT_LT(a.stderr_, 0.01);
    EXPECT_THROW(density_estimate(0.9, 5, 0, 1), ArgumentError);
    EXPECT_GE(density_estimate(0.8, 30, 10, 2).theta_hat, density_estimate(0.7, 30, 10, 2).theta_hat);
}

TEST(Lattice, ClusterFractionNearDensity) {
    const double theta = density_estimate(0.6, 100, 20, 99).theta_hat;
    const Config cfg = sample_config(20, 0.6, 3, 20);
    const auto l = cluster(cfg);
    const double frac = static_cast<double>(l.size_of(l.largest)) / static_cast<double>(cfg.vertex_count());
    EXPECT_NEAR(frac, theta, 0.05);
}

TEST(Lattice, GiantDensityAcrossSeeds) {
    const double theta = density_estimate(0.9, 100, 20, 77).theta_hat;
    int good = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        const auto g = giant_component(sample_config(50, 0.9, s, 50));
        if (std::abs(static_cast<double>(g.size()) / (101.0 * 101.0) - theta) <= 0.05) ++good;
    }
    EXPECT_GE(good, 95);
}

TEST(Lattice, NearestClusterVertex) {
    auto ctx = ClusterContext::build(std::make_shared<const Config>(sample_config(3, 1.0, 8, 3)));
    EXPECT_EQ(nearest_cluster_vertex(*ctx, {0.1, 0.2}), (Vertex{0, 0}));
    const Vertex tie = nearest_cluster_vertex(*ctx, {0.5, 0.0});
    const Config& c = *ctx->config;
    const Vertex expect = c.eta({0, 0}) < c.eta({1, 0}) ? Vertex{0, 0} : Vertex{1, 0};
    EXPECT_EQ(tie, expect);
}

TEST(Lattice, NearestVertexMatchesBruteForce) {
    auto ctx = ClusterContext::build(std::make_shared<const Config>(sample_config(12, 0.6, 31, 6)));
    const Config& c = *ctx->config;
    Xoshiro256 rng(2);
    for (int i = 0; i < 300; ++i) {
        const Point x{24 * rng.uniform() - 12, 24 * rng.uniform() - 12};
        double best = 1e300;
        Vertex arg{};
        for (std::size_t k = 0; k < c.vertex_count(); ++k) {
            if (!ctx->trace[k]) continue;
            const Vertex v = c.vertex(k);
            const double d = norm_inf({v.x - x.x, v.y - x.y});
            if (d < best || (d == best && std::pair(c.eta(v), v) < std::pair(c.eta(arg), arg))) {
                best = d;
                arg = v;
            }
        }
        EXPECT_EQ(nearest_cluster_vertex(*ctx, x), arg);
    }
}

TEST(Lattice, NearestVertexTailDecays) {
    auto ctx = ClusterContext::build(std::make_shared<const Config>(sample_config(40, 0.9, 17, 40)));
    Xoshiro256 rng(4);
    std::vector<double> dist;
    for (int i = 0; i < 1000; ++i) {
        const Point x{80 * rng.uniform() - 40, 80 * rng.uniform() - 40};
        const Vertex v = nearest_cluster_vertex(*ctx, x);
        dist.push_back(norm2({v.x - x.x, v.y - x.y}));
    }
    double prev = 2.0;
    for (double r = 0.0; r <= 3.0; r += 0.5) {
        const double tail = static_cast<double>(std::count_if(dist.begin(), dist.end(), [&](double d) { return d > r; })) / 1000.0;
        EXPECT_LE(tail, prev);
        prev = tail;
    }
}

TEST(Lattice, EdgeBoundaryExamples) {
    auto g = giant_component(sample_config(2, 1.0, 1, 2));
    auto center = g.subset({{0, 0}});
    EXPECT_EQ(edge_boundary(center, BoundaryMode::within_box).size(), 4u);
    EXPECT_EQ(edge_boundary(center, BoundaryMode::infinite).size(), 4u);
    auto corner = g.subset({{2, 2}});
    EXPECT_EQ(edge_boundary(corner, BoundaryMode::within_box).size(), 2u);
    EXPECT_EQ(edge_boundary(corner, BoundaryMode::infinite).size(), 4u);
    EXPECT_DOUBLE_EQ(conductance(center, BoundaryMode::within_box).value, 4.0);

    std::vector<Vertex> left;
    for (int y = -2; y <= 2; ++y)
        for (int x = -2; x <= -1; ++x) left.push_back({x, y});
    const auto c = conductance(g.subset(left), BoundaryMode::within_box);
    EXPECT_EQ(c.exact, Fraction(5, 10));
    EXPECT_DOUBLE_EQ(c.value, 0.5);
}

TEST(Lattice, EdgeBoundaryMatchesRecount) {
    const auto g = giant_component(sample_config(10, 0.8, 12, 10));
    Xoshiro256 rng(9);
    const auto mask_all = g.mask();
    for (int trial = 0; trial < 30; ++trial) {
        // Random connected U of size 10 grown from a random giant vertex.
        std::vector<Vertex> u{g.vertices()[rng.below(g.size())]};
        std::set<Vertex> in(u.begin(), u.end());
        for (int guard = 0; u.size() < 10 && guard < 1000; ++guard) {
            const Vertex v = u[rng.below(u.size())];
            const Dir d = all_dirs[rng.below(4)];
            const Vertex w = step(v, d);
            if (g.config().is_open(v, d) && g.config().in_inner(w) && g.contains(w) && in.insert(w).second) u.push_back(w);
        }
        const auto sub = g.subset(u);
        std::set<Edge> inf;
        std::set<Edge> inner;
        for (const auto& v : u)
            for (int k = 0; k < 4; ++k) {
                const Vertex w{v.x + (k == 0) - (k == 2), v.y + (k == 1) - (k == 3)};
                if (in.contains(w) || !g.config().is_open(Edge::between(v, w))) continue;
                inf.insert(Edge::between(v, w));
                if (g.contains(w)) inner.insert(Edge::between(v, w));
            }
        const auto bi = edge_boundary(sub, BoundaryMode::infinite);
        const auto bn = edge_boundary(sub, BoundaryMode::within_box);
        EXPECT_EQ(std::set<Edge>(bi.begin(), bi.end()), inf);
        EXPECT_EQ(std::set<Edge>(bn.begin(), bn.end()), inner);
        EXPECT_TRUE(std::includes(bi.begin(), bi.end(), bn.begin(), bn.end()));
        const auto c = conductance(sub, BoundaryMode::infinite);
        EXPECT_EQ(c.exact, Fraction(static_cast<std::int64_t>(inf.size()), static_cast<std::int64_t>(u.size())));
    }
}

TEST(Lattice, SnapshotRoundTrip) {
    const Config cfg = sample_config(7, 0.63, 1234, 3);
    std::stringstream ss;
    write_snapshot(ss, cfg);
    const std::string bytes = ss.str();
    EXPECT_EQ(bytes.substr(0, 4), "PRCF");
    const Config back = read_snapshot(ss);
    EXPECT_EQ(back, cfg);

    std::stringstream bad("XXXX");
    EXPECT_THROW(read_snapshot(bad), DataError);
    std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
    EXPECT_THROW(read_snapshot(truncated), DataError);
}

TEST(Lattice, SubgraphRejectsForeignVertices) {
    const auto g = giant_component(sample_config(3, 1.0, 1, 1));
    EXPECT_THROW(g.subset({{4, 4}}), DomainError);
    const auto dup = g.subset({{0, 0}, {0, 0}, {1, 0}});
    EXPECT_EQ(dup.size(), 2u);
}
