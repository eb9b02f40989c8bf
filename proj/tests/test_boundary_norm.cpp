#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "perciso/boundary_norm.hpp"

using namespace perciso;

namespace {

std::shared_ptr<const ClusterContext> context(int n, double p, std::uint64_t seed, int pad) {
    return ClusterContext::build(std::make_shared<const Config>(sample_config(n, p, seed, pad)));
}

}  // namespace

TEST(Distance, StraightLineAtFullDensity) {
    const auto ctx = context(4, 1.0, 3, 0);
    for (int k = 1; k <= 4; ++k) {
        const auto ex = right_boundary_distance(*ctx, Point{0, 0}, Point{double(k), 0}, DistanceMode::exact_enumeration);
        const auto rel = right_boundary_distance(*ctx, Point{0, 0}, Point{double(k), 0}, DistanceMode::dijkstra_relaxation);
        EXPECT_EQ(ex.value, k - 1);
        EXPECT_EQ(rel.value, k - 1);
        EXPECT_EQ(ex.flag, Exactness::exact);
        EXPECT_EQ(rel.flag, Exactness::relaxed_validated);
        EXPECT_TRUE(is_rightmost(ex.witness));
        EXPECT_EQ(path_weight(ex.witness, *ctx->config, WeightMode::infinite), ex.value);
    }
}

TEST(Distance, SamePointIsZero) {
    const auto ctx = context(3, 1.0, 3, 0);
    for (auto mode : {DistanceMode::exact_enumeration, DistanceMode::dijkstra_relaxation}) {
        const auto r = right_boundary_distance(*ctx, Point{1, 1}, Point{1, 1}, mode);
        EXPECT_EQ(r.value, 0);
        EXPECT_EQ(r.witness.length(), 0u);
    }
}

TEST(Distance, DisconnectedEndpointsAreRejected) {
    const auto ctx = context(3, 1.0, 3, 0);
    EXPECT_THROW(right_boundary_distance(*ctx, Vertex{0, 0}, Vertex{9, 9}, DistanceMode::dijkstra_relaxation), DomainError);
}

TEST(Distance, RelaxationMatchesEnumeration) {
    Xoshiro256 rng(12);
    int validated = 0;
    int failures = 0;
    for (double p : {0.6, 0.8, 1.0})
        for (std::uint64_t seed = 0; seed < 4; ++seed) {
            const auto ctx = context(3, p, seed, 0);
            const Config& c = *ctx->config;
            std::vector<Vertex> trace;
            for (std::size_t i = 0; i < c.vertex_count(); ++i)
                if (ctx->trace[i]) trace.push_back(c.vertex(i));
            for (int k = 0; k < 5; ++k) {
                const Vertex a = trace[rng.below(trace.size())];
                const Vertex b = trace[rng.below(trace.size())];
                const auto ex = right_boundary_distance(*ctx, a, b, DistanceMode::exact_enumeration);
                const auto rel = right_boundary_distance(*ctx, a, b, DistanceMode::dijkstra_relaxation);
                EXPECT_GE(ex.value, 0);
                EXPECT_TRUE(is_rightmost(ex.witness));
                EXPECT_EQ(path_weight(ex.witness, c, WeightMode::infinite), ex.value);
                if (rel.flag == Exactness::relaxed_validated) {
                    ++validated;
                    EXPECT_EQ(rel.value, ex.value) << "p=" << p << " seed=" << seed;
                } else {
                    ++failures;
                }
            }
        }
    EXPECT_GT(validated, 0);
    EXPECT_LT(failures * 20, validated + failures);
}

TEST(Beta, FullDensityAxisDirection) {
    const auto est = estimate_beta(1.0, {1, 0}, {4, 8, 16}, 2, 5);
    ASSERT_EQ(est.scale_means.size(), 3u);
    EXPECT_DOUBLE_EQ(est.scale_means[0], 3.0 / 4.0);
    EXPECT_DOUBLE_EQ(est.scale_means[1], 7.0 / 8.0);
    EXPECT_DOUBLE_EQ(est.beta_hat, 15.0 / 16.0);
    EXPECT_LE(std::abs(est.beta_hat - 1.0), 1.0 / 16);
    EXPECT_EQ(est.stderr_, 0.0);
}

TEST(Beta, SymmetricUnderCoordinateSwap) {
    const auto a = estimate_beta(0.8, {0.8, 0.6}, {8}, 3, 17);
    const auto b = estimate_beta(0.8, {0.6, 0.8}, {8}, 3, 17);
    const auto c = estimate_beta(0.8, {-0.6, 0.8}, {8}, 3, 17);
    EXPECT_EQ(a.beta_hat, b.beta_hat);
    EXPECT_EQ(a.beta_hat, c.beta_hat);
}

TEST(Beta, Errors) {
    EXPECT_THROW(estimate_beta(0.4, {1, 0}, {4}, 1, 1), DomainError);
    EXPECT_THROW(estimate_beta(0.8, {1, 0}, {8, 4}, 1, 1), ArgumentError);
    EXPECT_THROW(estimate_beta(0.8, {0, 0}, {4}, 1, 1), ArgumentError);
    EXPECT_THROW(build_norm_table(0.8, 1, {4}, 1, 1), ArgumentError);
}

TEST(Beta, SupercriticalScalesAreStable) {
    const auto est = estimate_beta(0.85, {1, 0}, {16, 32, 64}, 30, 23);
    ASSERT_EQ(est.scale_means.size(), 3u);
    EXPECT_LT(est.stderr_, 0.05 * est.beta_hat);
    EXPECT_GT(est.beta_hat, 0.0);
    EXPECT_EQ(est.censored, 0);
}

TEST(NormTable, FullDensitySymmetry) {
    const auto t = build_norm_table(1.0, 2, {8}, 1, 1);
    EXPECT_EQ(t.resolution(), 2);
    EXPECT_DOUBLE_EQ(t({1, 0}), 7.0 / 8.0);
    Xoshiro256 rng(4);
    for (int i = 0; i < 500; ++i) {
        const double x = rng.normal();
        const double y = rng.normal();
        const double v = t({x, y});
        for (Point q : {Point{y, x}, Point{-x, y}, Point{x, -y}, Point{-x, -y}, Point{-y, x}, Point{y, -x}, Point{-y, -x}})
            EXPECT_EQ(t(q), v);
        EXPECT_DOUBLE_EQ(t({2.5 * x, 2.5 * y}), 2.5 * v);
    }
}

TEST(NormTable, TriangleInequalityAndConvexity) {
    const auto t = build_norm_table(0.85, 3, {16}, 6, 3);
    RecordProperty("unit_ball_convex", t.unit_ball_convex() ? "yes" : "no");
    Xoshiro256 rng(8);
    int violations = 0;
    for (int i = 0; i < 1000; ++i) {
        const Point u{rng.normal(), rng.normal()};
        const Point v{rng.normal(), rng.normal()};
        if (t(u + v) > t(u) + t(v) + 3 * (t.stderr_at(u) + t.stderr_at(v))) ++violations;
    }
    EXPECT_EQ(violations, 0);
}

TEST(NormTable, SerializationRoundTrip) {
    const NormTable t(0.85, {0.71234567890123, 0.6, 1.0 / 3.0}, {0.01, 0.02, 1e-17}, {16, 32}, 7, 99);
    std::stringstream ss;
    write_norm_table(ss, t);
    const NormTable back = read_norm_table(ss);
    EXPECT_EQ(back, t);
    std::stringstream bad("format 1\np x\n");
    EXPECT_THROW(read_norm_table(bad), DataError);
}

TEST(Geodesic, AxisAlignedAtFullDensity) {
    const auto ctx = context(10, 1.0, 2, 10);
    const auto rep = geodesic_concentration(*ctx, {0, 0}, {8, 0}, 0.1);
    EXPECT_LE(rep.normalized_deviation, 1.0 / 8.0 + 1e-12);
    const auto same = geodesic_concentration(*ctx, {1, 1}, {1, 1}, 0.1);
    EXPECT_EQ(same.normalized_deviation, 0.0);
}

TEST(Geodesic, BoundaryWeightStaysProportional) {
    double min_ratio = 1e300;
    std::vector<double> devs;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto ctx = context(40, 0.85, seed, 40);
        const double ang = 2 * std::numbers::pi * to_unit(hash_key(seed, 1));
        const Point y{32 * std::cos(ang), 32 * std::sin(ang)};
        const Point x{-y.x, -y.y};
        const auto rep = geodesic_concentration(*ctx, x, y, 0.1);
        devs.push_back(rep.normalized_deviation);
        if (rep.witness_length >= 20) min_ratio = std::min(min_ratio, rep.weight_ratio);
    }
    std::sort(devs.begin(), devs.end());
    RecordProperty("median_normalized_deviation", std::to_string(devs[devs.size() / 2]));
    EXPECT_GT(min_ratio, 0.0);
}
