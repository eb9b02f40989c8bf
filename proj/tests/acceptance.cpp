// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.
#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "perciso/harness.hpp"

using namespace perciso;
namespace fs = std::filesystem;

namespace {

constexpr double c1_max_seconds = 60;
constexpr int c1_max_length = 8;
constexpr int c3_min_instances = 100;
constexpr int c4_min_pairs = 200;
constexpr double c4_max_failure_rate = 0.05;
constexpr double c4_max_seconds = 600;
constexpr int c5_largest_scale = 32;
constexpr int c6_min_instances = 50;
constexpr int c6_max_vertices = 22;
constexpr double c7_low = 0.9;
constexpr double c7_high = 1.1;
constexpr double c7_predicted_tol = 1e-3;
constexpr double c7_max_seconds = 900;
constexpr double c8_phi_max = 1.0 + 1e-3;
constexpr double c8_duality_tol = 0.02;
constexpr double c8_alpha = 0.25;
constexpr int c10_seeds = 10;

int failures = 0;

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void report(int id, bool pass, const std::string& detail) {
    std::printf("criterion %d: %s | %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

template <class... T>
std::string fmt(const char* f, T... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// --- oracles ---------------------------------------------------------------

double angle_deg(Vertex from, Vertex to) {
    const double a = std::atan2(to.y - from.y, to.x - from.x) * 180.0 / std::numbers::pi;
    return a < 0 ? a + 360.0 : a;
}

// Right boundary as the neighbours strictly inside the counter-clockwise sweep
// from the reversed incoming edge to the outgoing edge.
std::set<OrientedEdge> swept_boundary(const std::vector<Vertex>& v, bool circuit) {
    std::set<OrientedEdge> out;
    auto add = [&](Vertex prev, Vertex at, Vertex next) {
        const double a_in = angle_deg(at, prev);
        double sweep = std::fmod(angle_deg(at, next) - a_in + 360.0, 360.0);
        if (sweep == 0.0) sweep = 360.0;
        for (Vertex w : {Vertex{at.x + 1, at.y}, Vertex{at.x, at.y + 1}, Vertex{at.x - 1, at.y}, Vertex{at.x, at.y - 1}}) {
            const double delta = std::fmod(angle_deg(at, w) - a_in + 360.0, 360.0);
            if (delta > 0.0 && delta < sweep) out.insert({at, *direction_between(at, w)});
        }
    };
    const std::size_t m = v.size() - 1;
    for (std::size_t i = 1; i < m; ++i) add(v[i - 1], v[i], v[i + 1]);
    if (circuit) add(v[m - 1], v[0], v[1]);
    return out;
}

bool swept_rightmost(const std::vector<Vertex>& v) {
    std::set<OrientedEdge> used;
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
        if (!used.insert({v[i], *direction_between(v[i], v[i + 1])}).second) return false;
    const auto rb = swept_boundary(v, v.size() > 1 && v.front() == v.back());
    return std::none_of(used.begin(), used.end(), [&](const auto& e) { return rb.contains(e); });
}

double segment_distance(Point q, Point a, Point b) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double l2 = dx * dx + dy * dy;
    double t = l2 > 0 ? ((q.x - a.x) * dx + (q.y - a.y) * dy) / l2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(q.x - a.x - t * dx, q.y - a.y - t * dy);
}

// Closed curve plus its odd-crossing interior, by ray casting.
bool in_closed_curve(const std::vector<Point>& ring, Point q) {
    const std::size_t m = ring.size();
    for (std::size_t i = 0; i < m; ++i)
        if (segment_distance(q, ring[i], ring[(i + 1) % m]) < 1e-9) return true;
    bool inside = false;
    for (std::size_t i = 0; i < m; ++i) {
        const Point a = ring[i];
        const Point b = ring[(i + 1) % m];
        if ((a.y > q.y) != (b.y > q.y)) {
            const double x = a.x + (q.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (x > q.x) inside = !inside;
        }
    }
    return inside;
}

struct BruteCheeger {
    Fraction capped{0};
    Fraction uncapped{0};
};

BruteCheeger brute_cheeger(const Graph& g) {
    const int n = g.size();
    std::vector<std::uint32_t> nbr(static_cast<std::size_t>(n), 0);
    for (int v = 0; v < n; ++v)
        for (int w : g.adj[static_cast<std::size_t>(v)]) nbr[static_cast<std::size_t>(v)] |= 1u << w;
    const std::uint32_t full = n == 32 ? ~0u : (1u << n) - 1;
    std::int64_t cb = 1, cs = 0, ub = 1, us = 0;  // best ratios as b/s, s = 0 means unset
    for (std::uint32_t h = 1; h < full; ++h) {
        std::int64_t b = 0;
        for (std::uint32_t rest = h; rest; rest &= rest - 1)
            b += std::popcount(nbr[static_cast<std::size_t>(std::countr_zero(rest))] & ~h);
        const std::int64_t s = std::popcount(h);
        if (us == 0 || b * us < ub * s) ub = b, us = s;
        if (2 * s <= n && (cs == 0 || b * cs < cb * s)) cb = b, cs = s;
    }
    return {Fraction(cb, cs), Fraction(ub, us)};
}

Subgraph grow_connected(const Subgraph& g, Xoshiro256& rng, std::size_t target) {
    std::vector<Vertex> u{g.vertices()[rng.below(g.size())]};
    std::set<Vertex> in(u.begin(), u.end());
    for (int guard = 0; u.size() < target && guard < 50000; ++guard) {
        const Vertex v = u[rng.below(u.size())];
        const Dir d = all_dirs[rng.below(4)];
        const Vertex w = step(v, d);
        if (g.config().is_open(v, d) && g.contains(w) && in.insert(w).second) u.push_back(w);
    }
    return g.subset(u);
}

fs::path scratch(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("perciso-acceptance-" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

// --- criteria ----------------------------------------------------------------

void criterion1() {
    const auto t0 = Clock::now();
    std::size_t checked = 0, bad = 0;
    std::vector<Vertex> v{{0, 0}};
    std::function<void()> rec = [&] {
        if (v.size() >= 2) {
            const LatticePath p(v);
            const bool rm = swept_rightmost(v);
            if (rm != is_rightmost(p)) ++bad;
            if (rm) {
                ++checked;
                const Interface iface = path_to_interface(p);
                std::set<OrientedEdge> cut;
                std::vector<OrientedEdge> walked;
                for (const auto& el : iface.elements) {
                    if (el.cut) {
                        cut.insert(el.edge);
                    } else {
                        walked.push_back(el.edge);
                    }
                }
                const auto oracle = swept_boundary(v, p.is_circuit());
                if (!(interface_to_path(iface) == p) || walked != p.edges() || cut != oracle || right_boundary(p).edges() != oracle) ++bad;
            }
        }
        if (static_cast<int>(v.size()) - 1 == c1_max_length) return;
        for (Dir d : all_dirs) {
            v.push_back(step(v.back(), d));
            rec();
            v.pop_back();
        }
    };
    rec();
    const double secs = seconds_since(t0);
    report(1, bad == 0 && checked > 0 && secs < c1_max_seconds,
           fmt("%zu right-most paths of length <= %d, %zu failures, %.1f s (limit %.0f s)", checked, c1_max_length, bad, secs, c1_max_seconds));
}

void criterion2() {
    int bad = 0;
    for (Dir in : all_dirs)
        for (Dir out : all_dirs) {
            const Vertex v{0, 0};
            const Vertex prev = step(v, opposite(in));
            const Vertex next = step(v, out);
            const int cross = dx(in) * dy(out) - dy(in) * dx(out);
            const int dotp = dx(in) * dx(out) + dy(in) * dy(out);
            const std::size_t expected = cross < 0 ? 0 : dotp > 0 ? 1 : cross > 0 ? 2 : 3;  // right, straight, left, U-turn
            const auto rb = right_boundary_at(prev, v, next);
            if (rb.size() != expected) ++bad;
            if (std::set<OrientedEdge>(rb.begin(), rb.end()) != swept_boundary({prev, v, next}, false)) ++bad;
        }
    report(2, bad == 0, fmt("16 direction pairs, %d mismatches against {right 0, straight 1, left 2, U-turn 3}", bad));
}

void criterion3() {
    Xoshiro256 rng(2024);
    int tested = 0, bad = 0;
    for (double p : {0.7, 0.8, 1.0})
        for (std::uint64_t seed = 0; seed < 12; ++seed) {
            const int n = 4 + static_cast<int>(seed % 5);
            const auto g = giant_component(sample_config(n, p, seed + 100, n));
            for (int k = 0; k < 3; ++k) {
                const auto u = grow_connected(g, rng, 1 + rng.below(45));
                const auto dec = circuit_decomposition(u);
                bool ok = verify_decomposition(u, dec).all() && dec.outer.signed_area > 0;
                for (const auto& c : dec.inner) ok = ok && c.signed_area < 0;

                // Boundary edges, computed directly, against the disjoint union of weights.
                std::vector<Edge> boundary;
                for (const auto& x : u.vertices())
                    for (Dir d : all_dirs)
                        if (u.config().is_open(x, d) && !u.contains(step(x, d))) boundary.push_back(Edge::between(x, step(x, d)));
                std::sort(boundary.begin(), boundary.end());
                std::vector<Edge> weights(dec.outer.weight.begin(), dec.outer.weight.end());
                for (const auto& c : dec.inner) weights.insert(weights.end(), c.weight.begin(), c.weight.end());
                std::sort(weights.begin(), weights.end());
                ok = ok && weights == boundary;

                // Hull identity on the cluster trace.
                const auto& cfg = u.config();
                for (std::size_t i = 0; i < cfg.vertex_count(); ++i) {
                    if (!u.context().trace[i]) continue;
                    const Vertex x = cfg.vertex(i);
                    const Point q{static_cast<double>(x.x), static_cast<double>(x.y)};
                    bool in = in_closed_curve(dec.outer.curve.points, q);
                    for (const auto& c : dec.inner) in = in && !in_closed_curve(c.curve.points, q);
                    if (in != u.contains(x)) ok = false;
                }
                bad += ok ? 0 : 1;
                ++tested;
            }
        }
    report(3, bad == 0 && tested >= c3_min_instances, fmt("%d random connected subgraphs (n <= 8), %d failures", tested, bad));
}

void criterion4() {
    const auto t0 = Clock::now();
    Xoshiro256 rng(404);
    int pairs = 0, failed = 0, mismatched = 0;
    const int per_p = c4_min_pairs / 3 + 4;
    for (double p : {0.6, 0.8, 1.0}) {
        const int start = pairs;
        for (std::uint64_t seed = 0; pairs - start < per_p && seed < 200; ++seed) {
            const auto ctx = ClusterContext::build(std::make_shared<const Config>(sample_config(3, p, seed, 0)));
            const Config& c = *ctx->config;
            std::vector<Vertex> trace;
            for (std::size_t i = 0; i < c.vertex_count(); ++i)
                if (ctx->trace[i]) trace.push_back(c.vertex(i));
            if (trace.size() < 2) continue;
            for (int k = 0; k < 6; ++k) {
                const Vertex a = trace[rng.below(trace.size())];
                const Vertex b = trace[rng.below(trace.size())];
                const auto ex = right_boundary_distance(*ctx, a, b, DistanceMode::exact_enumeration);
                const auto rel = right_boundary_distance(*ctx, a, b, DistanceMode::dijkstra_relaxation);
                ++pairs;
                if (rel.flag != Exactness::relaxed_validated) {
                    ++failed;
                } else if (rel.value != ex.value) {
                    ++mismatched;
                }
            }
        }
    }
    const double secs = seconds_since(t0);
    const double rate = pairs ? static_cast<double>(failed) / pairs : 1.0;
    report(4, pairs >= c4_min_pairs && mismatched == 0 && rate < c4_max_failure_rate && secs < c4_max_seconds,
           fmt("%d pairs in 7x7 boxes, %d value mismatches, validation-failure rate %.3f (limit %.2f), %.1f s", pairs, mismatched, rate,
               c4_max_failure_rate, secs));
}

void criterion5() {
    const auto est = estimate_beta(1.0, {1, 0}, {8, 16, c5_largest_scale}, 2, 5);
    const double err = std::abs(est.beta_hat - 1.0);
    const double bias = 1.0 / c5_largest_scale;
    const bool exact_bias = est.beta_hat == static_cast<double>(c5_largest_scale - 1) / c5_largest_scale;

    const auto table = build_norm_table(1.0, 4, {8}, 1, 1);
    Xoshiro256 rng(55);
    int asym = 0;
    for (int i = 0; i < 2000; ++i) {
        const double x = rng.normal();
        const double y = rng.normal();
        const double v = table({x, y});
        for (Point q : {Point{y, x}, Point{-x, y}, Point{x, -y}, Point{-x, -y}, Point{-y, x}, Point{y, -x}, Point{-y, -x}})
            if (table(q) != v) ++asym;
    }
    report(5, err <= bias && exact_bias && asym == 0,
           fmt("beta_hat(e1) = %.6f, |err| = %.6f <= 1/%d, %d symmetry violations in 2000 directions", est.beta_hat, err, c5_largest_scale,
               asym));
}

void criterion6() {
    int tested = 0, bad = 0;
    for (double p : {0.6, 0.75, 0.9, 1.0})
        for (std::uint64_t seed = 0; seed < 16; ++seed) {
            auto cfg = std::make_shared<const Config>(sample_config(3, p, seed + 500, 0));
            const auto giant = giant_component(cfg);
            Xoshiro256 rng(seed * 31 + 7);
            const auto target = 4 + rng.below(c6_max_vertices - 3);
            const auto u = grow_connected(giant, rng, target);
            if (u.size() < 2 || u.size() > static_cast<std::size_t>(c6_max_vertices)) continue;
            const HostGraph host = host_graph(u);
            const auto brute = brute_cheeger(host.graph);
            SearchOptions opt;
            opt.budget = 2000;
            opt.restarts = 4;
            opt.seed = seed;
            const auto res = cheeger_search(host.graph, opt);
            const auto lower = cheeger_lower_uncapped(host.graph);
            if (res.phi_upper != brute.capped || lower.value > res.phi_upper || res.phi_lower > res.phi_upper) ++bad;
            ++tested;
        }
    const Graph c4 = Graph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
    const auto ex = cheeger_exact(c4);
    const auto lo = cheeger_lower_uncapped(c4);
    const bool cycle_ok = ex.phi_upper == Fraction(1) && lo.value == Fraction(2, 3);
    report(6, bad == 0 && tested >= c6_min_instances && cycle_ok,
           fmt("%d hosts <= %d vertices, %d sandwich failures; 4-cycle lower %s exact %s", tested, c6_max_vertices, bad,
               (std::ostringstream() << lo.value).str().c_str(), (std::ostringstream() << ex.phi_upper).str().c_str()));
}

void criterion7() {
    const auto t0 = Clock::now();
    ExperimentSpec spec;
    spec.p = 1.0;
    spec.ns = {20, 40};
    spec.seeds = {0, 1};
    spec.norm_override = "euclidean";
    spec.cache_dir = scratch("c7");
    const auto t = run_scaling(spec);
    double lo = 1e9, hi = -1e9;
    bool ok = !t.rows.empty();
    for (const auto& r : t.rows) {
        ok = ok && r.status == "ok";
        lo = std::min(lo, r.n_phi_upper);
        hi = std::max(hi, r.n_phi_upper);
    }
    const double secs = seconds_since(t0);
    ok = ok && lo >= c7_low && hi <= c7_high && std::abs(t.predicted - 1.0) <= c7_predicted_tol && secs < c7_max_seconds;
    report(7, ok, fmt("n*Phi in [%.4f, %.4f] for n in {20, 40}; predicted %.6f (family %s); %.1f s", lo, hi, t.predicted, t.phi_family.c_str(), secs));
}

void criterion8() {
    const Norm norm = Norm::euclidean();
    const auto r0 = solve_restricted(norm, 0.0);
    bool below_all = true;
    double quarter = std::nan("");
    for (const auto& f : r0.families) {
        if (r0.phi_hat > f.value) below_all = false;
        if (f.family == "quarter-wulff") quarter = f.value;
    }
    const bool phi_ok = r0.phi_hat <= c8_phi_max && r0.optimizer_family != "quarter-wulff";

    const std::vector<double> alphas{-0.5, -c8_alpha, 0.0, c8_alpha, 0.5, 1.0};
    const auto sweep = solve_alpha_sweep(norm, alphas);
    bool monotone = true;
    for (std::size_t i = 1; i < sweep.size(); ++i) monotone = monotone && sweep[i].phi_hat <= sweep[i - 1].phi_hat;
    const double resid = duality_residual(c8_alpha, sweep[3].phi_hat, sweep[1].phi_hat);

    report(8, phi_ok && below_all && monotone && resid <= c8_duality_tol,
           fmt("phi(0) = %.6f via %s (quarter-disc %.4f), below all candidates %s, duality residual %.4f at alpha %.2f, monotone %s",
               r0.phi_hat, r0.optimizer_family.c_str(), quarter, below_all ? "yes" : "no", resid, c8_alpha, monotone ? "yes" : "no"));
}

void criterion9() {
    Xoshiro256 rng(909);
    double c = 1e300;
    int sampled = 0, nonpositive = 0;
    for (double p : {0.8, 0.9, 1.0})
        for (std::uint64_t seed = 0; seed < 12; ++seed) {
            const auto g = giant_component(sample_config(12, p, seed + 900, 12));
            for (int k = 0; k < 6; ++k) {
                const auto u = grow_connected(g, rng, 2 + rng.below(250));
                const auto dv = dper_vol(u);
                ++sampled;
                if (dv.dper <= 0 || dv.vol_area <= 0) {
                    ++nonpositive;
                    continue;
                }
                c = std::min(c, static_cast<double>(dv.dper) / std::sqrt(dv.vol_area));
            }
        }
    report(9, nonpositive == 0 && c > 0 && sampled > 0,
           fmt("%d sampled U at p in {0.8, 0.9, 1.0}; fitted c = %.4f; %d positivity violations", sampled, c, nonpositive));
}

void criterion10() {
    const auto t0 = Clock::now();
    ExperimentSpec spec;
    spec.p = 0.85;
    spec.ns = {32, 128};
    for (int s = 0; s < c10_seeds; ++s) spec.seeds.push_back(static_cast<std::uint64_t>(s));
    spec.cache_dir = scratch("c10");
    const auto t = run_scaling(spec);
    const auto [m32, sd32] = t.stats_at(32);
    const auto [m128, sd128] = t.stats_at(128);
    report(10, sd128 <= sd32,
           fmt("sd(n*Phi) %.4f at n=128 vs %.4f at n=32; mean n*Phi %.4f / %.4f; continuum prediction %.4f (reported only); %.1f s", sd128,
               sd32, m128, m32, t.predicted, seconds_since(t0)));
}

}  // namespace

int main() {
    const std::vector<std::function<void()>> all{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                 criterion6, criterion7, criterion8, criterion9, criterion10};
    for (std::size_t i = 0; i < all.size(); ++i) {
        try {
            all[i]();
        } catch (const std::exception& e) {
            report(static_cast<int>(i + 1), false, std::string("exception: ") + e.what());
        }
    }
    std::printf("%d of %zu criteria failed\n", failures, all.size());
    return failures == 0 ? 0 : 1;
}
