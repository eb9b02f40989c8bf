#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "perciso/error.hpp"
#include "perciso/geometry.hpp"
#include "perciso/lattice.hpp"
#include "perciso/rightmost.hpp"

namespace perciso {

enum class DistanceMode { exact_enumeration, dijkstra_relaxation };
enum class Exactness { exact, relaxed_validated, relaxed_unvalidated };

inline const char* to_string(Exactness e) {
    switch (e) {
        case Exactness::exact: return "exact";
        case Exactness::relaxed_validated: return "relaxed-validated";
        case Exactness::relaxed_unvalidated: return "relaxed-unvalidated";
    }
    return "?";
}

struct DistanceResult {
    std::int64_t value = 0;
    LatticePath witness;
    Exactness flag = Exactness::exact;
    std::int64_t relaxed_cost = 0;  // additive turn cost found by the relaxation
    Vertex from;
    Vertex to;
};

struct DistanceOptions {
    std::uint64_t node_budget = 200'000'000;
};

namespace detail {

inline std::size_t state_id(const Config& cfg, Vertex v, Dir d) { return cfg.index(v) * 4 + static_cast<std::size_t>(d); }

inline int open_turn_cost(const Config& cfg, Vertex prev, Vertex v, Vertex next) {
    int c = 0;
    for (const auto& e : right_boundary_at(prev, v, next)) c += cfg.is_open(e);
    return c;
}

/// Least additive turn cost over open oriented-edge walks from s to t.
inline std::optional<DistanceResult> relaxed_search(const Config& cfg, Vertex s, Vertex t) {
    const std::size_t states = cfg.vertex_count() * 4;
    constexpr auto inf = std::numeric_limits<std::int64_t>::max();
    std::vector<std::int64_t> dist(states, inf);
    std::vector<std::int64_t> parent(states, -1);
    using Item = std::pair<std::int64_t, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (Dir d : all_dirs)
        if (cfg.is_open(s, d)) {
            const auto id = state_id(cfg, s, d);
            dist[id] = 0;
            pq.push({0, id});
        }
    while (!pq.empty()) {
        const auto [c, id] = pq.top();
        pq.pop();
        if (c != dist[id]) continue;
        const Vertex from = cfg.vertex(id / 4);
        const Dir dir = static_cast<Dir>(id % 4);
        const Vertex v = step(from, dir);
        if (v == t) {
            std::vector<Vertex> rev{v};
            for (std::int64_t k = static_cast<std::int64_t>(id); k >= 0; k = parent[static_cast<std::size_t>(k)])
                rev.push_back(cfg.vertex(static_cast<std::size_t>(k) / 4));
            DistanceResult r;
            r.witness = LatticePath(std::vector<Vertex>(rev.rbegin(), rev.rend()));
            r.relaxed_cost = c;
            return r;
        }
        for (Dir nd : all_dirs) {
            if (!cfg.is_open(v, nd)) continue;
            const auto nid = state_id(cfg, v, nd);
            const std::int64_t nc = c + open_turn_cost(cfg, from, v, step(v, nd));
            if (nc < dist[nid]) {
                dist[nid] = nc;
                parent[nid] = static_cast<std::int64_t>(id);
                pq.push({nc, nid});
            }
        }
    }
    return std::nullopt;
}

/// Depth-first branch and bound over open right-most paths from s to t.
class ExactSearch {
public:
    ExactSearch(const Config& cfg, Vertex s, Vertex t, std::uint64_t budget)
        : cfg_(cfg), s_(s), t_(t), budget_(budget), used_(cfg.vertex_count() * 4, 0), in_rb_(cfg.vertex_count() * 4, 0),
          mult_(cfg.vertex_count() * 4, 0) {}

    std::optional<std::pair<std::int64_t, std::vector<Vertex>>> run() {
        path_.push_back(s_);
        for (Dir d : order(std::nullopt, s_)) extend(d);
        if (best_ == std::numeric_limits<std::int64_t>::max()) return std::nullopt;
        return std::pair{best_, best_path_};
    }

private:
    // Unoriented edge id: the edge leaving its smaller endpoint east or north.
    std::size_t undirected_id(const OrientedEdge& e) const {
        if (e.dir == Dir::east || e.dir == Dir::north) return state_id(cfg_, e.from, e.dir);
        return state_id(cfg_, e.to(), opposite(e.dir));
    }

    std::vector<Dir> order(std::optional<Vertex> prev, Vertex v) const {
        std::vector<std::pair<int, Dir>> c;
        for (Dir d : all_dirs) {
            if (!cfg_.is_open(v, d)) continue;
            c.push_back({prev ? open_turn_cost(cfg_, *prev, v, step(v, d)) : 0, d});
        }
        std::stable_sort(c.begin(), c.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<Dir> out;
        for (const auto& [k, d] : c) out.push_back(d);
        return out;
    }

    void extend(Dir d) {
        if (++nodes_ > budget_) throw CapacityError("exact enumeration exceeded its node budget");
        const Vertex v = path_.back();
        const OrientedEdge e{v, d};
        const auto eid = state_id(cfg_, v, d);
        if (used_[eid] || in_rb_[eid]) return;

        std::vector<OrientedEdge> rb;
        if (path_.size() >= 2) rb = right_boundary_at(path_[path_.size() - 2], v, e.to());
        for (const auto& r : rb)
            if (cfg_.in_box(r.to()) && used_[state_id(cfg_, r.from, r.dir)]) return;

        std::int64_t added = 0;
        for (const auto& r : rb) {
            if (cfg_.in_box(r.to())) ++in_rb_[state_id(cfg_, r.from, r.dir)];
            if (cfg_.is_open(r) && mult_[undirected_id(r)]++ == 0) ++added;
        }
        cost_ += added;
        used_[eid] = 1;
        path_.push_back(e.to());

        if (cost_ < best_) {
            if (e.to() == t_) {
                best_ = cost_;
                best_path_ = path_;
            } else {
                for (Dir nd : order(v, e.to())) {
                    extend(nd);
                    if (cost_ >= best_) break;
                }
            }
        }

        path_.pop_back();
        used_[eid] = 0;
        cost_ -= added;
        for (const auto& r : rb) {
            if (cfg_.in_box(r.to())) --in_rb_[state_id(cfg_, r.from, r.dir)];
            if (cfg_.is_open(r)) --mult_[undirected_id(r)];
        }
    }

    const Config& cfg_;
    Vertex s_;
    Vertex t_;
    std::uint64_t budget_;
    std::uint64_t nodes_ = 0;
    std::vector<std::uint8_t> used_;
    std::vector<std::uint16_t> in_rb_;
    std::vector<std::uint16_t> mult_;
    std::vector<Vertex> path_;
    std::int64_t cost_ = 0;
    std::int64_t best_ = std::numeric_limits<std::int64_t>::max();
    std::vector<Vertex> best_path_;
};

}  // namespace detail

/// Right-boundary distance between lattice vertices of the cluster trace.
inline DistanceResult right_boundary_distance(const ClusterContext& ctx, Vertex s, Vertex t, DistanceMode mode,
                                              const DistanceOptions& opt = {}) {
    const Config& cfg = *ctx.config;
    if (!ctx.in_trace(s) || !ctx.in_trace(t)) throw DomainError("no open right-most path");
    if (s == t) {
        DistanceResult r;
        r.witness = LatticePath({s});
        r.from = s;
        r.to = t;
        return r;
    }
    if (mode == DistanceMode::exact_enumeration) {
        auto found = detail::ExactSearch(cfg, s, t, opt.node_budget).run();
        if (!found) throw DomainError("no open right-most path");
        DistanceResult r;
        r.value = found->first;
        r.witness = LatticePath(std::move(found->second));
        r.flag = Exactness::exact;
        r.relaxed_cost = r.value;
        r.from = s;
        r.to = t;
        return r;
    }
    auto found = detail::relaxed_search(cfg, s, t);
    if (!found) throw DomainError("no open right-most path");
    DistanceResult r = std::move(*found);
    r.from = s;
    r.to = t;
    const bool rightmost = is_rightmost(r.witness);
    const std::int64_t weight = path_weight(r.witness, cfg, WeightMode::infinite);
    if (rightmost && weight == r.relaxed_cost) {
        r.flag = Exactness::relaxed_validated;
        r.value = weight;
    } else {
        r.flag = Exactness::relaxed_unvalidated;
        r.value = rightmost ? weight : r.relaxed_cost;
    }
    return r;
}

/// Same, between the trace vertices nearest to two points of the plane.
inline DistanceResult right_boundary_distance(const ClusterContext& ctx, Point x, Point y, DistanceMode mode,
                                              const DistanceOptions& opt = {}) {
    return right_boundary_distance(ctx, nearest_cluster_vertex(ctx, x), nearest_cluster_vertex(ctx, y), mode, opt);
}

/// Representative of a direction's orbit under the square symmetries: the
/// unit vector (cos t, sin t) with t in [0, pi/4].
inline Point canonical_direction(Point v) {
    double a = std::abs(v.x);
    double b = std::abs(v.y);
    if (b > a) std::swap(a, b);
    const double len = std::hypot(a, b);
    if (!(len > 0.0)) throw ArgumentError("direction must be non-zero");
    return {a / len, b / len};
}

struct BetaEstimate {
    double beta_hat = 0.0;
    double stderr_ = 0.0;
    std::vector<int> scales;
    std::vector<double> scale_means;
    std::vector<double> scale_stderrs;
    int censored = 0;
    int validation_failures = 0;
    int samples = 0;
};

namespace detail {

inline std::pair<double, double> mean_stderr(const std::vector<double>& xs) {
    if (xs.empty()) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    if (xs.size() < 2) return {m, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return {m, std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()))};
}

}  // namespace detail

/// b([0], [s v]) / s averaged over replicas, for each scale s. Each replica
/// samples a fresh box of radius s padded by s.
inline BetaEstimate estimate_beta(double p, Point direction, const std::vector<int>& scales, int replicas, std::uint64_t seed) {
    if (!(p > 0.5)) throw DomainError("supercritical parameter required");
    if (scales.empty() || replicas <= 0) throw ArgumentError("need at least one scale and one replica");
    for (std::size_t i = 0; i < scales.size(); ++i)
        if (scales[i] < 1 || (i > 0 && scales[i] <= scales[i - 1])) throw ArgumentError("scales must be positive and increasing");
    const Point v = canonical_direction(direction);
    BetaEstimate out;
    out.scales = scales;
    std::vector<double> last;
    for (int s : scales) {
        std::vector<double> vals;
        for (int r = 0; r < replicas; ++r) {
            ++out.samples;
            try {
                auto cfg = std::make_shared<const Config>(
                    sample_config(s, p, hash_key(seed, Stream::replica, static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(r)), s));
                const auto ctx = ClusterContext::build(cfg);
                const auto res = right_boundary_distance(*ctx, Point{0.0, 0.0}, Point{s * v.x, s * v.y}, DistanceMode::dijkstra_relaxation);
                if (res.flag != Exactness::relaxed_validated) ++out.validation_failures;
                vals.push_back(static_cast<double>(res.value) / s);
            } catch (const DomainError&) {
                ++out.censored;
            }
        }
        const auto [m, se] = detail::mean_stderr(vals);
        out.scale_means.push_back(m);
        out.scale_stderrs.push_back(se);
        last = std::move(vals);
    }
    if (last.empty()) throw DomainError("every sample at the largest scale was censored");
    std::tie(out.beta_hat, out.stderr_) = detail::mean_stderr(last);
    return out;
}

// ---------------------------------------------------------------------------

/// Estimated norm on a first-octant angular grid, extended by the square
/// symmetries and positive homogeneity.
class NormTable {
public:
    static constexpr int format_version = 1;

    NormTable() = default;
    NormTable(double p, std::vector<double> values, std::vector<double> stderrs, std::vector<int> scales, int replicas, std::uint64_t seed)
        : p_(p), values_(std::move(values)), stderrs_(std::move(stderrs)), scales_(std::move(scales)), replicas_(replicas), seed_(seed) {
        if (values_.size() < 2 || values_.size() != stderrs_.size()) throw ArgumentError("norm table needs at least two angles");
        for (double v : values_)
            if (!(v > 0.0)) throw DomainError("norm table values must be positive");
    }

    [[nodiscard]] double p() const { return p_; }
    [[nodiscard]] int resolution() const { return static_cast<int>(values_.size()); }
    [[nodiscard]] const std::vector<double>& values() const { return values_; }
    [[nodiscard]] const std::vector<double>& stderrs() const { return stderrs_; }
    [[nodiscard]] const std::vector<int>& scales() const { return scales_; }
    [[nodiscard]] int replicas() const { return replicas_; }
    [[nodiscard]] std::uint64_t seed() const { return seed_; }

    [[nodiscard]] double angle(int k) const { return k * (std::numbers::pi / 4) / (resolution() - 1); }

    [[nodiscard]] double operator()(Point x) const {
        double a = std::abs(x.x);
        double b = std::abs(x.y);
        if (b > a) std::swap(a, b);
        if (a == 0.0) return 0.0;
        const double t = std::atan2(b, a) / (std::numbers::pi / 4) * (resolution() - 1);
        const int k = std::min(static_cast<int>(t), resolution() - 2);
        const double f = t - k;
        return std::hypot(a, b) * ((1.0 - f) * values_[static_cast<std::size_t>(k)] + f * values_[static_cast<std::size_t>(k) + 1]);
    }

    [[nodiscard]] double stderr_at(Point x) const {
        double a = std::abs(x.x);
        double b = std::abs(x.y);
        if (b > a) std::swap(a, b);
        if (a == 0.0) return 0.0;
        const double t = std::atan2(b, a) / (std::numbers::pi / 4) * (resolution() - 1);
        const int k = std::min(static_cast<int>(t), resolution() - 2);
        const double f = t - k;
        return std::hypot(a, b) * ((1.0 - f) * stderrs_[static_cast<std::size_t>(k)] + f * stderrs_[static_cast<std::size_t>(k) + 1]);
    }

    /// Convexity of the unit ball, checked on a polygon through its boundary.
    [[nodiscard]] bool unit_ball_convex(int samples = 720, double tol = 1e-12) const {
        std::vector<Point> pts;
        for (int i = 0; i < samples; ++i) {
            const double t = 2 * std::numbers::pi * i / samples;
            const Point u{std::cos(t), std::sin(t)};
            pts.push_back((1.0 / (*this)(u)) * u);
        }
        for (int i = 0; i < samples; ++i) {
            const Point a = pts[static_cast<std::size_t>(i)];
            const Point b = pts[static_cast<std::size_t>((i + 1) % samples)];
            const Point c = pts[static_cast<std::size_t>((i + 2) % samples)];
            if (cross(b - a, c - b) < -tol) return false;
        }
        return true;
    }

    friend bool operator==(const NormTable&, const NormTable&) = default;

private:
    double p_ = 0.0;
    std::vector<double> values_;
    std::vector<double> stderrs_;
    std::vector<int> scales_;
    int replicas_ = 0;
    std::uint64_t seed_ = 0;
};

inline NormTable build_norm_table(double p, int resolution, const std::vector<int>& scales, int replicas, std::uint64_t seed) {
    if (resolution < 2) throw ArgumentError("angular resolution must be at least 2");
    std::vector<double> values;
    std::vector<double> errs;
    for (int k = 0; k < resolution; ++k) {
        const double t = k * (std::numbers::pi / 4) / (resolution - 1);
        const auto est = estimate_beta(p, {std::cos(t), std::sin(t)}, scales, replicas, seed);
        values.push_back(est.beta_hat);
        errs.push_back(est.stderr_);
    }
    return NormTable(p, std::move(values), std::move(errs), scales, replicas, seed);
}

namespace detail {

inline std::string shortest(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw DataError("bad number '" + s + "'");
    return v;
}

}  // namespace detail

inline void write_norm_table(std::ostream& os, const NormTable& t) {
    os << "format " << NormTable::format_version << '\n';
    os << "p " << detail::shortest(t.p()) << '\n';
    os << "resolution " << t.resolution() << '\n';
    os << "scales";
    for (int s : t.scales()) os << ' ' << s;
    os << '\n';
    os << "replicas " << t.replicas() << '\n';
    os << "seed " << t.seed() << '\n';
    for (int k = 0; k < t.resolution(); ++k)
        os << detail::shortest(t.angle(k)) << ' ' << detail::shortest(t.values()[static_cast<std::size_t>(k)]) << ' '
           << detail::shortest(t.stderrs()[static_cast<std::size_t>(k)]) << '\n';
}

inline NormTable read_norm_table(std::istream& is) {
    auto line = [&](const std::string& key) {
        std::string l;
        if (!std::getline(is, l)) throw DataError("truncated norm table");
        std::istringstream ls(l);
        std::string k;
        ls >> k;
        if (k != key) throw DataError("expected '" + key + "' in norm table");
        std::vector<std::string> rest;
        for (std::string w; ls >> w;) rest.push_back(w);
        return rest;
    };
    auto one = [&](const std::string& key) {
        auto r = line(key);
        if (r.size() != 1) throw DataError("bad '" + key + "' line in norm table");
        return r[0];
    };
    try {
        if (std::stoi(one("format")) != NormTable::format_version) throw DataError("unsupported norm table version");
        const double p = detail::parse_double(one("p"));
        const int res = std::stoi(one("resolution"));
        std::vector<int> scales;
        for (const auto& s : line("scales")) scales.push_back(std::stoi(s));
        const int replicas = std::stoi(one("replicas"));
        const std::uint64_t seed = std::stoull(one("seed"));
        if (res < 2) throw DataError("bad resolution in norm table");
        std::vector<double> values;
        std::vector<double> errs;
        for (int k = 0; k < res; ++k) {
            std::string a, v, e;
            if (!(is >> a >> v >> e)) throw DataError("truncated norm table rows");
            detail::parse_double(a);
            values.push_back(detail::parse_double(v));
            errs.push_back(detail::parse_double(e));
        }
        return NormTable(p, std::move(values), std::move(errs), std::move(scales), replicas, seed);
    } catch (const std::invalid_argument&) {
        throw DataError("malformed norm table");
    } catch (const std::out_of_range&) {
        throw DataError("malformed norm table");
    } catch (const DomainError& e) {
        throw DataError(e.what());
    }
}

// ---------------------------------------------------------------------------

struct GeodesicReport {
    std::int64_t value = 0;
    std::size_t witness_length = 0;
    double deviation = 0.0;             // l-infinity Hausdorff distance to the segment
    double normalized_deviation = 0.0;  // deviation / |y - x|_2
    double weight_ratio = 0.0;          // |b(witness)| / |witness|
    double epsilon = 0.0;
    Exactness flag = Exactness::exact;
};

/// How far the relaxed geodesic from [x] to [y] strays from the segment [x, y].
inline GeodesicReport geodesic_concentration(const ClusterContext& ctx, Point x, Point y, double epsilon) {
    if (!(epsilon >= 0.0)) throw ArgumentError("epsilon must be non-negative");
    GeodesicReport rep;
    rep.epsilon = epsilon;
    const double len = norm2(y - x);
    const auto res = right_boundary_distance(ctx, x, y, DistanceMode::dijkstra_relaxation);
    rep.value = res.value;
    rep.flag = res.flag;
    rep.witness_length = res.witness.length();
    if (len == 0.0 || res.witness.length() == 0) return rep;
    std::vector<Point> poly;
    for (const auto& v : res.witness.vertices()) poly.push_back({static_cast<double>(v.x), static_cast<double>(v.y)});
    double d = 0.0;
    for (const auto& q : poly) d = std::max(d, linf_point_segment(q, x, y));
    const int samples = std::max(2, static_cast<int>(std::ceil(len * 8)));
    for (int k = 0; k <= samples; ++k) {
        const Point q = x + (static_cast<double>(k) / samples) * (y - x);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < poly.size(); ++i) best = std::min(best, linf_point_segment(q, poly[i], poly[i + 1]));
        d = std::max(d, best);
    }
    rep.deviation = d;
    rep.normalized_deviation = d / len;
    rep.weight_ratio = static_cast<double>(path_weight(res.witness, *ctx.config, WeightMode::infinite)) /
                       static_cast<double>(res.witness.length());
    return rep;
}

}  // namespace perciso
