#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <compare>
#include <cstdint>
#include <cstring>
#include <istream>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "perciso/error.hpp"
#include "perciso/geometry.hpp"
#include "perciso/rational.hpp"
#include "perciso/rng.hpp"

namespace perciso {

struct Vertex {
    int x = 0;
    int y = 0;

    friend constexpr auto operator<=>(const Vertex&, const Vertex&) = default;
};

/// Lattice directions in counter-clockwise order starting from east.
enum class Dir : std::uint8_t { east = 0, north = 1, west = 2, south = 3 };

inline constexpr std::array<Dir, 4> all_dirs{Dir::east, Dir::north, Dir::west, Dir::south};

constexpr int dx(Dir d) { return d == Dir::east ? 1 : d == Dir::west ? -1 : 0; }
constexpr int dy(Dir d) { return d == Dir::north ? 1 : d == Dir::south ? -1 : 0; }
constexpr Vertex step(Vertex v, Dir d) { return {v.x + dx(d), v.y + dy(d)}; }
constexpr Dir rotate_ccw(Dir d, int quarter_turns) {
    return static_cast<Dir>(((static_cast<int>(d) + quarter_turns) % 4 + 4) % 4);
}
constexpr Dir opposite(Dir d) { return rotate_ccw(d, 2); }

/// Direction from a to b when they are nearest neighbours.
constexpr std::optional<Dir> direction_between(Vertex a, Vertex b) {
    const int ddx = b.x - a.x;
    const int ddy = b.y - a.y;
    if (ddx == 1 && ddy == 0) return Dir::east;
    if (ddx == -1 && ddy == 0) return Dir::west;
    if (ddx == 0 && ddy == 1) return Dir::north;
    if (ddx == 0 && ddy == -1) return Dir::south;
    return std::nullopt;
}

constexpr char dir_char(Dir d) { return "ENWS"[static_cast<int>(d)]; }

/// Oriented edge <from, from + dir>; distinct from its reverse.
struct OrientedEdge {
    Vertex from;
    Dir dir = Dir::east;

    [[nodiscard]] constexpr Vertex to() const { return step(from, dir); }
    [[nodiscard]] constexpr OrientedEdge reversed() const { return {to(), opposite(dir)}; }

    friend constexpr auto operator<=>(const OrientedEdge&, const OrientedEdge&) = default;
};

/// Unoriented nearest-neighbour edge with endpoints in lexicographic order.
struct Edge {
    Vertex a;
    Vertex b;

    static constexpr Edge between(Vertex u, Vertex v) { return u < v ? Edge{u, v} : Edge{v, u}; }
    static constexpr Edge of(const OrientedEdge& e) { return between(e.from, e.to()); }

    friend constexpr auto operator<=>(const Edge&, const Edge&) = default;
};

/// Uniform draw that decides whether the edge leaving v along the positive axis
/// `axis` (east or north) is open. Keyed by global coordinates, so boxes of
/// different size share the draws of their common edges, and thresholding the
/// same draw at two values of p couples the configurations monotonically.
inline double edge_uniform(std::uint64_t seed, Vertex v, Dir axis) {
    return to_unit(hash_key(seed, Stream::edge, static_cast<std::int64_t>(v.x), static_cast<std::int64_t>(v.y),
                            static_cast<std::uint64_t>(axis)));
}

inline double eta_value(std::uint64_t seed, Vertex v) {
    return to_unit(hash_key(seed, Stream::eta, static_cast<std::int64_t>(v.x), static_cast<std::int64_t>(v.y)));
}

/// A bond-percolation configuration on the padded box [-N, N]^2, N = n + pad.
/// Immutable once built.
class Config {
public:
    static constexpr std::int64_t max_vertices = std::numeric_limits<std::int32_t>::max();

    Config(int n, int pad, double p, std::uint64_t seed) : n_(n), pad_(pad), radius_(n + pad), p_(p), seed_(seed) {
        const std::int64_t side = 2 * static_cast<std::int64_t>(radius_) + 1;
        if (side * side > max_vertices) throw CapacityError("box too large for the vertex address space");
        horizontal_.assign(words(horizontal_count()), 0);
        vertical_.assign(words(vertical_count()), 0);
    }

    [[nodiscard]] int n() const { return n_; }
    [[nodiscard]] int pad() const { return pad_; }
    [[nodiscard]] int radius() const { return radius_; }
    [[nodiscard]] int side() const { return 2 * radius_ + 1; }
    [[nodiscard]] double p() const { return p_; }
    [[nodiscard]] std::uint64_t seed() const { return seed_; }

    [[nodiscard]] bool in_box(Vertex v) const { return std::abs(v.x) <= radius_ && std::abs(v.y) <= radius_; }
    [[nodiscard]] bool in_inner(Vertex v) const { return std::abs(v.x) <= n_ && std::abs(v.y) <= n_; }

    [[nodiscard]] std::size_t vertex_count() const { return static_cast<std::size_t>(side()) * side(); }
    [[nodiscard]] std::size_t index(Vertex v) const {
        return static_cast<std::size_t>(v.y + radius_) * side() + static_cast<std::size_t>(v.x + radius_);
    }
    [[nodiscard]] Vertex vertex(std::size_t i) const {
        return {static_cast<int>(i % side()) - radius_, static_cast<int>(i / side()) - radius_};
    }

    [[nodiscard]] std::size_t horizontal_count() const { return static_cast<std::size_t>(2 * radius_) * side(); }
    [[nodiscard]] std::size_t vertical_count() const { return horizontal_count(); }
    [[nodiscard]] std::size_t edge_count() const { return horizontal_count() + vertical_count(); }

    /// Whether the edge from v in direction d is open; edges leaving the box are closed.
    [[nodiscard]] bool is_open(Vertex v, Dir d) const {
        const Vertex w = step(v, d);
        if (!in_box(v) || !in_box(w)) return false;
        switch (d) {
            case Dir::east: return bit(horizontal_, horizontal_id(v));
            case Dir::west: return bit(horizontal_, horizontal_id(w));
            case Dir::north: return bit(vertical_, vertical_id(v));
            case Dir::south: return bit(vertical_, vertical_id(w));
        }
        return false;
    }
    [[nodiscard]] bool is_open(const OrientedEdge& e) const { return is_open(e.from, e.dir); }
    [[nodiscard]] bool is_open(const Edge& e) const {
        const auto d = direction_between(e.a, e.b);
        return d && is_open(e.a, *d);
    }

    [[nodiscard]] double eta(Vertex v) const { return eta_value(seed_, v); }

    [[nodiscard]] std::size_t open_count() const {
        std::size_t c = 0;
        for (auto w : horizontal_) c += static_cast<std::size_t>(std::popcount(w));
        for (auto w : vertical_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    /// Row-major (y outer, x inner) edge bitmaps; horizontal edge (x,y)-(x+1,y),
    /// vertical edge (x,y)-(x,y+1).
    [[nodiscard]] std::size_t horizontal_id(Vertex v) const {
        return static_cast<std::size_t>(v.y + radius_) * (2 * radius_) + static_cast<std::size_t>(v.x + radius_);
    }
    [[nodiscard]] std::size_t vertical_id(Vertex v) const {
        return static_cast<std::size_t>(v.y + radius_) * side() + static_cast<std::size_t>(v.x + radius_);
    }

    void set_horizontal(std::size_t id, bool open) { set_bit(horizontal_, id, open); }
    void set_vertical(std::size_t id, bool open) { set_bit(vertical_, id, open); }
    [[nodiscard]] bool horizontal(std::size_t id) const { return bit(horizontal_, id); }
    [[nodiscard]] bool vertical(std::size_t id) const { return bit(vertical_, id); }

    friend bool operator==(const Config& a, const Config& b) {
        return a.n_ == b.n_ && a.pad_ == b.pad_ && std::bit_cast<std::uint64_t>(a.p_) == std::bit_cast<std::uint64_t>(b.p_) &&
               a.seed_ == b.seed_ && a.horizontal_ == b.horizontal_ && a.vertical_ == b.vertical_;
    }

private:
    static std::size_t words(std::size_t bits) { return (bits + 63) / 64; }
    static bool bit(const std::vector<std::uint64_t>& w, std::size_t i) { return (w[i >> 6] >> (i & 63)) & 1U; }
    static void set_bit(std::vector<std::uint64_t>& w, std::size_t i, bool on) {
        const std::uint64_t m = std::uint64_t{1} << (i & 63);
        w[i >> 6] = on ? (w[i >> 6] | m) : (w[i >> 6] & ~m);
    }

    int n_;
    int pad_;
    int radius_;
    double p_;
    std::uint64_t seed_;
    std::vector<std::uint64_t> horizontal_;
    std::vector<std::uint64_t> vertical_;
};

inline Config sample_config(int n, double p, std::uint64_t seed, int pad) {
    if (n < 1) throw ArgumentError("box radius n must be at least 1");
    if (pad < 0) throw ArgumentError("pad must be non-negative");
    if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("percolation parameter must lie in [0, 1]");
    if (static_cast<std::int64_t>(n) + pad > std::numeric_limits<std::int32_t>::max() / 4)
        throw CapacityError("box too large for the vertex address space");
    Config cfg(n, pad, p, seed);
    const int r = cfg.radius();
    for (int y = -r; y <= r; ++y)
        for (int x = -r; x < r; ++x) {
            const Vertex v{x, y};
            cfg.set_horizontal(cfg.horizontal_id(v), edge_uniform(seed, v, Dir::east) < p);
        }
    for (int y = -r; y < r; ++y)
        for (int x = -r; x <= r; ++x) {
            const Vertex v{x, y};
            cfg.set_vertical(cfg.vertical_id(v), edge_uniform(seed, v, Dir::north) < p);
        }
    return cfg;
}

// ---------------------------------------------------------------------------
// Binary snapshot: magic "PRCF", u32 version, i32 n, i32 pad, f64 p, u64 seed,
// then the horizontal and vertical bitmaps, LSB-first, little-endian.

namespace detail {

template <class T>
void put_le(std::ostream& os, T value) {
    auto raw = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
    os.write(reinterpret_cast<const char*>(raw.data()), raw.size());
}

template <class T>
T get_le(std::istream& is) {
    std::array<unsigned char, sizeof(T)> raw{};
    if (!is.read(reinterpret_cast<char*>(raw.data()), raw.size())) throw DataError("truncated configuration snapshot");
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
    return std::bit_cast<T>(raw);
}

}  // namespace detail

inline constexpr std::uint32_t snapshot_version = 1;

inline void write_snapshot(std::ostream& os, const Config& cfg) {
    os.write("PRCF", 4);
    detail::put_le<std::uint32_t>(os, snapshot_version);
    detail::put_le<std::int32_t>(os, cfg.n());
    detail::put_le<std::int32_t>(os, cfg.pad());
    detail::put_le<double>(os, cfg.p());
    detail::put_le<std::uint64_t>(os, cfg.seed());
    auto dump = [&](std::size_t count, auto getter) {
        std::vector<unsigned char> bytes((count + 7) / 8, 0);
        for (std::size_t i = 0; i < count; ++i)
            if (getter(i)) bytes[i >> 3] |= static_cast<unsigned char>(1U << (i & 7));
        os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    };
    dump(cfg.horizontal_count(), [&](std::size_t i) { return cfg.horizontal(i); });
    dump(cfg.vertical_count(), [&](std::size_t i) { return cfg.vertical(i); });
    if (!os) throw DataError("failed writing configuration snapshot");
}

inline Config read_snapshot(std::istream& is) {
    char magic[4]{};
    if (!is.read(magic, 4) || std::memcmp(magic, "PRCF", 4) != 0) throw DataError("not a configuration snapshot");
    if (detail::get_le<std::uint32_t>(is) != snapshot_version) throw DataError("unsupported snapshot version");
    const auto n = detail::get_le<std::int32_t>(is);
    const auto pad = detail::get_le<std::int32_t>(is);
    const auto p = detail::get_le<double>(is);
    const auto seed = detail::get_le<std::uint64_t>(is);
    if (n < 1 || pad < 0 || !(p >= 0.0 && p <= 1.0)) throw DataError("invalid snapshot header");
    Config cfg(n, pad, p, seed);
    auto load = [&](std::size_t count, auto setter) {
        std::vector<unsigned char> bytes((count + 7) / 8, 0);
        if (!is.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size())))
            throw DataError("truncated configuration snapshot");
        for (std::size_t i = 0; i < count; ++i) setter(i, (bytes[i >> 3] >> (i & 7)) & 1U);
    };
    load(cfg.horizontal_count(), [&](std::size_t i, bool b) { cfg.set_horizontal(i, b); });
    load(cfg.vertical_count(), [&](std::size_t i, bool b) { cfg.set_vertical(i, b); });
    return cfg;
}

// ---------------------------------------------------------------------------
// Clusters.

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0U); }

    std::uint32_t find(std::uint32_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
    }

private:
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint32_t> size_;
};

/// Cluster ids are the smallest vertex index of each cluster.
struct ClusterLabeling {
    std::vector<std::int32_t> label;
    std::vector<std::int32_t> size;  // indexed by cluster id; zero for non-ids
    std::int32_t largest = -1;

    [[nodiscard]] std::int32_t size_of(std::int32_t id) const { return size[static_cast<std::size_t>(id)]; }
};

inline ClusterLabeling cluster(const Config& cfg) {
    const std::size_t nv = cfg.vertex_count();
    DisjointSets sets(nv);
    const int r = cfg.radius();
    for (int y = -r; y <= r; ++y)
        for (int x = -r; x <= r; ++x) {
            const Vertex v{x, y};
            const auto i = static_cast<std::uint32_t>(cfg.index(v));
            if (x < r && cfg.is_open(v, Dir::east)) sets.unite(i, static_cast<std::uint32_t>(cfg.index(step(v, Dir::east))));
            if (y < r && cfg.is_open(v, Dir::north)) sets.unite(i, static_cast<std::uint32_t>(cfg.index(step(v, Dir::north))));
        }
    ClusterLabeling out;
    out.label.assign(nv, -1);
    out.size.assign(nv, 0);
    std::vector<std::int32_t> root_label(nv, -1);
    for (std::size_t i = 0; i < nv; ++i) {
        const auto root = sets.find(static_cast<std::uint32_t>(i));
        if (root_label[root] < 0) root_label[root] = static_cast<std::int32_t>(i);
        out.label[i] = root_label[root];
        ++out.size[static_cast<std::size_t>(out.label[i])];
    }
    for (std::size_t i = 0; i < nv; ++i)
        if (out.largest < 0 || out.size[i] > out.size[static_cast<std::size_t>(out.largest)]) {
            if (out.size[i] > 0) out.largest = static_cast<std::int32_t>(i);
        }
    return out;
}

/// Shared, immutable analysis of one configuration at inner radius n: the
/// cluster labels, the trace of the largest padded-box cluster (the stand-in
/// for the infinite cluster) and the giant component inside [-n, n]^2.
struct ClusterContext {
    std::shared_ptr<const Config> config;
    ClusterLabeling labels;
    std::vector<std::uint8_t> trace;
    std::vector<std::uint8_t> giant;
    std::size_t giant_size = 0;

    [[nodiscard]] int n() const { return config->n(); }
    [[nodiscard]] bool in_trace(Vertex v) const { return config->in_box(v) && trace[config->index(v)]; }
    [[nodiscard]] bool in_giant(Vertex v) const { return config->in_box(v) && giant[config->index(v)]; }

    static std::shared_ptr<const ClusterContext> build(std::shared_ptr<const Config> cfg) {
        auto ctx = std::make_shared<ClusterContext>();
        ctx->config = std::move(cfg);
        const Config& c = *ctx->config;
        ctx->labels = cluster(c);
        const std::size_t nv = c.vertex_count();
        ctx->trace.assign(nv, 0);
        ctx->giant.assign(nv, 0);
        for (std::size_t i = 0; i < nv; ++i) ctx->trace[i] = ctx->labels.label[i] == ctx->labels.largest;

        // Components of the trace restricted to the inner box, using inner edges only.
        DisjointSets sets(nv);
        const int n = c.n();
        for (int y = -n; y <= n; ++y)
            for (int x = -n; x <= n; ++x) {
                const Vertex v{x, y};
                if (!ctx->in_trace(v)) continue;
                const auto i = static_cast<std::uint32_t>(c.index(v));
                for (Dir d : {Dir::east, Dir::north}) {
                    const Vertex w = step(v, d);
                    if (c.in_inner(w) && c.is_open(v, d)) sets.unite(i, static_cast<std::uint32_t>(c.index(w)));
                }
            }
        std::vector<std::int32_t> count(nv, 0);
        std::vector<Vertex> smallest(nv, Vertex{std::numeric_limits<int>::max(), std::numeric_limits<int>::max()});
        for (int y = -n; y <= n; ++y)
            for (int x = -n; x <= n; ++x) {
                const Vertex v{x, y};
                if (!ctx->in_trace(v)) continue;
                const auto root = sets.find(static_cast<std::uint32_t>(c.index(v)));
                ++count[root];
                smallest[root] = std::min(smallest[root], v);
            }
        std::int64_t best = -1;
        for (std::size_t i = 0; i < nv; ++i) {
            if (count[i] == 0) continue;
            if (best < 0 || count[i] > count[static_cast<std::size_t>(best)] ||
                (count[i] == count[static_cast<std::size_t>(best)] && smallest[i] < smallest[static_cast<std::size_t>(best)]))
                best = static_cast<std::int64_t>(i);
        }
        if (best >= 0) {
            for (int y = -n; y <= n; ++y)
                for (int x = -n; x <= n; ++x) {
                    const Vertex v{x, y};
                    if (ctx->in_trace(v) && sets.find(static_cast<std::uint32_t>(c.index(v))) == static_cast<std::uint32_t>(best)) {
                        ctx->giant[c.index(v)] = 1;
                        ++ctx->giant_size;
                    }
                }
        }
        return ctx;
    }
};

/// A duplicate-free, sorted vertex subset of the giant component C_n.
class Subgraph {
public:
    Subgraph(std::shared_ptr<const ClusterContext> ctx, std::vector<Vertex> vertices) : ctx_(std::move(ctx)), verts_(std::move(vertices)) {
        std::sort(verts_.begin(), verts_.end());
        verts_.erase(std::unique(verts_.begin(), verts_.end()), verts_.end());
        for (const auto& v : verts_)
            if (!ctx_->in_giant(v)) throw DomainError("subgraph vertex outside the giant component");
    }

    [[nodiscard]] const ClusterContext& context() const { return *ctx_; }
    [[nodiscard]] const std::shared_ptr<const ClusterContext>& context_ptr() const { return ctx_; }
    [[nodiscard]] const Config& config() const { return *ctx_->config; }
    [[nodiscard]] int n() const { return ctx_->n(); }
    [[nodiscard]] std::span<const Vertex> vertices() const { return verts_; }
    [[nodiscard]] std::size_t size() const { return verts_.size(); }
    [[nodiscard]] bool empty() const { return verts_.empty(); }
    [[nodiscard]] bool contains(Vertex v) const { return std::binary_search(verts_.begin(), verts_.end(), v); }

    /// A subset of the same giant component.
    [[nodiscard]] Subgraph subset(std::vector<Vertex> vertices) const { return Subgraph(ctx_, std::move(vertices)); }

    /// Membership mask over the padded box, for algorithms that need O(1) lookups.
    [[nodiscard]] std::vector<std::uint8_t> mask() const {
        std::vector<std::uint8_t> m(config().vertex_count(), 0);
        for (const auto& v : verts_) m[config().index(v)] = 1;
        return m;
    }

private:
    std::shared_ptr<const ClusterContext> ctx_;
    std::vector<Vertex> verts_;
};

/// Giant component C_n of a supercritical configuration.
inline Subgraph giant_component(std::shared_ptr<const Config> cfg) {
    if (!(cfg->p() > 0.5)) throw DomainError("supercritical parameter required");
    auto ctx = ClusterContext::build(std::move(cfg));
    if (ctx->giant_size == 0) throw DomainError("no giant component at this scale");
    std::vector<Vertex> verts;
    verts.reserve(ctx->giant_size);
    const Config& c = *ctx->config;
    for (std::size_t i = 0; i < c.vertex_count(); ++i)
        if (ctx->giant[i]) verts.push_back(c.vertex(i));
    return Subgraph(std::move(ctx), std::move(verts));
}

inline Subgraph giant_component(const Config& cfg) { return giant_component(std::make_shared<const Config>(cfg)); }

struct DensityEstimate {
    double theta_hat = 0.0;
    double stderr_ = 0.0;
};

/// Mean largest-cluster fraction over independent boxes [-radius, radius]^2.
inline DensityEstimate density_estimate(double p, int radius, int replicas, std::uint64_t seed) {
    if (replicas <= 0) throw ArgumentError("replicas must be positive");
    if (!(p > 0.5)) throw DomainError("supercritical parameter required");
    std::vector<double> fractions;
    fractions.reserve(static_cast<std::size_t>(replicas));
    for (int r = 0; r < replicas; ++r) {
        const Config cfg = sample_config(radius, p, hash_key(seed, Stream::replica, r), 0);
        const auto labels = cluster(cfg);
        fractions.push_back(static_cast<double>(labels.size_of(labels.largest)) / static_cast<double>(cfg.vertex_count()));
    }
    DensityEstimate out;
    out.theta_hat = std::accumulate(fractions.begin(), fractions.end(), 0.0) / replicas;
    if (replicas > 1) {
        double ss = 0.0;
        for (double f : fractions) ss += (f - out.theta_hat) * (f - out.theta_hat);
        out.stderr_ = std::sqrt(ss / (replicas - 1) / replicas);
    }
    return out;
}

/// l-infinity nearest vertex of the cluster trace to x; ties go to the smaller
/// eta value, then to the lexicographically smaller vertex.
inline Vertex nearest_cluster_vertex(const ClusterContext& ctx, Point x) {
    const Config& c = *ctx.config;
    if (ctx.labels.largest < 0) throw DomainError("empty cluster trace");
    const int r = c.radius();
    const int cx = static_cast<int>(std::lround(x.x));
    const int cy = static_cast<int>(std::lround(x.y));
    for (int window = 1;; window *= 2) {
        double best = std::numeric_limits<double>::infinity();
        std::optional<Vertex> arg;
        const int x0 = std::max(-r, cx - window), x1 = std::min(r, cx + window);
        const int y0 = std::max(-r, cy - window), y1 = std::min(r, cy + window);
        for (int yy = y0; yy <= y1; ++yy)
            for (int xx = x0; xx <= x1; ++xx) {
                const Vertex v{xx, yy};
                if (!ctx.trace[c.index(v)]) continue;
                const double d = norm_inf(Point{xx - x.x, yy - x.y});
                if (d < best || (d == best && (c.eta(v) < c.eta(*arg) || (c.eta(v) == c.eta(*arg) && v < *arg)))) {
                    best = d;
                    arg = v;
                }
            }
        // Anything outside the window is farther than window - 1/2 from x.
        if (arg && best <= window - 0.5) return *arg;
        if (x0 == -r && x1 == r && y0 == -r && y1 == r) {
            if (arg) return *arg;
            throw DomainError("empty cluster trace");
        }
    }
}

enum class BoundaryMode { within_box, infinite };

/// Open edges with exactly one endpoint in U; within_box keeps only edges whose
/// other endpoint lies in [-n, n]^2 (these end in C_n because U does).
inline std::vector<Edge> edge_boundary(const Subgraph& u, BoundaryMode mode) {
    if (u.empty()) throw ArgumentError("edge boundary of an empty subgraph");
    const Config& c = u.config();
    std::vector<Edge> out;
    for (const auto& v : u.vertices())
        for (Dir d : all_dirs) {
            if (!c.is_open(v, d)) continue;
            const Vertex w = step(v, d);
            if (u.contains(w)) continue;
            if (mode == BoundaryMode::within_box && !c.in_inner(w)) continue;
            out.push_back(Edge::between(v, w));
        }
    std::sort(out.begin(), out.end());
    return out;
}

struct Conductance {
    Fraction exact;
    double value = 0.0;
};

inline Conductance conductance(const Subgraph& u, BoundaryMode mode) {
    const auto boundary = edge_boundary(u, mode);
    Fraction f(static_cast<std::int64_t>(boundary.size()), static_cast<std::int64_t>(u.size()));
    return {f, f.value()};
}

}  // namespace perciso
