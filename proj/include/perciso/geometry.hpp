#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "perciso/error.hpp"

namespace perciso {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend constexpr bool operator==(const Point&, const Point&) = default;
    friend constexpr Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
};

constexpr double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
constexpr double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double norm2(Point a) { return std::hypot(a.x, a.y); }
inline double norm_inf(Point a) { return std::max(std::abs(a.x), std::abs(a.y)); }

/// Sign of the turn a -> b -> c (+1 left, -1 right, 0 collinear).
inline int orientation(Point a, Point b, Point c) {
    const double v = cross(b - a, c - a);
    return (v > 0) - (v < 0);
}

inline bool on_segment(Point a, Point b, Point q) {
    return orientation(a, b, q) == 0 && std::min(a.x, b.x) <= q.x && q.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= q.y && q.y <= std::max(a.y, b.y);
}

/// Closed-segment intersection test.
inline bool segments_intersect(Point a, Point b, Point c, Point d) {
    const int o1 = orientation(a, b, c);
    const int o2 = orientation(a, b, d);
    const int o3 = orientation(c, d, a);
    const int o4 = orientation(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    return (o1 == 0 && on_segment(a, b, c)) || (o2 == 0 && on_segment(a, b, d)) ||
           (o3 == 0 && on_segment(c, d, a)) || (o4 == 0 && on_segment(c, d, b));
}

/// Signed shoelace area of a closed ring (last vertex joins the first).
inline double signed_area(std::span<const Point> ring) {
    double s = 0.0;
    const std::size_t m = ring.size();
    for (std::size_t i = 0; i < m; ++i) s += cross(ring[i], ring[(i + 1) % m]);
    return 0.5 * s;
}

inline double polyline_length(std::span<const Point> pts, bool closed) {
    double len = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) len += norm2(pts[i + 1] - pts[i]);
    if (closed && pts.size() > 1) len += norm2(pts.front() - pts.back());
    return len;
}

/// True when no two non-adjacent segments meet and adjacent segments share only
/// their common endpoint. Quadratic; fine for the curve sizes used here.
inline bool is_simple(std::span<const Point> pts, bool closed) {
    const std::size_t m = pts.size();
    if (m < 2) return true;
    const std::size_t segs = closed ? m : m - 1;
    if (closed && m < 3) return false;
    auto seg = [&](std::size_t i) { return std::pair{pts[i], pts[(i + 1) % m]}; };
    for (std::size_t i = 0; i < segs; ++i) {
        auto [a, b] = seg(i);
        if (a == b) return false;
        for (std::size_t j = i + 1; j < segs; ++j) {
            auto [c, d] = seg(j);
            const bool adjacent = (j == i + 1) || (closed && i == 0 && j == segs - 1);
            if (!adjacent) {
                if (segments_intersect(a, b, c, d)) return false;
                continue;
            }
            // Adjacent: shared vertex is b (== c) or, for the wrap pair, a (== d).
            const Point shared = (j == i + 1) ? b : a;
            const Point p = (j == i + 1) ? a : b;
            const Point q = (j == i + 1) ? d : c;
            if (orientation(p, shared, q) == 0 && dot(p - shared, q - shared) > 0) return false;
        }
    }
    return true;
}

/// Even-odd crossing test (half-open in y). Points exactly on the ring are
/// not classified consistently; use point_on_ring for those.
inline bool point_in_ring(std::span<const Point> ring, Point q) {
    bool inside = false;
    const std::size_t m = ring.size();
    for (std::size_t i = 0, j = m - 1; i < m; j = i++) {
        const Point a = ring[j];
        const Point b = ring[i];
        if ((b.y > q.y) != (a.y > q.y)) {
            const double xint = a.x + (q.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (q.x < xint) inside = !inside;
        }
    }
    return inside;
}

inline bool point_on_ring(std::span<const Point> ring, Point q) {
    const std::size_t m = ring.size();
    for (std::size_t i = 0; i < m; ++i)
        if (on_segment(ring[i], ring[(i + 1) % m], q)) return true;
    return false;
}

/// Exact l-infinity distance from q to segment [a,b]. The objective is convex
/// and piecewise linear in the segment parameter, so the minimum sits at an
/// endpoint or where a coordinate residual vanishes or the two residuals tie.
inline double linf_point_segment(Point q, Point a, Point b) {
    const Point d = b - a;
    const Point r = a - q;
    double candidates[8];
    int count = 0;
    candidates[count++] = 0.0;
    candidates[count++] = 1.0;
    auto add = [&](double num, double den) {
        if (den != 0.0) {
            const double t = num / den;
            if (t > 0.0 && t < 1.0) candidates[count++] = t;
        }
    };
    add(-r.x, d.x);
    add(-r.y, d.y);
    add(r.y - r.x, d.x - d.y);
    add(-(r.x + r.y), d.x + d.y);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < count; ++i) {
        const double t = candidates[i];
        best = std::min(best, norm_inf(Point{r.x + t * d.x, r.y + t * d.y}));
    }
    return best;
}

struct BoundingBox {
    Point lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    Point hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};

    void add(Point p) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    [[nodiscard]] bool empty() const { return lo.x > hi.x; }
};

/// Compact planar region bounded by closed rings, filled by the even-odd rule.
/// Holes are simply additional rings.
struct Region {
    std::vector<std::vector<Point>> rings;

    [[nodiscard]] bool contains(Point q) const {
        bool inside = false;
        for (const auto& r : rings) {
            if (point_on_ring(r, q)) return true;
            if (point_in_ring(r, q)) inside = !inside;
        }
        return inside;
    }

    [[nodiscard]] double area() const {
        // Even-odd fill of nested, disjoint rings: alternate signs by depth.
        double total = 0.0;
        for (std::size_t i = 0; i < rings.size(); ++i) {
            int depth = 0;
            for (std::size_t j = 0; j < rings.size(); ++j)
                if (j != i && !rings[i].empty() && point_in_ring(rings[j], rings[i].front())) ++depth;
            const double a = std::abs(signed_area(rings[i]));
            total += (depth % 2 == 0) ? a : -a;
        }
        return total;
    }

    [[nodiscard]] BoundingBox bounds() const {
        BoundingBox b;
        for (const auto& r : rings)
            for (const auto& p : r) b.add(p);
        return b;
    }

    /// Sorted x-coordinates where the horizontal line at height y crosses the
    /// boundary (half-open rule, so even-odd membership between crossings).
    [[nodiscard]] std::vector<double> crossings(double y) const {
        std::vector<double> xs;
        for (const auto& r : rings) {
            const std::size_t m = r.size();
            for (std::size_t i = 0, j = m - 1; i < m; j = i++) {
                const Point a = r[j];
                const Point b = r[i];
                if ((b.y > y) != (a.y > y)) xs.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
            }
        }
        std::sort(xs.begin(), xs.end());
        return xs;
    }

    [[nodiscard]] Region transformed(double scale, Point shift = {}) const {
        Region out;
        for (const auto& r : rings) {
            auto& nr = out.rings.emplace_back();
            for (const auto& p : r) nr.push_back(scale * p + shift);
        }
        return out;
    }
};

/// Symmetric l-infinity Hausdorff distance between two finite point sets.
inline double hausdorff_points(std::span<const Point> a, std::span<const Point> b) {
    if (a.empty() || b.empty()) throw ArgumentError("hausdorff distance of an empty set");
    auto directed = [](std::span<const Point> from, std::span<const Point> to) {
        double worst = 0.0;
        for (const auto& p : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : to) best = std::min(best, norm_inf(p - q));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

namespace detail {

inline std::vector<Point> sample_region(const Region& r, double resolution, std::vector<std::uint8_t>* is_boundary) {
    std::vector<Point> samples;
    for (const auto& ring : r.rings) {
        const std::size_t m = ring.size();
        for (std::size_t i = 0; i < m; ++i) {
            const Point a = ring[i];
            const Point b = ring[(i + 1) % m];
            const int steps = std::max(1, static_cast<int>(std::ceil(norm2(b - a) / resolution)));
            for (int k = 0; k < steps; ++k) {
                samples.push_back(a + (static_cast<double>(k) / steps) * (b - a));
                if (is_boundary) is_boundary->push_back(1);
            }
        }
    }
    const BoundingBox bb = r.bounds();
    if (bb.empty()) return samples;
    const double y0 = std::floor(bb.lo.y / resolution) * resolution;
    for (double y = y0; y <= bb.hi.y; y += resolution) {
        const auto xs = r.crossings(y);
        for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
            const double x0 = std::ceil(xs[i] / resolution) * resolution;
            for (double x = x0; x <= xs[i + 1]; x += resolution) {
                samples.push_back({x, y});
                if (is_boundary) is_boundary->push_back(0);
            }
        }
    }
    return samples;
}

inline double distance_to_region(const Region& r, Point q) {
    if (r.contains(q)) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& ring : r.rings) {
        const std::size_t m = ring.size();
        for (std::size_t i = 0; i < m; ++i) best = std::min(best, linf_point_segment(q, ring[i], ring[(i + 1) % m]));
    }
    return best;
}

}  // namespace detail

/// l-infinity Hausdorff distance between two filled regions, evaluated on
/// boundary samples plus an interior grid of the given spacing.
inline double hausdorff_distance(const Region& a, const Region& b, double resolution) {
    if (a.rings.empty() || b.rings.empty()) throw ArgumentError("hausdorff distance of an empty region");
    if (!(resolution > 0.0)) throw ArgumentError("hausdorff resolution must be positive");
    auto directed = [&](const Region& from, const Region& to) {
        double worst = 0.0;
        for (const auto& p : detail::sample_region(from, resolution, nullptr))
            worst = std::max(worst, detail::distance_to_region(to, p));
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

}  // namespace perciso
