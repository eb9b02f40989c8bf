#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <istream>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "perciso/boundary_norm.hpp"
#include "perciso/error.hpp"
#include "perciso/geometry.hpp"
#include "perciso/parallel.hpp"
#include "perciso/rightmost.hpp"
#include "perciso/rng.hpp"

namespace perciso {

/// A norm on R^2 given by its evaluation rule.
class Norm {
public:
    using Fn = std::function<double(Point)>;

    Norm(std::string name, Fn fn, bool square_symmetric) : name_(std::move(name)), fn_(std::move(fn)), symmetric_(square_symmetric) {}

    static Norm euclidean() {
        return {"euclidean", [](Point v) { return std::hypot(v.x, v.y); }, true};
    }
    static Norm l1() {
        return {"l1", [](Point v) { return std::abs(v.x) + std::abs(v.y); }, true};
    }
    static Norm linf() {
        return {"linf", [](Point v) { return std::max(std::abs(v.x), std::abs(v.y)); }, true};
    }
    static Norm from_table(NormTable table) {
        auto t = std::make_shared<const NormTable>(std::move(table));
        return {"table", [t](Point v) { return (*t)(v); }, true};
    }

    [[nodiscard]] Norm scaled(double c) const {
        if (!(c > 0.0)) throw ArgumentError("norm scale must be positive");
        std::ostringstream name;
        name << name_ << '*' << c;
        return {name.str(), [f = fn_, c](Point v) { return c * f(v); }, symmetric_};
    }

    double operator()(Point v) const { return fn_(v); }
    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] bool square_symmetric() const { return symmetric_; }

private:
    std::string name_;
    Fn fn_;
    bool symmetric_;
};

/// Built-in norms by name: euclidean, l1, linf, optionally followed by "*c".
inline Norm builtin_norm(const std::string& spec) {
    const auto star = spec.find('*');
    const std::string base = spec.substr(0, star);
    std::optional<Norm> n;
    if (base == "euclidean")
        n = Norm::euclidean();
    else if (base == "l1")
        n = Norm::l1();
    else if (base == "linf")
        n = Norm::linf();
    else
        throw ArgumentError("unknown norm '" + spec + "'");
    if (star == std::string::npos) return *n;
    try {
        std::size_t used = 0;
        const double c = std::stod(spec.substr(star + 1), &used);
        if (used != spec.size() - star - 1) throw std::invalid_argument("trailing");
        return n->scaled(c);
    } catch (const std::logic_error&) {
        throw ArgumentError("bad norm scale in '" + spec + "'");
    }
}

// ---------------------------------------------------------------------------

/// Simple polygon stored counter-clockwise.
struct Polygon {
    std::vector<Point> vertices;
    bool reversed = false;  // input arrived clockwise

    static Polygon make(std::vector<Point> pts) {
        if (pts.size() < 3) throw DomainError("polygon needs at least three vertices");
        if (!is_simple(pts, true)) throw DomainError("polygon is not simple");
        const double a = signed_area(pts);
        if (a == 0.0) throw DomainError("degenerate polygon");
        Polygon p;
        if (a < 0) {
            std::reverse(pts.begin(), pts.end());
            p.reversed = true;
        }
        p.vertices = std::move(pts);
        return p;
    }

    [[nodiscard]] bool in_square(double tol = 1e-12) const {
        return std::all_of(vertices.begin(), vertices.end(), [&](Point v) { return std::abs(v.x) <= 1 + tol && std::abs(v.y) <= 1 + tol; });
    }

    [[nodiscard]] Region region() const { return Region{{vertices}}; }

    friend bool operator==(const Polygon&, const Polygon&) = default;
};

inline double area(const Polygon& poly) { return signed_area(poly.vertices); }

namespace detail {

inline constexpr double side_tol = 1e-12;

/// True when segment [a,b] lies in one side of the square [-1,1]^2.
inline bool on_square_side(Point a, Point b) {
    auto at = [](double v, double s) { return std::abs(v - s) <= side_tol; };
    return (at(a.x, 1) && at(b.x, 1)) || (at(a.x, -1) && at(b.x, -1)) || (at(a.y, 1) && at(b.y, 1)) || (at(a.y, -1) && at(b.y, -1));
}

inline Point outward_normal(Point a, Point b) { return {b.y - a.y, a.x - b.x}; }

}  // namespace detail

/// Restricted surface energy: the norm of the outward normal times length,
/// summed over edges not lying on the square's sides.
inline double surface_energy(const Polygon& poly, const Norm& norm) {
    const auto& v = poly.vertices;
    double e = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point a = v[i];
        const Point b = v[(i + 1) % v.size()];
        if (!detail::on_square_side(a, b)) e += norm(detail::outward_normal(a, b));
    }
    return e;
}

/// Same functional written with edge vectors; agrees with the normal form for
/// square-symmetric norms.
inline double surface_energy_edge_form(const Polygon& poly, const Norm& norm) {
    const auto& v = poly.vertices;
    double e = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point a = v[i];
        const Point b = v[(i + 1) % v.size()];
        if (!detail::on_square_side(a, b)) e += norm(b - a);
    }
    return e;
}

/// Unrestricted norm perimeter of the polygon.
inline double norm_perimeter(const Polygon& poly, const Norm& norm) {
    const auto& v = poly.vertices;
    double e = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) e += norm(detail::outward_normal(v[i], v[(i + 1) % v.size()]));
    return e;
}

inline double restricted_conductance(const Polygon& poly, const Norm& norm) { return surface_energy(poly, norm) / area(poly); }

namespace detail {

/// Sutherland-Hodgman clip of a convex or simple ring to {x : <x,n> <= c}.
inline std::vector<Point> clip_halfplane(const std::vector<Point>& ring, Point n, double c) {
    std::vector<Point> out;
    const std::size_t m = ring.size();
    for (std::size_t i = 0; i < m; ++i) {
        const Point a = ring[i];
        const Point b = ring[(i + 1) % m];
        const double fa = dot(a, n) - c;
        const double fb = dot(b, n) - c;
        if (fa <= 0) out.push_back(a);
        if ((fa < 0 && fb > 0) || (fa > 0 && fb < 0)) out.push_back(a + (fa / (fa - fb)) * (b - a));
    }
    std::vector<Point> dedup;
    for (const auto& p : out)
        if (dedup.empty() || norm_inf(p - dedup.back()) > 1e-10) dedup.push_back(p);
    while (dedup.size() > 1 && norm_inf(dedup.front() - dedup.back()) <= 1e-10) dedup.pop_back();
    return dedup;
}

inline std::vector<Point> unit_square() { return {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}; }

/// Snap coordinates within rounding of +-1 onto the square and clamp inside.
inline Point snap(Point p) {
    auto s = [](double v) {
        if (std::abs(v - 1) <= 1e-11) return 1.0;
        if (std::abs(v + 1) <= 1e-11) return -1.0;
        return std::clamp(v, -1.0, 1.0);
    };
    return {s(p.x), s(p.y)};
}

/// Drop vertices that continue the previous edge in a straight line.
inline std::vector<Point> drop_collinear(std::vector<Point> ring) {
    bool changed = true;
    while (changed && ring.size() > 3) {
        changed = false;
        for (std::size_t i = 0; i < ring.size(); ++i) {
            const Point a = ring[(i + ring.size() - 1) % ring.size()];
            const Point b = ring[i];
            const Point c = ring[(i + 1) % ring.size()];
            if (std::abs(cross(b - a, c - b)) <= 1e-15 * (norm2(b - a) * norm2(c - b) + 1e-300) && dot(b - a, c - b) > 0) {
                ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(i));
                changed = true;
                break;
            }
        }
    }
    return ring;
}

}  // namespace detail

/// Wulff shape: intersection of {x : <x,u> <= norm(u)} over unit directions u.
inline Polygon wulff_shape(const Norm& norm, int directions) {
    if (directions < 8) throw ArgumentError("wulff shape needs at least 8 directions");
    std::vector<Point> us;
    double reach = 0.0;
    for (int k = 0; k < directions; ++k) {
        const double t = 2 * std::numbers::pi * k / directions;
        us.push_back({std::cos(t), std::sin(t)});
        reach = std::max(reach, norm(us.back()));
    }
    const double r = 2 * reach + 1;
    std::vector<Point> ring{{-r, -r}, {r, -r}, {r, r}, {-r, r}};
    for (const auto& u : us) ring = detail::clip_halfplane(ring, u, norm(u));
    return Polygon::make(detail::drop_collinear(std::move(ring)));
}

inline bool is_convex(const Polygon& poly, double tol = 1e-12) {
    const auto& v = poly.vertices;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point a = v[i];
        const Point b = v[(i + 1) % v.size()];
        const Point c = v[(i + 2) % v.size()];
        if (cross(b - a, c - b) < -tol) return false;
    }
    return true;
}

/// A structured candidate region with its re-evaluated conductance.
struct ShapeCandidate {
    std::string family;
    Polygon polygon;
    double value = std::numeric_limits<double>::infinity();
    double area = 0.0;
    bool clamped = false;
};

namespace detail {

inline ShapeCandidate evaluate(std::string family, std::vector<Point> ring, const Norm& norm, bool clamped) {
    for (auto& p : ring) p = snap(p);
    ShapeCandidate c;
    c.family = std::move(family);
    c.polygon = Polygon::make(drop_collinear(std::move(ring)));
    c.area = perciso::area(c.polygon);
    c.value = restricted_conductance(c.polygon, norm);
    c.clamped = clamped;
    return c;
}

inline void check_alpha(double alpha) {
    if (!(alpha > -1.0 && alpha <= 1.0)) throw ArgumentError("alpha must lie in (-1, 1]");
}

}  // namespace detail

/// Quarter Wulff shape anchored at the best corner, dilated to area 2+alpha
/// or to the largest size that fits (reported as clamped).
inline ShapeCandidate quarter_wulff_conductance(const Norm& norm, double alpha, int directions = 720) {
    detail::check_alpha(alpha);
    const Polygon w = wulff_shape(norm, directions);
    ShapeCandidate best;
    for (double cx : {-1.0, 1.0})
        for (double cy : {-1.0, 1.0}) {
            auto q = detail::clip_halfplane(w.vertices, {cx, 0}, 0);
            q = detail::clip_halfplane(q, {0, cy}, 0);
            double ext = 0.0;
            for (auto p : q) ext = std::max({ext, std::abs(p.x), std::abs(p.y)});
            const double a = std::abs(signed_area(q));
            const double want = std::sqrt((2 + alpha) / a);
            const double fit = 2.0 / ext;
            const double t = std::min(want, fit);
            std::vector<Point> ring;
            for (auto p : q) ring.push_back(Point{cx, cy} + t * p);
            auto c = detail::evaluate("quarter-wulff", std::move(ring), norm, fit < want);
            if (c.value < best.value) best = std::move(c);
        }
    return best;
}

/// Conductance of the complementary region: same restricted boundary, area
/// 4 minus the region's.
inline double complement_conductance(const ShapeCandidate& c) { return c.value * c.area / (4.0 - c.area); }

/// Half Wulff shape with its flat side on a side of the square.
inline ShapeCandidate half_wulff_candidate(const Norm& norm, double alpha, int directions = 720) {
    detail::check_alpha(alpha);
    const Polygon w = wulff_shape(norm, directions);
    ShapeCandidate best;
    for (Point s : {Point{0, -1}, Point{1, 0}, Point{0, 1}, Point{-1, 0}}) {
        const Point tan{-s.y, s.x};
        const auto h = detail::clip_halfplane(w.vertices, s, 0);
        double depth = 0.0;
        double lo = 1e300;
        double hi = -1e300;
        for (auto p : h) {
            depth = std::max(depth, -dot(p, s));
            lo = std::min(lo, dot(p, tan));
            hi = std::max(hi, dot(p, tan));
        }
        const double a = std::abs(signed_area(h));
        const double want = std::sqrt((2 + alpha) / a);
        const double fit = std::min(2.0 / depth, 2.0 / (hi - lo));
        const double t = std::min(want, fit);
        const double mid = (hi + lo) / 2;
        std::vector<Point> ring;
        for (auto p : h) ring.push_back(s + t * (p - mid * tan));
        auto c = detail::evaluate("half-wulff", std::move(ring), norm, fit < want);
        if (c.value < best.value) best = std::move(c);
    }
    return best;
}

/// Best straight cut {<x,u> <= c} of area 2+alpha over a grid of normals.
inline ShapeCandidate straight_cut_candidate(const Norm& norm, double alpha, int angles = 720) {
    detail::check_alpha(alpha);
    const double target = 2 + alpha;
    ShapeCandidate best;
    for (int k = 0; k < angles; ++k) {
        const double th = 2 * std::numbers::pi * k / angles;
        Point u{std::cos(th), std::sin(th)};
        if (k * 4 % angles == 0) u = {std::round(u.x), std::round(u.y)};
        const double reach = std::abs(u.x) + std::abs(u.y);
        double lo = -reach;
        double hi = reach;
        for (int it = 0; it < 100; ++it) {
            const double mid = (lo + hi) / 2;
            const auto ring = detail::clip_halfplane(detail::unit_square(), u, mid);
            if (ring.size() >= 3 && std::abs(signed_area(ring)) <= target)
                lo = mid;
            else
                hi = mid;
        }
        auto ring = detail::clip_halfplane(detail::unit_square(), u, lo);
        if (ring.size() < 3) continue;
        auto c = detail::evaluate("straight", std::move(ring), norm, false);
        if (c.area > target) continue;
        if (c.value < best.value) best = std::move(c);
    }
    return best;
}

// ---------------------------------------------------------------------------

/// Point on the square's boundary at perimeter coordinate s, counter-clockwise
/// from (-1,-1); s is taken modulo 8.
inline Point perimeter_point(double s) {
    s = std::fmod(s, 8.0);
    if (s < 0) s += 8.0;
    if (s < 2) return {-1 + s, -1};
    if (s < 4) return {1, -1 + (s - 2)};
    if (s < 6) return {1 - (s - 4), 1};
    return {-1, 1 - (s - 6)};
}

/// Inverse of perimeter_point for points on the boundary.
inline double perimeter_coordinate(Point p) {
    if (p.y == -1 && p.x < 1) return p.x + 1;
    if (p.x == 1 && p.y < 1) return 2 + p.y + 1;
    if (p.y == 1 && p.x > -1) return 4 + 1 - p.x;
    if (p.x == -1) return 6 + 1 - p.y;
    throw DomainError("point is not on the square's boundary");
}

/// Region cut off by one interior curve with endpoints on the square's
/// boundary. The boundary arc runs from the curve's end back to its start,
/// counter-clockwise unless `clockwise` is set.
struct CandidateRegion {
    double s0 = 0.0;
    double s1 = 0.0;
    std::vector<Point> controls;
    bool clockwise = false;

    [[nodiscard]] std::vector<Point> interior_curve() const {
        std::vector<Point> c{perimeter_point(s0)};
        c.insert(c.end(), controls.begin(), controls.end());
        c.push_back(perimeter_point(s1));
        return c;
    }

    /// Unwrapped perimeter interval (from, to) of the boundary arc.
    [[nodiscard]] std::pair<double, double> arc() const {
        double a = std::fmod(s1, 8.0);
        if (a < 0) a += 8.0;
        double b = std::fmod(s0, 8.0);
        if (b < 0) b += 8.0;
        if (!clockwise) {
            if (b <= a) b += 8.0;
        } else if (b >= a) {
            b -= 8.0;
        }
        return {a, b};
    }

    [[nodiscard]] std::vector<Point> ring() const {
        auto r = interior_curve();
        const auto [a, b] = arc();
        if (!clockwise) {
            for (double k = std::floor(a / 2) * 2 + 2; k < b; k += 2) r.push_back(perimeter_point(k));
        } else {
            for (double k = std::ceil(a / 2) * 2 - 2; k > b; k -= 2) r.push_back(perimeter_point(k));
        }
        return r;
    }

    [[nodiscard]] double area() const { return std::abs(signed_area(ring())); }

    [[nodiscard]] bool valid() const {
        if (controls.empty()) return false;
        for (auto c : controls)
            if (!(std::abs(c.x) < 1 && std::abs(c.y) < 1)) return false;
        if (perimeter_point(s0) == perimeter_point(s1)) return false;
        const auto r = ring();
        return r.size() >= 3 && is_simple(r, true) && signed_area(r) != 0.0;
    }

    [[nodiscard]] Polygon polygon() const {
        if (!valid()) throw DomainError("candidate region is not a simple polygon");
        return Polygon::make(ring());
    }

    [[nodiscard]] CandidateRegion complement() const {
        CandidateRegion c = *this;
        c.clockwise = !clockwise;
        return c;
    }

    /// Energy of the interior curve alone, in a fixed order, so that a region
    /// and its complement agree exactly.
    [[nodiscard]] double surface_energy(const Norm& norm) const {
        const auto c = interior_curve();
        double e = 0.0;
        for (std::size_t i = 0; i + 1 < c.size(); ++i) e += norm(detail::outward_normal(c[i], c[i + 1]));
        return e;
    }
};

/// Rewrites a polygon made of one interior chain plus boundary arcs as a
/// CandidateRegion with k control points resampled along the chain.
inline std::optional<CandidateRegion> candidate_from_polygon(const Polygon& poly, int k) {
    const auto& v = poly.vertices;
    const std::size_t m = v.size();
    std::vector<std::uint8_t> free(m);
    std::size_t free_count = 0;
    for (std::size_t i = 0; i < m; ++i) free_count += free[i] = !detail::on_square_side(v[i], v[(i + 1) % m]);
    if (free_count == 0 || free_count == m) return std::nullopt;
    // Start of the chain: a free edge preceded by a boundary edge.
    std::size_t start = m;
    for (std::size_t i = 0; i < m; ++i)
        if (free[i] && !free[(i + m - 1) % m]) {
            if (start != m) return std::nullopt;  // more than one chain
            start = i;
        }
    if (start == m) return std::nullopt;
    std::vector<Point> chain{v[start]};
    for (std::size_t i = start; free[i % m]; ++i) chain.push_back(v[(i + 1) % m]);
    const double total = polyline_length(chain, false);
    CandidateRegion c;
    const Point a = detail::snap(chain.front());
    const Point b = detail::snap(chain.back());
    try {
        c.s0 = perimeter_coordinate(a);
        c.s1 = perimeter_coordinate(b);
    } catch (const DomainError&) {
        return std::nullopt;
    }
    std::size_t seg = 0;
    double walked = 0.0;
    for (int j = 1; j <= k; ++j) {
        const double at = total * j / (k + 1);
        while (seg + 1 < chain.size() - 1 && walked + norm2(chain[seg + 1] - chain[seg]) < at) walked += norm2(chain[seg + 1] - chain[seg]), ++seg;
        const double len = norm2(chain[seg + 1] - chain[seg]);
        const double t = len > 0 ? std::clamp((at - walked) / len, 0.0, 1.0) : 0.0;
        Point p = chain[seg] + t * (chain[seg + 1] - chain[seg]);
        p = {std::clamp(p.x, -1 + 1e-9, 1 - 1e-9), std::clamp(p.y, -1 + 1e-9, 1 - 1e-9)};
        c.controls.push_back(p);
    }
    // The arc follows the polygon's orientation after the chain.
    c.clockwise = false;
    if (!c.valid() || std::abs(c.area() - area(poly)) > std::abs(c.complement().area() - area(poly))) c = c.complement();
    if (!c.valid()) return std::nullopt;
    return c;
}

namespace detail {

/// Dilates the region about the midpoint of its boundary arc until its area
/// equals target (or as far as the square allows). Returns false when the
/// projected region is not simple.
inline bool project_area(CandidateRegion& r, double target) {
    const auto [a, b] = r.arc();
    const double sa = (a + b) / 2;
    const Point anchor = perimeter_point(sa);
    // Unwrapped endpoint coordinates measured from the anchor along the arc.
    const double e1 = a - sa;
    const double e0 = b - sa;
    const CandidateRegion base = r;
    auto at = [&](double t) {
        CandidateRegion c = base;
        c.s1 = sa + t * e1;
        c.s0 = sa + t * e0;
        for (std::size_t i = 0; i < c.controls.size(); ++i) c.controls[i] = anchor + t * (base.controls[i] - anchor);
        return c;
    };
    double tmax = (8.0 - 1e-9) / std::abs(e0 - e1);
    for (auto p : base.controls) {
        const Point d = p - anchor;
        auto limit = [&](double o, double dd) {
            if (dd > 0) tmax = std::min(tmax, ((1 - 1e-9) - o) / dd);
            if (dd < 0) tmax = std::min(tmax, ((-1 + 1e-9) - o) / dd);
        };
        limit(anchor.x, d.x);
        limit(anchor.y, d.y);
    }
    double lo = 0.0;
    double hi = 1.0;
    const double now = base.area();
    if (std::abs(now - target) <= 1e-13 * target) return base.valid();
    if (now < target) {
        lo = 1.0;
        hi = std::max(1.0, tmax);
        if (at(hi).area() <= target) {
            r = at(hi);
            return r.valid();
        }
    }
    for (int it = 0; it < 60 && hi - lo > 1e-15; ++it) {
        const double mid = (lo + hi) / 2;
        if (at(mid).area() <= target)
            lo = mid;
        else
            hi = mid;
    }
    r = at(lo);
    return r.valid();
}

}  // namespace detail

// ---------------------------------------------------------------------------

struct SolverOptions {
    int control_points = 8;
    int restarts = 8;
    std::uint64_t seed = 0;
    int iterations = 3000;
    int wulff_directions = 720;
    int cut_angles = 720;
    std::vector<Polygon> extra_candidates;
    unsigned workers = default_workers();
};

struct FamilyValue {
    std::string family;
    double value = std::numeric_limits<double>::infinity();
    Polygon polygon;
    bool clamped = false;
};

struct VariationalResult {
    double alpha = 0.0;
    double phi_hat = std::numeric_limits<double>::infinity();
    Polygon optimizer;
    std::string optimizer_family;
    double optimizer_area = 0.0;
    std::vector<FamilyValue> families;
    std::vector<double> trace;  // best free-form value per restart
};

namespace detail {

struct Annealed {
    double value = std::numeric_limits<double>::infinity();
    std::optional<CandidateRegion> region;
};

inline Annealed anneal_region(const Norm& norm, CandidateRegion start, double target, int iterations, std::uint64_t seed) {
    Annealed best;
    if (!project_area(start, target)) return best;
    auto ratio = [&](const CandidateRegion& c) { return c.surface_energy(norm) / c.area(); };
    CandidateRegion cur = start;
    double cur_v = ratio(cur);
    best = {cur_v, cur};
    Xoshiro256 rng(seed);
    const std::size_t params = 2 + 2 * cur.controls.size();
    const double t0 = 0.05 * cur_v;
    const double t1 = 1e-5 * cur_v;
    auto propose = [&](const CandidateRegion& from, std::size_t which, double step) {
        CandidateRegion c = from;
        if (which == 0)
            c.s0 += step;
        else if (which == 1)
            c.s1 += step;
        else if (which % 2 == 0)
            c.controls[(which - 2) / 2].x += step;
        else
            c.controls[(which - 2) / 2].y += step;
        return c;
    };
    for (int it = 0; it < iterations; ++it) {
        const double frac = static_cast<double>(it) / std::max(1, iterations);
        const double temp = t0 * std::pow(t1 / t0, frac);
        const double sigma = 0.25 * (1 - frac) + 0.002;
        auto c = propose(cur, rng.below(params), sigma * rng.normal());
        if (!project_area(c, target)) continue;
        const double v = ratio(c);
        if (v > cur_v && rng.uniform() >= std::exp(-(v - cur_v) / temp)) continue;
        cur = std::move(c);
        cur_v = v;
        if (cur_v < best.value) best = {cur_v, cur};
    }
    // Pattern-search refinement of the best region.
    cur = *best.region;
    cur_v = best.value;
    for (double step = 0.05; step > 1e-6; step /= 2) {
        bool improved = true;
        for (int pass = 0; improved && pass < 4; ++pass) {
            improved = false;
            for (std::size_t w = 0; w < params; ++w)
                for (double sgn : {1.0, -1.0}) {
                    auto c = propose(cur, w, sgn * step);
                    if (!project_area(c, target)) continue;
                    const double v = ratio(c);
                    if (v < cur_v) {
                        cur = std::move(c);
                        cur_v = v;
                        improved = true;
                    }
                }
        }
    }
    if (cur_v < best.value) best = {cur_v, cur};
    return best;
}

}  // namespace detail

/// Numerical solution of the restricted isoperimetric problem: minimise
/// restricted energy over area among regions of area at most 2+alpha.
inline VariationalResult solve_restricted(const Norm& norm, double alpha, const SolverOptions& opt = {}) {
    detail::check_alpha(alpha);
    if (opt.control_points < 1) throw ArgumentError("at least one control point is required");
    if (opt.restarts < 0 || opt.iterations < 0) throw ArgumentError("restarts and iterations must be non-negative");
    const double target = 2 + alpha;
    VariationalResult res;
    res.alpha = alpha;

    std::vector<ShapeCandidate> structured{straight_cut_candidate(norm, alpha, opt.cut_angles),
                                           quarter_wulff_conductance(norm, alpha, opt.wulff_directions),
                                           half_wulff_candidate(norm, alpha, opt.wulff_directions)};
    for (const auto& s : structured) res.families.push_back({s.family, s.value, s.polygon, s.clamped});

    std::vector<CandidateRegion> seeds;
    for (const auto& s : structured)
        if (auto c = candidate_from_polygon(s.polygon, opt.control_points)) seeds.push_back(*c);
    for (const auto& poly : opt.extra_candidates)
        if (auto c = candidate_from_polygon(poly, opt.control_points)) seeds.push_back(*c);

    const auto runs = seeds.empty() ? 0 : static_cast<std::size_t>(opt.restarts);
    std::vector<detail::Annealed> outs(runs);
    parallel_for(
        runs,
        [&](std::size_t r) {
            outs[r] = detail::anneal_region(norm, seeds[r % seeds.size()], target, opt.iterations, hash_key(opt.seed, Stream::restart, r));
        },
        opt.workers);
    FamilyValue free{"free-form", std::numeric_limits<double>::infinity(), {}, false};
    for (const auto& o : outs) {
        res.trace.push_back(o.value);
        if (!o.region) continue;
        const Polygon p = o.region->polygon();
        if (area(p) > target * (1 + 1e-12)) continue;
        const double v = restricted_conductance(p, norm);
        if (v < free.value) free = {"free-form", v, p, false};
    }
    res.families.push_back(free);

    FamilyValue extra{"extra", std::numeric_limits<double>::infinity(), {}, false};
    for (const auto& poly : opt.extra_candidates) {
        if (!poly.in_square() || area(poly) > target * (1 + 1e-12)) continue;
        const double v = restricted_conductance(poly, norm);
        if (v < extra.value) extra = {"extra", v, poly, false};
    }
    if (!opt.extra_candidates.empty()) res.families.push_back(extra);

    for (const auto& f : res.families)
        if (f.value < res.phi_hat) {
            res.phi_hat = f.value;
            res.optimizer = f.polygon;
            res.optimizer_family = f.family;
        }
    res.optimizer_area = area(res.optimizer);
    return res;
}

/// Solves for increasing alpha, offering each optimizer to the next solve so
/// the values are monotone in alpha.
inline std::vector<VariationalResult> solve_alpha_sweep(const Norm& norm, std::vector<double> alphas, SolverOptions opt = {}) {
    std::vector<std::size_t> order(alphas.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return alphas[a] < alphas[b]; });
    std::vector<VariationalResult> out(alphas.size());
    for (auto i : order) {
        out[i] = solve_restricted(norm, alphas[i], opt);
        opt.extra_candidates.push_back(out[i].optimizer);
    }
    return out;
}

/// |((2+a)/(2-a)) phi(2+a) - phi(2-a)| relative to phi(2+a).
inline double duality_residual(double alpha, double phi_plus, double phi_minus) {
    return std::abs((2 + alpha) / (2 - alpha) * phi_plus - phi_minus) / phi_plus;
}

// ---------------------------------------------------------------------------

namespace detail {

inline double point_segment_distance(Point q, Point a, Point b) {
    const Point d = b - a;
    const double l2 = dot(d, d);
    const double t = l2 > 0 ? std::clamp(dot(q - a, d) / l2, 0.0, 1.0) : 0.0;
    return norm2(q - (a + t * d));
}

inline void douglas_peucker(const std::vector<Point>& pts, std::size_t i, std::size_t j, double tol, std::vector<std::uint8_t>& keep) {
    if (j <= i + 1) return;
    double worst = -1.0;
    std::size_t arg = i;
    for (std::size_t k = i + 1; k < j; ++k) {
        const double d = point_segment_distance(pts[k], pts[i], pts[j]);
        if (d > worst) worst = d, arg = k;
    }
    if (worst > tol) {
        keep[arg] = 1;
        douglas_peucker(pts, i, arg, tol, keep);
        douglas_peucker(pts, arg, j, tol, keep);
    }
}

inline double norm_length(const std::vector<Point>& pts, bool closed, const Norm& norm) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) s += norm(pts[i + 1] - pts[i]);
    if (closed && pts.size() > 1) s += norm(pts.front() - pts.back());
    return s;
}

}  // namespace detail

/// Simplified simple polyline within l-infinity Hausdorff distance epsilon of
/// the input, no longer in the norm than the input plus epsilon and, for
/// closed curves, enclosing an area within epsilon of the input's.
inline PlanarCurve polygonal_approximation(const PlanarCurve& curve, const Norm& norm, double epsilon) {
    if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
    const auto& pts = curve.points;
    if (pts.size() < 2) return curve;
    if (!is_simple(pts, curve.closed)) throw DomainError("input curve is not simple");
    const double len_in = detail::norm_length(pts, curve.closed, norm);
    const double area_in = curve.closed ? std::abs(signed_area(pts)) : 0.0;
    // Euclidean tolerance eps/sqrt(2) bounds the l-infinity Hausdorff distance
    // in both directions.
    for (double tol = epsilon / std::numbers::sqrt2; tol > 1e-15; tol /= 2) {
        std::vector<std::uint8_t> keep(pts.size(), 0);
        keep.front() = 1;
        if (curve.closed) {
            std::size_t far = 0;
            for (std::size_t k = 1; k < pts.size(); ++k)
                if (norm2(pts[k] - pts[0]) > norm2(pts[far] - pts[0])) far = k;
            keep[far] = 1;
            auto loop = pts;
            loop.push_back(pts.front());
            std::vector<std::uint8_t> kl(loop.size(), 0);
            detail::douglas_peucker(loop, 0, far, tol, kl);
            detail::douglas_peucker(loop, far, loop.size() - 1, tol, kl);
            for (std::size_t k = 0; k < pts.size(); ++k) keep[k] |= kl[k];
            // A closed output needs three vertices.
            if (std::count(keep.begin(), keep.end(), 1) < 3) {
                std::size_t arg = 0;
                double worst = -1;
                for (std::size_t k = 1; k < pts.size(); ++k) {
                    if (keep[k]) continue;
                    const double d = detail::point_segment_distance(pts[k], pts[0], pts[far]);
                    if (d > worst) worst = d, arg = k;
                }
                keep[arg] = 1;
            }
        } else {
            keep.back() = 1;
            detail::douglas_peucker(pts, 0, pts.size() - 1, tol, keep);
        }
        PlanarCurve out{{}, curve.closed};
        for (std::size_t k = 0; k < pts.size(); ++k)
            if (keep[k]) out.points.push_back(pts[k]);
        if (!is_simple(out.points, out.closed)) continue;
        if (detail::norm_length(out.points, out.closed, norm) > len_in + epsilon) continue;
        if (curve.closed && std::abs(std::abs(signed_area(out.points)) - area_in) > epsilon) continue;
        return out;
    }
    return curve;
}

inline double hausdorff_distance(const Polygon& a, const Polygon& b, double resolution) {
    return hausdorff_distance(a.region(), b.region(), resolution);
}

// ---------------------------------------------------------------------------

namespace detail {

struct Precision {
    explicit Precision(std::ostream& os) : os_(os), old_(os.precision(12)) {}
    ~Precision() { os_.precision(old_); }
    Precision(const Precision&) = delete;
    Precision& operator=(const Precision&) = delete;

private:
    std::ostream& os_;
    std::streamsize old_;
};

}  // namespace detail

inline void write_polygon(std::ostream& os, const Polygon& poly) {
    detail::Precision keep(os);
    os << "polygon " << poly.vertices.size() << '\n';
    for (auto p : poly.vertices) os << p.x << ' ' << p.y << '\n';
}

inline Polygon read_polygon(std::istream& is) {
    std::string tag;
    std::size_t m = 0;
    if (!(is >> tag >> m) || tag != "polygon") throw DataError("expected 'polygon <count>'");
    std::vector<Point> pts(m);
    for (auto& p : pts)
        if (!(is >> p.x >> p.y)) throw DataError("truncated polygon");
    try {
        return Polygon::make(std::move(pts));
    } catch (const DomainError& e) {
        throw DataError(e.what());
    }
}

inline void write_variational_result(std::ostream& os, const VariationalResult& r, const std::string& norm_name) {
    {
        detail::Precision keep(os);
        os << "norm " << norm_name << '\n';
        os << "alpha " << r.alpha << '\n';
        os << "phi_hat " << r.phi_hat << '\n';
        os << "optimizer_family " << r.optimizer_family << '\n';
        os << "optimizer_area " << r.optimizer_area << '\n';
        for (const auto& f : r.families) os << "family " << f.family << ' ' << f.value << (f.clamped ? " clamped" : "") << '\n';
        os << "trace";
        for (double t : r.trace) os << ' ' << t;
        os << '\n';
    }
    write_polygon(os, r.optimizer);
}

}  // namespace perciso
