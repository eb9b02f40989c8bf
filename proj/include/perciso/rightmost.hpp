#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "perciso/error.hpp"
#include "perciso/geometry.hpp"
#include "perciso/lattice.hpp"

namespace perciso {

/// Vertices x0..xm; the oriented edges are the consecutive pairs.
class LatticePath {
public:
    LatticePath() = default;

    explicit LatticePath(std::vector<Vertex> vertices) : verts_(std::move(vertices)) {
        if (verts_.empty()) throw ArgumentError("a path needs at least one vertex");
        for (std::size_t i = 0; i + 1 < verts_.size(); ++i)
            if (!direction_between(verts_[i], verts_[i + 1])) throw ArgumentError("consecutive path vertices are not adjacent");
    }

    static LatticePath from_steps(Vertex start, const std::vector<Dir>& steps) {
        std::vector<Vertex> v{start};
        for (Dir d : steps) v.push_back(step(v.back(), d));
        return LatticePath(std::move(v));
    }

    [[nodiscard]] std::size_t length() const { return verts_.empty() ? 0 : verts_.size() - 1; }
    [[nodiscard]] const std::vector<Vertex>& vertices() const { return verts_; }
    [[nodiscard]] Vertex vertex(std::size_t i) const { return verts_[i]; }
    [[nodiscard]] Vertex front() const { return verts_.front(); }
    [[nodiscard]] Vertex back() const { return verts_.back(); }
    [[nodiscard]] OrientedEdge edge(std::size_t i) const { return {verts_[i], *direction_between(verts_[i], verts_[i + 1])}; }
    [[nodiscard]] std::vector<OrientedEdge> edges() const {
        std::vector<OrientedEdge> out;
        for (std::size_t i = 0; i < length(); ++i) out.push_back(edge(i));
        return out;
    }
    [[nodiscard]] bool is_circuit() const { return length() >= 1 && verts_.front() == verts_.back(); }

    [[nodiscard]] LatticePath reversed() const { return LatticePath(std::vector<Vertex>(verts_.rbegin(), verts_.rend())); }

    friend bool operator==(const LatticePath&, const LatticePath&) = default;

private:
    std::vector<Vertex> verts_;
};

/// Oriented edges at v strictly between <v,prev> and <v,next>, counter-clockwise.
inline std::vector<OrientedEdge> right_boundary_at(std::optional<Vertex> prev, Vertex v, std::optional<Vertex> next) {
    std::optional<Dir> in;
    std::optional<Dir> out;
    if (prev && !(in = direction_between(v, *prev))) throw ArgumentError("previous vertex is not adjacent");
    if (next && !(out = direction_between(v, *next))) throw ArgumentError("next vertex is not adjacent");
    std::vector<OrientedEdge> edges;
    if (!in || !out) return edges;
    const int count = ((static_cast<int>(*out) - static_cast<int>(*in) - 1) % 4 + 4) % 4;
    for (int k = 1; k <= count; ++k) edges.push_back({v, rotate_ccw(*in, k)});
    return edges;
}

/// Right-boundary contributions per path vertex; circuits wrap around at x0.
struct RightBoundary {
    std::vector<std::vector<OrientedEdge>> at;

    [[nodiscard]] std::set<OrientedEdge> edges() const {
        std::set<OrientedEdge> s;
        for (const auto& list : at) s.insert(list.begin(), list.end());
        return s;
    }
};

inline RightBoundary right_boundary(const LatticePath& path) {
    RightBoundary rb;
    const std::size_t m = path.length();
    rb.at.resize(m + 1);
    for (std::size_t i = 1; i < m; ++i) rb.at[i] = right_boundary_at(path.vertex(i - 1), path.vertex(i), path.vertex(i + 1));
    if (path.is_circuit()) rb.at[0] = right_boundary_at(path.vertex(m - 1), path.vertex(0), path.vertex(1));
    return rb;
}

inline bool is_simple_path(const LatticePath& path) {
    auto e = path.edges();
    std::sort(e.begin(), e.end());
    return std::adjacent_find(e.begin(), e.end()) == e.end();
}

inline bool is_rightmost(const LatticePath& path) {
    if (!is_simple_path(path)) return false;
    const auto rb = right_boundary(path).edges();
    for (const auto& e : path.edges())
        if (rb.contains(e)) return false;
    return true;
}

enum class WeightMode { infinite, within_box };

/// Distinct open edges of the right boundary, counted without orientation.
inline std::set<Edge> weight_edges(const LatticePath& path, const Config& cfg, WeightMode mode) {
    std::set<Edge> out;
    for (const auto& e : right_boundary(path).edges()) {
        if (!cfg.is_open(e)) continue;
        if (mode == WeightMode::within_box && !(cfg.in_inner(e.from) && cfg.in_inner(e.to()))) continue;
        out.insert(Edge::of(e));
    }
    return out;
}

inline std::int64_t path_weight(const LatticePath& path, const Config& cfg, WeightMode mode) {
    for (const auto& v : path.vertices())
        if (!cfg.in_box(v)) throw ArgumentError("path leaves the padded box");
    return static_cast<std::int64_t>(weight_edges(path, cfg, mode).size());
}

// ---------------------------------------------------------------------------
// Interfaces. Each element is a lattice edge (a medial vertex). Path edges keep
// the path orientation; right-boundary edges point away from their pivot.

struct InterfaceElement {
    OrientedEdge edge;
    bool cut = false;

    friend bool operator==(const InterfaceElement&, const InterfaceElement&) = default;
};

struct Interface {
    std::vector<InterfaceElement> elements;
    bool closed = false;

    [[nodiscard]] std::size_t size() const { return elements.size(); }
    friend bool operator==(const Interface&, const Interface&) = default;
};

namespace detail {

/// Whether two distinct lattice edges bound a common unit face.
inline bool share_face(const Edge& a, const Edge& b) {
    const bool ha = a.a.y == a.b.y;
    const bool hb = b.a.y == b.b.y;
    if (ha && hb) return a.a.x == b.a.x && std::abs(a.a.y - b.a.y) == 1;
    if (!ha && !hb) return a.a.y == b.a.y && std::abs(a.a.x - b.a.x) == 1;
    // Perpendicular edges share a face exactly when they share an endpoint.
    return a.a == b.a || a.a == b.b || a.b == b.a || a.b == b.b;
}

/// Shared endpoint of two lattice edges, if any.
inline std::optional<Vertex> common_vertex(const Edge& a, const Edge& b) {
    if (a.a == b.a || a.a == b.b) return a.a;
    if (a.b == b.a || a.b == b.b) return a.b;
    return std::nullopt;
}

inline void assign_flags(Interface& iface) {
    const std::size_t m = iface.elements.size();
    for (std::size_t j = 0; j < m; ++j) {
        if (!iface.closed && (j == 0 || j + 1 == m)) {
            iface.elements[j].cut = false;
            continue;
        }
        const Edge prev = Edge::of(iface.elements[(j + m - 1) % m].edge);
        const Edge next = Edge::of(iface.elements[(j + 1) % m].edge);
        iface.elements[j].cut = !share_face(prev, next);
    }
}

}  // namespace detail

/// The trivial circuit around an isolated vertex: its four edges, all cut through.
inline Interface trivial_interface(Vertex v) {
    Interface iface;
    iface.closed = true;
    for (Dir d : all_dirs) iface.elements.push_back({{v, d}, true});
    return iface;
}

inline Interface path_to_interface(const LatticePath& path) {
    if (path.length() == 0) throw DomainError("a path without edges has no interface");
    if (!is_rightmost(path)) throw DomainError("path is not right-most");
    Interface iface;
    iface.closed = path.is_circuit();
    const std::size_t m = path.length();
    for (std::size_t i = 1; i <= m; ++i) {
        iface.elements.push_back({path.edge(i - 1), false});
        if (i < m)
            for (const auto& e : right_boundary_at(path.vertex(i - 1), path.vertex(i), path.vertex(i + 1)))
                iface.elements.push_back({e, true});
        else if (iface.closed)
            for (const auto& e : right_boundary_at(path.vertex(m - 1), path.vertex(m), path.vertex(1)))
                iface.elements.push_back({e, true});
    }
    detail::assign_flags(iface);
    return iface;
}

inline LatticePath interface_to_path(const Interface& iface) {
    if (iface.elements.empty()) throw DomainError("empty interface");
    if (iface == trivial_interface(iface.elements.front().edge.from)) return LatticePath({iface.elements.front().edge.from});
    std::vector<Vertex> verts;
    for (const auto& el : iface.elements) {
        if (el.cut) continue;
        if (verts.empty()) verts.push_back(el.edge.from);
        if (verts.back() != el.edge.from) throw DomainError("interface path edges do not chain");
        verts.push_back(el.edge.to());
    }
    if (verts.empty()) throw DomainError("interface has no path edges");
    LatticePath path(std::move(verts));
    if (path.is_circuit() != iface.closed) throw DomainError("interface closure does not match its path");
    if (!is_rightmost(path) || path_to_interface(path) != iface) throw DomainError("not a valid interface");
    return path;
}

/// Corner rounding: a reflecting element is placed 1/4 into the face it
/// reflects off, a cut element 1/4 from its pivot along the edge.
struct PlanarCurve {
    std::vector<Point> points;
    bool closed = false;
};

inline PlanarCurve corner_round(const Interface& iface) {
    if (!iface.closed) throw DomainError("corner rounding needs a closed interface");
    const std::size_t m = iface.elements.size();
    PlanarCurve curve;
    curve.closed = true;
    for (std::size_t j = 0; j < m; ++j) {
        const Edge self = Edge::of(iface.elements[j].edge);
        const Edge prev = Edge::of(iface.elements[(j + m - 1) % m].edge);
        const Edge next = Edge::of(iface.elements[(j + 1) % m].edge);
        const Point mid{0.5 * (self.a.x + self.b.x), 0.5 * (self.a.y + self.b.y)};
        if (!iface.elements[j].cut) {
            // Face centre: midpoint of the two parallel neighbours' midpoints.
            const Point face{0.25 * (prev.a.x + prev.b.x + next.a.x + next.b.x), 0.25 * (prev.a.y + prev.b.y + next.a.y + next.b.y)};
            curve.points.push_back(mid + 0.5 * (face - mid));
        } else {
            const auto pivot = detail::common_vertex(prev, next);
            if (!pivot) throw DomainError("cut element without a common pivot");
            const Point pv{static_cast<double>(pivot->x), static_cast<double>(pivot->y)};
            curve.points.push_back(pv + 0.5 * (mid - pv));
        }
    }
    return curve;
}

// ---------------------------------------------------------------------------
// Hulls: points with odd winding number, plus the curve itself.

class Hull {
public:
    explicit Hull(std::vector<Point> polygon) : poly_(std::move(polygon)) {}

    [[nodiscard]] const std::vector<Point>& polygon() const { return poly_; }
    [[nodiscard]] bool contains(Point q) const { return point_on_ring(poly_, q) || point_in_ring(poly_, q); }
    [[nodiscard]] double area() const { return std::abs(signed_area(poly_)); }

    /// Lattice points of the hull within [-radius, radius]^2, sorted.
    [[nodiscard]] std::vector<Vertex> lattice_points(int radius) const {
        std::vector<Vertex> out;
        BoundingBox bb;
        for (const auto& p : poly_) bb.add(p);
        if (bb.empty()) return out;
        const int y0 = std::max(-radius, static_cast<int>(std::ceil(bb.lo.y)));
        const int y1 = std::min(radius, static_cast<int>(std::floor(bb.hi.y)));
        const int x0 = std::max(-radius, static_cast<int>(std::ceil(bb.lo.x)));
        const int x1 = std::min(radius, static_cast<int>(std::floor(bb.hi.x)));
        Region r;
        r.rings.push_back(poly_);
        for (int y = y0; y <= y1; ++y) {
            const auto xs = r.crossings(y);
            std::size_t k = 0;
            bool inside = false;
            for (int x = x0; x <= x1; ++x) {
                while (k < xs.size() && xs[k] <= x) {
                    inside = !inside;
                    ++k;
                }
                const Point q{static_cast<double>(x), static_cast<double>(y)};
                if (inside || point_on_ring(poly_, q)) out.push_back({x, y});
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    std::vector<Point> poly_;
};

inline Hull hull(const PlanarCurve& curve) {
    if (!curve.closed) throw DomainError("hull of an open curve");
    return Hull(curve.points);
}

// ---------------------------------------------------------------------------
// Circuit decomposition of a connected subgraph by tracing the faces of the
// graph of open edges inside U. Each face walk turns as far right as possible,
// so the edges it skips are exactly the open edges from U into that face.

struct Circuit {
    LatticePath path;
    Interface iface;
    PlanarCurve curve;
    std::set<Edge> weight;  // open right-boundary edges
    double signed_area = 0.0;
};

struct CircuitDecomposition {
    Circuit outer;
    std::vector<Circuit> inner;
    std::int64_t dper = 0;
    double vol_area = 0.0;

    [[nodiscard]] Region region() const {
        Region r;
        r.rings.push_back(outer.curve.points);
        for (const auto& c : inner) r.rings.push_back(c.curve.points);
        return r;
    }
};

namespace detail {

inline Circuit make_circuit(const LatticePath& path, const Config& cfg) {
    Circuit c;
    c.path = path;
    c.iface = path.length() == 0 ? trivial_interface(path.front()) : path_to_interface(path);
    c.curve = corner_round(c.iface);
    if (path.length() == 0) {
        for (Dir d : all_dirs)
            if (cfg.is_open(path.front(), d)) c.weight.insert(Edge::between(path.front(), step(path.front(), d)));
    } else {
        c.weight = weight_edges(path, cfg, WeightMode::infinite);
    }
    c.signed_area = signed_area(c.curve.points);
    return c;
}

}  // namespace detail

inline bool is_connected(const Subgraph& u) {
    if (u.empty()) return false;
    const Config& cfg = u.config();
    const auto mask = u.mask();
    std::vector<std::uint8_t> seen(cfg.vertex_count(), 0);
    std::vector<Vertex> stack{u.vertices().front()};
    seen[cfg.index(stack.back())] = 1;
    std::size_t count = 0;
    while (!stack.empty()) {
        const Vertex v = stack.back();
        stack.pop_back();
        ++count;
        for (Dir d : all_dirs) {
            if (!cfg.is_open(v, d)) continue;
            const Vertex w = step(v, d);
            const auto i = cfg.index(w);
            if (mask[i] && !seen[i]) {
                seen[i] = 1;
                stack.push_back(w);
            }
        }
    }
    return count == u.size();
}

inline CircuitDecomposition circuit_decomposition(const Subgraph& u) {
    if (!is_connected(u)) throw DomainError("subgraph is not connected");
    const Config& cfg = u.config();
    const auto mask = u.mask();
    auto u_edge = [&](Vertex v, Dir d) { return cfg.is_open(v, d) && mask[cfg.index(step(v, d))]; };

    CircuitDecomposition out;
    if (u.size() == 1) {
        out.outer = detail::make_circuit(LatticePath({u.vertices().front()}), cfg);
        out.vol_area = std::abs(out.outer.signed_area);
        return out;
    }

    std::set<OrientedEdge> visited;
    std::vector<Circuit> circuits;
    for (const auto& v : u.vertices())
        for (Dir d : all_dirs) {
            if (!u_edge(v, d) || visited.contains({v, d})) continue;
            // The smallest unvisited oriented edge starts each walk, so every
            // cycle is traced from its smallest oriented edge.
            std::vector<Vertex> walk{v};
            OrientedEdge e{v, d};
            do {
                visited.insert(e);
                const Vertex b = e.to();
                walk.push_back(b);
                const Dir back = opposite(e.dir);
                Dir nd = back;
                for (int k = 1; k <= 4; ++k) {
                    nd = rotate_ccw(back, k);
                    if (u_edge(b, nd)) break;
                }
                e = {b, nd};
            } while (e != OrientedEdge{v, d});
            circuits.push_back(detail::make_circuit(LatticePath(std::move(walk)), cfg));
        }

    std::size_t outer_count = 0;
    for (auto& c : circuits) {
        if (c.signed_area > 0) {
            out.outer = std::move(c);
            ++outer_count;
        } else if (!c.weight.empty()) {
            out.inner.push_back(std::move(c));
        }
    }
    if (outer_count != 1) throw DomainError("face tracing found no unique outer circuit");
    std::sort(out.inner.begin(), out.inner.end(),
              [](const Circuit& a, const Circuit& b) { return a.path.edge(0) < b.path.edge(0); });

    out.dper = static_cast<std::int64_t>(out.outer.path.length());
    out.vol_area = std::abs(out.outer.signed_area);
    for (const auto& c : out.inner) {
        out.dper += static_cast<std::int64_t>(c.path.length());
        out.vol_area -= std::abs(c.signed_area);
    }
    return out;
}

struct DperVol {
    std::int64_t dper = 0;
    double vol_area = 0.0;
    bool well_proportioned = false;
};

inline DperVol dper_vol(const Subgraph& u) {
    const auto dec = circuit_decomposition(u);
    return {dec.dper, dec.vol_area, static_cast<double>(dec.dper) <= std::pow(dec.vol_area, 2.0 / 3.0)};
}

/// Outcome of re-checking the four decomposition properties.
struct DecompositionCheck {
    bool curves_disjoint = true;
    bool weights_partition_boundary = true;
    bool hull_identity = true;
    bool holes_are_unions_of_components = true;

    [[nodiscard]] bool all() const {
        return curves_disjoint && weights_partition_boundary && hull_identity && holes_are_unions_of_components;
    }
};

inline DecompositionCheck verify_decomposition(const Subgraph& u, const CircuitDecomposition& dec) {
    DecompositionCheck check;
    const ClusterContext& ctx = u.context();
    const Config& cfg = u.config();
    const int r = cfg.radius();

    std::vector<const Circuit*> all{&dec.outer};
    for (const auto& c : dec.inner) all.push_back(&c);

    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            const auto& a = all[i]->curve.points;
            const auto& b = all[j]->curve.points;
            for (std::size_t s = 0; s < a.size() && check.curves_disjoint; ++s)
                for (std::size_t t = 0; t < b.size(); ++t)
                    if (segments_intersect(a[s], a[(s + 1) % a.size()], b[t], b[(t + 1) % b.size()])) {
                        check.curves_disjoint = false;
                        break;
                    }
        }

    std::vector<Edge> weights;
    for (const auto* c : all) weights.insert(weights.end(), c->weight.begin(), c->weight.end());
    std::sort(weights.begin(), weights.end());
    const bool disjoint = std::adjacent_find(weights.begin(), weights.end()) == weights.end();
    check.weights_partition_boundary = disjoint && weights == edge_boundary(u, BoundaryMode::infinite);

    std::vector<std::uint8_t> region(cfg.vertex_count(), 0);
    for (const auto& v : hull(dec.outer.curve).lattice_points(r)) region[cfg.index(v)] = 1;
    std::vector<std::vector<Vertex>> holes;
    for (const auto& c : dec.inner) {
        holes.push_back(hull(c.curve).lattice_points(r));
        for (const auto& v : holes.back()) region[cfg.index(v)] = 0;
    }
    for (std::size_t i = 0; i < cfg.vertex_count() && check.hull_identity; ++i) {
        const Vertex v = cfg.vertex(i);
        if (ctx.trace[i] && (region[i] != 0) != u.contains(v)) check.hull_identity = false;
    }

    // Components of trace \ U, labelled by flood fill.
    const auto umask = u.mask();
    std::vector<std::int32_t> comp(cfg.vertex_count(), -1);
    std::vector<std::int32_t> comp_size;
    for (std::size_t i = 0; i < cfg.vertex_count(); ++i) {
        if (!ctx.trace[i] || umask[i] || comp[i] >= 0) continue;
        const auto id = static_cast<std::int32_t>(comp_size.size());
        comp_size.push_back(0);
        std::vector<Vertex> stack{cfg.vertex(i)};
        comp[i] = id;
        while (!stack.empty()) {
            const Vertex v = stack.back();
            stack.pop_back();
            ++comp_size.back();
            for (Dir d : all_dirs) {
                if (!cfg.is_open(v, d)) continue;
                const auto k = cfg.index(step(v, d));
                if (ctx.trace[k] && !umask[k] && comp[k] < 0) {
                    comp[k] = id;
                    stack.push_back(step(v, d));
                }
            }
        }
    }
    for (const auto& pts : holes) {
        std::map<std::int32_t, std::int32_t> seen;
        for (const auto& v : pts) {
            const auto i = cfg.index(v);
            if (!ctx.trace[i]) continue;
            if (umask[i] || comp[i] < 0) {
                check.holes_are_unions_of_components = false;
                continue;
            }
            ++seen[comp[i]];
        }
        for (const auto& [id, count] : seen)
            if (count != comp_size[static_cast<std::size_t>(id)]) check.holes_are_unions_of_components = false;
    }
    return check;
}

// ---------------------------------------------------------------------------
// Text format: a header line, then one step per line "x y D" (paths) or
// "x y D R|C" (interfaces).

inline void write_path(std::ostream& os, const LatticePath& path) {
    os << "path " << path.front().x << ' ' << path.front().y << ' ' << path.length() << '\n';
    for (const auto& e : path.edges()) os << e.from.x << ' ' << e.from.y << ' ' << dir_char(e.dir) << '\n';
}

namespace detail {

inline Dir parse_dir(char c) {
    switch (c) {
        case 'E': return Dir::east;
        case 'N': return Dir::north;
        case 'W': return Dir::west;
        case 'S': return Dir::south;
        default: throw DataError(std::string("bad direction '") + c + "'");
    }
}

}  // namespace detail

inline LatticePath read_path(std::istream& is) {
    std::string tag;
    Vertex start;
    std::size_t m = 0;
    if (!(is >> tag >> start.x >> start.y >> m) || tag != "path") throw DataError("bad path header");
    std::vector<Vertex> verts{start};
    for (std::size_t i = 0; i < m; ++i) {
        Vertex v;
        char d = 0;
        if (!(is >> v.x >> v.y >> d)) throw DataError("truncated path");
        if (v != verts.back()) throw DataError("path steps do not chain");
        verts.push_back(step(v, detail::parse_dir(d)));
    }
    return LatticePath(std::move(verts));
}

inline void write_interface(std::ostream& os, const Interface& iface) {
    os << "interface " << iface.size() << ' ' << (iface.closed ? "closed" : "open") << '\n';
    for (const auto& el : iface.elements)
        os << el.edge.from.x << ' ' << el.edge.from.y << ' ' << dir_char(el.edge.dir) << ' ' << (el.cut ? 'C' : 'R') << '\n';
}

inline Interface read_interface(std::istream& is) {
    std::string tag;
    std::string closure;
    std::size_t m = 0;
    if (!(is >> tag >> m >> closure) || tag != "interface" || (closure != "closed" && closure != "open"))
        throw DataError("bad interface header");
    Interface iface;
    iface.closed = closure == "closed";
    for (std::size_t i = 0; i < m; ++i) {
        Vertex v;
        char d = 0;
        char f = 0;
        if (!(is >> v.x >> v.y >> d >> f) || (f != 'C' && f != 'R')) throw DataError("truncated interface");
        iface.elements.push_back({{v, detail::parse_dir(d)}, f == 'C'});
    }
    return iface;
}

}  // namespace perciso
