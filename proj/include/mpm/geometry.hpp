#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <variant>
#include <vector>

#include "mpm/math.hpp"

namespace mpm {

struct ShapePose {
    Vec3 position;
    Quat orientation;
    Vec3 linear_velocity;
    Vec3 angular_velocity;

    Vec3 to_local(const Vec3& p) const {
        return orientation.rotate_inverse(p - position);
    }
    Vec3 to_world(const Vec3& p) const {
        return orientation.rotate(p) + position;
    }
    Vec3 dir_to_world(const Vec3& d) const { return orientation.rotate(d); }
};

inline Vec3 rigid_point_velocity(const ShapePose& pose, const Vec3& point) {
    return pose.linear_velocity +
           pose.angular_velocity.cross(point - pose.position);
}

enum class SdfRegion { bulk, surface, edge, spine, curve };

struct SdfSample {
    Real distance = 0;   // signed for closed/slicer, >= 0 for 1D geometries
    Vec3 normal{1, 0, 0};
    Vec3 tangent{0, 1, 0};  // 1D geometries only
    SdfRegion region = SdfRegion::bulk;
};

// Half-space below the local XZ plane; outward normal is local +Y.
struct PlaneGeom {};

struct SphereGeom {
    Real radius = 1;
};

struct BoxGeom {
    Vec3 half_extents{1, 1, 1};
};

// Planar blade. Local frame: blade in the XY plane (surface normal +Z),
// x in [-half_length, half_length], y in [-half_height, half_height].
// y = +half_height is the blunt spine edge, y = -half_height the cutting edge.
struct QuadSlicerGeom {
    Real half_length = 1;
    Real half_height = 1;
    Real spine_radius = Real(0.1);
};

// Open triangle mesh blade, local-frame vertices. Spine edges are vertex
// index pairs on the blunt boundary; they carry the circular spine field.
struct TriangleMeshSlicerGeom {
    std::vector<Vec3> vertices;
    std::vector<int> indices;             // triangle list
    std::vector<int> spine_edges;         // pairs of vertex indices
    Real spine_radius = Real(0.1);
};

// Circular arc, local frame: center at origin, arc in the XY plane starting
// at +X and sweeping toward +Y through `angle` radians (axis +Z).
struct ArcGeom {
    Real radius = 1;
    Real angle = Real(3.14159265358979323846);  // in (0, 2*pi]
};

// Polyline of local-frame vertices, >= 2.
struct ConnectedLineSegmentsGeom {
    std::vector<Vec3> vertices;
};

using Geometry = std::variant<PlaneGeom, SphereGeom, BoxGeom, QuadSlicerGeom,
                              TriangleMeshSlicerGeom, ArcGeom,
                              ConnectedLineSegmentsGeom>;

inline bool geometry_is_curve(const Geometry& g) {
    return std::holds_alternative<ArcGeom>(g) ||
           std::holds_alternative<ConnectedLineSegmentsGeom>(g);
}

inline bool geometry_is_slicer(const Geometry& g) {
    return std::holds_alternative<QuadSlicerGeom>(g) ||
           std::holds_alternative<TriangleMeshSlicerGeom>(g);
}

inline void validate_geometry(const Geometry& g) {
    if (auto* s = std::get_if<SphereGeom>(&g)) {
        if (s->radius <= 0) throw std::invalid_argument("sphere: radius <= 0");
    } else if (auto* b = std::get_if<BoxGeom>(&g)) {
        if (b->half_extents.x <= 0 || b->half_extents.y <= 0 ||
            b->half_extents.z <= 0)
            throw std::invalid_argument("box: half extents must be positive");
    } else if (auto* q = std::get_if<QuadSlicerGeom>(&g)) {
        if (q->half_length <= 0 || q->half_height <= 0)
            throw std::invalid_argument("quad slicer: zero-area blade");
        if (q->spine_radius <= 0)
            throw std::invalid_argument("quad slicer: spine radius <= 0");
    } else if (auto* t = std::get_if<TriangleMeshSlicerGeom>(&g)) {
        if (t->vertices.size() < 3 || t->indices.size() < 3 ||
            t->indices.size() % 3 != 0)
            throw std::invalid_argument("mesh slicer: invalid triangle list");
        if (t->spine_radius <= 0)
            throw std::invalid_argument("mesh slicer: spine radius <= 0");
        if (t->spine_edges.size() % 2 != 0)
            throw std::invalid_argument("mesh slicer: spine edge list must be pairs");
        for (int idx : t->indices)
            if (idx < 0 || static_cast<size_t>(idx) >= t->vertices.size())
                throw std::invalid_argument("mesh slicer: index out of range");
        for (int idx : t->spine_edges)
            if (idx < 0 || static_cast<size_t>(idx) >= t->vertices.size())
                throw std::invalid_argument("mesh slicer: spine index out of range");
    } else if (auto* a = std::get_if<ArcGeom>(&g)) {
        if (a->radius <= 0) throw std::invalid_argument("arc: radius <= 0");
        if (a->angle <= 0 || a->angle > Real(2 * 3.14159265358979323846 + 1e-6))
            throw std::invalid_argument("arc: angle must be in (0, 2*pi]");
    } else if (auto* c = std::get_if<ConnectedLineSegmentsGeom>(&g)) {
        if (c->vertices.size() < 2)
            throw std::invalid_argument("polyline: needs >= 2 vertices");
    }
}

namespace detail {

inline SdfSample sdf_plane_local(const Vec3& p) {
    SdfSample s;
    s.distance = p.y;
    s.normal = {0, 1, 0};
    s.region = SdfRegion::surface;
    return s;
}

inline SdfSample sdf_sphere_local(const SphereGeom& g, const Vec3& p) {
    SdfSample s;
    Real r = p.norm();
    s.distance = r - g.radius;
    s.normal = r > Real(1e-9) ? p / r : Vec3{1, 0, 0};
    s.region = SdfRegion::surface;
    return s;
}

inline SdfSample sdf_box_local(const BoxGeom& g, const Vec3& p) {
    SdfSample s;
    s.region = SdfRegion::surface;
    const Vec3& h = g.half_extents;
    Vec3 q{std::abs(p.x) - h.x, std::abs(p.y) - h.y, std::abs(p.z) - h.z};
    Real qmax = std::max({q.x, q.y, q.z});
    if (qmax <= 0) {
        // Inside: face of least penetration.
        s.distance = qmax;
        if (q.x >= q.y && q.x >= q.z)
            s.normal = {p.x >= 0 ? Real(1) : Real(-1), 0, 0};
        else if (q.y >= q.z)
            s.normal = {0, p.y >= 0 ? Real(1) : Real(-1), 0};
        else
            s.normal = {0, 0, p.z >= 0 ? Real(1) : Real(-1)};
        return s;
    }
    Vec3 closest{std::clamp(p.x, -h.x, h.x), std::clamp(p.y, -h.y, h.y),
                 std::clamp(p.z, -h.z, h.z)};
    Vec3 d = p - closest;
    s.distance = d.norm();
    s.normal = s.distance > Real(1e-9) ? d / s.distance : Vec3{1, 0, 0};
    return s;
}

inline SdfSample slicer_quad_local(const QuadSlicerGeom& g, const Vec3& p) {
    SdfSample s;
    if (p.y >= g.half_height) {
        // Nearest the spine edge: circular field around the segment
        // y = half_height, z = 0, x in [-half_length, half_length].
        Real cx = std::clamp(p.x, -g.half_length, g.half_length);
        Vec3 axis_pt{cx, g.half_height, 0};
        Vec3 d = p - axis_pt;
        Real r = d.norm();
        s.distance = r - g.spine_radius;
        s.normal = r > Real(1e-9) ? d / r : Vec3{0, 1, 0};
        s.region = SdfRegion::spine;
        return s;
    }
    if (std::abs(p.x) <= g.half_length && p.y >= -g.half_height) {
        // Two-sided surface field over the blade footprint.
        s.distance = p.z;
        s.normal = {0, 0, p.z >= 0 ? Real(1) : Real(-1)};
        s.region = SdfRegion::edge;
        return s;
    }
    s.region = SdfRegion::bulk;
    s.distance = std::numeric_limits<Real>::max();
    return s;
}

inline Vec3 closest_point_on_segment(const Vec3& a, const Vec3& b,
                                     const Vec3& p, Real& t_out) {
    Vec3 ab = b - a;
    Real len2 = ab.norm2();
    Real t = len2 > Real(1e-18) ? std::clamp((p - a).dot(ab) / len2, Real(0),
                                             Real(1))
                                : Real(0);
    t_out = t;
    return a + ab * t;
}

// Closest point on a triangle plus barycentric classification of the
// feature it lies on (interior vs edge/vertex).
inline Vec3 closest_point_on_triangle(const Vec3& a, const Vec3& b,
                                      const Vec3& c, const Vec3& p,
                                      bool& interior) {
    Vec3 ab = b - a, ac = c - a, ap = p - a;
    Real d1 = ab.dot(ap), d2 = ac.dot(ap);
    interior = false;
    if (d1 <= 0 && d2 <= 0) return a;
    Vec3 bp = p - b;
    Real d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0 && d4 <= d3) return b;
    Real vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + ab * (d1 / (d1 - d3));
    Vec3 cp = p - c;
    Real d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0 && d5 <= d6) return c;
    Real vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + ac * (d2 / (d2 - d6));
    Real va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
        Real w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }
    Real denom = Real(1) / (va + vb + vc);
    interior = true;
    return a + ab * (vb * denom) + ac * (vc * denom);
}

inline SdfSample slicer_mesh_local(const TriangleMeshSlicerGeom& g,
                                   const Vec3& p) {
    // Spine edges first: if the query is nearest a spine edge, the circular
    // field wins.
    Real best_spine = std::numeric_limits<Real>::max();
    Vec3 spine_pt;
    for (size_t e = 0; e + 1 < g.spine_edges.size(); e += 2) {
        Real t;
        Vec3 q = closest_point_on_segment(g.vertices[g.spine_edges[e]],
                                          g.vertices[g.spine_edges[e + 1]], p,
                                          t);
        Real d = (p - q).norm();
        if (d < best_spine) {
            best_spine = d;
            spine_pt = q;
        }
    }

    Real best_surf = std::numeric_limits<Real>::max();
    Vec3 surf_pt, surf_normal;
    for (size_t t = 0; t + 2 < g.indices.size(); t += 3) {
        const Vec3& a = g.vertices[g.indices[t]];
        const Vec3& b = g.vertices[g.indices[t + 1]];
        const Vec3& c = g.vertices[g.indices[t + 2]];
        bool interior;
        Vec3 q = closest_point_on_triangle(a, b, c, p, interior);
        Real d = (p - q).norm();
        if (d < best_surf) {
            best_surf = d;
            surf_pt = q;
            surf_normal = (b - a).cross(c - a).normalized();
        }
    }

    SdfSample s;
    if (best_spine <= best_surf + Real(1e-9) && best_spine < std::numeric_limits<Real>::max()) {
        Vec3 d = p - spine_pt;
        Real r = d.norm();
        s.distance = r - g.spine_radius;
        s.normal = r > Real(1e-9) ? d / r : Vec3{0, 1, 0};
        s.region = SdfRegion::spine;
        return s;
    }
    // Nearest-feature sign: side of the closest triangle's normal.
    Real side = (p - surf_pt).dot(surf_normal) >= 0 ? Real(1) : Real(-1);
    s.distance = side * best_surf;
    s.normal = surf_normal * side;
    s.region = SdfRegion::edge;
    return s;
}

inline SdfSample curve_arc_local(const ArcGeom& g, const Vec3& p) {
    constexpr Real kTwoPi = Real(2 * 3.14159265358979323846);
    Vec3 planar{p.x, p.y, 0};
    Real t;
    if (planar.norm() < Real(1e-9)) {
        t = 0;  // deterministic tie-break at the arc start
    } else {
        t = std::atan2(planar.y, planar.x);
        if (t < 0) t += kTwoPi;
        if (t > g.angle) {
            // Clamp to the nearer endpoint by angular distance.
            Real to_end = t - g.angle;
            Real to_start = kTwoPi - t;
            t = to_end <= to_start ? g.angle : Real(0);
        }
    }
    Vec3 q{g.radius * std::cos(t), g.radius * std::sin(t), 0};
    Vec3 tangent{-std::sin(t), std::cos(t), 0};
    SdfSample s;
    s.region = SdfRegion::curve;
    s.tangent = tangent;
    Vec3 d = p - q;
    Real dist = d.norm();
    s.distance = dist;
    if (dist < Real(1e-9)) {
        // On the curve: deterministic perpendicular (radially inward is as
        // good as any; pick the in-plane radial direction).
        s.normal = Vec3{-std::cos(t), -std::sin(t), 0};
    } else {
        s.normal = d / dist;
    }
    return s;
}

inline SdfSample curve_polyline_local(const ConnectedLineSegmentsGeom& g,
                                      const Vec3& p) {
    Real best = std::numeric_limits<Real>::max();
    Vec3 best_pt, best_tangent{1, 0, 0};
    for (size_t i = 0; i + 1 < g.vertices.size(); ++i) {
        Real t;
        Vec3 q = closest_point_on_segment(g.vertices[i], g.vertices[i + 1], p, t);
        Real d = (p - q).norm();
        if (d < best) {
            best = d;
            best_pt = q;
            Vec3 dir = (g.vertices[i + 1] - g.vertices[i]).normalized();
            if (t <= Real(1e-6) && i > 0) {
                // Interior vertex: average adjacent segment directions.
                Vec3 prev = (g.vertices[i] - g.vertices[i - 1]).normalized();
                dir = (dir + prev).normalized();
            } else if (t >= Real(1) - Real(1e-6) && i + 2 < g.vertices.size()) {
                Vec3 next = (g.vertices[i + 2] - g.vertices[i + 1]).normalized();
                dir = (dir + next).normalized();
            }
            best_tangent = dir;
        }
    }
    SdfSample s;
    s.region = SdfRegion::curve;
    s.tangent = best_tangent;
    s.distance = best;
    if (best < Real(1e-9)) {
        // Deterministic perpendicular to the tangent.
        Vec3 ref = std::abs(best_tangent.x) < Real(0.9) ? Vec3{1, 0, 0}
                                                        : Vec3{0, 1, 0};
        s.normal = best_tangent.cross(ref).normalized();
    } else {
        s.normal = (p - best_pt) / best;
    }
    return s;
}

}  // namespace detail

// World-space SDF query against any geometry.
inline SdfSample sdf_query(const Geometry& geom, const ShapePose& pose,
                           const Vec3& point) {
    Vec3 local = pose.to_local(point);
    SdfSample s = std::visit(
        [&](const auto& g) -> SdfSample {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, PlaneGeom>)
                return detail::sdf_plane_local(local);
            else if constexpr (std::is_same_v<T, SphereGeom>)
                return detail::sdf_sphere_local(g, local);
            else if constexpr (std::is_same_v<T, BoxGeom>)
                return detail::sdf_box_local(g, local);
            else if constexpr (std::is_same_v<T, QuadSlicerGeom>)
                return detail::slicer_quad_local(g, local);
            else if constexpr (std::is_same_v<T, TriangleMeshSlicerGeom>)
                return detail::slicer_mesh_local(g, local);
            else if constexpr (std::is_same_v<T, ArcGeom>)
                return detail::curve_arc_local(g, local);
            else
                return detail::curve_polyline_local(g, local);
        },
        geom);
    s.normal = pose.dir_to_world(s.normal);
    s.tangent = pose.dir_to_world(s.tangent);
    return s;
}

}  // namespace mpm
