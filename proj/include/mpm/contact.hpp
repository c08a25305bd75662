#pragma once

#include <vector>

#include "mpm/rigid_dynamics.hpp"
#include "mpm/state.hpp"

namespace mpm {

struct ContactAccumulator {
    Vec3 impulse;          // kg m/s
    Vec3 torque_impulse;   // kg m^2/s
    int contact_node_count = 0;

    void reset() { *this = ContactAccumulator{}; }
};

struct ContactParams {
    Real mu_k = 0;
    Real c_d = 1;
    Real collision_halfwidth = 0;
};

struct VelocityCorrection {
    Vec3 v_corrected;
    Vec3 delta_v;
};

// Friction/drag scale applied to the retained tangential component. v_n is
// taken as the magnitude of the approaching normal speed so friction always
// reduces tangential motion.
namespace detail {
inline Real friction_drag_factor(Real v_n_approach, Real v_tg_norm, Real mu_k,
                                 Real c_d) {
    if (v_tg_norm < Real(1e-12)) return 0;
    Real f = Real(1) - mu_k * v_n_approach / v_tg_norm;
    return c_d * std::max(f, Real(0));
}
}  // namespace detail

// Surface contact: kill the approaching normal component, damp the tangent.
// Separating nodes (v_n >= 0) are left untouched.
inline VelocityCorrection correct_surface_contact(const Vec3& v_node,
                                                  const Vec3& v_rigid,
                                                  const Vec3& normal,
                                                  const ContactParams& params) {
    Vec3 v_rel = v_node - v_rigid;
    Real v_n = v_rel.dot(normal);
    if (v_n >= 0) return {v_node, Vec3{}};
    Vec3 v_tg = v_rel - normal * v_n;
    Real tg_norm = v_tg.norm();
    Vec3 v_rel_new =
        v_tg * detail::friction_drag_factor(-v_n, tg_norm, params.mu_k, params.c_d);
    Vec3 v_corrected = v_rigid + v_rel_new;
    return {v_corrected, v_corrected - v_node};
}

// 1D-geometry contact: of the three-way split (along-curve / lateral / normal)
// only the along-curve component survives, with the same friction/drag rule.
inline VelocityCorrection correct_curve_contact(const Vec3& v_node,
                                                const Vec3& v_rigid,
                                                const Vec3& normal,
                                                const Vec3& tangent,
                                                const ContactParams& params) {
    Vec3 v_rel = v_node - v_rigid;
    Real v_n = v_rel.dot(normal);
    if (v_n >= 0) return {v_node, Vec3{}};
    Vec3 v_tg1 = tangent * v_rel.dot(tangent);
    Real tg_norm = v_tg1.norm();
    Vec3 v_rel_new =
        v_tg1 * detail::friction_drag_factor(-v_n, tg_norm, params.mu_k, params.c_d);
    Vec3 v_corrected = v_rigid + v_rel_new;
    return {v_corrected, v_corrected - v_node};
}

// Fully sticky: node moves with the shape.
inline VelocityCorrection correct_sticky_contact(const Vec3& v_node,
                                                 const Vec3& v_rigid) {
    return {v_rigid, v_rigid - v_node};
}

inline bool node_in_contact(const Geometry& geom, const SdfSample& s,
                            Real halfwidth) {
    switch (s.region) {
        case SdfRegion::surface: return s.distance < 0;
        case SdfRegion::edge: return std::abs(s.distance) < halfwidth;
        case SdfRegion::spine: return s.distance < 0;
        case SdfRegion::curve: return s.distance < halfwidth;
        case SdfRegion::bulk: return false;
    }
    return false;
}

// Grid-level contact resolution against every shape, shape order sequential
// (last shape wins ties). Velocity changes are recorded as impulses on the
// shapes for two-way coupling.
inline void apply_contact_pass(Grid& grid, const std::vector<Shape>& shapes,
                               std::vector<ContactAccumulator>& accumulators) {
    if (shapes.empty()) return;
    for (size_t idx = 0; idx < grid.nodes.size(); ++idx) {
        GridNode& node = grid.nodes[idx];
        if (node.mass <= kMassEpsilon) continue;
        int i, j, k;
        grid.unindex(idx, i, j, k);
        Vec3 x_node = grid.node_position(i, j, k);
        for (size_t si = 0; si < shapes.size(); ++si) {
            const Shape& shape = shapes[si];
            SdfSample s = sdf_query(shape.geometry, shape.pose, x_node);
            if (!node_in_contact(shape.geometry, s, shape.collision_halfwidth))
                continue;
            Vec3 v_rigid = rigid_point_velocity(shape.pose, x_node);
            ContactParams params{shape.mu_k, shape.c_d,
                                 shape.collision_halfwidth};
            VelocityCorrection corr;
            if (s.region == SdfRegion::spine) {
                corr = correct_sticky_contact(node.velocity, v_rigid);
            } else if (s.region == SdfRegion::curve) {
                corr = correct_curve_contact(node.velocity, v_rigid, s.normal,
                                             s.tangent, params);
            } else {
                corr = correct_surface_contact(node.velocity, v_rigid, s.normal,
                                               params);
            }
            if (corr.delta_v.norm2() > 0) {
                node.velocity = corr.v_corrected;
                node.momentum = node.velocity * node.mass;
                node.contact_impulse += corr.delta_v * node.mass;
                ContactAccumulator& acc = accumulators[si];
                Vec3 imp = corr.delta_v * (-node.mass);
                acc.impulse += imp;
                acc.torque_impulse += (x_node - shape.pose.position).cross(imp);
                acc.contact_node_count += 1;
            }
        }
    }
}

// Post-integration projection of penetrating particles back to the surface
// (or to the inner clearance of a thin geometry's band, preserving side).
inline int particle_pushout(ParticleStore& particles,
                            const std::vector<Shape>& shapes, Real dx) {
    if (shapes.empty()) return 0;
    const Real clearance = Real(1e-4) * dx;
    int count = 0;
    for (size_t pi = 0; pi < particles.size(); ++pi) {
        if (!particles.active[pi]) continue;
        for (const Shape& shape : shapes) {
            SdfSample s = sdf_query(shape.geometry, shape.pose, particles.x[pi]);
            Real move = 0;
            switch (s.region) {
                case SdfRegion::surface:
                case SdfRegion::spine:
                    if (s.distance < 0) move = -s.distance + clearance;
                    break;
                case SdfRegion::edge: {
                    Real target = Real(0.5) * shape.collision_halfwidth;
                    Real d = std::abs(s.distance);
                    if (d < target) move = target - d + clearance;
                    break;
                }
                case SdfRegion::curve: {
                    Real target = Real(0.5) * shape.collision_halfwidth;
                    if (s.distance < target) move = target - s.distance + clearance;
                    break;
                }
                case SdfRegion::bulk:
                    break;
            }
            if (move > 0) {
                particles.x[pi] += s.normal * move;
                Vec3 v_rigid = rigid_point_velocity(shape.pose, particles.x[pi]);
                Real v_n = (particles.v[pi] - v_rigid).dot(s.normal);
                if (v_n < 0) particles.v[pi] -= s.normal * v_n;
                ++count;
            }
        }
    }
    return count;
}

}  // namespace mpm
