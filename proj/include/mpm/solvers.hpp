#pragma once

#include <functional>
#include <vector>

#include "mpm/materials.hpp"
#include "mpm/state.hpp"

namespace mpm {

struct SimState {
    ParticleStore particles;
    Grid grid;
    std::vector<Material> materials;
};

// Invoked on the grid after the nodal velocity update, before boundary
// conditions (contact resolution hooks in here).
using GridHook = std::function<void(Grid&)>;

enum class BoundaryKind { slip, sticky };

struct StepStats {
    int inverted_f = 0;           // particles with det(F) <= 0 this step
    int projection_failures = 0;  // position-based constraint failures
};

// Applied to nodes within 2 cells of the domain boundary: slip zeroes the
// boundary-normal component, sticky zeroes the whole velocity.
inline void apply_boundary_conditions(Grid& grid, BoundaryKind kind) {
    const int margin = 2;
    for (size_t idx = 0; idx < grid.nodes.size(); ++idx) {
        GridNode& node = grid.nodes[idx];
        if (node.mass <= kMassEpsilon) continue;
        int i, j, k;
        grid.unindex(idx, i, j, k);
        bool bx = i < margin || i >= grid.dims[0] - margin;
        bool by = j < margin || j >= grid.dims[1] - margin;
        bool bz = k < margin || k >= grid.dims[2] - margin;
        if (!(bx || by || bz)) continue;
        if (kind == BoundaryKind::sticky) {
            node.velocity = Vec3{};
        } else {
            if (bx) node.velocity.x = 0;
            if (by) node.velocity.y = 0;
            if (bz) node.velocity.z = 0;
        }
        node.momentum = node.velocity * node.mass;
    }
}

namespace detail {

inline void grid_velocity_update(Grid& grid, const Vec3& gravity, Real dt,
                                 const GridHook& hook, BoundaryKind bc,
                                 bool apply_gravity = true) {
    for (auto& node : grid.nodes) {
        if (node.mass <= kMassEpsilon) continue;
        node.velocity = node.momentum / node.mass;
        if (apply_gravity) node.velocity += gravity * dt;
        node.momentum = node.velocity * node.mass;
    }
    if (hook) hook(grid);
    apply_boundary_conditions(grid, bc);
}

// Refresh the cached stress and count inversions; shared G2P tail for the
// force-based solvers.
inline void update_stress(SimState& state, size_t i, StepStats& stats) {
    const Material& mat = state.materials[state.particles.material_id[i]];
    if (mat3_det(state.particles.F[i]) <= 0) ++stats.inverted_f;
    state.particles.stress[i] =
        neo_hookean_cauchy_stress(state.particles.F[i], mat.mu, mat.lambda);
}

}  // namespace detail

// One standard-MPM cycle: PIC transfers, explicit nodal force integration,
// velocity-gradient F update.
inline StepStats step_standard(SimState& state, Real dt, const Vec3& gravity,
                               const GridHook& contact_hook = nullptr,
                               BoundaryKind bc = BoundaryKind::slip) {
    StepStats stats;
    ParticleStore& p = state.particles;
    Grid& grid = state.grid;
    grid_clear(grid);

    // P2G: mass, momentum, and the internal-force impulse -dt V sigma grad(phi).
    for (size_t i = 0; i < p.size(); ++i) {
        if (!p.active[i]) continue;
        SplineWeights sw = quadratic_bspline_weights(p.x[i], grid.origin, grid.dx);
        Real volume = mat3_det(p.F[i]) * p.volume0[i];
        Mat3 impulse_m = p.stress[i] * (-dt * volume);
        for (int dk = 0; dk < 3; ++dk)
            for (int dj = 0; dj < 3; ++dj)
                for (int di = 0; di < 3; ++di) {
                    Real w = sw.w[0][di] * sw.w[1][dj] * sw.w[2][dk];
                    Vec3 grad{sw.dw[0][di] * sw.w[1][dj] * sw.w[2][dk],
                              sw.w[0][di] * sw.dw[1][dj] * sw.w[2][dk],
                              sw.w[0][di] * sw.w[1][dj] * sw.dw[2][dk]};
                    GridNode& node = grid.nodes[grid.index(sw.base_node[0] + di,
                                                           sw.base_node[1] + dj,
                                                           sw.base_node[2] + dk)];
                    node.mass += w * p.mass[i];
                    node.momentum += p.v[i] * (w * p.mass[i]) + impulse_m * grad;
                }
    }

    detail::grid_velocity_update(grid, gravity, dt, contact_hook, bc);

    // G2P: PIC velocity, position integration, L and F updates.
    for (size_t i = 0; i < p.size(); ++i) {
        if (!p.active[i]) continue;
        SplineWeights sw = quadratic_bspline_weights(p.x[i], grid.origin, grid.dx);
        Vec3 v_new;
        Mat3 L;
        for (int dk = 0; dk < 3; ++dk)
            for (int dj = 0; dj < 3; ++dj)
                for (int di = 0; di < 3; ++di) {
                    Real w = sw.w[0][di] * sw.w[1][dj] * sw.w[2][dk];
                    Vec3 grad{sw.dw[0][di] * sw.w[1][dj] * sw.w[2][dk],
                              sw.w[0][di] * sw.dw[1][dj] * sw.w[2][dk],
                              sw.w[0][di] * sw.w[1][dj] * sw.dw[2][dk]};
                    const GridNode& node =
                        grid.nodes[grid.index(sw.base_node[0] + di,
                                              sw.base_node[1] + dj,
                                              sw.base_node[2] + dk)];
                    if (node.mass <= kMassEpsilon) continue;
                    v_new += node.velocity * w;
                    L += Mat3::outer(node.velocity, grad);
                }
        p.v[i] = v_new;
        p.x[i] += v_new * dt;
        p.F[i] = (Mat3::identity() + L * dt) * p.F[i];
        detail::update_stress(state, i, stats);
    }
    return stats;
}

// One MLS-MPM cycle: APIC transfers with the stress impulse fused into P2G.
inline StepStats step_mls(SimState& state, Real dt, const Vec3& gravity,
                          const GridHook& contact_hook = nullptr,
                          BoundaryKind bc = BoundaryKind::slip) {
    StepStats stats;
    ParticleStore& p = state.particles;
    Grid& grid = state.grid;
    grid_clear(grid);

    const Real m_inv = Real(4) / (grid.dx * grid.dx);

    for (size_t i = 0; i < p.size(); ++i) {
        if (!p.active[i]) continue;
        SplineWeights sw = quadratic_bspline_weights(p.x[i], grid.origin, grid.dx);
        Real volume = mat3_det(p.F[i]) * p.volume0[i];
        // m C - dt V M^-1 sigma, applied to (x_I - x_p).
        Mat3 affine = p.C[i] * p.mass[i] + p.stress[i] * (-dt * volume * m_inv);
        for (int dk = 0; dk < 3; ++dk)
            for (int dj = 0; dj < 3; ++dj)
                for (int di = 0; di < 3; ++di) {
                    Real w = sw.w[0][di] * sw.w[1][dj] * sw.w[2][dk];
                    int gi = sw.base_node[0] + di;
                    int gj = sw.base_node[1] + dj;
                    int gk = sw.base_node[2] + dk;
                    Vec3 rel = grid.node_position(gi, gj, gk) - p.x[i];
                    GridNode& node = grid.nodes[grid.index(gi, gj, gk)];
                    node.mass += w * p.mass[i];
                    node.momentum += (p.v[i] * p.mass[i] + affine * rel) * w;
                }
    }

    detail::grid_velocity_update(grid, gravity, dt, contact_hook, bc);

    for (size_t i = 0; i < p.size(); ++i) {
        if (!p.active[i]) continue;
        SplineWeights sw = quadratic_bspline_weights(p.x[i], grid.origin, grid.dx);
        Vec3 v_new;
        Mat3 B;
        for (int dk = 0; dk < 3; ++dk)
            for (int dj = 0; dj < 3; ++dj)
                for (int di = 0; di < 3; ++di) {
                    Real w = sw.w[0][di] * sw.w[1][dj] * sw.w[2][dk];
                    int gi = sw.base_node[0] + di;
                    int gj = sw.base_node[1] + dj;
                    int gk = sw.base_node[2] + dk;
                    const GridNode& node = grid.nodes[grid.index(gi, gj, gk)];
                    if (node.mass <= kMassEpsilon) continue;
                    Vec3 rel = grid.node_position(gi, gj, gk) - p.x[i];
                    v_new += node.velocity * w;
                    B += Mat3::outer(node.velocity * w, rel);
                }
        p.v[i] = v_new;
        p.C[i] = B * m_inv;
        p.x[i] += v_new * dt;
        p.F[i] = (Mat3::identity() + p.C[i] * dt) * p.F[i];
        detail::update_stress(state, i, stats);
    }
    return stats;
}

struct PbmpmConfig {
    int iterations = 10;
};

// Position-based MPM: `iterations` P2G/G2P cycles refine the candidate
// velocity gradient via per-particle constraint projection; positions and F
// commit once after the final cycle. Gravity enters on the first cycle only.
inline StepStats step_pbmpm(SimState& state, Real dt, const Vec3& gravity,
                            const PbmpmConfig& config,
                            const GridHook& contact_hook = nullptr,
                            BoundaryKind bc = BoundaryKind::slip) {
    StepStats stats;
    ParticleStore& p = state.particles;
    Grid& grid = state.grid;
    const Real m_inv = Real(4) / (grid.dx * grid.dx);

    for (int iter = 0; iter < config.iterations; ++iter) {
        grid_clear(grid);
        for (size_t i = 0; i < p.size(); ++i) {
            if (!p.active[i]) continue;
            SplineWeights sw =
                quadratic_bspline_weights(p.x[i], grid.origin, grid.dx);
            Mat3 affine = p.C[i] * p.mass[i];
            for (int dk = 0; dk < 3; ++dk)
                for (int dj = 0; dj < 3; ++dj)
                    for (int di = 0; di < 3; ++di) {
                        Real w = sw.w[0][di] * sw.w[1][dj] * sw.w[2][dk];
                        int gi = sw.base_node[0] + di;
                        int gj = sw.base_node[1] + dj;
                        int gk = sw.base_node[2] + dk;
                        Vec3 rel = grid.node_position(gi, gj, gk) - p.x[i];
                        GridNode& node = grid.nodes[grid.index(gi, gj, gk)];
                        node.mass += w * p.mass[i];
                        node.momentum += (p.v[i] * p.mass[i] + affine * rel) * w;
                    }
        }

        detail::grid_velocity_update(grid, gravity, dt, contact_hook, bc,
                                     /*apply_gravity=*/iter == 0);

        for (size_t i = 0; i < p.size(); ++i) {
            if (!p.active[i]) continue;
            SplineWeights sw =
                quadratic_bspline_weights(p.x[i], grid.origin, grid.dx);
            Vec3 v_new;
            Mat3 B;
            for (int dk = 0; dk < 3; ++dk)
                for (int dj = 0; dj < 3; ++dj)
                    for (int di = 0; di < 3; ++di) {
                        Real w = sw.w[0][di] * sw.w[1][dj] * sw.w[2][dk];
                        int gi = sw.base_node[0] + di;
                        int gj = sw.base_node[1] + dj;
                        int gk = sw.base_node[2] + dk;
                        const GridNode& node = grid.nodes[grid.index(gi, gj, gk)];
                        if (node.mass <= kMassEpsilon) continue;
                        Vec3 rel = grid.node_position(gi, gj, gk) - p.x[i];
                        v_new += node.velocity * w;
                        B += Mat3::outer(node.velocity * w, rel);
                    }
            p.v[i] = v_new;
            Mat3 C_candidate = B * m_inv;
            const Material& mat = state.materials[p.material_id[i]];
            auto projected = corotational_project(p.F[i], C_candidate, dt, mat.beta);
            if (projected) {
                p.C[i] = *projected;
            } else {
                ++stats.projection_failures;  // keep the previous C
            }
        }
    }

    // Commit: integrate positions and the deformation gradient once per step.
    for (size_t i = 0; i < p.size(); ++i) {
        if (!p.active[i]) continue;
        p.x[i] += p.v[i] * dt;
        p.F[i] = (Mat3::identity() + p.C[i] * dt) * p.F[i];
        if (mat3_det(p.F[i]) <= 0) ++stats.inverted_f;
    }
    return stats;
}

}  // namespace mpm
