#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mpm/math.hpp"

namespace mpm {

// Node velocities are undefined below this mass (kg).
inline constexpr Real kMassEpsilon = Real(1e-9);

struct GridNode {
    Real mass = 0;                // kg
    Vec3 momentum;                // kg m/s
    Vec3 velocity;                // m/s, valid where mass > kMassEpsilon
    Vec3 contact_impulse;         // kg m/s, per-step scratch
};

struct Grid {
    int dims[3] = {0, 0, 0};
    Real dx = 0;
    Vec3 origin;
    std::vector<GridNode> nodes;  // node-major: i + dims_x*(j + dims_y*k)

    Grid() = default;
    Grid(int nx, int ny, int nz, Real dx_, const Vec3& origin_) {
        if (nx < 4 || ny < 4 || nz < 4)
            throw std::invalid_argument("grid: dims must be >= 4 per axis");
        if (dx_ <= 0) throw std::invalid_argument("grid: dx must be positive");
        dims[0] = nx; dims[1] = ny; dims[2] = nz;
        dx = dx_;
        origin = origin_;
        nodes.resize(static_cast<size_t>(nx) * ny * nz);
    }

    size_t index(int i, int j, int k) const {
        return static_cast<size_t>(i) +
               static_cast<size_t>(dims[0]) *
                   (static_cast<size_t>(j) + static_cast<size_t>(dims[1]) * k);
    }
    void unindex(size_t idx, int& i, int& j, int& k) const {
        i = static_cast<int>(idx % dims[0]);
        j = static_cast<int>((idx / dims[0]) % dims[1]);
        k = static_cast<int>(idx / (static_cast<size_t>(dims[0]) * dims[1]));
    }
    Vec3 node_position(int i, int j, int k) const {
        return origin + Vec3{Real(i), Real(j), Real(k)} * dx;
    }
    size_t node_count() const { return nodes.size(); }

    // Interior band: positions at least 1.5 cells from every boundary.
    bool in_interior_band(const Vec3& p) const {
        return spline_in_domain(p, origin, dx, dims[0], dims[1], dims[2]);
    }
};

inline void grid_clear(Grid& grid) {
    for (auto& n : grid.nodes) n = GridNode{};
}

// Structure-of-arrays particle storage.
struct ParticleStore {
    std::vector<Vec3> x;          // m
    std::vector<Vec3> v;          // m/s
    std::vector<Real> mass;       // kg
    std::vector<Real> volume0;    // m^3, rest volume
    std::vector<Mat3> F;          // deformation gradient
    std::vector<Mat3> C;          // affine velocity gradient, 1/s
    std::vector<Mat3> stress;     // cached Cauchy stress from last update
    std::vector<int> material_id;
    std::vector<uint8_t> active;

    size_t size() const { return x.size(); }

    void push_back(const Vec3& pos, const Vec3& vel, Real m, Real vol0,
                   int mat_id) {
        x.push_back(pos);
        v.push_back(vel);
        mass.push_back(m);
        volume0.push_back(vol0);
        F.push_back(Mat3::identity());
        C.push_back(Mat3::zero());
        stress.push_back(Mat3::zero());
        material_id.push_back(mat_id);
        active.push_back(1);
    }
};

struct ParticleObject {
    int id = -1;
    size_t begin = 0;
    size_t end = 0;  // one past last
    int material_id = 0;
};

// Lattice fill of an axis-aligned box with particles_per_cell per grid cell
// and seeded jitter bounded by a quarter of the lattice spacing.
inline ParticleObject spawn_box_particles(ParticleStore& particles,
                                          const Grid& grid,
                                          const Vec3& min_corner,
                                          const Vec3& max_corner,
                                          int particles_per_cell, Real density,
                                          int material_id, uint64_t jitter_seed,
                                          int object_id = 0) {
    Vec3 ext = max_corner - min_corner;
    if (ext.x <= 0 || ext.y <= 0 || ext.z <= 0)
        throw std::invalid_argument("spawn: box has no volume");
    if (particles_per_cell < 1)
        throw std::invalid_argument("spawn: particles_per_cell must be >= 1");
    if (density <= 0) throw std::invalid_argument("spawn: density must be > 0");
    if (!grid.in_interior_band(min_corner) || !grid.in_interior_band(max_corner))
        throw std::invalid_argument("spawn: box outside grid interior band");

    const Real spacing =
        grid.dx / std::cbrt(static_cast<Real>(particles_per_cell));
    const Real particle_mass = density * spacing * spacing * spacing;
    const Real particle_volume = spacing * spacing * spacing;

    const int nx = std::max(1, static_cast<int>(std::lround(ext.x / spacing)));
    const int ny = std::max(1, static_cast<int>(std::lround(ext.y / spacing)));
    const int nz = std::max(1, static_cast<int>(std::lround(ext.z / spacing)));

    SplitMix64 rng(jitter_seed);
    const Real jitter = Real(0.25) * spacing;

    ParticleObject obj;
    obj.id = object_id;
    obj.begin = particles.size();
    obj.material_id = material_id;

    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                Vec3 p = min_corner +
                         Vec3{(Real(i) + Real(0.5)) * spacing,
                              (Real(j) + Real(0.5)) * spacing,
                              (Real(k) + Real(0.5)) * spacing};
                p.x += jitter * static_cast<Real>(rng.next_signed_unit());
                p.y += jitter * static_cast<Real>(rng.next_signed_unit());
                p.z += jitter * static_cast<Real>(rng.next_signed_unit());
                particles.push_back(p, Vec3{}, particle_mass, particle_volume,
                                    material_id);
            }
    obj.end = particles.size();
    return obj;
}

// Flags particles that left the interior band. Deactivated particles are
// excluded from every transfer from then on.
inline int deactivate_out_of_domain(ParticleStore& particles,
                                    const Grid& grid) {
    int count = 0;
    for (size_t i = 0; i < particles.size(); ++i) {
        if (!particles.active[i]) continue;
        if (!grid.in_interior_band(particles.x[i])) {
            particles.active[i] = 0;
            ++count;
        }
    }
    return count;
}

}  // namespace mpm
