#include <doctest.h>

#include "mpm/state.hpp"

using namespace mpm;

TEST_CASE("grid construction and index bijection") {
    CHECK_THROWS_AS(Grid(3, 8, 8, 0.1f, Vec3{}), std::invalid_argument);
    CHECK_THROWS_AS(Grid(8, 8, 8, 0.0f, Vec3{}), std::invalid_argument);

    Grid grid(5, 6, 7, 0.1f, Vec3{1, 2, 3});
    CHECK(grid.node_count() == 5u * 6u * 7u);
    for (int k = 0; k < 7; ++k)
        for (int j = 0; j < 6; ++j)
            for (int i = 0; i < 5; ++i) {
                int ri, rj, rk;
                grid.unindex(grid.index(i, j, k), ri, rj, rk);
                CHECK(ri == i);
                CHECK(rj == j);
                CHECK(rk == k);
            }
    Vec3 p = grid.node_position(2, 3, 4);
    CHECK(p.x == doctest::Approx(1.2));
    CHECK(p.y == doctest::Approx(2.3));
    CHECK(p.z == doctest::Approx(3.4));
}

TEST_CASE("grid_clear resets all node state") {
    Grid grid(4, 4, 4, 0.1f, Vec3{});
    grid.nodes[5].mass = 3;
    grid.nodes[5].momentum = {1, 2, 3};
    grid.nodes[5].contact_impulse = {4, 5, 6};
    grid_clear(grid);
    for (const auto& n : grid.nodes) {
        CHECK(n.mass == 0);
        CHECK(n.momentum.norm() == 0);
        CHECK(n.contact_impulse.norm() == 0);
    }
}

TEST_CASE("box spawn: unit cube at 8 ppc totals 1000 kg") {
    // dx = 0.125, 8 cells across the cube, 8 particles per cell.
    Grid grid(16, 16, 16, 0.125f, Vec3{});
    ParticleStore particles;
    ParticleObject obj = spawn_box_particles(particles, grid, {0.5f, 0.5f, 0.5f},
                                             {1.5f, 1.5f, 1.5f}, 8, 1000, 0, 42);
    CHECK(particles.size() == 4096);
    CHECK(obj.end - obj.begin == 4096);
    double total = 0;
    for (Real m : particles.mass) total += m;
    CHECK(total == doctest::Approx(1000.0).epsilon(1e-3));
    for (size_t i = 0; i < particles.size(); ++i) {
        CHECK(particles.active[i] == 1);
        CHECK((particles.F[i] - Mat3::identity()).frobenius() == 0);
        CHECK(grid.in_interior_band(particles.x[i]));
    }
}

TEST_CASE("box spawn rejects degenerate input") {
    Grid grid(16, 16, 16, 0.125f, Vec3{});
    ParticleStore particles;
    CHECK_THROWS_AS(spawn_box_particles(particles, grid, {0.5f, 0.5f, 0.5f},
                                        {0.5f, 1.5f, 1.5f}, 8, 1000, 0, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(spawn_box_particles(particles, grid, {0.5f, 0.5f, 0.5f},
                                        {1.5f, 1.5f, 1.5f}, 0, 1000, 0, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(spawn_box_particles(particles, grid, {0.5f, 0.5f, 0.5f},
                                        {1.5f, 1.5f, 1.5f}, 8, -1, 0, 1),
                    std::invalid_argument);
    // Box outside the interior band.
    CHECK_THROWS_AS(spawn_box_particles(particles, grid, {0.0f, 0.5f, 0.5f},
                                        {1.5f, 1.5f, 1.5f}, 8, 1000, 0, 1),
                    std::invalid_argument);
}

TEST_CASE("spawn jitter is seed-deterministic") {
    Grid grid(16, 16, 16, 0.125f, Vec3{});
    ParticleStore a, b, c;
    spawn_box_particles(a, grid, {0.5f, 0.5f, 0.5f}, {1.0f, 1.0f, 1.0f}, 8,
                        1000, 0, 99);
    spawn_box_particles(b, grid, {0.5f, 0.5f, 0.5f}, {1.0f, 1.0f, 1.0f}, 8,
                        1000, 0, 99);
    spawn_box_particles(c, grid, {0.5f, 0.5f, 0.5f}, {1.0f, 1.0f, 1.0f}, 8,
                        1000, 0, 100);
    REQUIRE(a.size() == b.size());
    bool identical = true, differs = false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a.x[i].x != b.x[i].x || a.x[i].y != b.x[i].y || a.x[i].z != b.x[i].z)
            identical = false;
        if (a.x[i].x != c.x[i].x) differs = true;
    }
    CHECK(identical);
    CHECK(differs);
}

TEST_CASE("single-particle P2G scatter conserves mass over the 27 stencil") {
    Grid grid(8, 8, 8, 0.1f, Vec3{});
    ParticleStore p;
    p.push_back({0.33f, 0.41f, 0.37f}, Vec3{}, 2.5f, 1e-3f, 0);
    SplineWeights sw = quadratic_bspline_weights(p.x[0], grid.origin, grid.dx);
    double total = 0;
    int touched = 0;
    for (int dk = 0; dk < 3; ++dk)
        for (int dj = 0; dj < 3; ++dj)
            for (int di = 0; di < 3; ++di) {
                Real w = sw.w[0][di] * sw.w[1][dj] * sw.w[2][dk];
                total += double(w) * p.mass[0];
                if (w > 0) ++touched;
            }
    CHECK(total == doctest::Approx(2.5).epsilon(1e-6));
    CHECK(touched <= 27);
    CHECK(touched >= 8);
}

TEST_CASE("deactivation flags particles outside the interior band") {
    Grid grid(8, 8, 8, 0.1f, Vec3{});
    ParticleStore p;
    p.push_back({0.35f, 0.35f, 0.35f}, Vec3{}, 1, 1, 0);  // interior
    p.push_back({0.01f, 0.35f, 0.35f}, Vec3{}, 1, 1, 0);  // outside band
    int n = deactivate_out_of_domain(p, grid);
    CHECK(n == 1);
    CHECK(p.active[0] == 1);
    CHECK(p.active[1] == 0);
    // Already inactive particles are not recounted.
    CHECK(deactivate_out_of_domain(p, grid) == 0);
}
