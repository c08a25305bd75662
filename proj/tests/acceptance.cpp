// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Heavier end-to-end runs live here rather than in the unit suite.

#include <Eigen/Dense>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "mpm/facade.hpp"
#include "mpm/scenario.hpp"

using namespace mpm;

namespace {

int g_failures = 0;

void report(int criterion, const char* name, bool pass,
            const std::string& detail = "") {
    std::printf("[%s] criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL",
                criterion, name, detail.empty() ? "" : " — ",
                detail.c_str());
    if (!pass) ++g_failures;
    std::fflush(stdout);
}

std::string scenes_dir() { return SCENES_DIR; }

struct Totals {
    double mass = 0;
    double p[3] = {0, 0, 0};
};

Totals particle_totals(const ParticleStore& ps) {
    Totals t;
    for (size_t i = 0; i < ps.size(); ++i) {
        if (!ps.active[i]) continue;
        double m = ps.mass[i];
        t.mass += m;
        t.p[0] += m * ps.v[i].x;
        t.p[1] += m * ps.v[i].y;
        t.p[2] += m * ps.v[i].z;
    }
    return t;
}

SimState free_flight_block() {
    SimState s;
    s.grid = Grid(32, 32, 32, 0.05f, Vec3{});
    Material mat;
    auto [mu, lambda] = lame_from_young_poisson(100.0f, 0.3f);
    mat.mu = mu;
    mat.lambda = lambda;
    mat.beta = 0.9f;
    s.materials.push_back(mat);
    // 20 cells per axis at 1 particle/cell -> 20^3 particles.
    spawn_box_particles(s.particles, s.grid, {0.3f, 0.3f, 0.3f},
                        {1.3f, 1.3f, 1.3f}, 1, 1000, 0, 11);
    SplitMix64 rng(17);
    for (auto& v : s.particles.v)
        v = Vec3{0.1f, 0.05f, -0.08f} +
            Vec3{static_cast<Real>(rng.next_signed_unit()),
                 static_cast<Real>(rng.next_signed_unit()),
                 static_cast<Real>(rng.next_signed_unit())} *
                Real(0.02);
    return s;
}

// --- criterion 1: conservation ---------------------------------------------

void criterion_conservation() {
    bool pass = true;
    std::string detail;
    struct Cfg {
        const char* name;
        int solver;  // 0 standard, 1 mls, 2 pbmpm
    };
    for (Cfg cfg : {Cfg{"standard", 0}, Cfg{"mls", 1}, Cfg{"pbmpm", 2}}) {
        SimState s = free_flight_block();
        if (cfg.solver == 2)
            for (auto& m : s.materials) m.kind = MaterialKind::corotational_pb;
        Totals t0 = particle_totals(s.particles);
        double p0 = std::sqrt(t0.p[0] * t0.p[0] + t0.p[1] * t0.p[1] +
                              t0.p[2] * t0.p[2]);
        for (int step = 0; step < 100; ++step) {
            switch (cfg.solver) {
                case 0: step_standard(s, 0.002f, Vec3{}); break;
                case 1: step_mls(s, 0.002f, Vec3{}); break;
                default: step_pbmpm(s, 0.002f, Vec3{}, PbmpmConfig{10}); break;
            }
        }
        Totals t1 = particle_totals(s.particles);
        double mass_err = std::abs(t1.mass - t0.mass) / t0.mass;
        double p_err = 0;
        for (int a = 0; a < 3; ++a)
            p_err = std::max(p_err, std::abs(t1.p[a] - t0.p[a]) / p0);
        if (mass_err > 1e-5 || p_err > 1e-4) {
            pass = false;
            char buf[160];
            std::snprintf(buf, sizeof(buf), "%s mass_err=%.3g p_err=%.3g; ",
                          cfg.name, mass_err, p_err);
            detail += buf;
        }
    }
    report(1, "mass/momentum conservation in free flight (3 solvers)", pass,
           detail);
}

// --- criterion 2: transfer fidelity -----------------------------------------

void criterion_transfer_fidelity() {
    bool pass = true;
    std::string detail;
    SplitMix64 rng(2);
    Vec3 origin{};
    Real dx = 0.05f;
    double worst_pu = 0, worst_grad = 0;
    for (int t = 0; t < 1000; ++t) {
        Vec3 p{Real(0.3 + 0.5 * (rng.next_signed_unit() + 1) / 2),
               Real(0.3 + 0.5 * (rng.next_signed_unit() + 1) / 2),
               Real(0.3 + 0.5 * (rng.next_signed_unit() + 1) / 2)};
        SplineWeights sw = quadratic_bspline_weights(p, origin, dx);
        for (int a = 0; a < 3; ++a) {
            double sum = double(sw.w[a][0]) + sw.w[a][1] + sw.w[a][2];
            worst_pu = std::max(worst_pu, std::abs(sum - 1.0));
        }
        double g[3] = {0, 0, 0};
        for (int dk = 0; dk < 3; ++dk)
            for (int dj = 0; dj < 3; ++dj)
                for (int di = 0; di < 3; ++di) {
                    g[0] += double(sw.dw[0][di]) * sw.w[1][dj] * sw.w[2][dk];
                    g[1] += double(sw.w[0][di]) * sw.dw[1][dj] * sw.w[2][dk];
                    g[2] += double(sw.w[0][di]) * sw.w[1][dj] * sw.dw[2][dk];
                }
        for (double v : g) worst_grad = std::max(worst_grad, std::abs(v));
    }
    if (worst_pu > 1e-6 || worst_grad > 1e-5) pass = false;

    // APIC round trip on an exactly affine field.
    SimState s;
    s.grid = Grid(24, 24, 24, 0.05f, Vec3{});
    Material mat;
    mat.mu = 0;
    mat.lambda = 0;
    s.materials.push_back(mat);
    spawn_box_particles(s.particles, s.grid, {0.35f, 0.35f, 0.35f},
                        {0.85f, 0.85f, 0.85f}, 8, 1000, 0, 3);
    Mat3 A = Mat3::zero();
    A(0, 1) = 0.3f; A(1, 0) = -0.2f; A(2, 2) = 0.1f; A(0, 0) = 0.15f;
    Vec3 v0{0.02f, -0.01f, 0.03f}, x0{0.6f, 0.6f, 0.6f};
    std::vector<Vec3> expected(s.particles.size());
    for (size_t i = 0; i < s.particles.size(); ++i) {
        s.particles.v[i] = v0 + A * (s.particles.x[i] - x0);
        s.particles.C[i] = A;
        expected[i] = s.particles.v[i];
    }
    step_mls(s, 1e-6f, Vec3{});
    double worst_rt = 0;
    int tested = 0;
    for (size_t i = 0; i < s.particles.size(); ++i) {
        const Vec3& x = s.particles.x[i];
        bool interior = true;
        for (Real c : {x.x, x.y, x.z})
            if (c < 0.45f || c > 0.75f) interior = false;
        if (!interior) continue;
        ++tested;
        double scale = std::max(1e-3, double(expected[i].norm()));
        worst_rt = std::max(
            worst_rt, double((s.particles.v[i] - expected[i]).norm()) / scale);
    }
    if (tested < 1000 || worst_rt > 1e-5) pass = false;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "pu=%.2g grad=%.2g apic=%.2g (n=%d)", worst_pu, worst_grad,
                  worst_rt, tested);
    report(2, "transfer fidelity (partition of unity, gradients, APIC)", pass,
           buf);
}

// --- criterion 3: constitutive ----------------------------------------------

void criterion_constitutive() {
    bool pass = true;
    const Real mu = 1.0f, lambda = 1.3f;
    if (neo_hookean_cauchy_stress(Mat3::identity(), mu, lambda).frobenius() >
        1e-6)
        pass = false;
    SplitMix64 rng(5);
    for (int t = 0; t < 50; ++t) {
        // Build the rotation in double and round once: a float-composed
        // quaternion-to-matrix chain carries an orthogonality defect of its
        // own that would mask the property under test.
        double ax = rng.next_signed_unit(), ay = rng.next_signed_unit(),
               az = rng.next_signed_unit();
        double n = std::sqrt(ax * ax + ay * ay + az * az);
        ax /= n; ay /= n; az /= n;
        double h = rng.next_signed_unit() * 3 * 0.5;
        double s = std::sin(h), c = std::cos(h);
        double q[4] = {ax * s, ay * s, az * s, c};
        double x = q[0], y = q[1], z = q[2], w = q[3];
        double rd[3][3] = {
            {1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)},
            {2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)},
            {2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)}};
        Mat3 R;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) R(i, j) = Real(rd[i][j]);
        if (neo_hookean_cauchy_stress(R, mu, lambda).frobenius() > 1e-6)
            pass = false;
    }
    // Small-strain consistency at eps = 1e-4.
    const Real eps = 1e-4f;
    Mat3 F = Mat3::identity();
    F(0, 0) += eps;
    Mat3 lin = Mat3::diag(2 * mu * eps + lambda * eps, lambda * eps,
                          lambda * eps);
    if ((neo_hookean_cauchy_stress(F, mu, lambda) - lin).frobenius() > 1e-6)
        pass = false;

    // Polar decomposition against an eigen-based symmetric square root.
    for (int t = 0; t < 100; ++t) {
        Mat3 m;
        do {
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    m(i, j) = static_cast<Real>(rng.next_signed_unit());
            m(0, 0) += 1.5f;
            m(1, 1) += 1.5f;
            m(2, 2) += 1.5f;
        } while (mat3_det(m) <= 0.1f);
        auto pr = polar_decompose(m);
        if (!pr) { pass = false; continue; }
        if ((pr->r * pr->u - m).frobenius() > 1e-5f ||
            (pr->r.transposed() * pr->r - Mat3::identity()).frobenius() > 1e-5f ||
            std::abs(mat3_det(pr->r) - 1) > 1e-5f)
            pass = false;
        Eigen::Matrix3d md;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) md(i, j) = m(i, j);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(md.transpose() * md);
        Eigen::Matrix3d u_ref = es.eigenvectors() *
                                es.eigenvalues().cwiseSqrt().asDiagonal() *
                                es.eigenvectors().transpose();
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (std::abs(double(pr->u(i, j)) - u_ref(i, j)) > 1e-5 * 3)
                    pass = false;
    }
    report(3, "constitutive suite (stress-free states, small strain, polar "
              "oracle)",
           pass);
}

// --- criterion 4: reference configurations run ------------------------------

struct SettleResult {
    bool ok = false;
    double min_y = 0;
    int frames = 0;
};

SettleResult run_settle(SceneSpec spec, int frames) {
    SettleResult res;
    auto scene = scene_from_spec(spec);
    for (int f = 0; f < frames; ++f) {
        scene->advance(spec.dt_frame);
        FrameResult r = scene->fetch_results();
        if (!std::isfinite(r.total_mass)) return res;
        for (const Vec3& p : r.positions)
            if (!p.finite()) return res;
        res.frames = f + 1;
    }
    double min_y = 1e30;
    const auto& ps = scene->state().particles;
    for (size_t i = 0; i < ps.size(); ++i)
        if (ps.active[i]) min_y = std::min(min_y, double(ps.x[i].y));
    res.min_y = min_y;
    res.ok = true;
    return res;
}

void criterion_reference_runs() {
    bool pass = true;
    std::string detail;
    // The bundled cube-drop scenes rest the block on a static floor plane.
    const double floor_y = 0.0625;

    SceneSpec mls_spec = load_scene(scenes_dir() + "/cube_drop.json");
    SettleResult a = run_settle(mls_spec, 200);
    if (!a.ok || a.min_y < floor_y - 0.025) pass = false;

    SceneSpec pb_spec = load_scene(scenes_dir() + "/cube_drop_pbmpm.json");
    SettleResult b = run_settle(pb_spec, 200);
    if (!b.ok || b.min_y < floor_y - 0.025) pass = false;

    SceneSpec pb20 = pb_spec;
    pb20.iterations = 20;
    SettleResult c = run_settle(pb20, 200);
    if (!c.ok || c.min_y < floor_y - 0.025) pass = false;

    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "mls(min_y=%.4f,f=%d) pb10(min_y=%.4f,f=%d) "
                  "pb20(min_y=%.4f,f=%d)",
                  a.min_y, a.frames, b.min_y, b.frames, c.min_y, c.frames);
    report(4, "reference configurations run 200 frames NaN-free and settle",
           pass, buf);
}

// --- criterion 5: two-way coupling closure -----------------------------------

void criterion_coupling() {
    SimState s;
    s.grid = Grid(32, 32, 32, 0.05f, Vec3{});
    Material mat;
    auto [mu, lambda] = lame_from_young_poisson(2e4f, 0.3f);
    mat.mu = mu;
    mat.lambda = lambda;
    s.materials.push_back(mat);
    spawn_box_particles(s.particles, s.grid, {0.4f, 0.4f, 0.4f},
                        {1.2f, 0.8f, 1.2f}, 8, 1000, 0, 13);

    Shape sphere;
    sphere.id = 0;
    sphere.geometry = SphereGeom{0.12f};
    sphere.pose.position = {0.8f, 0.93f, 0.8f};  // just touching the block top
    sphere.pose.linear_velocity = {0, -0.3f, 0};
    sphere.motion = MotionKind::free_body;
    sphere.body.mass = 0.5f;
    sphere.body.inertia_diag = {0.003f, 0.003f, 0.003f};
    std::vector<Shape> shapes{sphere};

    Totals t0 = particle_totals(s.particles);
    double p0[3] = {t0.p[0] + 0.5 * 0.0, t0.p[1] + 0.5 * -0.3, t0.p[2]};
    double p0_norm = std::sqrt(p0[0] * p0[0] + p0[1] * p0[1] + p0[2] * p0[2]);

    bool third_law_ok = true;
    const Real dt = 0.002f;
    for (int step = 0; step < 100; ++step) {
        std::vector<ContactAccumulator> acc(1);
        GridHook hook = [&](Grid& g) {
            // Record per-node momenta so the contact delta is exact instead
            // of a small difference of large float sums.
            std::vector<Vec3> before(g.nodes.size());
            for (size_t n = 0; n < g.nodes.size(); ++n)
                if (g.nodes[n].mass > kMassEpsilon)
                    before[n] = g.nodes[n].velocity * g.nodes[n].mass;
            apply_contact_pass(g, shapes, acc);
            double delta[3] = {0, 0, 0};
            for (size_t n = 0; n < g.nodes.size(); ++n) {
                if (g.nodes[n].mass <= kMassEpsilon) continue;
                Vec3 d = g.nodes[n].velocity * g.nodes[n].mass - before[n];
                delta[0] += d.x;
                delta[1] += d.y;
                delta[2] += d.z;
            }
            double dx = acc[0].impulse.x + delta[0];
            double dy = acc[0].impulse.y + delta[1];
            double dz = acc[0].impulse.z + delta[2];
            double mismatch = std::sqrt(dx * dx + dy * dy + dz * dz);
            double scale = std::max(
                std::sqrt(delta[0] * delta[0] + delta[1] * delta[1] +
                          delta[2] * delta[2]),
                1e-8);
            if (mismatch > 1e-4 * scale) third_law_ok = false;
        };
        step_mls(s, dt, Vec3{}, hook);
        particle_pushout(s.particles, shapes, s.grid.dx);
        integrate_free_body(shapes[0].pose, shapes[0].body, acc[0].impulse,
                            acc[0].torque_impulse, Vec3{}, dt);
    }

    Totals t1 = particle_totals(s.particles);
    double p1[3] = {t1.p[0] + 0.5 * double(shapes[0].pose.linear_velocity.x),
                    t1.p[1] + 0.5 * double(shapes[0].pose.linear_velocity.y),
                    t1.p[2] + 0.5 * double(shapes[0].pose.linear_velocity.z)};
    double err = 0;
    for (int a = 0; a < 3; ++a)
        err = std::max(err, std::abs(p1[a] - p0[a]) / p0_norm);
    bool pass = err <= 2e-3 && third_law_ok;
    char buf[120];
    std::snprintf(buf, sizeof(buf), "momentum_err=%.3g third_law=%s", err,
                  third_law_ok ? "ok" : "violated");
    report(5, "two-way coupling momentum closure", pass, buf);
}

// --- criterion 6: cutting ----------------------------------------------------

std::vector<size_t> component_sizes(const std::vector<Vec3>& pos,
                                    const std::vector<uint8_t>& active,
                                    Real radius) {
    using namespace scenario_detail;
    auto hash = build_hash(pos, active, radius);
    UnionFind uf(pos.size());
    const Real r2 = radius * radius;
    size_t n_active = 0;
    for (size_t i = 0; i < pos.size(); ++i) {
        if (!active.empty() && !active[i]) continue;
        ++n_active;
        for (int dz = -1; dz <= 1; ++dz)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    Vec3 probe =
                        pos[i] + Vec3{Real(dx), Real(dy), Real(dz)} * radius;
                    auto it = hash.find(cell_key(probe, radius));
                    if (it == hash.end()) continue;
                    for (int j : it->second)
                        if ((pos[i] - pos[j]).norm2() <= r2)
                            uf.unite(static_cast<int>(i), j);
                }
    }
    std::unordered_map<int, size_t> sizes;
    for (size_t i = 0; i < pos.size(); ++i) {
        if (!active.empty() && !active[i]) continue;
        sizes[uf.find(static_cast<int>(i))]++;
    }
    std::vector<size_t> out;
    const size_t threshold =
        static_cast<size_t>(std::ceil(0.05 * double(n_active)));
    for (const auto& [root, size] : sizes)
        if (size >= threshold) out.push_back(size);
    std::sort(out.rbegin(), out.rend());
    out.push_back(n_active);  // trailing total for share computation
    return out;
}

void criterion_cutting() {
    bool pass = true;
    std::string detail;

    SceneSpec cut = load_scene(scenes_dir() + "/cutting.json");
    auto scene = scene_from_spec(cut);
    Real link = Real(1.5) * mean_nearest_neighbor_spacing(
                                scene->state().particles.x,
                                scene->state().particles.active, cut.grid_dx);
    for (int f = 0; f < 125; ++f) {
        scene->advance(cut.dt_frame);
        scene->fetch_results();
    }
    auto sizes = component_sizes(scene->state().particles.x,
                                 scene->state().particles.active, link);
    size_t total = sizes.back();
    sizes.pop_back();
    if (sizes.size() < 2) pass = false;
    int majors = 0;
    for (size_t sz : sizes)
        if (double(sz) >= 0.2 * double(total)) ++majors;
    if (majors < 2) pass = false;
    {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "cut: %zu components, %d major; ",
                      sizes.size(), majors);
        detail += buf;
    }

    SceneSpec blunt = load_scene(scenes_dir() + "/cutting_blunt.json");
    auto scene_b = scene_from_spec(blunt);
    Real link_b =
        Real(1.5) * mean_nearest_neighbor_spacing(scene_b->state().particles.x,
                                                  scene_b->state().particles.active,
                                                  blunt.grid_dx);
    for (int f = 0; f < 100; ++f) {
        scene_b->advance(blunt.dt_frame);
        scene_b->fetch_results();
    }
    int blunt_components = compute_components(scene_b->state().particles.x,
                                              scene_b->state().particles.active,
                                              link_b);
    if (blunt_components != 1) pass = false;
    {
        char buf[80];
        std::snprintf(buf, sizeof(buf), "blunt: %d component(s)",
                      blunt_components);
        detail += buf;
    }
    report(6, "slicer cuts into >= 2 major components; blunt side does not",
           pass, detail);
}

// --- criterion 7: suturing anisotropy ----------------------------------------

double mean_impulse_norm(SceneSpec spec, int frames) {
    auto scene = scene_from_spec(spec);
    double sum = 0;
    for (int f = 0; f < frames; ++f) {
        scene->advance(spec.dt_frame);
        FrameResult r = scene->fetch_results();
        if (!r.shape_impulses.empty()) sum += double(r.shape_impulses[0].norm());
    }
    return sum / frames;
}

void criterion_suturing() {
    const int frames = 50;
    SceneSpec tang = load_scene(scenes_dir() + "/needle_tangent.json");
    SceneSpec lat = load_scene(scenes_dir() + "/needle_lateral.json");

    double imp_t = mean_impulse_norm(tang, frames);
    double imp_l = mean_impulse_norm(lat, frames);
    bool pass = imp_l > 0 && imp_t <= 0.2 * imp_l;

    // Idealized parameters: tangential slide is impulse-free.
    SceneSpec tang0 = tang, lat0 = lat;
    for (auto& sh : tang0.shapes) { sh.mu_k = 0; sh.c_d = 1; }
    for (auto& sh : lat0.shapes) { sh.mu_k = 0; sh.c_d = 1; }
    double imp_t0 = mean_impulse_norm(tang0, frames);
    double imp_l0 = mean_impulse_norm(lat0, frames);
    if (!(imp_l0 > 0 && imp_t0 <= 1e-3 * imp_l0)) pass = false;

    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "tangent=%.3g lateral=%.3g ratio=%.3g; ideal ratio=%.3g",
                  imp_t, imp_l, imp_l > 0 ? imp_t / imp_l : -1,
                  imp_l0 > 0 ? imp_t0 / imp_l0 : -1);
    report(7, "needle anisotropy (tangential slide vs lateral drive)", pass,
           buf);
}

// --- criterion 8: benchmark harness ------------------------------------------

void criterion_benchmark() {
    SceneSpec tmpl = load_scene(scenes_dir() + "/cube_drop.json");
    auto rows = run_benchmark(tmpl, {1000, 8000, 64000}, 3);

    bool pass = true;
    std::string detail;
    // Monotone nondecreasing in particle count per solver configuration.
    for (size_t i = 0; i + 1 < rows.size(); ++i) {
        if (rows[i].solver != rows[i + 1].solver) continue;
        if (rows[i].skipped || rows[i + 1].skipped) continue;
        if (rows[i + 1].ms_per_step_mean < rows[i].ms_per_step_mean) {
            pass = false;
            detail += rows[i].solver + " not monotone; ";
        }
    }
    // pbmpm 20 iterations costs at least as much as 10 at each count.
    for (const auto& r10 : rows) {
        if (r10.solver != "pbmpm_10" || r10.skipped) continue;
        for (const auto& r20 : rows) {
            if (r20.solver != "pbmpm_20" || r20.skipped) continue;
            if (std::abs(r20.particles - r10.particles) >
                r10.particles / 10)
                continue;
            if (r20.ms_per_step_mean < r10.ms_per_step_mean) {
                pass = false;
                detail += "pbmpm_20 cheaper than pbmpm_10; ";
            }
        }
    }

    namespace fs = std::filesystem;
    fs::path csv = fs::temp_directory_path() / "mpm_acceptance_bench.csv";
    write_benchmark_csv(rows, csv.string());
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    if (header != kBenchmarkCsvHeader) {
        pass = false;
        detail += "csv header mismatch: '" + header + "'; ";
    }
    report(8, "benchmark harness (scaling monotone, CSV header exact)", pass,
           detail);
}

// --- criterion 9: lifecycle + determinism -------------------------------------

bool files_identical(const std::filesystem::path& a,
                     const std::filesystem::path& b) {
    std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
    if (!fa || !fb) return false;
    std::vector<char> ba((std::istreambuf_iterator<char>(fa)),
                         std::istreambuf_iterator<char>());
    std::vector<char> bb((std::istreambuf_iterator<char>(fb)),
                         std::istreambuf_iterator<char>());
    return ba == bb;
}

void criterion_lifecycle_determinism() {
    bool pass = true;
    std::string detail;

    // Random legal/illegal call sequences through the handle facade.
    using namespace mpm::facade;
    SplitMix64 rng(424242);
    for (int trial = 0; trial < 10 && pass; ++trial) {
        SceneConfig cfg;
        cfg.grid_dims[0] = cfg.grid_dims[1] = cfg.grid_dims[2] = 16;
        cfg.dx = 0.05f;
        cfg.substeps = 2;
        Handle scene = create_scene(cfg);
        Material m;
        auto [mu, lambda] = lame_from_young_poisson(100.0f, 0.3f);
        m.mu = mu;
        m.lambda = lambda;
        Handle mat = create_material(scene, m);
        create_particle_object(scene, mat, {0.3f, 0.3f, 0.3f},
                               {0.45f, 0.45f, 0.45f}, 8, 1000, 1);
        bool pending = false;
        for (int op = 0; op < 30; ++op) {
            switch (rng.next() % 3) {
                case 0: {
                    Status st = advance(scene, 0.01f);
                    Status want =
                        pending ? Status::lifecycle_error : Status::ok;
                    if (st != want) pass = false;
                    if (st == Status::ok) pending = true;
                    break;
                }
                case 1: {
                    FrameResult r;
                    Status st = fetch_results(scene, r);
                    Status want =
                        pending ? Status::ok : Status::lifecycle_error;
                    if (st != want) pass = false;
                    if (st == Status::ok) pending = false;
                    break;
                }
                default:
                    if (advance(scene, -1.0f) != Status::invalid_argument)
                        pass = false;
                    break;
            }
        }
        destroy(scene);
        if (advance(scene, 0.01f) != Status::bad_handle) pass = false;
    }
    if (!pass) detail += "lifecycle property violated; ";

    // Byte-identical frame dumps across repeated deterministic runs.
    namespace fs = std::filesystem;
    const char* names[] = {"cube_drop.json",      "cube_drop_pbmpm.json",
                           "rigid_coupling.json", "cutting.json",
                           "cutting_blunt.json",  "needle_tangent.json",
                           "needle_lateral.json", "suture_pass.json"};
    fs::path base = fs::temp_directory_path() / "mpm_acceptance_det";
    for (const char* name : names) {
        SceneSpec spec = load_scene(scenes_dir() + "/" + name);
        ScenarioOptions opts;
        opts.deterministic = true;
        opts.stride_override = 1;
        fs::path d1 = base / (std::string(name) + ".a");
        fs::path d2 = base / (std::string(name) + ".b");
        run_scenario(spec, 5, d1.string(), opts);
        run_scenario(spec, 5, d2.string(), opts);
        for (int f = 0; f < 5; ++f) {
            char fname[64];
            std::snprintf(fname, sizeof(fname), "frame_%06d.bin", f);
            if (!files_identical(d1 / fname, d2 / fname)) {
                pass = false;
                detail += std::string(name) + " frame dumps differ; ";
                break;
            }
        }
    }
    report(9, "lifecycle property test and bitwise-deterministic replays",
           pass, detail);
}

}  // namespace

int main() {
    criterion_conservation();
    criterion_transfer_fidelity();
    criterion_constitutive();
    criterion_reference_runs();
    criterion_coupling();
    criterion_cutting();
    criterion_suturing();
    criterion_benchmark();
    criterion_lifecycle_determinism();
    if (g_failures) {
        std::printf("ACCEPTANCE: %d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("ACCEPTANCE: all 9 criteria passed\n");
    return 0;
}
