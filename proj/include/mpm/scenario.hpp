#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "mpm/scene_spec.hpp"

namespace mpm {

namespace scenario_detail {

struct CellKey {
    int64_t v;
    bool operator==(const CellKey& o) const { return v == o.v; }
};

struct CellHash {
    size_t operator()(const CellKey& k) const {
        return std::hash<int64_t>()(k.v);
    }
};

inline CellKey cell_key(const Vec3& p, Real cell) {
    auto q = [cell](Real x) {
        return static_cast<int64_t>(std::floor(x / cell)) & 0x1fffff;
    };
    return {q(p.x) | (q(p.y) << 21) | (q(p.z) << 42)};
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(size_t n) : parent(n) {
        for (size_t i = 0; i < n; ++i) parent[i] = static_cast<int>(i);
    }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[b] = a;
    }
};

inline std::unordered_map<CellKey, std::vector<int>, CellHash> build_hash(
    const std::vector<Vec3>& pos, const std::vector<uint8_t>& active,
    Real cell) {
    std::unordered_map<CellKey, std::vector<int>, CellHash> hash;
    for (size_t i = 0; i < pos.size(); ++i) {
        if (!active.empty() && !active[i]) continue;
        hash[cell_key(pos[i], cell)].push_back(static_cast<int>(i));
    }
    return hash;
}

}  // namespace scenario_detail

// Mean distance to the nearest neighbor over active particles, via a
// spatial hash seeded with a coarse cell guess.
inline Real mean_nearest_neighbor_spacing(const std::vector<Vec3>& pos,
                                          const std::vector<uint8_t>& active,
                                          Real cell_hint) {
    using namespace scenario_detail;
    auto hash = build_hash(pos, active, cell_hint);
    double sum = 0;
    size_t count = 0;
    for (size_t i = 0; i < pos.size(); ++i) {
        if (!active.empty() && !active[i]) continue;
        Real best2 = std::numeric_limits<Real>::max();
        for (int dz = -1; dz <= 1; ++dz)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    Vec3 probe = pos[i] + Vec3{Real(dx), Real(dy), Real(dz)} * cell_hint;
                    auto it = hash.find(cell_key(probe, cell_hint));
                    if (it == hash.end()) continue;
                    for (int j : it->second) {
                        if (static_cast<size_t>(j) == i) continue;
                        Real d2 = (pos[i] - pos[j]).norm2();
                        if (d2 < best2) best2 = d2;
                    }
                }
        if (best2 < std::numeric_limits<Real>::max()) {
            sum += std::sqrt(double(best2));
            ++count;
        }
    }
    return count ? static_cast<Real>(sum / count) : cell_hint;
}

// Union-find over particle pairs within `radius`; components holding fewer
// than 5% of the active particles are ignored.
inline int compute_components(const std::vector<Vec3>& pos,
                              const std::vector<uint8_t>& active, Real radius) {
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
                    Vec3 probe = pos[i] + Vec3{Real(dx), Real(dy), Real(dz)} * radius;
                    auto it = hash.find(cell_key(probe, radius));
                    if (it == hash.end()) continue;
                    for (int j : it->second)
                        if ((pos[i] - pos[j]).norm2() <= r2)
                            uf.unite(static_cast<int>(i), j);
                }
    }
    if (n_active == 0) return 0;
    std::unordered_map<int, size_t> sizes;
    for (size_t i = 0; i < pos.size(); ++i) {
        if (!active.empty() && !active[i]) continue;
        sizes[uf.find(static_cast<int>(i))]++;
    }
    const size_t threshold =
        static_cast<size_t>(std::ceil(0.05 * double(n_active)));
    int components = 0;
    for (const auto& [root, size] : sizes)
        if (size >= threshold) ++components;
    return components;
}

struct ScenarioSummary {
    int frames_done = 0;
    bool nan_detected = false;
    int final_component_count = 0;
    std::vector<Vec3> mean_abs_shape_impulse;  // per shape, mean over frames
};

struct ScenarioOptions {
    std::string solver_override;  // empty = use spec
    int stride_override = 0;      // 0 = use spec
    bool deterministic = true;    // accumulation is fixed-order either way
    bool write_outputs = true;
};

namespace scenario_detail {

inline void write_frame_bin(const std::string& path,
                            const std::vector<Vec3>& pos) {
    std::ofstream out(path, std::ios::binary);
    uint64_t count = pos.size();
    out.write(reinterpret_cast<const char*>(&count), 8);
    for (const Vec3& p : pos) {
        float xyz[3] = {p.x, p.y, p.z};
        out.write(reinterpret_cast<const char*>(xyz), sizeof(xyz));
    }
}

inline void write_frame_csv(const std::string& path,
                            const std::vector<Vec3>& pos) {
    std::ofstream out(path);
    out << "x,y,z\n";
    char buf[96];
    for (const Vec3& p : pos) {
        std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g\n", double(p.x),
                      double(p.y), double(p.z));
        out << buf;
    }
}

inline bool frame_has_nan(const FrameResult& r) {
    if (!std::isfinite(r.total_mass) || !std::isfinite(r.kinetic_energy))
        return true;
    for (int a = 0; a < 3; ++a)
        if (!std::isfinite(r.momentum[a])) return true;
    for (const Vec3& p : r.positions)
        if (!p.finite()) return true;
    return false;
}

}  // namespace scenario_detail

// Runs `frames` frames of a scene spec, writing frame dumps and metrics.csv
// under out_dir. Aborts on the first NaN frame, keeping the last good frame.
inline ScenarioSummary run_scenario(SceneSpec spec, int frames,
                                    const std::string& out_dir,
                                    const ScenarioOptions& opts = {}) {
    namespace fs = std::filesystem;
    using namespace scenario_detail;

    if (!opts.solver_override.empty()) spec.solver = opts.solver_override;
    int stride = opts.stride_override > 0 ? opts.stride_override
                                          : spec.outputs.stride;
    bool want_bin = false, want_csv = false;
    for (const auto& f : spec.outputs.formats) {
        if (f == "bin") want_bin = true;
        if (f == "csv") want_csv = true;
    }

    auto scene = scene_from_spec(spec);
    if (opts.write_outputs) fs::create_directories(out_dir);

    std::ofstream metrics;
    if (opts.write_outputs) {
        metrics.open(fs::path(out_dir) / "metrics.csv");
        metrics << "frame,sim_time,wall_ms,total_mass,momentum_x,momentum_y,"
                   "momentum_z,kinetic_energy,pushed_out,inverted_f";
        for (size_t i = 0; i < scene->shapes().size(); ++i)
            metrics << ",shape" << i << "_impulse_x,shape" << i
                    << "_impulse_y,shape" << i << "_impulse_z";
        metrics << ",component_count\n";
    }

    const Real nn_spacing = mean_nearest_neighbor_spacing(
        scene->state().particles.x, scene->state().particles.active,
        spec.grid_dx);
    const Real link_radius = Real(1.5) * nn_spacing;

    ScenarioSummary summary;
    summary.mean_abs_shape_impulse.resize(scene->shapes().size());

    for (int frame = 0; frame < frames; ++frame) {
        auto t0 = std::chrono::steady_clock::now();
        scene->advance(spec.dt_frame);
        FrameResult r = scene->fetch_results();
        auto t1 = std::chrono::steady_clock::now();
        double wall_ms =
            std::chrono::duration<double, std::milli>(t1 - t0).count();

        if (frame_has_nan(r)) {
            summary.nan_detected = true;
            break;
        }

        int components = compute_components(r.positions, r.active, link_radius);
        summary.final_component_count = components;
        for (size_t i = 0; i < r.shape_impulses.size(); ++i) {
            const Vec3& imp = r.shape_impulses[i];
            summary.mean_abs_shape_impulse[i] +=
                Vec3{std::abs(imp.x), std::abs(imp.y), std::abs(imp.z)};
        }

        if (opts.write_outputs) {
            char buf[256];
            std::snprintf(buf, sizeof(buf),
                          "%d,%.9g,%.6g,%.9g,%.9g,%.9g,%.9g,%.9g,%d,%d", frame,
                          double(r.time), wall_ms, r.total_mass, r.momentum[0],
                          r.momentum[1], r.momentum[2], r.kinetic_energy,
                          r.pushed_out, r.inverted_f);
            metrics << buf;
            for (const Vec3& imp : r.shape_impulses) {
                std::snprintf(buf, sizeof(buf), ",%.9g,%.9g,%.9g",
                              double(imp.x), double(imp.y), double(imp.z));
                metrics << buf;
            }
            metrics << "," << components << "\n";

            if (frame % stride == 0) {
                char name[64];
                if (want_bin) {
                    std::snprintf(name, sizeof(name), "frame_%06d.bin", frame);
                    write_frame_bin(fs::path(out_dir) / name, r.positions);
                }
                if (want_csv) {
                    std::snprintf(name, sizeof(name), "frame_%06d.csv", frame);
                    write_frame_csv(fs::path(out_dir) / name, r.positions);
                }
            }
        }
        summary.frames_done = frame + 1;
    }

    for (auto& v : summary.mean_abs_shape_impulse)
        if (summary.frames_done > 0) v *= Real(1) / Real(summary.frames_done);
    return summary;
}

struct BenchmarkRow {
    std::string solver;
    int particles = 0;
    double ms_per_step_mean = 0;
    double ms_per_step_std = 0;
    bool skipped = false;
};

inline constexpr const char* kBenchmarkCsvHeader =
    "solver,particles,ms_per_step_mean,ms_per_step_std";

// Cube-drop scaling benchmark on the fixed 56^3 grid: warmup 5 frames, then
// `steps` timed frames per solver configuration and particle count.
inline std::vector<BenchmarkRow> run_benchmark(
    const SceneSpec& spec_template, const std::vector<int>& particle_counts,
    int steps) {
    struct Config {
        std::string name;
        std::string solver;
        int substeps_or_iterations;
    };
    const Config configs[] = {
        {"standard", "standard", 10},
        {"mls", "mls", 10},
        {"pbmpm_10", "pbmpm", 10},
        {"pbmpm_20", "pbmpm", 20},
    };

    std::vector<BenchmarkRow> rows;
    for (const Config& cfg : configs) {
        for (int count : particle_counts) {
            SceneSpec spec = spec_template;
            spec.solver = cfg.solver;
            if (cfg.solver == "pbmpm") {
                spec.iterations = cfg.substeps_or_iterations;
                for (auto& p : spec.particle_objects) {
                    p.material.kind = "corotational_pb";
                    if (p.material.beta <= 0) p.material.beta = Real(0.9);
                }
            } else {
                spec.substeps = cfg.substeps_or_iterations;
                for (auto& p : spec.particle_objects)
                    p.material.kind = "neo_hookean";
            }
            // Scale the first particle object's cube to the requested count.
            if (spec.particle_objects.empty())
                throw std::runtime_error("benchmark: template has no particle object");
            auto& po = spec.particle_objects.front();
            Real spacing = spec.grid_dx /
                           std::cbrt(static_cast<Real>(po.particles_per_cell));
            int side = std::max(
                1, static_cast<int>(std::lround(std::cbrt(double(count)))));
            Vec3 center = (po.box_min + po.box_max) * Real(0.5);
            Vec3 half{side * spacing / 2, side * spacing / 2, side * spacing / 2};
            po.box_min = center - half;
            po.box_max = center + half;

            BenchmarkRow row;
            row.solver = cfg.name;
            try {
                auto scene = scene_from_spec(spec);
                row.particles =
                    static_cast<int>(scene->state().particles.size());
                for (int warm = 0; warm < 5; ++warm) {
                    scene->advance(spec.dt_frame);
                    scene->fetch_results();
                }
                std::vector<double> samples;
                samples.reserve(steps);
                for (int s = 0; s < steps; ++s) {
                    auto t0 = std::chrono::steady_clock::now();
                    scene->advance(spec.dt_frame);
                    scene->fetch_results();
                    auto t1 = std::chrono::steady_clock::now();
                    samples.push_back(
                        std::chrono::duration<double, std::milli>(t1 - t0)
                            .count());
                }
                double mean = 0;
                for (double s : samples) mean += s;
                mean /= samples.size();
                double var = 0;
                for (double s : samples) var += (s - mean) * (s - mean);
                row.ms_per_step_mean = mean;
                row.ms_per_step_std =
                    samples.size() > 1 ? std::sqrt(var / (samples.size() - 1)) : 0;
            } catch (const std::bad_alloc&) {
                row.particles = count;
                row.skipped = true;
            }
            rows.push_back(row);
        }
    }
    return rows;
}

inline void write_benchmark_csv(const std::vector<BenchmarkRow>& rows,
                                const std::string& path) {
    std::ofstream out(path);
    out << kBenchmarkCsvHeader << "\n";
    for (const auto& r : rows) {
        if (r.skipped) {
            out << r.solver << "," << r.particles << ",skipped,skipped\n";
        } else {
            char buf[128];
            std::snprintf(buf, sizeof(buf), "%s,%d,%.6g,%.6g\n",
                          r.solver.c_str(), r.particles, r.ms_per_step_mean,
                          r.ms_per_step_std);
            out << buf;
        }
    }
}

}  // namespace mpm
