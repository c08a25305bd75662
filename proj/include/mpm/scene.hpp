#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mpm/contact.hpp"
#include "mpm/solvers.hpp"

namespace mpm {

enum class SolverKind { standard, mls, pbmpm };

struct SceneConfig {
    SolverKind solver = SolverKind::mls;
    int substeps = 10;    // standard / mls
    int iterations = 10;  // pbmpm
    Vec3 gravity{0, Real(-9.81), 0};
    int grid_dims[3] = {56, 56, 56};
    Real dx = Real(0.025);
    Vec3 origin;
    BoundaryKind boundary = BoundaryKind::slip;
};

enum class SceneStatus { idle, advancing, results_ready };

struct FrameResult {
    Real time = 0;
    std::vector<Vec3> positions;
    std::vector<Vec3> velocities;
    std::vector<uint8_t> active;
    std::vector<int> shape_ids;
    std::vector<Vec3> shape_impulses;
    std::vector<Vec3> shape_torque_impulses;
    double total_mass = 0;
    double momentum[3] = {0, 0, 0};
    double kinetic_energy = 0;
    int pushed_out = 0;
    int inverted_f = 0;
    int projection_failures = 0;
    int deactivated = 0;
};

class Scene {
  public:
    explicit Scene(const SceneConfig& config) : config_(config) {
        if (config.substeps < 1 || config.iterations < 1)
            throw std::invalid_argument("scene: substeps/iterations must be >= 1");
        state_.grid = Grid(config.grid_dims[0], config.grid_dims[1],
                           config.grid_dims[2], config.dx, config.origin);
    }

    Scene(const Scene&) = delete;
    Scene& operator=(const Scene&) = delete;

    int add_material(const Material& mat) {
        state_.materials.push_back(mat);
        return static_cast<int>(state_.materials.size()) - 1;
    }

    int create_particle_object(const Vec3& min_corner, const Vec3& max_corner,
                               int particles_per_cell, Real density,
                               int material_id, uint64_t seed) {
        if (material_id < 0 ||
            material_id >= static_cast<int>(state_.materials.size()))
            throw std::invalid_argument("scene: unknown material id");
        int id = next_object_id_++;
        objects_.push_back(spawn_box_particles(
            state_.particles, state_.grid, min_corner, max_corner,
            particles_per_cell, density, material_id, seed, id));
        return id;
    }

    int create_shape(Shape shape) {
        validate_geometry(shape.geometry);
        if (shape.motion == MotionKind::kinematic)
            validate_trajectory(shape.trajectory);
        if (shape.collision_halfwidth <= 0)
            shape.collision_halfwidth = Real(0.75) * state_.grid.dx;
        shape.id = next_shape_id_++;
        if (shape.motion == MotionKind::kinematic)
            shape.pose = evaluate_trajectory(shape.trajectory, time_);
        shapes_.push_back(std::move(shape));
        frame_accumulators_.emplace_back();
        pose_targets_.emplace_back();
        return shapes_.back().id;
    }

    void destroy_shape(int shape_id) {
        size_t i = shape_index(shape_id);
        shapes_.erase(shapes_.begin() + i);
        frame_accumulators_.erase(frame_accumulators_.begin() + i);
        pose_targets_.erase(pose_targets_.begin() + i);
    }

    void destroy_particle_object(int object_id) {
        for (auto it = objects_.begin(); it != objects_.end(); ++it) {
            if (it->id == object_id) {
                for (size_t i = it->begin; i < it->end; ++i)
                    state_.particles.active[i] = 0;
                objects_.erase(it);
                return;
            }
        }
        throw std::invalid_argument("scene: unknown particle object id");
    }

    // Target pose consumed by the next advance(): the shape moves there
    // linearly over that frame.
    void set_shape_pose_target(int shape_id, const Vec3& position,
                               const Quat& orientation) {
        size_t i = shape_index(shape_id);
        pose_targets_[i] = Keyframe{0, position, orientation.normalized()};
    }

    void advance(Real dt) {
        if (status_ == SceneStatus::advancing)
            throw std::logic_error("scene: advance while a frame is pending");
        if (dt <= 0) throw std::invalid_argument("scene: dt must be positive");
        status_ = SceneStatus::advancing;
        run_frame(dt);  // synchronous; the split is a lifecycle contract
    }

    FrameResult fetch_results() {
        if (status_ != SceneStatus::advancing)
            throw std::logic_error("scene: fetch without a pending advance");
        status_ = SceneStatus::results_ready;
        return make_result();
    }

    SceneStatus status() const { return status_; }
    Real time() const { return time_; }
    const SimState& state() const { return state_; }
    SimState& state() { return state_; }
    const std::vector<Shape>& shapes() const { return shapes_; }
    std::vector<Shape>& shapes() { return shapes_; }
    const std::vector<ParticleObject>& objects() const { return objects_; }
    const SceneConfig& config() const { return config_; }
    const std::vector<ContactAccumulator>& frame_accumulators() const {
        return frame_accumulators_;
    }

  private:
    size_t shape_index(int shape_id) const {
        for (size_t i = 0; i < shapes_.size(); ++i)
            if (shapes_[i].id == shape_id) return i;
        throw std::invalid_argument("scene: unknown shape id");
    }

    void update_kinematic_shapes(Real t, Real frame_t0, Real frame_dt) {
        for (size_t i = 0; i < shapes_.size(); ++i) {
            Shape& s = shapes_[i];
            if (pose_targets_[i]) {
                // Linear drive toward the target over this frame.
                const Keyframe& target = *pose_targets_[i];
                Real u = std::clamp((t - frame_t0) / frame_dt, Real(0), Real(1));
                Vec3 start_pos = frame_start_poses_[i].position;
                Quat start_rot = frame_start_poses_[i].orientation;
                s.pose.position = start_pos + (target.position - start_pos) * u;
                s.pose.orientation = slerp(start_rot, target.orientation, u);
                s.pose.linear_velocity = (target.position - start_pos) / frame_dt;
                Quat dq = target.orientation * start_rot.conjugate();
                Real angle = 2 * std::acos(std::clamp(dq.w, Real(-1), Real(1)));
                Vec3 axis{dq.x, dq.y, dq.z};
                s.pose.angular_velocity =
                    angle > Real(1e-7)
                        ? axis.normalized() * (angle / frame_dt)
                        : Vec3{};
            } else if (s.motion == MotionKind::kinematic) {
                s.pose = evaluate_trajectory(s.trajectory, t);
            }
        }
    }

    void run_frame(Real dt) {
        for (auto& acc : frame_accumulators_) acc.reset();
        last_stats_ = StepStats{};
        pushed_out_ = 0;
        deactivated_ = 0;

        frame_start_poses_.clear();
        for (const Shape& s : shapes_) frame_start_poses_.push_back(s.pose);

        const int n_sub =
            config_.solver == SolverKind::pbmpm ? 1 : config_.substeps;
        const Real dt_sub = dt / Real(n_sub);

        std::vector<ContactAccumulator> sub_acc(shapes_.size());
        GridHook hook = [&](Grid& g) {
            apply_contact_pass(g, shapes_, sub_acc);
        };

        for (int s = 0; s < n_sub; ++s) {
            update_kinematic_shapes(time_ + Real(s) * dt_sub, time_, dt);
            for (auto& acc : sub_acc) acc.reset();

            StepStats stats;
            switch (config_.solver) {
                case SolverKind::standard:
                    stats = step_standard(state_, dt_sub, config_.gravity, hook,
                                          config_.boundary);
                    break;
                case SolverKind::mls:
                    stats = step_mls(state_, dt_sub, config_.gravity, hook,
                                     config_.boundary);
                    break;
                case SolverKind::pbmpm:
                    stats = step_pbmpm(state_, dt_sub, config_.gravity,
                                       PbmpmConfig{config_.iterations}, hook,
                                       config_.boundary);
                    break;
            }
            last_stats_.inverted_f += stats.inverted_f;
            last_stats_.projection_failures += stats.projection_failures;

            pushed_out_ += particle_pushout(state_.particles, shapes_,
                                            state_.grid.dx);

            for (size_t i = 0; i < shapes_.size(); ++i) {
                if (shapes_[i].motion == MotionKind::free_body) {
                    integrate_free_body(shapes_[i].pose, shapes_[i].body,
                                        sub_acc[i].impulse,
                                        sub_acc[i].torque_impulse,
                                        config_.gravity, dt_sub);
                }
                frame_accumulators_[i].impulse += sub_acc[i].impulse;
                frame_accumulators_[i].torque_impulse +=
                    sub_acc[i].torque_impulse;
                frame_accumulators_[i].contact_node_count +=
                    sub_acc[i].contact_node_count;
            }

            deactivated_ += deactivate_out_of_domain(state_.particles,
                                                     state_.grid);
        }

        // Consume one-shot pose targets.
        for (size_t i = 0; i < shapes_.size(); ++i) {
            if (pose_targets_[i]) {
                shapes_[i].pose.position = pose_targets_[i]->position;
                shapes_[i].pose.orientation = pose_targets_[i]->orientation;
                shapes_[i].pose.linear_velocity = Vec3{};
                shapes_[i].pose.angular_velocity = Vec3{};
                pose_targets_[i].reset();
            }
        }
        time_ += dt;
    }

    FrameResult make_result() const {
        FrameResult r;
        r.time = time_;
        const ParticleStore& p = state_.particles;
        r.positions = p.x;
        r.velocities = p.v;
        r.active = p.active;
        for (size_t i = 0; i < p.size(); ++i) {
            if (!p.active[i]) continue;
            double m = p.mass[i];
            r.total_mass += m;
            r.momentum[0] += m * p.v[i].x;
            r.momentum[1] += m * p.v[i].y;
            r.momentum[2] += m * p.v[i].z;
            r.kinetic_energy += 0.5 * m * double(p.v[i].norm2());
        }
        for (size_t i = 0; i < shapes_.size(); ++i) {
            r.shape_ids.push_back(shapes_[i].id);
            r.shape_impulses.push_back(frame_accumulators_[i].impulse);
            r.shape_torque_impulses.push_back(
                frame_accumulators_[i].torque_impulse);
        }
        r.pushed_out = pushed_out_;
        r.inverted_f = last_stats_.inverted_f;
        r.projection_failures = last_stats_.projection_failures;
        r.deactivated = deactivated_;
        return r;
    }

    SceneConfig config_;
    SimState state_;
    std::vector<Shape> shapes_;
    std::vector<ContactAccumulator> frame_accumulators_;
    std::vector<std::optional<Keyframe>> pose_targets_;
    std::vector<ShapePose> frame_start_poses_;
    std::vector<ParticleObject> objects_;
    SceneStatus status_ = SceneStatus::idle;
    Real time_ = 0;
    StepStats last_stats_;
    int pushed_out_ = 0;
    int deactivated_ = 0;
    int next_shape_id_ = 0;
    int next_object_id_ = 0;
};

}  // namespace mpm
