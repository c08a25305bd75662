#pragma once

#include <stdexcept>
#include <variant>
#include <vector>

#include "mpm/geometry.hpp"

namespace mpm {

struct Keyframe {
    Real time = 0;  // s
    Vec3 position;
    Quat orientation;
};

struct KinematicTrajectory {
    std::vector<Keyframe> keyframes;
};

inline void validate_trajectory(const KinematicTrajectory& traj) {
    if (traj.keyframes.empty())
        throw std::invalid_argument("trajectory: needs >= 1 keyframe");
    for (size_t i = 1; i < traj.keyframes.size(); ++i)
        if (!(traj.keyframes[i].time > traj.keyframes[i - 1].time))
            throw std::invalid_argument("trajectory: times must be strictly increasing");
}

namespace detail {

inline void interp_pose(const KinematicTrajectory& traj, Real t, Vec3& pos,
                        Quat& rot) {
    const auto& kf = traj.keyframes;
    if (t <= kf.front().time) {
        pos = kf.front().position;
        rot = kf.front().orientation;
        return;
    }
    if (t >= kf.back().time) {
        pos = kf.back().position;
        rot = kf.back().orientation;
        return;
    }
    size_t hi = 1;
    while (kf[hi].time < t) ++hi;
    const Keyframe& a = kf[hi - 1];
    const Keyframe& b = kf[hi];
    Real u = (t - a.time) / (b.time - a.time);
    pos = a.position + (b.position - a.position) * u;
    rot = slerp(a.orientation, b.orientation, u);
}

}  // namespace detail

// Clamped linear/spherical interpolation; velocities by central finite
// difference (h = 1e-4 s) so they vanish beyond the endpoints.
inline ShapePose evaluate_trajectory(const KinematicTrajectory& traj, Real t) {
    ShapePose pose;
    detail::interp_pose(traj, t, pose.position, pose.orientation);

    const Real h = Real(1e-4);
    Vec3 p0, p1;
    Quat q0, q1;
    detail::interp_pose(traj, t - h, p0, q0);
    detail::interp_pose(traj, t + h, p1, q1);
    pose.linear_velocity = (p1 - p0) / (2 * h);
    // omega = 2 * (dq/dt) * q^-1, vector part.
    Quat dq{(q1.x - q0.x) / (2 * h), (q1.y - q0.y) / (2 * h),
            (q1.z - q0.z) / (2 * h), (q1.w - q0.w) / (2 * h)};
    Quat w = dq * pose.orientation.conjugate();
    pose.angular_velocity = Vec3{w.x, w.y, w.z} * Real(2);
    return pose;
}

struct FreeBody {
    Real mass = 1;          // kg
    Vec3 inertia_diag{1, 1, 1};  // kg m^2, body frame
};

// Semi-implicit Euler with a world-frame inertia built from the body-frame
// diagonal each step.
inline void integrate_free_body(ShapePose& pose, const FreeBody& body,
                                const Vec3& impulse, const Vec3& torque_impulse,
                                const Vec3& gravity, Real dt) {
    if (dt <= 0) throw std::invalid_argument("free body: dt must be positive");
    pose.linear_velocity += impulse * (Real(1) / body.mass) + gravity * dt;

    Mat3 R = pose.orientation.to_mat3();
    Mat3 I_inv_body = Mat3::diag(Real(1) / body.inertia_diag.x,
                                 Real(1) / body.inertia_diag.y,
                                 Real(1) / body.inertia_diag.z);
    Mat3 I_inv_world = R * I_inv_body * R.transposed();
    pose.angular_velocity += I_inv_world * torque_impulse;

    pose.position += pose.linear_velocity * dt;
    Vec3 w = pose.angular_velocity;
    Quat dq = Quat{w.x, w.y, w.z, 0} * pose.orientation;
    pose.orientation = Quat{pose.orientation.x + Real(0.5) * dt * dq.x,
                            pose.orientation.y + Real(0.5) * dt * dq.y,
                            pose.orientation.z + Real(0.5) * dt * dq.z,
                            pose.orientation.w + Real(0.5) * dt * dq.w}
                           .normalized();
}

enum class MotionKind { fixed, kinematic, free_body };

struct Shape {
    int id = -1;
    Geometry geometry;
    ShapePose pose;
    Real mu_k = 0;                 // kinetic friction
    Real c_d = 1;                  // drag retention, 0 = fully sticky
    Real collision_halfwidth = 0;  // fattened band for slicer/1D geometries
    MotionKind motion = MotionKind::fixed;
    KinematicTrajectory trajectory;  // motion == kinematic
    FreeBody body;                   // motion == free_body
};

}  // namespace mpm
