#pragma once

// Flat handle-based facade over the scene API: integer handles, plain-data
// arguments, status codes instead of exceptions. Intended for foreign-function
// callers that cannot hold C++ objects across the boundary.

#include <cstdint>
#include <memory>
#include <unordered_map>

#include "mpm/scene.hpp"

namespace mpm::facade {

using Handle = uint64_t;
inline constexpr Handle kInvalidHandle = 0;

enum class Status {
    ok,
    bad_handle,
    lifecycle_error,
    invalid_argument,
    buffer_too_small,
};

namespace detail {

enum class HandleKind { scene, particle_object, shape, material };

struct Entry {
    HandleKind kind;
    Handle scene = kInvalidHandle;  // owner, for non-scene handles
    int inner_id = -1;
    std::unique_ptr<Scene> owned;   // kind == scene
    bool alive = true;
};

struct Registry {
    std::unordered_map<Handle, Entry> entries;
    Handle next = 1;  // handles are never reused

    Handle insert(Entry e) {
        Handle h = next++;
        entries.emplace(h, std::move(e));
        return h;
    }
    Entry* find(Handle h, HandleKind kind) {
        auto it = entries.find(h);
        if (it == entries.end() || !it->second.alive ||
            it->second.kind != kind)
            return nullptr;
        return &it->second;
    }
    Scene* scene_of(Handle h) {
        Entry* e = find(h, HandleKind::scene);
        return e ? e->owned.get() : nullptr;
    }
};

inline Registry& registry() {
    static Registry r;
    return r;
}

}  // namespace detail

inline Handle create_scene(const SceneConfig& config) {
    try {
        detail::Entry e;
        e.kind = detail::HandleKind::scene;
        e.owned = std::make_unique<Scene>(config);
        return detail::registry().insert(std::move(e));
    } catch (const std::exception&) {
        return kInvalidHandle;
    }
}

inline Status destroy(Handle h) {
    auto& reg = detail::registry();
    auto it = reg.entries.find(h);
    if (it == reg.entries.end() || !it->second.alive) return Status::bad_handle;
    detail::Entry& e = it->second;
    if (e.kind == detail::HandleKind::scene) {
        // Invalidate every handle owned by this scene.
        for (auto& [hh, ee] : reg.entries)
            if (ee.scene == h) ee.alive = false;
    } else {
        Scene* scene = reg.scene_of(e.scene);
        if (scene) {
            try {
                if (e.kind == detail::HandleKind::shape)
                    scene->destroy_shape(e.inner_id);
                else if (e.kind == detail::HandleKind::particle_object)
                    scene->destroy_particle_object(e.inner_id);
            } catch (const std::exception&) {
                return Status::invalid_argument;
            }
        }
    }
    e.alive = false;
    e.owned.reset();
    return Status::ok;
}

inline Handle create_material(Handle scene_h, const Material& mat) {
    Scene* scene = detail::registry().scene_of(scene_h);
    if (!scene) return kInvalidHandle;
    detail::Entry e;
    e.kind = detail::HandleKind::material;
    e.scene = scene_h;
    e.inner_id = scene->add_material(mat);
    return detail::registry().insert(std::move(e));
}

inline Handle create_particle_object(Handle scene_h, Handle material_h,
                                     const Vec3& min_corner,
                                     const Vec3& max_corner,
                                     int particles_per_cell, Real density,
                                     uint64_t seed) {
    auto& reg = detail::registry();
    Scene* scene = reg.scene_of(scene_h);
    detail::Entry* mat = reg.find(material_h, detail::HandleKind::material);
    if (!scene || !mat || mat->scene != scene_h) return kInvalidHandle;
    try {
        detail::Entry e;
        e.kind = detail::HandleKind::particle_object;
        e.scene = scene_h;
        e.inner_id = scene->create_particle_object(
            min_corner, max_corner, particles_per_cell, density, mat->inner_id,
            seed);
        return reg.insert(std::move(e));
    } catch (const std::exception&) {
        return kInvalidHandle;
    }
}

inline Handle create_shape(Handle scene_h, const Shape& spec) {
    Scene* scene = detail::registry().scene_of(scene_h);
    if (!scene) return kInvalidHandle;
    try {
        detail::Entry e;
        e.kind = detail::HandleKind::shape;
        e.scene = scene_h;
        e.inner_id = scene->create_shape(spec);
        return detail::registry().insert(std::move(e));
    } catch (const std::exception&) {
        return kInvalidHandle;
    }
}

inline Status set_shape_pose_target(Handle scene_h, Handle shape_h,
                                    const Vec3& position,
                                    const Quat& orientation) {
    auto& reg = detail::registry();
    Scene* scene = reg.scene_of(scene_h);
    detail::Entry* sh = reg.find(shape_h, detail::HandleKind::shape);
    if (!scene || !sh || sh->scene != scene_h) return Status::bad_handle;
    scene->set_shape_pose_target(sh->inner_id, position, orientation);
    return Status::ok;
}

inline Status advance(Handle scene_h, Real dt) {
    Scene* scene = detail::registry().scene_of(scene_h);
    if (!scene) return Status::bad_handle;
    if (dt <= 0) return Status::invalid_argument;
    try {
        scene->advance(dt);
    } catch (const std::logic_error&) {
        return Status::lifecycle_error;
    }
    return Status::ok;
}

inline Status fetch_results(Handle scene_h, FrameResult& out) {
    Scene* scene = detail::registry().scene_of(scene_h);
    if (!scene) return Status::bad_handle;
    try {
        out = scene->fetch_results();
    } catch (const std::logic_error&) {
        return Status::lifecycle_error;
    }
    return Status::ok;
}

inline int particle_count(Handle scene_h) {
    Scene* scene = detail::registry().scene_of(scene_h);
    return scene ? static_cast<int>(scene->state().particles.size()) : -1;
}

// Bulk position read into a caller-provided xyz float buffer.
inline Status copy_positions(Handle scene_h, float* out, size_t capacity_floats,
                             size_t& written_floats) {
    Scene* scene = detail::registry().scene_of(scene_h);
    if (!scene) return Status::bad_handle;
    const auto& x = scene->state().particles.x;
    written_floats = x.size() * 3;
    if (capacity_floats < written_floats) return Status::buffer_too_small;
    for (size_t i = 0; i < x.size(); ++i) {
        out[3 * i + 0] = x[i].x;
        out[3 * i + 1] = x[i].y;
        out[3 * i + 2] = x[i].z;
    }
    return Status::ok;
}

inline Status shape_impulse(Handle scene_h, Handle shape_h, Vec3& out) {
    auto& reg = detail::registry();
    Scene* scene = reg.scene_of(scene_h);
    detail::Entry* sh = reg.find(shape_h, detail::HandleKind::shape);
    if (!scene || !sh || sh->scene != scene_h) return Status::bad_handle;
    const auto& shapes = scene->shapes();
    for (size_t i = 0; i < shapes.size(); ++i) {
        if (shapes[i].id == sh->inner_id) {
            out = scene->frame_accumulators()[i].impulse;
            return Status::ok;
        }
    }
    return Status::bad_handle;
}

}  // namespace mpm::facade
