#pragma once

#include <optional>
#include <span>
#include <vector>

#include "clutter/scene.hpp"
#include "clutter/worker_pool.hpp"

namespace clutter {

class InvalidAction : public Error {
public:
    using Error::Error;
};

/// Straight pusher-tip stroke.
struct PushAction {
    Vec2 start;
    Vec2 direction;  // unit
    double distance = 0.05;

    Vec2 end() const { return start + direction * distance; }
    bool operator==(const PushAction&) const = default;
};

/// Parameters of the quasi-static push model. Serialized with benchmark results.
struct PushSimConfig {
    double pusher_radius = 0.01;
    double substep = 1e-3;
    /// Rotation gain: dtheta = gain * friction_scale * cross(lever, displacement) / gyration^2.
    double rotation_gain = 0.5;
    int projection_iterations = 32;
    /// Extra projection rounds after the stroke to settle residual overlaps.
    int settle_iterations = 256;
    double penetration_tolerance = 1e-4;
};

/// Simulates the pusher disc sweeping the stroke. Objects are pose-only; the result is
/// the settled scene. Throws InvalidAction when the stroke starts in collision.
SceneState step_push(const SceneState& state, const PushAction& action, const PushSimConfig& cfg = {});

/// Independent scene states advanced in lockstep.
struct SimBatch {
    std::vector<SceneState> states;
    std::size_t size() const { return states.size(); }
};

/// Applies step_push per index (indices with no action pass through). Runs on `pool`
/// when given; the result never depends on scheduling. Throws InvalidAction per index
/// error and std::invalid_argument when `actions` is misaligned with the batch.
SimBatch step_batch(const SimBatch& batch, std::span<const std::optional<PushAction>> actions,
                    const PushSimConfig& cfg = {}, WorkerPool* pool = nullptr);

/// Lifts `object_id` over the clutter and sets it down at `place_pose`.
SceneState apply_pick_place(const SceneState& state, int object_id, const Pose2& place_pose);

/// Drags `object_id` along validated waypoints; other objects stay put.
SceneState apply_push_trajectory(const SceneState& state, int object_id, std::span<const Pose2> waypoints);

}  // namespace clutter
