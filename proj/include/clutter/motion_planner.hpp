#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "clutter/scene.hpp"

namespace clutter {

/// Collision-free SE(2) drag of a single object.
struct PushTrajectory {
    int object_id = -1;
    std::vector<Pose2> waypoints;  // first = current pose, last = final pose

    /// Euclidean length over the positional components.
    double path_length() const;
    bool operator==(const PushTrajectory&) const = default;
};

/// Resolution of swept-collision checks along segments, shared by the planner and
/// validate_trajectory.
inline constexpr double kCheckStep = 0.002;
inline constexpr double kCheckAngleStep = 0.02;

struct RrtConfig {
    double time_limit_s = 0.2;
    /// Weight of angular distance in the SE(2) metric, meters per radian.
    double rotation_weight = 0.1;
    /// Metric length of one tree extension.
    double extend_step = 0.04;
    int shortcut_attempts = 200;
    /// Densification bound for returned waypoints.
    double waypoint_step = 0.02;
    double waypoint_angle_step = kPi / 16.0;
    /// Hard cap on samples so runs stay deterministic on fast hosts.
    int max_samples = 20000;
    std::uint64_t seed = 0;
};

/// Poses at which a segment is collision-checked (endpoints included).
std::vector<Pose2> densify(const Pose2& a, const Pose2& b, double step, double angle_step);

/// Footprint of `object_id` at `pose` is inside the workspace and keeps `kClearanceTolerance`
/// from every other object.
bool pose_is_free(const SceneState& state, int object_id, const Pose2& pose);

/// True iff the first waypoint is the object's current pose and every densified
/// intermediate footprint is collision-free.
bool validate_trajectory(const SceneState& state, const PushTrajectory& traj);

/// Bidirectional RRT with greedy connection, followed by shortcut smoothing and
/// densification. Returns nullopt on timeout or when the goal pose is blocked; throws
/// InvalidAction when the start pose is in collision.
std::optional<PushTrajectory> rrt_connect(const SceneState& state, int object_id, const Pose2& goal,
                                          const RrtConfig& cfg = {});

}  // namespace clutter
