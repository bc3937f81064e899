#pragma once

#include <cstdint>
#include <map>
#include <variant>
#include <vector>

#include "clutter/physics.hpp"

namespace clutter {

struct SamplerConfig {
    // Retrieval pushes.
    int n_contour = 8;
    bool use_pca_pushes = true;
    double push_distance = 0.05;
    double pusher_radius = 0.01;
    /// Initial gap between the pusher disc and the object it pushes.
    double start_gap = 0.001;
    double retraction_step = 0.002;
    double max_retraction = 0.05;

    // Rearrangement place poses.
    int n_place_random = 8;
    int n_place_near = 8;
    bool grid_enabled = true;
    double near_sigma = 0.08;
    double near_sigma_angle = kPi / 8.0;
    std::uint64_t rng_seed = 0;
};

/// Candidate pushes for every object, ordered by object id, then axis-aligned pushes
/// before contour pushes, then contour index. Blocked starts are retracted along the
/// push direction; pushes whose start cannot be freed are dropped.
std::vector<PushAction> sample_retrieval_pushes(const SceneState& state, const SamplerConfig& cfg = {});

/// Goal arrangement for rearrangement.
struct RempGoal {
    std::map<int, Pose2> poses;
    double position_tolerance = 0.01;
    double angle_tolerance = 0.1;

    bool object_at_goal(const ObjectState& obj) const;
    bool reached(const SceneState& state) const;
    /// Objects with a goal pose that are not at it, ascending id.
    std::vector<int> displaced(const SceneState& state) const;
};

/// Poses whose footprint fits inside the workspace and clears every object but `object_id`.
bool placement_is_free(const SceneState& state, int object_id, const Pose2& pose);

/// Grid tier: tiles the workspace with the object's bounding box at orientation `theta`.
std::vector<Pose2> grid_place_poses(const SceneState& state, int object_id, double theta);

/// Near tier around `center`: truncated normal, collision-free only.
std::vector<Pose2> near_place_poses(const SceneState& state, int object_id, const Pose2& center, int count,
                                    std::uint64_t seed, const SamplerConfig& cfg);

/// Direct-to-goal first (when free), then grid, near (current and goal), random.
/// Near-duplicates are dropped keeping the first occurrence.
std::vector<Pose2> sample_place_poses(const SceneState& state, int object_id, const Pose2& goal_pose,
                                      const SamplerConfig& cfg = {});

struct PickPlaceAction {
    int object_id = -1;
    Pose2 pick;
    Pose2 place;
    bool operator==(const PickPlaceAction&) const = default;
};

/// Final pose for a push-only object; the trajectory is planned when the action is used.
struct PushRequest {
    int object_id = -1;
    Pose2 final_pose;
    bool operator==(const PushRequest&) const = default;
};

using RempAction = std::variant<PickPlaceAction, PushRequest>;

int action_object(const RempAction& a);
const Pose2& action_target_pose(const RempAction& a);

enum class RempTier { expansion, simulation };

/// Expansion tier: every object x sample_place_poses. Simulation tier: direct-to-goal
/// for displaced objects plus the first n_place_near/2 near-goal poses per object.
std::vector<RempAction> sample_remp_actions(const SceneState& state, const RempGoal& goal, RempTier tier,
                                            const SamplerConfig& cfg = {});

}  // namespace clutter
