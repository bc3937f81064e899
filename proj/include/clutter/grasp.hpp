#pragma once

#include <optional>
#include <vector>

#include "clutter/scene.hpp"

namespace clutter {

/// Two-finger top-down gripper. Default dimensions come from an 11 x 57 pixel grasp
/// kernel at 2 mm per pixel: each finger is 22 mm wide across the closing axis and
/// 11 mm thick along it, and the fingers span 114 mm when fully open.
struct GripperModel {
    double finger_width = 0.022;      // across the closing axis
    double finger_thickness = 0.011;  // along the closing axis
    double stroke = 0.092;            // max inner opening
    double clearance = 0.002;
    int angle_count = 16;
    int contour_candidates = 4;
};

struct GraspAction {
    Vec2 center;
    int angle_index = 0;
    int angle_count = 16;

    /// Closing-axis angle, in multiples of 2*pi/angle_count.
    double angle() const { return 2.0 * kPi * angle_index / angle_count; }
    bool operator==(const GraspAction&) const = default;
};

/// Grasp centers tried on the target: centroid first, then contour samples.
std::vector<Vec2> grasp_candidates(const SceneState& state, int target_id, const GripperModel& gripper = {});

/// Regions the two fingers sweep while closing on the target at (center, angle), each
/// already inflated by the gripper clearance. Empty when the target does not fit
/// between the fingers or the finger strip misses it.
std::vector<ConvexPolygon> finger_sweeps(const ObjectState& target, Vec2 center, double angle,
                                         const GripperModel& gripper = {});

/// Fraction of candidate configurations (centers x angles) that are feasible.
/// Throws ValidationError when the target is missing.
double grasp_score(const SceneState& state, int target_id, const GripperModel& gripper = {});

/// True iff the fingers can close on the target at this configuration without touching
/// another object or leaving the workspace.
bool grasp_is_feasible(const SceneState& state, int target_id, const GraspAction& grasp,
                       const GripperModel& gripper = {});

/// True iff score >= threshold and score > 0.
bool is_graspable(double score, double threshold);
bool is_graspable(const SceneState& state, int target_id, double threshold, const GripperModel& gripper = {});

/// Feasible configuration with the largest clearance to the other objects; ties go to
/// the lowest angle index, then candidate order.
std::optional<GraspAction> best_grasp(const SceneState& state, int target_id, const GripperModel& gripper = {});

}  // namespace clutter
