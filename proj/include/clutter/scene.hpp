#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "clutter/geometry.hpp"

namespace clutter {

enum class Movability { pick_or_push, push_only };

std::string to_string(Movability m);
Movability movability_from_string(const std::string& s);

class ValidationError : public Error {
public:
    using Error::Error;
};

/// One rigid object on the table. The world-frame footprint is cached and kept in
/// sync with the pose.
class ObjectState {
public:
    ObjectState(int id, std::shared_ptr<const Shape> shape, Pose2 pose,
                Movability movability = Movability::pick_or_push, double friction_scale = 1.0);

    int id() const { return id_; }
    const Shape& shape() const { return *shape_; }
    const std::shared_ptr<const Shape>& shape_ptr() const { return shape_; }
    const Pose2& pose() const { return pose_; }
    Movability movability() const { return movability_; }
    double friction_scale() const { return friction_scale_; }

    void set_pose(const Pose2& pose);
    /// Translates and rotates about the world-frame centroid.
    void displace(Vec2 translation, double rotation);

    const std::vector<ConvexPolygon>& footprint() const { return footprint_; }
    const Rect& bounds() const { return bounds_; }
    Vec2 centroid() const { return pose_.apply(shape_->centroid()); }

    /// Footprint of this object's shape at another pose.
    std::vector<ConvexPolygon> footprint_at(const Pose2& pose) const { return transform(*shape_, pose); }

private:
    void refresh();

    int id_;
    std::shared_ptr<const Shape> shape_;
    Pose2 pose_;
    Movability movability_;
    double friction_scale_;
    std::vector<ConvexPolygon> footprint_;
    Rect bounds_;
};

/// Pose-only snapshot of the workspace. Objects are kept sorted by id.
struct SceneState {
    Rect workspace;
    std::vector<ObjectState> objects;
    std::optional<int> target_id;
    std::uint64_t rng_seed = 0;
    /// Set by the simulator when some object's centroid left the workspace.
    bool out_of_bounds = false;

    const ObjectState* find(int id) const;
    ObjectState* find(int id);
    const ObjectState& at(int id) const;
    ObjectState& at(int id);
    std::size_t index_of(int id) const;

    /// Restores id order; throws ValidationError on duplicate ids.
    void sort_objects();
    /// Recomputes `out_of_bounds` from the object centroids.
    void refresh_out_of_bounds();
};

/// Gap below which two footprints count as colliding when validating placements and
/// trajectories.
inline constexpr double kClearanceTolerance = 1e-6;

/// Largest penetration depth between any pair of objects (0 when none overlap).
double max_penetration(const SceneState& state);

/// True iff `parts` keeps at least `clearance` from every object except `ignore_id`.
bool footprint_is_free(const SceneState& state, std::span<const ConvexPolygon> parts,
                       std::optional<int> ignore_id, double clearance = kClearanceTolerance);

/// Validation of start/goal scenes: unique ids, objects inside the workspace, no
/// pairwise overlap beyond `tolerance`, existing target.
void validate_scene(const SceneState& state, double tolerance = 1e-4);

}  // namespace clutter
