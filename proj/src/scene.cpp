#include "clutter/scene.hpp"

#include <algorithm>

namespace clutter {

std::string to_string(Movability m) { return m == Movability::pick_or_push ? "pick_or_push" : "push_only"; }

Movability movability_from_string(const std::string& s) {
    if (s == "pick_or_push") return Movability::pick_or_push;
    if (s == "push_only") return Movability::push_only;
    throw ValidationError("unknown movability '" + s + "'");
}

ObjectState::ObjectState(int id, std::shared_ptr<const Shape> shape, Pose2 pose, Movability movability,
                         double friction_scale)
    : id_(id), shape_(std::move(shape)), pose_(pose), movability_(movability), friction_scale_(friction_scale) {
    if (!shape_) throw ValidationError("object " + std::to_string(id) + " has no shape");
    if (!(friction_scale > 0.0)) throw ValidationError("object " + std::to_string(id) + ": friction_scale must be > 0");
    refresh();
}

void ObjectState::set_pose(const Pose2& pose) {
    pose_ = pose;
    refresh();
}

void ObjectState::displace(Vec2 translation, double rotation) {
    const Vec2 c = centroid();
    // New pose keeps the centroid at c + translation after rotating about it.
    const double theta = pose_.theta + rotation;
    const Vec2 body_c = shape_->centroid();
    const Vec2 origin = c + translation - rotate(body_c, theta);
    set_pose(Pose2(origin.x, origin.y, theta));
}

void ObjectState::refresh() {
    footprint_ = transform(*shape_, pose_);
    bounds_ = clutter::bounds(footprint_);
}

const ObjectState* SceneState::find(int id) const {
    for (const auto& o : objects) {
        if (o.id() == id) return &o;
    }
    return nullptr;
}

ObjectState* SceneState::find(int id) {
    for (auto& o : objects) {
        if (o.id() == id) return &o;
    }
    return nullptr;
}

const ObjectState& SceneState::at(int id) const {
    const ObjectState* o = find(id);
    if (!o) throw ValidationError("unknown object id " + std::to_string(id));
    return *o;
}

ObjectState& SceneState::at(int id) {
    ObjectState* o = find(id);
    if (!o) throw ValidationError("unknown object id " + std::to_string(id));
    return *o;
}

std::size_t SceneState::index_of(int id) const {
    for (std::size_t i = 0; i < objects.size(); ++i) {
        if (objects[i].id() == id) return i;
    }
    throw ValidationError("unknown object id " + std::to_string(id));
}

void SceneState::sort_objects() {
    std::stable_sort(objects.begin(), objects.end(), [](const auto& a, const auto& b) { return a.id() < b.id(); });
    for (std::size_t i = 1; i < objects.size(); ++i) {
        if (objects[i].id() == objects[i - 1].id()) {
            throw ValidationError("duplicate object id " + std::to_string(objects[i].id()));
        }
    }
}

void SceneState::refresh_out_of_bounds() {
    out_of_bounds = std::any_of(objects.begin(), objects.end(),
                                [&](const ObjectState& o) { return !workspace.contains(o.centroid()); });
}

double max_penetration(const SceneState& state) {
    double worst = 0.0;
    for (std::size_t i = 0; i < state.objects.size(); ++i) {
        for (std::size_t j = i + 1; j < state.objects.size(); ++j) {
            const auto& a = state.objects[i];
            const auto& b = state.objects[j];
            if (!a.bounds().overlaps(b.bounds())) continue;
            const double sep = separation(a.footprint(), b.footprint());
            worst = std::max(worst, -sep);
        }
    }
    return worst;
}

bool footprint_is_free(const SceneState& state, std::span<const ConvexPolygon> parts, std::optional<int> ignore_id,
                       double clearance) {
    const Rect box = bounds(parts).inflated(clearance);
    for (const auto& o : state.objects) {
        if (ignore_id && o.id() == *ignore_id) continue;
        if (!box.overlaps(o.bounds())) continue;
        if (separation(parts, o.footprint()) < clearance) return false;
    }
    return true;
}

void validate_scene(const SceneState& state, double tolerance) {
    if (!(state.workspace.width() > 0.0 && state.workspace.height() > 0.0)) {
        throw ValidationError("workspace must have positive size");
    }
    for (std::size_t i = 1; i < state.objects.size(); ++i) {
        if (state.objects[i].id() <= state.objects[i - 1].id()) {
            throw ValidationError("objects must have unique ids in ascending order");
        }
    }
    for (const auto& o : state.objects) {
        if (!contains(state.workspace, o.footprint())) {
            throw ValidationError("object " + std::to_string(o.id()) + " lies outside the workspace");
        }
    }
    for (std::size_t i = 0; i < state.objects.size(); ++i) {
        for (std::size_t j = i + 1; j < state.objects.size(); ++j) {
            const auto& a = state.objects[i];
            const auto& b = state.objects[j];
            if (!a.bounds().overlaps(b.bounds())) continue;
            if (-separation(a.footprint(), b.footprint()) > tolerance) {
                throw ValidationError("objects " + std::to_string(a.id()) + " and " + std::to_string(b.id()) +
                                      " overlap");
            }
        }
    }
    if (state.target_id && !state.find(*state.target_id)) {
        throw ValidationError("target_id " + std::to_string(*state.target_id) + " does not name an object");
    }
}

}  // namespace clutter
