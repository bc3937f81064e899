#include "clutter/physics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "clutter/motion_planner.hpp"

namespace clutter {

namespace {

// Projections overshoot by this much so resolved pairs end up strictly apart.
constexpr double kSlop = 1e-9;

std::optional<DiscContact> disc_contact(Vec2 center, double radius, const ObjectState& obj) {
    std::optional<DiscContact> best;
    for (const ConvexPolygon& part : obj.footprint()) {
        auto c = disc_overlap(center, radius, part);
        if (c && (!best || c->depth > best->depth)) best = c;
    }
    return best;
}

std::optional<Penetration> deepest_overlap(const ObjectState& a, const ObjectState& b) {
    std::optional<Penetration> best;
    for (const ConvexPolygon& pa : a.footprint()) {
        for (const ConvexPolygon& pb : b.footprint()) {
            auto p = overlap(pa, pb);
            if (p && (!best || p->depth > best->depth)) best = p;
        }
    }
    return best;
}

/// One projection sweep over all pairs in ascending id order. Objects flagged as
/// driven (touched by the pusher, directly or through a chain) are not pushed back.
bool project_pairs(std::vector<ObjectState>& objs, std::vector<char>& driven) {
    bool any = false;
    for (std::size_t i = 0; i < objs.size(); ++i) {
        for (std::size_t j = i + 1; j < objs.size(); ++j) {
            if (!objs[i].bounds().overlaps(objs[j].bounds())) continue;
            auto pen = deepest_overlap(objs[i], objs[j]);
            if (!pen) continue;
            any = true;
            const Vec2 mtv = pen->direction * (pen->depth + kSlop);
            if (driven[i] && !driven[j]) {
                objs[j].displace(-mtv, 0.0);
                driven[j] = 1;
            } else if (driven[j] && !driven[i]) {
                objs[i].displace(mtv, 0.0);
                driven[i] = 1;
            } else {
                objs[i].displace(mtv * 0.5, 0.0);
                objs[j].displace(-mtv * 0.5, 0.0);
            }
        }
    }
    return any;
}

}  // namespace

SceneState step_push(const SceneState& state, const PushAction& action, const PushSimConfig& cfg) {
    if (!(action.distance > 0.0) || !std::isfinite(action.distance)) {
        throw InvalidAction("push distance must be positive");
    }
    const double dir_norm = action.direction.norm();
    if (std::abs(dir_norm - 1.0) > 1e-6) throw InvalidAction("push direction must be a unit vector");
    const double r = cfg.pusher_radius;
    for (const auto& o : state.objects) {
        if (disc_contact(action.start, r, o)) {
            throw InvalidAction("push starts in collision with object " + std::to_string(o.id()));
        }
    }

    const Vec2 end = action.end();
    const Rect sweep = Rect{std::min(action.start.x, end.x), std::min(action.start.y, end.y),
                            std::max(action.start.x, end.x), std::max(action.start.y, end.y)}
                           .inflated(r);
    const bool touches_anything = std::any_of(state.objects.begin(), state.objects.end(),
                                              [&](const ObjectState& o) { return sweep.overlaps(o.bounds()); });
    if (!touches_anything) return state;

    SceneState next = state;
    auto& objs = next.objects;
    const int substeps = std::max(1, static_cast<int>(std::ceil(action.distance / cfg.substep - 1e-9)));
    const double ds = action.distance / substeps;
    std::vector<char> driven(objs.size(), 0);
    std::vector<Vec2> before(objs.size());
    bool contact_seen = false;

    for (int k = 1; k <= substeps; ++k) {
        const Vec2 disc = action.start + action.direction * (ds * k);
        std::fill(driven.begin(), driven.end(), 0);
        for (std::size_t i = 0; i < objs.size(); ++i) before[i] = objs[i].centroid();
        bool touched = false;
        for (std::size_t i = 0; i < objs.size(); ++i) {
            ObjectState& o = objs[i];
            if (!o.bounds().inflated(r).contains(disc)) continue;
            auto c = disc_contact(disc, r, o);
            if (!c) continue;
            touched = true;
            const Vec2 move = c->direction * (c->depth + kSlop);
            const Vec2 lever = c->point - o.centroid();
            const double dtheta =
                cfg.rotation_gain * o.friction_scale() * cross(lever, c->direction * c->depth) / o.shape().gyration_sq();
            o.displace(move, dtheta);
            driven[i] = 1;
        }
        if (!touched && !contact_seen) continue;
        contact_seen = true;
        for (int it = 0; it < cfg.projection_iterations; ++it) {
            if (!project_pairs(objs, driven)) break;
        }
        // Quasi-static speed limit: nothing outruns the pusher within a substep.
        for (int round = 0; round < 8; ++round) {
            bool capped = false;
            for (std::size_t i = 0; i < objs.size(); ++i) {
                const Vec2 d = objs[i].centroid() - before[i];
                const double len = d.norm();
                if (len <= ds) continue;
                objs[i].displace(d * (ds / len - 1.0), 0.0);
                capped = true;
            }
            if (!capped) break;
            for (int it = 0; it < cfg.projection_iterations; ++it) {
                if (!project_pairs(objs, driven)) break;
            }
        }
    }

    std::fill(driven.begin(), driven.end(), 0);
    for (int it = 0; it < cfg.settle_iterations; ++it) {
        if (!project_pairs(objs, driven)) break;
    }
    next.refresh_out_of_bounds();
    return next;
}

SimBatch step_batch(const SimBatch& batch, std::span<const std::optional<PushAction>> actions,
                    const PushSimConfig& cfg, WorkerPool* pool) {
    if (actions.size() != batch.size()) {
        throw std::invalid_argument("step_batch: " + std::to_string(actions.size()) + " actions for " +
                                    std::to_string(batch.size()) + " states");
    }
    SimBatch out;
    out.states = batch.states;
    auto body = [&](std::size_t i) {
        if (actions[i]) out.states[i] = step_push(batch.states[i], *actions[i], cfg);
    };
    if (pool) {
        pool->parallel_for(batch.size(), body);
    } else {
        for (std::size_t i = 0; i < batch.size(); ++i) body(i);
    }
    return out;
}

SceneState apply_pick_place(const SceneState& state, int object_id, const Pose2& place_pose) {
    const ObjectState* obj = state.find(object_id);
    if (!obj) throw InvalidAction("pick-n-place of unknown object " + std::to_string(object_id));
    if (obj->movability() != Movability::pick_or_push) {
        throw InvalidAction("object " + std::to_string(object_id) + " can only be pushed");
    }
    const auto parts = obj->footprint_at(place_pose);
    if (!contains(state.workspace, parts)) throw InvalidAction("placement leaves the workspace");
    if (!footprint_is_free(state, parts, object_id)) throw InvalidAction("placement collides with another object");
    SceneState next = state;
    next.at(object_id).set_pose(place_pose);
    next.refresh_out_of_bounds();
    return next;
}

SceneState apply_push_trajectory(const SceneState& state, int object_id, std::span<const Pose2> waypoints) {
    if (!state.find(object_id)) throw InvalidAction("push of unknown object " + std::to_string(object_id));
    if (waypoints.empty()) throw InvalidAction("push trajectory has no waypoints");
    PushTrajectory traj;
    traj.object_id = object_id;
    traj.waypoints.assign(waypoints.begin(), waypoints.end());
    if (!validate_trajectory(state, traj)) throw InvalidAction("push trajectory is not collision-free");
    SceneState next = state;
    next.at(object_id).set_pose(waypoints.back());
    next.refresh_out_of_bounds();
    return next;
}

}  // namespace clutter
