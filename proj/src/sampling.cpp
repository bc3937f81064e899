#include "clutter/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "clutter/rng.hpp"

namespace clutter {

namespace {

bool disc_is_free(const SceneState& state, Vec2 center, double radius) {
    for (const ObjectState& o : state.objects) {
        if (!o.bounds().inflated(radius).contains(center)) continue;
        for (const ConvexPolygon& part : o.footprint()) {
            if (disc_overlap(center, radius, part)) return false;
        }
    }
    return true;
}

/// Pushes `direction` toward the object from `start`, backing off until the disc is free.
std::optional<PushAction> free_push(const SceneState& state, Vec2 start, Vec2 direction, const SamplerConfig& cfg) {
    for (double back = 0.0; back <= cfg.max_retraction + 1e-12; back += cfg.retraction_step) {
        const Vec2 s = start - direction * back;
        if (disc_is_free(state, s, cfg.pusher_radius)) return PushAction{s, direction, cfg.push_distance};
    }
    return std::nullopt;
}

// Stream tags for the place-pose tiers.
constexpr std::uint64_t kNearGoalStream = 1;
constexpr std::uint64_t kNearCurrentStream = 2;
constexpr std::uint64_t kRandomStream = 3;

bool same_pose(const Pose2& a, const Pose2& b) {
    return distance(a.position(), b.position()) <= 1e-3 && std::abs(normalize_angle(a.theta - b.theta)) <= 1e-2;
}

void append_unique(std::vector<Pose2>& out, const std::vector<Pose2>& in) {
    for (const Pose2& p : in) {
        if (std::none_of(out.begin(), out.end(), [&](const Pose2& q) { return same_pose(p, q); })) out.push_back(p);
    }
}

int near_goal_count(const SamplerConfig& cfg) { return cfg.n_place_near - cfg.n_place_near / 2; }

}  // namespace

std::vector<PushAction> sample_retrieval_pushes(const SceneState& state, const SamplerConfig& cfg) {
    std::vector<PushAction> out;
    const double offset = cfg.pusher_radius + cfg.start_gap;
    for (const ObjectState& obj : state.objects) {
        const Vec2 c = obj.centroid();
        if (cfg.use_pca_pushes) {
            const Vec2 axis = unit_from_angle(obj.pose().theta + obj.shape().principal_axis());
            for (const Vec2 d : {axis, -axis, perp(axis), -perp(axis)}) {
                double reach = 0.0;  // extent of the object behind its centroid
                for (const ConvexPolygon& part : obj.footprint()) {
                    for (const Vec2& v : part.vertices()) reach = std::max(reach, dot(c - v, d));
                }
                if (auto p = free_push(state, c - d * (reach + offset), d, cfg)) out.push_back(*p);
            }
        }
        if (cfg.n_contour > 0) {
            for (const ContourPoint& cp : contour_points(obj.shape(), obj.pose(), cfg.n_contour)) {
                if (cp.inward.norm_sq() == 0.0) continue;
                if (auto p = free_push(state, cp.point - cp.inward * offset, cp.inward, cfg)) out.push_back(*p);
            }
        }
    }
    return out;
}

bool RempGoal::object_at_goal(const ObjectState& obj) const {
    auto it = poses.find(obj.id());
    if (it == poses.end()) return true;
    return distance(obj.pose().position(), it->second.position()) <= position_tolerance &&
           std::abs(normalize_angle(obj.pose().theta - it->second.theta)) <= angle_tolerance;
}

bool RempGoal::reached(const SceneState& state) const {
    return std::all_of(state.objects.begin(), state.objects.end(), [&](const ObjectState& o) { return object_at_goal(o); });
}

std::vector<int> RempGoal::displaced(const SceneState& state) const {
    std::vector<int> out;
    for (const ObjectState& o : state.objects) {
        if (!object_at_goal(o)) out.push_back(o.id());
    }
    return out;
}

bool placement_is_free(const SceneState& state, int object_id, const Pose2& pose) {
    const auto parts = state.at(object_id).footprint_at(pose);
    return contains(state.workspace, parts) && footprint_is_free(state, parts, object_id);
}

std::vector<Pose2> grid_place_poses(const SceneState& state, int object_id, double theta) {
    const ObjectState& obj = state.at(object_id);
    const Rect box = bounds(obj.footprint_at(Pose2(0.0, 0.0, theta)));
    const Rect& ws = state.workspace;
    const int nx = static_cast<int>(std::floor(ws.width() / box.width() + 1e-9));
    const int ny = static_cast<int>(std::floor(ws.height() / box.height() + 1e-9));
    const double margin_x = (ws.width() - nx * box.width()) / 2.0;
    const double margin_y = (ws.height() - ny * box.height()) / 2.0;
    std::vector<Pose2> out;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double cell_x = ws.min_x + margin_x + i * box.width();
            const double cell_y = ws.min_y + margin_y + j * box.height();
            const Pose2 p(cell_x - box.min_x, cell_y - box.min_y, theta);
            if (placement_is_free(state, object_id, p)) out.push_back(p);
        }
    }
    return out;
}

std::vector<Pose2> near_place_poses(const SceneState& state, int object_id, const Pose2& center, int count,
                                    std::uint64_t seed, const SamplerConfig& cfg) {
    Rng rng(seed);
    std::vector<Pose2> out;
    for (int attempt = 0; attempt < 20 * count && static_cast<int>(out.size()) < count; ++attempt) {
        const Pose2 p(rng.truncated_normal(center.x, cfg.near_sigma), rng.truncated_normal(center.y, cfg.near_sigma),
                      rng.truncated_normal(center.theta, cfg.near_sigma_angle));
        if (placement_is_free(state, object_id, p)) out.push_back(p);
    }
    return out;
}

std::vector<Pose2> sample_place_poses(const SceneState& state, int object_id, const Pose2& goal_pose,
                                      const SamplerConfig& cfg) {
    const ObjectState& obj = state.at(object_id);
    std::vector<Pose2> out;
    if (placement_is_free(state, object_id, goal_pose)) out.push_back(goal_pose);
    if (cfg.grid_enabled) append_unique(out, grid_place_poses(state, object_id, goal_pose.theta));
    const auto id = static_cast<std::uint64_t>(object_id);
    append_unique(out, near_place_poses(state, object_id, goal_pose, near_goal_count(cfg),
                                        derive_seed(cfg.rng_seed, {id, kNearGoalStream}), cfg));
    append_unique(out, near_place_poses(state, object_id, obj.pose(), cfg.n_place_near / 2,
                                        derive_seed(cfg.rng_seed, {id, kNearCurrentStream}), cfg));
    Rng rng(derive_seed(cfg.rng_seed, {id, kRandomStream}));
    std::vector<Pose2> random;
    const Rect& ws = state.workspace;
    for (int attempt = 0; attempt < 20 * cfg.n_place_random && static_cast<int>(random.size()) < cfg.n_place_random;
         ++attempt) {
        const Pose2 p(rng.uniform(ws.min_x, ws.max_x), rng.uniform(ws.min_y, ws.max_y), rng.uniform(-kPi, kPi));
        if (placement_is_free(state, object_id, p)) random.push_back(p);
    }
    append_unique(out, random);
    return out;
}

int action_object(const RempAction& a) {
    return std::visit([](const auto& x) { return x.object_id; }, a);
}

const Pose2& action_target_pose(const RempAction& a) {
    if (const auto* pp = std::get_if<PickPlaceAction>(&a)) return pp->place;
    return std::get<PushRequest>(a).final_pose;
}

namespace {

RempAction make_action(const ObjectState& obj, const Pose2& target) {
    if (obj.movability() == Movability::pick_or_push) return PickPlaceAction{obj.id(), obj.pose(), target};
    return PushRequest{obj.id(), target};
}

}  // namespace

std::vector<RempAction> sample_remp_actions(const SceneState& state, const RempGoal& goal, RempTier tier,
                                            const SamplerConfig& cfg) {
    std::vector<RempAction> out;
    for (const ObjectState& obj : state.objects) {
        auto git = goal.poses.find(obj.id());
        const Pose2 goal_pose = git == goal.poses.end() ? obj.pose() : git->second;
        const bool at_goal = goal.object_at_goal(obj);
        if (tier == RempTier::expansion) {
            for (const Pose2& p : sample_place_poses(state, obj.id(), goal_pose, cfg)) {
                if (at_goal && same_pose(p, obj.pose())) continue;
                out.push_back(make_action(obj, p));
            }
            continue;
        }
        std::vector<Pose2> poses;
        if (!at_goal && placement_is_free(state, obj.id(), goal_pose)) poses.push_back(goal_pose);
        auto near = near_place_poses(state, obj.id(), goal_pose, near_goal_count(cfg),
                                     derive_seed(cfg.rng_seed, {static_cast<std::uint64_t>(obj.id()), kNearGoalStream}),
                                     cfg);
        near.resize(std::min<std::size_t>(near.size(), static_cast<std::size_t>(cfg.n_place_near / 2)));
        append_unique(poses, near);
        for (const Pose2& p : poses) out.push_back(make_action(obj, p));
    }
    return out;
}

}  // namespace clutter
