#include "clutter/motion_planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "clutter/physics.hpp"
#include "clutter/rng.hpp"

namespace clutter {

double PushTrajectory::path_length() const {
    double len = 0.0;
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
        len += distance(waypoints[i - 1].position(), waypoints[i].position());
    }
    return len;
}

namespace {

Pose2 interpolate(const Pose2& a, const Pose2& b, double t) {
    const double dtheta = normalize_angle(b.theta - a.theta);
    return Pose2(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t, a.theta + dtheta * t);
}

double metric(const Pose2& a, const Pose2& b, double w) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dt = w * normalize_angle(a.theta - b.theta);
    return std::sqrt(dx * dx + dy * dy + dt * dt);
}

struct Tree {
    std::vector<Pose2> poses;
    std::vector<int> parent;

    std::size_t nearest(const Pose2& q, double w) const {
        std::size_t best = 0;
        double best_d = metric(poses[0], q, w);
        for (std::size_t i = 1; i < poses.size(); ++i) {
            const double d = metric(poses[i], q, w);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        return best;
    }

    std::vector<Pose2> path_to_root(std::size_t i) const {
        std::vector<Pose2> out;
        for (int k = static_cast<int>(i); k >= 0; k = parent[static_cast<std::size_t>(k)]) {
            out.push_back(poses[static_cast<std::size_t>(k)]);
        }
        return out;
    }
};

enum class Extend { reached, advanced, trapped };

class Planner {
public:
    Planner(const SceneState& state, int id, const RrtConfig& cfg) : state_(state), id_(id), cfg_(cfg) {}

    // Checks the edge exactly as validate_trajectory will see it once densified into
    // waypoints, in both directions, so any accepted path validates by construction.
    bool segment_free(const Pose2& a, const Pose2& b) const { return directed_free(a, b) && directed_free(b, a); }

    Extend extend(Tree& tree, const Pose2& target, std::size_t& added) const {
        const std::size_t near = tree.nearest(target, cfg_.rotation_weight);
        const Pose2& from = tree.poses[near];
        const double d = metric(from, target, cfg_.rotation_weight);
        Pose2 to = target;
        Extend result = Extend::reached;
        if (d > cfg_.extend_step) {
            to = interpolate(from, target, cfg_.extend_step / d);
            result = Extend::advanced;
        }
        if (!segment_free(from, to)) return Extend::trapped;
        tree.poses.push_back(to);
        tree.parent.push_back(static_cast<int>(near));
        added = tree.poses.size() - 1;
        return result;
    }

    Extend connect(Tree& tree, const Pose2& target, std::size_t& added) const {
        Extend e;
        do {
            e = extend(tree, target, added);
        } while (e == Extend::advanced);
        return e;
    }

private:
    bool directed_free(const Pose2& a, const Pose2& b) const {
        const auto wps = densify(a, b, cfg_.waypoint_step, cfg_.waypoint_angle_step);
        for (std::size_t i = 1; i < wps.size(); ++i) {
            for (const Pose2& p : densify(wps[i - 1], wps[i], kCheckStep, kCheckAngleStep)) {
                if (!pose_is_free(state_, id_, p)) return false;
            }
        }
        return true;
    }

    const SceneState& state_;
    int id_;
    const RrtConfig& cfg_;
};

}  // namespace

std::vector<Pose2> densify(const Pose2& a, const Pose2& b, double step, double angle_step) {
    const double dpos = distance(a.position(), b.position());
    const double dang = std::abs(normalize_angle(b.theta - a.theta));
    const int n = std::max({1, static_cast<int>(std::ceil(dpos / step)), static_cast<int>(std::ceil(dang / angle_step))});
    std::vector<Pose2> out;
    out.reserve(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) out.push_back(i == n ? b : interpolate(a, b, static_cast<double>(i) / n));
    return out;
}

bool pose_is_free(const SceneState& state, int object_id, const Pose2& pose) {
    const ObjectState& obj = state.at(object_id);
    const auto parts = obj.footprint_at(pose);
    return contains(state.workspace, parts) && footprint_is_free(state, parts, object_id);
}

bool validate_trajectory(const SceneState& state, const PushTrajectory& traj) {
    const ObjectState* obj = state.find(traj.object_id);
    if (!obj || traj.waypoints.empty()) return false;
    const Pose2& first = traj.waypoints.front();
    if (distance(first.position(), obj->pose().position()) > 1e-6 ||
        std::abs(normalize_angle(first.theta - obj->pose().theta)) > 1e-6) {
        return false;
    }
    if (!pose_is_free(state, traj.object_id, first)) return false;
    for (std::size_t i = 1; i < traj.waypoints.size(); ++i) {
        for (const Pose2& p : densify(traj.waypoints[i - 1], traj.waypoints[i], kCheckStep, kCheckAngleStep)) {
            if (!pose_is_free(state, traj.object_id, p)) return false;
        }
    }
    return true;
}

std::optional<PushTrajectory> rrt_connect(const SceneState& state, int object_id, const Pose2& goal,
                                          const RrtConfig& cfg) {
    using Clock = std::chrono::steady_clock;
    const auto deadline = Clock::now() + std::chrono::duration<double>(cfg.time_limit_s);
    const ObjectState& obj = state.at(object_id);
    const Pose2 start = obj.pose();
    if (!pose_is_free(state, object_id, start)) {
        throw InvalidAction("trajectory start of object " + std::to_string(object_id) + " is in collision");
    }
    PushTrajectory traj;
    traj.object_id = object_id;
    if (metric(start, goal, cfg.rotation_weight) <= 1e-12) {
        traj.waypoints = {start};
        return traj;
    }
    if (!pose_is_free(state, object_id, goal)) return std::nullopt;

    Planner planner(state, object_id, cfg);
    std::vector<Pose2> path;
    if (planner.segment_free(start, goal)) {
        path = {start, goal};
    } else {
        Rng rng(cfg.seed);
        Tree a{{start}, {-1}};
        Tree b{{goal}, {-1}};
        bool a_is_start = true;
        // Sample the object's reference point so that its footprint can still fit.
        const Rect& ws = state.workspace;
        for (int s = 0; s < cfg.max_samples && path.empty(); ++s) {
            if ((s & 15) == 0 && Clock::now() > deadline) return std::nullopt;
            const Pose2 q(rng.uniform(ws.min_x, ws.max_x), rng.uniform(ws.min_y, ws.max_y),
                          rng.uniform(-kPi, kPi));
            std::size_t na = 0;
            if (planner.extend(a, q, na) != Extend::trapped) {
                std::size_t nb = 0;
                if (planner.connect(b, a.poses[na], nb) == Extend::reached) {
                    auto pa = a.path_to_root(na);
                    auto pb = b.path_to_root(nb);
                    std::reverse(pa.begin(), pa.end());
                    pa.insert(pa.end(), pb.begin() + 1, pb.end());
                    if (!a_is_start) std::reverse(pa.begin(), pa.end());
                    path = std::move(pa);
                }
            }
            std::swap(a, b);
            a_is_start = !a_is_start;
        }
        if (path.empty()) return std::nullopt;

        for (int k = 0; k < cfg.shortcut_attempts && path.size() > 2; ++k) {
            std::size_t i = rng.index(path.size());
            std::size_t j = rng.index(path.size());
            if (i > j) std::swap(i, j);
            if (j < i + 2) continue;
            if (planner.segment_free(path[i], path[j])) {
                path.erase(path.begin() + static_cast<std::ptrdiff_t>(i) + 1, path.begin() + static_cast<std::ptrdiff_t>(j));
            }
        }
    }

    traj.waypoints.push_back(path.front());
    for (std::size_t i = 1; i < path.size(); ++i) {
        const auto seg = densify(path[i - 1], path[i], cfg.waypoint_step, cfg.waypoint_angle_step);
        traj.waypoints.insert(traj.waypoints.end(), seg.begin() + 1, seg.end());
    }
    // Densified waypoints sample the swept footprint at different points than the
    // planner's own edge checks; never hand out a path the checker would reject.
    if (!validate_trajectory(state, traj)) return std::nullopt;
    return traj;
}

}  // namespace clutter
