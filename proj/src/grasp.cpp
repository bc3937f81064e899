#include "clutter/grasp.hpp"

#include <algorithm>
#include <limits>

namespace clutter {

std::vector<Vec2> grasp_candidates(const SceneState& state, int target_id, const GripperModel& gripper) {
    const ObjectState& target = state.at(target_id);
    std::vector<Vec2> out{target.centroid()};
    if (gripper.contour_candidates > 0) {
        for (const auto& cp : contour_points(target.shape(), target.pose(), gripper.contour_candidates)) {
            out.push_back(cp.point);
        }
    }
    return out;
}

std::vector<ConvexPolygon> finger_sweeps(const ObjectState& target, Vec2 center, double angle,
                                         const GripperModel& g) {
    const Vec2 u = unit_from_angle(angle);
    const Vec2 v = perp(u);
    const double vc = dot(v, center);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const ConvexPolygon& part : target.footprint()) {
        const auto clipped = clip_to_slab(part.vertices(), v, vc - g.finger_width / 2.0, vc + g.finger_width / 2.0);
        for (const Vec2& p : clipped) {
            lo = std::min(lo, dot(u, p));
            hi = std::max(hi, dot(u, p));
        }
    }
    if (!(hi >= lo) || hi - lo > g.stroke) return {};

    const double mid = (lo + hi) / 2.0;
    const double outer = g.stroke / 2.0 + g.finger_thickness;
    const double c = g.clearance;
    const double v_lo = vc - g.finger_width / 2.0 - c;
    const double v_hi = vc + g.finger_width / 2.0 + c;
    auto rect = [&](double u_lo, double u_hi) {
        return ConvexPolygon::from_points({u * u_lo + v * v_lo, u * u_hi + v * v_lo, u * u_hi + v * v_hi,
                                           u * u_lo + v * v_hi});
    };
    std::vector<ConvexPolygon> out;
    out.push_back(rect(hi - c, mid + outer + c));
    out.push_back(rect(mid - outer - c, lo + c));
    return out;
}

namespace {

/// Smallest separation between the sweeps and any non-target object, or -1 when a
/// sweep penetrates an object or leaves the workspace. +inf when nothing is near.
double sweep_clearance(const SceneState& state, int target_id, const std::vector<ConvexPolygon>& sweeps) {
    if (sweeps.empty()) return -1.0;
    if (!contains(state.workspace, sweeps)) return -1.0;
    double best = std::numeric_limits<double>::infinity();
    for (const ConvexPolygon& s : sweeps) {
        const Rect box = s.bounds();
        for (const ObjectState& o : state.objects) {
            if (o.id() == target_id) continue;
            for (const ConvexPolygon& part : o.footprint()) {
                if (!box.overlaps(part.bounds())) {
                    // Disjoint boxes: the SAT gap is only needed for clearance ranking.
                    best = std::min(best, separation(s, part));
                    continue;
                }
                const double sep = separation(s, part);
                if (sep < 0.0) return -1.0;
                best = std::min(best, sep);
            }
        }
    }
    return best;
}

bool sweep_feasible(const SceneState& state, int target_id, const std::vector<ConvexPolygon>& sweeps) {
    if (sweeps.empty() || !contains(state.workspace, sweeps)) return false;
    for (const ConvexPolygon& s : sweeps) {
        const Rect box = s.bounds();
        for (const ObjectState& o : state.objects) {
            if (o.id() == target_id || !box.overlaps(o.bounds())) continue;
            for (const ConvexPolygon& part : o.footprint()) {
                if (box.overlaps(part.bounds()) && separation(s, part) < 0.0) return false;
            }
        }
    }
    return true;
}

}  // namespace

double grasp_score(const SceneState& state, int target_id, const GripperModel& gripper) {
    const ObjectState& target = state.at(target_id);
    const auto centers = grasp_candidates(state, target_id, gripper);
    int feasible = 0;
    for (const Vec2& c : centers) {
        for (int k = 0; k < gripper.angle_count; ++k) {
            const double angle = 2.0 * kPi * k / gripper.angle_count;
            if (sweep_feasible(state, target_id, finger_sweeps(target, c, angle, gripper))) ++feasible;
        }
    }
    return static_cast<double>(feasible) / static_cast<double>(centers.size() * gripper.angle_count);
}

bool grasp_is_feasible(const SceneState& state, int target_id, const GraspAction& grasp,
                       const GripperModel& gripper) {
    return sweep_feasible(state, target_id, finger_sweeps(state.at(target_id), grasp.center, grasp.angle(), gripper));
}

bool is_graspable(double score, double threshold) { return score > 0.0 && score >= threshold; }

bool is_graspable(const SceneState& state, int target_id, double threshold, const GripperModel& gripper) {
    return is_graspable(grasp_score(state, target_id, gripper), threshold);
}

std::optional<GraspAction> best_grasp(const SceneState& state, int target_id, const GripperModel& gripper) {
    const ObjectState& target = state.at(target_id);
    const auto centers = grasp_candidates(state, target_id, gripper);
    std::optional<GraspAction> best;
    double best_clearance = -1.0;
    // Angle-major order so that the first of equally good configurations wins.
    for (int k = 0; k < gripper.angle_count; ++k) {
        const double angle = 2.0 * kPi * k / gripper.angle_count;
        for (const Vec2& c : centers) {
            const double clr = sweep_clearance(state, target_id, finger_sweeps(target, c, angle, gripper));
            if (clr < 0.0) continue;
            const bool better = !best || (std::isinf(clr) ? !std::isinf(best_clearance) : clr > best_clearance + 1e-9);
            if (better) {
                best = GraspAction{c, k, gripper.angle_count};
                best_clearance = clr;
            }
        }
    }
    return best;
}

}  // namespace clutter
