#pragma once

#include <cmath>
#include <vector>

#include "clutter/grasp.hpp"

namespace testing_support {

using namespace clutter;

// Keeps the part of a convex polygon with dot(n, p) >= c.
inline std::vector<Vec2> naive_half_plane(const std::vector<Vec2>& poly, Vec2 n, double c) {
    std::vector<Vec2> out;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2 a = poly[i], b = poly[(i + 1) % poly.size()];
        const double da = dot(n, a) - c, db = dot(n, b) - c;
        if (da >= 0) out.push_back(a);
        if ((da >= 0) != (db >= 0)) out.push_back(a + (b - a) * (da / (da - db)));
    }
    return out;
}

// Naive exhaustive grasp score: every center x angle, every finger against every part
// of every other object, no bounding-box pruning.
inline int naive_feasible_count(const SceneState& s, int target_id, const GripperModel& g, int* total = nullptr) {
    const ObjectState& t = s.at(target_id);
    std::vector<Vec2> centers{t.centroid()};
    for (const auto& cp : contour_points(t.shape(), t.pose(), g.contour_candidates)) centers.push_back(cp.point);
    int feasible = 0;
    for (const Vec2& c : centers) {
        for (int k = 0; k < g.angle_count; ++k) {
            const double a = 2.0 * kPi * k / g.angle_count;
            const Vec2 u{std::cos(a), std::sin(a)};
            const Vec2 v{-u.y, u.x};
            const double vc = dot(v, c);
            double lo = INFINITY, hi = -INFINITY;
            for (const ConvexPolygon& part : t.footprint()) {
                std::vector<Vec2> poly(part.vertices().begin(), part.vertices().end());
                poly = naive_half_plane(poly, v, vc - g.finger_width / 2);
                poly = naive_half_plane(poly, v * -1.0, -(vc + g.finger_width / 2));
                for (const Vec2& p : poly) lo = std::min(lo, dot(u, p)), hi = std::max(hi, dot(u, p));
            }
            if (!(hi >= lo) || hi - lo > g.stroke) continue;
            const double mid = (lo + hi) / 2, outer = g.stroke / 2 + g.finger_thickness, cl = g.clearance;
            const double v0 = vc - g.finger_width / 2 - cl, v1 = vc + g.finger_width / 2 + cl;
            auto rect = [&](double u0, double u1) {
                return ConvexPolygon::from_points({u * u0 + v * v0, u * u1 + v * v0, u * u1 + v * v1, u * u0 + v * v1});
            };
            const ConvexPolygon fingers[2] = {rect(hi - cl, mid + outer + cl), rect(mid - outer - cl, lo + cl)};
            bool ok = true;
            for (const ConvexPolygon& f : fingers) {
                for (const Vec2& p : f.vertices()) {
                    ok = ok && p.x >= s.workspace.min_x && p.x <= s.workspace.max_x && p.y >= s.workspace.min_y &&
                         p.y <= s.workspace.max_y;
                }
                for (const ObjectState& o : s.objects) {
                    if (o.id() == target_id) continue;
                    for (const ConvexPolygon& part : o.footprint()) ok = ok && separation(f, part) >= 0.0;
                }
            }
            if (ok) ++feasible;
        }
    }
    if (total) *total = static_cast<int>(centers.size()) * g.angle_count;
    return feasible;
}

inline double naive_grasp_score(const SceneState& s, int target_id, const GripperModel& g = {}) {
    int total = 0;
    const int feasible = naive_feasible_count(s, target_id, g, &total);
    return static_cast<double>(feasible) / static_cast<double>(total);
}

}  // namespace testing_support
