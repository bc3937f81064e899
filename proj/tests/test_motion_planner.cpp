#include "doctest.h"

#include <cmath>

#include "maze.hpp"

using namespace clutter;
using namespace testing_support;

namespace {

// Dense independent check: footprints along every segment stay inside the workspace and
// clear of every other object by the clearance tolerance.
bool dense_oracle(const SceneState& s, const PushTrajectory& t, double step = 5e-4) {
    const ObjectState& o = s.at(t.object_id);
    for (std::size_t i = 0; i + 1 < t.waypoints.size(); ++i) {
        const Pose2& a = t.waypoints[i];
        const Pose2& b = t.waypoints[i + 1];
        const double dth = normalize_angle(b.theta - a.theta);
        const int n = std::max(1, static_cast<int>(std::ceil(std::max(distance(a.position(), b.position()) / step,
                                                                      std::abs(dth) / 0.005))));
        for (int k = 0; k <= n; ++k) {
            const double u = static_cast<double>(k) / n;
            const Pose2 p(a.x + (b.x - a.x) * u, a.y + (b.y - a.y) * u, a.theta + dth * u);
            for (const auto& part : o.footprint_at(p)) {
                for (const Vec2& v : part.vertices()) {
                    if (!s.workspace.contains(v)) return false;
                }
                for (const ObjectState& other : s.objects) {
                    if (other.id() == t.object_id) continue;
                    for (const auto& q : other.footprint()) {
                        if (separation(part, q) < kClearanceTolerance) return false;
                    }
                }
            }
        }
    }
    return true;
}

bool step_bounds_hold(const PushTrajectory& t, const RrtConfig& cfg) {
    for (std::size_t i = 1; i < t.waypoints.size(); ++i) {
        const Pose2& a = t.waypoints[i - 1];
        const Pose2& b = t.waypoints[i];
        if (distance(a.position(), b.position()) > cfg.waypoint_step + 1e-12) return false;
        if (std::abs(normalize_angle(b.theta - a.theta)) > cfg.waypoint_angle_step + 1e-12) return false;
    }
    return true;
}

SceneState corridor() {
    SceneState s = empty_scene(0.5, 0.4);
    add_box(s, 0, 0.04, 0.04, Pose2(0.05, 0.2, 0.0));
    add_box(s, 1, 0.5, 0.05, Pose2(0.25, 0.275, 0.0));
    add_box(s, 2, 0.5, 0.05, Pose2(0.25, 0.125, 0.0));
    return s;
}

}  // namespace

TEST_CASE("rrt_connect: a free corridor gives a near-straight path") {
    const SceneState s = corridor();
    const Pose2 goal(0.45, 0.2, 0.0);
    RrtConfig cfg;
    cfg.time_limit_s = 2.0;
    const auto t = rrt_connect(s, 0, goal, cfg);
    REQUIRE(t.has_value());
    const double straight = distance(s.at(0).pose().position(), goal.position());
    CHECK(t->path_length() >= straight - 1e-12);
    CHECK(t->path_length() <= 1.05 * straight);
    CHECK(t->waypoints.front() == s.at(0).pose());
    CHECK(t->waypoints.back() == goal);
    CHECK(step_bounds_hold(*t, cfg));
    CHECK(validate_trajectory(s, *t));
    CHECK(dense_oracle(s, *t));
}

TEST_CASE("rrt_connect: enclosed goal, start equals goal, blocked start") {
    SceneState s = empty_scene(0.5, 0.4);
    add_box(s, 0, 0.04, 0.04, Pose2(0.05, 0.05, 0.0));
    // A closed pen around (0.3, 0.2) with room for the block inside.
    add_box(s, 1, 0.14, 0.02, Pose2(0.3, 0.27, 0.0));
    add_box(s, 2, 0.14, 0.02, Pose2(0.3, 0.13, 0.0));
    add_box(s, 3, 0.02, 0.12, Pose2(0.24, 0.2, 0.0));
    add_box(s, 4, 0.02, 0.12, Pose2(0.36, 0.2, 0.0));
    const Pose2 inside(0.3, 0.2, 0.0);
    REQUIRE(pose_is_free(s, 0, inside));
    RrtConfig cfg;
    cfg.time_limit_s = 0.5;
    CHECK_FALSE(rrt_connect(s, 0, inside, cfg).has_value());

    const auto same = rrt_connect(s, 0, s.at(0).pose(), cfg);
    REQUIRE(same.has_value());
    CHECK(same->waypoints.size() == 1);
    CHECK(same->path_length() == 0.0);

    SceneState bad = s;
    add_box(bad, 5, 0.04, 0.04, Pose2(0.06, 0.06, 0.0));
    CHECK_THROWS_AS(rrt_connect(bad, 0, inside, cfg), InvalidAction);
    CHECK_FALSE(rrt_connect(s, 0, Pose2(0.3, 0.27, 0.0), cfg).has_value());
}

TEST_CASE("validate_trajectory: obstacles, tolerance boundary, wrong start") {
    SceneState s = empty_scene(0.5, 0.4);
    add_box(s, 0, 0.04, 0.04, Pose2(0.05, 0.2, 0.0));
    add_box(s, 1, 0.04, 0.2, Pose2(0.25, 0.2, 0.0));
    PushTrajectory through{0, {s.at(0).pose(), Pose2(0.45, 0.2, 0.0)}};
    CHECK_FALSE(validate_trajectory(s, through));

    // Right face of the block approaches the obstacle's left face at x = 0.23.
    const double touch_x = 0.23 - 0.02;
    PushTrajectory near{0, {s.at(0).pose(), Pose2(touch_x - 1e-5, 0.2, 0.0)}};
    CHECK(validate_trajectory(s, near));
    PushTrajectory incursion{0, {s.at(0).pose(), Pose2(touch_x + 1e-7, 0.2, 0.0)}};
    CHECK_FALSE(validate_trajectory(s, incursion));
    PushTrajectory grazing{0, {s.at(0).pose(), Pose2(touch_x - 5e-7, 0.2, 0.0)}};
    CHECK_FALSE(validate_trajectory(s, grazing));

    PushTrajectory off{0, {Pose2(0.06, 0.2, 0.0), Pose2(0.1, 0.2, 0.0)}};
    CHECK_FALSE(validate_trajectory(s, off));
    PushTrajectory outside{0, {s.at(0).pose(), Pose2(0.01, 0.2, 0.0)}};
    CHECK_FALSE(validate_trajectory(s, outside));
}

TEST_CASE("rrt_connect: sound, bounded and deterministic on random mazes") {
    int solved = 0;
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const Maze m = random_maze(seed);
        REQUIRE(pose_is_free(m.state, 0, m.goal));
        RrtConfig cfg;
        cfg.time_limit_s = 1e6;
        cfg.max_samples = 20000;
        cfg.seed = seed;
        const auto t = rrt_connect(m.state, 0, m.goal, cfg);
        if (!t) continue;
        ++solved;
        CHECK(validate_trajectory(m.state, *t));
        CHECK(dense_oracle(m.state, *t));
        CHECK(step_bounds_hold(*t, cfg));
        CHECK(t->waypoints.back() == m.goal);
        const auto again = rrt_connect(m.state, 0, m.goal, cfg);
        REQUIRE(again.has_value());
        CHECK(again->waypoints == t->waypoints);
    }
    CHECK(solved >= 7);
}

TEST_CASE("densify respects both step bounds and keeps the endpoints") {
    const Pose2 a(0.0, 0.0, 0.0), b(0.1, 0.05, 1.0);
    const auto pts = densify(a, b, 0.02, kPi / 16.0);
    REQUIRE(pts.size() >= 2);
    CHECK(pts.front() == a);
    CHECK(pts.back() == b);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        CHECK(distance(pts[i - 1].position(), pts[i].position()) <= 0.02 + 1e-12);
        CHECK(std::abs(normalize_angle(pts[i].theta - pts[i - 1].theta)) <= kPi / 16.0 + 1e-12);
    }
}
