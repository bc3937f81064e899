#include "doctest.h"

#include <algorithm>

#include "test_support.hpp"

using namespace clutter;
using namespace testing_support;

namespace {

bool start_is_free(const SceneState& s, const PushAction& a, double radius) {
    for (const ObjectState& o : s.objects) {
        for (const ConvexPolygon& part : o.footprint()) {
            if (disc_overlap(a.start, radius, part)) return false;
        }
    }
    return true;
}

bool footprint_clear(const SceneState& s, int id, const Pose2& p) {
    const auto fp = s.at(id).footprint_at(p);
    if (!contains(s.workspace, fp)) return false;
    for (const ObjectState& o : s.objects) {
        if (o.id() == id) continue;
        for (const auto& a : fp) {
            for (const auto& b : o.footprint()) {
                if (overlap(a, b)) return false;
            }
        }
    }
    return true;
}

bool same_pose(const Pose2& a, const Pose2& b) { return a == b; }

}  // namespace

TEST_CASE("sample_retrieval_pushes: counts, blocking and empty scenes") {
    SceneState s = empty_scene();
    CHECK(sample_retrieval_pushes(s).empty());

    add_box(s, 0, 0.04, 0.04, Pose2(0.144, 0.144, 0.0));
    const auto lone = sample_retrieval_pushes(s);
    CHECK(lone.size() == 12);
    for (const PushAction& a : lone) {
        // Every push heads toward the object's centroid side.
        CHECK(dot(s.at(0).centroid() - a.start, a.direction) > 0.0);
        CHECK(a.distance == 0.05);
    }

    // Object jammed into a pocket: three faces walled off.
    SceneState j = empty_scene();
    const double c = 0.144;
    add_box(j, 0, 0.04, 0.04, Pose2(c, c, 0.0));
    add_box(j, 1, 0.02, 0.1, Pose2(c - 0.0305, c, 0.0));
    add_box(j, 2, 0.02, 0.1, Pose2(c + 0.0305, c, 0.0));
    add_box(j, 3, 0.04, 0.02, Pose2(c, c - 0.0305, 0.0));
    const SamplerConfig cfg;
    const auto pushes = sample_retrieval_pushes(j, cfg);
    std::size_t on_target = 0;
    for (const PushAction& a : pushes) {
        CHECK(start_is_free(j, a, cfg.pusher_radius));
        // Pushes on the jammed object can only come in through the open top face.
        if (a.distance > 0 && distance(a.start, j.at(0).centroid()) < 0.09) {
            on_target += dot(a.direction, Vec2{0.0, -1.0}) > 0.5;
        }
    }
    CHECK(pushes.size() < 4 * 12);
    CHECK(on_target >= 1);
}

TEST_CASE("sample_retrieval_pushes is deterministic") {
    const SceneState s = random_pushed_state(4);
    CHECK(sample_retrieval_pushes(s) == sample_retrieval_pushes(s));
}

TEST_CASE("sample_place_poses: direct-to-goal first, occupied goal dropped") {
    SceneState s = empty_scene(0.5, 0.4);
    add_box(s, 0, 0.05, 0.05, Pose2(0.1, 0.1, 0.0));
    add_box(s, 1, 0.05, 0.05, Pose2(0.4, 0.3, 0.0));
    const Pose2 free_goal(0.25, 0.2, 0.4);
    const auto poses = sample_place_poses(s, 0, free_goal);
    REQUIRE_FALSE(poses.empty());
    CHECK(poses.front() == free_goal);

    const Pose2 taken(0.4, 0.3, 0.0);
    const auto blocked = sample_place_poses(s, 0, taken);
    CHECK(std::none_of(blocked.begin(), blocked.end(), [&](const Pose2& p) { return same_pose(p, taken); }));
    for (const Pose2& p : blocked) CHECK(footprint_clear(s, 0, p));
    CHECK_THROWS(sample_place_poses(s, 9, free_goal));
}

TEST_CASE("grid_place_poses tiles the workspace by the object's box") {
    SceneState s = empty_scene(0.78, 0.52);
    add_box(s, 0, 0.1, 0.1, Pose2(0.39, 0.26, 0.0));
    SceneState lone = s;
    lone.objects.clear();
    lone.objects.push_back(s.objects[0]);
    // The object itself does not block its own tiles.
    CHECK(grid_place_poses(lone, 0, 0.0).size() == 7 * 5);
}

TEST_CASE("sample_place_poses: every pose clears the others; duplicates dropped") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        SceneState s = random_sparse_state(seed);
        s.workspace = Rect::from_size(0.288, 0.288);
        SamplerConfig cfg;
        cfg.rng_seed = seed;
        const int id = s.objects.back().id();
        const auto poses = sample_place_poses(s, id, Pose2(0.05, 0.05, 0.0), cfg);
        for (std::size_t i = 0; i < poses.size(); ++i) {
            CHECK(footprint_clear(s, id, poses[i]));
            for (std::size_t k = 0; k < i; ++k) {
                const bool dup = distance(poses[i].position(), poses[k].position()) <= 1e-3 &&
                                 std::abs(normalize_angle(poses[i].theta - poses[k].theta)) <= 1e-2;
                CHECK_FALSE(dup);
            }
        }
        CHECK(poses == sample_place_poses(s, id, Pose2(0.05, 0.05, 0.0), cfg));
    }
}

TEST_CASE("sample_remp_actions: tiers, ordering and subset property") {
    SceneState s = empty_scene(0.5, 0.4);
    add_box(s, 0, 0.05, 0.05, Pose2(0.1, 0.1, 0.0));
    add_box(s, 1, 0.05, 0.05, Pose2(0.4, 0.3, 0.0), Movability::push_only);
    RempGoal all_there;
    all_there.poses = {{0, s.at(0).pose()}, {1, s.at(1).pose()}};
    const auto exp_all = sample_remp_actions(s, all_there, RempTier::expansion);
    CHECK_FALSE(exp_all.empty());
    const auto sim_all = sample_remp_actions(s, all_there, RempTier::simulation);
    for (const RempAction& a : sim_all) {
        CHECK_FALSE(action_target_pose(a) == all_there.poses.at(action_object(a)));
    }

    RempGoal g;
    g.poses = {{0, Pose2(0.25, 0.2, 0.0)}, {1, s.at(1).pose()}};
    const auto exp = sample_remp_actions(s, g, RempTier::expansion);
    REQUIRE_FALSE(exp.empty());
    const auto* first = std::get_if<PickPlaceAction>(&exp.front());
    REQUIRE(first != nullptr);
    CHECK(first->object_id == 0);
    CHECK(first->place == g.poses.at(0));
    for (const RempAction& a : exp) {
        if (action_object(a) == 1) CHECK(std::holds_alternative<PushRequest>(a));
    }

    const auto sim = sample_remp_actions(s, g, RempTier::simulation);
    REQUIRE_FALSE(sim.empty());
    for (const RempAction& a : sim) CHECK(std::find(exp.begin(), exp.end(), a) != exp.end());
}
