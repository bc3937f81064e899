#include "doctest.h"

#include <cmath>

#include "clutter/worker_pool.hpp"
#include "test_support.hpp"

using namespace clutter;
using namespace testing_support;

namespace {

double centroid_shift(const SceneState& a, const SceneState& b, int id) {
    return distance(a.at(id).centroid(), b.at(id).centroid());
}

// Dense check that every pose along the path keeps the object off all others.
bool dense_path_is_free(const SceneState& s, int id, const std::vector<Pose2>& wps, double step) {
    const ObjectState& o = s.at(id);
    for (std::size_t i = 0; i + 1 < wps.size(); ++i) {
        const double len = distance(wps[i].position(), wps[i + 1].position());
        const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
        for (int k = 0; k <= n; ++k) {
            const double t = static_cast<double>(k) / n;
            const Pose2 p(wps[i].x + (wps[i + 1].x - wps[i].x) * t, wps[i].y + (wps[i + 1].y - wps[i].y) * t,
                          wps[i].theta + (wps[i + 1].theta - wps[i].theta) * t);
            for (const ObjectState& other : s.objects) {
                if (other.id() == id) continue;
                for (const auto& a : o.footprint_at(p)) {
                    for (const auto& b : other.footprint()) {
                        if (overlap(a, b)) return false;
                    }
                }
            }
        }
    }
    return true;
}

}  // namespace

TEST_CASE("step_push: a stroke through free space changes nothing") {
    SceneState s = empty_scene();
    add_box(s, 0, 0.04, 0.04, Pose2(0.2, 0.2, 0.0));
    const SceneState out = step_push(s, PushAction{{0.05, 0.05}, {1.0, 0.0}, 0.05});
    CHECK(serialize(out) == serialize(s));
    CHECK_FALSE(out.out_of_bounds);
}

TEST_CASE("step_push: centred push translates without rotation") {
    SceneState s = empty_scene();
    add_box(s, 0, 0.04, 0.04, Pose2(0.1, 0.144, 0.0));
    const double gap = 0.005;
    const PushAction push{{0.1 - 0.02 - 0.01 - gap, 0.144}, {1.0, 0.0}, 0.05};
    const SceneState out = step_push(s, push);
    const Pose2 p = out.at(0).pose();
    CHECK(p.x - 0.1 == doctest::Approx(0.05 - gap).epsilon(0.02));
    CHECK(std::abs(p.y - 0.144) < 1e-9);
    CHECK(std::abs(p.theta) < 1e-6);
}

TEST_CASE("step_push: abutting squares pushed in line match a fine-substep reference") {
    SceneState s = empty_scene();
    add_box(s, 0, 0.04, 0.04, Pose2(0.08, 0.144, 0.0));
    add_box(s, 1, 0.04, 0.04, Pose2(0.12 + 1e-6, 0.144, 0.0));
    const PushAction push{{0.08 - 0.02 - 0.01 - 0.002, 0.144}, {1.0, 0.0}, 0.05};
    const SceneState coarse = step_push(s, push);
    PushSimConfig fine;
    fine.substep = 1e-4;
    const SceneState reference = step_push(s, push, fine);
    const double lead = centroid_shift(s, coarse, 0);
    const double trail = centroid_shift(s, coarse, 1);
    CHECK(lead > 0.04);
    CHECK(trail > 0.04);
    CHECK(trail >= lead - 1e-3);
    for (int id : {0, 1}) {
        CHECK(distance(coarse.at(id).pose().position(), reference.at(id).pose().position()) < 1e-3);
        CHECK(std::abs(coarse.at(id).pose().theta - reference.at(id).pose().theta) < 1e-3);
    }
    CHECK(max_penetration(coarse) <= 1e-4);
}

TEST_CASE("step_push: invalid start is an error, a miss is not") {
    SceneState s = empty_scene();
    add_box(s, 0, 0.04, 0.04, Pose2(0.1, 0.1, 0.0));
    CHECK_THROWS_AS(step_push(s, PushAction{{0.1, 0.1}, {1.0, 0.0}, 0.05}), InvalidAction);
    CHECK_THROWS_AS(step_push(s, PushAction{{0.01, 0.01}, {1.0, 0.0}, 0.0}), InvalidAction);
    CHECK_NOTHROW(step_push(s, PushAction{{0.25, 0.25}, {0.0, 1.0}, 0.02}));
}

TEST_CASE("step_push: pushing an object over the edge flags the state") {
    SceneState s = empty_scene();
    add_box(s, 0, 0.04, 0.04, Pose2(0.27, 0.144, 0.0));
    const SceneState out = step_push(s, PushAction{{0.27 - 0.02 - 0.011, 0.144}, {1.0, 0.0}, 0.05});
    CHECK(out.out_of_bounds);
}

TEST_CASE("step_push: repeated runs are bit-identical") {
    const SceneState s = random_pushed_state(11);
    const auto acts = sample_retrieval_pushes(s);
    REQUIRE_FALSE(acts.empty());
    const std::string first = serialize(step_push(s, acts.front()));
    for (int i = 0; i < 100; ++i) CHECK(serialize(step_push(s, acts.front())) == first);
}

TEST_CASE("step_push: penetration and displacement bounds on random pushes") {
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const SceneState s = random_pushed_state(seed);
        const auto acts = sample_retrieval_pushes(s);
        for (std::size_t i = 0; i < acts.size(); i += 3) {
            const SceneState out = step_push(s, acts[i]);
            CHECK(max_penetration(out) <= 1e-4);
            for (const ObjectState& o : s.objects) CHECK(centroid_shift(s, out, o.id()) <= acts[i].distance + 1e-3);
            ++checked;
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("step_batch: equals per-index step_push and ignores scheduling") {
    WorkerPool pool(4);
    SimBatch batch;
    std::vector<std::optional<PushAction>> actions;
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        const SceneState s = random_pushed_state(static_cast<std::uint64_t>(i % 20), 1);
        const auto acts = sample_retrieval_pushes(s);
        batch.states.push_back(s);
        if (i % 7 == 3 || acts.empty()) {
            actions.push_back(std::nullopt);
        } else {
            actions.push_back(acts[rng.index(acts.size())]);
        }
    }
    const SimBatch serial = step_batch(batch, actions);
    const SimBatch parallel = step_batch(batch, actions, {}, &pool);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const std::string expect = actions[i] ? serialize(step_push(batch.states[i], *actions[i])) : serialize(batch.states[i]);
        CHECK(serialize(serial.states[i]) == expect);
        CHECK(serialize(parallel.states[i]) == expect);
    }

    SimBatch one;
    one.states = {batch.states[0]};
    const std::vector<std::optional<PushAction>> a1{actions[0]};
    CHECK(serialize(step_batch(one, a1).states[0]) == serialize(serial.states[0]));

    SimBatch same;
    std::vector<std::optional<PushAction>> a8;
    for (int i = 0; i < 8; ++i) {
        same.states.push_back(batch.states[1]);
        a8.push_back(actions[1]);
    }
    const SimBatch out8 = step_batch(same, a8, {}, &pool);
    for (int i = 1; i < 8; ++i) CHECK(serialize(out8.states[i]) == serialize(out8.states[0]));

    const std::vector<std::optional<PushAction>> short_actions(3);
    CHECK_THROWS_AS(step_batch(batch, short_actions), std::invalid_argument);
}

TEST_CASE("apply_pick_place: exact placement, collisions rejected, tight clearance accepted") {
    SceneState s = empty_scene();
    add_box(s, 0, 0.04, 0.04, Pose2(0.05, 0.05, 0.0));
    const Pose2 free(0.2, 0.2, 0.3);
    CHECK(apply_pick_place(s, 0, free).at(0).pose() == free);

    add_box(s, 1, 0.04, 0.04, Pose2(0.15, 0.05, 0.0));
    CHECK_THROWS_AS(apply_pick_place(s, 0, Pose2(0.16, 0.06, 0.0)), InvalidAction);
    const Pose2 tight(0.15 - 0.04 - 1e-5, 0.05, 0.0);
    // Overlap oracle: the placed footprint is disjoint from the neighbour.
    bool disjoint = true;
    for (const auto& a : s.at(0).footprint_at(tight)) {
        for (const auto& b : s.at(1).footprint()) disjoint = disjoint && !overlap(a, b);
    }
    REQUIRE(disjoint);
    CHECK(apply_pick_place(s, 0, tight).at(0).pose() == tight);

    SceneState p = s;
    p.objects[1] = ObjectState(1, p.objects[1].shape_ptr(), p.objects[1].pose(), Movability::push_only);
    CHECK_THROWS_AS(apply_pick_place(p, 1, free), InvalidAction);
}

TEST_CASE("apply_push_trajectory: drags along validated waypoints") {
    SceneState s = empty_scene(0.5, 0.4);
    add_box(s, 0, 0.04, 0.04, Pose2(0.05, 0.05, 0.0));
    const std::vector<Pose2> straight{Pose2(0.05, 0.05, 0.0), Pose2(0.3, 0.05, 0.0)};
    CHECK(apply_push_trajectory(s, 0, straight).at(0).pose() == straight.back());

    add_box(s, 1, 0.04, 0.2, Pose2(0.2, 0.1, 0.0));
    CHECK_THROWS_AS(apply_push_trajectory(s, 0, straight), InvalidAction);

    // Around the obstacle's top with 2 mm clearance: up, then right.
    const double top = 0.2 + 0.02 + 0.002;
    const std::vector<Pose2> ell{Pose2(0.05, 0.05, 0.0), Pose2(0.05, top, 0.0), Pose2(0.3, top, 0.0)};
    REQUIRE(dense_path_is_free(s, 0, ell, 1e-4));
    const SceneState out = apply_push_trajectory(s, 0, ell);
    CHECK(out.at(0).pose() == ell.back());
    CHECK(out.at(1).pose() == s.at(1).pose());
}
