#pragma once

#include "test_support.hpp"

namespace testing_support {

using namespace clutter;

struct Maze {
    SceneState state;
    int object_id = 0;
    Pose2 goal;
};

// Slalom maze: a 0.04 m block crosses 2-4 walls, each with one 0.08 m gap at a random
// height. Feasible by construction with pure translation.
inline Maze random_maze(std::uint64_t seed) {
    Rng rng(derive_seed(seed, {31}));
    Maze m;
    m.state = empty_scene(0.5, 0.4);
    const int walls = 2 + static_cast<int>(rng.index(3));
    const double wall_w = 0.02, gap = 0.08, h = 0.4;
    for (int k = 0; k < walls; ++k) {
        const double x = 0.1 + (0.3 * k) / std::max(1, walls - 1);
        const double y0 = rng.uniform(0.01, h - gap - 0.01);
        if (y0 > 1e-3) add_box(m.state, 1 + 2 * k, wall_w, y0, Pose2(x, y0 / 2, 0.0));
        const double top = h - (y0 + gap);
        if (top > 1e-3) add_box(m.state, 2 + 2 * k, wall_w, top, Pose2(x, y0 + gap + top / 2, 0.0));
    }
    add_box(m.state, 0, 0.04, 0.04, Pose2(0.04, rng.uniform(0.04, 0.36), rng.uniform(-0.5, 0.5)));
    m.goal = Pose2(0.46, rng.uniform(0.04, 0.36), rng.uniform(-0.5, 0.5));
    return m;
}

}  // namespace testing_support
