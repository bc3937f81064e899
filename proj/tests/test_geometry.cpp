#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "clutter/geometry.hpp"
#include "clutter/rng.hpp"

using namespace clutter;

namespace {

ConvexPolygon unit_square(Vec2 c = {}) { return ConvexPolygon::rectangle(1.0, 1.0, c); }

bool same_vertex_set(std::span<const Vec2> a, std::span<const Vec2> b, double tol) {
    if (a.size() != b.size()) return false;
    std::vector<bool> used(b.size(), false);
    for (const Vec2& p : a) {
        bool found = false;
        for (std::size_t j = 0; j < b.size() && !found; ++j) {
            if (!used[j] && std::abs(p.x - b[j].x) < tol && std::abs(p.y - b[j].y) < tol) used[j] = found = true;
        }
        if (!found) return false;
    }
    return true;
}

// Minimum overlap over every edge normal of both polygons, found by plain projection.
std::pair<double, Vec2> brute_force_mtv(const ConvexPolygon& a, const ConvexPolygon& b) {
    double best = std::numeric_limits<double>::infinity();
    Vec2 axis;
    for (const ConvexPolygon* p : {&a, &b}) {
        for (std::size_t i = 0; i < p->size(); ++i) {
            const Vec2 e = (*p)[(i + 1) % p->size()] - (*p)[i];
            const Vec2 n = Vec2{e.y, -e.x} * (1.0 / std::hypot(e.x, e.y));
            double amin = 1e300, amax = -1e300, bmin = 1e300, bmax = -1e300;
            for (const Vec2& v : a.vertices()) amin = std::min(amin, dot(v, n)), amax = std::max(amax, dot(v, n));
            for (const Vec2& v : b.vertices()) bmin = std::min(bmin, dot(v, n)), bmax = std::max(bmax, dot(v, n));
            // Shortest push along n that clears the intervals (handles containment).
            const double o = std::min(amax - bmin, bmax - amin);
            if (o < best) best = o, axis = n;
        }
    }
    return {best, axis};
}

// Point at arc length s along a closed loop, walked edge by edge.
Vec2 point_at_arc(const std::vector<Vec2>& loop, double s) {
    for (std::size_t i = 0;; i = (i + 1) % loop.size()) {
        const Vec2 a = loop[i], b = loop[(i + 1) % loop.size()];
        const double len = distance(a, b);
        if (s <= len) return a + (b - a) * (s / len);
        s -= len;
    }
}

}  // namespace

TEST_CASE("transform: identity, translation and quarter turn") {
    const ConvexPolygon sq = unit_square();
    CHECK(transform(sq, Pose2()) == sq);
    const ConvexPolygon moved = transform(sq, Pose2(1.0, 0.0, 0.0));
    for (std::size_t i = 0; i < sq.size(); ++i) {
        CHECK(moved[i].x == doctest::Approx(sq[i].x + 1.0));
        CHECK(moved[i].y == doctest::Approx(sq[i].y));
    }
    const ConvexPolygon turned = transform(sq, Pose2(0.0, 0.0, kPi / 2.0));
    CHECK(same_vertex_set(turned.vertices(), sq.vertices(), 1e-9));
}

TEST_CASE("overlap: separating-axis depth and direction") {
    CHECK_FALSE(overlap(unit_square(), unit_square({2.0, 0.0})).has_value());

    const auto same = overlap(unit_square(), unit_square());
    REQUIRE(same.has_value());
    CHECK(same->depth == doctest::Approx(brute_force_mtv(unit_square(), unit_square()).first));
    CHECK(same->depth == doctest::Approx(1.0));
    const bool axis_aligned = std::abs(std::abs(same->direction.x) - 1.0) < 1e-12 || std::abs(std::abs(same->direction.y) - 1.0) < 1e-12;
    CHECK(axis_aligned);

    const auto off = overlap(unit_square(), unit_square({0.9, 0.0}));
    REQUIRE(off.has_value());
    CHECK(off->depth == doctest::Approx(0.1));
    CHECK(off->direction.x == doctest::Approx(-1.0));
    CHECK(off->direction.y == doctest::Approx(0.0));
    CHECK(separation(unit_square(), unit_square({0.9, 0.0})) == doctest::Approx(-0.1));
}

TEST_CASE("overlap: random pairs agree with brute-force projection") {
    Rng rng(7);
    for (int i = 0; i < 500; ++i) {
        const auto a = transform(ConvexPolygon::regular(3 + static_cast<int>(rng.index(6)), rng.uniform(0.1, 1.0)),
                                 Pose2(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-kPi, kPi)));
        const auto b = transform(ConvexPolygon::rectangle(rng.uniform(0.1, 1.0), rng.uniform(0.1, 1.0)),
                                 Pose2(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-kPi, kPi)));
        const double depth = brute_force_mtv(a, b).first;
        const auto o = overlap(a, b);
        if (depth > 1e-9) {
            REQUIRE(o.has_value());
            CHECK(o->depth == doctest::Approx(depth).epsilon(1e-9));
            // Moving a by the MTV separates the pair.
            const auto moved = transform(a, Pose2(o->direction.x * (o->depth + 1e-9), o->direction.y * (o->depth + 1e-9), 0.0));
            CHECK_FALSE(overlap(moved, b).has_value());
        } else if (depth < -1e-9) {
            CHECK_FALSE(o.has_value());
        }
    }
}

TEST_CASE("contains: closed workspace rectangle") {
    const Rect ws = Rect::from_size(0.288, 0.288);
    const Shape small = Shape::from_parts({ConvexPolygon::rectangle(0.03, 0.03)});
    CHECK(contains(ws, small, Pose2(0.144, 0.144, 0.0)));
    CHECK_FALSE(contains(ws, small, Pose2(0.288 + 0.01 - 0.015, 0.144, 0.0)));
    CHECK(contains(ws, small, Pose2(0.288 - 0.015, 0.015, 0.0)));
}

TEST_CASE("contour_points: unit square midpoints with inward normals") {
    const Shape sq = Shape::from_parts({unit_square()});
    const auto pts = contour_points(sq, Pose2(), 4);
    REQUIRE(pts.size() == 4);
    const std::vector<Vec2> expected{{0.0, -0.5}, {0.5, 0.0}, {0.0, 0.5}, {-0.5, 0.0}};
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(pts[i].point.x == doctest::Approx(expected[i].x));
        CHECK(pts[i].point.y == doctest::Approx(expected[i].y));
        CHECK(pts[i].inward.x == doctest::Approx(-expected[i].x * 2.0));
        CHECK(pts[i].inward.y == doctest::Approx(-expected[i].y * 2.0));
    }
}

TEST_CASE("contour_points: one point sits half a perimeter from the start vertex") {
    const Shape sq = Shape::from_parts({unit_square()});
    const auto pts = contour_points(sq, Pose2(), 1);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].point.x == doctest::Approx(0.5));
    CHECK(pts[0].point.y == doctest::Approx(0.5));
}

TEST_CASE("contour_points: 32-gon matches an arc-length walk") {
    const ConvexPolygon gon = ConvexPolygon::regular(32, 1.0, {}, 0.1);
    const auto pts = contour_points(Shape::from_parts({gon}), Pose2(), 8);
    std::vector<Vec2> loop(gon.vertices().begin(), gon.vertices().end());
    const auto start = std::min_element(loop.begin(), loop.end(), [](Vec2 a, Vec2 b) {
        return a.y < b.y || (a.y == b.y && a.x < b.x);
    });
    std::rotate(loop.begin(), start, loop.end());
    double perimeter = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) perimeter += distance(loop[i], loop[(i + 1) % loop.size()]);
    REQUIRE(pts.size() == 8);
    for (int k = 0; k < 8; ++k) {
        const Vec2 want = point_at_arc(loop, (k + 0.5) * perimeter / 8.0);
        CHECK(distance(pts[k].point, want) < 1e-6);
    }
}

TEST_CASE("outer_boundary of an L shape walks the union") {
    const std::vector<ConvexPolygon> parts{ConvexPolygon::rectangle(2.0, 1.0, {1.0, 0.5}),
                                           ConvexPolygon::rectangle(1.0, 1.0, {0.5, 1.5})};
    const auto loop = outer_boundary(parts);
    double perimeter = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) perimeter += distance(loop[i], loop[(i + 1) % loop.size()]);
    CHECK(perimeter == doctest::Approx(8.0));
    CHECK(loop.front().x == doctest::Approx(0.0));
    CHECK(loop.front().y == doctest::Approx(0.0));
}

TEST_CASE("from_points rejects degenerate outlines and normalizes orientation") {
    CHECK_THROWS_AS(ConvexPolygon::from_points({{0, 0}, {1, 0}, {2, 0}}), GeometryError);
    const auto cw = ConvexPolygon::from_points({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
    CHECK(cw.area() == doctest::Approx(1.0));
}
