#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace clutter {

/// Base class for every error the library raises.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class GeometryError : public Error {
public:
    using Error::Error;
};

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    constexpr bool operator==(const Vec2&) const = default;

    double norm() const { return std::hypot(x, y); }
    constexpr double norm_sq() const { return x * x + y * y; }
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
/// Counter-clockwise perpendicular.
constexpr Vec2 perp(Vec2 v) { return {-v.y, v.x}; }
inline Vec2 rotate(Vec2 v, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}
inline Vec2 unit_from_angle(double theta) { return {std::cos(theta), std::sin(theta)}; }
inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

/// Maps an angle into (-pi, pi].
double normalize_angle(double theta);

/// Planar rigid transform. Applied to a body-frame point p it yields R(theta) p + (x, y).
struct Pose2 {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;

    Pose2() = default;
    Pose2(double x_, double y_, double theta_) : x(x_), y(y_), theta(normalize_angle(theta_)) {}

    Vec2 position() const { return {x, y}; }
    Vec2 apply(Vec2 p) const { return rotate(p, theta) + position(); }
    bool operator==(const Pose2&) const = default;
};

/// outer ∘ inner: apply `inner` first, then `outer`.
Pose2 compose(const Pose2& outer, const Pose2& inner);

/// Axis-aligned rectangle with closed boundary.
struct Rect {
    double min_x = 0.0;
    double min_y = 0.0;
    double max_x = 0.0;
    double max_y = 0.0;

    static Rect from_size(double width, double height) { return {0.0, 0.0, width, height}; }
    double width() const { return max_x - min_x; }
    double height() const { return max_y - min_y; }
    Vec2 center() const { return {(min_x + max_x) / 2.0, (min_y + max_y) / 2.0}; }
    bool contains(Vec2 p) const { return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y; }
    bool overlaps(const Rect& o) const {
        return min_x <= o.max_x && o.min_x <= max_x && min_y <= o.max_y && o.min_y <= max_y;
    }
    Rect inflated(double margin) const {
        return {min_x - margin, min_y - margin, max_x + margin, max_y + margin};
    }
    bool operator==(const Rect&) const = default;
};

/// Counter-clockwise, strictly convex polygon.
class ConvexPolygon {
public:
    /// Validates and normalizes: drops repeated points, reorders clockwise input to
    /// counter-clockwise, and rejects collinear or degenerate outlines.
    static ConvexPolygon from_points(std::vector<Vec2> points);
    static ConvexPolygon rectangle(double width, double height, Vec2 center = {});
    static ConvexPolygon regular(int sides, double circumradius, Vec2 center = {}, double phase = 0.0);

    std::span<const Vec2> vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }
    const Vec2& operator[](std::size_t i) const { return vertices_[i]; }

    double area() const;
    Vec2 centroid() const;
    double perimeter() const;
    Rect bounds() const;
    /// Closed point containment.
    bool contains(Vec2 p, double eps = 1e-12) const;

    bool operator==(const ConvexPolygon&) const = default;

private:
    friend ConvexPolygon transform(const ConvexPolygon&, const Pose2&);
    ConvexPolygon() = default;
    std::vector<Vec2> vertices_;
};

ConvexPolygon transform(const ConvexPolygon& poly, const Pose2& pose);

struct Penetration {
    double depth = 0.0;
    /// Unit vector along which the first operand must move by `depth` to separate.
    Vec2 direction;
};

/// Largest separating gap over all candidate SAT axes. Negative when the polygons
/// overlap (its magnitude is then the penetration depth); zero when touching.
/// For separated polygons this is a lower bound on the Euclidean distance.
double separation(const ConvexPolygon& a, const ConvexPolygon& b);

/// Separating-axis test with minimum translation vector. Touching counts as disjoint.
std::optional<Penetration> overlap(const ConvexPolygon& a, const ConvexPolygon& b);

struct DiscContact {
    double depth = 0.0;
    /// Unit vector along which the polygon must move to clear the disc.
    Vec2 direction;
    /// Deepest point of the polygon boundary touched by the disc.
    Vec2 point;
};

/// Disc against polygon. Touching counts as disjoint.
std::optional<DiscContact> disc_overlap(Vec2 center, double radius, const ConvexPolygon& poly);

/// Closest point on the polygon boundary to p.
Vec2 closest_boundary_point(const ConvexPolygon& poly, Vec2 p);

/// Union of convex parts expressed in the body frame.
class Shape {
public:
    static Shape from_parts(std::vector<ConvexPolygon> parts);

    std::span<const ConvexPolygon> parts() const { return parts_; }
    const Vec2& centroid() const { return centroid_; }
    double area() const { return area_; }
    /// Mean squared distance of the area from the centroid.
    double gyration_sq() const { return gyration_sq_; }
    /// Largest vertex distance from the centroid.
    double radius() const { return radius_; }
    /// Orientation of the principal axis of the area distribution, in (-pi/2, pi/2].
    double principal_axis() const { return principal_axis_; }

private:
    Shape() = default;
    std::vector<ConvexPolygon> parts_;
    Vec2 centroid_;
    double area_ = 0.0;
    double gyration_sq_ = 0.0;
    double radius_ = 0.0;
    double principal_axis_ = 0.0;
};

std::vector<ConvexPolygon> transform(const Shape& shape, const Pose2& pose);
Rect bounds(std::span<const ConvexPolygon> parts);

/// Minimum separation between two multi-part footprints (see `separation`).
double separation(std::span<const ConvexPolygon> a, std::span<const ConvexPolygon> b);

/// True iff every vertex of every transformed part lies inside the closed rectangle.
bool contains(const Rect& workspace, const Shape& shape, const Pose2& pose);
bool contains(const Rect& workspace, std::span<const ConvexPolygon> parts);

struct ContourPoint {
    Vec2 point;
    /// Unit direction from `point` toward the shape centroid.
    Vec2 inward;
};

/// `n` points evenly spaced by arc length along the outer boundary of the union of
/// the parts, offset by half a spacing from the lowest-then-leftmost boundary vertex.
std::vector<ContourPoint> contour_points(const Shape& shape, const Pose2& pose, int n);

/// Outer boundary loop of the union of the parts, counter-clockwise, starting at the
/// lowest-then-leftmost vertex.
std::vector<Vec2> outer_boundary(std::span<const ConvexPolygon> parts);

/// Keeps the part of `poly` with lo <= dot(normal, p) <= hi. Empty when nothing remains.
std::vector<Vec2> clip_to_slab(std::span<const Vec2> poly, Vec2 normal, double lo, double hi);

}  // namespace clutter
