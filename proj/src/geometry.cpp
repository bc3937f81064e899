#include "clutter/geometry.hpp"

#include <algorithm>
#include <limits>

namespace clutter {

namespace {

constexpr double kDedupEps = 1e-12;
constexpr double kBoundaryEps = 1e-9;

double polygon_cross_sum(std::span<const Vec2> v) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += cross(v[i], v[(i + 1) % v.size()]);
    }
    return s;
}

struct Projection {
    double lo;
    double hi;
};

Projection project(std::span<const Vec2> v, Vec2 axis) {
    Projection p{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const Vec2& q : v) {
        const double d = dot(q, axis);
        p.lo = std::min(p.lo, d);
        p.hi = std::max(p.hi, d);
    }
    return p;
}

Vec2 edge_normal(const Vec2& a, const Vec2& b) {
    const Vec2 e = b - a;
    const double len = e.norm();
    return {e.y / len, -e.x / len};
}

Vec2 canonical_axis(Vec2 n) {
    if (n.x < 0.0 || (n.x == 0.0 && n.y < 0.0)) return -n;
    return n;
}

}  // namespace

double normalize_angle(double theta) {
    if (!std::isfinite(theta)) throw GeometryError("non-finite angle");
    if (theta > -kPi && theta <= kPi) return theta;
    double r = std::remainder(theta, 2.0 * kPi);
    if (r <= -kPi) r += 2.0 * kPi;
    return r;
}

Pose2 compose(const Pose2& outer, const Pose2& inner) {
    const Vec2 p = outer.apply(inner.position());
    return Pose2(p.x, p.y, outer.theta + inner.theta);
}

// ---------------------------------------------------------------------------
// ConvexPolygon

ConvexPolygon ConvexPolygon::from_points(std::vector<Vec2> points) {
    std::vector<Vec2> v;
    v.reserve(points.size());
    for (const Vec2& p : points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw GeometryError("polygon vertex is not finite");
        if (v.empty() || (p - v.back()).norm() > kDedupEps) v.push_back(p);
    }
    while (v.size() > 1 && (v.front() - v.back()).norm() <= kDedupEps) v.pop_back();
    if (v.size() < 3) throw GeometryError("polygon needs at least 3 distinct vertices");
    if (polygon_cross_sum(v) < 0.0) std::reverse(v.begin(), v.end());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2& a = v[i];
        const Vec2& b = v[(i + 1) % v.size()];
        const Vec2& c = v[(i + 2) % v.size()];
        const double turn = cross(b - a, c - b);
        const double scale = (b - a).norm() * (c - b).norm();
        if (turn <= 1e-12 * scale) throw GeometryError("polygon is not strictly convex");
    }
    ConvexPolygon poly;
    poly.vertices_ = std::move(v);
    if (poly.area() <= 0.0) throw GeometryError("polygon has non-positive area");
    return poly;
}

ConvexPolygon ConvexPolygon::rectangle(double width, double height, Vec2 center) {
    const double hw = width / 2.0;
    const double hh = height / 2.0;
    return from_points({center + Vec2{-hw, -hh}, center + Vec2{hw, -hh}, center + Vec2{hw, hh},
                        center + Vec2{-hw, hh}});
}

ConvexPolygon ConvexPolygon::regular(int sides, double circumradius, Vec2 center, double phase) {
    if (sides < 3) throw GeometryError("regular polygon needs at least 3 sides");
    std::vector<Vec2> v;
    v.reserve(static_cast<std::size_t>(sides));
    for (int i = 0; i < sides; ++i) {
        const double a = phase + 2.0 * kPi * i / sides;
        v.push_back(center + unit_from_angle(a) * circumradius);
    }
    return from_points(std::move(v));
}

double ConvexPolygon::area() const { return 0.5 * polygon_cross_sum(vertices_); }

Vec2 ConvexPolygon::centroid() const {
    double a2 = 0.0;
    Vec2 c;
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        const Vec2& p = vertices_[i];
        const Vec2& q = vertices_[(i + 1) % vertices_.size()];
        const double w = cross(p, q);
        a2 += w;
        c += (p + q) * w;
    }
    return c / (3.0 * a2);
}

double ConvexPolygon::perimeter() const {
    double s = 0.0;
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        s += distance(vertices_[i], vertices_[(i + 1) % vertices_.size()]);
    }
    return s;
}

Rect ConvexPolygon::bounds() const {
    Rect r{vertices_[0].x, vertices_[0].y, vertices_[0].x, vertices_[0].y};
    for (const Vec2& p : vertices_) {
        r.min_x = std::min(r.min_x, p.x);
        r.min_y = std::min(r.min_y, p.y);
        r.max_x = std::max(r.max_x, p.x);
        r.max_y = std::max(r.max_y, p.y);
    }
    return r;
}

bool ConvexPolygon::contains(Vec2 p, double eps) const {
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        const Vec2& a = vertices_[i];
        const Vec2& b = vertices_[(i + 1) % vertices_.size()];
        const Vec2 e = b - a;
        if (cross(e, p - a) < -eps * e.norm()) return false;
    }
    return true;
}

ConvexPolygon transform(const ConvexPolygon& poly, const Pose2& pose) {
    ConvexPolygon out;
    out.vertices_.reserve(poly.vertices_.size());
    const double c = std::cos(pose.theta);
    const double s = std::sin(pose.theta);
    for (const Vec2& v : poly.vertices_) {
        out.vertices_.push_back({c * v.x - s * v.y + pose.x, s * v.x + c * v.y + pose.y});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Collision queries

double separation(const ConvexPolygon& a, const ConvexPolygon& b) {
    double best = -std::numeric_limits<double>::infinity();
    auto scan = [&](const ConvexPolygon& p) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            const Vec2 n = edge_normal(p[i], p[(i + 1) % p.size()]);
            const Projection pa = project(a.vertices(), n);
            const Projection pb = project(b.vertices(), n);
            best = std::max(best, std::max(pb.lo - pa.hi, pa.lo - pb.hi));
        }
    };
    scan(a);
    scan(b);
    return best;
}

std::optional<Penetration> overlap(const ConvexPolygon& a, const ConvexPolygon& b) {
    const Rect ra = a.bounds();
    const Rect rb = b.bounds();
    if (ra.max_x <= rb.min_x || rb.max_x <= ra.min_x || ra.max_y <= rb.min_y || rb.max_y <= ra.min_y) {
        return std::nullopt;
    }

    // Axis order must not depend on argument order so that overlap(b, a) mirrors overlap(a, b).
    std::vector<Vec2> axes;
    axes.reserve(a.size() + b.size());
    for (const ConvexPolygon* p : {&a, &b}) {
        for (std::size_t i = 0; i < p->size(); ++i) {
            axes.push_back(canonical_axis(edge_normal((*p)[i], (*p)[(i + 1) % p->size()])));
        }
    }
    std::sort(axes.begin(), axes.end(), [](Vec2 u, Vec2 v) { return u.x != v.x ? u.x < v.x : u.y < v.y; });

    const Vec2 ca = a.centroid();
    const Vec2 cb = b.centroid();
    Penetration best{std::numeric_limits<double>::infinity(), {}};
    for (const Vec2& n : axes) {
        const Projection pa = project(a.vertices(), n);
        const Projection pb = project(b.vertices(), n);
        const double push_neg = pa.hi - pb.lo;  // a moves along -n
        const double push_pos = pb.hi - pa.lo;  // a moves along +n
        const double depth = std::min(push_neg, push_pos);
        if (depth <= 0.0) return std::nullopt;
        if (depth < best.depth) {
            Vec2 dir;
            if (push_neg < push_pos) {
                dir = -n;
            } else if (push_pos < push_neg) {
                dir = n;
            } else {
                dir = dot(ca - cb, n) >= 0.0 ? n : -n;
            }
            best = {depth, dir};
        }
    }
    return best;
}

Vec2 closest_boundary_point(const ConvexPolygon& poly, Vec2 p) {
    Vec2 best = poly[0];
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % poly.size()];
        const Vec2 e = b - a;
        const double t = std::clamp(dot(p - a, e) / e.norm_sq(), 0.0, 1.0);
        const Vec2 q = a + e * t;
        const double d = (p - q).norm_sq();
        if (d < best_d) {
            best_d = d;
            best = q;
        }
    }
    return best;
}

std::optional<DiscContact> disc_overlap(Vec2 center, double radius, const ConvexPolygon& poly) {
    const Rect r = poly.bounds().inflated(radius);
    if (!r.contains(center)) return std::nullopt;
    if (poly.contains(center, 0.0)) {
        // Center inside: the polygon leaves through its nearest edge.
        double best = std::numeric_limits<double>::infinity();
        DiscContact c;
        for (std::size_t i = 0; i < poly.size(); ++i) {
            const Vec2& a = poly[i];
            const Vec2& b = poly[(i + 1) % poly.size()];
            const Vec2 n = edge_normal(a, b);
            const double d = dot(a - center, n);
            if (d < best) {
                best = d;
                c.direction = -n;
                c.point = center + n * d;
            }
        }
        c.depth = best + radius;
        return c;
    }
    const Vec2 q = closest_boundary_point(poly, center);
    const double d = (q - center).norm();
    if (d >= radius) return std::nullopt;
    return DiscContact{radius - d, (q - center) / d, q};
}

// ---------------------------------------------------------------------------
// Shape

Shape Shape::from_parts(std::vector<ConvexPolygon> parts) {
    if (parts.empty()) throw GeometryError("shape needs at least one part");
    Shape s;
    s.parts_ = std::move(parts);
    double area = 0.0;
    Vec2 first;
    double ixx = 0.0, iyy = 0.0, ixy = 0.0;  // second moments about the origin
    for (const ConvexPolygon& p : s.parts_) {
        const double a = p.area();
        area += a;
        first += p.centroid() * a;
        for (std::size_t i = 0; i < p.size(); ++i) {
            const Vec2& u = p[i];
            const Vec2& v = p[(i + 1) % p.size()];
            const double w = cross(u, v);
            ixx += w * (u.x * u.x + u.x * v.x + v.x * v.x) / 12.0;
            iyy += w * (u.y * u.y + u.y * v.y + v.y * v.y) / 12.0;
            ixy += w * (u.x * v.y + 2.0 * u.x * u.y + 2.0 * v.x * v.y + v.x * u.y) / 24.0;
        }
    }
    s.area_ = area;
    s.centroid_ = first / area;
    const double sxx = ixx - area * s.centroid_.x * s.centroid_.x;
    const double syy = iyy - area * s.centroid_.y * s.centroid_.y;
    const double sxy = ixy - area * s.centroid_.x * s.centroid_.y;
    s.gyration_sq_ = (sxx + syy) / area;
    const double scale = std::abs(sxx) + std::abs(syy);
    if (std::abs(2.0 * sxy) <= 1e-9 * scale && std::abs(sxx - syy) <= 1e-9 * scale) {
        s.principal_axis_ = 0.0;
    } else {
        s.principal_axis_ = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
    }
    for (const ConvexPolygon& p : s.parts_) {
        for (const Vec2& v : p.vertices()) s.radius_ = std::max(s.radius_, distance(v, s.centroid_));
    }
    return s;
}

std::vector<ConvexPolygon> transform(const Shape& shape, const Pose2& pose) {
    std::vector<ConvexPolygon> out;
    out.reserve(shape.parts().size());
    for (const ConvexPolygon& p : shape.parts()) out.push_back(transform(p, pose));
    return out;
}

Rect bounds(std::span<const ConvexPolygon> parts) {
    Rect r = parts.front().bounds();
    for (const ConvexPolygon& p : parts.subspan(1)) {
        const Rect q = p.bounds();
        r = {std::min(r.min_x, q.min_x), std::min(r.min_y, q.min_y), std::max(r.max_x, q.max_x),
             std::max(r.max_y, q.max_y)};
    }
    return r;
}

double separation(std::span<const ConvexPolygon> a, std::span<const ConvexPolygon> b) {
    double best = std::numeric_limits<double>::infinity();
    for (const ConvexPolygon& p : a) {
        for (const ConvexPolygon& q : b) best = std::min(best, separation(p, q));
    }
    return best;
}

bool contains(const Rect& workspace, std::span<const ConvexPolygon> parts) {
    for (const ConvexPolygon& p : parts) {
        for (const Vec2& v : p.vertices()) {
            if (!workspace.contains(v)) return false;
        }
    }
    return true;
}

bool contains(const Rect& workspace, const Shape& shape, const Pose2& pose) {
    const auto parts = transform(shape, pose);
    return contains(workspace, parts);
}

// ---------------------------------------------------------------------------
// Boundary walking

namespace {

struct Segment {
    Vec2 a;
    Vec2 b;
};

// Parameters along [p, q] where the segment meets edges or vertices of `other`.
void collect_splits(Vec2 p, Vec2 q, const ConvexPolygon& other, std::vector<double>& ts) {
    const Vec2 d = q - p;
    const double len_sq = d.norm_sq();
    for (std::size_t i = 0; i < other.size(); ++i) {
        const Vec2& a = other[i];
        const Vec2& b = other[(i + 1) % other.size()];
        const Vec2 e = b - a;
        const double denom = cross(d, e);
        if (std::abs(denom) > 1e-15) {
            const double t = cross(a - p, e) / denom;
            const double u = cross(a - p, d) / denom;
            if (t > 0.0 && t < 1.0 && u >= -1e-12 && u <= 1.0 + 1e-12) ts.push_back(t);
        }
        // Vertices of `other` lying on [p, q] (collinear contact).
        const double t = dot(a - p, d) / len_sq;
        if (t > 0.0 && t < 1.0 && std::abs(cross(d, a - p)) <= kBoundaryEps * std::sqrt(len_sq)) ts.push_back(t);
    }
}

bool on_same_direction_edge(const ConvexPolygon& poly, Vec2 m, Vec2 dir) {
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % poly.size()];
        const Vec2 e = b - a;
        const double len = e.norm();
        if (dot(e, dir) <= 0.0 || std::abs(cross(e, dir)) > 1e-9 * len * dir.norm()) continue;
        const double t = dot(m - a, e) / (len * len);
        if (t < 0.0 || t > 1.0) continue;
        if (std::abs(cross(e, m - a)) / len <= kBoundaryEps) return true;
    }
    return false;
}

}  // namespace

std::vector<Vec2> outer_boundary(std::span<const ConvexPolygon> parts) {
    if (parts.empty()) throw GeometryError("empty shape has no boundary");
    std::vector<Segment> segs;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const ConvexPolygon& poly = parts[i];
        for (std::size_t k = 0; k < poly.size(); ++k) {
            const Vec2 p = poly[k];
            const Vec2 q = poly[(k + 1) % poly.size()];
            if (parts.size() == 1) {
                segs.push_back({p, q});
                continue;
            }
            std::vector<double> ts{0.0, 1.0};
            for (std::size_t j = 0; j < parts.size(); ++j) {
                if (j != i) collect_splits(p, q, parts[j], ts);
            }
            std::sort(ts.begin(), ts.end());
            const Vec2 out = edge_normal(p, q);
            for (std::size_t s = 0; s + 1 < ts.size(); ++s) {
                const Vec2 a = p + (q - p) * ts[s];
                const Vec2 b = p + (q - p) * ts[s + 1];
                if ((b - a).norm() <= kBoundaryEps) continue;
                const Vec2 mid = (a + b) * 0.5;
                const Vec2 probe = mid + out * 1e-7;
                bool internal = false;
                for (std::size_t j = 0; j < parts.size() && !internal; ++j) {
                    if (j == i) continue;
                    if (parts[j].contains(probe, 0.0)) internal = true;
                    // Coincident same-direction edges: keep only the lowest-index copy.
                    else if (j < i && on_same_direction_edge(parts[j], mid, b - a)) internal = true;
                }
                if (!internal) segs.push_back({a, b});
            }
        }
    }
    if (segs.empty()) throw GeometryError("shape boundary is empty");

    // Lowest-then-leftmost start vertex.
    double min_y = std::numeric_limits<double>::infinity();
    for (const Segment& s : segs) min_y = std::min(min_y, s.a.y);
    std::size_t start = segs.size();
    for (std::size_t i = 0; i < segs.size(); ++i) {
        if (segs[i].a.y <= min_y + kBoundaryEps && (start == segs.size() || segs[i].a.x < segs[start].a.x)) {
            start = i;
        }
    }

    std::vector<Vec2> loop{segs[start].a};
    std::vector<bool> used(segs.size(), false);
    std::size_t cur = start;
    used[cur] = true;
    const Vec2 origin = segs[start].a;
    for (std::size_t guard = 0; guard < segs.size(); ++guard) {
        const Vec2 end = segs[cur].b;
        if ((end - origin).norm() <= 1e-7) break;
        loop.push_back(end);
        std::size_t next = segs.size();
        double best_d = 1e-7;
        for (std::size_t i = 0; i < segs.size(); ++i) {
            if (used[i]) continue;
            const double d = (segs[i].a - end).norm();
            if (d <= best_d) {
                best_d = d;
                next = i;
            }
        }
        if (next == segs.size()) throw GeometryError("shape boundary is not a closed loop");
        used[next] = true;
        cur = next;
    }
    return loop;
}

std::vector<ContourPoint> contour_points(const Shape& shape, const Pose2& pose, int n) {
    if (n < 1) throw GeometryError("contour sample count must be positive");
    const auto parts = transform(shape, pose);
    const std::vector<Vec2> loop = outer_boundary(parts);
    double perimeter = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) perimeter += distance(loop[i], loop[(i + 1) % loop.size()]);
    if (perimeter <= kBoundaryEps) throw GeometryError("shape has zero perimeter");

    const Vec2 centroid = pose.apply(shape.centroid());
    const double spacing = perimeter / n;
    std::vector<ContourPoint> out;
    out.reserve(static_cast<std::size_t>(n));
    std::size_t edge = 0;
    double edge_start = 0.0;
    for (int k = 0; k < n; ++k) {
        const double s = (k + 0.5) * spacing;
        double len = distance(loop[edge], loop[(edge + 1) % loop.size()]);
        while (s > edge_start + len && edge + 1 < loop.size()) {
            edge_start += len;
            ++edge;
            len = distance(loop[edge], loop[(edge + 1) % loop.size()]);
        }
        const Vec2 a = loop[edge];
        const Vec2 b = loop[(edge + 1) % loop.size()];
        const double t = len > 0.0 ? std::clamp((s - edge_start) / len, 0.0, 1.0) : 0.0;
        const Vec2 p = a + (b - a) * t;
        const Vec2 to_c = centroid - p;
        const double d = to_c.norm();
        out.push_back({p, d > 0.0 ? to_c / d : Vec2{0.0, 0.0}});
    }
    return out;
}

std::vector<Vec2> clip_to_slab(std::span<const Vec2> poly, Vec2 normal, double lo, double hi) {
    auto clip = [](const std::vector<Vec2>& in, Vec2 n, double limit) {
        // Keep dot(n, p) <= limit.
        std::vector<Vec2> out;
        for (std::size_t i = 0; i < in.size(); ++i) {
            const Vec2& p = in[i];
            const Vec2& q = in[(i + 1) % in.size()];
            const double dp = dot(n, p) - limit;
            const double dq = dot(n, q) - limit;
            if (dp <= 0.0) out.push_back(p);
            if ((dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0)) {
                const double t = dp / (dp - dq);
                out.push_back(p + (q - p) * t);
            }
        }
        return out;
    };
    std::vector<Vec2> v(poly.begin(), poly.end());
    v = clip(v, normal, hi);
    if (v.empty()) return v;
    v = clip(v, -normal, -lo);
    return v;
}

}  // namespace clutter
