#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace risuav {

/// Raised when a link vector has zero length (angle cosines and path loss are undefined).
struct GeometryError : std::domain_error {
    using std::domain_error::domain_error;
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Vec3&, const Vec3&) = default;

    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

    friend Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
    friend Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
    friend Vec3 operator*(Vec3 a, double s) { return a *= s; }
    friend Vec3 operator*(double s, Vec3 a) { return a *= s; }

    [[nodiscard]] double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    [[nodiscard]] double norm() const { return std::sqrt(dot(*this)); }
    [[nodiscard]] double horizontal_norm() const { return std::hypot(x, y); }
    [[nodiscard]] bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline Vec3 lerp(const Vec3& a, const Vec3& b, double t) { return a + (b - a) * t; }

struct Segment {
    Vec3 a;
    Vec3 b;
};

/// Closed axis-aligned box. One building of the occupancy map.
struct Aabb {
    Vec3 min;
    Vec3 max;

    friend bool operator==(const Aabb&, const Aabb&) = default;

    [[nodiscard]] bool valid() const {
        return min.finite() && max.finite() && min.x <= max.x && min.y <= max.y && min.z <= max.z;
    }
    [[nodiscard]] bool contains(const Vec3& p) const {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z && p.z <= max.z;
    }
    [[nodiscard]] bool contains(const Aabb& o) const { return contains(o.min) && contains(o.max); }

    /// Euclidean distance from p to the box (0 inside).
    [[nodiscard]] double distance_to(const Vec3& p) const {
        const double dx = std::max({min.x - p.x, 0.0, p.x - max.x});
        const double dy = std::max({min.y - p.y, 0.0, p.y - max.y});
        const double dz = std::max({min.z - p.z, 0.0, p.z - max.z});
        return std::sqrt(dx * dx + dy * dy + dz * dz);
    }
};

/// UAV flight state: position plus yaw measured from the x axis, in [0, 2pi).
struct Pose {
    Vec3 position;
    double heading = 0.0;

    friend bool operator==(const Pose&, const Pose&) = default;
};

/// Wraps an angle into [0, 2pi).
inline double wrap_two_pi(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(a, two_pi);
    if (r < 0.0) r += two_pi;
    // fmod of a tiny negative value can round up to exactly 2pi
    if (r >= two_pi) r = 0.0;
    return r;
}

/// Wraps an angle difference into (-pi, pi].
inline double wrap_pi(double a) {
    constexpr double pi = std::numbers::pi;
    double r = wrap_two_pi(a);
    if (r > pi) r -= 2.0 * pi;
    return r;
}

inline double distance(const Vec3& a, const Vec3& b) { return (b - a).norm(); }

/// Slab test of the closed segment against the closed box. Grazing contact counts as a hit.
inline bool segment_intersects_aabb(const Segment& s, const Aabb& box) {
    const double origin[3] = {s.a.x, s.a.y, s.a.z};
    const double dir[3] = {s.b.x - s.a.x, s.b.y - s.a.y, s.b.z - s.a.z};
    const double lo[3] = {box.min.x, box.min.y, box.min.z};
    const double hi[3] = {box.max.x, box.max.y, box.max.z};

    double t_enter = 0.0;
    double t_exit = 1.0;
    for (int axis = 0; axis < 3; ++axis) {
        if (dir[axis] == 0.0) {
            if (origin[axis] < lo[axis] || origin[axis] > hi[axis]) return false;
            continue;
        }
        double t0 = (lo[axis] - origin[axis]) / dir[axis];
        double t1 = (hi[axis] - origin[axis]) / dir[axis];
        if (t0 > t1) std::swap(t0, t1);
        t_enter = std::max(t_enter, t0);
        t_exit = std::min(t_exit, t1);
        if (t_enter > t_exit) return false;
    }
    return true;
}

/// Closed ball vs closed box.
inline bool sphere_intersects_aabb(const Vec3& center, double radius, const Aabb& box) {
    return box.distance_to(center) <= radius;
}

/// Buildings as axis-aligned boxes inside the scene extent.
struct OccupancyWorld {
    std::vector<Aabb> boxes;
    Aabb bounds;

    friend bool operator==(const OccupancyWorld&, const OccupancyWorld&) = default;
};

/// True iff the straight link a-b touches no building.
inline bool los_clear(const Vec3& a, const Vec3& b, const OccupancyWorld& world) {
    const Segment s{a, b};
    return std::none_of(world.boxes.begin(), world.boxes.end(),
                        [&](const Aabb& box) { return segment_intersects_aabb(s, box); });
}

inline bool sphere_clear(const Vec3& center, double radius, const OccupancyWorld& world) {
    return std::none_of(world.boxes.begin(), world.boxes.end(),
                        [&](const Aabb& box) { return sphere_intersects_aabb(center, radius, box); });
}

namespace detail {
inline double horizontal_over_slant(const Vec3& from, const Vec3& to) {
    const Vec3 d = to - from;
    const double slant = d.norm();
    if (slant == 0.0) throw GeometryError("zero-length link vector");
    return std::clamp(d.horizontal_norm() / slant, 0.0, 1.0);
}
}  // namespace detail

/// Cosine of the angle of arrival at the RIS: horizontal over slant BS-UAV distance.
inline double aoa_cosine(const Vec3& bs, const Vec3& uav) { return detail::horizontal_over_slant(bs, uav); }

/// Cosine of the angle of departure from the RIS toward the MT.
inline double aod_cosine(const Vec3& uav, const Vec3& mt) { return detail::horizontal_over_slant(uav, mt); }

/// BS and MT both lie in front of the UAV heading (strictly positive inner products).
inline bool same_side_check(const Vec3& bs, const Pose& uav, const Vec3& mt) {
    const Vec3 facing{std::cos(uav.heading), std::sin(uav.heading), 0.0};
    const double to_bs = (bs - uav.position).dot(facing);
    const double to_mt = (mt - uav.position).dot(facing);
    return to_bs > 0.0 && to_mt > 0.0;
}

}  // namespace risuav
