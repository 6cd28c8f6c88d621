#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace slr {

/// Minimal 3-vector in meters, right-handed, z up.
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3() = default;
    constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }

    constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    constexpr double squared_norm() const { return dot(*this); }
    double norm() const { return std::sqrt(squared_norm()); }

    constexpr bool operator==(const Vec3& o) const = default;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr bool operator==(const Vec2& o) const = default;
};

/// Point class used throughout: terrain surface vs. objects above it.
enum class Label : std::uint8_t {
    ground = 0,
    non_ground = 1,
    unlabeled = 2,
};

struct LabeledPoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    Label label = Label::unlabeled;

    LabeledPoint() = default;
    constexpr LabeledPoint(double x_, double y_, double z_, Label l = Label::unlabeled)
        : x(x_), y(y_), z(z_), label(l) {}

    constexpr Vec3 pos() const { return {x, y, z}; }

    constexpr bool operator==(const LabeledPoint& o) const = default;
};

/// An ordered sequence of labeled points plus free-form provenance metadata.
/// Duplicate coordinates are allowed; LiDAR scans can contain coincident returns.
struct PointCloud {
    std::vector<LabeledPoint> points;
    std::map<std::string, std::string> meta;

    PointCloud() = default;
    explicit PointCloud(std::vector<LabeledPoint> pts) : points(std::move(pts)) {}

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    void reserve(std::size_t n) { points.reserve(n); }

    void push_back(const LabeledPoint& p) { points.push_back(p); }

    std::size_t count_label(Label l) const {
        std::size_t n = 0;
        for (const auto& p : points)
            if (p.label == l) ++n;
        return n;
    }
};

}  // namespace slr
