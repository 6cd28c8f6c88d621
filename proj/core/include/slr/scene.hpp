#pragma once

#include <cstdint>

#include <nlohmann/json.hpp>

#include "slr/cloud.hpp"

namespace slr {

/// Dense "real world" test scene: a ground disk plus randomly posed planar
/// rectangles, all sampled on a lattice with `grid_spacing`.
struct SceneConfig {
    double disk_radius = 100.0;
    double grid_spacing = 0.005;   ///< 5 mm -> 40,000 points per square meter
    double ground_z = -1.65;
    std::uint64_t n_rectangles = 0;
    double rect_size_min = 0.1;
    double rect_size_max = 10.1;
    double rect_xy_min = -100.0;
    double rect_xy_max = 100.0;
    double rect_z_min = -5.0;
    double rect_z_max = 10.0;
    /// When true, one size sample is used for both edges of each rectangle.
    bool square_rectangles = false;
    std::uint64_t seed = 0;

    void validate() const;
};

void to_json(nlohmann::json& j, const SceneConfig& cfg);
void from_json(const nlohmann::json& j, SceneConfig& cfg);

/// Lattice points inside the disk (boundary inclusive), anchored at the
/// origin, all at z = ground_z, labeled ground. Deterministic.
PointCloud generate_ground_disk(const SceneConfig& cfg);

/// All rectangles, unclipped. Each rectangle's size, center and (uniformly
/// random) orientation come from a sub-stream seeded by (seed, index), so
/// rectangle k is reproducible in isolation.
PointCloud generate_rectangles(const SceneConfig& cfg);

/// Disk plus rectangles with points below ground_z or outside the disk
/// removed. Meta records the config and the number of rectangles that kept at
/// least one point.
PointCloud generate_dense_scene(const SceneConfig& cfg);

}  // namespace slr
