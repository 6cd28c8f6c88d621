#include "slr/scene.hpp"

#include <cmath>
#include <string>

#include "slr/errors.hpp"
#include "slr/geometry.hpp"
#include "slr/rng.hpp"

namespace slr {

void SceneConfig::validate() const {
    if (!(disk_radius > 0.0)) throw ConfigError("disk_radius must be positive");
    if (!(grid_spacing > 0.0)) throw ConfigError("grid_spacing must be positive");
    if (!(rect_size_min > 0.0) || !(rect_size_max >= rect_size_min))
        throw ConfigError("rectangle size range is degenerate");
    if (!(rect_xy_max >= rect_xy_min) || !(rect_z_max >= rect_z_min))
        throw ConfigError("rectangle coordinate ranges are degenerate");
    if (!std::isfinite(ground_z)) throw ConfigError("ground_z must be finite");
}

void to_json(nlohmann::json& j, const SceneConfig& cfg) {
    j = nlohmann::json{{"disk_radius", cfg.disk_radius},
                       {"grid_spacing", cfg.grid_spacing},
                       {"ground_z", cfg.ground_z},
                       {"n_rectangles", cfg.n_rectangles},
                       {"rect_size_min", cfg.rect_size_min},
                       {"rect_size_max", cfg.rect_size_max},
                       {"rect_xy_min", cfg.rect_xy_min},
                       {"rect_xy_max", cfg.rect_xy_max},
                       {"rect_z_min", cfg.rect_z_min},
                       {"rect_z_max", cfg.rect_z_max},
                       {"square_rectangles", cfg.square_rectangles},
                       {"seed", cfg.seed}};
}

void from_json(const nlohmann::json& j, SceneConfig& cfg) {
    cfg = SceneConfig{};
    if (j.contains("disk_radius")) j.at("disk_radius").get_to(cfg.disk_radius);
    if (j.contains("grid_spacing")) j.at("grid_spacing").get_to(cfg.grid_spacing);
    if (j.contains("ground_z")) j.at("ground_z").get_to(cfg.ground_z);
    if (j.contains("n_rectangles")) j.at("n_rectangles").get_to(cfg.n_rectangles);
    if (j.contains("rect_size_min")) j.at("rect_size_min").get_to(cfg.rect_size_min);
    if (j.contains("rect_size_max")) j.at("rect_size_max").get_to(cfg.rect_size_max);
    if (j.contains("rect_xy_min")) j.at("rect_xy_min").get_to(cfg.rect_xy_min);
    if (j.contains("rect_xy_max")) j.at("rect_xy_max").get_to(cfg.rect_xy_max);
    if (j.contains("rect_z_min")) j.at("rect_z_min").get_to(cfg.rect_z_min);
    if (j.contains("rect_z_max")) j.at("rect_z_max").get_to(cfg.rect_z_max);
    if (j.contains("square_rectangles")) j.at("square_rectangles").get_to(cfg.square_rectangles);
    if (j.contains("seed")) j.at("seed").get_to(cfg.seed);
    cfg.validate();
}

PointCloud generate_ground_disk(const SceneConfig& cfg) {
    cfg.validate();
    const double R = cfg.disk_radius;
    const double s = cfg.grid_spacing;
    const double r2 = R * R;

    PointCloud cloud;
    cloud.reserve(static_cast<std::size_t>(kPi * r2 / (s * s) * 1.02) + 64);

    const long i_max = static_cast<long>(std::floor(R / s));
    for (long i = -i_max; i <= i_max; ++i) {
        const double x = static_cast<double>(i) * s;
        const double rem = r2 - x * x;
        if (rem < 0.0) continue;
        // generous estimate, then exact predicate per node
        const long j_est = static_cast<long>(std::floor(std::sqrt(rem) / s)) + 1;
        for (long j = -j_est; j <= j_est; ++j) {
            const double y = static_cast<double>(j) * s;
            if (x * x + y * y <= r2)
                cloud.push_back(LabeledPoint{x, y, cfg.ground_z, Label::ground});
        }
    }
    return cloud;
}

namespace {

struct Quaternion {
    double x, y, z, w;
};

// Shoemake's subgroup algorithm: Haar-uniform rotations from three uniforms.
Quaternion random_rotation(Rng& rng) {
    const double u1 = rng.uniform01();
    const double u2 = rng.uniform01();
    const double u3 = rng.uniform01();
    const double a = std::sqrt(1.0 - u1);
    const double b = std::sqrt(u1);
    return {a * std::sin(2.0 * kPi * u2), a * std::cos(2.0 * kPi * u2),
            b * std::sin(2.0 * kPi * u3), b * std::cos(2.0 * kPi * u3)};
}

Vec3 rotate(const Quaternion& q, const Vec3& v) {
    // v' = v + 2 q_vec x (q_vec x v + w v)
    const Vec3 qv{q.x, q.y, q.z};
    const Vec3 t{2.0 * (qv.y * v.z - qv.z * v.y), 2.0 * (qv.z * v.x - qv.x * v.z),
                 2.0 * (qv.x * v.y - qv.y * v.x)};
    return {v.x + q.w * t.x + (qv.y * t.z - qv.z * t.y),
            v.y + q.w * t.y + (qv.z * t.x - qv.x * t.z),
            v.z + q.w * t.z + (qv.x * t.y - qv.y * t.x)};
}

// Draw order is frozen: size(s), center xyz, then the three rotation
// uniforms. Changing it changes every seeded scene.
void generate_rectangle(const SceneConfig& cfg, std::uint64_t index,
                        std::vector<LabeledPoint>& out) {
    Rng rng(sub_seed(cfg.seed, index));
    const double width = rng.uniform(cfg.rect_size_min, cfg.rect_size_max);
    const double height =
        cfg.square_rectangles ? width : rng.uniform(cfg.rect_size_min, cfg.rect_size_max);
    const Vec3 center{rng.uniform(cfg.rect_xy_min, cfg.rect_xy_max),
                      rng.uniform(cfg.rect_xy_min, cfg.rect_xy_max),
                      rng.uniform(cfg.rect_z_min, cfg.rect_z_max)};
    const Quaternion q = random_rotation(rng);

    const double s = cfg.grid_spacing;
    const double half_w = width * 0.5;
    const double half_h = height * 0.5;
    const long i_max = static_cast<long>(std::floor(half_w / s));
    const long j_max = static_cast<long>(std::floor(half_h / s));
    for (long i = -i_max; i <= i_max; ++i) {
        const double a = static_cast<double>(i) * s;
        for (long j = -j_max; j <= j_max; ++j) {
            const double b = static_cast<double>(j) * s;
            const Vec3 p = rotate(q, Vec3{a, b, 0.0}) + center;
            out.push_back(LabeledPoint{p.x, p.y, p.z, Label::non_ground});
        }
    }
}

}  // namespace

PointCloud generate_rectangles(const SceneConfig& cfg) {
    cfg.validate();
    PointCloud cloud;
    for (std::uint64_t k = 0; k < cfg.n_rectangles; ++k)
        generate_rectangle(cfg, k, cloud.points);
    return cloud;
}

PointCloud generate_dense_scene(const SceneConfig& cfg) {
    cfg.validate();
    PointCloud cloud = generate_ground_disk(cfg);

    const double r2 = cfg.disk_radius * cfg.disk_radius;
    std::uint64_t surviving = 0;
    std::vector<LabeledPoint> rect;
    for (std::uint64_t k = 0; k < cfg.n_rectangles; ++k) {
        rect.clear();
        generate_rectangle(cfg, k, rect);
        bool any = false;
        for (const auto& p : rect) {
            if (p.z < cfg.ground_z) continue;
            if (p.x * p.x + p.y * p.y > r2) continue;
            cloud.points.push_back(p);
            any = true;
        }
        if (any) ++surviving;
    }

    cloud.meta["scene_config"] = nlohmann::json(cfg).dump();
    cloud.meta["n_rectangles_surviving"] = std::to_string(surviving);
    return cloud;
}

}  // namespace slr
