#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "slr/errors.hpp"
#include "slr/geometry.hpp"
#include "slr/scene.hpp"

using slr::Label;
using slr::PointCloud;
using slr::SceneConfig;

TEST_CASE("tiny disk is the exact lattice enumeration") {
    SceneConfig cfg;
    cfg.disk_radius = 0.01;
    cfg.grid_spacing = 0.005;
    cfg.ground_z = -1.0;
    const PointCloud disk = slr::generate_ground_disk(cfg);

    // lattice nodes (i, j) * 0.005 with i^2 + j^2 <= 4: a 13 point diamond
    std::set<std::pair<long, long>> want;
    for (long i = -2; i <= 2; ++i)
        for (long j = -2; j <= 2; ++j)
            if (i * i + j * j <= 4) want.insert({i, j});
    REQUIRE(want.size() == 13);
    REQUIRE(disk.size() == 13);

    std::set<std::pair<long, long>> got;
    for (const auto& p : disk.points) {
        CHECK(p.z == cfg.ground_z);
        CHECK(p.label == Label::ground);
        got.insert({std::lround(p.x / cfg.grid_spacing), std::lround(p.y / cfg.grid_spacing)});
        CHECK(p.x == std::round(p.x / cfg.grid_spacing) * cfg.grid_spacing);
        CHECK(p.y == std::round(p.y / cfg.grid_spacing) * cfg.grid_spacing);
    }
    CHECK(got == want);
}

TEST_CASE("disk density approaches one point per spacing^2") {
    SceneConfig cfg;
    cfg.disk_radius = 20.0;
    cfg.grid_spacing = 0.02;
    const PointCloud disk = slr::generate_ground_disk(cfg);
    const double expected = slr::kPi * cfg.disk_radius * cfg.disk_radius /
                            (cfg.grid_spacing * cfg.grid_spacing);
    CHECK(std::abs(static_cast<double>(disk.size()) - expected) <= 0.01 * expected);
    for (const auto& p : disk.points) {
        CHECK(p.x * p.x + p.y * p.y <= cfg.disk_radius * cfg.disk_radius);
    }
}

TEST_CASE("disk boundary is inclusive and the lattice is origin anchored") {
    SceneConfig cfg;
    cfg.disk_radius = 1.0;
    cfg.grid_spacing = 0.25;
    const PointCloud disk = slr::generate_ground_disk(cfg);
    // (1, 0) sits exactly on the boundary: 4 * 0.25 = 1
    const bool has_boundary = std::any_of(disk.points.begin(), disk.points.end(),
                                          [](const auto& p) { return p.x == 1.0 && p.y == 0.0; });
    CHECK(has_boundary);
    const bool has_origin = std::any_of(disk.points.begin(), disk.points.end(),
                                        [](const auto& p) { return p.x == 0.0 && p.y == 0.0; });
    CHECK(has_origin);
}

TEST_CASE("a 1x1 rectangle at 5 mm spacing carries about 40000 points") {
    SceneConfig cfg;
    cfg.grid_spacing = 0.005;
    cfg.n_rectangles = 1;
    cfg.rect_size_min = 1.0;
    cfg.rect_size_max = 1.0;
    cfg.seed = 3;
    const PointCloud rect = slr::generate_rectangles(cfg);
    // the lattice includes both boundary rows: 200 or 201 samples per side
    CHECK(rect.size() >= 200 * 200);
    CHECK(rect.size() <= 201 * 201);
    for (const auto& p : rect.points) CHECK(p.label == Label::non_ground);
}

TEST_CASE("rectangles are planar, centered and rigidly posed") {
    SceneConfig cfg;
    cfg.grid_spacing = 0.05;
    cfg.n_rectangles = 4;
    cfg.rect_size_min = 0.8;
    cfg.rect_size_max = 2.0;
    cfg.seed = 11;

    // rigid motion preserves pairwise distances: spacing between lattice
    // neighbors survives rotation, so the min pairwise distance within one
    // rectangle is the grid spacing
    SceneConfig single = cfg;
    single.n_rectangles = 1;
    const PointCloud first = slr::generate_rectangles(single);
    REQUIRE(first.size() >= 2);
    double min_d2 = 1e300;
    const std::size_t probe = std::min<std::size_t>(first.size(), 400);
    for (std::size_t i = 0; i < probe; ++i) {
        for (std::size_t j = i + 1; j < probe; ++j) {
            const auto d = first.points[i].pos() - first.points[j].pos();
            min_d2 = std::min(min_d2, d.squared_norm());
        }
    }
    CHECK(std::sqrt(min_d2) == doctest::Approx(cfg.grid_spacing).epsilon(1e-9));

    // planarity: all points satisfy one plane equation normal . (p - p0) = 0
    const auto p0 = first.points[0].pos();
    const slr::Vec3 e1 = first.points[1].pos() - p0;
    slr::Vec3 normal{0, 0, 0};
    bool found = false;
    for (std::size_t i = 2; i < first.size(); ++i) {
        const slr::Vec3 e2 = first.points[i].pos() - p0;
        const slr::Vec3 n{e1.y * e2.z - e1.z * e2.y, e1.z * e2.x - e1.x * e2.z,
                          e1.x * e2.y - e1.y * e2.x};
        if (n.norm() > 1e-6) {
            normal = n * (1.0 / n.norm());
            found = true;
            break;
        }
    }
    REQUIRE(found);
    for (const auto& q : first.points) {
        CHECK(std::abs((q.pos() - p0).dot(normal)) <= 1e-9);
    }
}

TEST_CASE("prefix stability: rectangle k does not depend on how many follow") {
    SceneConfig cfg;
    cfg.grid_spacing = 0.1;
    cfg.n_rectangles = 3;
    cfg.seed = 21;
    cfg.rect_size_min = 0.5;
    cfg.rect_size_max = 1.5;
    const PointCloud three = slr::generate_rectangles(cfg);
    cfg.n_rectangles = 5;
    const PointCloud five = slr::generate_rectangles(cfg);
    REQUIRE(five.size() > three.size());
    CHECK(std::equal(three.points.begin(), three.points.end(), five.points.begin()));
}

TEST_CASE("same seed, same scene; different seed, different scene") {
    SceneConfig cfg;
    cfg.disk_radius = 2.0;
    cfg.grid_spacing = 0.05;
    cfg.n_rectangles = 6;
    cfg.rect_size_min = 0.3;
    cfg.rect_size_max = 1.0;
    cfg.rect_xy_min = -2.0;
    cfg.rect_xy_max = 2.0;
    cfg.rect_z_min = -1.0;
    cfg.rect_z_max = 1.0;
    cfg.seed = 42;
    const PointCloud a = slr::generate_dense_scene(cfg);
    const PointCloud b = slr::generate_dense_scene(cfg);
    CHECK(a.points == b.points);
    CHECK(a.meta == b.meta);
    cfg.seed = 43;
    const PointCloud c = slr::generate_dense_scene(cfg);
    CHECK(a.points != c.points);
}

TEST_CASE("dense scene with no rectangles is exactly the disk") {
    SceneConfig cfg;
    cfg.disk_radius = 1.5;
    cfg.grid_spacing = 0.05;
    cfg.n_rectangles = 0;
    const PointCloud scene = slr::generate_dense_scene(cfg);
    const PointCloud disk = slr::generate_ground_disk(cfg);
    CHECK(scene.points == disk.points);
    CHECK(scene.meta.at("n_rectangles_surviving") == "0");
}

TEST_CASE("dense scene clipping invariants") {
    SceneConfig cfg;
    cfg.disk_radius = 3.0;
    cfg.grid_spacing = 0.04;
    cfg.ground_z = -1.65;
    cfg.n_rectangles = 12;
    cfg.rect_size_min = 0.4;
    cfg.rect_size_max = 2.0;
    cfg.rect_xy_min = -4.0;
    cfg.rect_xy_max = 4.0;
    cfg.rect_z_min = -3.0;
    cfg.rect_z_max = 2.0;
    cfg.seed = 7;
    const PointCloud scene = slr::generate_dense_scene(cfg);
    const double r2 = cfg.disk_radius * cfg.disk_radius;
    std::size_t n_ground = 0, n_obj = 0;
    for (const auto& p : scene.points) {
        CHECK(p.z >= cfg.ground_z);
        CHECK(p.x * p.x + p.y * p.y <= r2);
        if (p.label == Label::ground) {
            CHECK(p.z == cfg.ground_z);
            ++n_ground;
        } else {
            CHECK(p.label == Label::non_ground);
            ++n_obj;
        }
    }
    CHECK(n_ground == slr::generate_ground_disk(cfg).size());
    CHECK(n_obj > 0);

    const auto j = nlohmann::json::parse(scene.meta.at("scene_config"));
    CHECK(j.get<SceneConfig>().seed == 7);
    const auto surviving = std::stoull(scene.meta.at("n_rectangles_surviving"));
    CHECK(surviving >= 1);
    CHECK(surviving <= cfg.n_rectangles);
}

TEST_CASE("a rectangle fully below ground contributes nothing") {
    SceneConfig cfg;
    cfg.disk_radius = 5.0;
    cfg.grid_spacing = 0.1;
    cfg.ground_z = 0.0;
    cfg.n_rectangles = 1;
    cfg.rect_size_min = 0.5;
    cfg.rect_size_max = 0.5;
    cfg.rect_xy_min = 0.0;
    cfg.rect_xy_max = 0.0;
    cfg.rect_z_min = -10.0;  // center far below, rectangle at most 0.5 wide
    cfg.rect_z_max = -10.0;
    const PointCloud scene = slr::generate_dense_scene(cfg);
    CHECK(scene.count_label(Label::non_ground) == 0);
    CHECK(scene.meta.at("n_rectangles_surviving") == "0");
}

TEST_CASE("scene config validation and json round trip") {
    SceneConfig cfg;
    cfg.disk_radius = 9.0;
    cfg.n_rectangles = 17;
    cfg.square_rectangles = true;
    cfg.seed = 99;
    const nlohmann::json j = cfg;
    const auto back = j.get<SceneConfig>();
    CHECK(back.disk_radius == 9.0);
    CHECK(back.n_rectangles == 17);
    CHECK(back.square_rectangles);
    CHECK(back.seed == 99);

    const auto bad = [](auto mutate) {
        SceneConfig c;
        mutate(c);
        CHECK_THROWS_AS(c.validate(), slr::ConfigError);
    };
    bad([](SceneConfig& c) { c.disk_radius = 0.0; });
    bad([](SceneConfig& c) { c.grid_spacing = -0.1; });
    bad([](SceneConfig& c) { c.rect_size_min = 0.0; });
    bad([](SceneConfig& c) { c.rect_size_max = c.rect_size_min / 2.0; });
    bad([](SceneConfig& c) { c.rect_xy_max = c.rect_xy_min - 1.0; });
    bad([](SceneConfig& c) { c.ground_z = std::nan(""); });
}

TEST_CASE("square rectangles have equal edge extents") {
    SceneConfig cfg;
    cfg.grid_spacing = 0.01;
    cfg.n_rectangles = 5;
    cfg.square_rectangles = true;
    cfg.rect_size_min = 0.5;
    cfg.rect_size_max = 2.0;
    cfg.seed = 13;
    for (std::uint64_t k = 0; k < cfg.n_rectangles; ++k) {
        SceneConfig prefix = cfg;
        prefix.n_rectangles = k + 1;
        SceneConfig shorter = cfg;
        shorter.n_rectangles = k;
        const auto all = slr::generate_rectangles(prefix);
        const auto head = slr::generate_rectangles(shorter);
        const std::size_t n = all.size() - head.size();
        // a square patch sampled on its own lattice has a square point count
        const auto side = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(n))));
        CHECK(side * side == n);
    }
}
