#include "slr/validation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <thread>

#include "slr/errors.hpp"
#include "slr/kdtree.hpp"

namespace slr {
namespace {

// Sampling the default selection thresholds were calibrated for: a 5 mm
// lattice and a 5 m ground neighborhood.
constexpr double kReferenceSpacing = 0.005;
constexpr double kReferenceRadius = 5.0;

void run_chunked(std::size_t n, unsigned workers, const std::function<void(std::size_t, std::size_t)>& fn) {
    if (workers <= 1 || n < 2048) {
        fn(0, n);
        return;
    }
    const unsigned w = static_cast<unsigned>(std::min<std::size_t>(workers, (n + 2047) / 2048));
    std::vector<std::thread> threads;
    threads.reserve(w);
    const std::size_t chunk = (n + w - 1) / w;
    for (unsigned t = 0; t < w; ++t) {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        threads.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& t : threads) t.join();
}

}  // namespace

std::vector<double> nearest_neighbor_distances(const PointCloud& query, const PointCloud& target,
                                               unsigned workers) {
    if (target.empty()) throw EmptyTargetError();
    std::vector<double> out(query.size());
    if (query.empty()) return out;
    const KdTree tree(target.points);
    run_chunked(query.size(), workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            out[i] = tree.nearest_distance(query.points[i].pos());
        }
    });
    return out;
}

double similarity(const PointCloud& secondary, const PointCloud& slr_cloud, double threshold,
                  unsigned workers) {
    if (secondary.empty()) throw EmptyCloudError("secondary cloud is empty");
    if (slr_cloud.empty()) throw EmptyCloudError("repositioned cloud is empty");
    const std::vector<double> dists = nearest_neighbor_distances(secondary, slr_cloud, workers);
    std::size_t hits = 0;
    for (double d : dists) {
        if (d < threshold) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(dists.size());
}

ExperimentResult run_experiment(const SceneConfig& scene_cfg, const ScannerConfig& primary_cfg,
                                const ScannerConfig& secondary_cfg, std::size_t n_positions,
                                std::uint64_t seed, const ExperimentOptions& opts,
                                unsigned workers) {
    primary_cfg.validate();
    secondary_cfg.validate();
    if (!(primary_cfg.theta_res < secondary_cfg.theta_res &&
          primary_cfg.phi_res < secondary_cfg.phi_res)) {
        throw ConfigError("primary angular resolution must be strictly finer than secondary");
    }
    if (opts.similarity_threshold <= 0.0) {
        throw ConfigError("similarity_threshold must be positive");
    }

    ExperimentResult res;
    const PointCloud dense = generate_dense_scene(scene_cfg);
    res.dense_points = dense.size();

    // The primary scanner sits at the scene center at z = 0; ground_z below 0
    // gives it a positive height above ground.
    const Vec3 primary_origin{0.0, 0.0, 0.0};
    const PointCloud primary = simulate_scan(dense, primary_origin, primary_cfg, workers);
    res.primary_points = primary.size();

    SelectionConfig sel_cfg = opts.selection;
    double scale = 1.0;
    if (opts.auto_scale_min_count) {
        const double density_ratio = kReferenceSpacing / scene_cfg.grid_spacing;
        const double radius_ratio = sel_cfg.ground_radius / kReferenceRadius;
        scale = density_ratio * density_ratio * radius_ratio * radius_ratio;
        const double scaled = static_cast<double>(sel_cfg.min_ground_count) * scale;
        sel_cfg.min_ground_count = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(scaled)));
    }
    {
        std::ostringstream ss;
        ss.precision(17);
        ss << scale;
        res.meta["min_count_scale_factor"] = ss.str();
        res.meta["min_ground_count_effective"] = std::to_string(sel_cfg.min_ground_count);
    }
    if (auto it = dense.meta.find("n_rectangles_surviving"); it != dense.meta.end()) {
        res.meta["n_rectangles_surviving"] = it->second;
    }

    res.selection = run_selection(primary, sel_cfg, opts.min_profile, n_positions, seed, workers);
    const std::vector<Vec2>& positions = res.selection.positions;

    res.records.resize(positions.size());
    std::atomic<std::size_t> next{0};
    const auto worker_fn = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= positions.size()) return;
            const Vec2 p = positions[i];
            const Vec3 origin = compute_scanner_origin(primary, p.x, p.y, secondary_cfg,
                                                       sel_cfg.origin_ground_radius);
            const PointCloud secondary = simulate_scan(dense, origin, secondary_cfg);
            const PointCloud repositioned = simulate_scan(primary, origin, secondary_cfg);
            SimilarityRecord rec;
            rec.secondary_xy = p;
            rec.scanner_distance = std::hypot(p.x - primary_origin.x, p.y - primary_origin.y);
            rec.similarity = similarity(secondary, repositioned, opts.similarity_threshold);
            rec.n_rectangles = scene_cfg.n_rectangles;
            rec.primary_theta_res = primary_cfg.theta_res;
            res.records[i] = rec;
        }
    };
    if (workers <= 1 || positions.size() < 2) {
        worker_fn();
    } else {
        std::vector<std::thread> threads;
        const unsigned w = static_cast<unsigned>(std::min<std::size_t>(workers, positions.size()));
        threads.reserve(w);
        for (unsigned t = 0; t < w; ++t) threads.emplace_back(worker_fn);
        for (auto& t : threads) t.join();
    }
    return res;
}

void write_similarity_csv(const std::vector<SimilarityRecord>& records, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError("cannot write " + path);
    std::fputs("secondary_x,secondary_y,scanner_distance,similarity,n_rectangles,primary_theta_res\n", f);
    for (const auto& r : records) {
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%llu,%.17g\n", r.secondary_xy.x, r.secondary_xy.y,
                     r.scanner_distance, r.similarity,
                     static_cast<unsigned long long>(r.n_rectangles), r.primary_theta_res);
    }
    if (std::fclose(f) != 0) throw IoError("error writing " + path);
}

void to_json(nlohmann::json& j, const ExperimentConfig& cfg) {
    j = nlohmann::json{{"scene", cfg.scene},
                       {"primary", cfg.primary},
                       {"secondary", cfg.secondary},
                       {"n_positions", cfg.n_positions},
                       {"seed", cfg.seed},
                       {"similarity_threshold", cfg.options.similarity_threshold},
                       {"selection", cfg.options.selection},
                       {"auto_scale_min_count", cfg.options.auto_scale_min_count}};
    if (!cfg.options.min_profile.all_zero()) j["min_profile"] = cfg.options.min_profile;
}

void from_json(const nlohmann::json& j, ExperimentConfig& cfg) {
    j.at("scene").get_to(cfg.scene);
    j.at("primary").get_to(cfg.primary);
    j.at("secondary").get_to(cfg.secondary);
    cfg.n_positions = j.value("n_positions", std::uint64_t{30});
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.options.similarity_threshold = j.value("similarity_threshold", 0.10);
    if (j.contains("selection")) j.at("selection").get_to(cfg.options.selection);
    if (j.contains("min_profile")) j.at("min_profile").get_to(cfg.options.min_profile);
    cfg.options.auto_scale_min_count = j.value("auto_scale_min_count", true);
}

}  // namespace slr
