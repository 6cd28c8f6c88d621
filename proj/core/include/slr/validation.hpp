#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slr/cloud.hpp"
#include "slr/scan.hpp"
#include "slr/scene.hpp"
#include "slr/selection.hpp"

namespace slr {

/// Exact nearest-neighbor distance from each query point to the target set.
/// Element i corresponds to query point i. Throws EmptyTargetError.
std::vector<double> nearest_neighbor_distances(const PointCloud& query, const PointCloud& target,
                                               unsigned workers = 1);

/// Fraction of points in `secondary` whose nearest neighbor in `slr_cloud`
/// lies strictly below `threshold`. Throws EmptyCloudError when either cloud
/// is empty.
double similarity(const PointCloud& secondary, const PointCloud& slr_cloud,
                  double threshold = 0.10, unsigned workers = 1);

/// One secondary position's outcome in a repositioning experiment.
struct SimilarityRecord {
    Vec2 secondary_xy{0.0, 0.0};
    double scanner_distance = 0.0;  ///< horizontal distance to the primary position
    double similarity = 0.0;
    std::uint64_t n_rectangles = 0;
    double primary_theta_res = 0.0;
};

struct ExperimentOptions {
    double similarity_threshold = 0.10;
    SelectionConfig selection;
    /// All-zero profile disables the occlusion filter (the ground-density
    /// filter still applies).
    AzimuthProfile min_profile;
    /// Rescale min_ground_count by (density * area) relative to the reference
    /// sampling the default thresholds assume; the factor lands in the result
    /// meta.
    bool auto_scale_min_count = true;
};

struct ExperimentResult {
    std::vector<SimilarityRecord> records;
    SelectionReport selection;
    std::size_t dense_points = 0;
    std::size_t primary_points = 0;
    std::map<std::string, std::string> meta;
};

/// End-to-end synthetic validation run: dense scene, primary scan from the
/// scene center at z = 0, position selection on the primary cloud, then for
/// each sampled position a true secondary scan (from the dense cloud) and a
/// repositioned scan (from the primary cloud) at the same origin, compared
/// with `similarity`. Records come back in position order.
/// Requires primary resolutions strictly finer than secondary ones.
ExperimentResult run_experiment(const SceneConfig& scene_cfg, const ScannerConfig& primary_cfg,
                                const ScannerConfig& secondary_cfg, std::size_t n_positions,
                                std::uint64_t seed, const ExperimentOptions& opts = {},
                                unsigned workers = 1);

/// CSV with header secondary_x,secondary_y,scanner_distance,similarity,
/// n_rectangles,primary_theta_res. Throws IoError.
void write_similarity_csv(const std::vector<SimilarityRecord>& records, const std::string& path);

/// Everything run_experiment needs, as one JSON-loadable document.
struct ExperimentConfig {
    SceneConfig scene;
    ScannerConfig primary;
    ScannerConfig secondary;
    std::uint64_t n_positions = 30;
    std::uint64_t seed = 0;
    ExperimentOptions options;
};

void to_json(nlohmann::json& j, const ExperimentConfig& cfg);
void from_json(const nlohmann::json& j, ExperimentConfig& cfg);

}  // namespace slr
