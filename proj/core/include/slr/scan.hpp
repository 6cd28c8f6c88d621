#pragma once

#include <cstdint>
#include <optional>

#include <nlohmann/json.hpp>

#include "slr/cloud.hpp"
#include "slr/geometry.hpp"

namespace slr {

/// Angular sampling of the simulated scanner. Angles in degrees.
/// zenith_min is inclusive, zenith_max exclusive, so adjacent bands partition
/// cleanly. max_range absent means unlimited.
struct ScannerConfig {
    double theta_res = 0.144;   ///< vertical (zenith) resolution
    double phi_res = 0.144;     ///< horizontal (azimuth) resolution
    double zenith_min = 0.0;
    double zenith_max = 180.0;
    std::optional<double> max_range;
    double scanner_height = 1.65;

    /// Throws ConfigError if any invariant is violated.
    void validate() const;
};

void to_json(nlohmann::json& j, const ScannerConfig& cfg);
void from_json(const nlohmann::json& j, ScannerConfig& cfg);

/// (R, v, h) with v = floor(theta / theta_res), h = floor(phi / phi_res).
struct BinnedCoordinate {
    double R = 0.0;
    std::uint32_t v = 0;
    std::uint32_t h = 0;
};

BinnedCoordinate bin_coordinates(const SphericalPoint& s, const ScannerConfig& cfg);

/// Hidden-surface removal: keep the nearest input point per (v, h) pulse bin
/// as seen from `origin`, discarding the rest. Points at zero radius, beyond
/// max_range, or outside [zenith_min, zenith_max) are dropped before binning.
/// Ties in R resolve to the first point in input order. Output is ordered by
/// ascending (h, v) and is always a subset of the input points.
///
/// With workers > 1 the input is partitioned and per-worker bin maps are
/// merged; the result is bit-identical to the sequential run.
PointCloud simulate_scan(const PointCloud& cloud, const Vec3& origin, const ScannerConfig& cfg,
                         unsigned workers = 1);

/// Scanner origin above the local ground: (xy, mean z of ground points within
/// ground_radius of xy + cfg.scanner_height). Throws NoGroundNearbyError when
/// no ground point qualifies.
Vec3 compute_scanner_origin(const PointCloud& cloud, double x, double y, const ScannerConfig& cfg,
                            double ground_radius = 3.0);

/// The repositioning step: place the scanner at xy on the local ground plane
/// and simulate a scan. Output meta records the origin and the config used.
PointCloud slr(const PointCloud& cloud, double x, double y, const ScannerConfig& cfg,
               double ground_radius = 3.0, unsigned workers = 1);

}  // namespace slr
