#pragma once

#include <cstdint>
#include <vector>

#include "slr/cloud.hpp"
#include "slr/rng.hpp"
#include "slr/scan.hpp"

// Independent reference implementations the library is checked against.
// These deliberately avoid the library's own code paths: different trig
// formulation, different selection procedure, exact rational arithmetic.
namespace slr_test {

/// Reference hidden-surface removal: convert every point to spherical with
/// atan2-based zenith, sort all candidates by (azimuth bin, zenith bin, R,
/// input index), then keep the first entry of every bin group.
slr::PointCloud reference_scan(const slr::PointCloud& cloud, const slr::Vec3& origin,
                               const slr::ScannerConfig& cfg);

/// O(n*m) exact nearest-neighbor distances.
std::vector<double> brute_force_nn(const slr::PointCloud& query, const slr::PointCloud& target);

/// floor(a / b) evaluated in exact rational arithmetic over the binary
/// values of a and b. Requires a >= 0, b > 0.
long long exact_floor_div(double a, double b);

/// Uniform points in [-extent, extent]^3. When with_duplicates is set, a
/// fraction of points are exact copies of earlier ones (tie-break coverage).
slr::PointCloud random_cloud(slr::Rng& rng, std::size_t n, double extent, bool with_duplicates,
                             bool labeled);

/// Random but valid scanner config: resolutions spanning fine to coarse,
/// sometimes a zenith window, sometimes a max range.
slr::ScannerConfig random_scanner_config(slr::Rng& rng, double extent);

/// Multiset subset test on exact point equality (coordinates and label).
bool is_point_subset(const slr::PointCloud& subset, const slr::PointCloud& superset);

}  // namespace slr_test
