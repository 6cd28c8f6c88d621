#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "slr/cloud.hpp"
#include "slr/scan.hpp"

namespace slr {

/// Radial bin edges sized like the footprint of one vertical pulse step of an
/// ideal scanner at `scanner_height` above a flat ground plane. Edge k sits
/// where the pulse k * theta_res below the horizon meets the plane, so bin
/// widths grow with distance.
struct PulseBinEdges {
    std::vector<double> edges;  ///< strictly ascending, meters
    double scanner_height = 1.65;
    double theta_res = 0.144;

    std::size_t bin_count() const { return edges.size() < 2 ? 0 : edges.size() - 1; }
};

enum class ClassFilter { all, ground, non_ground };

const char* class_filter_name(ClassFilter f);
ClassFilter parse_class_filter(const std::string& name);

struct DistanceHistogram {
    PulseBinEdges edges;
    std::vector<std::uint64_t> counts;      ///< raw per-bin counts, kept for pooling
    std::vector<double> probabilities;      ///< counts normalized over in-range points
    ClassFilter class_filter = ClassFilter::all;
    double scanner_height = 1.65;
};

/// Edges h/sin(k*theta_res) for k = floor(90/theta_res) down to 1, ascending,
/// dropped beyond max_distance. Throws ConfigError on non-positive inputs.
PulseBinEdges pulse_sized_bins(double scanner_height, double theta_res, double max_distance);

/// Distances from `origin` of the points matching `filter`, binned by
/// [edge_j, edge_j+1). Out-of-range points are excluded from normalization.
/// `horizontal` switches from radial (3D) to horizontal (xy) distance.
/// Throws NoPointsInRangeError when nothing lands in a bin range,
/// ConfigError on fewer than two edges.
DistanceHistogram distance_histogram(const PointCloud& cloud, const Vec3& origin,
                                     const PulseBinEdges& edges, ClassFilter filter,
                                     bool horizontal = false);

/// Binning parameters reapplied at each height of a sweep.
struct HistogramBinParams {
    double theta_res = 0.144;
    double max_distance = 120.0;
};

struct HeightSweepEntry {
    double height = 0.0;
    Vec3 origin{0.0, 0.0, 0.0};
    DistanceHistogram ground;
    DistanceHistogram non_ground;
};

/// For each height: reposition the scanner at (xy, ground + height), scan,
/// and histogram ground and non-ground distances. Ground bins are pulse-sized
/// at the entry's own height (a per-scan diagnostic); non-ground bins are
/// shared across all entries, pulse-sized at the base config's scanner height,
/// so the distributions of different heights are directly comparable.
std::vector<HeightSweepEntry> height_sweep(const PointCloud& cloud, Vec2 xy,
                                           const std::vector<double>& heights,
                                           const ScannerConfig& cfg,
                                           const HistogramBinParams& bins,
                                           double origin_ground_radius = 3.0,
                                           unsigned workers = 1);

struct GroundFraction {
    double fraction = 0.0;
    /// Set when the cloud carries no ground/non-ground labels at all.
    bool unlabeled_warning = false;
};

/// Ground-labeled count over total count. Throws EmptyCloudError.
GroundFraction ground_fraction(const PointCloud& cloud);

/// Sum raw counts across histograms with identical edges and filter, then
/// renormalize. Throws EmptyInputError / ConfigError on mismatched parts.
DistanceHistogram pool_histograms(const std::vector<DistanceHistogram>& parts);

/// Total variation distance between the two distributions, compared as
/// piecewise-constant densities over the union of both edge sets (so
/// histograms with different binning remain comparable). In [0, 1].
double total_variation(const DistanceHistogram& a, const DistanceHistogram& b);

/// CSV with header bin_low,bin_high,probability,class,height; one row per
/// bin per histogram. Throws IoError.
void write_histogram_csv(const std::vector<DistanceHistogram>& hists, const std::string& path);

}  // namespace slr
