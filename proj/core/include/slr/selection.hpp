#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "slr/cloud.hpp"

namespace slr {

/// One grid cell, covering [x_min, x_min+size) x [y_min, y_min+size).
struct CandidateCell {
    int i = 0;
    int j = 0;
    double x_min = 0.0;
    double y_min = 0.0;
    double size = 2.0;

    double center_x() const { return x_min + size * 0.5; }
    double center_y() const { return y_min + size * 0.5; }

    bool operator==(const CandidateCell& o) const { return i == o.i && j == o.j; }
    bool operator<(const CandidateCell& o) const { return i < o.i || (i == o.i && j < o.j); }
};

/// A 360-entry one-degree azimuth histogram with counts sorted ascending.
/// Rank-ordered rather than direction-ordered: profiles are compared rank by
/// rank, so rotation of the scene does not matter.
struct AzimuthProfile {
    std::array<std::uint64_t, 360> counts{};

    bool is_sorted() const;
    bool all_zero() const;

    /// a dominates b when a.counts[k] >= b.counts[k] for all k.
    bool dominates(const AzimuthProfile& other) const;
};

void to_json(nlohmann::json& j, const AzimuthProfile& p);
void from_json(const nlohmann::json& j, AzimuthProfile& p);

/// Thresholds of the grid-based secondary-position search. Defaults follow
/// the method's reference values; scene sampling density may call for others.
struct SelectionConfig {
    double cell_size = 2.0;
    double ground_radius = 5.0;           ///< radius of the ground-density test
    std::uint64_t min_ground_count = 50000;
    double origin_ground_radius = 3.0;    ///< radius of the ground-height estimate
    double scanner_height = 1.65;         ///< height used for per-cell azimuth profiles
};

void to_json(nlohmann::json& j, const SelectionConfig& cfg);
void from_json(const nlohmann::json& j, SelectionConfig& cfg);

/// Cover the cloud with an axis-aligned grid anchored at its min x/y and keep
/// the cells containing at least one point. Result is sorted by (i, j).
/// Throws EmptyCloudError.
std::vector<CandidateCell> build_grid(const PointCloud& cloud, double cell_size = 2.0);

/// Keep cells with at least min_count ground points within `radius`
/// (horizontal distance) of the cell center.
std::vector<CandidateCell> filter_ground_density(const std::vector<CandidateCell>& cells,
                                                 const PointCloud& cloud, double radius = 5.0,
                                                 std::uint64_t min_count = 50000);

/// Count all points into 360 one-degree azimuth bins about `center`,
/// regardless of elevation, then sort the counts ascending.
AzimuthProfile compute_azimuth_profile(const PointCloud& cloud, const Vec3& center);

/// Element-wise minimum of sorted profiles (itself sorted). Throws
/// EmptyInputError.
AzimuthProfile compute_minimum_profile(const std::vector<AzimuthProfile>& profiles);

/// Keep cells whose sorted azimuth profile dominates min_profile. The profile
/// is taken about the cell center at the ground-estimated scanner height;
/// cells with no ground nearby are removed here. An all-zero min_profile
/// disables the profile comparison but keeps the ground check.
std::vector<CandidateCell> filter_azimuth_profile(const std::vector<CandidateCell>& cells,
                                                  const PointCloud& cloud,
                                                  const AzimuthProfile& min_profile,
                                                  double scanner_height = 1.65,
                                                  double origin_ground_radius = 3.0,
                                                  unsigned workers = 1);

/// Sample n distinct cells uniformly without replacement, then one position
/// uniformly within each. Deterministic for a fixed seed. Throws
/// NotEnoughCellsError when n > |cells|.
std::vector<Vec2> select_positions(const std::vector<CandidateCell>& cells, std::size_t n,
                                   std::uint64_t seed);

struct SelectionReport {
    std::size_t cells_initial = 0;
    std::size_t cells_after_ground = 0;
    std::size_t cells_after_profile = 0;
    std::vector<Vec2> positions;
};

/// The full pipeline: grid, both filters, sampling.
SelectionReport run_selection(const PointCloud& cloud, const SelectionConfig& cfg,
                              const AzimuthProfile& min_profile, std::size_t n,
                              std::uint64_t seed, unsigned workers = 1);

}  // namespace slr
