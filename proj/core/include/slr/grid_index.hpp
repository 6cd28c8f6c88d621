#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "slr/cloud.hpp"

namespace slr {

/// Uniform 2D bucket index over the xy plane for exact radius queries.
/// Optionally restricted to one label class at build time. Holds indices into
/// the cloud it was built from; the cloud must outlive the grid.
class PlanarGrid {
public:
    PlanarGrid(const PointCloud& cloud, double bucket_size, std::optional<Label> only = {});

    /// Calls fn(point_index) for every indexed point with horizontal distance
    /// <= radius from (x, y).
    template <typename Fn>
    void for_each_in_radius(double x, double y, double radius, Fn&& fn) const {
        if (indices_.empty()) return;
        const double r2 = radius * radius;
        const auto& pts = cloud_->points;
        const long gx_lo = clamp_x(grid_x(x - radius));
        const long gx_hi = clamp_x(grid_x(x + radius));
        const long gy_lo = clamp_y(grid_y(y - radius));
        const long gy_hi = clamp_y(grid_y(y + radius));
        for (long gy = gy_lo; gy <= gy_hi; ++gy) {
            for (long gx = gx_lo; gx <= gx_hi; ++gx) {
                const std::size_t b = static_cast<std::size_t>(gy) * nx_ + static_cast<std::size_t>(gx);
                for (std::uint32_t k = offsets_[b]; k < offsets_[b + 1]; ++k) {
                    const std::uint32_t i = indices_[k];
                    const double dx = pts[i].x - x;
                    const double dy = pts[i].y - y;
                    if (dx * dx + dy * dy <= r2) fn(i);
                }
            }
        }
    }

    std::size_t count_in_radius(double x, double y, double radius) const {
        std::size_t n = 0;
        for_each_in_radius(x, y, radius, [&](std::uint32_t) { ++n; });
        return n;
    }

    struct MeanZ {
        double mean;
        std::size_t count;
    };

    /// Mean z of indexed points within radius; nullopt when none qualify.
    std::optional<MeanZ> mean_z_in_radius(double x, double y, double radius) const;

    std::size_t indexed_points() const { return indices_.size(); }

private:
    long grid_x(double x) const { return static_cast<long>(std::floor((x - x0_) / bucket_)); }
    long grid_y(double y) const { return static_cast<long>(std::floor((y - y0_) / bucket_)); }
    long clamp_x(long g) const { return g < 0 ? 0 : (g >= static_cast<long>(nx_) ? static_cast<long>(nx_) - 1 : g); }
    long clamp_y(long g) const { return g < 0 ? 0 : (g >= static_cast<long>(ny_) ? static_cast<long>(ny_) - 1 : g); }

    const PointCloud* cloud_ = nullptr;
    double bucket_ = 1.0;
    double x0_ = 0.0, y0_ = 0.0;
    std::size_t nx_ = 0, ny_ = 0;
    std::vector<std::uint32_t> offsets_;
    std::vector<std::uint32_t> indices_;
};

}  // namespace slr
