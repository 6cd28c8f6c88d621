#include "slr/grid_index.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace slr {

PlanarGrid::PlanarGrid(const PointCloud& cloud, double bucket_size, std::optional<Label> only)
    : cloud_(&cloud), bucket_(bucket_size) {
    if (!(bucket_size > 0.0)) throw std::invalid_argument("bucket_size must be positive");
    if (cloud.points.size() > std::numeric_limits<std::uint32_t>::max())
        throw std::length_error("PlanarGrid supports at most 2^32-1 points");

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    std::size_t n_match = 0;
    for (const auto& p : cloud.points) {
        if (only && p.label != *only) continue;
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
        ++n_match;
    }
    if (n_match == 0) return;

    x0_ = xmin;
    y0_ = ymin;
    nx_ = static_cast<std::size_t>(std::floor((xmax - xmin) / bucket_)) + 1;
    ny_ = static_cast<std::size_t>(std::floor((ymax - ymin) / bucket_)) + 1;

    offsets_.assign(nx_ * ny_ + 1, 0);
    for (const auto& p : cloud.points) {
        if (only && p.label != *only) continue;
        const std::size_t b = static_cast<std::size_t>(grid_y(p.y)) * nx_ + static_cast<std::size_t>(grid_x(p.x));
        ++offsets_[b + 1];
    }
    for (std::size_t b = 1; b < offsets_.size(); ++b) offsets_[b] += offsets_[b - 1];

    indices_.resize(n_match);
    std::vector<std::uint32_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (std::uint32_t i = 0; i < cloud.points.size(); ++i) {
        const auto& p = cloud.points[i];
        if (only && p.label != *only) continue;
        const std::size_t b = static_cast<std::size_t>(grid_y(p.y)) * nx_ + static_cast<std::size_t>(grid_x(p.x));
        indices_[cursor[b]++] = i;
    }
}

std::optional<PlanarGrid::MeanZ> PlanarGrid::mean_z_in_radius(double x, double y, double radius) const {
    double sum = 0.0, comp = 0.0;
    std::size_t count = 0;
    const auto& pts = cloud_->points;
    for_each_in_radius(x, y, radius, [&](std::uint32_t i) {
        const double t = pts[i].z - comp;
        const double next = sum + t;
        comp = (next - sum) - t;
        sum = next;
        ++count;
    });
    if (count == 0) return std::nullopt;
    return MeanZ{sum / static_cast<double>(count), count};
}

}  // namespace slr
