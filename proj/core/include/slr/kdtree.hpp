#pragma once

#include <cstdint>
#include <vector>

#include "slr/cloud.hpp"

namespace slr {

/// Exact nearest-neighbor search over a fixed set of 3D points.
/// Median-split k-d tree; no approximation, queries return the true minimum
/// distance (similarity thresholding must not depend on search recall).
class KdTree {
public:
    explicit KdTree(const std::vector<LabeledPoint>& points);

    bool empty() const { return pts_.empty(); }
    std::size_t size() const { return pts_.size(); }

    /// True minimum Euclidean distance from q to the indexed set.
    double nearest_distance(const Vec3& q) const;

private:
    struct Node {
        double split = 0.0;
        std::uint32_t axis = 0;
        std::uint32_t left = kNone;
        std::uint32_t right = kNone;
        std::uint32_t begin = 0;
        std::uint32_t end = 0;
    };
    static constexpr std::uint32_t kNone = 0xffffffffu;
    static constexpr std::uint32_t kLeafSize = 16;

    std::uint32_t build(std::uint32_t begin, std::uint32_t end);
    void search(std::uint32_t node, const Vec3& q, double& best_sq) const;

    std::vector<Vec3> pts_;
    std::vector<Node> nodes_;
    std::uint32_t root_ = kNone;
};

}  // namespace slr
