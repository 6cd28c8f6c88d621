#include "slr/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace slr {
namespace {

double axis_coord(const Vec3& p, std::uint32_t axis) {
    switch (axis) {
        case 0: return p.x;
        case 1: return p.y;
        default: return p.z;
    }
}

}  // namespace

KdTree::KdTree(const std::vector<LabeledPoint>& points) {
    pts_.reserve(points.size());
    for (const auto& p : points) pts_.push_back(p.pos());
    if (!pts_.empty()) {
        nodes_.reserve(2 * pts_.size() / kLeafSize + 2);
        root_ = build(0, static_cast<std::uint32_t>(pts_.size()));
    }
}

std::uint32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
    const std::uint32_t id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(Node{});
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    if (end - begin <= kLeafSize) return id;

    Vec3 lo = pts_[begin];
    Vec3 hi = pts_[begin];
    for (std::uint32_t i = begin + 1; i < end; ++i) {
        const Vec3& p = pts_[i];
        lo.x = std::min(lo.x, p.x);
        lo.y = std::min(lo.y, p.y);
        lo.z = std::min(lo.z, p.z);
        hi.x = std::max(hi.x, p.x);
        hi.y = std::max(hi.y, p.y);
        hi.z = std::max(hi.z, p.z);
    }
    const double ex = hi.x - lo.x;
    const double ey = hi.y - lo.y;
    const double ez = hi.z - lo.z;
    std::uint32_t axis = 0;
    double extent = ex;
    if (ey > extent) { axis = 1; extent = ey; }
    if (ez > extent) { axis = 2; extent = ez; }
    if (extent == 0.0) return id;  // all points coincident, keep as a leaf

    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(pts_.begin() + begin, pts_.begin() + mid, pts_.begin() + end,
                     [axis](const Vec3& a, const Vec3& b) {
                         return axis_coord(a, axis) < axis_coord(b, axis);
                     });
    const double split = axis_coord(pts_[mid], axis);

    const std::uint32_t left = build(begin, mid);
    const std::uint32_t right = build(mid, end);
    nodes_[id].axis = axis;
    nodes_[id].split = split;
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

void KdTree::search(std::uint32_t node, const Vec3& q, double& best_sq) const {
    const Node& n = nodes_[node];
    if (n.left == kNone) {
        for (std::uint32_t i = n.begin; i < n.end; ++i) {
            const double dx = pts_[i].x - q.x;
            const double dy = pts_[i].y - q.y;
            const double dz = pts_[i].z - q.z;
            const double d = dx * dx + dy * dy + dz * dz;
            if (d < best_sq) best_sq = d;
        }
        return;
    }
    const double delta = axis_coord(q, n.axis) - n.split;
    const std::uint32_t near = delta < 0.0 ? n.left : n.right;
    const std::uint32_t far = delta < 0.0 ? n.right : n.left;
    search(near, q, best_sq);
    if (delta * delta < best_sq) search(far, q, best_sq);
}

double KdTree::nearest_distance(const Vec3& q) const {
    double best_sq = std::numeric_limits<double>::infinity();
    if (root_ != kNone) search(root_, q, best_sq);
    return std::sqrt(best_sq);
}

}  // namespace slr
