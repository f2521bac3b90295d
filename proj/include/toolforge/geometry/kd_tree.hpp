#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "../errors.hpp"
#include "point.hpp"
#include "point_cloud.hpp"

namespace toolforge {

struct NearestNeighbor {
    Point3 point;
    std::size_t index = 0;
    double dist = 0.0;
};

// Reference implementation the spatial index is contracted to match,
// including the tie rule: equal distances resolve to the lowest index.
inline NearestNeighbor nearest_point_linear(const PointCloud& cloud, Point3 query) {
    if (cloud.empty()) throw EmptyCloud("nearest_point");
    std::size_t best = 0;
    double best_d2 = distance2(query, cloud.points[0]);
    for (std::size_t i = 1; i < cloud.points.size(); ++i) {
        double d2 = distance2(query, cloud.points[i]);
        if (d2 < best_d2) {
            best_d2 = d2;
            best = i;
        }
    }
    return {cloud.points[best], best, std::sqrt(best_d2)};
}

// Static balanced kd-tree over a cloud. Built once, queried many times.
// Purely an accelerator: results are defined to equal nearest_point_linear
// on every input, so queries update on (d2, index) and subtrees are pruned
// only when strictly farther than the incumbent.
class KdTree {
public:
    explicit KdTree(const PointCloud& cloud) : points_(&cloud.points) {
        if (cloud.empty()) throw EmptyCloud("KdTree");
        index_.resize(points_->size());
        std::iota(index_.begin(), index_.end(), std::size_t{0});
        nodes_.reserve(points_->size() / kLeafSize * 2 + 2);
        root_ = build(0, index_.size());
    }

    NearestNeighbor nearest(Point3 query) const {
        Best best;
        search(root_, query, best);
        return {(*points_)[best.index], best.index, std::sqrt(best.d2)};
    }

private:
    static constexpr std::size_t kLeafSize = 16;
    static constexpr int kLeaf = -1;

    struct Node {
        double split = 0.0;
        int axis = kLeaf;       // kLeaf marks a leaf
        std::size_t begin = 0;  // leaf: range into index_
        std::size_t end = 0;
        int left = -1;          // inner: child node ids
        int right = -1;
    };

    struct Best {
        double d2 = std::numeric_limits<double>::infinity();
        std::size_t index = static_cast<std::size_t>(-1);

        void offer(double d2_new, std::size_t idx) {
            if (d2_new < d2 || (d2_new == d2 && idx < index)) {
                d2 = d2_new;
                index = idx;
            }
        }
    };

    static double coord(Point3 p, int axis) {
        return axis == 0 ? p.x : axis == 1 ? p.y : p.z;
    }

    int build(std::size_t begin, std::size_t end) {
        Node node;
        if (end - begin <= kLeafSize) {
            node.begin = begin;
            node.end = end;
            nodes_.push_back(node);
            return static_cast<int>(nodes_.size() - 1);
        }
        // Split along the widest axis of this range's bounding box.
        Point3 lo = (*points_)[index_[begin]], hi = lo;
        for (std::size_t i = begin + 1; i < end; ++i) {
            const Point3& p = (*points_)[index_[i]];
            lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
            hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
        }
        Point3 extent = hi - lo;
        int axis = 0;
        if (extent.y > coord(extent, axis)) axis = 1;
        if (extent.z > coord(extent, axis)) axis = 2;

        std::size_t mid = begin + (end - begin) / 2;
        std::nth_element(index_.begin() + begin, index_.begin() + mid,
                         index_.begin() + end, [&](std::size_t a, std::size_t b) {
                             double ca = coord((*points_)[a], axis);
                             double cb = coord((*points_)[b], axis);
                             return ca < cb || (ca == cb && a < b);
                         });
        node.axis = axis;
        node.split = coord((*points_)[index_[mid]], axis);
        nodes_.push_back(node);
        int id = static_cast<int>(nodes_.size() - 1);
        int left = build(begin, mid);
        int right = build(mid, end);
        nodes_[id].left = left;
        nodes_[id].right = right;
        return id;
    }

    void search(int node_id, Point3 query, Best& best) const {
        const Node& node = nodes_[node_id];
        if (node.axis == kLeaf) {
            for (std::size_t i = node.begin; i < node.end; ++i) {
                std::size_t idx = index_[i];
                best.offer(distance2(query, (*points_)[idx]), idx);
            }
            return;
        }
        double delta = coord(query, node.axis) - node.split;
        int near = delta < 0.0 ? node.left : node.right;
        int far = delta < 0.0 ? node.right : node.left;
        search(near, query, best);
        // Visit the far side unless strictly farther than the incumbent:
        // an equal-distance point there may carry a lower index.
        if (delta * delta <= best.d2) search(far, query, best);
    }

    const std::vector<Point3>* points_;
    std::vector<std::size_t> index_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

// Nearest point in `cloud` to `query`. Tree-accelerated; identical to the
// linear scan by contract.
inline NearestNeighbor nearest_point(Point3 query, const PointCloud& cloud) {
    if (cloud.empty()) throw EmptyCloud("nearest_point");
    if (cloud.size() <= 32) return nearest_point_linear(cloud, query);
    KdTree tree(cloud);
    return tree.nearest(query);
}

}  // namespace toolforge
