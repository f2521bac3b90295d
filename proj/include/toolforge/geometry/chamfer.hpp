#pragma once

#include "../errors.hpp"
#include "kd_tree.hpp"
#include "point.hpp"
#include "point_cloud.hpp"

namespace toolforge {

// Symmetric cloud-to-cloud distance:
//
//   0.5/|A| * sum_{a in A} |a - nn(a, B)|  +  0.5/|B| * sum_{b in B} |b - nn(b, A)|
//
// Each direction averages unsquared Euclidean nearest-neighbor distances, so
// the value is in meters and robust to unequal cloud sizes. It is symmetric
// and zero on identical clouds but satisfies no triangle inequality; treat it
// as a residual, not a metric. Both directed sums run in ascending point
// order, which pins the floating-point result regardless of thread count.
inline double chamfer_distance(const PointCloud& a, const PointCloud& b) {
    if (a.empty()) throw EmptyCloud("chamfer_distance, first cloud");
    if (b.empty()) throw EmptyCloud("chamfer_distance, second cloud");

    auto directed_mean = [](const PointCloud& from, const PointCloud& to) {
        double sum = 0.0;
        if (to.size() <= 32) {
            for (const Point3& p : from.points)
                sum += nearest_point_linear(to, p).dist;
        } else {
            KdTree tree(to);
            for (const Point3& p : from.points) sum += tree.nearest(p).dist;
        }
        return sum / static_cast<double>(from.size());
    };

    return 0.5 * directed_mean(a, b) + 0.5 * directed_mean(b, a);
}

// Same value as chamfer_distance(a, b) with b's index prebuilt; use when many
// clouds are compared against one fixed cloud. Bit-equal to the two-argument
// form because tree and linear nearest-neighbor return identical distances
// and both directed sums keep ascending point order.
inline double chamfer_distance(const PointCloud& a, const PointCloud& b,
                               const KdTree& b_tree) {
    if (a.empty()) throw EmptyCloud("chamfer_distance, first cloud");
    if (b.empty()) throw EmptyCloud("chamfer_distance, second cloud");

    double sum_ab = 0.0;
    for (const Point3& p : a.points) sum_ab += b_tree.nearest(p).dist;
    double mean_ab = sum_ab / static_cast<double>(a.size());

    double sum_ba = 0.0;
    if (a.size() <= 32) {
        for (const Point3& p : b.points) sum_ba += nearest_point_linear(a, p).dist;
    } else {
        KdTree a_tree(a);
        for (const Point3& p : b.points) sum_ba += a_tree.nearest(p).dist;
    }
    double mean_ba = sum_ba / static_cast<double>(b.size());

    return 0.5 * mean_ab + 0.5 * mean_ba;
}

}  // namespace toolforge
