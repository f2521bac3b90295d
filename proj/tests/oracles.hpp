#pragma once

// Slow reference implementations and generators the library is tested
// against. Everything here is written from first principles on purpose; no
// code is shared with the fast paths under test.

#include <cmath>
#include <cstdint>
#include <limits>

#include "toolforge/geometry/point_cloud.hpp"
#include "toolforge/rng.hpp"

namespace oracle {

// Symmetric average-of-means nearest-neighbor distance, straight from the
// definition, O(n*m).
inline double chamfer_brute(const toolforge::PointCloud& a,
                            const toolforge::PointCloud& b) {
    auto directed = [](const toolforge::PointCloud& from,
                       const toolforge::PointCloud& to) {
        double sum = 0.0;
        for (const toolforge::Point3& p : from.points) {
            double best = std::numeric_limits<double>::infinity();
            for (const toolforge::Point3& q : to.points) {
                double dx = p.x - q.x, dy = p.y - q.y, dz = p.z - q.z;
                double d = std::sqrt(dx * dx + dy * dy + dz * dz);
                if (d < best) best = d;
            }
            sum += best;
        }
        return sum / static_cast<double>(from.points.size());
    };
    return 0.5 * directed(a, b) + 0.5 * directed(b, a);
}

inline toolforge::PointCloud random_cloud(toolforge::Rng& rng, std::size_t n,
                                          double lo = -1.0, double hi = 1.0) {
    toolforge::PointCloud c;
    c.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        c.points.push_back(
            {rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi)});
    return c;
}

// Cloud whose coordinates sit on a coarse lattice, so exact duplicate points
// and exact distance ties occur with high probability.
inline toolforge::PointCloud lattice_cloud(toolforge::Rng& rng, std::size_t n,
                                           std::uint64_t cells) {
    toolforge::PointCloud c;
    c.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x = 0.5 * static_cast<double>(rng.uniform_index(cells));
        double y = 0.5 * static_cast<double>(rng.uniform_index(cells));
        double z = 0.5 * static_cast<double>(rng.uniform_index(cells));
        c.points.push_back({x, y, z});
    }
    return c;
}

}  // namespace oracle
