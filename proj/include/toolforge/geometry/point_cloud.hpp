#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "../errors.hpp"
#include "point.hpp"

namespace toolforge {

// An unordered set of sampled surface points. part_labels, when non-empty,
// runs parallel to points and names the solid each point was drawn from.
struct PointCloud {
    std::vector<Point3> points;
    std::vector<std::string> part_labels;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    bool has_labels() const { return !part_labels.empty(); }

    Point3 centroid() const {
        if (points.empty()) throw EmptyCloud("centroid");
        Point3 sum{};
        for (const Point3& p : points) sum += p;
        return (1.0 / static_cast<double>(points.size())) * sum;
    }

    PointCloud translated(Point3 t) const {
        PointCloud out;
        out.points.reserve(points.size());
        for (const Point3& p : points) out.points.push_back(p + t);
        out.part_labels = part_labels;
        return out;
    }
};

// Moves `cloud` so its centroid coincides with `target`'s. Translation only;
// rotation registration is deliberately out of scope.
struct AlignResult {
    PointCloud aligned;
    Point3 shift;
};

inline AlignResult centroid_align(const PointCloud& cloud, const PointCloud& target) {
    if (cloud.empty()) throw EmptyCloud("centroid_align input");
    if (target.empty()) throw EmptyCloud("centroid_align target");
    Point3 shift = target.centroid() - cloud.centroid();
    return {cloud.translated(shift), shift};
}

// ---- text I/O --------------------------------------------------------------
// One point per line: "x y z" or "x y z label". '#' starts a comment, blank
// lines are skipped. Values are written with enough decimals that a write/read
// cycle reproduces coordinates to well under 1e-9.

namespace detail {
inline void format_coord(char* buf, std::size_t n, double v) {
    std::snprintf(buf, n, "%.12f", v);
}
}  // namespace detail

inline void write_cloud(std::ostream& os, const PointCloud& cloud) {
    const bool labels = cloud.has_labels();
    char bx[40], by[40], bz[40];
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        const Point3& p = cloud.points[i];
        detail::format_coord(bx, sizeof bx, p.x);
        detail::format_coord(by, sizeof by, p.y);
        detail::format_coord(bz, sizeof bz, p.z);
        os << bx << ' ' << by << ' ' << bz;
        if (labels) os << ' ' << cloud.part_labels[i];
        os << '\n';
    }
}

inline void write_cloud_file(const std::string& path, const PointCloud& cloud) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open for writing: " + path);
    write_cloud(f, cloud);
    if (!f) throw Error("write failed: " + path);
}

inline PointCloud read_cloud(std::istream& is, const std::string& origin = "<stream>") {
    PointCloud cloud;
    std::string line;
    std::size_t lineno = 0;
    bool any_label = false;
    while (std::getline(is, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        double x, y, z;
        if (!(ss >> x)) continue;  // blank or comment-only line
        if (!(ss >> y >> z))
            throw Error(origin + ":" + std::to_string(lineno) +
                        ": expected 'x y z [label]'");
        Point3 p{x, y, z};
        if (!p.finite())
            throw Error(origin + ":" + std::to_string(lineno) +
                        ": non-finite coordinate");
        std::string label;
        if (ss >> label) any_label = true;
        cloud.points.push_back(p);
        cloud.part_labels.push_back(label);
    }
    if (!any_label) cloud.part_labels.clear();
    return cloud;
}

inline PointCloud read_cloud_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open: " + path);
    return read_cloud(f, path);
}

}  // namespace toolforge
