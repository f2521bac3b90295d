#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "../causal/discovery.hpp"
#include "../errors.hpp"
#include "../geometry/kd_tree.hpp"
#include "../geometry/point_cloud.hpp"
#include "../shape/edits.hpp"
#include "../shape/families.hpp"
#include "morph.hpp"

namespace toolforge {

struct FeatureCheck {
    double value = 0.0;  // scale units, same as the working range
    ScaleRange range;
    bool in_range = false;
    std::string reason;
};

struct Verdict {
    bool suitable = false;
    std::map<std::string, FeatureCheck> per_feature;
    std::string explanation;
};

namespace classify_detail {

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace classify_detail

// Range check per causal feature. Geometric scales come from the match;
// physical quantities (mass, balance) cannot be read off a cloud and must
// arrive as external measurements in feature-value units, which are converted
// to scales against the matched tool's nominal dimensions. Causal features
// with a range but no value from either source are skipped, which is what
// feature-ablation evaluation relies on.
inline Verdict classify_target(const MatchResult& match, const CausalReport& report,
                               const std::map<std::string, double>& external = {}) {
    for (const auto& kv : match.assignment)
        if (report.working_ranges.find(kv.first) == report.working_ranges.end())
            throw MissingRange(kv.first);

    const FamilyDef& def = find_family(match.matched_tool.family);
    Verdict verdict;
    verdict.suitable = true;
    std::vector<std::string> failures;

    for (const auto& [feature, range] : report.working_ranges) {
        const FeatureSpec& spec = find_feature(def, feature);
        double scale = 0.0;
        bool have = false;
        auto it = match.assignment.find(feature);
        if (it != match.assignment.end()) {
            scale = it->second;
            have = true;
        } else if (spec.physical) {
            auto ext = external.find(feature);
            if (ext == external.end()) throw MissingPhysicalMeasurement(feature);
            if (spec.multiplicative) {
                double nominal = match.matched_tool.nominal_dimensions.at(feature);
                scale = ext->second / nominal;
            } else {
                scale = ext->second;
            }
            have = true;
        }
        if (!have) continue;

        FeatureCheck check;
        check.value = scale;
        check.range = range;
        check.in_range = scale >= range.lo && scale <= range.hi;
        std::string where = check.in_range ? "within"
                            : scale < range.lo ? "below"
                                               : "above";
        check.reason = feature + " = " + classify_detail::fmt(scale) + " " + where +
                       " working range [" + classify_detail::fmt(range.lo) + ", " +
                       classify_detail::fmt(range.hi) + "]";
        if (!check.in_range) {
            verdict.suitable = false;
            failures.push_back(check.reason);
        }
        verdict.per_feature[feature] = std::move(check);
    }

    if (verdict.suitable) {
        verdict.explanation = "suitable: " + std::to_string(verdict.per_feature.size()) +
                              " checked feature(s) within working ranges";
    } else {
        verdict.explanation = "unsuitable: ";
        for (std::size_t i = 0; i < failures.size(); ++i) {
            if (i) verdict.explanation += "; ";
            verdict.explanation += failures[i];
        }
    }
    return verdict;
}

struct KeypointTransfer {
    std::string name;
    Point3 point;            // a member of the target cloud
    double nn_distance = 0;  // gap between keypoint and that member
};

// Snaps each keypoint of the matched tool to its nearest target point. The
// caller is responsible for having target and tool in one frame.
inline std::vector<KeypointTransfer> transfer_keypoints(const ToolModel& matched_tool,
                                                        const PointCloud& target) {
    if (matched_tool.keypoints.empty()) throw NoKeypoints(matched_tool.family);
    if (target.empty()) throw EmptyCloud("keypoint transfer target");
    std::vector<KeypointTransfer> out;
    for (const auto& [name, position] : keypoint_positions(matched_tool)) {
        NearestNeighbor nn = nearest_point(position, target);
        out.push_back({name, nn.point, nn.dist});
    }
    return out;
}

struct BoundaryComparison {
    std::string feature;
    PointCloud target_cloud;
    PointCloud lo_cloud;
    PointCloud hi_cloud;
    bool numeric_judgment = false;
};

// Record for range judgment by inspection: the target cloud flanked by
// clouds of the source edited to the working-range endpoints, plus the
// numeric verdict for the same feature so an external judge can disagree.
inline BoundaryComparison boundary_comparison(const PointCloud& target,
                                              const CausalReport& report,
                                              const ToolModel& source,
                                              const std::string& feature,
                                              const MatchResult& match,
                                              std::size_t cloud_n = 1024,
                                              std::uint64_t seed = 0) {
    auto range_it = report.working_ranges.find(feature);
    if (range_it == report.working_ranges.end()) throw MissingRange(feature);
    auto value_it = match.assignment.find(feature);
    if (value_it == match.assignment.end()) throw MissingPhysicalMeasurement(feature);
    if (target.empty()) throw EmptyCloud("boundary comparison target");
    if (cloud_n == 0) throw ConfigError("boundary comparison needs a nonzero cloud size");

    auto [lo_tool, hi_tool] = boundary_tools(source, feature, range_it->second);
    BoundaryComparison cmp;
    cmp.feature = feature;
    cmp.target_cloud = target;
    cmp.lo_cloud = tool_to_cloud(lo_tool, cloud_n, seed);
    cmp.hi_cloud = tool_to_cloud(hi_tool, cloud_n, seed);
    cmp.numeric_judgment = value_it->second >= range_it->second.lo &&
                           value_it->second <= range_it->second.hi;
    return cmp;
}

namespace classify_detail {

struct Panel {
    const PointCloud* cloud;
    unsigned char r, g, b;
};

}  // namespace classify_detail

// Flat orthographic projection (x right, y up, z ignored) of the three
// clouds side by side: low boundary, target, high boundary. Binary PPM.
inline void render_boundary_ppm(const BoundaryComparison& cmp, std::ostream& os) {
    constexpr int kPanel = 320;
    constexpr int kHeight = 320;
    constexpr int kWidth = 3 * kPanel;
    std::vector<unsigned char> pixels(static_cast<std::size_t>(kWidth) * kHeight * 3, 16);

    const classify_detail::Panel panels[3] = {
        {&cmp.lo_cloud, 235, 120, 80},
        {&cmp.target_cloud, 235, 235, 235},
        {&cmp.hi_cloud, 90, 150, 235},
    };

    // One shared scale so relative sizes stay comparable across panels.
    double lo_x = 0.0, hi_x = 0.0, lo_y = 0.0, hi_y = 0.0;
    bool first = true;
    for (const auto& panel : panels) {
        for (const Point3& p : panel.cloud->points) {
            if (first) {
                lo_x = hi_x = p.x;
                lo_y = hi_y = p.y;
                first = false;
            }
            lo_x = std::min(lo_x, p.x);
            hi_x = std::max(hi_x, p.x);
            lo_y = std::min(lo_y, p.y);
            hi_y = std::max(hi_y, p.y);
        }
    }
    double span = std::max(hi_x - lo_x, hi_y - lo_y);
    if (!(span > 0.0)) span = 1.0;
    double scale = 0.9 * kPanel / span;
    double cx = 0.5 * (lo_x + hi_x);
    double cy = 0.5 * (lo_y + hi_y);

    for (int pi = 0; pi < 3; ++pi) {
        const auto& panel = panels[pi];
        for (const Point3& p : panel.cloud->points) {
            int px = pi * kPanel + kPanel / 2 + static_cast<int>((p.x - cx) * scale);
            int py = kHeight / 2 - static_cast<int>((p.y - cy) * scale);
            for (int dy = 0; dy < 2; ++dy) {
                for (int dx = 0; dx < 2; ++dx) {
                    int x = px + dx, y = py + dy;
                    if (x < pi * kPanel || x >= (pi + 1) * kPanel || y < 0 || y >= kHeight)
                        continue;
                    std::size_t at = 3 * (static_cast<std::size_t>(y) * kWidth + x);
                    pixels[at] = panel.r;
                    pixels[at + 1] = panel.g;
                    pixels[at + 2] = panel.b;
                }
            }
        }
    }

    os << "P6\n" << kWidth << ' ' << kHeight << "\n255\n";
    os.write(reinterpret_cast<const char*>(pixels.data()),
             static_cast<std::streamsize>(pixels.size()));
}

}  // namespace toolforge
