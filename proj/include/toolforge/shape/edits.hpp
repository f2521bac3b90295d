#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "../errors.hpp"
#include "../geometry/point_cloud.hpp"
#include "../rng.hpp"
#include "families.hpp"
#include "surface_sampling.hpp"
#include "tool_model.hpp"

namespace toolforge {

// Sets one feature and rebuilds the tool. Because geometry is a pure function
// of (dimensions, assignment), applying the default value returns a
// bit-identical tool and edit order can never matter for the end state.
inline ToolModel apply_edit(const ToolModel& tool, const std::string& feature,
                            double value) {
    const FamilyDef& def = find_family(tool.family);
    const FeatureSpec& spec = find_feature(def, feature);
    if (!(value >= spec.lo && value <= spec.hi))
        throw ScaleOutOfRange(feature, value, spec.lo, spec.hi);
    std::map<std::string, double> next = tool.feature_assignment;
    next[feature] = value;
    return build_tool(tool.family, tool.nominal_dimensions, next);
}

inline ToolModel apply_edits(
    const ToolModel& tool,
    const std::vector<std::pair<std::string, double>>& assignments) {
    ToolModel out = tool;
    for (const auto& [feature, value] : assignments) out = apply_edit(out, feature, value);
    return out;
}

// Uniform grid over [lo, hi] with exact endpoints.
inline std::vector<double> uniform_grid(double lo, double hi, std::size_t points) {
    std::vector<double> g;
    g.reserve(points);
    if (points == 1) {
        g.push_back(lo);
        return g;
    }
    double step = (hi - lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i)
        g.push_back(i + 1 == points ? hi : lo + step * static_cast<double>(i));
    return g;
}

inline std::vector<double> feature_grid(const FeatureSpec& spec, std::size_t points) {
    return uniform_grid(spec.lo, spec.hi, points);
}

struct InterventionRecord {
    std::string feature;
    double scale;
    ToolModel tool;
};

// One-at-a-time edits: for each feature, one tool per grid value, everything
// else at the source's assignment. Order is (features as given, scales
// ascending as given).
inline std::vector<InterventionRecord> intervention_dataset(
    const ToolModel& source, const std::vector<std::string>& features,
    const std::map<std::string, std::vector<double>>& grid) {
    std::vector<InterventionRecord> out;
    for (const std::string& f : features) {
        auto it = grid.find(f);
        if (it == grid.end()) throw ConfigError("intervention grid missing feature " + f);
        for (double s : it->second) out.push_back({f, s, apply_edit(source, f, s)});
    }
    return out;
}

// Cartesian product of per-feature grids, edits applied in canonical
// alphabetical feature order. The size guard fires before any tool is built.
inline std::vector<ToolModel> combination_grid(
    const ToolModel& source, const std::vector<std::string>& features,
    const std::map<std::string, std::vector<double>>& grid, std::uint64_t max_size) {
    std::vector<std::string> order = features;
    std::sort(order.begin(), order.end());
    order.erase(std::unique(order.begin(), order.end()), order.end());

    std::uint64_t total = 1;
    for (const std::string& f : order) {
        auto it = grid.find(f);
        if (it == grid.end()) throw ConfigError("combination grid missing feature " + f);
        if (it->second.empty()) throw ConfigError("empty grid for feature " + f);
        std::uint64_t k = it->second.size();
        if (total > std::numeric_limits<std::uint64_t>::max() / k)
            throw GridTooLarge(std::numeric_limits<std::uint64_t>::max(), max_size);
        total *= k;
    }
    if (total > max_size) throw GridTooLarge(total, max_size);

    std::vector<ToolModel> out;
    out.reserve(total);
    std::vector<std::size_t> idx(order.size(), 0);
    for (std::uint64_t count = 0; count < total; ++count) {
        std::vector<std::pair<std::string, double>> assignment;
        assignment.reserve(order.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            assignment.emplace_back(order[i], grid.at(order[i])[idx[i]]);
        out.push_back(apply_edits(source, assignment));
        for (std::size_t i = order.size(); i-- > 0;) {
            if (++idx[i] < grid.at(order[i]).size()) break;
            idx[i] = 0;
        }
    }
    return out;
}

// Whole-tool cloud: per-part point budgets proportional to part surface area
// (largest-remainder rounding), each part sampled with a seed derived from
// (seed, part index) so the result is independent of evaluation order.
inline PointCloud tool_to_cloud(const ToolModel& tool, std::size_t n,
                                std::uint64_t seed,
                                const std::optional<ViewSpec>& view = std::nullopt) {
    if (tool.parts.empty()) throw EmptySurface();
    std::vector<double> areas;
    double total_area = 0.0;
    for (const PartSolid& p : tool.parts) {
        double a = surface_area(p.shape);
        areas.push_back(a);
        total_area += a;
    }
    if (!(total_area > 0.0)) throw EmptySurface();

    std::vector<std::size_t> counts(tool.parts.size(), 0);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < areas.size(); ++i) {
        double exact = static_cast<double>(n) * areas[i] / total_area;
        counts[i] = static_cast<std::size_t>(exact);
        assigned += counts[i];
        remainders.emplace_back(exact - static_cast<double>(counts[i]), i);
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t k = 0; assigned < n; ++k, ++assigned)
        ++counts[remainders[k % remainders.size()].second];

    PointCloud cloud;
    cloud.points.reserve(n);
    cloud.part_labels.reserve(n);
    for (std::size_t i = 0; i < tool.parts.size(); ++i) {
        if (counts[i] == 0) continue;
        PointCloud part =
            sample_surface(tool.parts[i], counts[i], derive_seed(seed, "part", i), view);
        cloud.points.insert(cloud.points.end(), part.points.begin(), part.points.end());
        cloud.part_labels.insert(cloud.part_labels.end(), part.part_labels.begin(),
                                 part.part_labels.end());
    }
    return cloud;
}

}  // namespace toolforge
