#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "../causal/discovery.hpp"
#include "../errors.hpp"
#include "../geometry/chamfer.hpp"
#include "../geometry/kd_tree.hpp"
#include "../geometry/point_cloud.hpp"
#include "../parallel.hpp"
#include "../shape/edits.hpp"
#include "../shape/families.hpp"

namespace toolforge {

// One line search: every scale tried for a feature during one pass, the
// chamfer value each produced, and the survivor.
struct LineSearch {
    std::size_t pass = 0;
    std::string feature;
    std::vector<double> scales;
    std::vector<double> chamfer;
    double chosen_scale = 0.0;
    double chosen_chamfer = 0.0;
};

struct MatchResult {
    std::map<std::string, double> assignment;
    double residual = 0.0;
    std::vector<LineSearch> trace;
    ToolModel matched_tool;
};

// Reflects the cloud across the plane through `origin` with unit normal
// `normal` and appends the mirrored points. Used to complete single-view
// clouds of symmetric objects before matching; callers opt in explicitly.
inline PointCloud mirror_complete(const PointCloud& cloud, const Point3& origin,
                                  const Point3& normal) {
    if (cloud.empty()) throw EmptyCloud("mirror completion");
    double nn = normal.norm();
    if (!(nn > 0.0) || std::fabs(nn - 1.0) > 1e-9)
        throw ConfigError("mirror plane normal must be a unit vector");
    PointCloud out = cloud;
    out.points.reserve(cloud.size() * 2);
    if (cloud.has_labels()) out.part_labels.reserve(cloud.size() * 2);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Point3& p = cloud.points[i];
        double side = (p - origin).dot(normal);
        out.points.push_back(p - (2.0 * side) * normal);
        if (cloud.has_labels()) out.part_labels.push_back(cloud.part_labels[i]);
    }
    return out;
}

// Coordinate descent over the causal features: each pass sweeps every feature
// in the given order with a fixed uniform line-search grid, keeping the scale
// whose sampled cloud sits closest to the target in chamfer distance. Each
// candidate cloud is centroid-aligned to the target before comparison, and
// every candidate uses the same sampling seed, so the ranking isolates shape.
// Deterministic for fixed inputs regardless of the thread count.
inline MatchResult morph_match(const ToolModel& source,
                               const std::vector<std::string>& causal_features,
                               const PointCloud& target,
                               std::size_t samples_per_feature = 15, std::size_t passes = 2,
                               std::size_t cloud_n = 4096, std::uint64_t seed = 0,
                               const std::optional<ViewSpec>& view = std::nullopt,
                               std::size_t jobs = 1) {
    if (causal_features.empty()) throw NoCausalFeatures();
    if (passes < 1) throw ConfigError("morph needs at least one pass");
    if (samples_per_feature < 3) throw ConfigError("line search needs at least 3 samples");
    if (target.empty()) throw EmptyCloud("morph target");

    const FamilyDef& def = find_family(source.family);
    std::vector<const FeatureSpec*> specs;
    for (const std::string& name : causal_features) {
        const FeatureSpec& spec = find_feature(def, name);
        if (spec.physical)
            throw ConfigError("feature " + name + " is not visible in a point cloud");
        specs.push_back(&spec);
    }

    KdTree target_tree(target);

    MatchResult result;
    result.matched_tool = source;
    double current_residual = 0.0;

    for (std::size_t pass = 0; pass < passes; ++pass) {
        for (const FeatureSpec* spec : specs) {
            LineSearch search;
            search.pass = pass;
            search.feature = spec->name;
            search.scales = uniform_grid(spec->lo, spec->hi, samples_per_feature);
            search.chamfer.assign(search.scales.size(), 0.0);

            const ToolModel& base = result.matched_tool;
            parallel_for(search.scales.size(), jobs, [&](std::size_t i) {
                ToolModel candidate = apply_edit(base, spec->name, search.scales[i]);
                PointCloud cloud = tool_to_cloud(candidate, cloud_n, seed, view);
                PointCloud aligned = centroid_align(cloud, target).aligned;
                search.chamfer[i] = chamfer_distance(aligned, target, target_tree);
            });

            std::size_t best = 0;
            for (std::size_t i = 1; i < search.chamfer.size(); ++i)
                if (search.chamfer[i] < search.chamfer[best]) best = i;
            search.chosen_scale = search.scales[best];
            search.chosen_chamfer = search.chamfer[best];

            result.matched_tool =
                apply_edit(result.matched_tool, spec->name, search.chosen_scale);
            current_residual = search.chosen_chamfer;
            result.trace.push_back(std::move(search));
        }
    }

    result.residual = current_residual;
    for (const FeatureSpec* spec : specs)
        result.assignment[spec->name] = result.matched_tool.feature_assignment.at(spec->name);
    return result;
}

}  // namespace toolforge
