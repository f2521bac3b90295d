#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "../errors.hpp"
#include "../parallel.hpp"
#include "../rng.hpp"
#include "../shape/edits.hpp"
#include "../shape/families.hpp"
#include "../sim/task_sim.hpp"

namespace toolforge {

struct DiscoveryConfig {
    std::size_t grid_points_per_feature = 9;
    std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    double causal_margin = 0.15;
    double success_threshold = 0.8;
    std::uint64_t combo_max_size = 20000;
};

inline void validate(const DiscoveryConfig& config) {
    if (config.grid_points_per_feature < 3)
        throw ConfigError("grid_points_per_feature must be at least 3");
    if (config.seeds.empty()) throw ConfigError("discovery needs at least one seed");
    if (!(config.success_threshold > 0.0 && config.success_threshold <= 1.0))
        throw ConfigError("success_threshold must lie in (0, 1]");
}

struct CurvePoint {
    double scale = 0.0;
    double rate = 0.0;
    std::vector<int> outcomes;  // one 0/1 entry per seed, in seed order
};

struct ResponseCurve {
    std::string feature;
    // The scan value this tool already has (1.0 for scale features, the
    // source's own assigned value for absolute ones). Effect sizes are
    // measured against the grid point nearest to it.
    double default_scale = 1.0;
    std::vector<CurvePoint> points;
};

struct ScaleRange {
    double lo = 0.0;
    double hi = 0.0;
};

struct CausalReport {
    std::vector<ResponseCurve> curves;
    double noise_floor = 0.0;
    std::map<std::string, bool> causal_flags;
    std::map<std::string, double> effect_sizes;
    std::map<std::string, ScaleRange> working_ranges;
    bool combination_verified = true;
    std::map<std::string, ScaleRange> boundary_scales;
};

// Seed-to-seed disagreement of the unedited configuration: the mean of
// |outcome_i - outcome_j| over all ordered pairs of rollouts, which collapses
// to 2*s*(k-s)/(k*(k-1)) for s successes out of k. The given seed list is
// used first; further rollouts get derived seeds.
inline double noise_floor(const TaskSpec& task, const ToolModel& source,
                          const std::vector<std::uint64_t>& seeds, std::size_t repeats) {
    if (task.noise_halfwidth_m > 0.0 && repeats < 2)
        throw ConfigError("noise_floor needs at least two rollouts under placement noise");
    if (repeats < 2) return 0.0;
    std::uint64_t base = seeds.empty() ? 0 : seeds.front();
    std::size_t wins = 0;
    for (std::size_t i = 0; i < repeats; ++i) {
        std::uint64_t seed = i < seeds.size() ? seeds[i] : derive_seed(base, "noise_floor", i);
        if (simulate(task, source, seed).success) ++wins;
    }
    double k = static_cast<double>(repeats);
    double s = static_cast<double>(wins);
    return 2.0 * s * (k - s) / (k * (k - 1.0));
}

// One response curve per feature: sweep that feature across its uniform grid
// while everything else stays at the source's assignment. Results are written
// into index-addressed slots, so the thread count cannot reorder them.
inline std::vector<ResponseCurve> sensitivity_scan(const TaskSpec& task,
                                                   const ToolModel& source,
                                                   const std::vector<std::string>& features,
                                                   const DiscoveryConfig& config,
                                                   std::size_t jobs = 1) {
    validate(config);
    const FamilyDef& def = find_family(source.family);

    std::vector<ResponseCurve> curves(features.size());
    struct Item {
        std::size_t curve;
        std::size_t point;
        double scale;
    };
    std::vector<Item> items;
    for (std::size_t fi = 0; fi < features.size(); ++fi) {
        const FeatureSpec& spec = find_feature(def, features[fi]);
        curves[fi].feature = spec.name;
        curves[fi].default_scale = source.feature_assignment.at(spec.name);
        std::vector<double> grid = feature_grid(spec, config.grid_points_per_feature);
        curves[fi].points.resize(grid.size());
        for (std::size_t si = 0; si < grid.size(); ++si) items.push_back({fi, si, grid[si]});
    }

    parallel_for(items.size(), jobs, [&](std::size_t i) {
        const Item& item = items[i];
        ToolModel tool = apply_edit(source, curves[item.curve].feature, item.scale);
        CurvePoint& pt = curves[item.curve].points[item.point];
        pt.scale = item.scale;
        pt.outcomes.reserve(config.seeds.size());
        std::size_t wins = 0;
        for (std::uint64_t seed : config.seeds) {
            bool ok = simulate(task, tool, seed).success;
            pt.outcomes.push_back(ok ? 1 : 0);
            if (ok) ++wins;
        }
        pt.rate = static_cast<double>(wins) / static_cast<double>(config.seeds.size());
    });
    return curves;
}

namespace discovery_detail {

// Grid index whose scale lies nearest the curve's default value; ties go to
// the lower scale.
inline std::size_t reference_index(const ResponseCurve& curve) {
    if (curve.points.empty()) throw MissingDefaultPoint(curve.feature);
    if (curve.default_scale < curve.points.front().scale - 1e-9 ||
        curve.default_scale > curve.points.back().scale + 1e-9)
        throw MissingDefaultPoint(curve.feature);
    std::size_t best = 0;
    double best_gap = std::fabs(curve.points[0].scale - curve.default_scale);
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        double gap = std::fabs(curve.points[i].scale - curve.default_scale);
        if (gap < best_gap) {
            best = i;
            best_gap = gap;
        }
    }
    return best;
}

}  // namespace discovery_detail

// Effect size = the largest rate excursion from the default-nearest grid
// point; a feature is causal when that excursion clears the noise floor by
// the configured margin.
inline std::pair<std::map<std::string, bool>, std::map<std::string, double>> flag_causal(
    const std::vector<ResponseCurve>& curves, double floor, const DiscoveryConfig& config) {
    std::map<std::string, bool> flags;
    std::map<std::string, double> effects;
    for (const ResponseCurve& curve : curves) {
        double ref = curve.points[discovery_detail::reference_index(curve)].rate;
        double effect = 0.0;
        for (const CurvePoint& pt : curve.points)
            effect = std::max(effect, std::fabs(pt.rate - ref));
        flags[curve.feature] = effect > floor + config.causal_margin;
        effects[curve.feature] = effect;
    }
    return {flags, effects};
}

namespace discovery_detail {

// Longest contiguous run of grid indices whose rate clears tau. Equal-length
// runs prefer the one containing the reference index, then the lower one.
inline std::pair<std::size_t, std::size_t> longest_run(const std::vector<double>& rates,
                                                       double tau, std::size_t ref_index,
                                                       const std::string& feature) {
    std::vector<std::pair<std::size_t, std::size_t>> runs;
    std::size_t i = 0;
    while (i < rates.size()) {
        if (rates[i] < tau) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < rates.size() && rates[j + 1] >= tau) ++j;
        runs.emplace_back(i, j);
        i = j + 1;
    }
    if (runs.empty()) throw NoWorkingRange(feature);
    std::size_t best_len = 0;
    for (const auto& run : runs) best_len = std::max(best_len, run.second - run.first + 1);
    for (const auto& run : runs)
        if (run.second - run.first + 1 == best_len && run.first <= ref_index &&
            ref_index <= run.second)
            return run;
    for (const auto& run : runs)
        if (run.second - run.first + 1 == best_len) return run;
    return runs.front();  // unreachable
}

// Exhaustively simulated product box over the in-run grid points of each
// causal feature. success[i] uses odometer order, last feature fastest.
struct ComboTable {
    std::vector<std::string> features;
    std::vector<std::vector<double>> scales;
    std::vector<char> success;
};

struct BoxBounds {
    std::vector<std::size_t> lo;  // inclusive index bounds per feature
    std::vector<std::size_t> hi;
};

inline void decode(const ComboTable& table, std::size_t combo, std::vector<std::size_t>& idx) {
    idx.resize(table.scales.size());
    for (std::size_t f = table.scales.size(); f-- > 0;) {
        idx[f] = combo % table.scales[f].size();
        combo /= table.scales[f].size();
    }
}

// Greedy box tightening: while fewer than tau of the combos inside the box
// succeed, apply the single endpoint move that removes the most failing
// combos (ties: feature name ascending, lo before hi). Returns the final
// bounds and whether the initial box already verified.
inline std::pair<BoxBounds, bool> shrink_box(const ComboTable& table, double tau) {
    std::size_t nf = table.scales.size();
    BoxBounds box;
    box.lo.assign(nf, 0);
    for (std::size_t f = 0; f < nf; ++f) box.hi.push_back(table.scales[f].size() - 1);

    std::vector<std::size_t> idx;
    auto inside = [&](std::size_t combo) {
        decode(table, combo, idx);
        for (std::size_t f = 0; f < nf; ++f)
            if (idx[f] < box.lo[f] || idx[f] > box.hi[f]) return false;
        return true;
    };
    auto fraction_ok = [&]() {
        std::size_t total = 0, pass = 0;
        for (std::size_t c = 0; c < table.success.size(); ++c) {
            if (!inside(c)) continue;
            ++total;
            if (table.success[c]) ++pass;
        }
        return total == 0 ||
               static_cast<double>(pass) >= tau * static_cast<double>(total);
    };

    bool shrunk = false;
    while (!fraction_ok()) {
        // Candidate = (feature, tighten lo?) ranked by failing combos removed.
        std::size_t best_f = nf;
        bool best_lo = true;
        std::size_t best_removed = 0;
        bool found = false;
        for (std::size_t f = 0; f < nf; ++f) {
            if (box.lo[f] == box.hi[f]) continue;
            for (bool at_lo : {true, false}) {
                std::size_t edge = at_lo ? box.lo[f] : box.hi[f];
                std::size_t removed = 0;
                for (std::size_t c = 0; c < table.success.size(); ++c) {
                    if (table.success[c] || !inside(c)) continue;
                    decode(table, c, idx);
                    if (idx[f] == edge) ++removed;
                }
                bool better = !found || removed > best_removed ||
                              (removed == best_removed &&
                               (table.features[f] < table.features[best_f] ||
                                (f == best_f && at_lo && !best_lo)));
                if (better) {
                    best_f = f;
                    best_lo = at_lo;
                    best_removed = removed;
                    found = true;
                }
            }
        }
        if (!found) throw NoWorkingRange("combination box");
        if (best_lo) ++box.lo[best_f];
        else --box.hi[best_f];
        shrunk = true;
    }
    return {box, !shrunk};
}

}  // namespace discovery_detail

struct WorkingRangeResult {
    std::map<std::string, ScaleRange> ranges;
    bool combination_verified = true;
};

// Single-feature runs from already-computed curves, then the exhaustive
// combination check over the in-run grid points.
inline WorkingRangeResult working_ranges_from_curves(const TaskSpec& task,
                                                     const ToolModel& source,
                                                     const std::vector<ResponseCurve>& curves,
                                                     const DiscoveryConfig& config,
                                                     std::size_t jobs = 1) {
    validate(config);
    discovery_detail::ComboTable table;
    for (const ResponseCurve& curve : curves) {
        std::vector<double> rates;
        for (const CurvePoint& pt : curve.points) rates.push_back(pt.rate);
        auto run = discovery_detail::longest_run(rates, config.success_threshold,
                                                 discovery_detail::reference_index(curve),
                                                 curve.feature);
        std::vector<double> scales;
        for (std::size_t i = run.first; i <= run.second; ++i)
            scales.push_back(curve.points[i].scale);
        table.features.push_back(curve.feature);
        table.scales.push_back(std::move(scales));
    }

    std::uint64_t total = 1;
    for (const auto& scales : table.scales) {
        std::uint64_t k = scales.size();
        if (total > std::numeric_limits<std::uint64_t>::max() / k)
            throw GridTooLarge(std::numeric_limits<std::uint64_t>::max(),
                               config.combo_max_size);
        total *= k;
    }
    if (total > config.combo_max_size) throw GridTooLarge(total, config.combo_max_size);

    table.success.assign(total, 0);
    parallel_for(total, jobs, [&](std::size_t c) {
        std::vector<std::size_t> idx;
        discovery_detail::decode(table, c, idx);
        std::vector<std::pair<std::string, double>> assignment;
        for (std::size_t f = 0; f < table.features.size(); ++f)
            assignment.emplace_back(table.features[f], table.scales[f][idx[f]]);
        double rate = success_rate(task, apply_edits(source, assignment), config.seeds);
        table.success[c] = rate >= config.success_threshold ? 1 : 0;
    });

    auto [box, verified] = discovery_detail::shrink_box(table, config.success_threshold);
    WorkingRangeResult out;
    out.combination_verified = verified;
    for (std::size_t f = 0; f < table.features.size(); ++f)
        out.ranges[table.features[f]] = {table.scales[f][box.lo[f]],
                                         table.scales[f][box.hi[f]]};
    return out;
}

inline WorkingRangeResult working_ranges(const TaskSpec& task, const ToolModel& source,
                                         const std::vector<std::string>& causal_features,
                                         const DiscoveryConfig& config,
                                         std::size_t jobs = 1) {
    return working_ranges_from_curves(
        task, source, sensitivity_scan(task, source, causal_features, config, jobs), config,
        jobs);
}

inline std::pair<ToolModel, ToolModel> boundary_tools(const ToolModel& source,
                                                      const std::string& feature,
                                                      const ScaleRange& range) {
    return {apply_edit(source, feature, range.lo), apply_edit(source, feature, range.hi)};
}

// Full discovery pass: floor, scan, flagging, ranges, boundary scales.
inline CausalReport run_discovery(const TaskSpec& task, const ToolModel& source,
                                  const std::vector<std::string>& features,
                                  const DiscoveryConfig& config, std::size_t jobs = 1) {
    validate(config);
    CausalReport report;
    report.noise_floor = noise_floor(task, source, config.seeds, config.seeds.size());
    report.curves = sensitivity_scan(task, source, features, config, jobs);
    auto [flags, effects] = flag_causal(report.curves, report.noise_floor, config);
    report.causal_flags = std::move(flags);
    report.effect_sizes = std::move(effects);

    std::vector<ResponseCurve> causal_curves;
    for (const ResponseCurve& curve : report.curves)
        if (report.causal_flags.at(curve.feature)) causal_curves.push_back(curve);
    if (causal_curves.empty()) throw NoCausalFeatures();

    WorkingRangeResult ranges =
        working_ranges_from_curves(task, source, causal_curves, config, jobs);
    report.working_ranges = ranges.ranges;
    report.combination_verified = ranges.combination_verified;
    report.boundary_scales = ranges.ranges;
    return report;
}

// Flat table for plotting: one row per (feature, scale).
inline void write_sensitivity_csv(const std::vector<ResponseCurve>& curves,
                                  std::ostream& os) {
    os << "feature,scale,success_rate\n";
    char buf[64];
    for (const ResponseCurve& curve : curves) {
        for (const CurvePoint& pt : curve.points) {
            std::snprintf(buf, sizeof(buf), "%.12g,%.12g", pt.scale, pt.rate);
            os << curve.feature << ',' << buf << '\n';
        }
    }
}

}  // namespace toolforge
