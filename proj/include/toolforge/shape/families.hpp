#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "../errors.hpp"
#include "part_solid.hpp"
#include "tool_model.hpp"

namespace toolforge {

// A family is a fixed part layout driven by named nominal dimensions and a
// feature assignment. build_tool is a pure function of (dimensions,
// assignment); every edit rebuilds from scratch, which is what makes edits
// deterministic and geometry/physics cleanly separable.
struct FamilyDef {
    std::string name;
    std::vector<std::string> dimensions;  // required nominal dimension keys
    std::vector<FeatureSpec> features;    // sorted by name
};

namespace families_detail {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

inline FeatureSpec scale_feature(std::string name, double lo, double hi,
                                 bool physical = false) {
    FeatureSpec f;
    f.name = std::move(name);
    f.physical = physical;
    f.multiplicative = true;
    f.lo = lo;
    f.hi = hi;
    f.default_value = 1.0;
    return f;
}

inline FeatureSpec absolute_feature(std::string name, double lo, double hi,
                                    double def, bool physical = false) {
    FeatureSpec f;
    f.name = std::move(name);
    f.physical = physical;
    f.multiplicative = false;
    f.lo = lo;
    f.hi = hi;
    f.default_value = def;
    return f;
}

}  // namespace families_detail

inline const std::vector<FamilyDef>& all_families() {
    using families_detail::absolute_feature;
    using families_detail::scale_feature;
    static const std::vector<FamilyDef> defs = [] {
        std::vector<FamilyDef> v;

        FamilyDef stick;
        stick.name = "stick";
        stick.dimensions = {"blade_length", "blade_shaft_angle", "blade_thickness",
                            "blade_width",  "mass_kg",           "shaft_diameter",
                            "shaft_length"};
        stick.features = {
            scale_feature("blade_length", 0.25, 2.35),
            absolute_feature("blade_shaft_angle", 30.0, 170.0, 120.0),
            scale_feature("blade_thickness", 0.25, 2.35),
            scale_feature("blade_width", 0.25, 2.35),
            scale_feature("mass_kg", 0.25, 8.0, /*physical=*/true),
            scale_feature("shaft_diameter", 0.25, 2.35),
            scale_feature("shaft_length", 0.25, 2.35),
        };
        v.push_back(std::move(stick));

        FamilyDef scoop;
        scoop.name = "scoop";
        scoop.dimensions = {"handle_cross_section_thickness",
                            "handle_length",
                            "handle_to_head_angle",
                            "head_bowl_curvature",
                            "head_length",
                            "head_thickness",
                            "head_width",
                            "mass_kg"};
        // head_width and head_bowl_curvature ranges are chosen so the bowl
        // stays a valid circular trough (sagitta <= half width) at every
        // corner of the combination grid: 2.08 * 0.010 <= (0.55 * 0.08) / 2.
        scoop.features = {
            scale_feature("handle_cross_section_thickness", 0.25, 2.35),
            scale_feature("handle_length", 0.25, 2.35),
            absolute_feature("handle_to_head_angle", 96.0, 180.0, 162.0),
            scale_feature("head_bowl_curvature", 0.4, 2.08),
            scale_feature("head_length", 0.25, 2.35),
            scale_feature("head_width", 0.55, 2.65),
            scale_feature("mass_kg", 0.25, 8.0, /*physical=*/true),
        };
        v.push_back(std::move(scoop));

        FamilyDef platform;
        platform.name = "platform";
        platform.dimensions = {"com_height_fraction", "footprint_depth", "footprint_width",
                               "mass_kg", "overall_height"};
        platform.features = {
            absolute_feature("com_height_fraction", 0.2, 0.8, 0.5, /*physical=*/true),
            scale_feature("footprint_depth", 0.25, 2.35),
            scale_feature("footprint_width", 0.25, 2.35),
            scale_feature("mass_kg", 0.25, 8.0, /*physical=*/true),
            scale_feature("overall_height", 0.25, 2.35),
            scale_feature("top_surface_area", 0.25, 2.35),
        };
        v.push_back(std::move(platform));
        return v;
    }();
    return defs;
}

inline const FamilyDef& find_family(const std::string& name) {
    for (const FamilyDef& f : all_families())
        if (f.name == name) return f;
    throw ConfigError("unknown tool family: " + name);
}

inline const FeatureSpec& find_feature(const FamilyDef& family, const std::string& name) {
    for (const FeatureSpec& f : family.features)
        if (f.name == name) return f;
    throw UnknownFeature(family.name + " has no feature " + name);
}

inline std::vector<std::string> geometric_feature_names(const FamilyDef& family) {
    std::vector<std::string> out;
    for (const FeatureSpec& f : family.features)
        if (!f.physical) out.push_back(f.name);
    return out;
}

inline std::map<std::string, double> default_dimensions(const std::string& family) {
    if (family == "stick")
        return {{"blade_length", 0.15}, {"blade_shaft_angle", 120.0},
                {"blade_thickness", 0.012}, {"blade_width", 0.07},
                {"mass_kg", 0.45}, {"shaft_diameter", 0.025}, {"shaft_length", 0.60}};
    if (family == "scoop")
        return {{"handle_cross_section_thickness", 0.025}, {"handle_length", 0.22},
                {"handle_to_head_angle", 162.0}, {"head_bowl_curvature", 0.010},
                {"head_length", 0.10}, {"head_thickness", 0.004},
                {"head_width", 0.08}, {"mass_kg", 0.40}};
    if (family == "platform")
        return {{"com_height_fraction", 0.5}, {"footprint_depth", 0.36},
                {"footprint_width", 0.42}, {"mass_kg", 4.0}, {"overall_height", 0.30}};
    throw ConfigError("unknown tool family: " + family);
}

// Unedited assignment: 1.0 for every scale feature, the nominal dimension for
// absolute features (so a source built with a nonstandard angle is its own
// default).
inline std::map<std::string, double> default_assignment(
    const FamilyDef& family, const std::map<std::string, double>& dims) {
    std::map<std::string, double> a;
    for (const FeatureSpec& f : family.features) {
        if (f.multiplicative) {
            a[f.name] = 1.0;
        } else {
            auto it = dims.find(f.name);
            a[f.name] = it == dims.end() ? f.default_value : it->second;
        }
    }
    return a;
}

namespace families_detail {

inline double dim_of(const std::map<std::string, double>& dims, const std::string& key) {
    auto it = dims.find(key);
    if (it == dims.end()) throw MissingDimension(key);
    return it->second;
}

inline double assigned(const std::map<std::string, double>& a, const std::string& key) {
    auto it = a.find(key);
    if (it == a.end()) throw UnknownFeature("assignment missing feature " + key);
    return it->second;
}

inline ToolModel build_stick(const std::map<std::string, double>& dims,
                             const std::map<std::string, double>& a) {
    double L = dim_of(dims, "shaft_length") * assigned(a, "shaft_length");
    double D = dim_of(dims, "shaft_diameter") * assigned(a, "shaft_diameter");
    double B = dim_of(dims, "blade_length") * assigned(a, "blade_length");
    double W = dim_of(dims, "blade_width") * assigned(a, "blade_width");
    double T = dim_of(dims, "blade_thickness") * assigned(a, "blade_thickness");
    double alpha = assigned(a, "blade_shaft_angle") * kDegToRad;

    ToolModel tool;
    tool.family = "stick";
    tool.nominal_dimensions = dims;
    tool.feature_assignment = a;
    tool.mass_kg = dim_of(dims, "mass_kg") * assigned(a, "mass_kg");

    PartSolid shaft{"shaft", CylinderShape{0.5 * D, L},
                    Transform{Mat3::identity(), {0.5 * L, 0.0, 0.0}}};
    Point3 bdir{std::cos(alpha), std::sin(alpha), 0.0};
    PartSolid blade{"blade", BoxShape{B, W, T},
                    Transform{Mat3::rot_z(alpha), (0.5 * B) * bdir}};
    tool.parts = {shaft, blade};

    double vs = volume(shaft.shape), vb = volume(blade.shape);
    tool.com = (1.0 / (vs + vb)) * (vs * Point3{0.5 * L, 0.0, 0.0} + vb * ((0.5 * B) * bdir));

    tool.keypoints = {{"handle", "shaft", {1.0, 0.5, 0.5}},
                      {"tip", "blade", {1.0, 0.5, 0.5}}};
    return tool;
}

inline ToolModel build_scoop(const std::map<std::string, double>& dims,
                             const std::map<std::string, double>& a) {
    double HL = dim_of(dims, "handle_length") * assigned(a, "handle_length");
    double HT = dim_of(dims, "handle_cross_section_thickness") *
                assigned(a, "handle_cross_section_thickness");
    double beta = assigned(a, "handle_to_head_angle") * kDegToRad;
    double headL = dim_of(dims, "head_length") * assigned(a, "head_length");
    double headW = dim_of(dims, "head_width") * assigned(a, "head_width");
    double bowl = dim_of(dims, "head_bowl_curvature") * assigned(a, "head_bowl_curvature");
    double headT = dim_of(dims, "head_thickness");

    ToolModel tool;
    tool.family = "scoop";
    tool.nominal_dimensions = dims;
    tool.feature_assignment = a;
    tool.mass_kg = dim_of(dims, "mass_kg") * assigned(a, "mass_kg");

    PartSolid handle{"handle", CylinderShape{0.5 * HT, HL},
                     Transform{Mat3::identity(), {0.5 * HL, 0.0, 0.0}}};

    // Head long axis leaves the handle-head junction (the origin) at beta to
    // the handle axis, dipping below it; the trough opens roughly upward.
    double gamma = kDegToRad * 180.0 - beta;
    Mat3 rot = Mat3::rot_y(-gamma) * Mat3::rot_z(kDegToRad * 180.0);
    Point3 dvec{std::cos(beta), 0.0, -std::sin(beta)};
    PartSolid head{"head", CurvedPlateShape{headL, headW, headT, bowl},
                   Transform{rot, (0.5 * headL) * dvec}};
    tool.parts = {handle, head};

    double vh = volume(handle.shape), vp = volume(head.shape);
    Point3 head_centroid = head.pose.apply(local_centroid(head.shape));
    tool.com =
        (1.0 / (vh + vp)) * (vh * Point3{0.5 * HL, 0.0, 0.0} + vp * head_centroid);

    tool.keypoints = {{"handle", "handle", {1.0, 0.5, 0.5}},
                      {"tip", "head", {0.5, 0.5, 0.0}}};
    return tool;
}

inline ToolModel build_platform(const std::map<std::string, double>& dims,
                                const std::map<std::string, double>& a) {
    double root = std::sqrt(assigned(a, "top_surface_area"));
    double W = dim_of(dims, "footprint_width") * assigned(a, "footprint_width") * root;
    double D = dim_of(dims, "footprint_depth") * assigned(a, "footprint_depth") * root;
    double H = dim_of(dims, "overall_height") * assigned(a, "overall_height");
    double comf = assigned(a, "com_height_fraction");

    ToolModel tool;
    tool.family = "platform";
    tool.nominal_dimensions = dims;
    tool.feature_assignment = a;
    tool.mass_kg = dim_of(dims, "mass_kg") * assigned(a, "mass_kg");
    tool.parts = {PartSolid{"body", BoxShape{W, D, H},
                            Transform{Mat3::identity(), {0.0, 0.0, 0.5 * H}}}};
    tool.com = {0.0, 0.0, comf * H};
    return tool;
}

}  // namespace families_detail

// Pure builder: geometry, mass, com, and keypoints from dimensions and a
// complete feature assignment. Equal inputs give bit-identical tools.
inline ToolModel build_tool(const std::string& family,
                            const std::map<std::string, double>& dims,
                            const std::map<std::string, double>& assignment) {
    const FamilyDef& def = find_family(family);
    for (const auto& kv : assignment) find_feature(def, kv.first);
    ToolModel tool;
    if (family == "stick") tool = families_detail::build_stick(dims, assignment);
    else if (family == "scoop") tool = families_detail::build_scoop(dims, assignment);
    else tool = families_detail::build_platform(dims, assignment);
    validate_tool(tool);
    return tool;
}

// Source tool at its unedited assignment. Dimension map must be complete for
// the family and strictly positive.
inline ToolModel make_source_tool(const std::string& family,
                                  const std::map<std::string, double>& dims) {
    const FamilyDef& def = find_family(family);
    for (const std::string& key : def.dimensions) {
        auto it = dims.find(key);
        if (it == dims.end()) throw MissingDimension(key);
        if (!(it->second > 0.0) || !std::isfinite(it->second))
            throw NonPositiveDimension(key);
    }
    for (const auto& kv : dims)
        if (std::find(def.dimensions.begin(), def.dimensions.end(), kv.first) ==
            def.dimensions.end())
            throw ConfigError("unknown dimension for family " + family + ": " + kv.first);
    for (const FeatureSpec& f : def.features) {
        if (f.multiplicative) continue;
        auto it = dims.find(f.name);
        if (it != dims.end() && (it->second < f.lo || it->second > f.hi))
            throw ScaleOutOfRange(f.name, it->second, f.lo, f.hi);
    }
    return build_tool(family, dims, default_assignment(def, dims));
}

// The scalar a task rule reads for a feature: nominal x scale for
// multiplicative features (top_surface_area reads the nominal footprint
// area), the assigned value itself for absolute ones.
inline double feature_value(const ToolModel& tool, const std::string& feature) {
    const FamilyDef& def = find_family(tool.family);
    const FeatureSpec& spec = find_feature(def, feature);
    double a = families_detail::assigned(tool.feature_assignment, feature);
    if (!spec.multiplicative) return a;
    if (feature == "top_surface_area")
        return families_detail::dim_of(tool.nominal_dimensions, "footprint_width") *
               families_detail::dim_of(tool.nominal_dimensions, "footprint_depth") * a;
    return families_detail::dim_of(tool.nominal_dimensions, feature) * a;
}

}  // namespace toolforge
