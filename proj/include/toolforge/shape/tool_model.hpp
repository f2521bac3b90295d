#pragma once

#include <map>
#include <string>
#include <vector>

#include "../errors.hpp"
#include "../geometry/point.hpp"
#include "part_solid.hpp"

namespace toolforge {

// Skill anchor, stored as normalized coordinates in [0,1]^3 of the owning
// part's local bounding box so edits to the part move it consistently.
struct Keypoint {
    std::string name;  // "handle" or "tip"
    std::string part;
    Point3 local_coords;

    friend bool operator==(const Keypoint& a, const Keypoint& b) {
        return a.name == b.name && a.part == b.part && a.local_coords == b.local_coords;
    }
};

// One named, bounded axis of variation. Multiplicative features are scales on
// a nominal dimension (1.0 = unedited); the rest carry absolute values
// (angles in degrees, fractions).
struct FeatureSpec {
    std::string name;
    bool physical = false;       // affects simulation, invisible to point clouds
    bool multiplicative = true;  // scale on nominal vs absolute value
    double lo = 0.0;
    double hi = 0.0;
    double default_value = 1.0;
};

struct ToolModel {
    std::string family;
    std::map<std::string, double> nominal_dimensions;
    std::map<std::string, double> feature_assignment;
    std::vector<PartSolid> parts;
    double mass_kg = 0.0;
    Point3 com;
    std::vector<Keypoint> keypoints;

    const PartSolid* find_part(const std::string& name) const {
        for (const PartSolid& p : parts)
            if (p.name == name) return &p;
        return nullptr;
    }

    friend bool operator==(const ToolModel& a, const ToolModel& b) {
        return a.family == b.family && a.nominal_dimensions == b.nominal_dimensions &&
               a.feature_assignment == b.feature_assignment && a.parts == b.parts &&
               a.mass_kg == b.mass_kg && a.com == b.com && a.keypoints == b.keypoints;
    }
};

// World-frame position of a keypoint: lerp across the part's local bounds by
// the stored fractions, then run through the part pose.
inline Point3 keypoint_world(const ToolModel& tool, const Keypoint& kp) {
    const PartSolid* part = tool.find_part(kp.part);
    if (part == nullptr) throw Error("keypoint part not found: " + kp.part);
    Aabb box = local_bounds(part->shape);
    Point3 f = kp.local_coords;
    Point3 local{box.lo.x + f.x * (box.hi.x - box.lo.x),
                 box.lo.y + f.y * (box.hi.y - box.lo.y),
                 box.lo.z + f.z * (box.hi.z - box.lo.z)};
    return part->pose.apply(local);
}

inline std::vector<std::pair<std::string, Point3>> keypoint_positions(const ToolModel& tool) {
    std::vector<std::pair<std::string, Point3>> out;
    out.reserve(tool.keypoints.size());
    for (const Keypoint& kp : tool.keypoints) out.emplace_back(kp.name, keypoint_world(tool, kp));
    return out;
}

inline void validate_tool(const ToolModel& tool) {
    if (!(tool.mass_kg > 0.0)) throw NonPositiveDimension("mass_kg");
    for (const PartSolid& p : tool.parts) validate_shape(p.shape);
    for (const Keypoint& kp : tool.keypoints) {
        if (kp.name != "handle" && kp.name != "tip")
            throw Error("keypoint name must be handle or tip: " + kp.name);
        if (tool.find_part(kp.part) == nullptr)
            throw Error("keypoint references missing part: " + kp.part);
        Point3 f = kp.local_coords;
        auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
        if (!in01(f.x) || !in01(f.y) || !in01(f.z))
            throw Error("keypoint local_coords outside [0,1]^3: " + kp.name);
    }
}

}  // namespace toolforge
