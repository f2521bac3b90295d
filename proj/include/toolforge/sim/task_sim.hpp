#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "../errors.hpp"
#include "../geometry/point.hpp"
#include "../rng.hpp"
#include "../shape/families.hpp"
#include "../shape/tool_model.hpp"

namespace toolforge {

struct RobotConstraints {
    double payload_kg = 3.0;
    double gripper_max_opening_m = 0.05;
    double arm_reach_m = 0.8;
    Point3 base_position{0.0, 0.0, 0.0};
    // Quadruped limits, used by step_reach only.
    double foot_area_m2 = 0.06;
    double max_step_height_m = 0.45;
    double stance_depth_m = 0.24;
};

enum class FailureReason {
    None,
    TooHeavy,
    GripperTooWide,
    OutOfReach,
    NoHook,
    NoRetention,
    HeadTooWide,
    TooShallow,
    HandleTooShort,
    GapTooNarrow,
    WrongHeight,
    TopTooSmall,
    Unstable,
};

inline const char* to_string(FailureReason r) {
    switch (r) {
        case FailureReason::None: return "None";
        case FailureReason::TooHeavy: return "TooHeavy";
        case FailureReason::GripperTooWide: return "GripperTooWide";
        case FailureReason::OutOfReach: return "OutOfReach";
        case FailureReason::NoHook: return "NoHook";
        case FailureReason::NoRetention: return "NoRetention";
        case FailureReason::HeadTooWide: return "HeadTooWide";
        case FailureReason::TooShallow: return "TooShallow";
        case FailureReason::HandleTooShort: return "HandleTooShort";
        case FailureReason::GapTooNarrow: return "GapTooNarrow";
        case FailureReason::WrongHeight: return "WrongHeight";
        case FailureReason::TopTooSmall: return "TopTooSmall";
        case FailureReason::Unstable: return "Unstable";
    }
    return "None";
}

struct Outcome {
    bool success = false;
    FailureReason failure_reason = FailureReason::None;
};

struct PullParams {
    Point3 puck_position{1.32, 0.0, 0.0};
    double puck_radius = 0.04;
    double retrieve_radius_m = 0.85;
    double retention_window_lo_deg = 60.0;
    double retention_window_hi_deg = 150.0;
};

struct ScoopParams {
    Point3 bowl_center{0.55, 0.0, 0.0};
    double bowl_opening_radius_m = 0.105;
    double bowl_depth_m = 0.09;
    double candy_radius_m = 0.01;
    double min_scoop_volume_m3 = 3.2e-5;
    double clearance_m = 0.02;
    double angle_window_lo_deg = 110.0;
    double angle_window_hi_deg = 172.0;
};

struct StepReachParams {
    double shelf_height_m = 1.05;
    double shelf_front_offset_m = 0.40;
    double obstacle_gap_width_m = 0.55;
    double stand_height_lo_m = 0.24;
    double stand_height_hi_m = 0.48;
    double stability_margin_fraction = 0.8;
};

struct TaskSpec {
    std::string variant;  // pull | scoop | step_reach
    RobotConstraints robot;
    double noise_halfwidth_m = 0.0;
    int trials_per_config = 10;
    // Optional execution noise on the tool's effective extension; placement
    // noise alone is the default protocol.
    double tracking_noise_m = 0.0;
    PullParams pull;
    ScoopParams scoop;
    StepReachParams step;
};

inline TaskSpec default_task(const std::string& variant) {
    TaskSpec t;
    t.variant = variant;
    if (variant == "pull") t.noise_halfwidth_m = 0.10;
    else if (variant == "scoop") t.noise_halfwidth_m = 0.05;
    else if (variant == "step_reach") t.noise_halfwidth_m = 0.05;
    else throw ConfigError("unknown task variant: " + variant);
    return t;
}

inline const char* family_for_task(const std::string& variant) {
    if (variant == "pull") return "stick";
    if (variant == "scoop") return "scoop";
    if (variant == "step_reach") return "platform";
    throw ConfigError("unknown task variant: " + variant);
}

namespace sim_detail {

inline double handle_tip_distance(const ToolModel& tool) {
    const Keypoint* handle = nullptr;
    const Keypoint* tip = nullptr;
    for (const Keypoint& kp : tool.keypoints) {
        if (kp.name == "handle") handle = &kp;
        if (kp.name == "tip") tip = &kp;
    }
    if (handle == nullptr || tip == nullptr) throw NoKeypoints(tool.family);
    return distance(keypoint_world(tool, *handle), keypoint_world(tool, *tip));
}

inline Outcome fail(FailureReason r) { return {false, r}; }

}  // namespace sim_detail

// One rollout. The goal object's x/y position is jittered uniformly within
// +-noise_halfwidth; everything else is a deterministic conjunction of
// closed-form rules evaluated in a fixed order, and failure_reason names the
// first rule that broke.
inline Outcome simulate(const TaskSpec& task, const ToolModel& tool, std::uint64_t seed) {
    const char* wanted = family_for_task(task.variant);
    if (tool.family != wanted) throw FamilyMismatch(wanted, tool.family);

    Rng rng(derive_seed(seed, "placement"));
    double h = task.noise_halfwidth_m;
    Point3 jitter{h > 0.0 ? rng.uniform(-h, h) : 0.0,
                  h > 0.0 ? rng.uniform(-h, h) : 0.0, 0.0};
    double tracking = 0.0;
    if (task.tracking_noise_m > 0.0)
        tracking = rng.uniform(-task.tracking_noise_m, task.tracking_noise_m);

    using sim_detail::fail;
    const RobotConstraints& r = task.robot;

    if (task.variant == "pull") {
        const PullParams& p = task.pull;
        if (!(tool.mass_kg <= r.payload_kg)) return fail(FailureReason::TooHeavy);
        if (!(feature_value(tool, "shaft_diameter") <= r.gripper_max_opening_m))
            return fail(FailureReason::GripperTooWide);
        Point3 puck = p.puck_position + jitter;
        double dist = distance(r.base_position, puck);
        double extension = sim_detail::handle_tip_distance(tool) + tracking;
        if (!(dist <= r.arm_reach_m + extension)) return fail(FailureReason::OutOfReach);
        if (!(feature_value(tool, "blade_length") >= 2.0 * p.puck_radius))
            return fail(FailureReason::NoHook);
        double angle = feature_value(tool, "blade_shaft_angle");
        if (!(angle >= p.retention_window_lo_deg && angle <= p.retention_window_hi_deg))
            return fail(FailureReason::NoRetention);
        if (!(dist <= r.arm_reach_m + p.retrieve_radius_m))
            return fail(FailureReason::OutOfReach);
        return {true, FailureReason::None};
    }

    if (task.variant == "scoop") {
        const ScoopParams& p = task.scoop;
        if (!(tool.mass_kg <= r.payload_kg)) return fail(FailureReason::TooHeavy);
        if (!(feature_value(tool, "handle_cross_section_thickness") <=
              r.gripper_max_opening_m))
            return fail(FailureReason::GripperTooWide);
        if (!(feature_value(tool, "head_width") <=
              2.0 * p.bowl_opening_radius_m - p.clearance_m))
            return fail(FailureReason::HeadTooWide);
        if (!(feature_value(tool, "handle_length") >= p.bowl_depth_m + p.clearance_m))
            return fail(FailureReason::HandleTooShort);
        double concavity = (2.0 / 3.0) * feature_value(tool, "head_length") *
                           feature_value(tool, "head_width") *
                           feature_value(tool, "head_bowl_curvature");
        if (!(concavity >= p.min_scoop_volume_m3)) return fail(FailureReason::TooShallow);
        double angle = feature_value(tool, "handle_to_head_angle");
        if (!(angle >= p.angle_window_lo_deg && angle <= p.angle_window_hi_deg))
            return fail(FailureReason::NoRetention);
        return {true, FailureReason::None};
    }

    const StepReachParams& p = task.step;
    if (!(feature_value(tool, "footprint_width") <= p.obstacle_gap_width_m))
        return fail(FailureReason::GapTooNarrow);
    double height = feature_value(tool, "overall_height");
    if (!(height >= p.stand_height_lo_m && height <= p.stand_height_hi_m &&
          height <= r.max_step_height_m))
        return fail(FailureReason::WrongHeight);
    if (!(feature_value(tool, "top_surface_area") >= r.foot_area_m2))
        return fail(FailureReason::TopTooSmall);
    if (!(feature_value(tool, "footprint_depth") >= r.stance_depth_m))
        return fail(FailureReason::Unstable);
    double half_min = 0.5 * std::min(feature_value(tool, "footprint_width"),
                                     feature_value(tool, "footprint_depth"));
    double offset = std::hypot(tool.com.x, tool.com.y);
    if (!(offset <= p.stability_margin_fraction * half_min))
        return fail(FailureReason::Unstable);
    return {true, FailureReason::None};
}

inline double success_rate(const TaskSpec& task, const ToolModel& tool,
                           const std::vector<std::uint64_t>& seeds) {
    if (seeds.empty()) throw ConfigError("success_rate needs at least one seed");
    std::size_t wins = 0;
    for (std::uint64_t s : seeds)
        if (simulate(task, tool, s).success) ++wins;
    return static_cast<double>(wins) / static_cast<double>(seeds.size());
}

}  // namespace toolforge
