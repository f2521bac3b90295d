#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "../causal/discovery.hpp"
#include "../errors.hpp"
#include "../io/json_io.hpp"
#include "../shape/families.hpp"
#include "../sim/task_sim.hpp"

namespace toolforge {

struct SuggesterConfig {
    std::string backend = "catalog";  // catalog | remote
    std::string host = "127.0.0.1";
    int port = 0;
    std::string task_text;
    std::size_t n_runs = 10;
    std::size_t n_candidates = 12;
    std::size_t top_k = 6;
};

struct MatcherConfig {
    std::size_t samples_per_feature = 15;
    std::size_t passes = 2;
    std::size_t cloud_n = 4096;
    std::size_t boundary_cloud_n = 1024;
    bool write_boundary_ppm = false;
};

// A target is either a cloud file on disk or a synthetic tool built from a
// family plus a feature assignment and sampled to a cloud. Exactly one of the
// two must be present.
struct TargetGenerator {
    std::string family;
    std::map<std::string, double> assignment;  // feature -> scale or value
    std::size_t cloud_n = 0;                   // 0 = matcher cloud_n
};

struct TargetEntry {
    std::string id;
    std::string cloud_file;  // absolute, resolved against the config's directory
    std::optional<TargetGenerator> generator;
    // Physical feature values in feature units (kg, fractions). mass_kg may
    // also be given as the shorthand field measured_mass_kg.
    std::map<std::string, double> measurements;
};

struct PipelineConfig {
    TaskSpec task;
    ToolModel source_tool;
    DiscoveryConfig discovery;
    SuggesterConfig suggester;
    MatcherConfig matcher;
    // Re-simulate each geometrically suitable target at its measured mass and
    // demote it when the success rate drops below the discovery threshold.
    bool safety_check = true;
    // Cap on feature-expansion rounds when discovery fails or no target
    // survives classification.
    std::size_t recovery_iterations = 2;
    std::vector<TargetEntry> targets;
    std::string output_dir = "out";
    std::uint64_t master_seed = 0;
};

namespace config_detail {

inline const nlohmann::json* find(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

template <typename T>
inline void read_into(const nlohmann::json& j, const char* key, T& out) {
    if (const nlohmann::json* v = find(j, key)) v->get_to(out);
}

inline void read_robot(const nlohmann::json& j, RobotConstraints& robot) {
    read_into(j, "payload_kg", robot.payload_kg);
    read_into(j, "gripper_max_opening_m", robot.gripper_max_opening_m);
    read_into(j, "arm_reach_m", robot.arm_reach_m);
    read_into(j, "foot_area_m2", robot.foot_area_m2);
    read_into(j, "max_step_height_m", robot.max_step_height_m);
    read_into(j, "stance_depth_m", robot.stance_depth_m);
}

inline TaskSpec read_task(const nlohmann::json& j) {
    const nlohmann::json* variant = find(j, "variant");
    if (variant == nullptr) throw ConfigError("task.variant is required");
    TaskSpec task = default_task(variant->get<std::string>());
    read_into(j, "noise_halfwidth_m", task.noise_halfwidth_m);
    read_into(j, "trials_per_config", task.trials_per_config);
    read_into(j, "tracking_noise_m", task.tracking_noise_m);
    if (const nlohmann::json* robot = find(j, "robot")) read_robot(*robot, task.robot);
    return task;
}

inline ToolModel read_source_tool(const nlohmann::json& j) {
    const nlohmann::json* family = find(j, "family");
    if (family == nullptr) throw ConfigError("source_tool.family is required");
    std::map<std::string, double> dims = default_dimensions(family->get<std::string>());
    if (const nlohmann::json* given = find(j, "dimensions"))
        for (const auto& [key, value] : given->items()) dims[key] = value.get<double>();
    return make_source_tool(family->get<std::string>(), dims);
}

inline TargetEntry read_target(const nlohmann::json& j,
                               const std::filesystem::path& config_dir) {
    TargetEntry entry;
    read_into(j, "id", entry.id);
    if (entry.id.empty()) throw ConfigError("every target needs a non-empty id");
    if (entry.id.find('/') != std::string::npos)
        throw ConfigError("target id must not contain '/': " + entry.id);

    const nlohmann::json* cloud = find(j, "cloud");
    const nlohmann::json* generator = find(j, "generator");
    if ((cloud != nullptr) == (generator != nullptr))
        throw ConfigError("target " + entry.id +
                          " needs exactly one of cloud or generator");
    if (cloud != nullptr) {
        std::filesystem::path p = cloud->get<std::string>();
        if (p.is_relative()) p = config_dir / p;
        if (!std::filesystem::exists(p))
            throw ConfigError("target " + entry.id +
                              ": cloud file not found: " + p.string());
        entry.cloud_file = p.string();
    } else {
        TargetGenerator gen;
        read_into(*generator, "family", gen.family);
        if (gen.family.empty())
            throw ConfigError("target " + entry.id + ": generator.family is required");
        find_family(gen.family);
        read_into(*generator, "assignment", gen.assignment);
        read_into(*generator, "cloud_n", gen.cloud_n);
        entry.generator = std::move(gen);
    }

    read_into(j, "measurements", entry.measurements);
    if (const nlohmann::json* mass = find(j, "measured_mass_kg"))
        entry.measurements["mass_kg"] = mass->get<double>();
    return entry;
}

}  // namespace config_detail

// Parses and validates a config document. Relative target cloud paths resolve
// against the config file's own directory; referenced files must exist now,
// not at classify time.
inline PipelineConfig load_config(const std::string& path) {
    using config_detail::find;
    using config_detail::read_into;

    nlohmann::json j = read_json_file(path);
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    std::filesystem::path config_dir = std::filesystem::path(path).parent_path();

    PipelineConfig config;
    const nlohmann::json* task = find(j, "task");
    if (task == nullptr) throw ConfigError("config needs a task section");
    config.task = config_detail::read_task(*task);

    const nlohmann::json* source = find(j, "source_tool");
    if (source == nullptr) throw ConfigError("config needs a source_tool section");
    config.source_tool = config_detail::read_source_tool(*source);
    if (config.source_tool.family != family_for_task(config.task.variant))
        throw ConfigError("task " + config.task.variant + " needs a " +
                          family_for_task(config.task.variant) + " source tool, got " +
                          config.source_tool.family);

    if (const nlohmann::json* d = find(j, "discovery")) {
        read_into(*d, "grid_points_per_feature", config.discovery.grid_points_per_feature);
        read_into(*d, "seeds", config.discovery.seeds);
        read_into(*d, "causal_margin", config.discovery.causal_margin);
        read_into(*d, "success_threshold", config.discovery.success_threshold);
        read_into(*d, "combo_max_size", config.discovery.combo_max_size);
    }
    validate(config.discovery);

    if (const nlohmann::json* s = find(j, "suggester")) {
        read_into(*s, "backend", config.suggester.backend);
        read_into(*s, "host", config.suggester.host);
        read_into(*s, "port", config.suggester.port);
        read_into(*s, "task_text", config.suggester.task_text);
        read_into(*s, "n_runs", config.suggester.n_runs);
        read_into(*s, "n_candidates", config.suggester.n_candidates);
        read_into(*s, "top_k", config.suggester.top_k);
    }
    if (config.suggester.backend != "catalog" && config.suggester.backend != "remote")
        throw ConfigError("suggester.backend must be catalog or remote, got " +
                          config.suggester.backend);
    if (config.suggester.backend == "remote" && config.suggester.port <= 0)
        throw ConfigError("remote suggester needs a positive port");

    if (const nlohmann::json* m = find(j, "matcher")) {
        read_into(*m, "samples_per_feature", config.matcher.samples_per_feature);
        read_into(*m, "passes", config.matcher.passes);
        read_into(*m, "cloud_n", config.matcher.cloud_n);
        read_into(*m, "boundary_cloud_n", config.matcher.boundary_cloud_n);
        read_into(*m, "write_boundary_ppm", config.matcher.write_boundary_ppm);
    }
    if (config.matcher.cloud_n == 0 || config.matcher.boundary_cloud_n == 0)
        throw ConfigError("matcher cloud sizes must be positive");

    read_into(j, "safety_check", config.safety_check);
    read_into(j, "recovery_iterations", config.recovery_iterations);
    read_into(j, "output_dir", config.output_dir);
    read_into(j, "master_seed", config.master_seed);

    std::set<std::string> ids;
    if (const nlohmann::json* targets = find(j, "targets")) {
        if (!targets->is_array()) throw ConfigError("targets must be an array");
        for (const nlohmann::json& t : *targets) {
            TargetEntry entry = config_detail::read_target(t, config_dir);
            if (!ids.insert(entry.id).second)
                throw ConfigError("duplicate target id: " + entry.id);
            config.targets.push_back(std::move(entry));
        }
    }
    return config;
}

}  // namespace toolforge
