#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "../causal/discovery.hpp"
#include "../errors.hpp"
#include "../io/json_io.hpp"
#include "../match/classify.hpp"
#include "../match/morph.hpp"
#include "../rng.hpp"
#include "../shape/edits.hpp"
#include "../sim/task_sim.hpp"
#include "../suggest/remote.hpp"
#include "../suggest/suggest.hpp"
#include "config.hpp"

// Filesystem-backed stages. Each one reads only the config and files written
// by earlier stages, and writes its own outputs under output_dir, so any
// stage can be rerun in isolation and a rerun is byte-identical (timings.json
// excepted, which no stage reads back). run_end_to_end is literally the six
// stages in order.
//
// Layout under output_dir:
//   features.json                      suggest
//   dataset/manifest.json, dataset/tools/NNN_<feature>.json
//   causal_report.json, sensitivity.csv, expansion.json
//   targets/<id>/cloud.xyz, match.json, verdict.json, keypoints.json
//   targets/<id>/<feature>_{target,lo,hi}.xyz [+ <feature>.ppm]
//   run_report.json, report.txt, timings.json

namespace toolforge {

struct TargetReport {
    std::string id;
    MatchResult match;
    Verdict verdict;
    std::vector<KeypointTransfer> keypoints;
    std::vector<std::string> boundary_features;
};

struct RunReport {
    CausalReport causal_report;
    std::vector<std::string> features;
    std::size_t expansion_iterations = 0;
    std::vector<TargetReport> targets;  // suitable first, then ascending residual
};

inline void to_json(nlohmann::json& j, const TargetReport& t) {
    j = {{"id", t.id},
         {"match", t.match},
         {"verdict", t.verdict},
         {"keypoints", t.keypoints},
         {"boundary_features", t.boundary_features}};
}

inline void from_json(const nlohmann::json& j, TargetReport& t) {
    j.at("id").get_to(t.id);
    j.at("match").get_to(t.match);
    j.at("verdict").get_to(t.verdict);
    j.at("keypoints").get_to(t.keypoints);
    j.at("boundary_features").get_to(t.boundary_features);
}

inline void to_json(nlohmann::json& j, const RunReport& r) {
    j = {{"causal_report", r.causal_report},
         {"features", r.features},
         {"expansion_iterations", r.expansion_iterations},
         {"targets", r.targets}};
}

inline void from_json(const nlohmann::json& j, RunReport& r) {
    j.at("causal_report").get_to(r.causal_report);
    j.at("features").get_to(r.features);
    j.at("expansion_iterations").get_to(r.expansion_iterations);
    j.at("targets").get_to(r.targets);
}

namespace pipeline_detail {

struct ExpansionState {
    std::size_t iterations = 0;
    std::vector<std::string> added;
    bool exhausted = false;
};

inline std::filesystem::path out_path(const PipelineConfig& config,
                                      const std::string& rel) {
    return std::filesystem::path(config.output_dir) / rel;
}

inline std::filesystem::path target_dir(const PipelineConfig& config,
                                        const std::string& id) {
    return out_path(config, "targets") / id;
}

inline void require_file(const std::filesystem::path& path, const std::string& label) {
    if (!std::filesystem::exists(path)) throw MissingStageInput(label);
}

// Wall time per stage, merged into timings.json. Deliberately outside the
// determinism contract: nothing reads this file back.
inline void write_timing(const PipelineConfig& config, const std::string& stage,
                         double seconds) {
    std::filesystem::path path = out_path(config, "timings.json");
    nlohmann::json doc = nlohmann::json::object();
    if (std::filesystem::exists(path)) {
        std::ifstream in(path, std::ios::binary);
        nlohmann::json existing = nlohmann::json::parse(in, nullptr, false);
        if (existing.is_object()) doc = std::move(existing);
    }
    doc[stage + "_seconds"] = seconds;
    write_json_file(path.string(), doc);
}

struct StageTimer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

inline std::unique_ptr<SuggestBackend> make_backend(const SuggesterConfig& s) {
    if (s.backend == "remote")
        return std::make_unique<RemoteBackend>(s.host, s.port);
    return std::make_unique<CatalogBackend>();
}

inline std::vector<std::string> read_features(const PipelineConfig& config) {
    std::filesystem::path path = out_path(config, "features.json");
    require_file(path, "features.json");
    return read_json_file(path.string()).at("features").get<std::vector<std::string>>();
}

inline ExpansionState read_expansion(const PipelineConfig& config) {
    ExpansionState state;
    std::filesystem::path path = out_path(config, "expansion.json");
    if (!std::filesystem::exists(path)) return state;
    nlohmann::json doc = read_json_file(path.string());
    doc.at("iterations").get_to(state.iterations);
    doc.at("added").get_to(state.added);
    doc.at("exhausted").get_to(state.exhausted);
    return state;
}

inline void write_expansion(const PipelineConfig& config, const ExpansionState& state) {
    write_json_file(out_path(config, "expansion.json").string(),
                    {{"iterations", state.iterations},
                     {"added", state.added},
                     {"exhausted", state.exhausted}});
}

inline void build_dataset(const PipelineConfig& config,
                          const std::vector<std::string>& features) {
    const FamilyDef& def = find_family(config.source_tool.family);
    std::map<std::string, std::vector<double>> grid;
    for (const std::string& f : features)
        grid[f] = feature_grid(find_feature(def, f),
                               config.discovery.grid_points_per_feature);
    std::vector<InterventionRecord> records =
        intervention_dataset(config.source_tool, features, grid);

    std::filesystem::path dataset_dir = out_path(config, "dataset");
    std::filesystem::path tools_dir = dataset_dir / "tools";
    std::filesystem::remove_all(tools_dir);
    std::filesystem::create_directories(tools_dir);

    nlohmann::json manifest_records = nlohmann::json::array();
    for (std::size_t i = 0; i < records.size(); ++i) {
        char prefix[16];
        std::snprintf(prefix, sizeof(prefix), "%03zu_", i);
        std::string file = "tools/" + std::string(prefix) + records[i].feature + ".json";
        write_json_file((dataset_dir / file).string(), records[i].tool);
        manifest_records.push_back({{"feature", records[i].feature},
                                    {"scale", records[i].scale},
                                    {"file", file}});
    }
    write_json_file((dataset_dir / "manifest.json").string(),
                    {{"features", features},
                     {"grid_points_per_feature", config.discovery.grid_points_per_feature},
                     {"source_tool", config.source_tool},
                     {"records", manifest_records}});
}

// One expansion round: ask the backend for the best not-yet-used feature,
// append it to features.json, and rebuild the dataset so discovery sees it.
// Returns false when the budget is spent or the backend has nothing left.
inline bool expand_features(const PipelineConfig& config, ExpansionState& state) {
    if (state.exhausted || state.iterations >= config.recovery_iterations) return false;
    std::vector<std::string> features = read_features(config);
    std::unique_ptr<SuggestBackend> backend = make_backend(config.suggester);
    std::vector<std::string> added;
    try {
        added = expand(features, config.source_tool.family, *backend, 1,
                       derive_seed(config.master_seed, "expand", state.iterations));
    } catch (const Exhausted&) {
        state.exhausted = true;
        write_expansion(config, state);
        return false;
    }

    for (const std::string& f : added) features.push_back(f);
    std::filesystem::path features_path = out_path(config, "features.json");
    nlohmann::json doc = read_json_file(features_path.string());
    doc["features"] = features;
    nlohmann::json expanded = doc.value("expanded", nlohmann::json::array());
    for (const std::string& f : added) expanded.push_back(f);
    doc["expanded"] = expanded;
    write_json_file(features_path.string(), doc);

    ++state.iterations;
    state.added.insert(state.added.end(), added.begin(), added.end());
    write_expansion(config, state);
    build_dataset(config, features);
    return true;
}

// Discovery with the failure-handling loop: when no feature is causal or a
// causal feature has no passing grid point, grow the feature set and retry
// until the expansion budget runs out.
inline CausalReport discover_with_recovery(const PipelineConfig& config,
                                           std::size_t jobs, ExpansionState& state) {
    for (;;) {
        std::filesystem::path manifest_path = out_path(config, "dataset/manifest.json");
        require_file(manifest_path, "dataset/manifest.json");
        nlohmann::json manifest = read_json_file(manifest_path.string());
        ToolModel source = manifest.at("source_tool").get<ToolModel>();
        auto features = manifest.at("features").get<std::vector<std::string>>();
        try {
            return run_discovery(config.task, source, features, config.discovery, jobs);
        } catch (const NoCausalFeatures&) {
            if (!expand_features(config, state)) throw;
        } catch (const NoWorkingRange&) {
            if (!expand_features(config, state)) throw;
        }
    }
}

inline void write_causal_artifacts(const PipelineConfig& config,
                                   const CausalReport& report) {
    write_json_file(out_path(config, "causal_report.json").string(), report);
    std::ofstream csv(out_path(config, "sensitivity.csv"), std::ios::binary);
    if (!csv) throw Error("cannot write sensitivity.csv");
    write_sensitivity_csv(report.curves, csv);
}

inline PointCloud load_target_cloud(const PipelineConfig& config,
                                    const TargetEntry& entry) {
    if (entry.generator) {
        const TargetGenerator& gen = *entry.generator;
        ToolModel tool = make_source_tool(gen.family, default_dimensions(gen.family));
        std::vector<std::pair<std::string, double>> edits(gen.assignment.begin(),
                                                          gen.assignment.end());
        tool = apply_edits(tool, edits);
        std::size_t n = gen.cloud_n != 0 ? gen.cloud_n : config.matcher.cloud_n;
        return tool_to_cloud(tool, n, derive_seed(config.master_seed, "target:" + entry.id));
    }
    return read_cloud_file(entry.cloud_file);
}

// Match, range-check, and (optionally) safety-check one target. The cloud is
// written out and read back before matching so every later stage works from
// the identical quantized coordinates. Returns the final suitability.
inline bool classify_one(const PipelineConfig& config, const CausalReport& report,
                         const std::vector<std::string>& match_features,
                         const TargetEntry& entry, std::size_t jobs) {
    std::filesystem::path dir = target_dir(config, entry.id);
    std::filesystem::create_directories(dir);
    std::string cloud_path = (dir / "cloud.xyz").string();
    write_cloud_file(cloud_path, load_target_cloud(config, entry));
    PointCloud cloud = read_cloud_file(cloud_path);

    MatchResult match = morph_match(
        config.source_tool, match_features, cloud, config.matcher.samples_per_feature,
        config.matcher.passes, config.matcher.cloud_n,
        derive_seed(config.master_seed, "match:" + entry.id), std::nullopt, jobs);
    write_json_file((dir / "match.json").string(), match);

    Verdict verdict = classify_target(match, report, entry.measurements);

    auto mass = entry.measurements.find("mass_kg");
    if (config.safety_check && verdict.suitable && mass != entry.measurements.end()) {
        const FamilyDef& def = find_family(match.matched_tool.family);
        const FeatureSpec& spec = find_feature(def, "mass_kg");
        double scale = mass->second / match.matched_tool.nominal_dimensions.at("mass_kg");
        scale = std::clamp(scale, spec.lo, spec.hi);
        ToolModel at_mass = apply_edit(match.matched_tool, "mass_kg", scale);
        double rate = success_rate(config.task, at_mass, config.discovery.seeds);
        if (rate < config.discovery.success_threshold) {
            verdict.suitable = false;
            verdict.explanation += "; safety check: success rate " +
                                   classify_detail::fmt(rate) +
                                   " with the measured mass applied is below " +
                                   classify_detail::fmt(config.discovery.success_threshold);
        }
    }
    write_json_file((dir / "verdict.json").string(), verdict);
    return verdict.suitable;
}

}  // namespace pipeline_detail

// Proposes the feature set once and freezes it in features.json. Later
// expansion rounds append to the same file.
inline void run_suggest(const PipelineConfig& config, std::size_t jobs = 1) {
    (void)jobs;
    pipeline_detail::StageTimer timer;
    std::filesystem::create_directories(config.output_dir);
    try {
        std::unique_ptr<SuggestBackend> backend =
            pipeline_detail::make_backend(config.suggester);
        ProposeResult result = propose(
            config.suggester.task_text, config.source_tool.family, *backend,
            config.suggester.n_runs, config.suggester.n_candidates,
            config.suggester.top_k, derive_seed(config.master_seed, "suggest"));
        write_json_file(pipeline_detail::out_path(config, "features.json").string(),
                        result);
    } catch (const Error& e) {
        throw StageError("suggest", e.what());
    }
    pipeline_detail::write_timing(config, "suggest", timer.seconds());
}

// Materializes the one-at-a-time edited tools plus a manifest; discovery
// consumes the manifest, everything else is for inspection.
inline void run_dataset(const PipelineConfig& config, std::size_t jobs = 1) {
    (void)jobs;
    pipeline_detail::StageTimer timer;
    std::vector<std::string> features = pipeline_detail::read_features(config);
    try {
        pipeline_detail::build_dataset(config, features);
    } catch (const Error& e) {
        throw StageError("dataset", e.what());
    }
    pipeline_detail::write_timing(config, "dataset", timer.seconds());
}

inline void run_discover(const PipelineConfig& config, std::size_t jobs = 1) {
    pipeline_detail::StageTimer timer;
    pipeline_detail::ExpansionState state = pipeline_detail::read_expansion(config);
    try {
        CausalReport report = pipeline_detail::discover_with_recovery(config, jobs, state);
        pipeline_detail::write_causal_artifacts(config, report);
    } catch (const MissingStageInput&) {
        throw;
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError("discover", e.what());
    }
    pipeline_detail::write_timing(config, "discover", timer.seconds());
}

// Per-target matching and verdicts. When every target comes out unsuitable
// the stage expands the feature set, reruns discovery in place, and
// classifies again, up to the configured number of rounds.
inline void run_classify(const PipelineConfig& config, std::size_t jobs = 1) {
    pipeline_detail::StageTimer timer;
    std::filesystem::path report_path =
        pipeline_detail::out_path(config, "causal_report.json");
    pipeline_detail::require_file(report_path, "causal_report.json");
    pipeline_detail::ExpansionState state = pipeline_detail::read_expansion(config);
    const FamilyDef& def = find_family(config.source_tool.family);

    for (;;) {
        CausalReport report = read_json_file(report_path.string()).get<CausalReport>();
        std::vector<std::string> match_features;
        for (const auto& [feature, range] : report.working_ranges)
            if (!find_feature(def, feature).physical) match_features.push_back(feature);

        bool any_suitable = false;
        for (const TargetEntry& entry : config.targets) {
            try {
                if (pipeline_detail::classify_one(config, report, match_features, entry,
                                                  jobs))
                    any_suitable = true;
            } catch (const Error& e) {
                throw StageError("classify", entry.id, e.what());
            }
        }

        if (config.targets.empty() || any_suitable) break;
        if (!pipeline_detail::expand_features(config, state)) break;
        try {
            CausalReport updated =
                pipeline_detail::discover_with_recovery(config, jobs, state);
            pipeline_detail::write_causal_artifacts(config, updated);
        } catch (const Error& e) {
            throw StageError("discover", e.what());
        }
    }
    pipeline_detail::write_timing(config, "classify", timer.seconds());
}

// Keypoint transfer in the target's frame. The matched tool lives in the
// tool frame; matching aligned candidate clouds to the target by centroid, so
// the same shift maps keypoints over. Families without keypoints get an
// empty list, which is a result, not a failure.
inline void run_transfer(const PipelineConfig& config, std::size_t jobs = 1) {
    (void)jobs;
    pipeline_detail::StageTimer timer;
    for (const TargetEntry& entry : config.targets) {
        std::filesystem::path dir = pipeline_detail::target_dir(config, entry.id);
        pipeline_detail::require_file(dir / "match.json",
                                      "targets/" + entry.id + "/match.json");
        pipeline_detail::require_file(dir / "cloud.xyz",
                                      "targets/" + entry.id + "/cloud.xyz");
        try {
            MatchResult match =
                read_json_file((dir / "match.json").string()).get<MatchResult>();
            PointCloud target = read_cloud_file((dir / "cloud.xyz").string());
            PointCloud tool_cloud =
                tool_to_cloud(match.matched_tool, config.matcher.cloud_n,
                              derive_seed(config.master_seed, "match:" + entry.id));
            Point3 shift = tool_cloud.centroid() - target.centroid();
            std::vector<KeypointTransfer> transfers;
            try {
                transfers = transfer_keypoints(match.matched_tool, target.translated(shift));
            } catch (const NoKeypoints&) {
                write_json_file((dir / "keypoints.json").string(),
                                nlohmann::json::array());
                continue;
            }
            for (KeypointTransfer& t : transfers) t.point = t.point - shift;
            write_json_file((dir / "keypoints.json").string(), transfers);
        } catch (const Error& e) {
            throw StageError("transfer", entry.id, e.what());
        }
    }
    pipeline_detail::write_timing(config, "transfer", timer.seconds());
}

namespace pipeline_detail {

inline void write_text_report(const PipelineConfig& config, const RunReport& report,
                              std::ostream& os) {
    os << "task: " << config.task.variant << "\n";
    os << "source family: " << config.source_tool.family << "\n";
    os << "noise floor: " << classify_detail::fmt(report.causal_report.noise_floor)
       << "\n";
    os << "combination verified: "
       << (report.causal_report.combination_verified ? "yes" : "no") << "\n";
    os << "expansion iterations: " << report.expansion_iterations << "\n";
    os << "features:";
    for (const std::string& f : report.features) os << ' ' << f;
    os << "\n";
    os << "working ranges:\n";
    for (const auto& [feature, range] : report.causal_report.working_ranges)
        os << "  " << feature << ": [" << classify_detail::fmt(range.lo) << ", "
           << classify_detail::fmt(range.hi) << "] effect "
           << classify_detail::fmt(report.causal_report.effect_sizes.at(feature))
           << "\n";
    os << "targets (ranked):\n";
    for (std::size_t i = 0; i < report.targets.size(); ++i) {
        const TargetReport& t = report.targets[i];
        os << "  " << (i + 1) << ". " << t.id << ": "
           << (t.verdict.suitable ? "suitable" : "unsuitable") << ", residual "
           << classify_detail::fmt(t.match.residual) << "\n";
        os << "     " << t.verdict.explanation << "\n";
        for (const KeypointTransfer& k : t.keypoints)
            os << "     keypoint " << k.name << " -> ["
               << classify_detail::fmt(k.point.x) << ", "
               << classify_detail::fmt(k.point.y) << ", "
               << classify_detail::fmt(k.point.z) << "] gap "
               << classify_detail::fmt(k.nn_distance) << "\n";
    }
}

}  // namespace pipeline_detail

// Aggregates everything, writes the boundary-comparison artifacts, and ranks
// targets suitable-first then by ascending residual (id breaks exact ties).
inline RunReport run_report(const PipelineConfig& config, std::size_t jobs = 1) {
    (void)jobs;
    pipeline_detail::StageTimer timer;
    std::filesystem::path report_path =
        pipeline_detail::out_path(config, "causal_report.json");
    pipeline_detail::require_file(report_path, "causal_report.json");
    pipeline_detail::require_file(pipeline_detail::out_path(config, "features.json"),
                                  "features.json");

    RunReport out;
    out.causal_report = read_json_file(report_path.string()).get<CausalReport>();
    out.features = pipeline_detail::read_features(config);
    out.expansion_iterations = pipeline_detail::read_expansion(config).iterations;

    for (const TargetEntry& entry : config.targets) {
        std::filesystem::path dir = pipeline_detail::target_dir(config, entry.id);
        for (const char* file : {"match.json", "verdict.json", "keypoints.json"})
            pipeline_detail::require_file(dir / file,
                                          "targets/" + entry.id + "/" + file);
        pipeline_detail::require_file(dir / "cloud.xyz",
                                      "targets/" + entry.id + "/cloud.xyz");

        TargetReport tr;
        tr.id = entry.id;
        try {
            tr.match = read_json_file((dir / "match.json").string()).get<MatchResult>();
            tr.verdict = read_json_file((dir / "verdict.json").string()).get<Verdict>();
            tr.keypoints = read_json_file((dir / "keypoints.json").string())
                               .get<std::vector<KeypointTransfer>>();
            PointCloud cloud = read_cloud_file((dir / "cloud.xyz").string());
            for (const auto& [feature, scale] : tr.match.assignment) {
                BoundaryComparison cmp = boundary_comparison(
                    cloud, out.causal_report, config.source_tool, feature, tr.match,
                    config.matcher.boundary_cloud_n,
                    derive_seed(config.master_seed, "boundary:" + entry.id + ":" + feature));
                write_cloud_file((dir / (feature + "_target.xyz")).string(),
                                 cmp.target_cloud);
                write_cloud_file((dir / (feature + "_lo.xyz")).string(), cmp.lo_cloud);
                write_cloud_file((dir / (feature + "_hi.xyz")).string(), cmp.hi_cloud);
                if (config.matcher.write_boundary_ppm) {
                    std::ofstream ppm(dir / (feature + ".ppm"), std::ios::binary);
                    if (!ppm) throw Error("cannot write " + feature + ".ppm");
                    render_boundary_ppm(cmp, ppm);
                }
                tr.boundary_features.push_back(feature);
            }
        } catch (const Error& e) {
            throw StageError("report", entry.id, e.what());
        }
        out.targets.push_back(std::move(tr));
    }

    std::stable_sort(out.targets.begin(), out.targets.end(),
                     [](const TargetReport& a, const TargetReport& b) {
                         if (a.verdict.suitable != b.verdict.suitable)
                             return a.verdict.suitable;
                         if (a.match.residual != b.match.residual)
                             return a.match.residual < b.match.residual;
                         return a.id < b.id;
                     });

    try {
        std::ofstream csv(pipeline_detail::out_path(config, "sensitivity.csv"),
                          std::ios::binary);
        if (!csv) throw Error("cannot write sensitivity.csv");
        write_sensitivity_csv(out.causal_report.curves, csv);
        write_json_file(pipeline_detail::out_path(config, "run_report.json").string(),
                        out);
        std::ofstream txt(pipeline_detail::out_path(config, "report.txt"),
                          std::ios::binary);
        if (!txt) throw Error("cannot write report.txt");
        pipeline_detail::write_text_report(config, out, txt);
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError("report", e.what());
    }
    pipeline_detail::write_timing(config, "report", timer.seconds());
    return out;
}

inline RunReport run_end_to_end(const PipelineConfig& config, std::size_t jobs = 1) {
    run_suggest(config, jobs);
    run_dataset(config, jobs);
    run_discover(config, jobs);
    run_classify(config, jobs);
    run_transfer(config, jobs);
    return run_report(config, jobs);
}

}  // namespace toolforge
