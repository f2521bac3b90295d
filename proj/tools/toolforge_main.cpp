#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "toolforge/pipeline/config.hpp"
#include "toolforge/pipeline/stages.hpp"

// Exit codes: 0 success, 2 bad configuration or usage, 3 a stage failed.

namespace {

void dispatch(const std::string& command, const toolforge::PipelineConfig& config,
              std::size_t jobs) {
    if (command == "suggest") toolforge::run_suggest(config, jobs);
    else if (command == "dataset") toolforge::run_dataset(config, jobs);
    else if (command == "discover") toolforge::run_discover(config, jobs);
    else if (command == "classify") toolforge::run_classify(config, jobs);
    else if (command == "transfer") toolforge::run_transfer(config, jobs);
    else if (command == "report") toolforge::run_report(config, jobs);
    else toolforge::run_end_to_end(config, jobs);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"counterfactual tool suitability pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;

    const char* names[] = {"suggest", "dataset", "discover", "classify",
                           "transfer", "report", "run"};
    const char* descs[] = {"propose the feature set",
                           "materialize the intervention dataset",
                           "sensitivity scan, causal flags, working ranges",
                           "match targets and judge suitability",
                           "transfer keypoints onto target clouds",
                           "aggregate artifacts into the run report",
                           "all stages in order"};
    for (std::size_t i = 0; i < 7; ++i) {
        CLI::App* sub = app.add_subcommand(names[i], descs[i]);
        sub->add_option("--config", config_path, "pipeline config (JSON)")->required();
        sub->add_option("--out", out_dir, "override output_dir from the config");
        sub->add_option("--seed", seed, "override master_seed from the config");
        sub->add_option("--jobs", jobs, "worker threads for parallel sections");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    }

    CLI::App* chosen = app.get_subcommands().front();
    try {
        toolforge::PipelineConfig config = toolforge::load_config(config_path);
        if (chosen->count("--out") != 0) config.output_dir = out_dir;
        if (chosen->count("--seed") != 0) config.master_seed = seed;
        if (jobs == 0) jobs = 1;
        dispatch(chosen->get_name(), config, jobs);
    } catch (const toolforge::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
