#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "ddft/harness.hpp"
#include "ddft/report.hpp"

namespace {

struct CommonOverrides {
    std::string mode;
    double theta = -1.0;
    std::string levels;
    long long seed = -1;
    int parallel = 0;
    std::string out;
};

void apply_overrides(ddft::RunConfig& config, const CommonOverrides& overrides) {
    if (!overrides.mode.empty()) config.mode = overrides.mode;
    if (overrides.theta >= 0.0) config.theta = overrides.theta;
    if (overrides.seed >= 0) config.seed = static_cast<std::uint64_t>(overrides.seed);
    if (overrides.parallel > 0) config.parallelism = overrides.parallel;
    if (!overrides.out.empty()) config.out_dir = overrides.out;
    if (!overrides.levels.empty()) {
        std::vector<double> grid;
        std::stringstream in(overrides.levels);
        std::string token;
        while (std::getline(in, token, ','))
            if (!token.empty()) grid.push_back(std::stod(token));
        config.grid = grid;
    }
}

std::vector<double> parse_levels_flag(const std::string& csv) {
    std::vector<double> grid;
    std::stringstream in(csv);
    std::string token;
    while (std::getline(in, token, ','))
        if (!token.empty()) grid.push_back(std::stod(token));
    return grid;
}

void write_analysis_json(const ddft::AnalysisBundle& bundle, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / "analysis.json", std::ios::binary | std::ios::trunc);
    if (!out)
        throw ddft::IoError("cannot write analysis.json under " + dir.string());
    out << ddft::bundle_to_json(bundle).dump(2) << '\n';
}

void print_ranking(const ddft::AnalysisBundle& bundle) {
    int place = 1;
    for (const auto& profile : bundle.profiles) {
        std::printf("%2d. %-24s ci=%.3f  %s\n", place++, profile.model_id.c_str(),
                    profile.ci_norm, ddft::to_string(profile.phenotype).c_str());
    }
    if (bundle.profiles.empty()) std::printf("(no models ranked)\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DDFT evaluation harness: compression-stress and fabrication-trap "
                 "protocol runner with jury scoring and metric analysis"};
    app.require_subcommand(1);

    CommonOverrides overrides;
    std::string config_path;
    std::string log_path;
    bool include_partial = false;
    std::string normalization;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--mode", overrides.mode, "Override mode: live|simulated|replay");
        cmd->add_option("--theta", overrides.theta, "Override FAR threshold for HOC");
        cmd->add_option("--levels", overrides.levels, "Override compression grid (csv of reals)");
        cmd->add_option("--seed", overrides.seed, "Override run seed");
        cmd->add_option("--parallel", overrides.parallel, "Override session parallelism");
        cmd->add_option("--out", overrides.out, "Output directory");
    };

    auto* run_cmd = app.add_subcommand("run", "Execute every configured session and write the run log");
    run_cmd->add_option("--config", config_path, "Run configuration file")->required();
    add_common(run_cmd);

    auto* analyze_cmd = app.add_subcommand("analyze", "Compute profiles and statistics from a run log");
    analyze_cmd->add_option("--log", log_path, "Run log (JSONL)")->required();
    analyze_cmd->add_option("--out", overrides.out, "Output directory for analysis.json");
    analyze_cmd->add_option("--theta", overrides.theta, "Override FAR threshold for HOC");
    analyze_cmd->add_option("--norm", normalization, "CI normalization: identity|minmax");
    analyze_cmd->add_flag("--include-partial", include_partial,
                          "Include turns from aborted sessions");

    auto* report_cmd = app.add_subcommand("report", "Write profile CSV, summary, and curve data");
    report_cmd->add_option("--log", log_path, "Run log (JSONL)")->required();
    report_cmd->add_option("--out", overrides.out, "Output directory")->required();
    report_cmd->add_option("--theta", overrides.theta, "Override FAR threshold for HOC");
    report_cmd->add_option("--norm", normalization, "CI normalization: identity|minmax");

    int sim_models = 9;
    auto* simulate_cmd = app.add_subcommand(
        "simulate", "Generate a synthetic population and run the pipeline end to end");
    simulate_cmd->add_option("--models", sim_models, "Number of synthetic subjects");
    std::string concepts_dir;
    simulate_cmd->add_option("--concepts", concepts_dir,
                             "Reference text directory (default: built-in corpus)");
    add_common(simulate_cmd);

    auto* verify_cmd = app.add_subcommand("verify", "Check a run log against its checksum sidecar");
    verify_cmd->add_option("--log", log_path, "Run log (JSONL)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            ddft::RunConfig config = ddft::load_run_config(config_path);
            apply_overrides(config, overrides);
            const ddft::RunPaths paths = ddft::run(config);
            std::printf("log:      %s\n", paths.log.string().c_str());
            std::printf("checksum: %s\n", paths.checksum.string().c_str());
        } else if (analyze_cmd->parsed()) {
            const ddft::RunLogData data = ddft::read_run_log(log_path);
            ddft::AnalyzeOptions options;
            if (overrides.theta >= 0.0) options.theta = overrides.theta;
            if (!normalization.empty())
                options.normalization = ddft::normalization_from_string(normalization);
            options.include_partial = include_partial;
            const ddft::AnalysisBundle bundle = ddft::analyze(data, options);
            const std::filesystem::path out_dir =
                overrides.out.empty() ? std::filesystem::path(log_path).parent_path()
                                      : std::filesystem::path(overrides.out);
            write_analysis_json(bundle, out_dir);
            print_ranking(bundle);
            std::printf("analysis: %s\n", (out_dir / "analysis.json").string().c_str());
        } else if (report_cmd->parsed()) {
            const ddft::RunLogData data = ddft::read_run_log(log_path);
            ddft::AnalyzeOptions options;
            if (overrides.theta >= 0.0) options.theta = overrides.theta;
            if (!normalization.empty())
                options.normalization = ddft::normalization_from_string(normalization);
            const ddft::AnalysisBundle bundle = ddft::analyze(data, options);
            const ddft::ReportPaths paths = ddft::report(bundle, overrides.out);
            write_analysis_json(bundle, overrides.out);
            std::printf("profiles: %s\n", paths.profiles_csv.string().c_str());
            std::printf("summary:  %s\n", paths.summary_txt.string().c_str());
            std::printf("curves:   %s\n", paths.curves_csv.string().c_str());
        } else if (simulate_cmd->parsed()) {
            ddft::SimulateOptions options;
            if (!overrides.out.empty()) options.out_dir = overrides.out;
            if (overrides.seed >= 0) options.seed = static_cast<std::uint64_t>(overrides.seed);
            if (overrides.theta >= 0.0) options.theta = overrides.theta;
            if (overrides.parallel > 0) options.parallelism = overrides.parallel;
            if (!overrides.levels.empty()) options.grid = parse_levels_flag(overrides.levels);
            options.n_models = sim_models;
            options.concepts_dir = concepts_dir;
            const ddft::SimulateResult result = ddft::simulate_run(options);
            print_ranking(result.bundle);
            std::printf("log:      %s\n", result.paths.log.string().c_str());
            std::printf("checksum: %s\n", result.paths.checksum.string().c_str());
        } else if (verify_cmd->parsed()) {
            ddft::verify_checksum(log_path);
            std::printf("checksum ok: %s\n", log_path.c_str());
        }
    } catch (const ddft::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
