#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ddft/config.hpp"
#include "ddft/jury.hpp"
#include "ddft/metrics.hpp"
#include "ddft/runlog.hpp"
#include "ddft/stats.hpp"

namespace ddft {

struct RunPaths {
    std::filesystem::path log;
    std::filesystem::path checksum;
};

// Executes |subjects| x |concepts| x |grid| sessions under the configured
// parallelism bound. Completed transcripts are committed to the log in
// deterministic session order regardless of worker scheduling; partial
// failures are recorded and excluded from metrics. Writes log + checksum
// under config.out_dir.
RunPaths run(const RunConfig& config);

struct TurnCorrelationRow {
    int turn = 0;
    int n = 0;  // models contributing
    double rho = 0.0;
    double p = 1.0;
};

struct DangerZoneRow {
    std::string model_id;
    double rate = 0.0;
};

struct GranularityRow {
    std::string label;  // e.g. "3-level (0, 0.5, 1)"
    double tau = 0.0;
    int n_models = 0;
};

struct Accounting {
    int sessions_total = 0;
    int sessions_completed = 0;
    int sessions_aborted = 0;
    int transcripts_4turn = 0;
    int transcripts_5turn = 0;
    int turn_records = 0;
    int nominal_turn_capacity = 0;  // completed sessions x 5 scheduled turns
    double turn5_trigger_rate = 0.0;
};

struct AnalysisBundle {
    RunMeta meta;
    std::vector<ModelProfile> profiles;  // ranked, best first
    std::vector<std::string> ranking;
    std::map<std::string, Curve> far_curves;  // model -> level -> mean score
    std::map<std::string, Curve> sas_curves;
    std::vector<TurnCorrelationRow> turn_ci;
    std::vector<DangerZoneRow> danger;
    std::optional<ReliabilityReport> reliability;
    std::optional<AnovaResult> anova_far;  // turn-level FAR grouped by concept
    std::optional<AnovaResult> anova_sas;
    std::vector<GranularityRow> granularity;
    std::optional<FormulaStability> formula_stability;
    Accounting accounting;
    std::vector<std::string> warnings;
};

struct AnalyzeOptions {
    std::optional<double> theta;                       // override log meta
    std::optional<NormalizationMode> normalization;    // override log meta
    bool include_partial = false;  // include turns from aborted sessions
};

// Pure function of the log: repeated invocation yields identical bundles.
AnalysisBundle analyze(const RunLogData& log, const AnalyzeOptions& options = {});

nlohmann::json bundle_to_json(const AnalysisBundle& bundle);

// Synthetic end-to-end pipeline: builds a simulated roster and offline
// interviewer/judges, runs every session, analyzes, and reports.
struct SimulateOptions {
    std::filesystem::path out_dir = "out";
    std::uint64_t seed = 42;
    int n_models = 9;
    std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0};
    double theta = 0.70;
    int parallelism = 1;
    std::string concepts_dir;  // empty -> built-in corpus
    bool write_report = true;
};

struct SimulateResult {
    RunPaths paths;
    AnalysisBundle bundle;
};

SimulateResult simulate_run(const SimulateOptions& options);

// The RunConfig a simulate invocation executes (exposed for tests).
RunConfig make_simulated_config(const SimulateOptions& options);

}  // namespace ddft
