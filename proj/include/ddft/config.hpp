#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ddft/clients.hpp"
#include "ddft/compression.hpp"
#include "ddft/metrics.hpp"
#include "ddft/sim.hpp"

namespace ddft {

// One endpoint description from config. kind selects the connector; the
// remaining fields apply per kind. Credentials are named by environment
// variable only.
struct EndpointSpec {
    std::string id;
    std::string kind = "simulated";  // live | simulated | replay
    std::string model;
    std::string base_url;
    std::string path = "/v1/chat/completions";
    std::string api_key_env;
    ChatParams params;
    SimSubjectParams sim;       // simulated subjects
    double judge_noise = 0.05;  // simulated judges
};

struct RunConfig {
    std::string mode = "simulated";  // live | simulated | replay
    std::uint64_t seed = 42;
    int parallelism = 1;
    std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0};
    double theta = 0.70;
    HocSemantics hoc_semantics = HocSemantics::FirstCrossing;
    NormalizationMode normalization = NormalizationMode::Identity;
    PhenotypeThresholds phenotype;
    DangerZoneThresholds danger_zone;
    CompressionStrategy strategy = CompressionStrategy::Prefix;
    bool interviewer_sees_reference = false;

    std::string concepts_dir;
    std::string templates_dir;  // empty -> built-in templates
    std::string out_dir = "out";
    std::string replay_file;  // replay mode: recorded-call store
    bool record = false;      // live mode: persist calls for later replay

    EndpointSpec interviewer;
    std::vector<EndpointSpec> judges;
    std::vector<EndpointSpec> subjects;

    // Used instead of concepts_dir when nonempty (simulate path).
    std::vector<ReferenceText> preloaded_concepts;
};

// Key/value sections parsed from the structured-text config format.
using IniSections = std::map<std::string, std::map<std::string, std::string>>;

IniSections parse_ini(const std::filesystem::path& file);

RunConfig load_run_config(const std::filesystem::path& file);

// Grid ascending and including 0.0, parallelism >= 1, exactly three judges,
// known mode; throws ConfigError before any session starts.
void validate_config(const RunConfig& config);

// MD5 over the canonical JSON serialization (endpoint credentials excluded).
std::string config_digest(const RunConfig& config);

}  // namespace ddft
