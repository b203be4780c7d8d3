#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ddft/metrics.hpp"
#include "ddft/protocol.hpp"

namespace ddft {

// Run metadata written once, before the first session. Carries everything
// analysis needs, so a log is self-describing without the config file.
// Deliberately free of wall-clock fields: a fixed-seed simulated run must
// produce a byte-identical log.
struct RunMeta {
    int version = 1;
    std::string config_digest;
    std::uint64_t seed = 0;
    std::string mode;
    std::vector<double> grid;
    double theta = 0.70;
    HocSemantics hoc_semantics = HocSemantics::FirstCrossing;
    NormalizationMode normalization = NormalizationMode::Identity;
    PhenotypeThresholds phenotype;
    DangerZoneThresholds danger_zone;
    std::string compression_strategy = "prefix";
    std::vector<std::string> models;
    std::vector<std::string> concepts;
};

struct FailureRecord {
    std::string model_id;
    std::string concept_id;
    double level = 0.0;
    std::string error;
};

struct RunLogData {
    RunMeta meta;
    std::vector<SessionTranscript> transcripts;
    std::vector<TurnRecord> turn_records;  // complete sessions only
    std::vector<FailureRecord> failures;
};

nlohmann::json meta_to_json(const RunMeta& meta);
RunMeta meta_from_json(const nlohmann::json& j);
nlohmann::json transcript_to_json(const SessionTranscript& transcript);
SessionTranscript transcript_from_json(const nlohmann::json& j);

// Turn records flattened from a transcript for the metric pipeline.
std::vector<TurnRecord> transcript_turn_records(const SessionTranscript& transcript);

// Append-only JSON Lines writer. One record per line: meta first, then per
// session a transcript line followed by its turn_record lines (complete
// sessions) or a failure line. finalize() writes the MD5 checksum sidecar.
class RunLogWriter {
public:
    explicit RunLogWriter(const std::filesystem::path& log_path);

    void write_meta(const RunMeta& meta);
    void write_transcript(const SessionTranscript& transcript);
    void write_failure(const FailureRecord& failure);
    std::filesystem::path finalize();  // returns the checksum path

    const std::filesystem::path& path() const { return path_; }

private:
    void write_line(const nlohmann::json& record);

    std::filesystem::path path_;
    std::ofstream out_;
};

RunLogData read_run_log(const std::filesystem::path& log_path);

std::string md5_hex(std::string_view data);
std::string md5_hex_of_file(const std::filesystem::path& file);

std::filesystem::path checksum_path_for(const std::filesystem::path& log_path);

// Recomputes the log checksum and compares against the sidecar. Any byte
// mutation -> ChecksumMismatch.
void verify_checksum(const std::filesystem::path& log_path);

}  // namespace ddft
