#include "ddft/runlog.hpp"

#include <openssl/evp.h>

#include <sstream>

namespace ddft {

using nlohmann::json;

nlohmann::json meta_to_json(const RunMeta& meta) {
    json j;
    j["type"] = "meta";
    j["version"] = meta.version;
    j["config_digest"] = meta.config_digest;
    j["seed"] = meta.seed;
    j["mode"] = meta.mode;
    j["grid"] = meta.grid;
    j["theta"] = meta.theta;
    j["hoc_semantics"] = to_string(meta.hoc_semantics);
    j["normalization"] = to_string(meta.normalization);
    j["phenotype"] = {{"robust_min", meta.phenotype.robust_min},
                      {"competent_min", meta.phenotype.competent_min}};
    j["danger_zone"] = {{"sas_min", meta.danger_zone.sas_min},
                        {"far_max", meta.danger_zone.far_max}};
    j["compression_strategy"] = meta.compression_strategy;
    j["models"] = meta.models;
    j["concepts"] = meta.concepts;
    return j;
}

RunMeta meta_from_json(const nlohmann::json& j) {
    RunMeta meta;
    meta.version = j.at("version").get<int>();
    meta.config_digest = j.at("config_digest").get<std::string>();
    meta.seed = j.at("seed").get<std::uint64_t>();
    meta.mode = j.at("mode").get<std::string>();
    meta.grid = j.at("grid").get<std::vector<double>>();
    meta.theta = j.at("theta").get<double>();
    meta.hoc_semantics = hoc_semantics_from_string(j.at("hoc_semantics").get<std::string>());
    meta.normalization = normalization_from_string(j.at("normalization").get<std::string>());
    meta.phenotype.robust_min = j.at("phenotype").at("robust_min").get<double>();
    meta.phenotype.competent_min = j.at("phenotype").at("competent_min").get<double>();
    meta.danger_zone.sas_min = j.at("danger_zone").at("sas_min").get<double>();
    meta.danger_zone.far_max = j.at("danger_zone").at("far_max").get<double>();
    meta.compression_strategy = j.at("compression_strategy").get<std::string>();
    meta.models = j.at("models").get<std::vector<std::string>>();
    meta.concepts = j.at("concepts").get<std::vector<std::string>>();
    return meta;
}

nlohmann::json transcript_to_json(const SessionTranscript& transcript) {
    json j;
    j["type"] = "transcript";
    j["model"] = transcript.model_id;
    j["concept"] = transcript.concept_id;
    j["level"] = transcript.level;
    j["status"] = to_string(transcript.status);
    j["complete"] = transcript.complete;
    if (transcript.fabricated_expert.present()) {
        j["fabricated_expert"] = {{"name", transcript.fabricated_expert.name},
                                  {"claim", transcript.fabricated_expert.claim}};
    } else {
        j["fabricated_expert"] = nullptr;
    }
    j["turns"] = json::array();
    for (const auto& turn : transcript.turns) {
        json t;
        t["ordinal"] = turn.ordinal;
        t["prompt"] = turn.prompt;
        t["response"] = turn.response;
        json v;
        v["consensus_far"] = turn.verdict.consensus_far;
        v["consensus_sas"] = turn.verdict.consensus_sas;
        v["far_variance"] = turn.verdict.far_variance;
        v["sas_variance"] = turn.verdict.sas_variance;
        v["judges"] = json::array();
        for (const auto& score : turn.verdict.scores) {
            v["judges"].push_back({{"id", score.judge_id},
                                   {"far", score.far},
                                   {"sas", score.sas},
                                   {"justification", score.justification}});
        }
        t["verdict"] = v;
        j["turns"].push_back(t);
    }
    return j;
}

SessionTranscript transcript_from_json(const nlohmann::json& j) {
    SessionTranscript transcript;
    transcript.model_id = j.at("model").get<std::string>();
    transcript.concept_id = j.at("concept").get<std::string>();
    transcript.level = j.at("level").get<double>();
    transcript.status = session_status_from_string(j.at("status").get<std::string>());
    transcript.complete = j.at("complete").get<bool>();
    if (!j.at("fabricated_expert").is_null()) {
        transcript.fabricated_expert.name = j.at("fabricated_expert").at("name").get<std::string>();
        transcript.fabricated_expert.claim = j.at("fabricated_expert").at("claim").get<std::string>();
    }
    for (const auto& t : j.at("turns")) {
        TurnEntry entry;
        entry.ordinal = t.at("ordinal").get<int>();
        entry.prompt = t.at("prompt").get<std::string>();
        entry.response = t.at("response").get<std::string>();
        const auto& v = t.at("verdict");
        entry.verdict.consensus_far = v.at("consensus_far").get<double>();
        entry.verdict.consensus_sas = v.at("consensus_sas").get<double>();
        entry.verdict.far_variance = v.at("far_variance").get<double>();
        entry.verdict.sas_variance = v.at("sas_variance").get<double>();
        for (const auto& s : v.at("judges")) {
            JudgeScore score;
            score.judge_id = s.at("id").get<std::string>();
            score.far = s.at("far").get<double>();
            score.sas = s.at("sas").get<double>();
            score.justification = s.at("justification").get<std::string>();
            entry.verdict.scores.push_back(std::move(score));
        }
        transcript.turns.push_back(std::move(entry));
    }
    return transcript;
}

std::vector<TurnRecord> transcript_turn_records(const SessionTranscript& transcript) {
    std::vector<TurnRecord> records;
    records.reserve(transcript.turns.size());
    for (const auto& turn : transcript.turns) {
        TurnRecord record;
        record.model_id = transcript.model_id;
        record.concept_id = transcript.concept_id;
        record.level = transcript.level;
        record.turn = turn.ordinal;
        record.consensus_far = turn.verdict.consensus_far;
        record.consensus_sas = turn.verdict.consensus_sas;
        records.push_back(std::move(record));
    }
    return records;
}

RunLogWriter::RunLogWriter(const std::filesystem::path& log_path) : path_(log_path) {
    if (log_path.has_parent_path())
        std::filesystem::create_directories(log_path.parent_path());
    out_.open(log_path, std::ios::binary | std::ios::trunc);
    if (!out_)
        throw IoError("cannot open run log for writing: " + log_path.string());
}

void RunLogWriter::write_line(const nlohmann::json& record) {
    out_ << record.dump() << '\n';
    out_.flush();
}

void RunLogWriter::write_meta(const RunMeta& meta) { write_line(meta_to_json(meta)); }

void RunLogWriter::write_transcript(const SessionTranscript& transcript) {
    write_line(transcript_to_json(transcript));
    if (!transcript.complete) return;
    for (const auto& record : transcript_turn_records(transcript)) {
        json j;
        j["type"] = "turn_record";
        j["model"] = record.model_id;
        j["concept"] = record.concept_id;
        j["level"] = record.level;
        j["turn"] = record.turn;
        j["consensus_far"] = record.consensus_far;
        j["consensus_sas"] = record.consensus_sas;
        write_line(j);
    }
}

void RunLogWriter::write_failure(const FailureRecord& failure) {
    json j;
    j["type"] = "failure";
    j["model"] = failure.model_id;
    j["concept"] = failure.concept_id;
    j["level"] = failure.level;
    j["error"] = failure.error;
    write_line(j);
}

std::filesystem::path RunLogWriter::finalize() {
    out_.close();
    const std::filesystem::path sidecar = checksum_path_for(path_);
    std::ofstream cs(sidecar, std::ios::binary | std::ios::trunc);
    if (!cs)
        throw IoError("cannot write checksum sidecar: " + sidecar.string());
    cs << md5_hex_of_file(path_) << "  " << path_.filename().string() << '\n';
    return sidecar;
}

RunLogData read_run_log(const std::filesystem::path& log_path) {
    std::ifstream in(log_path, std::ios::binary);
    if (!in)
        throw IoError("cannot open run log: " + log_path.string());
    RunLogData data;
    bool have_meta = false;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::exception& e) {
            throw IoError(std::string("malformed run log line: ") + e.what());
        }
        const std::string type = record.at("type").get<std::string>();
        if (type == "meta") {
            data.meta = meta_from_json(record);
            have_meta = true;
        } else if (type == "transcript") {
            data.transcripts.push_back(transcript_from_json(record));
        } else if (type == "turn_record") {
            TurnRecord r;
            r.model_id = record.at("model").get<std::string>();
            r.concept_id = record.at("concept").get<std::string>();
            r.level = record.at("level").get<double>();
            r.turn = record.at("turn").get<int>();
            r.consensus_far = record.at("consensus_far").get<double>();
            r.consensus_sas = record.at("consensus_sas").get<double>();
            data.turn_records.push_back(std::move(r));
        } else if (type == "failure") {
            FailureRecord f;
            f.model_id = record.at("model").get<std::string>();
            f.concept_id = record.at("concept").get<std::string>();
            f.level = record.at("level").get<double>();
            f.error = record.at("error").get<std::string>();
            data.failures.push_back(std::move(f));
        } else {
            throw IoError("unknown run log record type: " + type);
        }
    }
    if (!have_meta)
        throw IoError("run log has no meta record: " + log_path.string());
    return data;
}

std::string md5_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_md5(), nullptr) != 1)
        throw Error("md5 digest failed");
    std::ostringstream hex;
    hex << std::hex << std::setfill('0');
    for (unsigned int i = 0; i < length; ++i)
        hex << std::setw(2) << static_cast<int>(digest[i]);
    return hex.str();
}

std::string md5_hex_of_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw IoError("cannot read file for checksum: " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string content = buf.str();
    return md5_hex(content);
}

std::filesystem::path checksum_path_for(const std::filesystem::path& log_path) {
    std::filesystem::path sidecar = log_path;
    sidecar += ".md5";
    return sidecar;
}

void verify_checksum(const std::filesystem::path& log_path) {
    const std::filesystem::path sidecar = checksum_path_for(log_path);
    std::ifstream in(sidecar);
    if (!in)
        throw IoError("missing checksum sidecar: " + sidecar.string());
    std::string expected;
    in >> expected;
    if (expected.empty())
        throw IoError("empty checksum sidecar: " + sidecar.string());
    const std::string actual = md5_hex_of_file(log_path);
    if (actual != expected)
        throw ChecksumMismatch("run log checksum mismatch: expected " + expected + ", got " +
                               actual);
}

}  // namespace ddft
