#include "ddft/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ddft/runlog.hpp"

namespace ddft {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': not a number: " + value);
    }
}

int to_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': not an integer: " + value);
    }
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("config key '" + key + "': not a boolean: " + value);
}

std::vector<double> parse_levels(const std::string& csv) {
    std::vector<double> levels;
    std::istringstream in(csv);
    std::string token;
    while (std::getline(in, token, ',')) {
        token = trim(token);
        if (token.empty()) continue;
        levels.push_back(to_double("levels", token));
    }
    return levels;
}

EndpointSpec parse_endpoint(const std::string& section_id,
                            const std::map<std::string, std::string>& kv) {
    EndpointSpec spec;
    spec.id = section_id;
    for (const auto& [key, value] : kv) {
        if (key == "kind") spec.kind = value;
        else if (key == "model") spec.model = value;
        else if (key == "base_url") spec.base_url = value;
        else if (key == "path") spec.path = value;
        else if (key == "api_key_env") spec.api_key_env = value;
        else if (key == "temperature") spec.params.temperature = to_double(key, value);
        else if (key == "max_tokens") spec.params.max_tokens = to_int(key, value);
        else if (key == "timeout_s") spec.params.timeout_s = to_int(key, value);
        else if (key == "retries") spec.params.retries = to_int(key, value);
        else if (key == "judge_noise") spec.judge_noise = to_double(key, value);
        else if (key == "sem_base") spec.sim.sem_base = to_double(key, value);
        else if (key == "sem_decay") spec.sim.sem_decay = to_double(key, value);
        else if (key == "ver_strength") spec.sim.ver_strength = to_double(key, value);
        else if (key == "ver_load_sensitivity") spec.sim.ver_load_sensitivity = to_double(key, value);
        else if (key == "fab_reject_prob") spec.sim.fab_reject_prob = to_double(key, value);
        else if (key == "noise_sd") spec.sim.noise_sd = to_double(key, value);
        else if (key == "seed") spec.sim.seed = static_cast<std::uint64_t>(to_int(key, value));
        else throw ConfigError("unknown endpoint key '" + key + "' in section " + section_id);
    }
    return spec;
}

json endpoint_to_json(const EndpointSpec& spec) {
    json j;
    j["id"] = spec.id;
    j["kind"] = spec.kind;
    j["model"] = spec.model;
    j["base_url"] = spec.base_url;
    j["path"] = spec.path;
    j["temperature"] = spec.params.temperature;
    j["max_tokens"] = spec.params.max_tokens;
    j["judge_noise"] = spec.judge_noise;
    j["sim"] = {{"sem_base", spec.sim.sem_base},
                {"sem_decay", spec.sim.sem_decay},
                {"ver_strength", spec.sim.ver_strength},
                {"ver_load_sensitivity", spec.sim.ver_load_sensitivity},
                {"fab_reject_prob", spec.sim.fab_reject_prob},
                {"noise_sd", spec.sim.noise_sd},
                {"seed", spec.sim.seed}};
    return j;
}

}  // namespace

IniSections parse_ini(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in)
        throw ConfigError("cannot open config file: " + file.string());
    IniSections sections;
    std::string line;
    std::string current;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#' || text[0] == ';') continue;
        if (text.front() == '[') {
            if (text.back() != ']')
                throw ConfigError("config line " + std::to_string(line_number) +
                                  ": malformed section header");
            current = trim(text.substr(1, text.size() - 2));
            sections[current];
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_number) +
                              ": expected key = value");
        if (current.empty())
            throw ConfigError("config line " + std::to_string(line_number) +
                              ": key outside any section");
        sections[current][trim(text.substr(0, eq))] = trim(text.substr(eq + 1));
    }
    return sections;
}

RunConfig load_run_config(const std::filesystem::path& file) {
    const IniSections sections = parse_ini(file);
    RunConfig config;
    bool have_interviewer = false;

    for (const auto& [section, kv] : sections) {
        if (section == "run") {
            for (const auto& [key, value] : kv) {
                if (key == "mode") config.mode = value;
                else if (key == "seed") config.seed = static_cast<std::uint64_t>(to_int(key, value));
                else if (key == "parallel") config.parallelism = to_int(key, value);
                else if (key == "levels") config.grid = parse_levels(value);
                else if (key == "theta") config.theta = to_double(key, value);
                else if (key == "hoc_semantics") config.hoc_semantics = hoc_semantics_from_string(value);
                else if (key == "normalization") config.normalization = normalization_from_string(value);
                else if (key == "compression_strategy") config.strategy = compression_strategy_from_string(value);
                else if (key == "interviewer_sees_reference") config.interviewer_sees_reference = to_bool(key, value);
                else if (key == "concepts_dir") config.concepts_dir = value;
                else if (key == "templates_dir") config.templates_dir = value;
                else if (key == "out") config.out_dir = value;
                else if (key == "replay_file") config.replay_file = value;
                else if (key == "record") config.record = to_bool(key, value);
                else throw ConfigError("unknown [run] key: " + key);
            }
        } else if (section == "phenotype") {
            for (const auto& [key, value] : kv) {
                if (key == "robust_min") config.phenotype.robust_min = to_double(key, value);
                else if (key == "competent_min") config.phenotype.competent_min = to_double(key, value);
                else throw ConfigError("unknown [phenotype] key: " + key);
            }
        } else if (section == "danger_zone") {
            for (const auto& [key, value] : kv) {
                if (key == "sas_min") config.danger_zone.sas_min = to_double(key, value);
                else if (key == "far_max") config.danger_zone.far_max = to_double(key, value);
                else throw ConfigError("unknown [danger_zone] key: " + key);
            }
        } else if (section == "interviewer") {
            config.interviewer = parse_endpoint("interviewer", kv);
            have_interviewer = true;
        } else if (section.rfind("judge.", 0) == 0) {
            config.judges.push_back(parse_endpoint(section.substr(6), kv));
        } else if (section.rfind("subject.", 0) == 0) {
            config.subjects.push_back(parse_endpoint(section.substr(8), kv));
        } else {
            throw ConfigError("unknown config section: [" + section + "]");
        }
    }
    if (!have_interviewer)
        throw ConfigError("config missing [interviewer] section");
    return config;
}

void validate_config(const RunConfig& config) {
    if (config.mode != "live" && config.mode != "simulated" && config.mode != "replay")
        throw ConfigError("mode must be live, simulated, or replay: " + config.mode);
    if (config.parallelism < 1)
        throw ConfigError("parallelism must be >= 1");
    if (config.grid.empty() || config.grid.front() != 0.0)
        throw ConfigError("compression grid must start at 0.0");
    for (std::size_t i = 0; i < config.grid.size(); ++i) {
        if (config.grid[i] < 0.0 || config.grid[i] > 1.0)
            throw ConfigError("compression grid values must lie in [0,1]");
        if (i > 0 && config.grid[i] <= config.grid[i - 1])
            throw ConfigError("compression grid must be strictly ascending");
    }
    if (config.judges.size() != 3)
        throw ConfigError("exactly 3 judge endpoints required, got " +
                          std::to_string(config.judges.size()));
    if (config.subjects.empty())
        throw ConfigError("at least one subject endpoint required");
    if (config.theta <= 0.0 || config.theta > 1.0)
        throw ConfigError("theta must lie in (0,1]");
    if (config.concepts_dir.empty() && config.preloaded_concepts.empty())
        throw ConfigError("no concepts configured (concepts_dir is empty)");
    if (config.mode == "replay" && config.replay_file.empty())
        throw ConfigError("replay mode requires replay_file");
}

std::string config_digest(const RunConfig& config) {
    // Execution knobs (parallelism, out_dir) stay out of the digest: they do
    // not change what a run produces.
    json j;
    j["mode"] = config.mode;
    j["seed"] = config.seed;
    j["grid"] = config.grid;
    j["theta"] = config.theta;
    j["hoc_semantics"] = to_string(config.hoc_semantics);
    j["normalization"] = to_string(config.normalization);
    j["phenotype"] = {{"robust_min", config.phenotype.robust_min},
                      {"competent_min", config.phenotype.competent_min}};
    j["danger_zone"] = {{"sas_min", config.danger_zone.sas_min},
                        {"far_max", config.danger_zone.far_max}};
    j["strategy"] = to_string(config.strategy);
    j["interviewer_sees_reference"] = config.interviewer_sees_reference;
    j["concepts_dir"] = config.concepts_dir;
    j["templates_dir"] = config.templates_dir;
    j["interviewer"] = endpoint_to_json(config.interviewer);
    j["judges"] = json::array();
    for (const auto& judge : config.judges) j["judges"].push_back(endpoint_to_json(judge));
    j["subjects"] = json::array();
    for (const auto& subject : config.subjects) j["subjects"].push_back(endpoint_to_json(subject));
    j["preloaded_concepts"] = json::array();
    for (const auto& ref : config.preloaded_concepts)
        j["preloaded_concepts"].push_back(ref.concept_id);
    return md5_hex(j.dump());
}

}  // namespace ddft
