#include "ddft/harness.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdio>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "ddft/corpus.hpp"
#include "ddft/report.hpp"
#include "ddft/sim.hpp"

namespace ddft {

using nlohmann::json;

namespace {

enum class EndpointRole { Subject, Interviewer, Judge };

std::string level_key(double level) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", level);
    return buf;
}

std::string effective_kind(const EndpointSpec& spec, const std::string& mode) {
    if (mode == "replay" && spec.kind == "live") return "replay";
    return spec.kind;
}

std::shared_ptr<ChatEndpoint> make_endpoint(const EndpointSpec& spec, EndpointRole role,
                                            const RunConfig& config,
                                            const std::shared_ptr<TranscriptStore>& replay_store,
                                            const std::shared_ptr<TranscriptStore>& record_store,
                                            const CompressionLevel* level,
                                            std::uint64_t session_seed) {
    const std::string kind = effective_kind(spec, config.mode);
    if (kind == "simulated") {
        switch (role) {
            case EndpointRole::Judge:
                return std::make_shared<SimJudgeEndpoint>(spec.id, spec.judge_noise);
            case EndpointRole::Interviewer:
                return std::make_shared<SimInterviewerEndpoint>(spec.id);
            case EndpointRole::Subject:
                if (level == nullptr)
                    throw ConfigError("simulated subject requires a session compression level");
                return std::make_shared<SimSubjectEndpoint>(spec.id, spec.sim, *level,
                                                            session_seed);
        }
    }
    if (kind == "replay") {
        if (!replay_store)
            throw ConfigError("replay endpoint '" + spec.id + "' without a replay store");
        return std::make_shared<ReplayEndpoint>(spec.id, spec.params, replay_store);
    }
    if (kind == "live") {
        HttpChatEndpoint::Options options;
        options.id = spec.id;
        options.model = spec.model.empty() ? spec.id : spec.model;
        options.base_url = spec.base_url;
        options.path = spec.path;
        if (!spec.api_key_env.empty()) options.api_key_env = spec.api_key_env;
        options.params = spec.params;
        std::shared_ptr<ChatEndpoint> endpoint =
            std::make_shared<HttpChatEndpoint>(std::move(options));
        if (record_store)
            endpoint = std::make_shared<RecordingEndpoint>(endpoint, record_store);
        return endpoint;
    }
    throw ConfigError("unknown endpoint kind '" + spec.kind + "' for " + spec.id);
}

struct SessionCell {
    const EndpointSpec* subject = nullptr;
    const ReferenceText* concept_ref = nullptr;
    double level = 0.0;
};

struct CellResult {
    bool done = false;
    std::optional<SessionTranscript> transcript;
    std::optional<FailureRecord> failure;
};

std::vector<double> rank_positions(const std::vector<std::string>& ids,
                                   const std::vector<std::string>& ranking) {
    std::vector<double> positions(ids.size(), 0.0);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto it = std::find(ranking.begin(), ranking.end(), ids[i]);
        positions[i] = static_cast<double>(std::distance(ranking.begin(), it));
    }
    return positions;
}

std::vector<std::string> ranking_of(const std::vector<std::pair<std::string, double>>& scored) {
    auto sorted = scored;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::vector<std::string> ids;
    ids.reserve(sorted.size());
    for (const auto& [id, score] : sorted) ids.push_back(id);
    return ids;
}

}  // namespace

RunPaths run(const RunConfig& config) {
    validate_config(config);
    if (config.mode == "simulated") {
        for (const auto& spec : config.subjects)
            if (spec.kind != "simulated")
                throw ConfigError("simulated mode requires simulated endpoints, got '" +
                                  spec.kind + "' for " + spec.id);
    }

    const std::vector<ReferenceText> concepts = config.preloaded_concepts.empty()
                                                    ? load_reference_dir(config.concepts_dir)
                                                    : config.preloaded_concepts;
    if (concepts.empty())
        throw ConfigError("no reference texts found");

    SessionOptions session_options;
    session_options.templates = config.templates_dir.empty()
                                    ? TemplateSet::defaults()
                                    : TemplateSet::load(config.templates_dir);
    session_options.strategy = config.strategy;
    session_options.interviewer_sees_reference = config.interviewer_sees_reference;

    std::shared_ptr<TranscriptStore> replay_store;
    if (!config.replay_file.empty())
        replay_store = TranscriptStore::load(config.replay_file);
    std::shared_ptr<TranscriptStore> record_store;
    if (config.record && config.mode == "live") {
        record_store = std::make_shared<TranscriptStore>();
        record_store->open_append(std::filesystem::path(config.out_dir) / "recordings.jsonl");
    }

    const auto interviewer = make_endpoint(config.interviewer, EndpointRole::Interviewer, config,
                                           replay_store, record_store, nullptr, 0);
    std::vector<std::shared_ptr<ChatEndpoint>> judge_endpoints;
    for (const auto& spec : config.judges)
        judge_endpoints.push_back(make_endpoint(spec, EndpointRole::Judge, config, replay_store,
                                                record_store, nullptr, 0));
    const Jury jury(judge_endpoints);

    // Shared endpoints for non-simulated subjects; simulated subjects are
    // built per session with their own random stream.
    std::map<std::string, std::shared_ptr<ChatEndpoint>> shared_subjects;
    for (const auto& spec : config.subjects) {
        if (effective_kind(spec, config.mode) != "simulated")
            shared_subjects[spec.id] = make_endpoint(spec, EndpointRole::Subject, config,
                                                     replay_store, record_store, nullptr, 0);
    }

    std::vector<SessionCell> cells;
    for (const auto& spec : config.subjects)
        for (const auto& concept_ref : concepts)
            for (double level : config.grid)
                cells.push_back({&spec, &concept_ref, level});

    RunMeta meta;
    meta.config_digest = config_digest(config);
    meta.seed = config.seed;
    meta.mode = config.mode;
    meta.grid = config.grid;
    meta.theta = config.theta;
    meta.hoc_semantics = config.hoc_semantics;
    meta.normalization = config.normalization;
    meta.phenotype = config.phenotype;
    meta.danger_zone = config.danger_zone;
    meta.compression_strategy = to_string(config.strategy);
    for (const auto& spec : config.subjects) meta.models.push_back(spec.id);
    for (const auto& concept_ref : concepts) meta.concepts.push_back(concept_ref.concept_id);

    std::filesystem::create_directories(config.out_dir);
    RunLogWriter writer(std::filesystem::path(config.out_dir) / "runlog.jsonl");
    writer.write_meta(meta);

    std::vector<CellResult> results(cells.size());
    std::atomic<std::size_t> next_cell{0};
    std::mutex mutex;
    std::condition_variable cv;

    auto execute_cell = [&](std::size_t index) {
        const SessionCell& cell = cells[index];
        CellResult result;
        const std::uint64_t session_seed = splitmix64(
            config.seed ^ stable_hash64(cell.subject->id + '\x1f' + cell.concept_ref->concept_id +
                                        '\x1f' + level_key(cell.level)));
        try {
            const CompressionLevel level(cell.level);
            std::shared_ptr<ChatEndpoint> subject;
            if (const auto it = shared_subjects.find(cell.subject->id); it != shared_subjects.end())
                subject = it->second;
            else
                subject = make_endpoint(*cell.subject, EndpointRole::Subject, config, replay_store,
                                        record_store, &level, session_seed);
            TranscriptSink sink = [&result](const SessionTranscript& transcript) {
                result.transcript = transcript;
            };
            run_session(*subject, *interviewer, jury, *cell.concept_ref, level, session_seed,
                        session_options, sink);
        } catch (const Error& e) {
            result.failure = FailureRecord{cell.subject->id, cell.concept_ref->concept_id,
                                           cell.level, e.what()};
        }
        {
            std::lock_guard<std::mutex> lock(mutex);
            result.done = true;
            results[index] = std::move(result);
        }
        cv.notify_all();
    };

    const std::size_t n_workers =
        std::min<std::size_t>(static_cast<std::size_t>(config.parallelism), cells.size());
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t index = next_cell.fetch_add(1);
                if (index >= cells.size()) return;
                execute_cell(index);
            }
        });
    }

    // Commit in session order so the log is byte-identical at any
    // parallelism level.
    for (std::size_t commit = 0; commit < cells.size(); ++commit) {
        std::unique_lock<std::mutex> lock(mutex);
        cv.wait(lock, [&] { return results[commit].done; });
        const CellResult result = std::move(results[commit]);
        lock.unlock();
        if (result.transcript) writer.write_transcript(*result.transcript);
        if (result.failure) writer.write_failure(*result.failure);
    }
    for (auto& worker : pool) worker.join();

    RunPaths paths;
    paths.log = writer.path();
    paths.checksum = writer.finalize();
    return paths;
}

AnalysisBundle analyze(const RunLogData& log, const AnalyzeOptions& options) {
    AnalysisBundle bundle;
    bundle.meta = log.meta;
    if (options.theta) bundle.meta.theta = *options.theta;
    if (options.normalization) bundle.meta.normalization = *options.normalization;

    std::vector<TurnRecord> records = log.turn_records;
    if (records.empty()) {
        for (const auto& transcript : log.transcripts)
            if (transcript.complete)
                for (auto& record : transcript_turn_records(transcript))
                    records.push_back(std::move(record));
    }
    if (options.include_partial) {
        for (const auto& transcript : log.transcripts)
            if (!transcript.complete)
                for (auto& record : transcript_turn_records(transcript))
                    records.push_back(std::move(record));
    }

    std::map<std::string, std::vector<TurnRecord>> by_model;
    for (const auto& record : records) by_model[record.model_id].push_back(record);
    for (const auto& model : bundle.meta.models)
        if (by_model.find(model) == by_model.end())
            bundle.warnings.push_back("model '" + model + "' has no usable records; excluded");

    std::vector<ModelProfile> profiles;
    for (const auto& [model, model_records] : by_model) {
        try {
            profiles.push_back(build_profile(model, model_records, bundle.meta.grid,
                                             bundle.meta.theta, bundle.meta.hoc_semantics,
                                             bundle.meta.danger_zone, bundle.meta.phenotype));
            bundle.far_curves[model] = compute_far_curve(model_records, bundle.meta.grid);
            bundle.sas_curves[model] = compute_sas_curve(model_records, bundle.meta.grid);
        } catch (const Error& e) {
            bundle.warnings.push_back("model '" + model + "' excluded from ranking: " + e.what());
        }
    }

    if (!profiles.empty()) {
        std::vector<double> raw;
        raw.reserve(profiles.size());
        for (const auto& profile : profiles) raw.push_back(profile.ci_raw);
        const std::vector<double> normalized = normalize_ci(raw, bundle.meta.normalization);
        for (std::size_t i = 0; i < profiles.size(); ++i) {
            profiles[i].ci_norm = normalized[i];
            profiles[i].phenotype = classify_phenotype(normalized[i], bundle.meta.phenotype);
            if (profiles[i].prime_fallback)
                bundle.warnings.push_back("model '" + profiles[i].model_id +
                                          "': conditional mean absent, unconditional fallback "
                                          "used for CI");
        }
        std::sort(profiles.begin(), profiles.end(), [](const auto& a, const auto& b) {
            if (a.ci_norm != b.ci_norm) return a.ci_norm > b.ci_norm;
            return a.model_id < b.model_id;
        });
    }
    bundle.profiles = profiles;
    for (const auto& profile : profiles) {
        bundle.ranking.push_back(profile.model_id);
        bundle.danger.push_back({profile.model_id, profile.danger_zone_rate});
    }

    // Per-turn FAR vs CI rank correlation across models.
    for (int turn = 1; turn <= 5; ++turn) {
        PairedSample sample;
        for (const auto& profile : bundle.profiles) {
            double sum = 0.0;
            int count = 0;
            for (const auto& record : by_model[profile.model_id]) {
                if (record.turn == turn) {
                    sum += record.consensus_far;
                    ++count;
                }
            }
            if (count == 0) continue;
            sample.x.push_back(sum / count);
            sample.y.push_back(profile.ci_norm);
        }
        if (sample.x.size() < 3) continue;
        try {
            const Correlation correlation = spearman(sample);
            bundle.turn_ci.push_back({turn, static_cast<int>(sample.x.size()),
                                      correlation.value, correlation.p});
        } catch (const UndefinedCorrelation&) {
            bundle.warnings.push_back("turn " + std::to_string(turn) +
                                      ": rank correlation undefined (zero variance)");
        }
    }

    // Jury reliability across every verdict in scope.
    std::vector<JuryVerdict> verdicts;
    for (const auto& transcript : log.transcripts) {
        if (!transcript.complete && !options.include_partial) continue;
        for (const auto& turn : transcript.turns) verdicts.push_back(turn.verdict);
    }
    try {
        bundle.reliability = jury_reliability_report(verdicts);
    } catch (const InsufficientData& e) {
        bundle.warnings.push_back(std::string("jury reliability skipped: ") + e.what());
    }

    // Domain stratification of turn-level scores.
    std::map<std::string, std::vector<double>> far_by_concept, sas_by_concept;
    for (const auto& record : records) {
        far_by_concept[record.concept_id].push_back(record.consensus_far);
        sas_by_concept[record.concept_id].push_back(record.consensus_sas);
    }
    auto grouped = [](const std::map<std::string, std::vector<double>>& m) {
        GroupedSample g;
        for (const auto& [label, values] : m) g.groups.emplace_back(label, values);
        return g;
    };
    try {
        bundle.anova_far = one_way_anova(grouped(far_by_concept));
        bundle.anova_sas = one_way_anova(grouped(sas_by_concept));
    } catch (const InsufficientData& e) {
        bundle.warnings.push_back(std::string("domain anova skipped: ") + e.what());
    }

    // Ranking agreement with the coarse sub-grid.
    const std::vector<double> sub_grid{0.0, 0.5, 1.0};
    const bool sub_grid_available = std::all_of(
        sub_grid.begin(), sub_grid.end(), [&](double level) {
            return std::any_of(bundle.meta.grid.begin(), bundle.meta.grid.end(),
                               [&](double g) { return std::fabs(g - level) < 1e-9; });
        });
    if (sub_grid_available && bundle.profiles.size() >= 2) {
        std::vector<std::pair<std::string, double>> sub_scores;
        for (const auto& profile : bundle.profiles) {
            std::vector<TurnRecord> sub_records;
            for (const auto& record : by_model[profile.model_id]) {
                for (double level : sub_grid)
                    if (std::fabs(record.level - level) < 1e-9) {
                        sub_records.push_back(record);
                        break;
                    }
            }
            try {
                const ModelProfile sub_profile = build_profile(
                    profile.model_id, sub_records, sub_grid, bundle.meta.theta,
                    bundle.meta.hoc_semantics, bundle.meta.danger_zone, bundle.meta.phenotype);
                sub_scores.emplace_back(profile.model_id, sub_profile.ci_raw);
            } catch (const Error& e) {
                bundle.warnings.push_back("granularity check skipped model '" +
                                          profile.model_id + "': " + e.what());
            }
        }
        if (sub_scores.size() >= 2) {
            std::vector<std::string> ids;
            for (const auto& [id, score] : sub_scores) ids.push_back(id);
            std::vector<std::string> full_ranking;
            for (const auto& model : bundle.ranking)
                if (std::find(ids.begin(), ids.end(), model) != ids.end())
                    full_ranking.push_back(model);
            const double tau = kendall_tau(rank_positions(ids, full_ranking),
                                           rank_positions(ids, ranking_of(sub_scores)));
            bundle.granularity.push_back(
                {"3-level (0, 0.5, 1)", tau, static_cast<int>(sub_scores.size())});
        }
    }

    if (bundle.profiles.size() >= 2) {
        try {
            bundle.formula_stability = formula_stability(bundle.profiles);
        } catch (const Error& e) {
            bundle.warnings.push_back(std::string("formula stability skipped: ") + e.what());
        }
    }

    // Accounting: scheduled capacity counts five turns per completed session;
    // actual turn records depend on the Turn-5 trigger. An aborted session
    // leaves a failure record plus (usually) a partial transcript, so the
    // session count comes from completed transcripts + failures.
    for (const auto& transcript : log.transcripts) {
        if (!transcript.complete) continue;
        ++bundle.accounting.sessions_completed;
        if (transcript.status == SessionStatus::CompletedAt5)
            ++bundle.accounting.transcripts_5turn;
        else
            ++bundle.accounting.transcripts_4turn;
    }
    bundle.accounting.sessions_aborted = static_cast<int>(log.failures.size());
    bundle.accounting.sessions_total =
        bundle.accounting.sessions_completed + bundle.accounting.sessions_aborted;
    bundle.accounting.turn_records = static_cast<int>(records.size());
    bundle.accounting.nominal_turn_capacity = bundle.accounting.sessions_completed * 5;
    if (bundle.accounting.sessions_completed > 0)
        bundle.accounting.turn5_trigger_rate =
            static_cast<double>(bundle.accounting.transcripts_5turn) /
            static_cast<double>(bundle.accounting.sessions_completed);
    return bundle;
}

nlohmann::json bundle_to_json(const AnalysisBundle& bundle) {
    json j;
    j["meta"] = meta_to_json(bundle.meta);
    j["meta"].erase("type");
    j["profiles"] = json::array();
    for (const auto& profile : bundle.profiles) {
        json p;
        p["model"] = profile.model_id;
        p["hoc"] = profile.hoc;
        p["cri"] = profile.cri;
        p["far_prime"] = profile.far_prime ? json(*profile.far_prime) : json(nullptr);
        p["sas_prime"] = profile.sas_prime ? json(*profile.sas_prime) : json(nullptr);
        p["prime_fallback"] = profile.prime_fallback;
        p["ci_raw"] = profile.ci_raw;
        p["ci_norm"] = profile.ci_norm;
        p["phenotype"] = to_string(profile.phenotype);
        p["danger_zone_rate"] = profile.danger_zone_rate;
        j["profiles"].push_back(p);
    }
    j["ranking"] = bundle.ranking;
    auto curves_json = [](const std::map<std::string, Curve>& curves) {
        json out = json::object();
        for (const auto& [model, curve] : curves) {
            json points = json::array();
            for (const auto& [level, value] : curve)
                points.push_back({{"level", level}, {"value", value}});
            out[model] = points;
        }
        return out;
    };
    j["far_curves"] = curves_json(bundle.far_curves);
    j["sas_curves"] = curves_json(bundle.sas_curves);
    j["turn_ci"] = json::array();
    for (const auto& row : bundle.turn_ci)
        j["turn_ci"].push_back(
            {{"turn", row.turn}, {"n", row.n}, {"rho", row.rho}, {"p", row.p}});
    j["danger_zone"] = json::array();
    for (const auto& row : bundle.danger)
        j["danger_zone"].push_back({{"model", row.model_id}, {"rate", row.rate}});
    if (bundle.reliability) {
        const auto& r = *bundle.reliability;
        json rel;
        rel["verdicts"] = r.verdicts;
        rel["bins"] = r.bins;
        rel["method_note"] = r.method_note;
        rel["mean_far_variance"] = r.mean_far_variance;
        rel["mean_sas_variance"] = r.mean_sas_variance;
        rel["far_pair_kappa"] = r.far_pair_kappa;
        rel["sas_pair_kappa"] = r.sas_pair_kappa;
        rel["far_kappa"] = r.far_kappa;
        rel["sas_kappa"] = r.sas_kappa;
        rel["bands"] = json::array();
        for (const auto& band : r.bands)
            rel["bands"].push_back({{"label", band.label},
                                    {"count", band.count},
                                    {"mean_far_variance", band.mean_far_variance},
                                    {"mean_sas_variance", band.mean_sas_variance}});
        j["reliability"] = rel;
    } else {
        j["reliability"] = nullptr;
    }
    auto anova_json = [](const std::optional<AnovaResult>& a) -> json {
        if (!a) return nullptr;
        return {{"f", a->f},
                {"p", a->p},
                {"eta_sq", a->eta_sq},
                {"df_between", a->df_between},
                {"df_within", a->df_within}};
    };
    j["anova_far"] = anova_json(bundle.anova_far);
    j["anova_sas"] = anova_json(bundle.anova_sas);
    j["granularity"] = json::array();
    for (const auto& row : bundle.granularity)
        j["granularity"].push_back(
            {{"label", row.label}, {"tau", row.tau}, {"n_models", row.n_models}});
    if (bundle.formula_stability) {
        j["formula_stability"] = {{"additive_tau", bundle.formula_stability->additive_tau},
                                  {"max_based_tau", bundle.formula_stability->max_based_tau}};
    } else {
        j["formula_stability"] = nullptr;
    }
    j["accounting"] = {{"sessions_total", bundle.accounting.sessions_total},
                       {"sessions_completed", bundle.accounting.sessions_completed},
                       {"sessions_aborted", bundle.accounting.sessions_aborted},
                       {"transcripts_4turn", bundle.accounting.transcripts_4turn},
                       {"transcripts_5turn", bundle.accounting.transcripts_5turn},
                       {"turn_records", bundle.accounting.turn_records},
                       {"nominal_turn_capacity", bundle.accounting.nominal_turn_capacity},
                       {"turn5_trigger_rate", bundle.accounting.turn5_trigger_rate}};
    j["warnings"] = bundle.warnings;
    return j;
}

RunConfig make_simulated_config(const SimulateOptions& options) {
    RunConfig config;
    config.mode = "simulated";
    config.seed = options.seed;
    config.parallelism = options.parallelism;
    config.grid = options.grid;
    config.theta = options.theta;
    config.out_dir = options.out_dir.string();
    config.concepts_dir = options.concepts_dir;
    if (options.concepts_dir.empty())
        config.preloaded_concepts = builtin_concepts();

    config.interviewer.id = "sim-interviewer";
    config.interviewer.kind = "simulated";
    for (const char* judge_id : {"sim-judge-a", "sim-judge-b", "sim-judge-c"}) {
        EndpointSpec judge;
        judge.id = judge_id;
        judge.kind = "simulated";
        config.judges.push_back(judge);
    }
    for (auto& [model_id, params] : make_population(options.n_models, options.seed)) {
        EndpointSpec subject;
        subject.id = model_id;
        subject.kind = "simulated";
        subject.sim = params;
        config.subjects.push_back(subject);
    }
    return config;
}

SimulateResult simulate_run(const SimulateOptions& options) {
    const RunConfig config = make_simulated_config(options);
    SimulateResult result;
    result.paths = run(config);
    const RunLogData data = read_run_log(result.paths.log);
    result.bundle = analyze(data);
    if (options.write_report) {
        std::ofstream out(options.out_dir / "analysis.json", std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot write analysis.json under " + options.out_dir.string());
        out << bundle_to_json(result.bundle).dump(2) << '\n';
        report(result.bundle, options.out_dir);
    }
    return result;
}

}  // namespace ddft
