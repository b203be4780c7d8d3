#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include "ddft/clients.hpp"
#include "ddft/sim.hpp"

using namespace ddft;

namespace {

// Scripted endpoint for wiring tests.
class StubEndpoint final : public ChatEndpoint {
public:
    StubEndpoint(std::string id, std::string reply)
        : id_(std::move(id)), reply_(std::move(reply)) {}
    const std::string& id() const override { return id_; }
    const ChatParams& params() const override { return params_; }
    std::string complete(const std::vector<Message>&) override { return reply_; }

private:
    std::string id_;
    std::string reply_;
    ChatParams params_;
};

std::string ok_body(const std::string& content) {
    return std::string(R"({"choices":[{"message":{"content":")") + content + R"("}}]})";
}

HttpChatEndpoint::Options fast_options(int retries) {
    HttpChatEndpoint::Options options;
    options.id = "live-a";
    options.model = "test-model";
    options.base_url = "http://localhost:1";
    options.params.retries = retries;
    options.backoff_ms = 1;
    return options;
}

}  // namespace

TEST_CASE("chat rejects an empty message list") {
    StubEndpoint stub("s", "hello");
    CHECK_THROWS_AS(chat(stub, {}), Error);
    CHECK(chat(stub, {{"user", "hi"}}) == "hello");
}

TEST_CASE("request digest is stable and content-sensitive") {
    const ChatParams params;
    const std::vector<Message> messages{{"user", "hello"}, {"assistant", "hi"}};
    const std::string digest = request_digest("e", params, messages);
    CHECK(digest.size() == 16);
    CHECK(digest == request_digest("e", params, messages));
    CHECK(digest != request_digest("other", params, messages));
    CHECK(digest != request_digest("e", params, {{"user", "hello!"}, {"assistant", "hi"}}));
    ChatParams warm = params;
    warm.temperature = 0.7;
    CHECK(digest != request_digest("e", warm, messages));
    // Transport knobs do not change the digest.
    ChatParams patient = params;
    patient.timeout_s = 5;
    patient.retries = 9;
    CHECK(digest == request_digest("e", patient, messages));
    // Algorithm pin: FNV-1a over the canonical serialization.
    CHECK(stable_hash64("") == 0xcbf29ce484222325ull);
}

TEST_CASE("http endpoint parses a chat completion") {
    int calls = 0;
    HttpChatEndpoint endpoint(fast_options(3), [&](const std::string& body) {
        ++calls;
        CHECK(body.find("\"model\":\"test-model\"") != std::string::npos);
        CHECK(body.find("\"max_tokens\":1000") != std::string::npos);
        return std::make_pair(200, ok_body("fine"));
    });
    CHECK(endpoint.complete({{"user", "q"}}) == "fine");
    CHECK(calls == 1);
}

TEST_CASE("http endpoint retries transient failures within budget") {
    int calls = 0;
    HttpChatEndpoint endpoint(fast_options(3), [&](const std::string&) {
        ++calls;
        if (calls <= 2) return std::make_pair(503, std::string("busy"));
        return std::make_pair(200, ok_body("eventually"));
    });
    CHECK(endpoint.complete({{"user", "q"}}) == "eventually");
    CHECK(calls == 3);
}

TEST_CASE("http endpoint exhausts the retry budget") {
    int calls = 0;
    HttpChatEndpoint endpoint(fast_options(1), [&](const std::string&) {
        ++calls;
        return std::make_pair(-1, std::string{});
    });
    CHECK_THROWS_AS(endpoint.complete({{"user", "q"}}), EndpointUnavailable);
    CHECK(calls == 2);  // first attempt + one retry
}

TEST_CASE("http endpoint fails fast on non-transient status") {
    int calls = 0;
    HttpChatEndpoint endpoint(fast_options(5), [&](const std::string&) {
        ++calls;
        return std::make_pair(401, std::string("unauthorized"));
    });
    CHECK_THROWS_AS(endpoint.complete({{"user", "q"}}), EndpointUnavailable);
    CHECK(calls == 1);
}

TEST_CASE("malformed success bodies count toward the budget") {
    int calls = 0;
    HttpChatEndpoint endpoint(fast_options(2), [&](const std::string&) {
        ++calls;
        return std::make_pair(200, std::string("not json"));
    });
    CHECK_THROWS_AS(endpoint.complete({{"user", "q"}}), EndpointUnavailable);
    CHECK(calls == 3);
}

TEST_CASE("live connector round trip against a loopback server") {
    httplib::Server server;
    std::string seen_auth, seen_body;
    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        seen_auth = req.get_header_value("Authorization");
        seen_body = req.body;
        res.set_content(ok_body("loopback reply"), "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread server_thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    setenv("DDFT_TEST_KEY", "sk-test-123", 1);
    HttpChatEndpoint::Options options;
    options.id = "loop";
    options.model = "loop-model";
    options.base_url = "http://127.0.0.1:" + std::to_string(port);
    options.api_key_env = "DDFT_TEST_KEY";
    HttpChatEndpoint endpoint(options);
    CHECK(endpoint.complete({{"user", "ping"}}) == "loopback reply");
    CHECK(seen_auth == "Bearer sk-test-123");
    CHECK(seen_body.find("\"content\":\"ping\"") != std::string::npos);

    // Missing credential is a configuration error, not a transport retry.
    HttpChatEndpoint::Options no_key = options;
    no_key.api_key_env = "DDFT_TEST_KEY_UNSET";
    unsetenv("DDFT_TEST_KEY_UNSET");
    HttpChatEndpoint unconfigured(no_key);
    CHECK_THROWS_AS(unconfigured.complete({{"user", "ping"}}), ConfigError);

    server.stop();
    server_thread.join();
}

TEST_CASE("record then replay round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "ddft_store_test";
    std::filesystem::remove_all(dir);
    const auto file = dir / "recordings.jsonl";

    auto store = std::make_shared<TranscriptStore>();
    store->open_append(file);
    auto inner = std::make_shared<StubEndpoint>("live-a", "recorded answer");
    RecordingEndpoint recorder(inner, store);
    const std::vector<Message> messages{{"user", "what is it?"}};
    CHECK(recorder.complete(messages) == "recorded answer");
    CHECK(store->size() == 1);

    // The JSONL row carries digest, request summary, response, timestamp.
    std::ifstream in(file);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line.find("\"digest\"") != std::string::npos);
    CHECK(line.find("\"request\"") != std::string::npos);
    CHECK(line.find("\"response\":\"recorded answer\"") != std::string::npos);
    CHECK(line.find("\"timestamp\"") != std::string::npos);

    auto loaded = TranscriptStore::load(file);
    ReplayEndpoint replay("live-a", inner->params(), loaded);
    CHECK(replay.complete(messages) == "recorded answer");
    CHECK_THROWS_AS(replay.complete({{"user", "never recorded"}}), ReplayMiss);
    std::filesystem::remove_all(dir);
}

TEST_CASE("two-system law hits the calibration endpoints") {
    SimSubjectParams params;
    params.sem_base = 0.89;
    params.sem_decay = 0.05;
    params.noise_sd = 0.0;
    std::mt19937_64 rng(1);
    CHECK(simulate_turn_scores(params, CompressionLevel(0.0), TurnKind::CoreIdea, rng).sas ==
          doctest::Approx(0.89));
    CHECK(simulate_turn_scores(params, CompressionLevel(1.0), TurnKind::CoreIdea, rng).sas ==
          doctest::Approx(0.84));
}

TEST_CASE("perfect verifier keeps FAR at 1.0 on turns 1-3") {
    SimSubjectParams params;
    params.ver_strength = 1.0;
    params.ver_load_sensitivity = 0.0;
    params.noise_sd = 0.0;
    std::mt19937_64 rng(2);
    for (double c : {0.0, 0.25, 0.5, 0.75, 1.0})
        for (auto turn : {TurnKind::CoreIdea, TurnKind::Example, TurnKind::Detail})
            CHECK(simulate_turn_scores(params, CompressionLevel(c), turn, rng).far == 1.0);
}

TEST_CASE("fabrication rejection fraction follows the configured probability") {
    SimSubjectParams params;
    params.fab_reject_prob = 0.18;
    std::mt19937_64 rng(3);
    int rejected = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto scores =
            simulate_turn_scores(params, CompressionLevel(0.5), TurnKind::Fabrication, rng);
        if (scores.far >= 0.7) ++rejected;
        CHECK((scores.far >= 0.7 || scores.far <= 0.3));
    }
    // Binomial oracle: 0.18 +/- 0.03 at N = 1000.
    CHECK(std::fabs(rejected / 1000.0 - 0.18) <= 0.03);
}

TEST_CASE("simulated scores stay in range and decay monotonically") {
    std::mt19937_64 seed_rng(4);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        SimSubjectParams params;
        params.sem_base = unit(seed_rng);
        params.sem_decay = unit(seed_rng);
        params.ver_strength = unit(seed_rng);
        params.ver_load_sensitivity = unit(seed_rng);
        params.fab_reject_prob = trial % 2 == 0 ? 0.0 : 1.0;
        params.noise_sd = trial % 3 == 0 ? 0.0 : 0.2;
        std::mt19937_64 rng(trial);
        for (int t = 1; t <= 5; ++t) {
            const auto scores = simulate_turn_scores(params, CompressionLevel(unit(seed_rng)),
                                                     turn_from_ordinal(t), rng);
            CHECK(scores.far >= 0.0);
            CHECK(scores.far <= 1.0);
            CHECK(scores.sas >= 0.0);
            CHECK(scores.sas <= 1.0);
        }
        if (params.noise_sd == 0.0) {
            // Monotone stress law with the fabrication branch pinned.
            for (int t = 1; t <= 5; ++t) {
                double prev_far = 2.0, prev_sas = 2.0;
                for (double c : {0.0, 0.25, 0.5, 0.75, 1.0}) {
                    std::mt19937_64 turn_rng(9);
                    const auto scores = simulate_turn_scores(
                        params, CompressionLevel(c), turn_from_ordinal(t), turn_rng);
                    CHECK(scores.far <= prev_far + 1e-12);
                    CHECK(scores.sas <= prev_sas + 1e-12);
                    prev_far = scores.far;
                    prev_sas = scores.sas;
                }
            }
        }
    }
}

TEST_CASE("hint format round trip") {
    const TurnScores scores{0.8125, 0.334455};
    const auto parsed = parse_sim_hint("some prose\n" + format_sim_hint(scores) + "\ntail");
    REQUIRE(parsed.has_value());
    CHECK(parsed->far == doctest::Approx(scores.far).epsilon(1e-6));
    CHECK(parsed->sas == doctest::Approx(scores.sas).epsilon(1e-6));
    CHECK_FALSE(parse_sim_hint("no hint here").has_value());
}

TEST_CASE("sim subject infers the turn from resent history") {
    SimSubjectParams params;
    params.noise_sd = 0.0;
    params.fab_reject_prob = 1.0;
    SimSubjectEndpoint subject("sim-1", params, CompressionLevel(0.0), 7);
    std::vector<Message> history{{"user", "turn 1"}};
    const std::string r1 = subject.complete(history);
    CHECK(parse_sim_hint(r1).has_value());
    history.push_back({"assistant", r1});
    history.push_back({"user", "turn 2"});
    const std::string r2 = subject.complete(history);
    CHECK(r2 != r1);
    // Fresh endpoint with the same seed replays the same stream.
    SimSubjectEndpoint again("sim-1", params, CompressionLevel(0.0), 7);
    CHECK(again.complete({{"user", "turn 1"}}) == r1);
}

TEST_CASE("sim judge is deterministic per prompt and scores near the hint") {
    SimJudgeEndpoint judge("judge-a", 0.05);
    const std::string rubric =
        "Evaluate factual accuracy on a scale from 0.0 to 1.0.\nSubject Response: text\n" +
        format_sim_hint({0.8, 0.6});
    const std::string first = judge.complete({{"user", rubric}});
    CHECK(first == judge.complete({{"user", rubric}}));
    CHECK(first.rfind("SCORE: ", 0) == 0);
    const double score = std::stod(first.substr(7));
    CHECK(score == doctest::Approx(0.8).epsilon(0.5));
    CHECK_THROWS_AS(judge.complete({{"user", "unrelated prompt"}}), EndpointUnavailable);
}

TEST_CASE("sim interviewer emits a parseable expert line") {
    SimInterviewerEndpoint interviewer("sim-int");
    const std::string reply = interviewer.complete({{"user", "meta prompt about Recursion"}});
    CHECK(reply.rfind("EXPERT: ", 0) == 0);
    CHECK(reply == interviewer.complete({{"user", "meta prompt about Recursion"}}));
    CHECK(reply != interviewer.complete({{"user", "meta prompt about Phoneme"}}));
}

TEST_CASE("population spread") {
    const auto population = make_population(9, 42);
    REQUIRE(population.size() == 9);
    CHECK(population.front().first == "sim-model-01");
    CHECK(population.back().first == "sim-model-09");
    // Capability declines across the roster.
    CHECK(population.front().second.ver_strength > population.back().second.ver_strength);
    CHECK(population.front().second.fab_reject_prob > population.back().second.fab_reject_prob);
    for (const auto& [id, params] : population) {
        CHECK(params.sem_base >= 0.0);
        CHECK(params.sem_base <= 1.0);
        CHECK(params.fab_reject_prob >= 0.0);
        CHECK(params.fab_reject_prob <= 1.0);
    }
    CHECK_THROWS_AS(make_population(0, 1), ConfigError);
}
