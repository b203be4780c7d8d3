#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ddft/clients.hpp"
#include "ddft/compression.hpp"
#include "ddft/turns.hpp"

namespace ddft {

// Generative law of a synthetic subject: a Semantic-System group (sem_*)
// governing coherence and an Epistemic-Verifier group (ver_*, fab_*)
// governing factual accuracy.
struct SimSubjectParams {
    double sem_base = 0.89;             // SAS at c = 0
    double sem_decay = 0.05;            // SAS slope per unit c
    double ver_strength = 0.80;         // verifier capacity
    double ver_load_sensitivity = 0.20; // FAR degradation per unit c
    double fab_reject_prob = 0.82;      // probability of rejecting the Turn-4 fabrication
    double noise_sd = 0.05;             // additive Gaussian noise, truncated by clamping
    std::uint64_t seed = 0;
};

struct TurnScores {
    double far = 0.0;
    double sas = 0.0;
};

// Draw one turn's (FAR, SAS) from the linear-decay law. Draw order per call:
// SAS noise first, then the turn-specific FAR draws, so a fixed rng state
// gives a fixed outcome. Turn 4 rejects the fabrication with probability
// fab_reject_prob (FAR lands in [0.7, 1.0]) and otherwise accepts it
// (FAR in [0.0, 0.3]); Turn 5 stays in the low band (entrenchment).
TurnScores simulate_turn_scores(const SimSubjectParams& params, const CompressionLevel& level,
                                TurnKind turn, std::mt19937_64& rng);

// Structured score hint embedded in simulated subject responses and consumed
// by simulated judges, so the full protocol loop runs offline.
std::string format_sim_hint(const TurnScores& scores);
std::optional<TurnScores> parse_sim_hint(const std::string& text);

// A deterministic simulated subject for one session. Infers the turn from
// the number of assistant messages in the resent history; the per-session
// random stream makes parallel sessions reproducible independent of
// scheduling.
class SimSubjectEndpoint final : public ChatEndpoint {
public:
    SimSubjectEndpoint(std::string id, SimSubjectParams params, CompressionLevel level,
                       std::uint64_t session_seed);

    const std::string& id() const override { return id_; }
    const ChatParams& params() const override { return chat_params_; }
    std::string complete(const std::vector<Message>& messages) override;

private:
    std::string id_;
    SimSubjectParams params_;
    CompressionLevel level_;
    ChatParams chat_params_;
    std::mt19937_64 rng_;
};

// Scores rubric prompts from the hint embedded in the subject response, with
// deterministic per-judge jitter. Jitter scales as 4*x*(1-x), so agreement
// is tight at the scale ends and loosest mid-scale.
class SimJudgeEndpoint final : public ChatEndpoint {
public:
    explicit SimJudgeEndpoint(std::string id, double noise_sd = 0.05);

    const std::string& id() const override { return id_; }
    const ChatParams& params() const override { return chat_params_; }
    std::string complete(const std::vector<Message>& messages) override;

private:
    std::string id_;
    double noise_sd_;
    ChatParams chat_params_;
};

// Answers the fabrication meta-prompt with a deterministic fictional expert
// line plus a short question; stateless, seeded from the prompt digest.
class SimInterviewerEndpoint final : public ChatEndpoint {
public:
    explicit SimInterviewerEndpoint(std::string id);

    const std::string& id() const override { return id_; }
    const ChatParams& params() const override { return chat_params_; }
    std::string complete(const std::vector<Message>& messages) override;

private:
    std::string id_;
    ChatParams chat_params_;
};

// Deterministic roster of synthetic subjects with capability spread wide
// enough to produce a stable ranking.
std::vector<std::pair<std::string, SimSubjectParams>> make_population(int n_models,
                                                                      std::uint64_t seed);

}  // namespace ddft
