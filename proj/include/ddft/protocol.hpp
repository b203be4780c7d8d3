#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ddft/clients.hpp"
#include "ddft/compression.hpp"
#include "ddft/jury.hpp"
#include "ddft/turns.hpp"

namespace ddft {

// Interviewer prompt templates, one per turn plus the Turn-4 meta-prompt.
// Placeholders use {NAME} syntax: {CONCEPT}, {EXAMPLE}, {C}, {REF_TEXT},
// and {EXPERT} (resolved from session state once the fabrication happened).
struct TemplateSet {
    std::string turn1;
    std::string turn2;
    std::string turn3;
    std::string turn4_meta;
    std::string turn5;

    static TemplateSet defaults();
    // Reads turn1.txt ... turn5.txt and turn4_meta.txt from dir.
    static TemplateSet load(const std::filesystem::path& dir);

    const std::string& for_turn(TurnKind turn) const;
};

// Substitutes {UPPER_CASE} placeholders. A placeholder without a value
// -> TemplateError; braces that do not form a placeholder pass through.
std::string render_template(const std::string& templ,
                            const std::map<std::string, std::string>& values);

struct FabricatedExpert {
    std::string name;
    std::string claim;  // the question carrying the attributed claim

    bool present() const { return !name.empty(); }
};

enum class SessionStatus { InProgress, CompletedAt4, CompletedAt5 };

struct TurnEntry {
    int ordinal = 0;
    std::string prompt;
    std::string response;
    JuryVerdict verdict;
};

struct SessionState {
    std::string concept_id;
    CompressionLevel level{0.0};
    std::string compressed_context;
    std::vector<TurnEntry> history;
    FabricatedExpert fabricated_expert;
    SessionStatus status = SessionStatus::InProgress;
};

struct SessionTranscript {
    std::string model_id;
    std::string concept_id;
    double level = 0.0;
    std::vector<TurnEntry> turns;
    FabricatedExpert fabricated_expert;
    SessionStatus status = SessionStatus::InProgress;
    bool complete = false;  // false: aborted mid-session, excluded from metrics by default
};

struct SessionOptions {
    TemplateSet templates = TemplateSet::defaults();
    CompressionStrategy strategy = CompressionStrategy::Prefix;
    // Whether the Turn-4 meta-prompt exposes {REF_TEXT} to the interviewer;
    // by default the interviewer sees only the concept and prior answers.
    bool interviewer_sees_reference = false;
    int interviewer_parse_retries = 2;
};

// Next turn in the protocol, or nullopt when the session is done (the state
// status is updated to CompletedAt4/CompletedAt5 accordingly). Turn 5 runs
// only when the Turn-4 consensus FAR is strictly below 0.5. Calling on a
// completed session -> ProtocolViolation.
std::optional<TurnKind> next_turn(SessionState& state);

// Renders the interviewer prompt for `turn`. Turns 1-3 and 5 are template
// substitutions; Turn 4 sends the fabrication meta-prompt to the interviewer
// endpoint, stores the extracted expert in `state`, and returns the generated
// question. Interviewer failure -> InterviewerUnavailable.
std::string render_interviewer_prompt(SessionState& state, TurnKind turn,
                                      ChatEndpoint* interviewer, const SessionOptions& options);

// Parses the delimited interviewer reply: first line "EXPERT: <name>",
// remaining lines are the question.
std::optional<FabricatedExpert> parse_expert_reply(const std::string& reply);

using TranscriptSink = std::function<void(const SessionTranscript&)>;

// Runs one full session: compress once, then the turn loop
// (render -> subject responds on full history -> jury scores -> next_turn).
// The transcript is handed to `persist` before return, including partial
// transcripts on abort (flagged incomplete, then the error is rethrown).
SessionTranscript run_session(ChatEndpoint& subject, ChatEndpoint& interviewer,
                              const Jury& jury, const ReferenceText& concept_ref,
                              const CompressionLevel& level, std::uint64_t seed,
                              const SessionOptions& options,
                              const TranscriptSink& persist = {});

std::string to_string(SessionStatus status);
SessionStatus session_status_from_string(const std::string& name);

}  // namespace ddft
