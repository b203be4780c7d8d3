#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ddft/clients.hpp"
#include "ddft/errors.hpp"

namespace ddft {

struct JudgeScore {
    std::string judge_id;
    double far = 0.0;
    double sas = 0.0;
    std::string justification;
};

// Three independent judge scores plus consensus (arithmetic mean) and
// dispersion (population variance).
struct JuryVerdict {
    std::vector<JudgeScore> scores;
    double consensus_far = 0.0;
    double consensus_sas = 0.0;
    double far_variance = 0.0;
    double sas_variance = 0.0;
};

struct ScoringContext {
    std::string concept_id;
    int turn = 0;
    double level = 0.0;
    std::string reference_text;  // what the subject saw; omitted from rubrics at c = 1
};

// Rubric prompts sent to each judge. The FAR rubric includes the reference
// text section only when level < 1.0. Exposed for tests.
std::string build_far_rubric(const std::string& response, const ScoringContext& context);
std::string build_sas_rubric(const std::string& response, const ScoringContext& context);

// Parses the mandated "SCORE: <decimal>" line; remaining text is the
// justification. Scores outside [0,1] are clamped with a warning. No score
// line -> JudgeParseFailure.
struct ParsedJudgeOutput {
    double score = 0.0;
    std::string justification;
};
ParsedJudgeOutput parse_judge_output(const std::string& text);

JuryVerdict make_verdict(std::vector<JudgeScore> scores);

// Judges never see each other's scores; each scores FAR and SAS in two
// separate calls. An unparseable judge output is retried (parse_retries
// times) before the jury gives up and aborts the session.
class Jury {
public:
    explicit Jury(std::vector<std::shared_ptr<ChatEndpoint>> judges, int parse_retries = 2);

    JuryVerdict score_turn(const std::string& response, const ScoringContext& context) const;

    std::size_t judge_count() const { return judges_.size(); }

private:
    std::vector<std::shared_ptr<ChatEndpoint>> judges_;
    int parse_retries_;
};

// --- inter-rater reliability -------------------------------------------------

// Discretize a score in [0,1] into one of n_bins equal-width bins.
int score_bin(double score, int n_bins);

// Unweighted Cohen's kappa over two judges' bin labels.
double cohen_kappa(const std::vector<int>& a, const std::vector<int>& b, int n_bins);

struct BandVariance {
    std::string label;
    double lo = 0.0;
    double hi = 1.0;
    int count = 0;
    double mean_far_variance = 0.0;
    double mean_sas_variance = 0.0;
};

struct ReliabilityReport {
    int verdicts = 0;
    int bins = 5;
    // Kappa is computed pairwise per judge pair on binned scores and
    // averaged; a multi-rater generalization would not be comparable.
    std::string method_note;
    double mean_far_variance = 0.0;
    double mean_sas_variance = 0.0;
    std::vector<double> far_pair_kappa;  // pairs (0,1), (0,2), (1,2), ...
    std::vector<double> sas_pair_kappa;
    double far_kappa = 0.0;  // pairwise average
    double sas_kappa = 0.0;
    std::vector<BandVariance> bands;  // stratified by consensus FAR
};

// Requires >= 2 verdicts with a uniform judge count.
ReliabilityReport jury_reliability_report(const std::vector<JuryVerdict>& verdicts,
                                          int bins = 5);

}  // namespace ddft
