#include "ddft/jury.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <cstdio>
#include <iostream>
#include <sstream>

namespace ddft {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string format_level(double level) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.2f", level);
    return buf;
}

double population_variance(const std::vector<double>& values) {
    const auto n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    return var / n;
}

}  // namespace

std::string build_far_rubric(const std::string& response, const ScoringContext& context) {
    std::ostringstream out;
    out << "Evaluate factual accuracy on a scale from 0.0 (completely inaccurate) to 1.0 "
           "(completely accurate).\n\n";
    out << "Concept: " << context.concept_id << "\n";
    out << "Compression Level: " << format_level(context.level) << "\n";
    out << "Turn: " << context.turn << "\n";
    out << "Subject Response: " << response << "\n";
    if (context.level < 1.0)
        out << "Reference Text (if c < 1.0): " << context.reference_text << "\n";
    out << "\nScoring rubric:\n";
    out << "1.0: All factual claims correct and verifiable\n";
    out << "0.8-0.9: Mostly accurate with minor errors\n";
    out << "0.6-0.7: Mix of accurate and inaccurate claims\n";
    out << "0.4-0.5: More errors than correct information\n";
    out << "0.0-0.3: Predominantly fabricated or false\n\n";
    out << "Respond with a line \"SCORE: <value>\" followed by a brief justification "
           "(1-2 sentences).\n";
    return out.str();
}

std::string build_sas_rubric(const std::string& response, const ScoringContext& context) {
    std::ostringstream out;
    out << "Evaluate semantic adherence on a scale from 0.0 (completely incoherent/irrelevant) "
           "to 1.0 (perfectly coherent and relevant).\n\n";
    out << "Concept: " << context.concept_id << "\n";
    out << "Compression Level: " << format_level(context.level) << "\n";
    out << "Turn: " << context.turn << "\n";
    out << "Subject Response: " << response << "\n";
    out << "\nScoring rubric:\n";
    out << "1.0: Response is fluent, relevant, and directly addresses prompt\n";
    out << "0.8-0.9: Mostly coherent with minor tangents\n";
    out << "0.6-0.7: Some relevant content but organizational issues\n";
    out << "0.4-0.5: Difficult to follow or partially off-topic\n";
    out << "0.0-0.3: Incoherent, irrelevant, or nonsensical\n\n";
    out << "This score evaluates form and relevance, NOT factual accuracy.\n";
    out << "Respond with a line \"SCORE: <value>\" followed by a brief justification "
           "(1-2 sentences).\n";
    return out.str();
}

ParsedJudgeOutput parse_judge_output(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const std::string trimmed = trim(line);
        if (trimmed.rfind("SCORE:", 0) != 0) continue;
        const std::string value_text = trim(trimmed.substr(6));
        char* end = nullptr;
        const double value = std::strtod(value_text.c_str(), &end);
        if (end == value_text.c_str())
            throw JudgeParseFailure("judge output has unparseable SCORE line: " + trimmed);
        ParsedJudgeOutput parsed;
        parsed.score = value;
        if (value < 0.0 || value > 1.0) {
            std::cerr << "[ddft][warn] judge score " << value << " outside [0,1], clamping\n";
            parsed.score = std::clamp(value, 0.0, 1.0);
        }
        std::string rest;
        std::ostringstream just;
        bool first = true;
        while (std::getline(in, rest)) {
            if (!first) just << '\n';
            just << rest;
            first = false;
        }
        parsed.justification = trim(just.str());
        return parsed;
    }
    throw JudgeParseFailure("judge output has no SCORE line");
}

JuryVerdict make_verdict(std::vector<JudgeScore> scores) {
    if (scores.empty())
        throw InsufficientData("make_verdict: no judge scores");
    JuryVerdict verdict;
    std::vector<double> fars, sass;
    fars.reserve(scores.size());
    sass.reserve(scores.size());
    for (const auto& s : scores) {
        fars.push_back(s.far);
        sass.push_back(s.sas);
    }
    const auto n = static_cast<double>(scores.size());
    verdict.consensus_far = std::accumulate(fars.begin(), fars.end(), 0.0) / n;
    verdict.consensus_sas = std::accumulate(sass.begin(), sass.end(), 0.0) / n;
    verdict.far_variance = population_variance(fars);
    verdict.sas_variance = population_variance(sass);
    verdict.scores = std::move(scores);
    return verdict;
}

Jury::Jury(std::vector<std::shared_ptr<ChatEndpoint>> judges, int parse_retries)
    : judges_(std::move(judges)), parse_retries_(parse_retries) {
    if (judges_.empty())
        throw ConfigError("jury: need at least one judge endpoint");
}

JuryVerdict Jury::score_turn(const std::string& response, const ScoringContext& context) const {
    auto ask = [&](ChatEndpoint& judge, const std::string& rubric) -> ParsedJudgeOutput {
        std::string last_error;
        for (int attempt = 0; attempt <= parse_retries_; ++attempt) {
            const std::string reply = chat(judge, {{"user", rubric}});
            try {
                return parse_judge_output(reply);
            } catch (const JudgeParseFailure& e) {
                last_error = e.what();
            }
        }
        throw JudgeParseFailure("judge '" + judge.id() + "' unparseable after " +
                                std::to_string(parse_retries_) + " retries: " + last_error);
    };

    std::vector<JudgeScore> scores;
    scores.reserve(judges_.size());
    for (const auto& judge : judges_) {
        const ParsedJudgeOutput far = ask(*judge, build_far_rubric(response, context));
        const ParsedJudgeOutput sas = ask(*judge, build_sas_rubric(response, context));
        JudgeScore score;
        score.judge_id = judge->id();
        score.far = far.score;
        score.sas = sas.score;
        score.justification = far.justification + " / " + sas.justification;
        scores.push_back(std::move(score));
    }
    return make_verdict(std::move(scores));
}

int score_bin(double score, int n_bins) {
    const int bin = static_cast<int>(std::floor(score * n_bins));
    return std::clamp(bin, 0, n_bins - 1);
}

double cohen_kappa(const std::vector<int>& a, const std::vector<int>& b, int n_bins) {
    if (a.size() != b.size() || a.empty())
        throw InsufficientData("cohen_kappa: need equal nonempty label vectors");
    std::vector<std::vector<double>> confusion(
        static_cast<std::size_t>(n_bins), std::vector<double>(static_cast<std::size_t>(n_bins), 0.0));
    for (std::size_t i = 0; i < a.size(); ++i)
        confusion[static_cast<std::size_t>(a[i])][static_cast<std::size_t>(b[i])] += 1.0;
    const auto n = static_cast<double>(a.size());
    double observed = 0.0, expected = 0.0;
    for (int i = 0; i < n_bins; ++i) {
        observed += confusion[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
        double row = 0.0, col = 0.0;
        for (int j = 0; j < n_bins; ++j) {
            row += confusion[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            col += confusion[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
        }
        expected += row * col;
    }
    const double po = observed / n;
    const double pe = expected / (n * n);
    if (1.0 - pe <= 1e-12)
        return po >= 1.0 - 1e-12 ? 1.0 : 0.0;
    return (po - pe) / (1.0 - pe);
}

ReliabilityReport jury_reliability_report(const std::vector<JuryVerdict>& verdicts, int bins) {
    if (verdicts.size() < 2)
        throw InsufficientData("jury_reliability_report: need >= 2 verdicts");
    const std::size_t judges = verdicts.front().scores.size();
    for (const auto& v : verdicts) {
        if (v.scores.size() != judges)
            throw InsufficientData("jury_reliability_report: non-uniform judge count");
    }

    ReliabilityReport report;
    report.verdicts = static_cast<int>(verdicts.size());
    report.bins = bins;
    report.method_note =
        "kappa computed pairwise per judge pair on " + std::to_string(bins) +
        " equal-width bins over [0,1], unweighted, then averaged";

    for (const auto& v : verdicts) {
        report.mean_far_variance += v.far_variance;
        report.mean_sas_variance += v.sas_variance;
    }
    report.mean_far_variance /= static_cast<double>(verdicts.size());
    report.mean_sas_variance /= static_cast<double>(verdicts.size());

    for (std::size_t i = 0; i < judges; ++i) {
        for (std::size_t j = i + 1; j < judges; ++j) {
            std::vector<int> far_a, far_b, sas_a, sas_b;
            far_a.reserve(verdicts.size());
            for (const auto& v : verdicts) {
                far_a.push_back(score_bin(v.scores[i].far, bins));
                far_b.push_back(score_bin(v.scores[j].far, bins));
                sas_a.push_back(score_bin(v.scores[i].sas, bins));
                sas_b.push_back(score_bin(v.scores[j].sas, bins));
            }
            report.far_pair_kappa.push_back(cohen_kappa(far_a, far_b, bins));
            report.sas_pair_kappa.push_back(cohen_kappa(sas_a, sas_b, bins));
        }
    }
    if (!report.far_pair_kappa.empty()) {
        report.far_kappa = std::accumulate(report.far_pair_kappa.begin(),
                                           report.far_pair_kappa.end(), 0.0) /
                           static_cast<double>(report.far_pair_kappa.size());
        report.sas_kappa = std::accumulate(report.sas_pair_kappa.begin(),
                                           report.sas_pair_kappa.end(), 0.0) /
                           static_cast<double>(report.sas_pair_kappa.size());
    }

    const std::vector<BandVariance> band_specs = {
        {"FAR > 0.9", 0.9, 1.0 + 1e-9, 0, 0.0, 0.0},
        {"0.4 < FAR < 0.6", 0.4, 0.6, 0, 0.0, 0.0},
        {"FAR < 0.1", -1e-9, 0.1, 0, 0.0, 0.0},
    };
    for (auto band : band_specs) {
        for (const auto& v : verdicts) {
            if (v.consensus_far > band.lo && v.consensus_far < band.hi) {
                ++band.count;
                band.mean_far_variance += v.far_variance;
                band.mean_sas_variance += v.sas_variance;
            }
        }
        if (band.count > 0) {
            band.mean_far_variance /= band.count;
            band.mean_sas_variance /= band.count;
        }
        report.bands.push_back(band);
    }
    return report;
}

}  // namespace ddft
