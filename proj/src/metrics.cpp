#include "ddft/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "ddft/stats.hpp"

namespace ddft {

namespace {

constexpr double kLevelTol = 1e-9;

Curve mean_curve(const std::vector<TurnRecord>& records, const std::vector<double>& grid,
                 double TurnRecord::*field) {
    Curve curve;
    for (double level : grid) {
        double sum = 0.0;
        std::size_t count = 0;
        for (const auto& r : records) {
            if (std::fabs(r.level - level) < kLevelTol) {
                sum += r.*field;
                ++count;
            }
        }
        if (count == 0)
            throw IncompleteGrid("no records at compression level " + std::to_string(level));
        curve[level] = sum / static_cast<double>(count);
    }
    return curve;
}

std::vector<std::string> ranking_by_score(const std::vector<std::pair<std::string, double>>& scores) {
    auto sorted = scores;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::vector<std::string> ids;
    ids.reserve(sorted.size());
    for (const auto& [id, score] : sorted) ids.push_back(id);
    return ids;
}

// Positions of each id in a ranking, as a vector aligned with `ids`.
std::vector<double> rank_positions(const std::vector<std::string>& ids,
                                   const std::vector<std::string>& ranking) {
    std::vector<double> pos(ids.size(), 0.0);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto it = std::find(ranking.begin(), ranking.end(), ids[i]);
        pos[i] = static_cast<double>(std::distance(ranking.begin(), it));
    }
    return pos;
}

}  // namespace

Curve compute_far_curve(const std::vector<TurnRecord>& records, const std::vector<double>& grid) {
    return mean_curve(records, grid, &TurnRecord::consensus_far);
}

Curve compute_sas_curve(const std::vector<TurnRecord>& records, const std::vector<double>& grid) {
    return mean_curve(records, grid, &TurnRecord::consensus_sas);
}

double compute_hoc(const Curve& far_curve, double theta, HocSemantics semantics) {
    if (far_curve.empty())
        throw IncompleteGrid("compute_hoc: empty curve");
    if (std::fabs(far_curve.begin()->first) > kLevelTol)
        throw IncompleteGrid("compute_hoc: curve must start at c = 0");
    double hoc = 0.0;
    if (semantics == HocSemantics::FirstCrossing) {
        if (far_curve.begin()->second < theta) return 0.0;
        for (const auto& [level, far] : far_curve) {
            if (far < theta) break;
            hoc = level;
        }
        return hoc;
    }
    for (const auto& [level, far] : far_curve) {
        if (far >= theta) hoc = level;
    }
    return hoc;
}

double compute_cri(const Curve& sas_curve) {
    if (sas_curve.size() < 2)
        throw IncompleteGrid("compute_cri: need at least two grid points");
    if (std::fabs(sas_curve.begin()->first) > kLevelTol ||
        std::fabs(sas_curve.rbegin()->first - 1.0) > kLevelTol)
        throw IncompleteGrid("compute_cri: curve must span [0,1]");
    double area = 0.0;
    auto prev = sas_curve.begin();
    for (auto it = std::next(prev); it != sas_curve.end(); ++it, ++prev) {
        area += 0.5 * (prev->second + it->second) * (it->first - prev->first);
    }
    return area;  // max possible area over [0,1] is 1.0
}

std::optional<double> compute_far_prime(const std::vector<TurnRecord>& records) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& r : records) {
        if (r.consensus_sas < 0.5) {
            sum += r.consensus_far;
            ++count;
        }
    }
    if (count == 0) return std::nullopt;
    return sum / static_cast<double>(count);
}

std::optional<double> compute_sas_prime(const std::vector<TurnRecord>& records) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& r : records) {
        if (r.consensus_far > 0.2) {
            sum += r.consensus_sas;
            ++count;
        }
    }
    if (count == 0) return std::nullopt;
    return sum / static_cast<double>(count);
}

double compute_ci(double hoc, double cri, double far_prime, double sas_prime) {
    const double denominator = far_prime + (1.0 - sas_prime);
    if (denominator <= 1e-9)
        throw DegenerateDenominator("compute_ci: FAR' + (1 - SAS') <= 1e-9");
    return hoc * cri / denominator;
}

std::vector<double> normalize_ci(const std::vector<double>& raw, NormalizationMode mode) {
    if (raw.empty())
        throw InsufficientData("normalize_ci: no scores");
    if (mode == NormalizationMode::Identity) return raw;
    const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
    if (*hi - *lo <= 1e-12) {
        std::cerr << "[ddft][warn] normalize_ci: all scores equal, mapping to 0.5\n";
        return std::vector<double>(raw.size(), 0.5);
    }
    std::vector<double> out;
    out.reserve(raw.size());
    for (double v : raw) out.push_back((v - *lo) / (*hi - *lo));
    return out;
}

Phenotype classify_phenotype(double ci, const PhenotypeThresholds& thresholds) {
    if (ci < 0.0)
        throw Error("classify_phenotype: ci must be >= 0");
    if (ci > thresholds.robust_min) return Phenotype::Robust;
    if (ci > thresholds.competent_min) return Phenotype::Competent;
    return Phenotype::Brittle;
}

double danger_zone_rate(const std::vector<TurnRecord>& records,
                        const DangerZoneThresholds& thresholds) {
    if (records.empty())
        throw InsufficientData("danger_zone_rate: no records");
    std::size_t in_zone = 0;
    for (const auto& r : records) {
        if (r.consensus_sas >= thresholds.sas_min && r.consensus_far <= thresholds.far_max)
            ++in_zone;
    }
    return static_cast<double>(in_zone) / static_cast<double>(records.size());
}

ModelProfile build_profile(const std::string& model_id,
                           const std::vector<TurnRecord>& records,
                           const std::vector<double>& grid, double theta,
                           HocSemantics semantics, const DangerZoneThresholds& danger,
                           const PhenotypeThresholds& phenotype) {
    ModelProfile profile;
    profile.model_id = model_id;
    const Curve far_curve = compute_far_curve(records, grid);
    const Curve sas_curve = compute_sas_curve(records, grid);
    profile.hoc = compute_hoc(far_curve, theta, semantics);
    profile.cri = compute_cri(sas_curve);
    profile.far_prime = compute_far_prime(records);
    profile.sas_prime = compute_sas_prime(records);

    double fp, sp;
    if (profile.far_prime && profile.sas_prime) {
        fp = *profile.far_prime;
        sp = *profile.sas_prime;
    } else {
        // No record qualified for a conditional mean; substitute the
        // unconditional mean and flag the profile.
        double far_sum = 0.0, sas_sum = 0.0;
        for (const auto& r : records) {
            far_sum += r.consensus_far;
            sas_sum += r.consensus_sas;
        }
        const auto n = static_cast<double>(records.size());
        fp = profile.far_prime ? *profile.far_prime : far_sum / n;
        sp = profile.sas_prime ? *profile.sas_prime : sas_sum / n;
        profile.prime_fallback = true;
    }
    profile.ci_raw = compute_ci(profile.hoc, profile.cri, fp, sp);
    profile.ci_norm = profile.ci_raw;
    profile.phenotype = classify_phenotype(profile.ci_norm, phenotype);
    profile.danger_zone_rate = danger_zone_rate(records, danger);
    return profile;
}

double ci_variant(CiFormula formula, double hoc, double cri, double far_prime,
                  double sas_prime) {
    switch (formula) {
        case CiFormula::Multiplicative:
            return compute_ci(hoc, cri, far_prime, sas_prime);
        case CiFormula::Additive:
            return hoc + cri - far_prime - (1.0 - sas_prime);
        case CiFormula::MaxBased: {
            const double denominator = far_prime + (1.0 - sas_prime);
            if (denominator <= 1e-9)
                throw DegenerateDenominator("ci_variant: FAR' + (1 - SAS') <= 1e-9");
            return std::max(hoc, cri) / denominator;
        }
    }
    throw Error("ci_variant: unknown formula");
}

FormulaStability formula_stability(const std::vector<ModelProfile>& profiles) {
    if (profiles.size() < 2)
        throw InsufficientData("formula_stability: need >= 2 profiles");
    std::vector<std::string> ids;
    std::vector<std::pair<std::string, double>> mult, add, maxb;
    for (const auto& p : profiles) {
        const double fp = p.far_prime.value_or(0.5);
        const double sp = p.sas_prime.value_or(0.5);
        ids.push_back(p.model_id);
        mult.emplace_back(p.model_id, ci_variant(CiFormula::Multiplicative, p.hoc, p.cri, fp, sp));
        add.emplace_back(p.model_id, ci_variant(CiFormula::Additive, p.hoc, p.cri, fp, sp));
        maxb.emplace_back(p.model_id, ci_variant(CiFormula::MaxBased, p.hoc, p.cri, fp, sp));
    }
    const auto base = rank_positions(ids, ranking_by_score(mult));
    FormulaStability out;
    out.additive_tau = kendall_tau(base, rank_positions(ids, ranking_by_score(add)));
    out.max_based_tau = kendall_tau(base, rank_positions(ids, ranking_by_score(maxb)));
    return out;
}

std::string to_string(Phenotype phenotype) {
    switch (phenotype) {
        case Phenotype::Robust: return "Robust";
        case Phenotype::Competent: return "Competent";
        case Phenotype::Brittle: return "Brittle";
    }
    return "Brittle";
}

std::string to_string(HocSemantics semantics) {
    return semantics == HocSemantics::FirstCrossing ? "first-crossing" : "literal-max";
}

std::string to_string(NormalizationMode mode) {
    return mode == NormalizationMode::Identity ? "identity" : "minmax";
}

HocSemantics hoc_semantics_from_string(const std::string& name) {
    if (name == "first-crossing") return HocSemantics::FirstCrossing;
    if (name == "literal-max") return HocSemantics::LiteralMax;
    throw ConfigError("unknown hoc semantics: " + name);
}

NormalizationMode normalization_from_string(const std::string& name) {
    if (name == "identity") return NormalizationMode::Identity;
    if (name == "minmax") return NormalizationMode::MinMax;
    throw ConfigError("unknown normalization mode: " + name);
}

}  // namespace ddft
