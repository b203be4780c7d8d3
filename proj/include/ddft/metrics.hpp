#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ddft/errors.hpp"

namespace ddft {

// One scored subject turn, flattened for aggregation. The key
// (model, concept, level, turn) is unique within a run.
struct TurnRecord {
    std::string model_id;
    std::string concept_id;
    double level = 0.0;
    int turn = 0;
    double consensus_far = 0.0;
    double consensus_sas = 0.0;
};

// level -> mean score, ordered ascending by level.
using Curve = std::map<double, double>;

// HOC semantics on non-monotone curves:
//   FirstCrossing — largest grid c* with FAR >= theta at every level <= c*.
//   LiteralMax    — largest grid c with FAR(c) >= theta regardless of dips.
enum class HocSemantics { FirstCrossing, LiteralMax };

enum class NormalizationMode { Identity, MinMax };

enum class Phenotype { Robust, Competent, Brittle };

struct PhenotypeThresholds {
    double robust_min = 0.60;    // Robust: ci > robust_min
    double competent_min = 0.30; // Competent: competent_min < ci <= robust_min
};

struct DangerZoneThresholds {
    double sas_min = 0.70;
    double far_max = 0.30;
};

// Aggregate metrics for one model. far_prime / sas_prime are absent when
// no record qualifies for their filter; prime_fallback marks a CI computed
// with unconditional means substituted for absent primes.
struct ModelProfile {
    std::string model_id;
    double hoc = 0.0;
    double cri = 0.0;
    std::optional<double> far_prime;
    std::optional<double> sas_prime;
    bool prime_fallback = false;
    double ci_raw = 0.0;
    double ci_norm = 0.0;
    Phenotype phenotype = Phenotype::Brittle;
    double danger_zone_rate = 0.0;
};

// Per-level mean of consensus FAR (resp. SAS) over every record at that grid
// level. A grid level with no record -> IncompleteGrid.
Curve compute_far_curve(const std::vector<TurnRecord>& records, const std::vector<double>& grid);
Curve compute_sas_curve(const std::vector<TurnRecord>& records, const std::vector<double>& grid);

// Compression level at which FAR first falls below theta; see HocSemantics.
// Returns 0.0 when FAR at zero compression is already below theta.
double compute_hoc(const Curve& far_curve, double theta,
                   HocSemantics semantics = HocSemantics::FirstCrossing);

// Normalized area under the SAS curve: trapezoidal integral over [0,1]
// divided by the maximum possible area (1.0). The curve must span [0,1].
double compute_cri(const Curve& sas_curve);

// Avg(FAR | SAS < 0.5); absent when no record qualifies.
std::optional<double> compute_far_prime(const std::vector<TurnRecord>& records);

// Avg(SAS | FAR > 0.2); absent when no record qualifies.
std::optional<double> compute_sas_prime(const std::vector<TurnRecord>& records);

// CI = HOC * CRI / (FAR' + (1 - SAS')). Denominator <= 1e-9 ->
// DegenerateDenominator.
double compute_ci(double hoc, double cri, double far_prime, double sas_prime);

// Identity returns raw values unchanged (the default); MinMax maps min -> 0
// and max -> 1, with all-equal inputs mapped to 0.5 by convention.
std::vector<double> normalize_ci(const std::vector<double>& raw, NormalizationMode mode);

Phenotype classify_phenotype(double ci, const PhenotypeThresholds& thresholds = {});

// Fraction of records with SAS >= sas_min and FAR <= far_max (fluent
// hallucination). Empty record set -> InsufficientData.
double danger_zone_rate(const std::vector<TurnRecord>& records,
                        const DangerZoneThresholds& thresholds = {});

// Builds the full profile for one model's records. ci_norm and phenotype are
// filled with the raw CI / its classification; callers normalizing across a
// roster overwrite them afterwards.
ModelProfile build_profile(const std::string& model_id,
                           const std::vector<TurnRecord>& records,
                           const std::vector<double>& grid, double theta,
                           HocSemantics semantics = HocSemantics::FirstCrossing,
                           const DangerZoneThresholds& danger = {},
                           const PhenotypeThresholds& phenotype = {});

// Ranking-stability check across composite formulations.
enum class CiFormula { Multiplicative, Additive, MaxBased };

double ci_variant(CiFormula formula, double hoc, double cri, double far_prime,
                  double sas_prime);

struct FormulaStability {
    double additive_tau = 0.0;   // ranking agreement vs multiplicative
    double max_based_tau = 0.0;
};

FormulaStability formula_stability(const std::vector<ModelProfile>& profiles);

std::string to_string(Phenotype phenotype);
std::string to_string(HocSemantics semantics);
std::string to_string(NormalizationMode mode);
HocSemantics hoc_semantics_from_string(const std::string& name);
NormalizationMode normalization_from_string(const std::string& name);

}  // namespace ddft
