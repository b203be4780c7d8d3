#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ddft/errors.hpp"

namespace ddft {

// Two paired observation vectors of equal length n >= 3.
struct PairedSample {
    std::vector<double> x;
    std::vector<double> y;

    void validate() const;  // throws InsufficientData on shape/finiteness violations
};

// Labeled groups for one-way ANOVA.
struct GroupedSample {
    std::vector<std::pair<std::string, std::vector<double>>> groups;
};

struct Correlation {
    double value = 0.0;  // r, rho
    double p = 1.0;      // two-tailed
};

enum class TauVariant { TauA, TauB };
enum class CorrelationKind { Pearson, Spearman };

struct BootstrapInterval {
    double lo = 0.0;
    double hi = 0.0;
    int degenerate = 0;  // resamples skipped for zero variance
};

struct AnovaResult {
    double f = 0.0;
    double p = 1.0;
    double eta_sq = 0.0;
    int df_between = 0;
    int df_within = 0;
};

// Average ranks (1-based), ties receive the mean of the ranks they span.
std::vector<double> average_ranks(const std::vector<double>& values);

// Product-moment correlation with two-tailed p from the t approximation
// (df = n - 2). Zero variance in either vector -> UndefinedCorrelation.
Correlation pearson(const PairedSample& s);

// Rank correlation: Pearson on average ranks; p-value path identical to
// pearson() per the t approximation.
Correlation spearman(const PairedSample& s);

// Kendall rank correlation. TauA ignores ties in the denominator; TauB
// applies the tie correction and throws UndefinedCorrelation when a vector
// is entirely tied.
double kendall_tau(const std::vector<double>& a, const std::vector<double>& b,
                   TauVariant variant = TauVariant::TauA);

// Percentile-method bootstrap interval (2.5 / 97.5) for a correlation
// statistic. Resampling uses per-iteration counter-based seeding so results
// are independent of any internal parallelism. Degenerate resamples (zero
// variance) are skipped and counted; more than 50% degenerate ->
// UnstableBootstrap.
BootstrapInterval bootstrap_ci(const PairedSample& s, CorrelationKind kind,
                               int iterations, std::uint64_t seed);

// Standard between/within decomposition; eta_sq = SS_between / SS_total.
AnovaResult one_way_anova(const GroupedSample& g);

// Effect size recovered from the F statistic alone:
// eta_sq = F * df1 / (F * df1 + df2), an algebraic identity with the
// SS-based definition.
double eta_squared_from_f(double f, double df1, double df2);

// Shared numeric kernels (exposed for direct verification in tests).
double regularized_incomplete_beta(double a, double b, double x);
double student_t_two_tailed_p(double t, double df);
double f_upper_tail_p(double f, double df1, double df2);
std::uint64_t splitmix64(std::uint64_t z);

}  // namespace ddft
