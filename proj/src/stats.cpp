#include "ddft/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace ddft {

namespace {

constexpr double kEps = 1e-12;

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kTiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    return h;
}

double pearson_value(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= kEps || syy <= kEps)
        throw UndefinedCorrelation("correlation undefined: zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double correlation_p(double r, std::size_t n) {
    if (1.0 - r * r < kEps) return 0.0;
    const double df = static_cast<double>(n) - 2.0;
    const double t = r * std::sqrt(df / (1.0 - r * r));
    return student_t_two_tailed_p(t, df);
}

double quantile(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

void PairedSample::validate() const {
    if (x.size() != y.size())
        throw InsufficientData("paired sample: length mismatch");
    if (x.size() < 3)
        throw InsufficientData("paired sample: need n >= 3");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
            throw InsufficientData("paired sample: non-finite value");
    }
}

std::vector<double> average_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

Correlation pearson(const PairedSample& s) {
    s.validate();
    const double r = pearson_value(s.x, s.y);
    return {r, correlation_p(r, s.x.size())};
}

Correlation spearman(const PairedSample& s) {
    s.validate();
    const std::vector<double> rx = average_ranks(s.x);
    const std::vector<double> ry = average_ranks(s.y);
    const double rho = pearson_value(rx, ry);
    return {rho, correlation_p(rho, s.x.size())};
}

double kendall_tau(const std::vector<double>& a, const std::vector<double>& b,
                   TauVariant variant) {
    if (a.size() != b.size())
        throw InsufficientData("kendall_tau: length mismatch");
    const std::size_t n = a.size();
    if (n < 2)
        throw InsufficientData("kendall_tau: need n >= 2");
    long long concordant = 0, discordant = 0, ties_a = 0, ties_b = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double da = a[i] - a[j];
            const double db = b[i] - b[j];
            if (da == 0.0) ++ties_a;
            if (db == 0.0) ++ties_b;
            const double prod = da * db;
            if (prod > 0.0) ++concordant;
            else if (prod < 0.0) ++discordant;
        }
    }
    const auto pairs = static_cast<long long>(n) * static_cast<long long>(n - 1) / 2;
    const double num = static_cast<double>(concordant - discordant);
    if (variant == TauVariant::TauA)
        return num / static_cast<double>(pairs);
    const double denom = std::sqrt(static_cast<double>(pairs - ties_a) *
                                   static_cast<double>(pairs - ties_b));
    if (denom <= kEps)
        throw UndefinedCorrelation("kendall_tau: tau-b undefined, vector fully tied");
    return num / denom;
}

BootstrapInterval bootstrap_ci(const PairedSample& s, CorrelationKind kind,
                               int iterations, std::uint64_t seed) {
    s.validate();
    if (iterations < 1000)
        throw InsufficientData("bootstrap_ci: need >= 1000 iterations");
    const std::size_t n = s.x.size();
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(iterations));
    int degenerate = 0;
    std::vector<double> rx(n), ry(n);
    for (int it = 0; it < iterations; ++it) {
        // Per-iteration counter-based seed: stream is identical regardless of
        // how iterations are scheduled.
        std::mt19937_64 rng(splitmix64(seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(it)));
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t k = pick(rng);
            rx[i] = s.x[k];
            ry[i] = s.y[k];
        }
        try {
            double v;
            if (kind == CorrelationKind::Pearson) {
                v = pearson_value(rx, ry);
            } else {
                v = pearson_value(average_ranks(rx), average_ranks(ry));
            }
            values.push_back(v);
        } catch (const UndefinedCorrelation&) {
            ++degenerate;
        }
    }
    if (2 * degenerate > iterations)
        throw UnstableBootstrap("bootstrap_ci: more than half of resamples degenerate");
    std::sort(values.begin(), values.end());
    return {quantile(values, 0.025), quantile(values, 0.975), degenerate};
}

AnovaResult one_way_anova(const GroupedSample& g) {
    const std::size_t k = g.groups.size();
    if (k < 2)
        throw InsufficientData("one_way_anova: need >= 2 groups");
    std::size_t total_n = 0;
    double grand_sum = 0.0;
    for (const auto& [label, values] : g.groups) {
        if (values.empty())
            throw InsufficientData("one_way_anova: empty group '" + label + "'");
        total_n += values.size();
        grand_sum += std::accumulate(values.begin(), values.end(), 0.0);
    }
    if (total_n <= k)
        throw InsufficientData("one_way_anova: need N > group count");
    const double grand_mean = grand_sum / static_cast<double>(total_n);

    double ss_between = 0.0, ss_within = 0.0;
    for (const auto& [label, values] : g.groups) {
        const double mean = std::accumulate(values.begin(), values.end(), 0.0) /
                            static_cast<double>(values.size());
        ss_between += static_cast<double>(values.size()) * (mean - grand_mean) * (mean - grand_mean);
        for (double v : values) ss_within += (v - mean) * (v - mean);
    }
    const double ss_total = ss_between + ss_within;

    AnovaResult res;
    res.df_between = static_cast<int>(k) - 1;
    res.df_within = static_cast<int>(total_n - k);
    if (ss_within <= kEps) {
        if (ss_between <= kEps) {
            res.f = 0.0;
            res.p = 1.0;
            res.eta_sq = 0.0;
        } else {
            res.f = std::numeric_limits<double>::infinity();
            res.p = 0.0;
            res.eta_sq = 1.0;
        }
        return res;
    }
    res.f = (ss_between / res.df_between) / (ss_within / res.df_within);
    res.p = f_upper_tail_p(res.f, res.df_between, res.df_within);
    res.eta_sq = ss_total > 0.0 ? ss_between / ss_total : 0.0;
    return res;
}

double eta_squared_from_f(double f, double df1, double df2) {
    if (f < 0.0)
        throw InsufficientData("eta_squared_from_f: F must be >= 0");
    return f * df1 / (f * df1 + df2);
}

double regularized_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
    const double bt = std::exp(log_bt);
    if (x < (a + 1.0) / (a + b + 2.0))
        return bt * beta_cf(a, b, x) / a;
    return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_two_tailed_p(double t, double df) {
    // P(|T| > t) = I_{df/(df+t^2)}(df/2, 1/2)
    const double x = df / (df + t * t);
    return std::clamp(regularized_incomplete_beta(df / 2.0, 0.5, x), 0.0, 1.0);
}

double f_upper_tail_p(double f, double df1, double df2) {
    if (f <= 0.0) return 1.0;
    if (std::isinf(f)) return 0.0;
    const double x = df2 / (df2 + df1 * f);
    return std::clamp(regularized_incomplete_beta(df2 / 2.0, df1 / 2.0, x), 0.0, 1.0);
}

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace ddft
