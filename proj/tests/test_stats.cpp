#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ddft/stats.hpp"
#include "oracles.hpp"

using namespace ddft;

namespace {

std::vector<double> random_int_vector(std::mt19937_64& rng, std::size_t n) {
    std::uniform_int_distribution<int> dist(1, 8);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

}  // namespace

TEST_CASE("average ranks with ties") {
    CHECK(average_ranks({10.0, 20.0, 30.0}) == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(average_ranks({5.0, 5.0, 1.0}) == std::vector<double>{2.5, 2.5, 1.0});
    CHECK(average_ranks({2.0, 2.0, 2.0}) == std::vector<double>{2.0, 2.0, 2.0});
}

TEST_CASE("pearson on a small hand-checked sample") {
    // Covariance oracle by hand: r = 3 / sqrt(2 * 14/3).
    const auto [r, p] = pearson({{1, 2, 3}, {1, 2, 4}});
    CHECK(r == doctest::Approx(0.982).epsilon(0.001));
    CHECK(p > 0.0);
    CHECK(p < 1.0);
}

TEST_CASE("spearman on small samples") {
    // Rank-difference oracle: sum d^2 = 6 at n = 3 -> rho = -0.5.
    CHECK(spearman({{1, 2, 3}, {3, 1, 2}}).value == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(spearman({{1, 2, 3, 4}, {10, 20, 25, 80}}).value == doctest::Approx(1.0));
    CHECK(spearman({{1, 2, 3, 4}, {80, 25, 20, 10}}).value == doctest::Approx(-1.0));
}

TEST_CASE("spearman equals spearman of ranks") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        PairedSample s{random_int_vector(rng, 6), random_int_vector(rng, 6)};
        if (oracle::constant(s.x) || oracle::constant(s.y)) continue;
        const PairedSample ranked{average_ranks(s.x), average_ranks(s.y)};
        CHECK(spearman(s).value == doctest::Approx(spearman(ranked).value).epsilon(1e-12));
    }
}

TEST_CASE("correlations invariant under strictly monotone transforms") {
    std::mt19937_64 rng(13);
    auto cube = [](std::vector<double> v) {
        for (auto& x : v) x = x * x * x + 2.0 * x;
        return v;
    };
    for (int trial = 0; trial < 100; ++trial) {
        PairedSample s{random_int_vector(rng, 7), random_int_vector(rng, 7)};
        if (oracle::constant(s.x) || oracle::constant(s.y)) continue;
        const PairedSample t{cube(s.x), s.y};
        CHECK(spearman(s).value == doctest::Approx(spearman(t).value).epsilon(1e-12));
        CHECK(kendall_tau(s.x, s.y) == doctest::Approx(kendall_tau(t.x, t.y)).epsilon(1e-12));
    }
}

TEST_CASE("published p-value path") {
    auto two_tailed = [](double r, int n) {
        const double df = n - 2;
        const double t = r * std::sqrt(df / (1.0 - r * r));
        return student_t_two_tailed_p(t, df);
    };
    CHECK(two_tailed(-0.817, 9) == doctest::Approx(0.007).epsilon(0.15));
    CHECK(std::fabs(two_tailed(-0.817, 9) - 0.007) < 0.001);
    CHECK(std::fabs(two_tailed(0.083, 9) - 0.832) < 0.005);
    CHECK(std::fabs(two_tailed(0.153, 9) - 0.695) < 0.005);
}

TEST_CASE("t distribution sanity") {
    // df = 1 is Cauchy: P(|T| > 1) = 0.5 exactly.
    CHECK(student_t_two_tailed_p(1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(student_t_two_tailed_p(0.0, 7.0) == doctest::Approx(1.0));
    CHECK(regularized_incomplete_beta(1.0, 1.0, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("degenerate correlations") {
    CHECK_THROWS_AS(pearson({{1, 1, 1}, {1, 2, 3}}), UndefinedCorrelation);
    CHECK_THROWS_AS(spearman({{4, 4, 4}, {1, 2, 3}}), UndefinedCorrelation);
    CHECK_THROWS_AS(pearson({{1, 2}, {1, 2}}), InsufficientData);
    CHECK_THROWS_AS(pearson({{1, 2, 3}, {1, 2}}), InsufficientData);
    const double nan = std::nan("");
    CHECK_THROWS_AS(pearson({{1, 2, nan}, {1, 2, 3}}), InsufficientData);
}

TEST_CASE("kendall tau basics") {
    CHECK(kendall_tau({1, 2, 3}, {1, 2, 3}) == doctest::Approx(1.0));
    CHECK(kendall_tau({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
    // Pair enumeration oracle: one discordant pair of three.
    CHECK(kendall_tau({1, 2, 3}, {1, 3, 2}) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK_THROWS_AS(kendall_tau({1}, {1}), InsufficientData);
    CHECK_THROWS_AS(kendall_tau({1, 1, 1}, {1, 2, 3}, TauVariant::TauB), UndefinedCorrelation);
    // Tau-b corrects tie deflation.
    CHECK(kendall_tau({1, 1, 2, 3}, {1, 1, 2, 3}, TauVariant::TauB) == doctest::Approx(1.0));
}

TEST_CASE("brute-force oracle equivalence on random integer vectors") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<std::size_t> len_dist(3, 8);
    int checked = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = len_dist(rng);
        const auto x = random_int_vector(rng, n);
        const auto y = random_int_vector(rng, n);
        CHECK(kendall_tau(x, y) == doctest::Approx(oracle::kendall_tau_a(x, y)).epsilon(1e-12));
        if (!oracle::constant(x) && !oracle::constant(y)) {
            CHECK(pearson({x, y}).value == doctest::Approx(oracle::pearson(x, y)).epsilon(1e-12));
            CHECK(spearman({x, y}).value == doctest::Approx(oracle::spearman(x, y)).epsilon(1e-12));
            ++checked;
        }
    }
    CHECK(checked > 800);
}

TEST_CASE("anova null case and identity") {
    GroupedSample identical;
    identical.groups = {{"a", {2, 2, 2}}, {"b", {2, 2, 2}}};
    const auto res = one_way_anova(identical);
    CHECK(res.f == 0.0);
    CHECK(res.eta_sq == 0.0);
    CHECK(res.p == doctest::Approx(1.0));

    CHECK(eta_squared_from_f(0.99, 7, 1792) == doctest::Approx(0.003853).epsilon(0.01));
    CHECK(eta_squared_from_f(0.0, 7, 1792) == 0.0);
}

TEST_CASE("anova eta squared matches the F identity on random data") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> value(0.0, 10.0);
    for (int trial = 0; trial < 100; ++trial) {
        GroupedSample g;
        std::uniform_int_distribution<int> k_dist(2, 5), n_dist(2, 7);
        const int k = k_dist(rng);
        for (int i = 0; i < k; ++i) {
            std::vector<double> values;
            const int n = n_dist(rng);
            for (int j = 0; j < n; ++j) values.push_back(value(rng));
            g.groups.emplace_back("g" + std::to_string(i), values);
        }
        const auto res = one_way_anova(g);
        if (!std::isfinite(res.f)) continue;
        CHECK(res.eta_sq ==
              doctest::Approx(eta_squared_from_f(res.f, res.df_between, res.df_within))
                  .epsilon(1e-9));
        // And against the definition-level oracle.
        std::vector<std::vector<double>> raw;
        for (const auto& [label, values] : g.groups) raw.push_back(values);
        const auto expected = oracle::anova(raw);
        CHECK(res.f == doctest::Approx(expected.f).epsilon(1e-9));
        CHECK(res.eta_sq == doctest::Approx(expected.eta_sq).epsilon(1e-9));
    }
}

TEST_CASE("two-group F equals squared pooled t") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> value(0.0, 5.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> a, b;
        std::uniform_int_distribution<int> n_dist(3, 9);
        const int na = n_dist(rng), nb = n_dist(rng);
        for (int i = 0; i < na; ++i) a.push_back(value(rng));
        for (int i = 0; i < nb; ++i) b.push_back(value(rng));
        const auto res = one_way_anova({{{"a", a}, {"b", b}}});
        if (!std::isfinite(res.f)) continue;

        auto mean = [](const std::vector<double>& v) {
            return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        };
        auto ss = [&](const std::vector<double>& v) {
            const double m = mean(v);
            double out = 0.0;
            for (double x : v) out += (x - m) * (x - m);
            return out;
        };
        const double pooled = (ss(a) + ss(b)) / static_cast<double>(na + nb - 2);
        const double t = (mean(a) - mean(b)) /
                         std::sqrt(pooled * (1.0 / na + 1.0 / nb));
        CHECK(res.f == doctest::Approx(t * t).epsilon(1e-9));
    }
}

TEST_CASE("anova input validation") {
    CHECK_THROWS_AS(one_way_anova({{{"only", {1, 2, 3}}}}), InsufficientData);
    CHECK_THROWS_AS(one_way_anova({{{"a", {}}, {"b", {1.0}}}}), InsufficientData);
    CHECK_THROWS_AS(one_way_anova({{{"a", {1.0}}, {"b", {2.0}}}}), InsufficientData);
    // A singleton group is fine as long as N > k.
    const auto res = one_way_anova({{{"a", {1.0}}, {"b", {2.0, 3.0}}}});
    CHECK(res.df_between == 1);
    CHECK(res.df_within == 1);
}

TEST_CASE("bootstrap determinism and tight case") {
    PairedSample exact{{1, 2, 3, 4, 5, 6, 7, 8, 9}, {2, 4, 6, 8, 10, 12, 14, 16, 18}};
    const auto a = bootstrap_ci(exact, CorrelationKind::Pearson, 2000, 7);
    const auto b = bootstrap_ci(exact, CorrelationKind::Pearson, 2000, 7);
    CHECK(a.lo == b.lo);
    CHECK(a.hi == b.hi);
    CHECK(a.lo >= 1.0 - 1e-9);
    CHECK(a.hi <= 1.0 + 1e-9);
    CHECK(a.lo <= pearson(exact).value);
    CHECK(pearson(exact).value <= a.hi + 1e-12);
}

TEST_CASE("bootstrap wide interval for weak correlation at n = 9") {
    PairedSample weak{{1, 2, 3, 4, 5, 6, 7, 8, 9}, {4.1, 8.9, 1.2, 7.4, 0.6, 9.3, 3.2, 6.8, 5.0}};
    const auto interval = bootstrap_ci(weak, CorrelationKind::Pearson, 10000, 123);
    CHECK(interval.lo < 0.0);
    CHECK(interval.hi > 0.0);
    CHECK(interval.hi - interval.lo > 1.0);
}

TEST_CASE("bootstrap guards") {
    PairedSample s{{1, 2, 3}, {1, 2, 3}};
    CHECK_THROWS_AS(bootstrap_ci(s, CorrelationKind::Pearson, 100, 1), InsufficientData);
    PairedSample flat{{1, 1, 1}, {1, 2, 3}};
    CHECK_THROWS_AS(bootstrap_ci(flat, CorrelationKind::Pearson, 1000, 1), UnstableBootstrap);
}
