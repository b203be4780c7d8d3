// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ddft/corpus.hpp"
#include "ddft/harness.hpp"
#include "ddft/report.hpp"
#include "oracles.hpp"
#include "table2.hpp"

using namespace ddft;

namespace {

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool condition, const std::string& message) {
    if (!condition) throw Failure(message);
}

std::string slurp(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    require(static_cast<bool>(in), "cannot read " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::filesystem::path fresh_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

double elapsed_s(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// 1. Published-table arithmetic: CI within +/-0.002 per row, induced ranking
//    identical (tau = 1.0), under one second.
void criterion_table_reproduction() {
    const auto start = std::chrono::steady_clock::now();
    std::vector<std::pair<std::string, double>> scored;
    for (const auto& row : table2::kRows) {
        const double ci = compute_ci(row.hoc, row.cri, row.far_prime, row.sas_prime);
        require(std::fabs(ci - row.ci) <= 0.002,
                std::string(row.model) + ": ci " + std::to_string(ci) + " vs " +
                    std::to_string(row.ci));
        scored.emplace_back(row.model, ci);
    }
    auto ranked = scored;
    std::sort(ranked.begin(), ranked.end(),
              [](const auto& a, const auto& b) { return a.second > b.second; });
    std::vector<double> computed_pos, published_pos;
    for (std::size_t i = 0; i < table2::kRows.size(); ++i) {
        published_pos.push_back(static_cast<double>(i));
        for (std::size_t j = 0; j < ranked.size(); ++j)
            if (ranked[j].first == table2::kRows[i].model)
                computed_pos.push_back(static_cast<double>(j));
    }
    require(computed_pos.size() == table2::kRows.size(), "ranking incomplete");
    const double tau = kendall_tau(published_pos, computed_pos);
    require(tau == 1.0, "ranking tau " + std::to_string(tau) + " != 1.0");
    require(elapsed_s(start) < 1.0, "criterion exceeded 1 s");
}

// 2. Two-tailed p-values along the t-approximation path.
void criterion_p_values() {
    auto two_tailed = [](double r, int n) {
        const double df = n - 2;
        const double t = r * std::sqrt(df / (1.0 - r * r));
        return student_t_two_tailed_p(t, df);
    };
    const double p1 = two_tailed(-0.817, 9);
    require(std::fabs(p1 - 0.007) <= 0.001,
            "p(rho=-0.817, n=9) = " + std::to_string(p1) + " not within 0.007 +/- 0.001");
    const double p2 = two_tailed(0.083, 9);
    require(std::fabs(p2 - 0.832) <= 0.005,
            "p(r=0.083, n=9) = " + std::to_string(p2) + " not within 0.832 +/- 0.005");
    const double p3 = two_tailed(0.153, 9);
    require(std::fabs(p3 - 0.695) <= 0.005,
            "p(r=0.153, n=9) = " + std::to_string(p3) + " not within 0.695 +/- 0.005");
}

// 3. Effect size recovered from F = 0.99 at df (7, 1792).
void criterion_eta_squared() {
    const double eta = eta_squared_from_f(0.99, 7, 1792);
    require(eta >= 0.0035 && eta <= 0.0045,
            "eta_sq = " + std::to_string(eta) + " outside [0.0035, 0.0045]");
}

// 4. Statistics agree exactly with definition-level oracles.
void criterion_stats_oracles() {
    std::mt19937_64 rng(104729);
    std::uniform_int_distribution<std::size_t> len_dist(3, 8);
    std::uniform_int_distribution<int> value_dist(1, 8);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = len_dist(rng);
        std::vector<double> x(n), y(n);
        for (auto& v : x) v = value_dist(rng);
        for (auto& v : y) v = value_dist(rng);
        require(std::fabs(kendall_tau(x, y) - oracle::kendall_tau_a(x, y)) < 1e-12,
                "tau mismatch");
        if (!oracle::constant(x) && !oracle::constant(y)) {
            require(std::fabs(pearson({x, y}).value - oracle::pearson(x, y)) < 1e-12,
                    "r mismatch");
            require(std::fabs(spearman({x, y}).value - oracle::spearman(x, y)) < 1e-12,
                    "rho mismatch");
        }
        // Split into 2-3 groups for the F check.
        if (n >= 6) {
            std::vector<std::vector<double>> groups{{x.begin(), x.begin() + 2},
                                                    {x.begin() + 2, x.begin() + 4},
                                                    {x.begin() + 4, x.end()}};
            GroupedSample sample;
            for (std::size_t i = 0; i < groups.size(); ++i)
                sample.groups.emplace_back("g" + std::to_string(i), groups[i]);
            const AnovaResult result = one_way_anova(sample);
            const auto expected = oracle::anova(groups);
            if (std::isfinite(result.f))
                require(std::fabs(result.f - expected.f) < 1e-12, "F mismatch");
        }
    }
}

// 5. Metric aggregates agree with filter/scan/trapezoid oracles.
void criterion_metric_oracles() {
    const std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0};
    std::mt19937_64 rng(1299709);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> count(1, 4);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<TurnRecord> records;
        std::vector<double> far_means, sas_means;
        for (double level : grid) {
            const int k = count(rng);
            double fsum = 0.0, ssum = 0.0;
            for (int i = 0; i < k; ++i) {
                const double far = unit(rng), sas = unit(rng);
                records.push_back(TurnRecord{"m", "c", level, 1 + (i % 5), far, sas});
                fsum += far;
                ssum += sas;
            }
            far_means.push_back(fsum / k);
            sas_means.push_back(ssum / k);
        }
        const double theta = unit(rng);
        const Curve far_curve = compute_far_curve(records, grid);
        const Curve sas_curve = compute_sas_curve(records, grid);
        require(compute_hoc(far_curve, theta, HocSemantics::FirstCrossing) ==
                    oracle::hoc_first_crossing(grid, far_means, theta),
                "hoc first-crossing mismatch");
        require(compute_hoc(far_curve, theta, HocSemantics::LiteralMax) ==
                    oracle::hoc_literal_max(grid, far_means, theta),
                "hoc literal-max mismatch");
        require(std::fabs(compute_cri(sas_curve) - oracle::trapezoid(grid, sas_means)) < 1e-12,
                "cri mismatch");
        const auto fp = compute_far_prime(records);
        const auto fp_expected = oracle::filtered_mean(records, true);
        require(fp.has_value() == fp_expected.has_value(), "far' presence mismatch");
        if (fp) require(std::fabs(*fp - *fp_expected) < 1e-12, "far' mismatch");
        const auto sp = compute_sas_prime(records);
        const auto sp_expected = oracle::filtered_mean(records, false);
        require(sp.has_value() == sp_expected.has_value(), "sas' presence mismatch");
        if (sp) require(std::fabs(*sp - *sp_expected) < 1e-12, "sas' mismatch");
        const double sas_min = unit(rng), far_max = unit(rng);
        require(std::fabs(danger_zone_rate(records, {sas_min, far_max}) -
                          oracle::danger_rate(records, sas_min, far_max)) < 1e-12,
                "danger-zone mismatch");
    }
}

// 6. Protocol law: 1000 sessions at fab_reject_prob 0.82 trigger the
//    follow-up 18% +/- 3% of the time, and only below the FAR 0.5 boundary.
void criterion_protocol_law() {
    const auto out = fresh_dir("ddft_acc_protocol");
    SimulateOptions options;
    options.out_dir = out;
    options.seed = 20260810;
    options.n_models = 25;
    options.parallelism = 4;
    options.write_report = false;
    RunConfig config = make_simulated_config(options);
    for (auto& subject : config.subjects) subject.sim.fab_reject_prob = 0.82;
    const RunPaths paths = run(config);
    const RunLogData data = read_run_log(paths.log);
    require(data.transcripts.size() == 1000, "expected 25 x 8 x 5 = 1000 sessions, got " +
                                                 std::to_string(data.transcripts.size()));
    int five_turn = 0;
    for (const auto& transcript : data.transcripts) {
        require(transcript.complete, "aborted session in simulated run");
        if (transcript.turns.size() == 5) {
            ++five_turn;
            require(transcript.turns[3].verdict.consensus_far < 0.5,
                    "five-turn transcript with turn-4 consensus FAR >= 0.5");
        }
    }
    const double rate = five_turn / 1000.0;
    require(std::fabs(rate - 0.18) <= 0.03,
            "turn-5 trigger rate " + std::to_string(rate) + " outside 0.18 +/- 0.03");
    std::filesystem::remove_all(out);
}

// 7. End-to-end determinism: byte-identical logs and bundles under a fixed
//    seed; checksums verify and catch a one-byte corruption.
void criterion_determinism() {
    const auto out1 = fresh_dir("ddft_acc_det1");
    const auto out2 = fresh_dir("ddft_acc_det2");
    SimulateOptions options;
    options.seed = 424242;
    options.n_models = 4;
    options.parallelism = 3;
    options.write_report = false;
    options.out_dir = out1;
    const SimulateResult first = simulate_run(options);
    options.out_dir = out2;
    const SimulateResult second = simulate_run(options);
    require(slurp(first.paths.log) == slurp(second.paths.log), "run logs differ byte-wise");
    require(bundle_to_json(first.bundle).dump() == bundle_to_json(second.bundle).dump(),
            "analysis bundles differ");
    verify_checksum(first.paths.log);
    auto bytes = slurp(first.paths.log);
    bytes[bytes.size() / 3] = bytes[bytes.size() / 3] == 'a' ? 'b' : 'a';
    std::ofstream(first.paths.log, std::ios::binary | std::ios::trunc) << bytes;
    bool detected = false;
    try {
        verify_checksum(first.paths.log);
    } catch (const ChecksumMismatch&) {
        detected = true;
    }
    require(detected, "one-byte corruption not detected");
    std::filesystem::remove_all(out1);
    std::filesystem::remove_all(out2);
}

// 8. Two-system dissociation: high semantic / low verifier floods the danger
//    zone, low semantic / low verifier stays out of it.
void criterion_dissociation() {
    auto run_subject = [](double sem_base, std::uint64_t seed) {
        const auto out = fresh_dir("ddft_acc_zone_" + std::to_string(seed));
        SimulateOptions options;
        options.out_dir = out;
        options.seed = seed;
        options.n_models = 1;
        options.write_report = false;
        RunConfig config = make_simulated_config(options);
        SimSubjectParams params;
        params.sem_base = sem_base;
        params.sem_decay = 0.05;
        params.ver_strength = 0.2;
        params.ver_load_sensitivity = 0.1;
        params.fab_reject_prob = 0.2;
        params.noise_sd = 0.05;
        params.seed = seed;
        config.subjects[0].sim = params;
        const RunPaths paths = run(config);
        const RunLogData data = read_run_log(paths.log);
        const double rate = danger_zone_rate(data.turn_records);
        std::filesystem::remove_all(out);
        return rate;
    };
    const double fluent = run_subject(0.9, 88001);
    require(fluent > 0.5, "fluent-hallucinator danger rate " + std::to_string(fluent) +
                              " not > 0.5");
    const double incoherent = run_subject(0.3, 88002);
    require(incoherent < 0.1, "incoherent subject danger rate " + std::to_string(incoherent) +
                                  " not < 0.1");
}

// 9. Rankings from the {0, 0.5, 1} sub-grid agree with the 5-level rankings
//    at tau >= 0.9 on a 9-model simulated population.
void criterion_granularity() {
    const auto out = fresh_dir("ddft_acc_granularity");
    SimulateOptions options;
    options.out_dir = out;
    options.seed = 99;
    options.n_models = 9;
    options.parallelism = 4;
    options.write_report = false;
    const SimulateResult result = simulate_run(options);
    require(result.bundle.accounting.sessions_total == 360,
            "expected 9 x 8 x 5 = 360 sessions");
    require(!result.bundle.granularity.empty(), "granularity check missing");
    const auto& row = result.bundle.granularity.front();
    require(row.n_models == 9, "granularity covered " + std::to_string(row.n_models) +
                                   " models");
    require(row.tau >= 0.9,
            "sub-grid ranking tau " + std::to_string(row.tau) + " below 0.9");
    std::filesystem::remove_all(out);
}

// 10. Bootstrap stability: exact under a fixed seed, endpoints stable to
//     +/-0.05 across seeds, 10,000 iterations under five seconds.
void criterion_bootstrap() {
    const auto start = std::chrono::steady_clock::now();
    const PairedSample weak{{1, 2, 3, 4, 5, 6, 7, 8, 9},
                            {4.1, 8.9, 1.2, 7.4, 0.6, 9.3, 3.2, 6.8, 5.0}};
    const BootstrapInterval a = bootstrap_ci(weak, CorrelationKind::Pearson, 10000, 7);
    const BootstrapInterval b = bootstrap_ci(weak, CorrelationKind::Pearson, 10000, 7);
    require(a.lo == b.lo && a.hi == b.hi, "same-seed intervals differ");
    const BootstrapInterval c = bootstrap_ci(weak, CorrelationKind::Pearson, 10000, 8);
    const BootstrapInterval d = bootstrap_ci(weak, CorrelationKind::Pearson, 10000, 9);
    require(std::fabs(a.lo - c.lo) <= 0.05 && std::fabs(a.hi - c.hi) <= 0.05,
            "endpoints unstable across seeds (7 vs 8)");
    require(std::fabs(a.lo - d.lo) <= 0.05 && std::fabs(a.hi - d.hi) <= 0.05,
            "endpoints unstable across seeds (7 vs 9)");
    require(elapsed_s(start) < 5.0, "bootstrap exceeded 5 s");
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void()>>> criteria = {
        {"1. published-table arithmetic and ranking", criterion_table_reproduction},
        {"2. p-value path", criterion_p_values},
        {"3. anova effect-size consistency", criterion_eta_squared},
        {"4. statistics oracle equivalence", criterion_stats_oracles},
        {"5. metric oracle equivalence", criterion_metric_oracles},
        {"6. turn-5 trigger law", criterion_protocol_law},
        {"7. end-to-end determinism and checksums", criterion_determinism},
        {"8. dissociation expressiveness", criterion_dissociation},
        {"9. compression granularity ablation", criterion_granularity},
        {"10. bootstrap stability", criterion_bootstrap},
    };

    int failures = 0;
    for (const auto& [name, body] : criteria) {
        try {
            body();
            std::printf("PASS  %s\n", name.c_str());
        } catch (const std::exception& e) {
            ++failures;
            std::printf("FAIL  %s: %s\n", name.c_str(), e.what());
        }
    }
    if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
