#include "ddft/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace ddft {

namespace {

std::string f3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::string f6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write report file: " + path.string());
    return out;
}

}  // namespace

ReportPaths report(const AnalysisBundle& bundle, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    ReportPaths paths;
    paths.profiles_csv = out_dir / "profiles.csv";
    paths.summary_txt = out_dir / "summary.txt";
    paths.curves_csv = out_dir / "curves.csv";

    {
        auto out = open_out(paths.profiles_csv);
        out << "model,ci_score,hoc,cri,far_prime,sas_prime,phenotype\n";
        for (const auto& p : bundle.profiles) {
            out << p.model_id << ',' << f3(p.ci_norm) << ',' << f3(p.hoc) << ',' << f3(p.cri)
                << ',' << (p.far_prime ? f3(*p.far_prime) : std::string{}) << ','
                << (p.sas_prime ? f3(*p.sas_prime) : std::string{}) << ','
                << to_string(p.phenotype) << '\n';
        }
    }

    {
        auto out = open_out(paths.curves_csv);
        out << "model,metric,level,value\n";
        for (const auto& [model, curve] : bundle.far_curves)
            for (const auto& [level, value] : curve)
                out << model << ",far," << f6(level) << ',' << f6(value) << '\n';
        for (const auto& [model, curve] : bundle.sas_curves)
            for (const auto& [level, value] : curve)
                out << model << ",sas," << f6(level) << ',' << f6(value) << '\n';
    }

    {
        auto out = open_out(paths.summary_txt);
        out << "Run summary\n";
        out << "===========\n";
        out << "mode: " << bundle.meta.mode << "  seed: " << bundle.meta.seed
            << "  config: " << bundle.meta.config_digest << "\n";
        out << "grid:";
        for (double level : bundle.meta.grid) out << ' ' << f3(level);
        out << "  theta: " << f3(bundle.meta.theta)
            << "  hoc: " << to_string(bundle.meta.hoc_semantics) << "\n\n";

        out << "Ranking (CI, " << to_string(bundle.meta.normalization) << " normalization)\n";
        out << "----------------------------------------\n";
        int place = 1;
        for (const auto& p : bundle.profiles) {
            out << place++ << ". " << p.model_id << "  ci=" << f3(p.ci_norm)
                << "  hoc=" << f3(p.hoc) << "  cri=" << f3(p.cri)
                << "  far'=" << (p.far_prime ? f3(*p.far_prime) : "absent")
                << "  sas'=" << (p.sas_prime ? f3(*p.sas_prime) : "absent") << "  "
                << to_string(p.phenotype);
            if (p.prime_fallback) out << "  [fallback primes]";
            out << "\n";
        }
        if (bundle.profiles.empty()) out << "(no models ranked)\n";
        out << "\n";

        out << "Sessions: " << bundle.accounting.sessions_completed << " completed / "
            << bundle.accounting.sessions_total << " scheduled, "
            << bundle.accounting.sessions_aborted << " aborted\n";
        out << "Turns: " << bundle.accounting.turn_records << " scored ("
            << bundle.accounting.transcripts_4turn << " four-turn, "
            << bundle.accounting.transcripts_5turn << " five-turn sessions; nominal capacity "
            << bundle.accounting.nominal_turn_capacity << ")\n";
        out << "Turn-5 trigger rate: " << f3(bundle.accounting.turn5_trigger_rate) << "\n\n";

        if (!bundle.turn_ci.empty()) {
            out << "Turn FAR vs CI (Spearman)\n";
            for (const auto& row : bundle.turn_ci)
                out << "  turn " << row.turn << ": rho=" << f3(row.rho) << "  p=" << f3(row.p)
                    << "  n=" << row.n << "\n";
            out << "\n";
        }

        out << "Danger zone (sas >= " << f3(bundle.meta.danger_zone.sas_min)
            << ", far <= " << f3(bundle.meta.danger_zone.far_max) << ")\n";
        for (const auto& row : bundle.danger)
            out << "  " << row.model_id << ": " << f3(row.rate) << "\n";
        out << "\n";

        if (bundle.reliability) {
            const auto& r = *bundle.reliability;
            out << "Jury reliability (" << r.verdicts << " verdicts)\n";
            out << "  " << r.method_note << "\n";
            out << "  FAR: mean variance " << f3(r.mean_far_variance) << ", kappa "
                << f3(r.far_kappa) << "\n";
            out << "  SAS: mean variance " << f3(r.mean_sas_variance) << ", kappa "
                << f3(r.sas_kappa) << "\n";
            for (const auto& band : r.bands) {
                out << "  band " << band.label << ": n=" << band.count;
                if (band.count > 0)
                    out << " far variance " << f3(band.mean_far_variance);
                out << "\n";
            }
            out << "\n";
        }

        if (bundle.anova_far) {
            out << "Domain ANOVA (FAR by concept): F=" << f3(bundle.anova_far->f)
                << " p=" << f3(bundle.anova_far->p) << " eta_sq=" << f3(bundle.anova_far->eta_sq)
                << " df=(" << bundle.anova_far->df_between << "," << bundle.anova_far->df_within
                << ")\n";
        }
        if (bundle.anova_sas) {
            out << "Domain ANOVA (SAS by concept): F=" << f3(bundle.anova_sas->f)
                << " p=" << f3(bundle.anova_sas->p) << " eta_sq=" << f3(bundle.anova_sas->eta_sq)
                << "\n";
        }
        if (bundle.anova_far || bundle.anova_sas) out << "\n";

        if (!bundle.granularity.empty()) {
            out << "Compression granularity (ranking agreement vs full grid)\n";
            for (const auto& row : bundle.granularity)
                out << "  " << row.label << ": tau=" << f3(row.tau) << "  n=" << row.n_models
                    << "\n";
            out << "\n";
        }

        if (bundle.formula_stability) {
            out << "CI formula stability (Kendall tau vs multiplicative): additive="
                << f3(bundle.formula_stability->additive_tau)
                << " max-based=" << f3(bundle.formula_stability->max_based_tau) << "\n\n";
        }

        out << "Notes\n";
        out << "-----\n";
        out << "- CI normalization mode: " << to_string(bundle.meta.normalization)
            << " (identity reports the raw quotient; minmax rescales across the roster).\n";
        out << "- Phenotype rule: Robust ci > " << f3(bundle.meta.phenotype.robust_min)
            << "; Competent " << f3(bundle.meta.phenotype.competent_min) << " < ci <= "
            << f3(bundle.meta.phenotype.robust_min) << "; Brittle otherwise.\n";
        out << "- Danger-zone thresholds are configurable; rates above reflect sas_min="
            << f3(bundle.meta.danger_zone.sas_min) << ", far_max="
            << f3(bundle.meta.danger_zone.far_max) << ".\n";
        out << "- HOC semantics: " << to_string(bundle.meta.hoc_semantics)
            << " (literal-max available for non-monotone curves).\n";
        for (const auto& warning : bundle.warnings) out << "- warning: " << warning << "\n";
    }

    return paths;
}

}  // namespace ddft
