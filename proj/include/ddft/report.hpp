#pragma once

#include <filesystem>

#include "ddft/harness.hpp"

namespace ddft {

struct ReportPaths {
    std::filesystem::path profiles_csv;
    std::filesystem::path summary_txt;
    std::filesystem::path curves_csv;
};

// Writes the per-model profile table (CSV), a human-readable summary with
// phenotype labels and configuration notes, and per-level FAR/SAS curve data
// suitable for plotting. An empty ranking yields header-only CSVs.
ReportPaths report(const AnalysisBundle& bundle, const std::filesystem::path& out_dir);

}  // namespace ddft
