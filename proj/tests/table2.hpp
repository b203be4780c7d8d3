// Published per-model component values and composite scores used as
// arithmetic consistency targets (values verified against the source table).
#pragma once

#include <array>

namespace table2 {

struct Row {
    const char* model;
    double ci;
    double hoc;
    double cri;
    double far_prime;
    double sas_prime;
    const char* phenotype;
};

// Ordered by published rank, best first.
inline constexpr std::array<Row, 9> kRows = {{
    {"o4-mini", 0.914, 1.000, 0.872, 0.831, 0.877, "Robust"},
    {"grok-4-fast-non-reasoning", 0.911, 0.969, 0.862, 0.787, 0.870, "Robust"},
    {"mistral-medium-2505", 0.752, 0.938, 0.828, 0.859, 0.828, "Robust"},
    {"gpt-oss-120b", 0.659, 0.812, 0.844, 0.881, 0.840, "Competent"},
    {"o3", 0.628, 1.000, 0.769, 0.981, 0.757, "Competent"},
    {"phi-4", 0.545, 0.938, 0.671, 0.820, 0.667, "Brittle"},
    {"gpt-5", 0.534, 1.000, 0.690, 0.982, 0.690, "Brittle"},
    {"Llama-4-Maverick-17B-FP8", 0.510, 0.969, 0.647, 0.869, 0.641, "Brittle"},
    {"claude-haiku-4-5", 0.468, 1.000, 0.612, 0.922, 0.615, "Brittle"},
}};

}  // namespace table2
