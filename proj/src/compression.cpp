#include "ddft/compression.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace ddft {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

}  // namespace

CompressionLevel::CompressionLevel(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0))
        throw ConfigError("compression level must lie in [0,1]");
}

bool CompressionLevel::on_standard_grid() const {
    for (double g : standard_grid())
        if (value_ == g) return true;
    return false;
}

const std::vector<double>& CompressionLevel::standard_grid() {
    static const std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0};
    return grid;
}

std::string ReferenceText::sentence(std::size_t index) const {
    const std::size_t begin = index == 0 ? 0 : sentence_boundaries[index - 1];
    return body.substr(begin, sentence_boundaries[index] - begin);
}

ReferenceText make_reference(std::string concept_id, std::string body) {
    ReferenceText ref{std::move(concept_id), std::move(body), {}};
    const std::string& s = ref.body;
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t end = std::string::npos;
        std::size_t j = i;
        while (j < s.size()) {
            if (is_terminal(s[j])) {
                std::size_t k = j + 1;
                while (k < s.size() && is_terminal(s[k])) ++k;
                if (k >= s.size()) {
                    end = k;
                    break;
                }
                if (is_space(s[k])) {
                    while (k < s.size() && is_space(s[k])) ++k;
                    end = k;
                    break;
                }
                j = k;  // e.g. "3.14": punctuation not followed by whitespace
                continue;
            }
            ++j;
        }
        if (end == std::string::npos) end = s.size();
        ref.sentence_boundaries.push_back(end);
        i = end;
    }
    return ref;
}

ReferenceText load_reference_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw IoError("cannot read reference text: " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return make_reference(file.stem().string(), buf.str());
}

std::vector<ReferenceText> load_reference_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw IoError("not a reference directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<ReferenceText> out;
    out.reserve(files.size());
    for (const auto& f : files) out.push_back(load_reference_file(f));
    return out;
}

std::size_t retained_sentence_count(std::size_t n_sentences, const CompressionLevel& level) {
    const double c = level.value();
    if (c >= 1.0) return 0;
    const auto k = static_cast<std::size_t>(
        std::ceil((1.0 - c) * static_cast<double>(n_sentences)));
    return std::min(k, n_sentences);
}

std::string compress_context(const ReferenceText& ref, const CompressionLevel& level,
                             CompressionStrategy strategy, std::uint64_t seed) {
    const double c = level.value();
    if (ref.body.empty()) {
        if (c < 1.0)
            throw InvalidReference("reference '" + ref.concept_id + "' has empty body");
        return {};
    }
    if (c == 0.0) return ref.body;

    const std::size_t n = ref.sentence_count();
    const std::size_t keep = retained_sentence_count(n, level);
    if (keep == 0) return {};
    if (keep == n) return ref.body;

    if (strategy == CompressionStrategy::Prefix)
        return ref.body.substr(0, ref.sentence_boundaries[keep - 1]);

    // Seeded sample: pick `keep` distinct sentences, emit in original order.
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < keep; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(keep);
    std::sort(idx.begin(), idx.end());
    std::string out;
    for (std::size_t i : idx) out += ref.sentence(i);
    return out;
}

CompressionStrategy compression_strategy_from_string(const std::string& name) {
    if (name == "prefix") return CompressionStrategy::Prefix;
    if (name == "seeded-sample") return CompressionStrategy::SeededSample;
    throw ConfigError("unknown compression strategy: " + name);
}

std::string to_string(CompressionStrategy strategy) {
    return strategy == CompressionStrategy::Prefix ? "prefix" : "seeded-sample";
}

}  // namespace ddft
