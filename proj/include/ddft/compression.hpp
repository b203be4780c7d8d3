#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ddft/errors.hpp"

namespace ddft {

// Fraction of reference context withheld: 0.0 = full text, 1.0 = none.
// Any value in [0,1] is accepted; the standard protocol uses the 5-point grid.
class CompressionLevel {
public:
    explicit CompressionLevel(double value);

    double value() const { return value_; }
    bool on_standard_grid() const;

    static const std::vector<double>& standard_grid();

private:
    double value_;
};

// A concept's reference text, segmented into sentences. sentence_boundaries
// holds the end offset of each sentence; the segments partition body exactly
// (each sentence carries its trailing whitespace).
struct ReferenceText {
    std::string concept_id;
    std::string body;
    std::vector<std::size_t> sentence_boundaries;

    std::size_t sentence_count() const { return sentence_boundaries.size(); }
    std::string sentence(std::size_t index) const;
};

enum class CompressionStrategy { Prefix, SeededSample };

// Segment a body into sentences: a sentence ends at a run of terminal
// punctuation (. ! ?) followed by whitespace or end of text. Abbreviations
// are not special-cased. A trailing fragment without terminal punctuation
// still counts as a sentence.
ReferenceText make_reference(std::string concept_id, std::string body);

ReferenceText load_reference_file(const std::filesystem::path& file);

// Loads every *.txt in dir as a reference text keyed by file stem, in
// filename order.
std::vector<ReferenceText> load_reference_dir(const std::filesystem::path& dir);

// ceil((1 - c) * n), clamped to n. Ceiling keeps c just below 1.0 from
// silently yielding empty context.
std::size_t retained_sentence_count(std::size_t n_sentences, const CompressionLevel& level);

// Degrade ref to the target level. Prefix keeps the first retained
// sentences; SeededSample keeps a seeded uniform sample in original order.
// c = 0 returns the body verbatim, c = 1 returns empty text. Pure function
// of (ref, level, strategy, seed).
std::string compress_context(const ReferenceText& ref, const CompressionLevel& level,
                             CompressionStrategy strategy = CompressionStrategy::Prefix,
                             std::uint64_t seed = 0);

CompressionStrategy compression_strategy_from_string(const std::string& name);
std::string to_string(CompressionStrategy strategy);

}  // namespace ddft
