#pragma once

#include "mvpress/index.hpp"
#include "mvpress/matrix.hpp"
#include "mvpress/scoring.hpp"
#include "mvpress/trec.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mvpress {

enum class StrengthNormalization {
    /// Per-position similarity sums divided by the total record count; the
    /// vector sums to the mean match similarity.
    Global,
    /// For each query position, per-position sums divided by that position's
    /// record count, then averaged over query positions that have records.
    PerQueryPosition,
};

/// Per-document-position matching strength over `doc_len` positions.
/// Records with doc_pos >= doc_len are a contract error. Empty input gives
/// a zero vector.
std::vector<double> matching_strength(std::span<const MatchRecord> matches, std::size_t doc_len,
                                      StrengthNormalization mode = StrengthNormalization::Global);

/// Records whose (query, doc) pair is judged relevant (grade >= 1).
std::vector<MatchRecord> filter_relevant(std::span<const MatchRecord> matches, const Qrels& qrels);

/// Distinct (doc_id, doc_pos) pairs among the matches over the total number
/// of vectors in the index.
double utilization_fraction(std::span<const MatchRecord> matches, const FlatIndex& index);

/// Entry (a, b) is the mean over documents of cos(c_a, c_b). Every document
/// must have the same row count.
SquareMatrix mean_pairwise_cosine(const Corpus& corpus);

struct EvennessReport {
    double cv = 0.0;
    double gini = 0.0;
    std::size_t sample_count = 0;
};

EvennessReport evenness(std::span<const double> samples);

// Match log: JSON lines {"qid":..,"qpos":..,"did":..,"dpos":..,"sim":..}.
std::string format_match_log(std::span<const MatchRecord> matches);
std::vector<MatchRecord> parse_match_log(std::string_view text);
std::vector<MatchRecord> read_match_log(const std::string& path);
void write_match_log(std::span<const MatchRecord> matches, const std::string& path);

} // namespace mvpress
