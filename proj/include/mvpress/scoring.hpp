#pragma once

#include "mvpress/matrix.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mvpress {

/// One realized MaxSim argmax: query token `query_pos` matched document
/// token `doc_pos` with dot product `similarity`.
struct MatchRecord {
    std::string query_id;
    std::size_t query_pos = 0;
    std::string doc_id;
    std::size_t doc_pos = 0;
    double similarity = 0.0;

    friend bool operator==(const MatchRecord&, const MatchRecord&) = default;
};

struct ScoredDoc {
    std::string doc_id;
    double score = 0.0;
    std::optional<std::vector<MatchRecord>> matches;
};

/// Sum over query rows of the maximum dot product against any doc row.
/// Dots accumulate in double over ascending dimension; the outer sum runs
/// over ascending query position.
double maxsim_score(const EmbeddingMatrix& query, const EmbeddingMatrix& doc);

/// maxsim_score plus one MatchRecord per query row; argmax ties go to the
/// lowest document position.
ScoredDoc maxsim_with_matches(const std::string& query_id, const EmbeddingMatrix& query,
                              const std::string& doc_id, const EmbeddingMatrix& doc);

/// Batched kernel. Bit-identical to calling maxsim_score per doc. A dim
/// mismatch or empty doc anywhere rejects the whole block.
std::vector<double> score_block(const EmbeddingMatrix& query, std::span<const EmbeddingMatrix* const> docs);
std::vector<double> score_block(const EmbeddingMatrix& query, std::span<const EmbeddingMatrix> docs);

} // namespace mvpress
