#include "mvpress/scoring.hpp"

#include "mvpress/error.hpp"

#include <algorithm>
#include <limits>

namespace mvpress {

namespace {

void check_pair(const EmbeddingMatrix& query, const EmbeddingMatrix& doc) {
    require(query.rows() >= 1, "MaxSim needs a query with at least one row");
    require(doc.rows() >= 1, "MaxSim is undefined for an empty document");
    require(query.dim() == doc.dim(), "MaxSim dim mismatch: query " + std::to_string(query.dim()) +
                                          " vs doc " + std::to_string(doc.dim()));
}

constexpr std::size_t kTile = 4;

// Four independent dot chains per pass; each chain keeps the same
// ascending-dimension order as dot(), so results match it exactly.
double tiled_row_max(const float* q, const float* doc, std::size_t rows, std::size_t dim) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t j = 0;
    for (; j + kTile <= rows; j += kTile) {
        const float* c0 = doc + (j + 0) * dim;
        const float* c1 = doc + (j + 1) * dim;
        const float* c2 = doc + (j + 2) * dim;
        const float* c3 = doc + (j + 3) * dim;
        double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            const double qd = q[d];
            a0 += qd * static_cast<double>(c0[d]);
            a1 += qd * static_cast<double>(c1[d]);
            a2 += qd * static_cast<double>(c2[d]);
            a3 += qd * static_cast<double>(c3[d]);
        }
        best = std::max({best, a0, a1, a2, a3});
    }
    for (; j < rows; ++j) {
        const float* c = doc + j * dim;
        double a = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            a += static_cast<double>(q[d]) * static_cast<double>(c[d]);
        }
        best = std::max(best, a);
    }
    return best;
}

double tiled_maxsim(const EmbeddingMatrix& query, const EmbeddingMatrix& doc) {
    const float* qd = query.values().data();
    const float* dd = doc.values().data();
    const std::size_t dim = query.dim();
    double score = 0.0;
    for (std::size_t i = 0; i < query.rows(); ++i) {
        score += tiled_row_max(qd + i * dim, dd, doc.rows(), dim);
    }
    return score;
}

} // namespace

double maxsim_score(const EmbeddingMatrix& query, const EmbeddingMatrix& doc) {
    check_pair(query, doc);
    double score = 0.0;
    for (std::size_t i = 0; i < query.rows(); ++i) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < doc.rows(); ++j) {
            best = std::max(best, dot(query.row(i), doc.row(j)));
        }
        score += best;
    }
    return score;
}

ScoredDoc maxsim_with_matches(const std::string& query_id, const EmbeddingMatrix& query,
                              const std::string& doc_id, const EmbeddingMatrix& doc) {
    check_pair(query, doc);
    ScoredDoc out{doc_id, 0.0, std::vector<MatchRecord>{}};
    out.matches->reserve(query.rows());
    for (std::size_t i = 0; i < query.rows(); ++i) {
        std::size_t arg = 0;
        double best = dot(query.row(i), doc.row(0));
        for (std::size_t j = 1; j < doc.rows(); ++j) {
            const double s = dot(query.row(i), doc.row(j));
            if (s > best) {
                best = s;
                arg = j;
            }
        }
        out.score += best;
        out.matches->push_back(MatchRecord{query_id, i, doc_id, arg, best});
    }
    return out;
}

std::vector<double> score_block(const EmbeddingMatrix& query, std::span<const EmbeddingMatrix* const> docs) {
    for (const auto* doc : docs) {
        check_pair(query, *doc);
    }
    std::vector<double> scores;
    scores.reserve(docs.size());
    for (const auto* doc : docs) {
        scores.push_back(tiled_maxsim(query, *doc));
    }
    return scores;
}

std::vector<double> score_block(const EmbeddingMatrix& query, std::span<const EmbeddingMatrix> docs) {
    std::vector<const EmbeddingMatrix*> ptrs;
    ptrs.reserve(docs.size());
    for (const auto& d : docs) {
        ptrs.push_back(&d);
    }
    return score_block(query, ptrs);
}

} // namespace mvpress
