#pragma once

#include "mvpress/trec.hpp"

#include <cstddef>
#include <span>

namespace mvpress {

// Relevance means grade >= 1 throughout.

/// Mean over queries with at least one relevant doc of
/// |relevant in top k| / |relevant|. Throws an evaluation error when no
/// query has a relevant doc.
double recall_at_k(const RunList& run, const Qrels& qrels, std::size_t k);

/// Graded nDCG with a log2(rank + 1) discount, averaged over every query
/// that appears in the run or the qrels. A query with IDCG = 0 scores 0.
double ndcg_at_k(const RunList& run, const Qrels& qrels, std::size_t k);

/// Mean reciprocal rank of the first relevant doc (0 if none retrieved),
/// over the same query set as ndcg_at_k.
double mrr(const RunList& run, const Qrels& qrels);

/// 100 * score / base, unrounded. base must be > 0.
double percent_of_baseline_raw(double score, double base);
/// percent_of_baseline_raw truncated toward zero at one decimal.
double percent_of_baseline(double score, double base);

/// 1 - m / avg_tokens rounded to 4 decimals. avg_tokens must be > 0.
double compression_ratio(double m, double avg_tokens);

/// Coefficient of variation in percent, population standard deviation.
double cv(std::span<const double> samples);

/// Gini coefficient 2*sum(i*x_i) / (n*sum(x)) - (n+1)/n with x sorted
/// ascending and i from 1. All-zero samples give 0.
double gini(std::span<const double> samples);

double pearson(std::span<const double> x, std::span<const double> y);

struct PearsonTest {
    double r = 0.0;
    double p_value = 0.0; // two-sided, t distribution with n - 2 df
    std::size_t n = 0;
};

/// Needs n >= 3.
PearsonTest pearson_test(std::span<const double> x, std::span<const double> y);

} // namespace mvpress
