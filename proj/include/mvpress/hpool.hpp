#pragma once

#include "mvpress/corpus.hpp"
#include "mvpress/matrix.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace mvpress {

/// Hard partition of n tokens into k nonempty clusters. Labels are
/// 0..k-1 ordered by each cluster's smallest member index.
struct ClusterPartition {
    std::vector<std::size_t> assignments;
    std::size_t k = 0;
    std::vector<std::size_t> sizes;

    friend bool operator==(const ClusterPartition&, const ClusterPartition&) = default;
};

/// Relabels arbitrary cluster ids into the canonical min-member order and
/// fills sizes.
ClusterPartition canonical_partition(std::span<const std::size_t> raw_labels);

/// r_ij = 1 - cos(x_i, x_j). Zero-norm rows have cosine 0, so distance 1.
SquareMatrix cosine_distance_matrix(const EmbeddingMatrix& x);

/// Increase in within-cluster squared error from merging clusters a and b:
/// |A||B| / (|A| + |B|) * ||mu_a - mu_b||^2.
double ward_delta(std::size_t size_a, std::size_t size_b, std::span<const double> mu_a,
                  std::span<const double> mu_b);

/// Greedy Ward agglomeration of the rows of x down to k clusters. Each step
/// merges the pair with the smallest delta; ties go to the pair with the
/// smaller (min member of first, min member of second).
ClusterPartition ward_partition(const EmbeddingMatrix& x, std::size_t k);

/// Brute-force reference for ward_partition: recomputes every pairwise
/// delta from member lists at every step. O(n^3 h).
ClusterPartition oracle_agglomerative(const EmbeddingMatrix& x, std::size_t k);

/// Unweighted cluster means, one row per label.
EmbeddingMatrix cluster_means(const EmbeddingMatrix& x, const ClusterPartition& partition);

/// Hierarchical pooling to exactly budget.m rows: the protected rows are set
/// aside, the rest are Ward-clustered to m - m' groups and mean-pooled, and
/// the protected rows are appended in the given order.
EmbeddingMatrix h_pool(const EmbeddingMatrix& x, const Budget& budget,
                       std::span<const std::size_t> protected_rows = {});

} // namespace mvpress
