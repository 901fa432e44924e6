#pragma once

#include "mvpress/corpus.hpp"
#include "mvpress/hpool.hpp"
#include "mvpress/matrix.hpp"
#include "mvpress/meta.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace mvpress {

/// Per-token saliency: attention averaged over universal query tokens and
/// heads. Not renormalized.
struct SaliencyVector {
    std::vector<double> alpha;

    std::size_t size() const noexcept { return alpha.size(); }
};

SaliencyVector saliency(const AttentionSidecar& att);

struct CentroidSelection {
    std::vector<std::size_t> indices; // ascending token order
    EmbeddingMatrix centroids;        // z rows at `indices`
};

/// Top-m tokens by saliency (ties to the lower index), returned in
/// ascending token order.
CentroidSelection select_centroids(const SaliencyVector& alpha, const EmbeddingMatrix& z, std::size_t m);

/// m distinct tokens drawn uniformly without replacement.
CentroidSelection select_random_centroids(const EmbeddingMatrix& z, std::size_t m, std::uint64_t seed);

/// Hard assignment of every token to the centroid with the highest cosine.
/// Ties go to the lower centroid; a centroid token always joins its own
/// cluster. Label k is the cluster of indices[k].
ClusterPartition assign_clusters(const EmbeddingMatrix& z, std::span<const std::size_t> indices);

/// One row per cluster label. Weighted mode averages with saliency weights
/// and falls back to the plain mean for a cluster with zero saliency mass.
EmbeddingMatrix aggregate(const EmbeddingMatrix& z, const SaliencyVector& alpha,
                          const ClusterPartition& partition, Aggregation mode);

struct AgcConfig {
    std::size_t m = 1;
    AgcVariant variant;
};

struct AgcResult {
    SaliencyVector alpha;
    std::vector<std::size_t> centroid_indices;
    std::optional<ClusterPartition> partition; // empty when clustering is off
    EmbeddingMatrix compressed;
};

/// Full pipeline for one document. Random selection draws from a stream
/// seeded by (variant.seed, att.doc_id).
AgcResult agc_run(const EmbeddingMatrix& z, const AttentionSidecar& att, const AgcConfig& cfg);

inline EmbeddingMatrix agc_compress(const EmbeddingMatrix& z, const AttentionSidecar& att, const AgcConfig& cfg) {
    return agc_run(z, att, cfg).compressed;
}

} // namespace mvpress
