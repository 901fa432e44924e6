#include "mvpress/agc.hpp"

#include "mvpress/error.hpp"
#include "mvpress/hash.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace mvpress {

SaliencyVector saliency(const AttentionSidecar& att) {
    att.validate();
    SaliencyVector out{std::vector<double>(att.n, 0.0)};
    for (std::size_t i = 0; i < att.psi; ++i) {
        for (std::size_t h = 0; h < att.heads; ++h) {
            for (std::size_t j = 0; j < att.n; ++j) {
                out.alpha[j] += att.at(i, h, j);
            }
        }
    }
    const double rows = static_cast<double>(att.psi) * static_cast<double>(att.heads);
    for (auto& a : out.alpha) {
        a /= rows;
    }
    return out;
}

namespace {

CentroidSelection gather(const EmbeddingMatrix& z, std::vector<std::size_t> indices) {
    std::sort(indices.begin(), indices.end());
    std::vector<float> rows;
    rows.reserve(indices.size() * z.dim());
    for (auto i : indices) {
        rows.insert(rows.end(), z.row(i).begin(), z.row(i).end());
    }
    EmbeddingMatrix centroids(indices.size(), z.dim(), std::move(rows));
    return {std::move(indices), std::move(centroids)};
}

} // namespace

CentroidSelection select_centroids(const SaliencyVector& alpha, const EmbeddingMatrix& z, std::size_t m) {
    require(alpha.size() == z.rows(), "saliency length " + std::to_string(alpha.size()) +
                                          " != token count " + std::to_string(z.rows()));
    require(m >= 1, "budget m must be >= 1");
    require(z.rows() >= m, "cannot select " + std::to_string(m) + " centroids from " +
                               std::to_string(z.rows()) + " tokens");
    std::vector<std::size_t> order(z.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m), order.end(),
                      [&](std::size_t a, std::size_t b) {
                          return alpha.alpha[a] > alpha.alpha[b] ||
                                 (alpha.alpha[a] == alpha.alpha[b] && a < b);
                      });
    order.resize(m);
    return gather(z, std::move(order));
}

CentroidSelection select_random_centroids(const EmbeddingMatrix& z, std::size_t m, std::uint64_t seed) {
    require(m >= 1, "budget m must be >= 1");
    require(z.rows() >= m, "cannot select " + std::to_string(m) + " centroids from " +
                               std::to_string(z.rows()) + " tokens");
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> pool(z.rows());
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < m; ++i) {
        const auto j = i + static_cast<std::size_t>(uniform_below(rng, pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(m);
    return gather(z, std::move(pool));
}

ClusterPartition assign_clusters(const EmbeddingMatrix& z, std::span<const std::size_t> indices) {
    require(!indices.empty(), "assign_clusters needs at least one centroid");
    const std::size_t n = z.rows();
    std::vector<std::ptrdiff_t> own(n, -1);
    for (std::size_t k = 0; k < indices.size(); ++k) {
        require(indices[k] < n, "centroid index out of range");
        require(own[indices[k]] < 0, "centroid index repeated");
        own[indices[k]] = static_cast<std::ptrdiff_t>(k);
    }

    ClusterPartition out;
    out.k = indices.size();
    out.sizes.assign(out.k, 0);
    out.assignments.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t label;
        if (own[j] >= 0) {
            label = static_cast<std::size_t>(own[j]);
        } else {
            label = 0;
            double best = cosine(z.row(j), z.row(indices[0]));
            for (std::size_t k = 1; k < indices.size(); ++k) {
                const double c = cosine(z.row(j), z.row(indices[k]));
                if (c > best) {
                    best = c;
                    label = k;
                }
            }
        }
        out.assignments[j] = label;
        ++out.sizes[label];
    }
    return out;
}

EmbeddingMatrix aggregate(const EmbeddingMatrix& z, const SaliencyVector& alpha,
                          const ClusterPartition& partition, Aggregation mode) {
    const std::size_t h = z.dim();
    require(partition.assignments.size() == z.rows(), "partition does not cover every token");
    require(alpha.size() == z.rows(), "saliency length does not match token count");

    std::vector<double> weighted(partition.k * h, 0.0);
    std::vector<double> plain(partition.k * h, 0.0);
    std::vector<double> mass(partition.k, 0.0);
    for (std::size_t j = 0; j < z.rows(); ++j) {
        const auto c = partition.assignments[j];
        require(c < partition.k, "cluster label out of range");
        const double a = alpha.alpha[j];
        mass[c] += a;
        for (std::size_t d = 0; d < h; ++d) {
            const double v = z.row(j)[d];
            weighted[c * h + d] += a * v;
            plain[c * h + d] += v;
        }
    }

    std::vector<float> out(partition.k * h);
    for (std::size_t c = 0; c < partition.k; ++c) {
        require(partition.sizes[c] > 0, "empty cluster in partition");
        const bool use_weights = mode == Aggregation::Weighted && mass[c] > 0.0;
        for (std::size_t d = 0; d < h; ++d) {
            const double v = use_weights ? weighted[c * h + d] / mass[c]
                                         : plain[c * h + d] / static_cast<double>(partition.sizes[c]);
            out[c * h + d] = static_cast<float>(v);
        }
    }
    return EmbeddingMatrix(partition.k, h, std::move(out));
}

AgcResult agc_run(const EmbeddingMatrix& z, const AttentionSidecar& att, const AgcConfig& cfg) {
    require(cfg.m >= 1, "budget m must be >= 1");
    require(z.rows() >= 1, "AGC: empty document");
    if (att.n != z.rows()) {
        fail(ErrorKind::Consistency, "attention for '" + att.doc_id + "' covers " + std::to_string(att.n) +
                                         " tokens, document has " + std::to_string(z.rows()));
    }
    require(z.rows() >= cfg.m, "AGC: document has " + std::to_string(z.rows()) +
                                   " tokens, fewer than budget " + std::to_string(cfg.m));

    AgcResult result;
    result.alpha = saliency(att);
    auto selection = cfg.variant.selection == Selection::Attention
                         ? select_centroids(result.alpha, z, cfg.m)
                         : select_random_centroids(z, cfg.m, derive_seed(cfg.variant.seed, att.doc_id));
    result.centroid_indices = selection.indices;
    if (!cfg.variant.clustering) {
        result.compressed = std::move(selection.centroids);
        return result;
    }
    result.partition = assign_clusters(z, selection.indices);
    result.compressed = aggregate(z, result.alpha, *result.partition, cfg.variant.aggregation);
    return result;
}

} // namespace mvpress
