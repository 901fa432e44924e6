#include "mvpress/hpool.hpp"

#include "mvpress/error.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace mvpress {

ClusterPartition canonical_partition(std::span<const std::size_t> raw_labels) {
    ClusterPartition out;
    out.assignments.resize(raw_labels.size());
    std::unordered_map<std::size_t, std::size_t> remap;
    for (std::size_t i = 0; i < raw_labels.size(); ++i) {
        auto [it, inserted] = remap.emplace(raw_labels[i], remap.size());
        if (inserted) {
            out.sizes.push_back(0);
        }
        out.assignments[i] = it->second;
        ++out.sizes[it->second];
    }
    out.k = remap.size();
    return out;
}

SquareMatrix cosine_distance_matrix(const EmbeddingMatrix& x) {
    const std::size_t n = x.rows();
    SquareMatrix r(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double d = 1.0 - cosine(x.row(i), x.row(j));
            r.at(i, j) = d;
            r.at(j, i) = d;
        }
    }
    return r;
}

double ward_delta(std::size_t size_a, std::size_t size_b, std::span<const double> mu_a,
                  std::span<const double> mu_b) {
    const double na = static_cast<double>(size_a);
    const double nb = static_cast<double>(size_b);
    double dist2 = 0.0;
    for (std::size_t d = 0; d < mu_a.size(); ++d) {
        const double diff = mu_a[d] - mu_b[d];
        dist2 += diff * diff;
    }
    return (na * nb) / (na + nb) * dist2;
}

namespace {

struct Candidate {
    double delta = std::numeric_limits<double>::infinity();
    std::size_t partner = 0;
    bool valid = false;
};

// (delta, partner) lexicographic order.
bool better(double delta, std::size_t partner, const Candidate& current) {
    return !current.valid || delta < current.delta ||
           (delta == current.delta && partner < current.partner);
}

} // namespace

ClusterPartition ward_partition(const EmbeddingMatrix& x, std::size_t k) {
    const std::size_t n = x.rows();
    const std::size_t h = x.dim();
    require(k >= 1, "cluster count must be >= 1");
    require(n >= k, "cannot form " + std::to_string(k) + " clusters from " + std::to_string(n) +
                        " tokens");

    // Slot s holds the cluster whose smallest member is s.
    std::vector<double> sums(n * h);
    std::vector<double> centroids(n * h);
    std::vector<std::size_t> sizes(n, 1);
    std::vector<char> active(n, 1);
    std::vector<std::size_t> owner(n);
    std::iota(owner.begin(), owner.end(), std::size_t{0});
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t d = 0; d < h; ++d) {
            sums[i * h + d] = x.row(i)[d];
            centroids[i * h + d] = sums[i * h + d];
        }
    }
    auto centroid = [&](std::size_t s) { return std::span<const double>(centroids.data() + s * h, h); };

    SquareMatrix delta(n);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            delta.at(a, b) = ward_delta(1, 1, centroid(a), centroid(b));
        }
    }

    std::vector<Candidate> best(n);
    auto rescan = [&](std::size_t a) {
        Candidate c;
        for (std::size_t b = a + 1; b < n; ++b) {
            if (active[b] && better(delta.at(a, b), b, c)) {
                c = {delta.at(a, b), b, true};
            }
        }
        best[a] = c;
    };
    for (std::size_t a = 0; a < n; ++a) {
        rescan(a);
    }

    for (std::size_t clusters = n; clusters > k; --clusters) {
        std::size_t a = n;
        for (std::size_t s = 0; s < n; ++s) {
            if (!active[s] || !best[s].valid) {
                continue;
            }
            if (a == n || best[s].delta < best[a].delta) {
                a = s;
            }
        }
        const std::size_t b = best[a].partner;

        for (std::size_t d = 0; d < h; ++d) {
            sums[a * h + d] += sums[b * h + d];
        }
        sizes[a] += sizes[b];
        for (std::size_t d = 0; d < h; ++d) {
            centroids[a * h + d] = sums[a * h + d] / static_cast<double>(sizes[a]);
        }
        active[b] = 0;
        for (auto& o : owner) {
            if (o == b) {
                o = a;
            }
        }

        for (std::size_t c = 0; c < n; ++c) {
            if (!active[c] || c == a) {
                continue;
            }
            const std::size_t lo = std::min(a, c);
            const std::size_t hi = std::max(a, c);
            delta.at(lo, hi) = ward_delta(sizes[lo], sizes[hi], centroid(lo), centroid(hi));
        }
        for (std::size_t c = 0; c < a; ++c) {
            if (!active[c]) {
                continue;
            }
            if (best[c].partner == a || best[c].partner == b) {
                rescan(c);
            } else if (better(delta.at(c, a), a, best[c])) {
                best[c] = {delta.at(c, a), a, true};
            }
        }
        for (std::size_t c = a + 1; c < b; ++c) {
            if (active[c] && best[c].partner == b) {
                rescan(c);
            }
        }
        rescan(a);
    }
    return canonical_partition(owner);
}

ClusterPartition oracle_agglomerative(const EmbeddingMatrix& x, std::size_t k) {
    const std::size_t n = x.rows();
    const std::size_t h = x.dim();
    require(k >= 1 && n >= k, "oracle needs 1 <= k <= n");

    std::vector<std::vector<std::size_t>> clusters(n);
    for (std::size_t i = 0; i < n; ++i) {
        clusters[i] = {i};
    }
    auto mean_of = [&](const std::vector<std::size_t>& members) {
        std::vector<double> mu(h, 0.0);
        for (auto i : members) {
            for (std::size_t d = 0; d < h; ++d) {
                mu[d] += x.row(i)[d];
            }
        }
        for (auto& v : mu) {
            v /= static_cast<double>(members.size());
        }
        return mu;
    };

    while (clusters.size() > k) {
        // clusters stay sorted by their first (= smallest) member
        std::size_t best_a = 0, best_b = 1;
        double best_delta = std::numeric_limits<double>::infinity();
        bool found = false;
        for (std::size_t a = 0; a < clusters.size(); ++a) {
            for (std::size_t b = a + 1; b < clusters.size(); ++b) {
                const auto mu_a = mean_of(clusters[a]);
                const auto mu_b = mean_of(clusters[b]);
                const double dlt = ward_delta(clusters[a].size(), clusters[b].size(), mu_a, mu_b);
                const auto key_a = clusters[a].front();
                const auto key_b = clusters[b].front();
                if (!found || dlt < best_delta ||
                    (dlt == best_delta &&
                     (key_a < clusters[best_a].front() ||
                      (key_a == clusters[best_a].front() && key_b < clusters[best_b].front())))) {
                    best_delta = dlt;
                    best_a = a;
                    best_b = b;
                    found = true;
                }
            }
        }
        auto& target = clusters[best_a];
        target.insert(target.end(), clusters[best_b].begin(), clusters[best_b].end());
        std::sort(target.begin(), target.end());
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(best_b));
    }

    std::vector<std::size_t> labels(n);
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        for (auto i : clusters[c]) {
            labels[i] = c;
        }
    }
    return canonical_partition(labels);
}

EmbeddingMatrix cluster_means(const EmbeddingMatrix& x, const ClusterPartition& partition) {
    const std::size_t h = x.dim();
    require(partition.assignments.size() == x.rows(), "partition does not cover every token");
    std::vector<double> sums(partition.k * h, 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto label = partition.assignments[i];
        for (std::size_t d = 0; d < h; ++d) {
            sums[label * h + d] += x.row(i)[d];
        }
    }
    std::vector<float> out(partition.k * h);
    for (std::size_t c = 0; c < partition.k; ++c) {
        require(partition.sizes[c] > 0, "empty cluster in partition");
        for (std::size_t d = 0; d < h; ++d) {
            out[c * h + d] = static_cast<float>(sums[c * h + d] / static_cast<double>(partition.sizes[c]));
        }
    }
    return EmbeddingMatrix(partition.k, h, std::move(out));
}

EmbeddingMatrix h_pool(const EmbeddingMatrix& x, const Budget& budget,
                       std::span<const std::size_t> protected_rows) {
    budget.validate();
    const std::size_t n = x.rows();
    require(n >= 1, "h_pool: empty document");
    require(n >= budget.m, "h_pool: document has " + std::to_string(n) + " tokens, fewer than budget " +
                               std::to_string(budget.m));
    require(protected_rows.size() == budget.protected_count,
            "h_pool: expected " + std::to_string(budget.protected_count) + " protected indices, got " +
                std::to_string(protected_rows.size()));

    std::vector<char> is_protected(n, 0);
    for (auto p : protected_rows) {
        require(p < n, "h_pool: protected index " + std::to_string(p) + " out of range");
        require(!is_protected[p], "h_pool: protected index " + std::to_string(p) + " repeated");
        is_protected[p] = 1;
    }

    const std::size_t h = x.dim();
    std::vector<float> rest;
    rest.reserve((n - protected_rows.size()) * h);
    for (std::size_t i = 0; i < n; ++i) {
        if (!is_protected[i]) {
            rest.insert(rest.end(), x.row(i).begin(), x.row(i).end());
        }
    }
    const EmbeddingMatrix pool(n - protected_rows.size(), h, std::move(rest));
    const auto partition = ward_partition(pool, budget.m - budget.protected_count);
    const auto pooled = cluster_means(pool, partition);

    std::vector<float> out(pooled.values().begin(), pooled.values().end());
    for (auto p : protected_rows) {
        out.insert(out.end(), x.row(p).begin(), x.row(p).end());
    }
    return EmbeddingMatrix(budget.m, h, std::move(out));
}

} // namespace mvpress
