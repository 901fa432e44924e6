#pragma once

#include "mvpress/corpus.hpp"
#include "mvpress/matrix.hpp"

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace mvtest {

using Rng = std::mt19937_64;

inline float uniform(Rng& rng, float lo, float hi) {
    return std::uniform_real_distribution<float>(lo, hi)(rng);
}

inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline mvpress::EmbeddingMatrix random_matrix(Rng& rng, std::size_t rows, std::size_t dim, float lo = -1.0f,
                                              float hi = 1.0f) {
    std::vector<float> v(rows * dim);
    for (auto& x : v) x = uniform(rng, lo, hi);
    return mvpress::EmbeddingMatrix(rows, dim, std::move(v));
}

inline mvpress::Corpus random_corpus(Rng& rng, std::size_t docs, std::size_t min_rows, std::size_t max_rows,
                                     std::size_t dim, const std::string& prefix = "d") {
    mvpress::Corpus c(dim);
    for (std::size_t i = 0; i < docs; ++i) {
        c.add(prefix + std::to_string(i), random_matrix(rng, pick(rng, min_rows, max_rows), dim));
    }
    return c;
}

inline mvpress::AttentionSidecar random_attention(Rng& rng, const std::string& doc_id, std::uint32_t n,
                                                  std::uint32_t psi = 2, std::uint32_t heads = 2) {
    mvpress::AttentionSidecar a;
    a.doc_id = doc_id;
    a.psi = psi;
    a.heads = heads;
    a.n = n;
    a.weights.resize(std::size_t{psi} * heads * n);
    for (auto& w : a.weights) w = uniform(rng, 0.0f, 1.0f);
    return a;
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("mvpress-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

} // namespace mvtest
