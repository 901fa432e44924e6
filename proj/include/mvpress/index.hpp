#pragma once

#include "mvpress/corpus.hpp"
#include "mvpress/meta.hpp"
#include "mvpress/scoring.hpp"
#include "mvpress/trec.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace mvpress {

/// Exhaustive late-interaction index. The index is its corpus; persistence
/// is the MVEC file plus an optional `<name>.meta.json`.
class FlatIndex {
public:
    /// Rejects empty documents, and documents whose row count differs from
    /// meta's budget when meta is given.
    static FlatIndex build(Corpus corpus, std::optional<CompressionMeta> meta = std::nullopt);

    static FlatIndex load(const std::string& mvec_path);
    void save(const std::string& mvec_path) const;

    const Corpus& corpus() const noexcept { return corpus_; }
    const std::optional<CompressionMeta>& meta() const noexcept { return meta_; }
    std::size_t dim() const noexcept { return corpus_.dim(); }
    std::size_t size() const noexcept { return corpus_.size(); }
    std::size_t total_vectors() const noexcept { return corpus_.total_tokens(); }

private:
    FlatIndex(Corpus corpus, std::optional<CompressionMeta> meta)
        : corpus_(std::move(corpus)), meta_(std::move(meta)) {}

    Corpus corpus_;
    std::optional<CompressionMeta> meta_;
};

struct SearchOptions {
    std::size_t k = 10;
    bool capture_matches = false;
    /// With capture on, also emit matches for these judged-relevant docs
    /// (grade >= 1) even when they fall outside the top k.
    const Qrels* relevant = nullptr;
    std::size_t threads = 1;
};

struct SearchOutput {
    QueryRanking ranking;
    std::vector<MatchRecord> matches;
};

/// Top-k documents by MaxSim. Documents are scored in parallel blocks and
/// merged in corpus order; ties rank by ascending doc id.
SearchOutput search(const FlatIndex& index, const std::string& query_id, const EmbeddingMatrix& query,
                    const SearchOptions& options);

struct BatchSearchOutput {
    RunList run;
    std::vector<MatchRecord> matches;
};

BatchSearchOutput search_all(const FlatIndex& index, const Corpus& queries, const SearchOptions& options);

} // namespace mvpress
