#include "mvpress/index.hpp"

#include "mvpress/error.hpp"
#include "mvpress/io.hpp"
#include "mvpress/parallel.hpp"

#include <algorithm>
#include <filesystem>
#include <numeric>

namespace mvpress {

FlatIndex FlatIndex::build(Corpus corpus, std::optional<CompressionMeta> meta) {
    for (const auto& doc : corpus.docs()) {
        if (doc.embeddings.rows() == 0) {
            fail(ErrorKind::Build, "cannot index empty document '" + doc.doc_id + "'");
        }
        if (meta && doc.embeddings.rows() != meta->budget.m) {
            fail(ErrorKind::Build, "document '" + doc.doc_id + "' has " +
                                       std::to_string(doc.embeddings.rows()) +
                                       " vectors but the index budget is " + std::to_string(meta->budget.m));
        }
    }
    return FlatIndex(std::move(corpus), std::move(meta));
}

FlatIndex FlatIndex::load(const std::string& mvec_path) {
    auto corpus = read_mvec(mvec_path);
    std::optional<CompressionMeta> meta;
    const auto meta_path = meta_path_for(mvec_path);
    if (std::filesystem::exists(meta_path)) {
        meta = read_meta(meta_path);
    }
    return build(std::move(corpus), std::move(meta));
}

void FlatIndex::save(const std::string& mvec_path) const {
    write_mvec(corpus_, mvec_path);
    const auto meta_path = meta_path_for(mvec_path);
    if (meta_) {
        write_meta(*meta_, meta_path);
    } else {
        std::error_code ec;
        std::filesystem::remove(meta_path, ec);
    }
}

namespace {

constexpr std::size_t kBlock = 64;

} // namespace

SearchOutput search(const FlatIndex& index, const std::string& query_id, const EmbeddingMatrix& query,
                    const SearchOptions& options) {
    require(options.k >= 1, "search needs k >= 1");
    if (query.rows() == 0) {
        fail(ErrorKind::Query, "query '" + query_id + "' has no vectors");
    }
    if (query.dim() != index.dim()) {
        fail(ErrorKind::Query, "query '" + query_id + "' has dim " + std::to_string(query.dim()) +
                                   ", index dim is " + std::to_string(index.dim()));
    }
    const auto& docs = index.corpus().docs();
    const std::size_t n = docs.size();
    std::vector<double> scores(n);
    const std::size_t blocks = (n + kBlock - 1) / kBlock;
    parallel_for(blocks, options.threads, [&](std::size_t b) {
        const std::size_t first = b * kBlock;
        const std::size_t last = std::min(n, first + kBlock);
        std::vector<const EmbeddingMatrix*> block;
        block.reserve(last - first);
        for (std::size_t i = first; i < last; ++i) {
            block.push_back(&docs[i].embeddings);
        }
        const auto s = score_block(query, block);
        std::copy(s.begin(), s.end(), scores.begin() + static_cast<std::ptrdiff_t>(first));
    });

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t top = std::min(options.k, n);
    auto ranks_before = [&](std::size_t a, std::size_t b) {
        return scores[a] > scores[b] || (scores[a] == scores[b] && docs[a].doc_id < docs[b].doc_id);
    };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top), order.end(), ranks_before);
    order.resize(top);

    SearchOutput out;
    out.ranking.query_id = query_id;
    for (std::size_t r = 0; r < top; ++r) {
        out.ranking.results.push_back(RankedResult{docs[order[r]].doc_id, r + 1, scores[order[r]]});
    }

    if (options.capture_matches) {
        std::vector<std::size_t> targets = order;
        if (options.relevant != nullptr) {
            std::vector<char> returned(n, 0);
            for (auto i : order) returned[i] = 1;
            for (const auto& [doc_id, grade] : options.relevant->judged(query_id)) {
                const auto pos = index.corpus().find(doc_id);
                if (grade >= 1 && pos >= 0 && !returned[static_cast<std::size_t>(pos)]) {
                    returned[static_cast<std::size_t>(pos)] = 1;
                    targets.push_back(static_cast<std::size_t>(pos));
                }
            }
        }
        for (auto i : targets) {
            auto scored = maxsim_with_matches(query_id, query, docs[i].doc_id, docs[i].embeddings);
            out.matches.insert(out.matches.end(), scored.matches->begin(), scored.matches->end());
        }
    }
    return out;
}

BatchSearchOutput search_all(const FlatIndex& index, const Corpus& queries, const SearchOptions& options) {
    BatchSearchOutput out;
    for (const auto& q : queries.docs()) {
        auto one = search(index, q.doc_id, q.embeddings, options);
        out.run.queries.push_back(std::move(one.ranking));
        out.matches.insert(out.matches.end(), std::make_move_iterator(one.matches.begin()),
                           std::make_move_iterator(one.matches.end()));
    }
    return out;
}

} // namespace mvpress
