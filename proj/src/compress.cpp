#include "mvpress/compress.hpp"

#include "mvpress/error.hpp"
#include "mvpress/hpool.hpp"
#include "mvpress/io.hpp"
#include "mvpress/metrics.hpp"
#include "mvpress/parallel.hpp"

#include <numeric>
#include <optional>
#include <unordered_map>

namespace mvpress {

namespace {

EmbeddingMatrix compress_one(const DocumentRecord& doc, const CompressOptions& options,
                             const AttentionSidecar* att, const ResizeWeights* weights) {
    const auto& z = doc.embeddings;
    if (z.rows() == 0) {
        fail(ErrorKind::Contract, "empty document");
    }
    if (options.method == Method::SeqResize) {
        return seq_resize(z, *weights);
    }
    if (z.rows() < options.budget) {
        if (!options.pad_short) {
            fail(ErrorKind::Contract, "document has " + std::to_string(z.rows()) +
                                          " tokens, fewer than budget " + std::to_string(options.budget));
        }
        return pad_trunc(z, options.budget);
    }
    switch (options.method) {
    case Method::MemTok:
        return mem_tok_extract(z, MemTokLayout{options.budget, MemoryPlacement::Suffix});
    case Method::HPool: {
        std::vector<std::size_t> protected_rows(options.protected_count);
        std::iota(protected_rows.begin(), protected_rows.end(), std::size_t{0});
        return h_pool(z, Budget{options.budget, options.protected_count}, protected_rows);
    }
    case Method::Agc:
        if (att == nullptr) {
            fail(ErrorKind::Consistency, "no attention sidecar for this document");
        }
        return agc_compress(z, *att, AgcConfig{options.budget, options.agc});
    case Method::SeqResize:
        break;
    }
    fail(ErrorKind::Contract, "unhandled method");
}

} // namespace

CompressOutcome compress_corpus(const Corpus& source, const CompressOptions& options,
                                const std::vector<AttentionSidecar>* attention,
                                const ResizeWeights* weights) {
    Budget budget{options.budget, options.method == Method::HPool ? options.protected_count : 0};
    budget.validate();
    require(options.method == Method::HPool || options.protected_count == 0,
            "protected tokens apply to h-pool only");
    if (options.method == Method::Agc) {
        require(attention != nullptr, "agc needs an attention sidecar file");
    }
    if (options.method == Method::SeqResize) {
        require(weights != nullptr, "seq-resize needs a weights file");
        weights->validate();
        require(weights->m == options.budget, "budget " + std::to_string(options.budget) +
                                                  " does not match the weights' m = " +
                                                  std::to_string(weights->m));
    }

    std::unordered_map<std::string, const AttentionSidecar*> by_doc;
    if (attention != nullptr) {
        for (const auto& s : *attention) {
            by_doc.emplace(s.doc_id, &s);
        }
    }

    const std::size_t count = source.size();
    std::vector<std::optional<EmbeddingMatrix>> results(count);
    std::vector<std::optional<Error>> errors(count);
    parallel_for(count, options.threads, [&](std::size_t i) {
        const auto& doc = source[i];
        const AttentionSidecar* att = nullptr;
        if (auto it = by_doc.find(doc.doc_id); it != by_doc.end()) {
            att = it->second;
        }
        try {
            results[i] = compress_one(doc, options, att, weights);
        } catch (const Error& e) {
            errors[i] = e;
        }
    });

    CompressOutcome out{Corpus(source.dim()), {}, {}};
    for (std::size_t i = 0; i < count; ++i) {
        if (results[i]) {
            out.corpus.add(source[i].doc_id, std::move(*results[i]));
        } else {
            out.failures.push_back({source[i].doc_id, errors[i]->kind(), errors[i]->what()});
        }
    }

    auto& meta = out.meta;
    meta.method = options.method;
    meta.budget = budget;
    if (options.method == Method::Agc) {
        meta.agc = options.agc;
    }
    meta.source_fingerprint = corpus_fingerprint(source);
    meta.source_docs = source.size();
    meta.avg_source_tokens = source.mean_tokens();
    if (meta.avg_source_tokens > 0.0) {
        meta.ratio = compression_ratio(static_cast<double>(options.budget), meta.avg_source_tokens);
    }
    meta.pad_short = options.pad_short;
    return out;
}

} // namespace mvpress
