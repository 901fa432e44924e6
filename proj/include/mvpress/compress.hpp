#pragma once

#include "mvpress/agc.hpp"
#include "mvpress/corpus.hpp"
#include "mvpress/error.hpp"
#include "mvpress/meta.hpp"
#include "mvpress/parametric.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace mvpress {

struct CompressOptions {
    Method method = Method::HPool;
    std::size_t budget = 1;
    /// H-Pool only: the first `protected_count` token positions are kept verbatim.
    std::size_t protected_count = 0;
    AgcVariant agc;
    /// Zero-pad documents shorter than the budget instead of failing them.
    bool pad_short = false;
    std::size_t threads = 1;
};

struct DocFailure {
    std::string doc_id;
    ErrorKind kind = ErrorKind::Contract;
    std::string message;
};

struct CompressOutcome {
    Corpus corpus;
    CompressionMeta meta;
    std::vector<DocFailure> failures; // in corpus order
};

/// Compresses every document independently. Per-document problems (empty
/// document, too short, missing or inconsistent attention) are collected in
/// `failures`; setup problems (missing sidecar file or weights, budget that
/// disagrees with the weights) throw a contract error.
CompressOutcome compress_corpus(const Corpus& source, const CompressOptions& options,
                                const std::vector<AttentionSidecar>* attention = nullptr,
                                const ResizeWeights* weights = nullptr);

} // namespace mvpress
