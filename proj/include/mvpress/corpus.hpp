#pragma once

#include "mvpress/matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace mvpress {

inline constexpr std::size_t kMaxDocIdBytes = 4096;

struct DocumentRecord {
    std::string doc_id;
    EmbeddingMatrix embeddings;

    friend bool operator==(const DocumentRecord&, const DocumentRecord&) = default;
};

/// Ordered collection of documents sharing one embedding dim; ids are unique.
class Corpus {
public:
    explicit Corpus(std::size_t dim = 1);

    void add(DocumentRecord doc);
    void add(std::string doc_id, EmbeddingMatrix embeddings) {
        add(DocumentRecord{std::move(doc_id), std::move(embeddings)});
    }

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return docs_.size(); }
    bool empty() const noexcept { return docs_.empty(); }
    const std::vector<DocumentRecord>& docs() const noexcept { return docs_; }
    const DocumentRecord& operator[](std::size_t i) const { return docs_[i]; }

    /// Position of `doc_id`, or -1.
    std::ptrdiff_t find(const std::string& doc_id) const;

    std::size_t total_tokens() const noexcept;
    /// Mean token count over docs; 0 for an empty corpus.
    double mean_tokens() const noexcept;

    friend bool operator==(const Corpus& a, const Corpus& b) {
        return a.dim_ == b.dim_ && a.docs_ == b.docs_;
    }

private:
    std::size_t dim_;
    std::vector<DocumentRecord> docs_;
    std::unordered_map<std::string, std::size_t> lookup_;
};

void validate_doc_id(const std::string& doc_id);

/// Last-layer attention from the universal query tokens to one document's
/// tokens. weights is laid out [query token][head][document position].
struct AttentionSidecar {
    std::string doc_id;
    std::uint32_t psi = 1;
    std::uint32_t heads = 1;
    std::uint32_t n = 0;
    std::vector<float> weights;

    float at(std::size_t query_token, std::size_t head, std::size_t pos) const noexcept {
        return weights[(query_token * heads + head) * n + pos];
    }

    void validate() const;

    friend bool operator==(const AttentionSidecar&, const AttentionSidecar&) = default;
};

/// Throws a consistency error unless every sidecar names a corpus document
/// with the same token count and no document id repeats.
void check_attention(const std::vector<AttentionSidecar>& sidecars, const Corpus& corpus);

struct Budget {
    std::size_t m = 1;
    std::size_t protected_count = 0;

    void validate() const;
};

} // namespace mvpress
