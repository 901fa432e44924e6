#include "mvpress/corpus.hpp"

#include "mvpress/error.hpp"

#include <cmath>
#include <unordered_set>

namespace mvpress {

Corpus::Corpus(std::size_t dim) : dim_(dim) {
    if (dim_ == 0) {
        fail(ErrorKind::Validation, "corpus dim must be >= 1");
    }
}

void validate_doc_id(const std::string& doc_id) {
    if (doc_id.empty()) {
        fail(ErrorKind::Validation, "empty doc_id");
    }
    if (doc_id.size() > kMaxDocIdBytes) {
        fail(ErrorKind::Validation, "doc_id longer than 4096 bytes");
    }
}

void Corpus::add(DocumentRecord doc) {
    validate_doc_id(doc.doc_id);
    if (doc.embeddings.dim() != dim_) {
        fail(ErrorKind::Validation, "doc '" + doc.doc_id + "' has dim " +
                                        std::to_string(doc.embeddings.dim()) + ", corpus dim is " +
                                        std::to_string(dim_));
    }
    auto [it, inserted] = lookup_.emplace(doc.doc_id, docs_.size());
    if (!inserted) {
        fail(ErrorKind::Validation, "duplicate doc_id '" + doc.doc_id + "'");
    }
    docs_.push_back(std::move(doc));
}

std::ptrdiff_t Corpus::find(const std::string& doc_id) const {
    auto it = lookup_.find(doc_id);
    return it == lookup_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

std::size_t Corpus::total_tokens() const noexcept {
    std::size_t total = 0;
    for (const auto& d : docs_) {
        total += d.embeddings.rows();
    }
    return total;
}

double Corpus::mean_tokens() const noexcept {
    if (docs_.empty()) {
        return 0.0;
    }
    return static_cast<double>(total_tokens()) / static_cast<double>(docs_.size());
}

void AttentionSidecar::validate() const {
    validate_doc_id(doc_id);
    if (psi < 1 || heads < 1) {
        fail(ErrorKind::Validation, "attention for '" + doc_id + "' needs psi >= 1 and heads >= 1");
    }
    const std::size_t expected = static_cast<std::size_t>(psi) * heads * n;
    if (weights.size() != expected) {
        fail(ErrorKind::Validation, "attention for '" + doc_id + "' has " +
                                        std::to_string(weights.size()) + " weights, expected " +
                                        std::to_string(expected));
    }
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!std::isfinite(weights[i]) || weights[i] < 0.0f) {
            fail(ErrorKind::Validation, "attention for '" + doc_id +
                                            "' has a negative or non-finite weight at index " +
                                            std::to_string(i));
        }
    }
}

void check_attention(const std::vector<AttentionSidecar>& sidecars, const Corpus& corpus) {
    std::unordered_set<std::string> seen;
    for (const auto& s : sidecars) {
        if (!seen.insert(s.doc_id).second) {
            fail(ErrorKind::Consistency, "attention sidecar repeats doc '" + s.doc_id + "'");
        }
        const auto pos = corpus.find(s.doc_id);
        if (pos < 0) {
            fail(ErrorKind::Consistency, "attention sidecar names unknown doc '" + s.doc_id + "'");
        }
        const auto rows = corpus[static_cast<std::size_t>(pos)].embeddings.rows();
        if (rows != s.n) {
            fail(ErrorKind::Consistency, "attention for '" + s.doc_id + "' covers " +
                                             std::to_string(s.n) + " tokens, document has " +
                                             std::to_string(rows));
        }
    }
}

void Budget::validate() const {
    if (m < 1) {
        fail(ErrorKind::Contract, "budget m must be >= 1");
    }
    if (protected_count >= m) {
        fail(ErrorKind::Contract, "protected token count must be < budget m");
    }
}

} // namespace mvpress
