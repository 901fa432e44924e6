#pragma once

#include "mvpress/corpus.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace mvpress {

// MVEC: "MVEC" | u32 version=1 | u32 dim | u64 doc_count | per doc:
//   u32 id_len | id bytes | u32 token_count | token_count*dim f32, row-major.
// MATT: "MATT" | u32 version=1 | u64 doc_count | per doc:
//   u32 id_len | id bytes | u32 psi | u32 heads | u32 n | psi*heads*n f32.
// All integers and floats little-endian.

std::string encode_mvec(const Corpus& corpus);
Corpus decode_mvec(std::string_view bytes);
Corpus read_mvec(const std::string& path);
void write_mvec(const Corpus& corpus, const std::string& path);

std::string encode_attention(const std::vector<AttentionSidecar>& sidecars);
std::vector<AttentionSidecar> decode_attention(std::string_view bytes);
std::vector<AttentionSidecar> read_attention(const std::string& path);
void write_attention(const std::vector<AttentionSidecar>& sidecars, const std::string& path);

/// FNV-1a 64 of the canonical MVEC encoding, as 16 lowercase hex digits.
std::string corpus_fingerprint(const Corpus& corpus);

} // namespace mvpress
