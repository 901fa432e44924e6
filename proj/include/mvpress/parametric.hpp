#pragma once

#include "mvpress/matrix.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mvpress {

/// Learned two-layer sequence-dimension MLP. w1 is d x n0 and w2 is m x d,
/// both row-major. No bias terms.
struct ResizeWeights {
    std::size_t n0 = 1;
    std::size_t d = 1;
    std::size_t m = 1;
    std::vector<float> w1;
    std::vector<float> w2;

    void validate() const;

    friend bool operator==(const ResizeWeights&, const ResizeWeights&) = default;
};

enum class MemoryPlacement { Suffix };

struct MemTokLayout {
    std::size_t m = 1;
    MemoryPlacement placement = MemoryPlacement::Suffix;
};

/// Keep the first n0 rows, or append zero rows up to n0.
EmbeddingMatrix pad_trunc(const EmbeddingMatrix& z, std::size_t n0);

/// C = W2 * relu(W1 * PadTrunc(Z, n0)); each hidden channel's length-n0
/// column is mapped independently to length m.
EmbeddingMatrix seq_resize(const EmbeddingMatrix& z, const ResizeWeights& w);

/// The trailing `layout.m` rows of the encoder output.
EmbeddingMatrix mem_tok_extract(const EmbeddingMatrix& z, const MemTokLayout& layout);

// MRSZ: "MRSZ" | u32 version=1 | u32 n0 | u32 d | u32 m | W1 f32 | W2 f32.
std::string encode_resize_weights(const ResizeWeights& w);
ResizeWeights decode_resize_weights(std::string_view bytes);
ResizeWeights read_resize_weights(const std::string& path);
void write_resize_weights(const ResizeWeights& w, const std::string& path);

} // namespace mvpress
