#include "mvpress/parametric.hpp"

#include "binary_io.hpp"
#include "mvpress/error.hpp"

#include <algorithm>
#include <cmath>

namespace mvpress {

void ResizeWeights::validate() const {
    if (n0 < 1 || d < 1 || m < 1) {
        fail(ErrorKind::Validation, "resize weights need n0, d, m >= 1");
    }
    if (w1.size() != d * n0) {
        fail(ErrorKind::Contract, "W1 has " + std::to_string(w1.size()) + " values, expected d*n0 = " +
                                      std::to_string(d * n0));
    }
    if (w2.size() != m * d) {
        fail(ErrorKind::Contract, "W2 has " + std::to_string(w2.size()) + " values, expected m*d = " +
                                      std::to_string(m * d));
    }
    auto finite = [](float v) { return std::isfinite(v); };
    if (!std::all_of(w1.begin(), w1.end(), finite) || !std::all_of(w2.begin(), w2.end(), finite)) {
        fail(ErrorKind::Validation, "resize weights contain a non-finite value");
    }
}

EmbeddingMatrix pad_trunc(const EmbeddingMatrix& z, std::size_t n0) {
    require(n0 >= 1, "pad_trunc needs n0 >= 1");
    const std::size_t dim = z.dim();
    std::vector<float> data(n0 * dim, 0.0f);
    const std::size_t keep = std::min(n0, z.rows());
    std::copy_n(z.values().begin(), keep * dim, data.begin());
    return EmbeddingMatrix(n0, dim, std::move(data));
}

EmbeddingMatrix seq_resize(const EmbeddingMatrix& z, const ResizeWeights& w) {
    w.validate();
    const EmbeddingMatrix padded = pad_trunc(z, w.n0);
    const std::size_t h = z.dim();

    // hidden = relu(W1 * Zbar), d x h
    std::vector<double> hidden(w.d * h, 0.0);
    for (std::size_t r = 0; r < w.d; ++r) {
        for (std::size_t c = 0; c < h; ++c) {
            double acc = 0.0;
            for (std::size_t t = 0; t < w.n0; ++t) {
                acc += static_cast<double>(w.w1[r * w.n0 + t]) * padded.row(t)[c];
            }
            hidden[r * h + c] = std::max(acc, 0.0);
        }
    }

    std::vector<float> out(w.m * h);
    for (std::size_t r = 0; r < w.m; ++r) {
        for (std::size_t c = 0; c < h; ++c) {
            double acc = 0.0;
            for (std::size_t t = 0; t < w.d; ++t) {
                acc += static_cast<double>(w.w2[r * w.d + t]) * hidden[t * h + c];
            }
            out[r * h + c] = static_cast<float>(acc);
        }
    }
    return EmbeddingMatrix(w.m, h, std::move(out));
}

EmbeddingMatrix mem_tok_extract(const EmbeddingMatrix& z, const MemTokLayout& layout) {
    require(layout.m >= 1, "memory token count must be >= 1");
    require(z.rows() >= layout.m, "encoder output has " + std::to_string(z.rows()) +
                                      " rows, fewer than the " + std::to_string(layout.m) +
                                      " memory tokens");
    return z.slice(z.rows() - layout.m, layout.m);
}

std::string encode_resize_weights(const ResizeWeights& w) {
    w.validate();
    detail::ByteWriter out;
    out.magic("MRSZ");
    out.u32(1);
    out.u32(static_cast<std::uint32_t>(w.n0));
    out.u32(static_cast<std::uint32_t>(w.d));
    out.u32(static_cast<std::uint32_t>(w.m));
    for (float v : w.w1) out.f32(v);
    for (float v : w.w2) out.f32(v);
    return out.take();
}

ResizeWeights decode_resize_weights(std::string_view bytes) {
    detail::ByteReader in(bytes, "MRSZ");
    in.expect_magic("MRSZ");
    in.expect_version(1);
    ResizeWeights w;
    w.n0 = in.u32();
    w.d = in.u32();
    w.m = in.u32();
    if (w.n0 == 0 || w.d == 0 || w.m == 0) {
        fail(ErrorKind::Validation, "MRSZ: n0, d, m must be >= 1");
    }
    in.need((w.d * w.n0 + w.m * w.d) * 4);
    w.w1.resize(w.d * w.n0);
    w.w2.resize(w.m * w.d);
    for (auto& v : w.w1) v = in.f32();
    for (auto& v : w.w2) v = in.f32();
    in.expect_end();
    try {
        w.validate();
    } catch (const Error& e) {
        fail(e.kind(), std::string("MRSZ: ") + e.what());
    }
    return w;
}

ResizeWeights read_resize_weights(const std::string& path) {
    return decode_resize_weights(detail::read_file(path));
}

void write_resize_weights(const ResizeWeights& w, const std::string& path) {
    detail::write_file(path, encode_resize_weights(w));
}

} // namespace mvpress
