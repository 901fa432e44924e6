#include "mvpress/io.hpp"

#include "binary_io.hpp"
#include "mvpress/error.hpp"
#include "mvpress/hash.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>
#include <unordered_set>

namespace mvpress {

namespace detail {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorKind::Io, "cannot open '" + path + "' for reading");
    }
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        fail(ErrorKind::Io, "read failure on '" + path + "'");
    }
    return bytes;
}

void write_file(const std::string& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        fail(ErrorKind::Io, "cannot open '" + path + "' for writing");
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
        fail(ErrorKind::Io, "write failure on '" + path + "'");
    }
}

} // namespace detail

namespace {

constexpr std::uint32_t kVersion = 1;

std::uint32_t checked_u32(std::size_t v, const char* what) {
    if (v > std::numeric_limits<std::uint32_t>::max()) {
        fail(ErrorKind::Contract, std::string(what) + " does not fit in u32");
    }
    return static_cast<std::uint32_t>(v);
}

std::string read_id(detail::ByteReader& in) {
    const auto at = in.offset();
    const auto len = in.u32();
    if (len == 0 || len > kMaxDocIdBytes) {
        fail(ErrorKind::Validation, std::string(in.format()) + ": doc id length " +
                                        std::to_string(len) + " out of range at offset " +
                                        std::to_string(at));
    }
    return in.bytes(len);
}

std::vector<float> read_floats(detail::ByteReader& in, std::size_t count, const std::string& doc_id) {
    if (count > std::numeric_limits<std::size_t>::max() / 4) {
        fail(ErrorKind::Corruption, std::string(in.format()) + ": element count overflow");
    }
    in.need(count * 4);
    std::vector<float> values(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto at = in.offset();
        values[i] = in.f32();
        if (!std::isfinite(values[i])) {
            fail(ErrorKind::Validation, std::string(in.format()) + ": non-finite value in '" +
                                            doc_id + "' at offset " + std::to_string(at));
        }
    }
    return values;
}

} // namespace

std::string encode_mvec(const Corpus& corpus) {
    detail::ByteWriter out;
    out.magic("MVEC");
    out.u32(kVersion);
    out.u32(checked_u32(corpus.dim(), "dim"));
    out.u64(corpus.size());
    for (const auto& doc : corpus.docs()) {
        out.u32(checked_u32(doc.doc_id.size(), "doc id length"));
        out.bytes(doc.doc_id);
        out.u32(checked_u32(doc.embeddings.rows(), "token count"));
        for (float v : doc.embeddings.values()) {
            out.f32(v);
        }
    }
    return out.take();
}

Corpus decode_mvec(std::string_view bytes) {
    detail::ByteReader in(bytes, "MVEC");
    in.expect_magic("MVEC");
    in.expect_version(kVersion);
    const auto dim = in.u32();
    if (dim == 0) {
        fail(ErrorKind::Validation, "MVEC: dim must be >= 1");
    }
    const auto count = in.u64();
    Corpus corpus(dim);
    for (std::uint64_t d = 0; d < count; ++d) {
        const auto doc_offset = in.offset();
        auto id = read_id(in);
        const auto rows = in.u32();
        auto values = read_floats(in, static_cast<std::size_t>(rows) * dim, id);
        try {
            corpus.add(std::move(id), EmbeddingMatrix(rows, dim, std::move(values)));
        } catch (const Error& e) {
            fail(e.kind(), std::string("MVEC: ") + e.what() + " (record at offset " +
                               std::to_string(doc_offset) + ")");
        }
    }
    in.expect_end();
    return corpus;
}

Corpus read_mvec(const std::string& path) {
    return decode_mvec(detail::read_file(path));
}

void write_mvec(const Corpus& corpus, const std::string& path) {
    detail::write_file(path, encode_mvec(corpus));
}

std::string encode_attention(const std::vector<AttentionSidecar>& sidecars) {
    detail::ByteWriter out;
    out.magic("MATT");
    out.u32(kVersion);
    out.u64(sidecars.size());
    for (const auto& s : sidecars) {
        s.validate();
        out.u32(checked_u32(s.doc_id.size(), "doc id length"));
        out.bytes(s.doc_id);
        out.u32(s.psi);
        out.u32(s.heads);
        out.u32(s.n);
        for (float v : s.weights) {
            out.f32(v);
        }
    }
    return out.take();
}

std::vector<AttentionSidecar> decode_attention(std::string_view bytes) {
    detail::ByteReader in(bytes, "MATT");
    in.expect_magic("MATT");
    in.expect_version(kVersion);
    const auto count = in.u64();
    std::vector<AttentionSidecar> out;
    std::unordered_set<std::string> seen;
    for (std::uint64_t d = 0; d < count; ++d) {
        const auto rec_offset = in.offset();
        AttentionSidecar s;
        s.doc_id = read_id(in);
        s.psi = in.u32();
        s.heads = in.u32();
        s.n = in.u32();
        if (s.psi == 0 || s.heads == 0) {
            fail(ErrorKind::Validation, "MATT: psi and heads must be >= 1 for '" + s.doc_id +
                                            "' (record at offset " + std::to_string(rec_offset) +
                                            ")");
        }
        s.weights = read_floats(in, static_cast<std::size_t>(s.psi) * s.heads * s.n, s.doc_id);
        try {
            s.validate();
        } catch (const Error& e) {
            fail(e.kind(), std::string("MATT: ") + e.what() + " (record at offset " +
                               std::to_string(rec_offset) + ")");
        }
        if (!seen.insert(s.doc_id).second) {
            fail(ErrorKind::Validation, "MATT: duplicate doc_id '" + s.doc_id + "'");
        }
        out.push_back(std::move(s));
    }
    in.expect_end();
    return out;
}

std::vector<AttentionSidecar> read_attention(const std::string& path) {
    return decode_attention(detail::read_file(path));
}

void write_attention(const std::vector<AttentionSidecar>& sidecars, const std::string& path) {
    detail::write_file(path, encode_attention(sidecars));
}

std::string corpus_fingerprint(const Corpus& corpus) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(encode_mvec(corpus))));
    return buf;
}

} // namespace mvpress
