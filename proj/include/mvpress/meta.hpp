#pragma once

#include "mvpress/corpus.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace mvpress {

enum class Method { SeqResize, MemTok, HPool, Agc };

const char* method_name(Method m) noexcept;
Method parse_method(const std::string& name);

enum class Selection { Attention, Random };
enum class Aggregation { Weighted, Unweighted };

/// Ablation switches; the all-default value is the full pipeline.
struct AgcVariant {
    Selection selection = Selection::Attention;
    std::uint64_t seed = 0;
    Aggregation aggregation = Aggregation::Weighted;
    bool clustering = true;

    friend bool operator==(const AgcVariant&, const AgcVariant&) = default;
};

struct CompressionMeta {
    Method method = Method::HPool;
    Budget budget;
    std::optional<AgcVariant> agc;
    std::string source_fingerprint;
    std::size_t source_docs = 0;
    double avg_source_tokens = 0.0;
    /// 1 - m / avg_source_tokens at 4 decimals; empty when avg is 0.
    std::optional<double> ratio;
    bool pad_short = false;

    std::string to_json() const;
    static CompressionMeta from_json(const std::string& text);

    friend bool operator==(const CompressionMeta& a, const CompressionMeta& b) {
        return a.method == b.method && a.budget.m == b.budget.m &&
               a.budget.protected_count == b.budget.protected_count && a.agc == b.agc &&
               a.source_fingerprint == b.source_fingerprint && a.source_docs == b.source_docs &&
               a.avg_source_tokens == b.avg_source_tokens && a.ratio == b.ratio &&
               a.pad_short == b.pad_short;
    }
};

CompressionMeta read_meta(const std::string& path);
void write_meta(const CompressionMeta& meta, const std::string& path);

/// "<dir>/idx.mvec" -> "<dir>/idx.meta.json".
std::string meta_path_for(const std::string& mvec_path);

} // namespace mvpress
