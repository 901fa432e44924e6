#include "mvpress/meta.hpp"

#include "binary_io.hpp"
#include "mvpress/error.hpp"

#include <json.hpp>

namespace mvpress {

using nlohmann::ordered_json;

const char* method_name(Method m) noexcept {
    switch (m) {
    case Method::SeqResize: return "seq-resize";
    case Method::MemTok: return "mem-tok";
    case Method::HPool: return "h-pool";
    case Method::Agc: return "agc";
    }
    return "?";
}

Method parse_method(const std::string& name) {
    if (name == "seq-resize") return Method::SeqResize;
    if (name == "mem-tok") return Method::MemTok;
    if (name == "h-pool") return Method::HPool;
    if (name == "agc") return Method::Agc;
    fail(ErrorKind::Parse, "unknown compression method '" + name + "'");
}

std::string CompressionMeta::to_json() const {
    ordered_json j;
    j["method"] = method_name(method);
    j["budget"] = {{"m", budget.m}, {"protected", budget.protected_count}};
    if (agc) {
        j["agc"] = {
            {"selection", agc->selection == Selection::Attention ? "attention" : "random"},
            {"seed", agc->seed},
            {"aggregation", agc->aggregation == Aggregation::Weighted ? "weighted" : "unweighted"},
            {"clustering", agc->clustering ? "on" : "off"},
        };
    } else {
        j["agc"] = nullptr;
    }
    j["source_fingerprint"] = source_fingerprint;
    j["source_docs"] = source_docs;
    j["avg_source_tokens"] = avg_source_tokens;
    j["ratio"] = ratio ? ordered_json(*ratio) : ordered_json(nullptr);
    j["pad_short"] = pad_short;
    return j.dump(2) + "\n";
}

CompressionMeta CompressionMeta::from_json(const std::string& text) {
    CompressionMeta meta;
    try {
        const auto j = ordered_json::parse(text);
        meta.method = parse_method(j.at("method").get<std::string>());
        meta.budget.m = j.at("budget").at("m").get<std::size_t>();
        meta.budget.protected_count = j.at("budget").at("protected").get<std::size_t>();
        if (!j.at("agc").is_null()) {
            const auto& a = j.at("agc");
            AgcVariant v;
            const auto sel = a.at("selection").get<std::string>();
            const auto agg = a.at("aggregation").get<std::string>();
            const auto clu = a.at("clustering").get<std::string>();
            if ((sel != "attention" && sel != "random") || (agg != "weighted" && agg != "unweighted") ||
                (clu != "on" && clu != "off")) {
                fail(ErrorKind::Parse, "meta: bad agc variant field");
            }
            v.selection = sel == "attention" ? Selection::Attention : Selection::Random;
            v.seed = a.at("seed").get<std::uint64_t>();
            v.aggregation = agg == "weighted" ? Aggregation::Weighted : Aggregation::Unweighted;
            v.clustering = clu == "on";
            meta.agc = v;
        }
        meta.source_fingerprint = j.at("source_fingerprint").get<std::string>();
        meta.source_docs = j.at("source_docs").get<std::size_t>();
        meta.avg_source_tokens = j.at("avg_source_tokens").get<double>();
        if (!j.at("ratio").is_null()) {
            meta.ratio = j.at("ratio").get<double>();
        }
        meta.pad_short = j.at("pad_short").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Parse, std::string("meta: ") + e.what());
    }
    meta.budget.validate();
    return meta;
}

CompressionMeta read_meta(const std::string& path) {
    return CompressionMeta::from_json(detail::read_file(path));
}

void write_meta(const CompressionMeta& meta, const std::string& path) {
    detail::write_file(path, meta.to_json());
}

std::string meta_path_for(const std::string& mvec_path) {
    const std::string ext = ".mvec";
    if (mvec_path.size() >= ext.size() &&
        mvec_path.compare(mvec_path.size() - ext.size(), ext.size(), ext) == 0) {
        return mvec_path.substr(0, mvec_path.size() - ext.size()) + ".meta.json";
    }
    return mvec_path + ".meta.json";
}

} // namespace mvpress
