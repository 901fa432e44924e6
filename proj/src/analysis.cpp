#include "mvpress/analysis.hpp"

#include "binary_io.hpp"
#include "mvpress/error.hpp"
#include "mvpress/metrics.hpp"

#include <json.hpp>

#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

namespace mvpress {

std::vector<double> matching_strength(std::span<const MatchRecord> matches, std::size_t doc_len,
                                      StrengthNormalization mode) {
    std::vector<double> strength(doc_len, 0.0);
    if (matches.empty()) return strength;
    for (const auto& r : matches) {
        require(r.doc_pos < doc_len, "match record doc_pos " + std::to_string(r.doc_pos) +
                                         " outside document length " + std::to_string(doc_len));
    }
    if (mode == StrengthNormalization::Global) {
        for (const auto& r : matches) strength[r.doc_pos] += r.similarity;
        for (auto& s : strength) s /= static_cast<double>(matches.size());
        return strength;
    }
    std::map<std::size_t, std::pair<std::vector<double>, std::size_t>> per_query;
    for (const auto& r : matches) {
        auto& [sums, count] = per_query[r.query_pos];
        if (sums.empty()) sums.assign(doc_len, 0.0);
        sums[r.doc_pos] += r.similarity;
        ++count;
    }
    for (const auto& [qpos, entry] : per_query) {
        const auto& [sums, count] = entry;
        for (std::size_t j = 0; j < doc_len; ++j) {
            strength[j] += sums[j] / static_cast<double>(count);
        }
    }
    for (auto& s : strength) s /= static_cast<double>(per_query.size());
    return strength;
}

std::vector<MatchRecord> filter_relevant(std::span<const MatchRecord> matches, const Qrels& qrels) {
    std::vector<MatchRecord> out;
    for (const auto& r : matches) {
        if (qrels.grade(r.query_id, r.doc_id) >= 1) out.push_back(r);
    }
    return out;
}

double utilization_fraction(std::span<const MatchRecord> matches, const FlatIndex& index) {
    const auto total = index.total_vectors();
    if (total == 0) return 0.0;
    std::set<std::pair<std::string, std::size_t>> active;
    for (const auto& r : matches) {
        const auto pos = index.corpus().find(r.doc_id);
        if (pos < 0) {
            fail(ErrorKind::Consistency, "match record names doc '" + r.doc_id + "' absent from the index");
        }
        if (r.doc_pos >= index.corpus()[static_cast<std::size_t>(pos)].embeddings.rows()) {
            fail(ErrorKind::Consistency, "match record position " + std::to_string(r.doc_pos) +
                                             " outside doc '" + r.doc_id + "'");
        }
        active.emplace(r.doc_id, r.doc_pos);
    }
    return static_cast<double>(active.size()) / static_cast<double>(total);
}

SquareMatrix mean_pairwise_cosine(const Corpus& corpus) {
    require(!corpus.empty(), "pairwise cosine needs at least one document");
    const std::size_t m = corpus[0].embeddings.rows();
    SquareMatrix mean(m);
    for (const auto& doc : corpus.docs()) {
        require(doc.embeddings.rows() == m, "pairwise cosine needs a uniform row count; doc '" + doc.doc_id +
                                                "' has " + std::to_string(doc.embeddings.rows()) +
                                                " rows, expected " + std::to_string(m));
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t b = 0; b < m; ++b) {
                mean.at(a, b) += cosine(doc.embeddings.row(a), doc.embeddings.row(b));
            }
        }
    }
    for (auto& v : mean.values) v /= static_cast<double>(corpus.size());
    return mean;
}

EvennessReport evenness(std::span<const double> samples) {
    return EvennessReport{cv(samples), gini(samples), samples.size()};
}

std::string format_match_log(std::span<const MatchRecord> matches) {
    std::string out;
    for (const auto& r : matches) {
        out += "{\"qid\":" + nlohmann::json(r.query_id).dump();
        out += ",\"qpos\":" + std::to_string(r.query_pos);
        out += ",\"did\":" + nlohmann::json(r.doc_id).dump();
        out += ",\"dpos\":" + std::to_string(r.doc_pos);
        out += ",\"sim\":" + nlohmann::json(r.similarity).dump();
        out += "}\n";
    }
    return out;
}

std::vector<MatchRecord> parse_match_log(std::string_view text) {
    std::vector<MatchRecord> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        ++line_no;
        const auto line = text.substr(pos, end - pos);
        pos = end + 1;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            MatchRecord r;
            r.query_id = j.at("qid").get<std::string>();
            r.query_pos = j.at("qpos").get<std::size_t>();
            r.doc_id = j.at("did").get<std::string>();
            r.doc_pos = j.at("dpos").get<std::size_t>();
            r.similarity = j.at("sim").get<double>();
            if (!j.at("qpos").is_number_unsigned() || !j.at("dpos").is_number_unsigned()) {
                fail(ErrorKind::Parse, "positions must be nonnegative integers");
            }
            out.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorKind::Parse, "match log line " + std::to_string(line_no) + ": " + e.what());
        } catch (const Error& e) {
            fail(ErrorKind::Parse, "match log line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

std::vector<MatchRecord> read_match_log(const std::string& path) {
    return parse_match_log(detail::read_file(path));
}

void write_match_log(std::span<const MatchRecord> matches, const std::string& path) {
    detail::write_file(path, format_match_log(matches));
}

} // namespace mvpress
