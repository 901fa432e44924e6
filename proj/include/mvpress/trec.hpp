#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mvpress {

struct RankedResult {
    std::string doc_id;
    std::size_t rank = 1;
    double score = 0.0;

    friend bool operator==(const RankedResult&, const RankedResult&) = default;
};

struct QueryRanking {
    std::string query_id;
    std::vector<RankedResult> results; // rank order, ranks 1..n

    friend bool operator==(const QueryRanking&, const QueryRanking&) = default;
};

/// Ranked retrieval output for a batch of queries, in query order.
struct RunList {
    std::vector<QueryRanking> queries;
    std::string tag = "mvpress";

    const QueryRanking* find(const std::string& query_id) const;

    friend bool operator==(const RunList&, const RunList&) = default;
};

/// Lines "qid Q0 docid rank score tag", score with 6 decimals.
std::string format_run(const RunList& run);
RunList parse_run(std::string_view text);
RunList read_run(const std::string& path);
void write_run(const RunList& run, const std::string& path);

/// Graded relevance judgments keyed by (query id, doc id). Entries keep
/// their file order so a parsed file formats back byte-identically.
class Qrels {
public:
    struct Entry {
        std::string query_id;
        std::string iteration = "0";
        std::string doc_id;
        int grade = 0;

        friend bool operator==(const Entry&, const Entry&) = default;
    };

    void add(Entry entry);
    void add(std::string query_id, std::string doc_id, int grade) {
        add(Entry{std::move(query_id), "0", std::move(doc_id), grade});
    }

    /// 0 when unjudged.
    int grade(const std::string& query_id, const std::string& doc_id) const;
    /// Judged docs of one query, in file order.
    std::vector<std::pair<std::string, int>> judged(const std::string& query_id) const;
    /// Query ids in order of first appearance.
    const std::vector<std::string>& query_ids() const noexcept { return query_order_; }
    const std::vector<Entry>& entries() const noexcept { return entries_; }
    bool empty() const noexcept { return entries_.empty(); }

    friend bool operator==(const Qrels& a, const Qrels& b) { return a.entries_ == b.entries_; }

private:
    std::vector<Entry> entries_;
    std::map<std::pair<std::string, std::string>, std::size_t> lookup_;
    std::map<std::string, std::vector<std::size_t>> by_query_;
    std::vector<std::string> query_order_;
};

/// Lines "qid iter docid grade", whitespace separated, grade a nonnegative integer.
std::string format_qrels(const Qrels& qrels);
Qrels parse_qrels(std::string_view text);
Qrels read_qrels(const std::string& path);
void write_qrels(const Qrels& qrels, const std::string& path);

} // namespace mvpress
