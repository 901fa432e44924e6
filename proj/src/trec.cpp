#include "mvpress/trec.hpp"

#include "binary_io.hpp"
#include "mvpress/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <unordered_map>

namespace mvpress {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) fields.push_back(line.substr(start, i - start));
    }
    return fields;
}

// Calls fn(line_number, line) for every line, 1-based.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        ++line_no;
        fn(line_no, text.substr(pos, end - pos));
        pos = end + 1;
    }
}

[[noreturn]] void parse_fail(std::string_view what, std::size_t line_no, const std::string& msg) {
    fail(ErrorKind::Parse, std::string(what) + " line " + std::to_string(line_no) + ": " + msg);
}

template <typename T>
bool parse_int(std::string_view s, T& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
}

bool parse_double(std::string_view s, double& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size() && std::isfinite(out);
}

} // namespace

const QueryRanking* RunList::find(const std::string& query_id) const {
    for (const auto& q : queries) {
        if (q.query_id == query_id) return &q;
    }
    return nullptr;
}

std::string format_run(const RunList& run) {
    std::string out;
    char score[64];
    for (const auto& q : run.queries) {
        for (const auto& r : q.results) {
            std::snprintf(score, sizeof(score), "%.6f", r.score);
            out += q.query_id;
            out += " Q0 ";
            out += r.doc_id;
            out += ' ';
            out += std::to_string(r.rank);
            out += ' ';
            out += score;
            out += ' ';
            out += run.tag;
            out += '\n';
        }
    }
    return out;
}

RunList parse_run(std::string_view text) {
    RunList run;
    bool have_tag = false;
    std::unordered_map<std::string, std::size_t> index;
    std::vector<std::vector<std::size_t>> line_of; // per query, source line of each result
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        const auto f = split_ws(line);
        if (f.empty()) return;
        if (f.size() != 6) {
            parse_fail("run", line_no, "expected 6 fields, got " + std::to_string(f.size()));
        }
        RankedResult r;
        r.doc_id = std::string(f[2]);
        if (!parse_int(f[3], r.rank) || r.rank < 1) {
            parse_fail("run", line_no, "bad rank '" + std::string(f[3]) + "'");
        }
        if (!parse_double(f[4], r.score)) {
            parse_fail("run", line_no, "bad score '" + std::string(f[4]) + "'");
        }
        if (!have_tag) {
            run.tag = std::string(f[5]);
            have_tag = true;
        } else if (run.tag != f[5]) {
            parse_fail("run", line_no, "run tag '" + std::string(f[5]) + "' differs from '" + run.tag + "'");
        }
        auto [it, inserted] = index.emplace(std::string(f[0]), run.queries.size());
        if (inserted) {
            run.queries.push_back(QueryRanking{std::string(f[0]), {}});
            line_of.emplace_back();
        }
        run.queries[it->second].results.push_back(std::move(r));
        line_of[it->second].push_back(line_no);
    });
    for (std::size_t qi = 0; qi < run.queries.size(); ++qi) {
        auto& q = run.queries[qi];
        std::vector<std::size_t> order(q.results.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return q.results[a].rank < q.results[b].rank; });
        std::vector<RankedResult> sorted;
        sorted.reserve(order.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            const auto& r = q.results[order[i]];
            if (r.rank != i + 1) {
                parse_fail("run", line_of[qi][order[i]],
                           "ranks for query '" + q.query_id + "' are not contiguous from 1 (found " +
                               std::to_string(r.rank) + ", expected " + std::to_string(i + 1) + ")");
            }
            sorted.push_back(r);
        }
        q.results = std::move(sorted);
    }
    return run;
}

RunList read_run(const std::string& path) {
    return parse_run(detail::read_file(path));
}

void write_run(const RunList& run, const std::string& path) {
    detail::write_file(path, format_run(run));
}

void Qrels::add(Entry entry) {
    if (entry.query_id.empty() || entry.doc_id.empty()) {
        fail(ErrorKind::Validation, "qrels entry needs non-empty query and doc ids");
    }
    if (entry.grade < 0) {
        fail(ErrorKind::Validation, "qrels grade must be >= 0");
    }
    auto key = std::make_pair(entry.query_id, entry.doc_id);
    if (lookup_.count(key) != 0) {
        fail(ErrorKind::Validation, "duplicate judgment for (" + entry.query_id + ", " + entry.doc_id + ")");
    }
    lookup_.emplace(std::move(key), entries_.size());
    auto [it, inserted] = by_query_.try_emplace(entry.query_id);
    if (inserted) {
        query_order_.push_back(entry.query_id);
    }
    it->second.push_back(entries_.size());
    entries_.push_back(std::move(entry));
}

int Qrels::grade(const std::string& query_id, const std::string& doc_id) const {
    auto it = lookup_.find({query_id, doc_id});
    return it == lookup_.end() ? 0 : entries_[it->second].grade;
}

std::vector<std::pair<std::string, int>> Qrels::judged(const std::string& query_id) const {
    std::vector<std::pair<std::string, int>> out;
    auto it = by_query_.find(query_id);
    if (it == by_query_.end()) return out;
    for (auto i : it->second) {
        out.emplace_back(entries_[i].doc_id, entries_[i].grade);
    }
    return out;
}

std::string format_qrels(const Qrels& qrels) {
    std::string out;
    for (const auto& e : qrels.entries()) {
        out += e.query_id + ' ' + e.iteration + ' ' + e.doc_id + ' ' + std::to_string(e.grade) + '\n';
    }
    return out;
}

Qrels parse_qrels(std::string_view text) {
    Qrels qrels;
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        const auto f = split_ws(line);
        if (f.empty()) return;
        if (f.size() != 4) {
            parse_fail("qrels", line_no, "expected 4 fields, got " + std::to_string(f.size()));
        }
        int grade = 0;
        if (!parse_int(f[3], grade) || grade < 0) {
            parse_fail("qrels", line_no, "grade must be a nonnegative integer, got '" + std::string(f[3]) + "'");
        }
        try {
            qrels.add(Qrels::Entry{std::string(f[0]), std::string(f[1]), std::string(f[2]), grade});
        } catch (const Error& e) {
            parse_fail("qrels", line_no, e.what());
        }
    });
    return qrels;
}

Qrels read_qrels(const std::string& path) {
    return parse_qrels(detail::read_file(path));
}

void write_qrels(const Qrels& qrels, const std::string& path) {
    detail::write_file(path, format_qrels(qrels));
}

} // namespace mvpress
