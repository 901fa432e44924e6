// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria, so ctest reports any failure.

#include "mvpress/agc.hpp"
#include "mvpress/analysis.hpp"
#include "mvpress/compress.hpp"
#include "mvpress/error.hpp"
#include "mvpress/hash.hpp"
#include "mvpress/hpool.hpp"
#include "mvpress/index.hpp"
#include "mvpress/io.hpp"
#include "mvpress/metrics.hpp"
#include "mvpress/parallel.hpp"
#include "mvpress/parametric.hpp"
#include "mvpress/scoring.hpp"
#include "mvpress/synth.hpp"
#include "mvpress/trec.hpp"

#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

using namespace mvpress;
using mvtest::Rng;
using mvtest::pick;
using mvtest::random_matrix;

namespace {

struct Check {
    bool ok = true;
    std::string detail;

    void expect(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string hex_bytes(const std::string& s) {
    return std::to_string(s.size()) + " bytes, fnv " + std::to_string(fnv1a64(s));
}

// ---------------------------------------------------------------- criterion 1

std::string partition_bytes(const ClusterPartition& p) {
    std::string out;
    for (auto a : p.assignments) out += std::to_string(a) + ",";
    return out + "|";
}

struct WardInstance {
    EmbeddingMatrix x;
    std::size_t k;
};

std::vector<WardInstance> ward_instances(std::size_t count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<WardInstance> out;
    for (std::size_t i = 0; i < count; ++i) {
        const auto n = pick(rng, 1, 12);
        const auto h = pick(rng, 1, 8);
        const auto k = pick(rng, 1, n);
        out.push_back({random_matrix(rng, n, h), k});
    }
    return out;
}

// Ward partitions of every instance, computed in parallel, concatenated.
std::string ward_output(const std::vector<WardInstance>& inst, std::size_t threads) {
    std::vector<std::string> parts(inst.size());
    parallel_for(inst.size(), threads, [&](std::size_t i) {
        parts[i] = partition_bytes(ward_partition(inst[i].x, inst[i].k));
    });
    std::string out;
    for (const auto& p : parts) out += p;
    return out;
}

Check criterion_ward(double& elapsed) {
    Check c;
    const auto t0 = Clock::now();
    const auto inst = ward_instances(300, 1001);
    // Also instances with exact ties: small-integer coordinates.
    Rng rng(77);
    std::vector<WardInstance> tied_mut;
    for (std::size_t i = 0; i < 100; ++i) {
        const auto n = pick(rng, 2, 12);
        const auto h = pick(rng, 1, 3);
        std::vector<float> v(n * h);
        for (auto& x : v) x = static_cast<float>(static_cast<int>(pick(rng, 0, 2)) - 1);
        tied_mut.push_back({EmbeddingMatrix(n, h, std::move(v)), pick(rng, 1, n)});
    }
    const auto& tied = tied_mut;
    for (const auto* set : {&inst, &tied}) {
        for (std::size_t i = 0; i < set->size(); ++i) {
            const auto& w = (*set)[i];
            const auto fast = ward_partition(w.x, w.k);
            const auto oracle = oracle_agglomerative(w.x, w.k);
            c.expect(fast == oracle, "instance " + std::to_string(i) + " partitions differ");
            // h_pool with no protected rows must pool exactly that partition.
            const auto pooled = h_pool(w.x, Budget{w.k, 0});
            c.expect(pooled == cluster_means(w.x, oracle), "instance " + std::to_string(i) + " h_pool output differs");
        }
    }
    elapsed = seconds_since(t0);
    c.expect(elapsed < 5.0, "took " + std::to_string(elapsed) + " s");
    return c;
}

// ---------------------------------------------------------------- criterion 2

double naive_maxsim(const EmbeddingMatrix& q, const EmbeddingMatrix& d) {
    double total = 0.0;
    for (std::size_t i = 0; i < q.rows(); ++i) {
        double best = 0.0;
        for (std::size_t j = 0; j < d.rows(); ++j) {
            double s = 0.0;
            for (std::size_t t = 0; t < q.dim(); ++t) {
                s += static_cast<double>(q.row(i)[t]) * static_cast<double>(d.row(j)[t]);
            }
            if (j == 0 || s > best) best = s;
        }
        total += best;
    }
    return total;
}

struct SearchCase {
    Corpus corpus;
    EmbeddingMatrix query;
};

std::vector<SearchCase> search_cases(std::size_t count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<SearchCase> out;
    for (std::size_t i = 0; i < count; ++i) {
        const auto h = pick(rng, 1, 16);
        auto corpus = mvtest::random_corpus(rng, pick(rng, 1, 50), 1, 40, h);
        auto query = random_matrix(rng, pick(rng, 1, 32), h);
        out.push_back({std::move(corpus), std::move(query)});
    }
    return out;
}

std::string ranking_bytes(const QueryRanking& r) {
    std::string out;
    for (const auto& res : r.results) {
        out += res.doc_id + ":" + std::to_string(res.rank) + ":";
        out.append(reinterpret_cast<const char*>(&res.score), sizeof(double));
    }
    return out;
}

std::string search_output(const std::vector<SearchCase>& cases, std::size_t threads) {
    std::string out;
    for (const auto& sc : cases) {
        const auto index = FlatIndex::build(sc.corpus);
        SearchOptions opts;
        opts.k = sc.corpus.size();
        opts.threads = threads;
        out += ranking_bytes(search(index, "q", sc.query, opts).ranking) + "|";
    }
    return out;
}

Check criterion_maxsim(double& elapsed) {
    Check c;
    const auto t0 = Clock::now();
    const auto cases = search_cases(100, 2002);
    for (std::size_t ci = 0; ci < cases.size(); ++ci) {
        const auto& sc = cases[ci];
        std::vector<std::pair<double, std::string>> expected;
        for (const auto& doc : sc.corpus.docs()) {
            expected.emplace_back(naive_maxsim(sc.query, doc.embeddings), doc.doc_id);
        }
        std::sort(expected.begin(), expected.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        const auto index = FlatIndex::build(sc.corpus);
        for (std::size_t threads : {std::size_t{1}, std::size_t{4}}) {
            SearchOptions opts;
            opts.k = sc.corpus.size();
            opts.threads = threads;
            const auto got = search(index, "q", sc.query, opts).ranking;
            c.expect(got.results.size() == expected.size(), "case " + std::to_string(ci) + " wrong result count");
            for (std::size_t r = 0; r < std::min(got.results.size(), expected.size()); ++r) {
                const auto& g = got.results[r];
                c.expect(g.doc_id == expected[r].second && g.rank == r + 1,
                         "case " + std::to_string(ci) + " order differs at rank " + std::to_string(r + 1));
                c.expect(std::memcmp(&g.score, &expected[r].first, sizeof(double)) == 0,
                         "case " + std::to_string(ci) + " score not bit-exact at rank " + std::to_string(r + 1));
            }
            // A top-k cut is a prefix of the full ranking.
            opts.k = 1 + ci % sc.corpus.size();
            const auto cut = search(index, "q", sc.query, opts).ranking;
            c.expect(cut.results.size() == opts.k &&
                         std::equal(cut.results.begin(), cut.results.end(), got.results.begin()),
                     "case " + std::to_string(ci) + " top-k is not a prefix");
        }
    }
    elapsed = seconds_since(t0);
    c.expect(elapsed < 5.0, "took " + std::to_string(elapsed) + " s");
    return c;
}

// ---------------------------------------------------------------- criterion 3

std::string printed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

Check criterion_arithmetic() {
    Check c;
    const auto r32 = printed(100.0 * compression_ratio(32, 1318), 2);
    const auto r5 = printed(100.0 * compression_ratio(5, 1318), 2);
    const auto p1 = printed(percent_of_baseline(56.9, 55.7), 1);
    const auto p2 = printed(percent_of_baseline(45.0, 46.2), 1);
    c.expect(r32 == "97.57", "(32,1318) gave " + r32);
    c.expect(r5 == "99.62", "(5,1318) gave " + r5);
    c.expect(p1 == "102.1", "56.9/55.7 gave " + p1);
    c.expect(p2 == "97.4", "45.0/46.2 gave " + p2);
    return c;
}

// ---------------------------------------------------------------- criterion 4

Check criterion_budget() {
    Check c;
    Rng rng(4004);
    constexpr int kCases = 1000;
    for (int i = 0; i < kCases; ++i) {
        const auto m = pick(rng, 1, 8);
        const auto n = pick(rng, m, 48);
        const auto h = pick(rng, 1, 12);
        const auto z = random_matrix(rng, n, h);
        const std::string tag = " case " + std::to_string(i);

        ResizeWeights w;
        w.n0 = pick(rng, 1, 24);
        w.d = pick(rng, 1, 8);
        w.m = m;
        for (std::size_t j = 0; j < w.d * w.n0; ++j) w.w1.push_back(mvtest::uniform(rng, -1, 1));
        for (std::size_t j = 0; j < w.m * w.d; ++j) w.w2.push_back(mvtest::uniform(rng, -1, 1));
        c.expect(seq_resize(z, w).rows() == m, "seq-resize" + tag);

        c.expect(mem_tok_extract(z, MemTokLayout{m, MemoryPlacement::Suffix}).rows() == m, "mem-tok" + tag);

        const auto prot = pick(rng, 0, m - 1);
        std::vector<std::size_t> rows(prot);
        std::iota(rows.begin(), rows.end(), std::size_t{0});
        c.expect(h_pool(z, Budget{m, prot}, rows).rows() == m, "h-pool" + tag);

        const auto att = mvtest::random_attention(rng, "d", static_cast<std::uint32_t>(n));
        AgcConfig cfg;
        cfg.m = m;
        cfg.variant.selection = pick(rng, 0, 1) ? Selection::Attention : Selection::Random;
        cfg.variant.aggregation = pick(rng, 0, 1) ? Aggregation::Weighted : Aggregation::Unweighted;
        cfg.variant.clustering = pick(rng, 0, 1) == 1;
        cfg.variant.seed = i;
        c.expect(agc_compress(z, att, cfg).rows() == m, "agc" + tag);
    }

    // Same guarantee through the corpus-level driver.
    auto corpus = mvtest::random_corpus(rng, 50, 8, 40, 6);
    std::vector<AttentionSidecar> atts;
    for (const auto& d : corpus.docs()) {
        atts.push_back(mvtest::random_attention(rng, d.doc_id, static_cast<std::uint32_t>(d.embeddings.rows())));
    }
    for (Method method : {Method::MemTok, Method::HPool, Method::Agc}) {
        CompressOptions opts;
        opts.method = method;
        opts.budget = 8;
        const auto out = compress_corpus(corpus, opts, &atts);
        c.expect(out.failures.empty(), std::string(method_name(method)) + " reported failures");
        for (const auto& d : out.corpus.docs()) {
            c.expect(d.embeddings.rows() == 8, std::string(method_name(method)) + " corpus row count");
        }
    }
    return c;
}

// ---------------------------------------------------------------- criterion 5

std::vector<std::size_t> oracle_top_m(const std::vector<double>& alpha, std::size_t m) {
    std::vector<std::size_t> idx(alpha.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return alpha[a] > alpha[b]; });
    idx.resize(m);
    std::sort(idx.begin(), idx.end());
    return idx;
}

Check criterion_agc() {
    Check c;
    Rng rng(5005);
    for (int i = 0; i < 400; ++i) {
        const auto n = pick(rng, 1, 40);
        const auto m = pick(rng, 1, n);
        const auto h = pick(rng, 1, 16);
        const auto z = random_matrix(rng, n, h);
        auto att = mvtest::random_attention(rng, "doc" + std::to_string(i), static_cast<std::uint32_t>(n));
        if (i % 4 == 1) {
            // Heavy ties: weights from {0, 0.5, 1}.
            for (auto& w : att.weights) w = 0.5f * static_cast<float>(pick(rng, 0, 2));
        }
        if (i % 4 == 2) {
            // A zero-mass cluster is possible.
            for (std::size_t j = 0; j < att.weights.size(); ++j) {
                if ((j % n) % 3 == 0) att.weights[j] = 0.0f;
            }
        }
        const std::string tag = " (case " + std::to_string(i) + ")";

        AgcConfig cfg;
        cfg.m = m;
        const auto res = agc_run(z, att, cfg);
        const auto& alpha = res.alpha.alpha;

        // Top-m with ties to the lower index, ascending output; repeatable.
        c.expect(res.centroid_indices == oracle_top_m(alpha, m), "top-m selection" + tag);
        c.expect(agc_run(z, att, cfg).compressed == res.compressed, "rerun differs" + tag);

        c.expect(res.partition.has_value(), "no partition" + tag);
        if (!res.partition) continue;
        const auto& p = *res.partition;
        c.expect(p.k == m && p.sizes.size() == m, "cluster count" + tag);
        std::vector<std::size_t> sizes(m, 0);
        for (auto a : p.assignments) {
            if (a < m) ++sizes[a];
        }
        c.expect(sizes == p.sizes, "sizes disagree with assignments" + tag);
        c.expect(std::all_of(sizes.begin(), sizes.end(), [](std::size_t s) { return s > 0; }), "empty cluster" + tag);
        for (std::size_t k = 0; k < m; ++k) {
            c.expect(p.assignments[res.centroid_indices[k]] == k, "centroid not self-assigned" + tag);
        }
        // Every non-centroid token sits with a centroid of maximal cosine, lowest on ties.
        std::set<std::size_t> cents(res.centroid_indices.begin(), res.centroid_indices.end());
        for (std::size_t j = 0; j < n; ++j) {
            if (cents.count(j)) continue;
            std::size_t best = 0;
            double best_cos = -2.0;
            for (std::size_t k = 0; k < m; ++k) {
                const auto& a = z.row(j);
                const auto& b = z.row(res.centroid_indices[k]);
                double ab = 0, aa = 0, bb = 0;
                for (std::size_t t = 0; t < h; ++t) {
                    ab += double(a[t]) * b[t];
                    aa += double(a[t]) * a[t];
                    bb += double(b[t]) * b[t];
                }
                const double cs = (aa == 0 || bb == 0) ? 0.0 : ab / (std::sqrt(aa) * std::sqrt(bb));
                if (cs > best_cos) {
                    best_cos = cs;
                    best = k;
                }
            }
            c.expect(p.assignments[j] == best, "token " + std::to_string(j) + " not at its best centroid" + tag);
        }

        // Weighted output rows are convex combinations of their members.
        for (std::size_t k = 0; k < m; ++k) {
            std::vector<std::size_t> members;
            for (std::size_t j = 0; j < n; ++j) {
                if (p.assignments[j] == k) members.push_back(j);
            }
            double mass = 0;
            for (auto j : members) mass += alpha[j];
            std::vector<double> coef;
            for (auto j : members) coef.push_back(mass > 0 ? alpha[j] / mass : 1.0 / members.size());
            const double sum = std::accumulate(coef.begin(), coef.end(), 0.0);
            c.expect(std::all_of(coef.begin(), coef.end(), [](double w) { return w >= 0; }), "negative coef" + tag);
            c.expect(std::abs(sum - 1.0) <= 1e-9, "coefficients do not sum to 1" + tag);
            for (std::size_t t = 0; t < h; ++t) {
                double v = 0, lo = 1e300, hi = -1e300;
                for (std::size_t a = 0; a < members.size(); ++a) {
                    const double x = z.row(members[a])[t];
                    v += coef[a] * x;
                    lo = std::min(lo, x);
                    hi = std::max(hi, x);
                }
                const double got = res.compressed.row(k)[t];
                c.expect(std::abs(got - v) <= 1e-6, "weighted row is not the convex combination" + tag);
                c.expect(got >= static_cast<float>(lo) && got <= static_cast<float>(hi), "row outside hull" + tag);
            }
        }

        // Unweighted: plain cluster means.
        AgcConfig plain = cfg;
        plain.variant.aggregation = Aggregation::Unweighted;
        const auto unw = agc_run(z, att, plain);
        c.expect(unw.partition == res.partition, "unweighted changes partition" + tag);
        for (std::size_t k = 0; k < m; ++k) {
            for (std::size_t t = 0; t < h; ++t) {
                double s = 0;
                for (std::size_t j = 0; j < n; ++j) {
                    if (p.assignments[j] == k) s += z.row(j)[t];
                }
                c.expect(unw.compressed.row(k)[t] == static_cast<float>(s / p.sizes[k]), "unweighted mean" + tag);
            }
        }

        // Clustering off: exactly the selected rows, for both selection rules.
        for (Selection sel : {Selection::Attention, Selection::Random}) {
            AgcConfig off = cfg;
            off.variant.clustering = false;
            off.variant.selection = sel;
            off.variant.seed = 99;
            const auto r = agc_run(z, att, off);
            c.expect(!r.partition.has_value(), "partition with clustering off" + tag);
            std::vector<float> rows;
            for (auto j : r.centroid_indices) rows.insert(rows.end(), z.row(j).begin(), z.row(j).end());
            c.expect(r.compressed == EmbeddingMatrix(m, h, rows), "clustering off is not the selected rows" + tag);
            c.expect(std::is_sorted(r.centroid_indices.begin(), r.centroid_indices.end()) &&
                         std::adjacent_find(r.centroid_indices.begin(), r.centroid_indices.end()) ==
                             r.centroid_indices.end(),
                     "selected indices not strictly ascending" + tag);
        }
    }
    return c;
}

// ---------------------------------------------------------------- criterion 6

struct E2EResult {
    std::map<std::string, double> recall;
    std::string bytes; // compressed corpora and runs, for the thread check
};

double r_at_1(const FlatIndex& index, const SynthData& data, std::size_t threads, std::string& bytes) {
    SearchOptions opts;
    opts.k = 1;
    opts.threads = threads;
    const auto out = search_all(index, data.queries, opts);
    bytes += format_run(out.run);
    return recall_at_k(out.run, data.qrels, 1);
}

E2EResult synthetic_e2e(std::size_t threads) {
    E2EResult res;
    SynthSpec spec;
    spec.doc_count = 200;
    spec.concepts = 4;
    spec.redundancy = 50;
    spec.sigma = 0.05;
    spec.dim = 64;
    spec.seed = 6006;
    const auto data = generate_synthetic(spec);

    for (Method method : {Method::Agc, Method::HPool}) {
        for (std::size_t m : {8, 4}) {
            CompressOptions opts;
            opts.method = method;
            opts.budget = m;
            opts.threads = threads;
            const auto out = compress_corpus(data.corpus, opts, &data.attention);
            if (!out.failures.empty()) fail(ErrorKind::Computation, "compression failed: " + out.failures[0].message);
            res.bytes += encode_mvec(out.corpus);
            const auto index = FlatIndex::build(out.corpus, out.meta);
            res.recall[std::string(method_name(method)) + "@" + std::to_string(m)] =
                r_at_1(index, data, threads, res.bytes);
        }
    }

    spec.sigma = 0.0;
    const auto clean = generate_synthetic(spec);
    res.recall["uncompressed sigma=0"] = r_at_1(FlatIndex::build(clean.corpus), clean, threads, res.bytes);
    return res;
}

Check criterion_synthetic(double& elapsed, std::string& summary) {
    Check c;
    const auto t0 = Clock::now();
    const auto res = synthetic_e2e(1);
    elapsed = seconds_since(t0);
    for (const auto& [name, r] : res.recall) {
        summary += " " + name + "=" + printed(r, 3);
        double need = 0.90;
        if (name.find("@8") != std::string::npos) need = 0.95;
        if (name.find("uncompressed") != std::string::npos) need = 1.0;
        c.expect(r >= need, name + " R@1 " + printed(r, 3) + " < " + printed(need, 2));
    }
    c.expect(res.recall.size() == 5, "missing runs");
    c.expect(elapsed < 60.0, "took " + std::to_string(elapsed) + " s");
    return c;
}

// ---------------------------------------------------------------- criterion 7

struct RandomEval {
    RunList run;
    Qrels qrels;
};

RandomEval random_eval(Rng& rng) {
    RandomEval e;
    const auto queries = pick(rng, 1, 6);
    for (std::size_t q = 0; q < queries; ++q) {
        const std::string qid = "q" + std::to_string(q);
        std::vector<std::string> docs;
        for (int d = 0; d < 15; ++d) docs.push_back("d" + std::to_string(d));
        std::shuffle(docs.begin(), docs.end(), rng);
        if (pick(rng, 0, 5) > 0) {
            QueryRanking qr{qid, {}};
            const auto len = pick(rng, 1, docs.size());
            for (std::size_t r = 0; r < len; ++r) qr.results.push_back({docs[r], r + 1, double(len - r)});
            e.run.queries.push_back(qr);
        }
        std::shuffle(docs.begin(), docs.end(), rng);
        const auto judged = pick(rng, 0, 6);
        for (std::size_t j = 0; j < judged; ++j) e.qrels.add(qid, docs[j], static_cast<int>(pick(rng, 0, 3)));
    }
    bool judged = false;
    for (const auto& [doc, grade] : e.qrels.judged("q0")) judged = judged || doc == "d0";
    if (!judged && (e.qrels.empty() || pick(rng, 0, 1))) e.qrels.add("q0", "d0", 1);
    return e;
}

std::set<std::string> eval_queries(const RandomEval& e) {
    std::set<std::string> ids(e.qrels.query_ids().begin(), e.qrels.query_ids().end());
    for (const auto& q : e.run.queries) ids.insert(q.query_id);
    return ids;
}

std::vector<std::string> ranked_docs(const RandomEval& e, const std::string& qid) {
    std::vector<std::string> out;
    for (const auto& q : e.run.queries) {
        if (q.query_id == qid) {
            for (const auto& r : q.results) out.push_back(r.doc_id);
        }
    }
    return out;
}

double oracle_recall(const RandomEval& e, std::size_t k) {
    double total = 0;
    int counted = 0;
    for (const auto& qid : e.qrels.query_ids()) {
        std::set<std::string> rel;
        for (const auto& en : e.qrels.entries()) {
            if (en.query_id == qid && en.grade >= 1) rel.insert(en.doc_id);
        }
        if (rel.empty()) continue;
        const auto docs = ranked_docs(e, qid);
        std::size_t hit = 0;
        for (std::size_t r = 0; r < std::min(k, docs.size()); ++r) hit += rel.count(docs[r]);
        total += double(hit) / double(rel.size());
        ++counted;
    }
    return counted ? total / counted : -1.0;
}

double oracle_ndcg(const RandomEval& e, std::size_t k) {
    const auto ids = eval_queries(e);
    double total = 0;
    for (const auto& qid : ids) {
        std::map<std::string, int> g;
        std::vector<int> grades;
        for (const auto& en : e.qrels.entries()) {
            if (en.query_id == qid) {
                g[en.doc_id] = en.grade;
                grades.push_back(en.grade);
            }
        }
        const auto docs = ranked_docs(e, qid);
        double dcg = 0, idcg = 0;
        for (std::size_t r = 0; r < std::min(k, docs.size()); ++r) {
            dcg += (g.count(docs[r]) ? g[docs[r]] : 0) / std::log2(double(r) + 2.0);
        }
        std::sort(grades.rbegin(), grades.rend());
        for (std::size_t r = 0; r < std::min(k, grades.size()); ++r) idcg += grades[r] / std::log2(double(r) + 2.0);
        total += idcg > 0 ? dcg / idcg : 0.0;
    }
    return total / double(ids.size());
}

double oracle_mrr(const RandomEval& e) {
    const auto ids = eval_queries(e);
    double total = 0;
    for (const auto& qid : ids) {
        const auto docs = ranked_docs(e, qid);
        for (std::size_t r = 0; r < docs.size(); ++r) {
            if (e.qrels.grade(qid, docs[r]) >= 1) {
                total += 1.0 / double(r + 1);
                break;
            }
        }
    }
    return total / double(ids.size());
}

std::vector<double> random_samples(Rng& rng, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = std::uniform_real_distribution<double>(lo, hi)(rng);
    return v;
}

double oracle_cv(const std::vector<double>& x) {
    double mu = 0;
    for (double v : x) mu += v;
    mu /= double(x.size());
    double var = 0;
    for (double v : x) var += (v - mu) * (v - mu);
    var /= double(x.size());
    return std::sqrt(var) / std::abs(mu) * 100.0;
}

double oracle_gini(std::vector<double> x) {
    std::sort(x.begin(), x.end());
    double num = 0, den = 0;
    const double n = double(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += double(i + 1) * x[i];
        den += x[i];
    }
    if (den == 0) return 0.0;
    return 2.0 * num / (n * den) - (n + 1.0) / n;
}

double oracle_pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        syy += y[i] * y[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

bool close(double a, double b, double tol = 1e-9) {
    return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

Check criterion_metrics() {
    Check c;
    Rng rng(7007);
    for (int i = 0; i < 100; ++i) {
        const auto e = random_eval(rng);
        const std::string tag = " (case " + std::to_string(i) + ")";
        for (std::size_t k : {1, 3, 10}) {
            const double want = oracle_recall(e, k);
            if (want < 0) {
                bool threw = false;
                try {
                    recall_at_k(e.run, e.qrels, k);
                } catch (const Error& err) {
                    threw = err.kind() == ErrorKind::Evaluation;
                }
                c.expect(threw, "recall without relevant docs must fail" + tag);
            } else {
                c.expect(close(recall_at_k(e.run, e.qrels, k), want), "recall@" + std::to_string(k) + tag);
            }
            c.expect(close(ndcg_at_k(e.run, e.qrels, k), oracle_ndcg(e, k)), "ndcg@" + std::to_string(k) + tag);
        }
        c.expect(close(mrr(e.run, e.qrels), oracle_mrr(e)), "mrr" + tag);

        const double score = std::uniform_real_distribution<double>(0.0, 100.0)(rng);
        const double base = std::uniform_real_distribution<double>(0.1, 100.0)(rng);
        c.expect(close(percent_of_baseline_raw(score, base), 100.0 * score / base), "percent of baseline" + tag);
        const double m = double(pick(rng, 1, 256));
        const double avg = std::uniform_real_distribution<double>(m, 4000.0)(rng);
        c.expect(std::abs(compression_ratio(m, avg) - (1.0 - m / avg)) <= 0.5e-4 + 1e-12, "compression ratio" + tag);

        const auto x = random_samples(rng, pick(rng, 2, 40), 0.0, 5.0);
        const auto y = random_samples(rng, x.size(), -3.0, 3.0);
        c.expect(close(cv(x), oracle_cv(x)), "cv" + tag);
        c.expect(close(gini(x), oracle_gini(x)), "gini" + tag);
        c.expect(close(pearson(x, y), oracle_pearson(x, y)), "pearson" + tag);

        // Matching strength and utilization against direct counting.
        std::vector<MatchRecord> recs;
        const auto doc_len = pick(rng, 1, 10);
        const auto nrec = pick(rng, 0, 30);
        for (std::size_t r = 0; r < nrec; ++r) {
            recs.push_back({"q" + std::to_string(pick(rng, 0, 2)), pick(rng, 0, 4), "d" + std::to_string(pick(rng, 0, 3)),
                            pick(rng, 0, doc_len - 1), std::uniform_real_distribution<double>(-1, 1)(rng)});
        }
        const auto strength = matching_strength(recs, doc_len);
        for (std::size_t j = 0; j < doc_len; ++j) {
            double s = 0;
            for (const auto& r : recs) {
                if (r.doc_pos == j) s += r.similarity;
            }
            c.expect(close(strength[j], recs.empty() ? 0.0 : s / double(recs.size())), "matching strength" + tag);
        }
        Corpus corpus(2);
        for (int d = 0; d < 4; ++d) corpus.add("d" + std::to_string(d), EmbeddingMatrix::zeros(doc_len, 2));
        const auto index = FlatIndex::build(corpus);
        std::set<std::pair<std::string, std::size_t>> distinct;
        for (const auto& r : recs) distinct.insert({r.doc_id, r.doc_pos});
        c.expect(close(utilization_fraction(recs, index), double(distinct.size()) / double(4 * doc_len)),
                 "utilization" + tag);
    }

    c.expect(gini(std::vector<double>{0, 1}) == 0.5, "gini([0,1]) != 0.5");
    c.expect(close(cv(std::vector<double>{0, 2}), 100.0), "cv([0,2]) != 100");
    RunList run;
    run.queries.push_back({"q", {{"x", 1, 2.0}, {"y", 2, 1.0}}});
    Qrels qrels;
    qrels.add("q", "y", 1);
    c.expect(close(ndcg_at_k(run, qrels, 2), 1.0 / std::log2(3.0)), "nDCG rank-2 != 1/log2(3)");
    return c;
}

// ---------------------------------------------------------------- criterion 8

Check criterion_evenness() {
    Check c;
    Rng rng(8008);
    for (int i = 0; i < 300; ++i) {
        const auto n = pick(rng, 1, 50);
        auto x = random_samples(rng, n, 0.0, 10.0);
        if (i % 5 == 0) x[pick(rng, 0, n - 1)] = 0.0;
        const double lambda = std::uniform_real_distribution<double>(0.01, 100.0)(rng);
        std::vector<double> scaled;
        for (double v : x) scaled.push_back(lambda * v);
        const std::string tag = " (case " + std::to_string(i) + ")";

        const double g = gini(x);
        c.expect(g >= -1e-12 && g <= double(n - 1) / double(n) + 1e-12, "gini out of [0,(n-1)/n]" + tag);
        c.expect(std::abs(gini(scaled) - g) <= 1e-9, "gini not scale invariant" + tag);
        if (std::accumulate(x.begin(), x.end(), 0.0) > 0) {
            c.expect(std::abs(cv(scaled) - cv(x)) <= 1e-9 * std::max(1.0, cv(x)), "cv not scale invariant" + tag);
        }

        // One nonzero sample reaches the upper bound.
        std::vector<double> spike(n, 0.0);
        spike[pick(rng, 0, n - 1)] = lambda;
        c.expect(std::abs(gini(spike) - double(n - 1) / double(n)) <= 1e-12, "gini spike bound" + tag);

        std::vector<MatchRecord> recs;
        const auto doc_len = pick(rng, 1, 12);
        double sum = 0;
        const auto nrec = pick(rng, 1, 40);
        for (std::size_t r = 0; r < nrec; ++r) {
            const double sim = std::uniform_real_distribution<double>(-1, 2)(rng);
            sum += sim;
            recs.push_back({"q" + std::to_string(pick(rng, 0, 3)), pick(rng, 0, 5), "d", pick(rng, 0, doc_len - 1), sim});
        }
        const auto s = matching_strength(recs, doc_len);
        const double total = std::accumulate(s.begin(), s.end(), 0.0);
        c.expect(std::abs(total - sum / double(nrec)) <= 1e-9, "strength not conserved" + tag);
    }
    return c;
}

// ---------------------------------------------------------------- criterion 9

template <typename Fn>
bool rejects(Fn&& fn, ErrorKind kind, const std::string& needle) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind() == kind && std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
}

std::string random_id(Rng& rng, const std::string& prefix) {
    static const std::string alphabet = "abcdefghijklmnopqrstuvwxyz0123456789_-.:/";
    std::string s = prefix;
    const auto len = pick(rng, 0, 12);
    for (std::size_t i = 0; i < len; ++i) s += alphabet[pick(rng, 0, alphabet.size() - 1)];
    return s;
}

Check criterion_formats() {
    Check c;
    Rng rng(9009);
    for (int i = 0; i < 100; ++i) {
        const std::string tag = " (case " + std::to_string(i) + ")";
        const auto dim = pick(rng, 1, 9);
        Corpus corpus(dim);
        const auto docs = pick(rng, 0, 8);
        for (std::size_t d = 0; d < docs; ++d) {
            corpus.add(random_id(rng, "d" + std::to_string(d) + "_"), random_matrix(rng, pick(rng, 0, 6), dim, -1e3f, 1e3f));
        }
        const auto mvec = encode_mvec(corpus);
        c.expect(decode_mvec(mvec) == corpus, "MVEC read(write(x)) != x" + tag);
        c.expect(encode_mvec(decode_mvec(mvec)) == mvec, "MVEC write(read(b)) != b" + tag);

        std::vector<AttentionSidecar> atts;
        for (const auto& d : corpus.docs()) {
            atts.push_back(mvtest::random_attention(rng, d.doc_id, static_cast<std::uint32_t>(d.embeddings.rows()),
                                                    static_cast<std::uint32_t>(pick(rng, 1, 3)),
                                                    static_cast<std::uint32_t>(pick(rng, 1, 3))));
        }
        const auto matt = encode_attention(atts);
        c.expect(decode_attention(matt) == atts, "MATT read(write(x)) != x" + tag);
        c.expect(encode_attention(decode_attention(matt)) == matt, "MATT write(read(b)) != b" + tag);

        ResizeWeights w;
        w.n0 = pick(rng, 1, 10);
        w.d = pick(rng, 1, 6);
        w.m = pick(rng, 1, 6);
        for (std::size_t j = 0; j < w.n0 * w.d; ++j) w.w1.push_back(mvtest::uniform(rng, -2, 2));
        for (std::size_t j = 0; j < w.m * w.d; ++j) w.w2.push_back(mvtest::uniform(rng, -2, 2));
        const auto mrsz = encode_resize_weights(w);
        c.expect(decode_resize_weights(mrsz) == w, "MRSZ read(write(x)) != x" + tag);
        c.expect(encode_resize_weights(decode_resize_weights(mrsz)) == mrsz, "MRSZ write(read(b)) != b" + tag);

        std::vector<MatchRecord> recs;
        for (std::size_t r = 0, nr = pick(rng, 0, 10); r < nr; ++r) {
            recs.push_back({random_id(rng, "q\"\\"), pick(rng, 0, 100), random_id(rng, "d"), pick(rng, 0, 100),
                            std::uniform_real_distribution<double>(-1e3, 1e3)(rng)});
        }
        const auto log = format_match_log(recs);
        c.expect(parse_match_log(log) == recs, "match log read(write(x)) != x" + tag);
        c.expect(format_match_log(parse_match_log(log)) == log, "match log write(read(t)) != t" + tag);

        RunList run;
        run.tag = random_id(rng, "tag");
        for (std::size_t q = 0, nq = pick(rng, 0, 4); q < nq; ++q) {
            QueryRanking qr{"q" + std::to_string(q) + random_id(rng, "_"), {}};
            for (std::size_t r = 0, nr = pick(rng, 1, 6); r < nr; ++r) {
                const double score = double(static_cast<std::int64_t>(pick(rng, 0, 2000000)) - 1000000) / 1e6;
                qr.results.push_back({"d" + std::to_string(r) + random_id(rng, "_"), r + 1, score});
            }
            run.queries.push_back(qr);
        }
        const auto run_text = format_run(run);
        const auto parsed_run = parse_run(run_text);
        c.expect(run.queries.empty() || parsed_run == run, "run read(write(x)) != x" + tag);
        c.expect(format_run(parsed_run) == run_text, "run write(read(t)) != t" + tag);

        Qrels qrels;
        for (std::size_t e = 0, ne = pick(rng, 0, 8); e < ne; ++e) {
            qrels.add("q" + std::to_string(pick(rng, 0, 3)), "d" + std::to_string(e), static_cast<int>(pick(rng, 0, 4)));
        }
        const auto qrels_text = format_qrels(qrels);
        c.expect(parse_qrels(qrels_text) == qrels, "qrels read(write(x)) != x" + tag);
        c.expect(format_qrels(parse_qrels(qrels_text)) == qrels_text, "qrels write(read(t)) != t" + tag);

        // Malformed inputs: every strict prefix of a nonempty encoding and any trailing byte.
        if (mvec.size() > 20) {
            const auto cut = pick(rng, 4, mvec.size() - 1);
            c.expect(rejects([&] { decode_mvec(std::string_view(mvec).substr(0, cut)); }, ErrorKind::Corruption,
                             "offset"),
                     "truncated MVEC not rejected with an offset" + tag);
        }
        c.expect(rejects([&] { decode_mvec(mvec + "x"); }, ErrorKind::Corruption, "offset"),
                 "MVEC trailing byte not rejected" + tag);
        c.expect(rejects([&] { decode_attention(matt.substr(0, matt.size() - 1)); }, ErrorKind::Corruption, "offset"),
                 "truncated MATT not rejected" + tag);
        c.expect(rejects([&] { decode_resize_weights(mrsz.substr(0, mrsz.size() - 1)); }, ErrorKind::Corruption,
                         "offset"),
                 "truncated MRSZ not rejected" + tag);
    }

    c.expect(rejects([] { decode_mvec("MVEX\1\0\0\0\1\0\0\0\0\0\0\0\0\0\0\0"); }, ErrorKind::Format, "magic"),
             "bad MVEC magic accepted");
    c.expect(rejects([] { decode_attention(std::string("MATT\2\0\0\0\0\0\0\0\0\0\0\0", 16)); }, ErrorKind::Format,
                     "version"),
             "bad MATT version accepted");
    c.expect(rejects([] { parse_run("q1 Q0 d1 1 0.5 t\nq1 Q0 d2\n"); }, ErrorKind::Parse, "line 2"),
             "3-field run line not located");
    c.expect(rejects([] { parse_qrels("q1 0 d1 1\nq1 0 d2 x\n"); }, ErrorKind::Parse, "line 2"),
             "bad qrels grade not located");
    c.expect(rejects([] { parse_qrels("q1 0 d1\n"); }, ErrorKind::Parse, "line 1"), "3-field qrels not located");
    c.expect(rejects([] { parse_match_log("{\"qid\":\"q\",\"qpos\":0,\"did\":\"d\",\"dpos\":0,\"sim\":1}\n{oops\n"); },
                     ErrorKind::Parse, "line 2"),
             "bad match log line not located");
    c.expect(rejects([] { parse_match_log("{\"qid\":\"q\",\"qpos\":-1,\"did\":\"d\",\"dpos\":0,\"sim\":1}\n"); },
                     ErrorKind::Parse, "line 1"),
             "negative match position accepted");
    return c;
}

// ---------------------------------------------------------------- criterion 10

Check criterion_threads(std::string& summary) {
    Check c;
    const auto ward_inst = ward_instances(300, 1001);
    const auto cases = search_cases(100, 2002);
    Rng rng(10010);
    const auto corpus = mvtest::random_corpus(rng, 120, 8, 30, 8);
    std::string ward_ref, search_ref, e2e_ref;
    for (std::size_t threads : {1, 2, 8}) {
        CompressOptions opts;
        opts.method = Method::HPool;
        opts.budget = 6;
        opts.protected_count = 1;
        opts.threads = threads;
        const auto pool = encode_mvec(compress_corpus(corpus, opts).corpus);
        const auto ward = ward_output(ward_inst, threads) + pool;
        const auto srch = search_output(cases, threads);
        const auto e2e = synthetic_e2e(threads).bytes;
        if (threads == 1) {
            ward_ref = ward;
            search_ref = srch;
            e2e_ref = e2e;
            summary = " ward " + hex_bytes(ward) + "; search " + hex_bytes(srch) + "; e2e " + hex_bytes(e2e);
            continue;
        }
        const auto t = std::to_string(threads);
        c.expect(ward == ward_ref, "criterion 1 output differs at " + t + " threads");
        c.expect(srch == search_ref, "criterion 2 output differs at " + t + " threads");
        c.expect(e2e == e2e_ref, "criterion 6 output differs at " + t + " threads");
    }
    return c;
}

int report(int number, const std::string& name, const std::function<Check(std::string&)>& run) {
    std::string note;
    Check c;
    try {
        c = run(note);
    } catch (const std::exception& e) {
        c.ok = false;
        c.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %d: %s%s%s\n", c.ok ? "PASS" : "FAIL", number, name.c_str(), note.c_str(),
                c.ok ? "" : (" -- " + c.detail).c_str());
    std::fflush(stdout);
    return c.ok ? 0 : 1;
}

std::string timing(double s) {
    return " (" + printed(s, 2) + " s)";
}

} // namespace

int main() {
    int failed = 0;
    failed += report(1, "Ward oracle equivalence", [](std::string& note) {
        double t = 0;
        auto c = criterion_ward(t);
        note = timing(t);
        return c;
    });
    failed += report(2, "MaxSim kernel equivalence", [](std::string& note) {
        double t = 0;
        auto c = criterion_maxsim(t);
        note = timing(t);
        return c;
    });
    failed += report(3, "compression-ratio and percent-of-baseline arithmetic",
                     [](std::string&) { return criterion_arithmetic(); });
    failed += report(4, "constant budget", [](std::string&) { return criterion_budget(); });
    failed += report(5, "AGC structural suite", [](std::string&) { return criterion_agc(); });
    failed += report(6, "synthetic end-to-end", [](std::string& note) {
        double t = 0;
        std::string summary;
        auto c = criterion_synthetic(t, summary);
        note = timing(t) + summary;
        return c;
    });
    failed += report(7, "metric formulas", [](std::string&) { return criterion_metrics(); });
    failed += report(8, "evenness invariants", [](std::string&) { return criterion_evenness(); });
    failed += report(9, "format round trips", [](std::string&) { return criterion_formats(); });
    failed += report(10, "determinism at 1, 2, 8 threads", [](std::string& note) {
        auto c = criterion_threads(note);
        return c;
    });
    return failed;
}
