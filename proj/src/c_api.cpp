#include "mvpress/mvpress.h"

#include "mvpress/analysis.hpp"
#include "mvpress/compress.hpp"
#include "mvpress/error.hpp"
#include "mvpress/index.hpp"
#include "mvpress/io.hpp"
#include "mvpress/metrics.hpp"
#include "mvpress/parallel.hpp"
#include "mvpress/parametric.hpp"
#include "mvpress/synth.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>

struct mvp_corpus {
    mvpress::Corpus corpus;
};

struct mvp_attention {
    std::vector<mvpress::AttentionSidecar> sidecars;
};

struct mvp_weights {
    mvpress::ResizeWeights weights;
};

struct mvp_index {
    std::optional<mvpress::FlatIndex> index;
    std::string meta_json;
};

struct mvp_run {
    mvpress::RunList run;
};

struct mvp_qrels {
    mvpress::Qrels qrels;
};

struct mvp_matches {
    std::vector<mvpress::MatchRecord> records;
};

namespace {

thread_local std::string g_last_error;

mvp_status to_status(mvpress::ErrorKind kind) {
    using mvpress::ErrorKind;
    switch (kind) {
    case ErrorKind::Format: return MVP_ERR_FORMAT;
    case ErrorKind::Corruption: return MVP_ERR_CORRUPTION;
    case ErrorKind::Validation: return MVP_ERR_VALIDATION;
    case ErrorKind::Consistency: return MVP_ERR_CONSISTENCY;
    case ErrorKind::Contract: return MVP_ERR_CONTRACT;
    case ErrorKind::Io: return MVP_ERR_IO;
    case ErrorKind::Parse: return MVP_ERR_PARSE;
    case ErrorKind::Evaluation: return MVP_ERR_EVALUATION;
    case ErrorKind::Query: return MVP_ERR_QUERY;
    case ErrorKind::Build: return MVP_ERR_BUILD;
    case ErrorKind::Computation: return MVP_ERR_COMPUTATION;
    }
    return MVP_ERR_INTERNAL;
}

mvp_status set_error(mvp_status status, std::string message) {
    g_last_error = std::move(message);
    return status;
}

template <typename Fn>
mvp_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const mvpress::Error& e) {
        return set_error(to_status(e.kind()), e.what());
    } catch (const std::bad_alloc&) {
        return set_error(MVP_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return set_error(MVP_ERR_INTERNAL, e.what());
    } catch (...) {
        return set_error(MVP_ERR_INTERNAL, "unknown exception");
    }
}

#define MVP_REQUIRE_ARG(cond) \
    do { \
        if (!(cond)) return set_error(MVP_ERR_INVALID_ARGUMENT, "invalid argument: " #cond); \
    } while (0)

std::size_t resolve_threads(std::uint32_t threads) {
    return threads == 0 ? mvpress::default_threads() : threads;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

mvpress::Corpus normalized_copy(const mvpress::Corpus& corpus) {
    mvpress::Corpus out(corpus.dim());
    for (const auto& doc : corpus.docs()) {
        out.add(doc.doc_id, doc.embeddings.normalized());
    }
    return out;
}

} // namespace

extern "C" {

const char* mvp_version(void) {
    return "0.1.0";
}

const char* mvp_status_name(mvp_status status) {
    switch (status) {
    case MVP_OK: return "ok";
    case MVP_ERR_FORMAT: return "format error";
    case MVP_ERR_CORRUPTION: return "corruption error";
    case MVP_ERR_VALIDATION: return "validation error";
    case MVP_ERR_CONSISTENCY: return "consistency error";
    case MVP_ERR_CONTRACT: return "contract error";
    case MVP_ERR_IO: return "I/O error";
    case MVP_ERR_PARSE: return "parse error";
    case MVP_ERR_EVALUATION: return "evaluation error";
    case MVP_ERR_QUERY: return "query error";
    case MVP_ERR_BUILD: return "build error";
    case MVP_ERR_COMPUTATION: return "computation error";
    case MVP_ERR_INVALID_ARGUMENT: return "invalid argument";
    case MVP_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* mvp_last_error(void) {
    return g_last_error.c_str();
}

void mvp_string_free(char* s) {
    std::free(s);
}

/* corpora */

mvp_status mvp_corpus_create(uint32_t dim, mvp_corpus** out) {
    MVP_REQUIRE_ARG(out != nullptr);
    return guarded([&] {
        *out = new mvp_corpus{mvpress::Corpus(dim)};
        return MVP_OK;
    });
}

mvp_status mvp_corpus_add(mvp_corpus* corpus, const char* doc_id, const float* data, uint32_t rows) {
    MVP_REQUIRE_ARG(corpus != nullptr && doc_id != nullptr);
    MVP_REQUIRE_ARG(rows == 0 || data != nullptr);
    return guarded([&] {
        const std::size_t dim = corpus->corpus.dim();
        std::vector<float> values(data, data + static_cast<std::size_t>(rows) * dim);
        corpus->corpus.add(doc_id, mvpress::EmbeddingMatrix(rows, dim, std::move(values)));
        return MVP_OK;
    });
}

mvp_status mvp_corpus_read(const char* path, mvp_corpus** out) {
    MVP_REQUIRE_ARG(path != nullptr && out != nullptr);
    return guarded([&] {
        *out = new mvp_corpus{mvpress::read_mvec(path)};
        return MVP_OK;
    });
}

mvp_status mvp_corpus_write(const mvp_corpus* corpus, const char* path) {
    MVP_REQUIRE_ARG(corpus != nullptr && path != nullptr);
    return guarded([&] {
        mvpress::write_mvec(corpus->corpus, path);
        return MVP_OK;
    });
}

void mvp_corpus_free(mvp_corpus* corpus) {
    delete corpus;
}

size_t mvp_corpus_size(const mvp_corpus* corpus) {
    return corpus ? corpus->corpus.size() : 0;
}

uint32_t mvp_corpus_dim(const mvp_corpus* corpus) {
    return corpus ? static_cast<uint32_t>(corpus->corpus.dim()) : 0;
}

mvp_status mvp_corpus_doc(const mvp_corpus* corpus, size_t i, const char** doc_id, const float** data,
                          uint32_t* rows) {
    MVP_REQUIRE_ARG(corpus != nullptr && i < corpus->corpus.size());
    const auto& doc = corpus->corpus[i];
    if (doc_id) *doc_id = doc.doc_id.c_str();
    if (data) *data = doc.embeddings.values().data();
    if (rows) *rows = static_cast<uint32_t>(doc.embeddings.rows());
    return MVP_OK;
}

mvp_status mvp_corpus_normalize(mvp_corpus* corpus) {
    MVP_REQUIRE_ARG(corpus != nullptr);
    return guarded([&] {
        corpus->corpus = normalized_copy(corpus->corpus);
        return MVP_OK;
    });
}

/* attention and weights */

mvp_status mvp_attention_read(const char* path, mvp_attention** out) {
    MVP_REQUIRE_ARG(path != nullptr && out != nullptr);
    return guarded([&] {
        *out = new mvp_attention{mvpress::read_attention(path)};
        return MVP_OK;
    });
}

mvp_status mvp_attention_write(const mvp_attention* attention, const char* path) {
    MVP_REQUIRE_ARG(attention != nullptr && path != nullptr);
    return guarded([&] {
        mvpress::write_attention(attention->sidecars, path);
        return MVP_OK;
    });
}

void mvp_attention_free(mvp_attention* attention) {
    delete attention;
}

size_t mvp_attention_size(const mvp_attention* attention) {
    return attention ? attention->sidecars.size() : 0;
}

mvp_status mvp_attention_check(const mvp_attention* attention, const mvp_corpus* corpus) {
    MVP_REQUIRE_ARG(attention != nullptr && corpus != nullptr);
    return guarded([&] {
        mvpress::check_attention(attention->sidecars, corpus->corpus);
        return MVP_OK;
    });
}

mvp_status mvp_weights_read(const char* path, mvp_weights** out) {
    MVP_REQUIRE_ARG(path != nullptr && out != nullptr);
    return guarded([&] {
        *out = new mvp_weights{mvpress::read_resize_weights(path)};
        return MVP_OK;
    });
}

void mvp_weights_free(mvp_weights* weights) {
    delete weights;
}

uint32_t mvp_weights_budget(const mvp_weights* weights) {
    return weights ? static_cast<uint32_t>(weights->weights.m) : 0;
}

/* compression */

void mvp_compress_options_init(mvp_compress_options* options) {
    if (options == nullptr) return;
    *options = mvp_compress_options{};
    options->method = MVP_METHOD_H_POOL;
    options->budget = 1;
}

mvp_status mvp_method_parse(const char* name, mvp_method* out) {
    MVP_REQUIRE_ARG(name != nullptr && out != nullptr);
    return guarded([&] {
        *out = static_cast<mvp_method>(mvpress::parse_method(name));
        return MVP_OK;
    });
}

static_assert(static_cast<int>(mvpress::Method::SeqResize) == MVP_METHOD_SEQ_RESIZE);
static_assert(static_cast<int>(mvpress::Method::MemTok) == MVP_METHOD_MEM_TOK);
static_assert(static_cast<int>(mvpress::Method::HPool) == MVP_METHOD_H_POOL);
static_assert(static_cast<int>(mvpress::Method::Agc) == MVP_METHOD_AGC);

mvp_status mvp_compress(const mvp_corpus* corpus, const mvp_attention* attention, const mvp_weights* weights,
                        const mvp_compress_options* options, mvp_corpus** out, char** meta_json) {
    MVP_REQUIRE_ARG(corpus != nullptr && options != nullptr && out != nullptr && meta_json != nullptr);
    MVP_REQUIRE_ARG(options->method >= MVP_METHOD_SEQ_RESIZE && options->method <= MVP_METHOD_AGC);
    return guarded([&] {
        mvpress::CompressOptions opts;
        opts.method = static_cast<mvpress::Method>(options->method);
        opts.budget = options->budget;
        opts.protected_count = options->protected_count;
        opts.agc.selection = options->agc_random_select ? mvpress::Selection::Random : mvpress::Selection::Attention;
        opts.agc.seed = options->seed;
        opts.agc.aggregation =
            options->agc_unweighted ? mvpress::Aggregation::Unweighted : mvpress::Aggregation::Weighted;
        opts.agc.clustering = !options->agc_no_cluster;
        opts.pad_short = options->pad_short != 0;
        opts.threads = resolve_threads(options->threads);

        auto outcome = mvpress::compress_corpus(corpus->corpus, opts, attention ? &attention->sidecars : nullptr,
                                                weights ? &weights->weights : nullptr);
        if (!outcome.failures.empty()) {
            std::string msg = std::to_string(outcome.failures.size()) + " document(s) failed to compress:";
            for (const auto& f : outcome.failures) {
                msg += "\n  " + f.doc_id + ": " + mvpress::error_kind_name(f.kind) + ": " + f.message;
            }
            return set_error(to_status(outcome.failures.front().kind), msg);
        }
        auto meta = outcome.meta.to_json();
        auto* result = new mvp_corpus{std::move(outcome.corpus)};
        try {
            *meta_json = dup_string(meta);
        } catch (...) {
            delete result;
            throw;
        }
        *out = result;
        return MVP_OK;
    });
}

/* index */

mvp_status mvp_index_build(const mvp_corpus* corpus, const char* meta_json, mvp_index** out) {
    MVP_REQUIRE_ARG(corpus != nullptr && out != nullptr);
    return guarded([&] {
        std::optional<mvpress::CompressionMeta> meta;
        if (meta_json != nullptr) {
            meta = mvpress::CompressionMeta::from_json(meta_json);
        }
        auto* idx = new mvp_index{mvpress::FlatIndex::build(corpus->corpus, meta), meta ? meta->to_json() : ""};
        *out = idx;
        return MVP_OK;
    });
}

mvp_status mvp_index_load(const char* path, mvp_index** out) {
    MVP_REQUIRE_ARG(path != nullptr && out != nullptr);
    return guarded([&] {
        auto index = mvpress::FlatIndex::load(path);
        std::string meta = index.meta() ? index.meta()->to_json() : "";
        *out = new mvp_index{std::move(index), std::move(meta)};
        return MVP_OK;
    });
}

mvp_status mvp_index_save(const mvp_index* index, const char* path) {
    MVP_REQUIRE_ARG(index != nullptr && path != nullptr);
    return guarded([&] {
        index->index->save(path);
        return MVP_OK;
    });
}

void mvp_index_free(mvp_index* index) {
    delete index;
}

size_t mvp_index_size(const mvp_index* index) {
    return index ? index->index->size() : 0;
}

size_t mvp_index_total_vectors(const mvp_index* index) {
    return index ? index->index->total_vectors() : 0;
}

uint32_t mvp_index_max_rows(const mvp_index* index) {
    if (index == nullptr) return 0;
    std::size_t rows = 0;
    for (const auto& doc : index->index->corpus().docs()) rows = std::max(rows, doc.embeddings.rows());
    return static_cast<uint32_t>(rows);
}

uint32_t mvp_index_uniform_rows(const mvp_index* index) {
    if (index == nullptr || index->index->size() == 0) return 0;
    const auto& docs = index->index->corpus().docs();
    const auto rows = docs.front().embeddings.rows();
    for (const auto& doc : docs) {
        if (doc.embeddings.rows() != rows) return 0;
    }
    return static_cast<uint32_t>(rows);
}

const char* mvp_index_meta_json(const mvp_index* index) {
    if (index == nullptr || index->meta_json.empty()) return nullptr;
    return index->meta_json.c_str();
}

mvp_status mvp_index_normalize(mvp_index* index) {
    MVP_REQUIRE_ARG(index != nullptr);
    return guarded([&] {
        index->index = mvpress::FlatIndex::build(normalized_copy(index->index->corpus()), index->index->meta());
        return MVP_OK;
    });
}

void mvp_search_options_init(mvp_search_options* options) {
    if (options == nullptr) return;
    *options = mvp_search_options{};
    options->k = 10;
}

mvp_status mvp_index_search(const mvp_index* index, const mvp_corpus* queries, const mvp_search_options* options,
                            mvp_run** run, mvp_matches** matches) {
    MVP_REQUIRE_ARG(index != nullptr && queries != nullptr && options != nullptr && run != nullptr);
    MVP_REQUIRE_ARG(options->k >= 1);
    return guarded([&] {
        mvpress::SearchOptions opts;
        opts.k = options->k;
        opts.capture_matches = matches != nullptr && options->capture_matches;
        opts.relevant = options->relevant ? &options->relevant->qrels : nullptr;
        opts.threads = resolve_threads(options->threads);
        auto result = mvpress::search_all(*index->index, queries->corpus, opts);
        auto* r = new mvp_run{std::move(result.run)};
        if (matches != nullptr) {
            try {
                *matches = new mvp_matches{std::move(result.matches)};
            } catch (...) {
                delete r;
                throw;
            }
        }
        *run = r;
        return MVP_OK;
    });
}

mvp_status mvp_maxsim(const float* query, uint32_t query_rows, const float* doc, uint32_t doc_rows, uint32_t dim,
                      double* score) {
    MVP_REQUIRE_ARG(query != nullptr && doc != nullptr && score != nullptr && dim >= 1);
    return guarded([&] {
        mvpress::EmbeddingMatrix q(query_rows, dim, std::vector<float>(query, query + std::size_t{query_rows} * dim));
        mvpress::EmbeddingMatrix d(doc_rows, dim, std::vector<float>(doc, doc + std::size_t{doc_rows} * dim));
        *score = mvpress::maxsim_score(q, d);
        return MVP_OK;
    });
}

/* runs and qrels */

mvp_status mvp_run_read(const char* path, mvp_run** out) {
    MVP_REQUIRE_ARG(path != nullptr && out != nullptr);
    return guarded([&] {
        *out = new mvp_run{mvpress::read_run(path)};
        return MVP_OK;
    });
}

mvp_status mvp_run_write(const mvp_run* run, const char* path, const char* tag) {
    MVP_REQUIRE_ARG(run != nullptr && path != nullptr);
    MVP_REQUIRE_ARG(tag == nullptr || (*tag != '\0' && std::strpbrk(tag, " \t\r\n") == nullptr));
    return guarded([&] {
        if (tag == nullptr) {
            mvpress::write_run(run->run, path);
        } else {
            auto copy = run->run;
            copy.tag = tag;
            mvpress::write_run(copy, path);
        }
        return MVP_OK;
    });
}

void mvp_run_free(mvp_run* run) {
    delete run;
}

size_t mvp_run_query_count(const mvp_run* run) {
    return run ? run->run.queries.size() : 0;
}

mvp_status mvp_qrels_read(const char* path, mvp_qrels** out) {
    MVP_REQUIRE_ARG(path != nullptr && out != nullptr);
    return guarded([&] {
        *out = new mvp_qrels{mvpress::read_qrels(path)};
        return MVP_OK;
    });
}

mvp_status mvp_qrels_write(const mvp_qrels* qrels, const char* path) {
    MVP_REQUIRE_ARG(qrels != nullptr && path != nullptr);
    return guarded([&] {
        mvpress::write_qrels(qrels->qrels, path);
        return MVP_OK;
    });
}

void mvp_qrels_free(mvp_qrels* qrels) {
    delete qrels;
}

/* match logs */

mvp_status mvp_matches_read(const char* path, mvp_matches** out) {
    MVP_REQUIRE_ARG(path != nullptr && out != nullptr);
    return guarded([&] {
        *out = new mvp_matches{mvpress::read_match_log(path)};
        return MVP_OK;
    });
}

mvp_status mvp_matches_write(const mvp_matches* matches, const char* path) {
    MVP_REQUIRE_ARG(matches != nullptr && path != nullptr);
    return guarded([&] {
        mvpress::write_match_log(matches->records, path);
        return MVP_OK;
    });
}

void mvp_matches_free(mvp_matches* matches) {
    delete matches;
}

size_t mvp_matches_size(const mvp_matches* matches) {
    return matches ? matches->records.size() : 0;
}

mvp_status mvp_matches_filter_relevant(const mvp_matches* matches, const mvp_qrels* qrels, mvp_matches** out) {
    MVP_REQUIRE_ARG(matches != nullptr && qrels != nullptr && out != nullptr);
    return guarded([&] {
        *out = new mvp_matches{mvpress::filter_relevant(matches->records, qrels->qrels)};
        return MVP_OK;
    });
}

/* evaluation */

mvp_status mvp_eval_recall(const mvp_run* run, const mvp_qrels* qrels, uint32_t k, double* out) {
    MVP_REQUIRE_ARG(run != nullptr && qrels != nullptr && out != nullptr && k >= 1);
    return guarded([&] {
        *out = mvpress::recall_at_k(run->run, qrels->qrels, k);
        return MVP_OK;
    });
}

mvp_status mvp_eval_ndcg(const mvp_run* run, const mvp_qrels* qrels, uint32_t k, double* out) {
    MVP_REQUIRE_ARG(run != nullptr && qrels != nullptr && out != nullptr && k >= 1);
    return guarded([&] {
        *out = mvpress::ndcg_at_k(run->run, qrels->qrels, k);
        return MVP_OK;
    });
}

mvp_status mvp_eval_mrr(const mvp_run* run, const mvp_qrels* qrels, double* out) {
    MVP_REQUIRE_ARG(run != nullptr && qrels != nullptr && out != nullptr);
    return guarded([&] {
        *out = mvpress::mrr(run->run, qrels->qrels);
        return MVP_OK;
    });
}

mvp_status mvp_percent_of_baseline(double score, double base, double* out) {
    MVP_REQUIRE_ARG(out != nullptr);
    return guarded([&] {
        *out = mvpress::percent_of_baseline(score, base);
        return MVP_OK;
    });
}

mvp_status mvp_compression_ratio(double m, double avg_tokens, double* out) {
    MVP_REQUIRE_ARG(out != nullptr);
    return guarded([&] {
        *out = mvpress::compression_ratio(m, avg_tokens);
        return MVP_OK;
    });
}

/* analytics */

mvp_status mvp_matching_strength(const mvp_matches* matches, uint32_t doc_len, mvp_strength_norm mode,
                                 double* out) {
    MVP_REQUIRE_ARG(matches != nullptr && (out != nullptr || doc_len == 0));
    MVP_REQUIRE_ARG(mode == MVP_STRENGTH_GLOBAL || mode == MVP_STRENGTH_PER_QUERY_POSITION);
    return guarded([&] {
        const auto strength = mvpress::matching_strength(
            matches->records, doc_len,
            mode == MVP_STRENGTH_GLOBAL ? mvpress::StrengthNormalization::Global
                                        : mvpress::StrengthNormalization::PerQueryPosition);
        std::copy(strength.begin(), strength.end(), out);
        return MVP_OK;
    });
}

mvp_status mvp_utilization(const mvp_matches* matches, const mvp_index* index, double* out) {
    MVP_REQUIRE_ARG(matches != nullptr && index != nullptr && out != nullptr);
    return guarded([&] {
        *out = mvpress::utilization_fraction(matches->records, *index->index);
        return MVP_OK;
    });
}

mvp_status mvp_mean_pairwise_cosine(const mvp_index* index, double* out) {
    MVP_REQUIRE_ARG(index != nullptr && out != nullptr);
    return guarded([&] {
        const auto mean = mvpress::mean_pairwise_cosine(index->index->corpus());
        std::copy(mean.values.begin(), mean.values.end(), out);
        return MVP_OK;
    });
}

mvp_status mvp_cv(const double* samples, size_t n, double* out) {
    MVP_REQUIRE_ARG(out != nullptr && (samples != nullptr || n == 0));
    return guarded([&] {
        *out = mvpress::cv(std::span<const double>(samples, n));
        return MVP_OK;
    });
}

mvp_status mvp_gini(const double* samples, size_t n, double* out) {
    MVP_REQUIRE_ARG(out != nullptr && (samples != nullptr || n == 0));
    return guarded([&] {
        *out = mvpress::gini(std::span<const double>(samples, n));
        return MVP_OK;
    });
}

mvp_status mvp_pearson(const double* x, const double* y, size_t n, double* r, double* p_value) {
    MVP_REQUIRE_ARG(x != nullptr && y != nullptr && r != nullptr);
    return guarded([&] {
        std::span<const double> xs(x, n), ys(y, n);
        if (p_value != nullptr) {
            const auto test = mvpress::pearson_test(xs, ys);
            *r = test.r;
            *p_value = test.p_value;
        } else {
            *r = mvpress::pearson(xs, ys);
        }
        return MVP_OK;
    });
}

/* synthetic corpora */

void mvp_synth_spec_init(mvp_synth_spec* spec) {
    if (spec == nullptr) return;
    const mvpress::SynthSpec defaults;
    spec->doc_count = static_cast<uint32_t>(defaults.doc_count);
    spec->concepts = static_cast<uint32_t>(defaults.concepts);
    spec->redundancy = static_cast<uint32_t>(defaults.redundancy);
    spec->sigma = defaults.sigma;
    spec->dim = static_cast<uint32_t>(defaults.dim);
    spec->seed = defaults.seed;
    spec->global_orthogonal = defaults.global_orthogonal ? 1 : 0;
}

mvp_status mvp_synth_generate(const mvp_synth_spec* spec, const char* dir) {
    MVP_REQUIRE_ARG(spec != nullptr && dir != nullptr);
    return guarded([&] {
        mvpress::SynthSpec s;
        s.doc_count = spec->doc_count;
        s.concepts = spec->concepts;
        s.redundancy = spec->redundancy;
        s.sigma = spec->sigma;
        s.dim = spec->dim;
        s.seed = spec->seed;
        s.global_orthogonal = spec->global_orthogonal != 0;
        mvpress::write_synthetic(mvpress::generate_synthetic(s), dir);
        return MVP_OK;
    });
}

} // extern "C"
