/*
 * mvpress C API.
 *
 * Multi-vector index compression and late-interaction (MaxSim) retrieval.
 * Every object is an opaque handle released with its matching *_free
 * function. Every fallible call returns an mvp_status; on failure,
 * mvp_last_error() describes the problem for the calling thread until its
 * next failing call. Strings returned through char** out-parameters are
 * heap allocated and released with mvp_string_free.
 */
#ifndef MVPRESS_H
#define MVPRESS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MVPRESS_BUILDING_LIBRARY)
#    define MVP_API __declspec(dllexport)
#  else
#    define MVP_API __declspec(dllimport)
#  endif
#else
#  define MVP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mvp_status {
    MVP_OK = 0,
    MVP_ERR_FORMAT = 1,
    MVP_ERR_CORRUPTION = 2,
    MVP_ERR_VALIDATION = 3,
    MVP_ERR_CONSISTENCY = 4,
    MVP_ERR_CONTRACT = 5,
    MVP_ERR_IO = 6,
    MVP_ERR_PARSE = 7,
    MVP_ERR_EVALUATION = 8,
    MVP_ERR_QUERY = 9,
    MVP_ERR_BUILD = 10,
    MVP_ERR_COMPUTATION = 11,
    MVP_ERR_INVALID_ARGUMENT = 12,
    MVP_ERR_INTERNAL = 13
} mvp_status;

typedef struct mvp_corpus mvp_corpus;
typedef struct mvp_attention mvp_attention;
typedef struct mvp_weights mvp_weights;
typedef struct mvp_index mvp_index;
typedef struct mvp_run mvp_run;
typedef struct mvp_qrels mvp_qrels;
typedef struct mvp_matches mvp_matches;

MVP_API const char* mvp_version(void);
MVP_API const char* mvp_status_name(mvp_status status);
MVP_API const char* mvp_last_error(void);
MVP_API void mvp_string_free(char* s);

/* ---- corpora (MVEC) ---------------------------------------------------- */

MVP_API mvp_status mvp_corpus_create(uint32_t dim, mvp_corpus** out);
/* Appends a document; data holds rows*dim floats, row-major. */
MVP_API mvp_status mvp_corpus_add(mvp_corpus* corpus, const char* doc_id, const float* data, uint32_t rows);
MVP_API mvp_status mvp_corpus_read(const char* path, mvp_corpus** out);
MVP_API mvp_status mvp_corpus_write(const mvp_corpus* corpus, const char* path);
MVP_API void mvp_corpus_free(mvp_corpus* corpus);
MVP_API size_t mvp_corpus_size(const mvp_corpus* corpus);
MVP_API uint32_t mvp_corpus_dim(const mvp_corpus* corpus);
/* Borrowed views valid until the corpus is modified or freed. */
MVP_API mvp_status mvp_corpus_doc(const mvp_corpus* corpus, size_t i, const char** doc_id, const float** data,
                                  uint32_t* rows);
/* Scales every nonzero row to unit L2 norm in place. */
MVP_API mvp_status mvp_corpus_normalize(mvp_corpus* corpus);

/* ---- attention sidecars (MATT) and resize weights (MRSZ) ---------------- */

MVP_API mvp_status mvp_attention_read(const char* path, mvp_attention** out);
MVP_API mvp_status mvp_attention_write(const mvp_attention* attention, const char* path);
MVP_API void mvp_attention_free(mvp_attention* attention);
MVP_API size_t mvp_attention_size(const mvp_attention* attention);
/* MVP_ERR_CONSISTENCY unless every sidecar matches a document's id and length. */
MVP_API mvp_status mvp_attention_check(const mvp_attention* attention, const mvp_corpus* corpus);

MVP_API mvp_status mvp_weights_read(const char* path, mvp_weights** out);
MVP_API void mvp_weights_free(mvp_weights* weights);
MVP_API uint32_t mvp_weights_budget(const mvp_weights* weights);

/* ---- compression -------------------------------------------------------- */

typedef enum mvp_method {
    MVP_METHOD_SEQ_RESIZE = 0,
    MVP_METHOD_MEM_TOK = 1,
    MVP_METHOD_H_POOL = 2,
    MVP_METHOD_AGC = 3
} mvp_method;

typedef struct mvp_compress_options {
    mvp_method method;
    uint32_t budget;
    uint32_t protected_count; /* h-pool: first k positions kept verbatim */
    int agc_random_select;    /* 0: attention top-m, 1: seeded random */
    int agc_unweighted;       /* 0: saliency-weighted means, 1: plain means */
    int agc_no_cluster;       /* 0: cluster + aggregate, 1: selected rows only */
    uint64_t seed;
    int pad_short;            /* zero-pad docs shorter than the budget */
    uint32_t threads;         /* 0: MVPRESS_THREADS or 1 */
} mvp_compress_options;

MVP_API void mvp_compress_options_init(mvp_compress_options* options);
/* MVP_ERR_PARSE for an unknown name. */
MVP_API mvp_status mvp_method_parse(const char* name, mvp_method* out);

/*
 * Compresses every document. attention is required for AGC and weights for
 * seq-resize; otherwise either may be NULL. On success *out receives the
 * compressed corpus and *meta_json its metadata. If any document fails,
 * returns MVP_ERR_CONTRACT (or the first failure's kind), writes nothing to
 * *out, and mvp_last_error() lists every failing doc id with its reason.
 */
MVP_API mvp_status mvp_compress(const mvp_corpus* corpus, const mvp_attention* attention,
                                const mvp_weights* weights, const mvp_compress_options* options,
                                mvp_corpus** out, char** meta_json);

/* ---- flat index and search ---------------------------------------------- */

/* Copies the corpus. meta_json may be NULL. */
MVP_API mvp_status mvp_index_build(const mvp_corpus* corpus, const char* meta_json, mvp_index** out);
/* Reads path and, when present, its <name>.meta.json sidecar. */
MVP_API mvp_status mvp_index_load(const char* path, mvp_index** out);
MVP_API mvp_status mvp_index_save(const mvp_index* index, const char* path);
MVP_API void mvp_index_free(mvp_index* index);
MVP_API size_t mvp_index_size(const mvp_index* index);
MVP_API size_t mvp_index_total_vectors(const mvp_index* index);
/* Largest per-document vector count. */
MVP_API uint32_t mvp_index_max_rows(const mvp_index* index);
/* Row count shared by every document, or 0 when row counts differ. */
MVP_API uint32_t mvp_index_uniform_rows(const mvp_index* index);
/* NULL when the index has no metadata. Borrowed. */
MVP_API const char* mvp_index_meta_json(const mvp_index* index);
/* Normalizes every document row in place (see mvp_corpus_normalize). */
MVP_API mvp_status mvp_index_normalize(mvp_index* index);

typedef struct mvp_search_options {
    uint32_t k;
    int capture_matches;
    const mvp_qrels* relevant; /* with capture: also match judged-relevant docs */
    uint32_t threads;          /* 0: MVPRESS_THREADS or 1 */
} mvp_search_options;

MVP_API void mvp_search_options_init(mvp_search_options* options);
/* Searches every query of `queries`. *matches may be NULL when not wanted.
   k == 0 is MVP_ERR_INVALID_ARGUMENT. */
MVP_API mvp_status mvp_index_search(const mvp_index* index, const mvp_corpus* queries,
                                    const mvp_search_options* options, mvp_run** run, mvp_matches** matches);

/* Exact MaxSim of one query against one document, both row-major. */
MVP_API mvp_status mvp_maxsim(const float* query, uint32_t query_rows, const float* doc, uint32_t doc_rows,
                              uint32_t dim, double* score);

/* ---- TREC runs and qrels ------------------------------------------------ */

MVP_API mvp_status mvp_run_read(const char* path, mvp_run** out);
/* tag may be NULL to keep the run's current tag. */
MVP_API mvp_status mvp_run_write(const mvp_run* run, const char* path, const char* tag);
MVP_API void mvp_run_free(mvp_run* run);
MVP_API size_t mvp_run_query_count(const mvp_run* run);

MVP_API mvp_status mvp_qrels_read(const char* path, mvp_qrels** out);
MVP_API mvp_status mvp_qrels_write(const mvp_qrels* qrels, const char* path);
MVP_API void mvp_qrels_free(mvp_qrels* qrels);

/* ---- match logs (JSONL) ------------------------------------------------- */

MVP_API mvp_status mvp_matches_read(const char* path, mvp_matches** out);
MVP_API mvp_status mvp_matches_write(const mvp_matches* matches, const char* path);
MVP_API void mvp_matches_free(mvp_matches* matches);
MVP_API size_t mvp_matches_size(const mvp_matches* matches);
/* Keeps records whose (query, doc) pair has grade >= 1. */
MVP_API mvp_status mvp_matches_filter_relevant(const mvp_matches* matches, const mvp_qrels* qrels,
                                               mvp_matches** out);

/* ---- evaluation --------------------------------------------------------- */

MVP_API mvp_status mvp_eval_recall(const mvp_run* run, const mvp_qrels* qrels, uint32_t k, double* out);
MVP_API mvp_status mvp_eval_ndcg(const mvp_run* run, const mvp_qrels* qrels, uint32_t k, double* out);
MVP_API mvp_status mvp_eval_mrr(const mvp_run* run, const mvp_qrels* qrels, double* out);
/* 100*score/base truncated to one decimal. */
MVP_API mvp_status mvp_percent_of_baseline(double score, double base, double* out);
/* 1 - m/avg_tokens rounded to four decimals. */
MVP_API mvp_status mvp_compression_ratio(double m, double avg_tokens, double* out);

/* ---- utilization analytics ---------------------------------------------- */

typedef enum mvp_strength_norm {
    MVP_STRENGTH_GLOBAL = 0,
    MVP_STRENGTH_PER_QUERY_POSITION = 1
} mvp_strength_norm;

/* out receives doc_len values. */
MVP_API mvp_status mvp_matching_strength(const mvp_matches* matches, uint32_t doc_len, mvp_strength_norm mode,
                                         double* out);
MVP_API mvp_status mvp_utilization(const mvp_matches* matches, const mvp_index* index, double* out);
/* out receives m*m values where m = mvp_index_uniform_rows(index) (must be > 0). */
MVP_API mvp_status mvp_mean_pairwise_cosine(const mvp_index* index, double* out);
MVP_API mvp_status mvp_cv(const double* samples, size_t n, double* out);
MVP_API mvp_status mvp_gini(const double* samples, size_t n, double* out);
/* p_value may be NULL; a p-value needs n >= 3. */
MVP_API mvp_status mvp_pearson(const double* x, const double* y, size_t n, double* r, double* p_value);

/* ---- synthetic corpora -------------------------------------------------- */

typedef struct mvp_synth_spec {
    uint32_t doc_count;
    uint32_t concepts;
    uint32_t redundancy;
    double sigma;
    uint32_t dim;
    uint64_t seed;
    int global_orthogonal;
} mvp_synth_spec;

MVP_API void mvp_synth_spec_init(mvp_synth_spec* spec);
/* Writes corpus.mvec, queries.mvec, corpus.matt and qrels.txt into dir. */
MVP_API mvp_status mvp_synth_generate(const mvp_synth_spec* spec, const char* dir);

#ifdef __cplusplus
}
#endif

#endif /* MVPRESS_H */
