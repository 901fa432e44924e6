// mvpress command-line front end. Talks to the library only through the C API.

#include "mvpress/mvpress.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct RuntimeFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UsageFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check(mvp_status status, const std::string& what) {
    if (status != MVP_OK) {
        throw RuntimeFailure(what + ": " + mvp_status_name(status) + ": " + mvp_last_error());
    }
}

template <typename T, void (*Free)(T*)>
struct Deleter {
    void operator()(T* p) const { Free(p); }
};

using CorpusPtr = std::unique_ptr<mvp_corpus, Deleter<mvp_corpus, mvp_corpus_free>>;
using AttentionPtr = std::unique_ptr<mvp_attention, Deleter<mvp_attention, mvp_attention_free>>;
using WeightsPtr = std::unique_ptr<mvp_weights, Deleter<mvp_weights, mvp_weights_free>>;
using IndexPtr = std::unique_ptr<mvp_index, Deleter<mvp_index, mvp_index_free>>;
using RunPtr = std::unique_ptr<mvp_run, Deleter<mvp_run, mvp_run_free>>;
using QrelsPtr = std::unique_ptr<mvp_qrels, Deleter<mvp_qrels, mvp_qrels_free>>;
using MatchesPtr = std::unique_ptr<mvp_matches, Deleter<mvp_matches, mvp_matches_free>>;

CorpusPtr load_corpus(const std::string& path) {
    mvp_corpus* c = nullptr;
    check(mvp_corpus_read(path.c_str(), &c), "reading " + path);
    return CorpusPtr(c);
}

IndexPtr load_index(const std::string& path) {
    mvp_index* idx = nullptr;
    check(mvp_index_load(path.c_str(), &idx), "loading index " + path);
    return IndexPtr(idx);
}

RunPtr load_run(const std::string& path) {
    mvp_run* r = nullptr;
    check(mvp_run_read(path.c_str(), &r), "reading run " + path);
    return RunPtr(r);
}

QrelsPtr load_qrels(const std::string& path) {
    mvp_qrels* q = nullptr;
    check(mvp_qrels_read(path.c_str(), &q), "reading qrels " + path);
    return QrelsPtr(q);
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw RuntimeFailure("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw RuntimeFailure(path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw RuntimeFailure("cannot open " + path + " for writing");
    out << text;
    if (!out.flush()) throw RuntimeFailure("write to " + path + " failed");
}

std::string fmt(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

// compress

struct CompressArgs {
    std::string method;
    std::uint32_t budget = 0;
    std::string in;
    std::string attn;
    std::string weights;
    std::uint32_t protected_count = 0;
    std::string agc_select = "attention";
    std::string agc_weight = "weighted";
    std::string agc_cluster = "on";
    std::uint64_t seed = 0;
    std::string pad_short;
    std::string out;
    std::uint32_t threads = 0;
};

int run_compress(const CompressArgs& a) {
    mvp_compress_options opts;
    mvp_compress_options_init(&opts);
    if (mvp_method_parse(a.method.c_str(), &opts.method) != MVP_OK) {
        throw UsageFailure("unknown method '" + a.method + "'");
    }
    if (opts.method == MVP_METHOD_AGC && a.attn.empty()) {
        throw UsageFailure("--method agc requires --attn");
    }
    if (opts.method == MVP_METHOD_SEQ_RESIZE && a.weights.empty()) {
        throw UsageFailure("--method seq-resize requires --weights");
    }
    if (a.protected_count > 0 && opts.method != MVP_METHOD_H_POOL) {
        throw UsageFailure("--protected only applies to h-pool");
    }
    opts.budget = a.budget;
    opts.protected_count = a.protected_count;
    opts.agc_random_select = a.agc_select == "random";
    opts.agc_unweighted = a.agc_weight == "unweighted";
    opts.agc_no_cluster = a.agc_cluster == "off";
    opts.seed = a.seed;
    opts.pad_short = !a.pad_short.empty();
    opts.threads = a.threads;

    auto corpus = load_corpus(a.in);
    AttentionPtr attention;
    if (!a.attn.empty()) {
        mvp_attention* att = nullptr;
        check(mvp_attention_read(a.attn.c_str(), &att), "reading attention " + a.attn);
        attention.reset(att);
    }
    WeightsPtr weights;
    if (!a.weights.empty()) {
        mvp_weights* w = nullptr;
        check(mvp_weights_read(a.weights.c_str(), &w), "reading weights " + a.weights);
        weights.reset(w);
    }

    mvp_corpus* compressed = nullptr;
    char* meta = nullptr;
    check(mvp_compress(corpus.get(), attention.get(), weights.get(), &opts, &compressed, &meta), "compress");
    CorpusPtr out(compressed);
    std::unique_ptr<char, decltype(&mvp_string_free)> meta_holder(meta, mvp_string_free);

    mvp_index* idx = nullptr;
    check(mvp_index_build(out.get(), meta, &idx), "compress");
    IndexPtr index(idx);
    check(mvp_index_save(index.get(), a.out.c_str()), "writing " + a.out);
    std::cerr << "compressed " << mvp_corpus_size(out.get()) << " documents to " << a.budget << " vectors each\n";
    return kExitOk;
}

// index

struct IndexArgs {
    std::string in;
    std::string out;
    bool normalize = false;
};

int run_index(const IndexArgs& a) {
    auto index = load_index(a.in);
    if (a.normalize) check(mvp_index_normalize(index.get()), "normalize");
    check(mvp_index_save(index.get(), a.out.c_str()), "writing " + a.out);
    std::cerr << "indexed " << mvp_index_size(index.get()) << " documents, " << mvp_index_total_vectors(index.get())
              << " vectors\n";
    return kExitOk;
}

// search

struct SearchArgs {
    std::string index;
    std::string queries;
    std::uint32_t k = 10;
    std::string out;
    std::string matches;
    std::string qrels;
    std::string tag = "mvpress";
    bool normalize = false;
    std::uint32_t threads = 0;
};

int run_search(const SearchArgs& a) {
    if (!a.qrels.empty() && a.matches.empty()) {
        throw UsageFailure("--qrels needs --matches");
    }
    auto index = load_index(a.index);
    auto queries = load_corpus(a.queries);
    if (a.normalize) {
        check(mvp_index_normalize(index.get()), "normalize");
        check(mvp_corpus_normalize(queries.get()), "normalize");
    }
    QrelsPtr qrels;
    if (!a.qrels.empty()) qrels = load_qrels(a.qrels);

    mvp_search_options opts;
    mvp_search_options_init(&opts);
    opts.k = a.k;
    opts.capture_matches = !a.matches.empty();
    opts.relevant = qrels.get();
    opts.threads = a.threads;

    mvp_run* r = nullptr;
    mvp_matches* m = nullptr;
    check(mvp_index_search(index.get(), queries.get(), &opts, &r, a.matches.empty() ? nullptr : &m), "search");
    RunPtr run(r);
    MatchesPtr matches(m);
    check(mvp_run_write(run.get(), a.out.c_str(), a.tag.c_str()), "writing " + a.out);
    if (matches) check(mvp_matches_write(matches.get(), a.matches.c_str()), "writing " + a.matches);
    return kExitOk;
}

// eval

struct EvalArgs {
    std::string run;
    std::string qrels;
    std::vector<std::uint32_t> ks{1, 5, 10};
    std::string baseline;
    std::string out;
};

json metric_block(const mvp_run* run, const mvp_qrels* qrels, const std::vector<std::uint32_t>& ks) {
    json m = json::object();
    for (auto k : ks) {
        double v = 0;
        check(mvp_eval_recall(run, qrels, k, &v), "R@" + std::to_string(k));
        m["R@" + std::to_string(k)] = v;
    }
    for (auto k : ks) {
        double v = 0;
        check(mvp_eval_ndcg(run, qrels, k, &v), "nDCG@" + std::to_string(k));
        m["nDCG@" + std::to_string(k)] = v;
    }
    double v = 0;
    check(mvp_eval_mrr(run, qrels, &v), "MRR");
    m["MRR"] = v;
    return m;
}

int run_eval(const EvalArgs& a) {
    auto run = load_run(a.run);
    auto qrels = load_qrels(a.qrels);
    json report;
    report["run"] = a.run;
    report["queries"] = mvp_run_query_count(run.get());
    report["metrics"] = metric_block(run.get(), qrels.get(), a.ks);

    std::map<std::string, std::string> percent_text;
    if (!a.baseline.empty()) {
        auto base = load_run(a.baseline);
        const json base_metrics = metric_block(base.get(), qrels.get(), a.ks);
        json pct = json::object();
        for (const auto& [name, value] : report["metrics"].items()) {
            const double b = base_metrics.at(name).get<double>();
            double p = 0;
            if (b > 0 && mvp_percent_of_baseline(value.get<double>(), b, &p) == MVP_OK) {
                pct[name] = p;
                percent_text[name] = fmt(p, 1);
            } else {
                pct[name] = nullptr;
                percent_text[name] = "n/a";
            }
        }
        report["baseline"] = a.baseline;
        report["baseline_metrics"] = base_metrics;
        report["percent_of_baseline"] = pct;
    }

    for (const auto& [name, value] : report["metrics"].items()) {
        std::cout << name << '\t' << fmt(value.get<double>(), 4);
        if (!percent_text.empty()) std::cout << '\t' << percent_text[name] << '%';
        std::cout << '\n';
    }
    if (!a.out.empty()) write_text_file(a.out, report.dump(2) + "\n");
    return kExitOk;
}

// analyze

struct AnalyzeArgs {
    std::string matches;
    std::string index;
    std::string qrels;
    std::string strength_norm = "global";
    std::string metrics;
    std::vector<std::string> peers;
    std::string label;
    std::string out_dir;
};

json pearson_table(const std::vector<json>& systems) {
    json table = json::array();
    if (systems.size() < 2) return table;
    std::vector<std::string> metric_names;
    for (const auto& [name, _] : systems.front().at("metrics").items()) {
        bool everywhere = true;
        for (const auto& s : systems) everywhere = everywhere && s.at("metrics").contains(name);
        if (everywhere) metric_names.push_back(name);
    }
    for (const char* evenness : {"cv", "gini"}) {
        std::vector<double> inverse;
        bool finite = true;
        for (const auto& s : systems) {
            const double e = s.at(evenness).is_number() ? s.at(evenness).get<double>() : 0.0;
            finite = finite && e > 0;
            inverse.push_back(e > 0 ? 1.0 / e : 0.0);
        }
        for (const auto& name : metric_names) {
            std::vector<double> metric;
            for (const auto& s : systems) metric.push_back(s.at("metrics").at(name).get<double>());
            json row;
            row["metric"] = name;
            row["evenness"] = std::string("1/") + evenness;
            row["n"] = systems.size();
            double r = 0, p = 0;
            if (finite &&
                mvp_pearson(metric.data(), inverse.data(), metric.size(), &r, systems.size() >= 3 ? &p : nullptr) ==
                    MVP_OK) {
                row["r"] = r;
                row["p_value"] = systems.size() >= 3 ? json(p) : json(nullptr);
            } else {
                row["r"] = nullptr;
                row["p_value"] = nullptr;
            }
            table.push_back(row);
        }
    }
    return table;
}

int run_analyze(const AnalyzeArgs& a) {
    auto index = load_index(a.index);
    mvp_matches* m = nullptr;
    check(mvp_matches_read(a.matches.c_str(), &m), "reading match log " + a.matches);
    MatchesPtr matches(m);
    if (!a.qrels.empty()) {
        auto qrels = load_qrels(a.qrels);
        mvp_matches* f = nullptr;
        check(mvp_matches_filter_relevant(matches.get(), qrels.get(), &f), "filtering matches");
        matches.reset(f);
    }

    std::error_code ec;
    std::filesystem::create_directories(a.out_dir, ec);
    if (ec) throw RuntimeFailure("cannot create " + a.out_dir + ": " + ec.message());
    const std::filesystem::path dir(a.out_dir);

    const std::uint32_t doc_len = mvp_index_max_rows(index.get());
    std::vector<double> strength(doc_len);
    const auto norm = a.strength_norm == "global" ? MVP_STRENGTH_GLOBAL : MVP_STRENGTH_PER_QUERY_POSITION;
    check(mvp_matching_strength(matches.get(), doc_len, norm, strength.data()), "matching strength");
    std::string csv = "position,strength\n";
    for (std::size_t j = 0; j < strength.size(); ++j) csv += std::to_string(j) + "," + fmt(strength[j], 9) + "\n";
    write_text_file((dir / "strength.csv").string(), csv);

    const std::uint32_t uniform = mvp_index_uniform_rows(index.get());
    if (uniform > 0) {
        std::vector<double> cos(std::size_t{uniform} * uniform);
        check(mvp_mean_pairwise_cosine(index.get(), cos.data()), "pairwise cosine");
        std::string cos_csv = "a,b,cosine\n";
        for (std::uint32_t i = 0; i < uniform; ++i) {
            for (std::uint32_t j = 0; j < uniform; ++j) {
                cos_csv += std::to_string(i) + "," + std::to_string(j) + "," + fmt(cos[i * uniform + j], 9) + "\n";
            }
        }
        write_text_file((dir / "cosine.csv").string(), cos_csv);
    } else {
        std::cerr << "documents have differing row counts; skipping cosine.csv\n";
    }

    json summary;
    summary["label"] = a.label.empty() ? a.matches : a.label;
    summary["records"] = mvp_matches_size(matches.get());
    summary["doc_len"] = doc_len;
    summary["strength_norm"] = a.strength_norm;
    double v = 0;
    summary["cv"] = mvp_cv(strength.data(), strength.size(), &v) == MVP_OK ? json(v) : json(nullptr);
    summary["gini"] = mvp_gini(strength.data(), strength.size(), &v) == MVP_OK ? json(v) : json(nullptr);
    check(mvp_utilization(matches.get(), index.get(), &v), "utilization");
    summary["utilization"] = v;
    if (!a.metrics.empty()) {
        const json eval = read_json_file(a.metrics);
        summary["metrics"] = eval.contains("metrics") ? eval.at("metrics") : eval;
    }

    std::vector<json> systems;
    if (summary.contains("metrics")) {
        systems.push_back(summary);
        for (const auto& peer : a.peers) {
            json p = read_json_file(peer);
            if (!p.contains("metrics") || !p.contains("cv") || !p.contains("gini")) {
                throw RuntimeFailure(peer + ": summary lacks metrics, cv or gini");
            }
            systems.push_back(std::move(p));
        }
    } else if (!a.peers.empty()) {
        throw UsageFailure("--peer needs --metrics for this system");
    }
    summary["pearson"] = pearson_table(systems);
    write_text_file((dir / "summary.json").string(), summary.dump(2) + "\n");
    return kExitOk;
}

// gen-synth

struct SynthArgs {
    mvp_synth_spec spec{};
    std::string out;
};

int run_gen_synth(const SynthArgs& a) {
    check(mvp_synth_generate(&a.spec, a.out.c_str()), "gen-synth");
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-vector index compression and late-interaction retrieval"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(mvp_version()));

    const auto threads_help = "Worker threads (default: $MVPRESS_THREADS or 1)";

    CompressArgs ca;
    auto* compress = app.add_subcommand("compress", "Compress every document to a fixed vector budget");
    compress->add_option("--method", ca.method, "seq-resize|mem-tok|h-pool|agc")
        ->required()
        ->check(CLI::IsMember({"seq-resize", "mem-tok", "h-pool", "agc"}));
    compress->add_option("--budget", ca.budget, "Vectors per document")->required()->check(CLI::Range(1u, 4294967295u));
    compress->add_option("--in", ca.in, "Input MVEC corpus")->required();
    compress->add_option("--attn", ca.attn, "MATT attention sidecar (agc)");
    compress->add_option("--weights", ca.weights, "MRSZ weights (seq-resize)");
    compress->add_option("--protected", ca.protected_count, "h-pool: keep the first k positions verbatim");
    compress->add_option("--agc-select", ca.agc_select)->check(CLI::IsMember({"attention", "random"}));
    compress->add_option("--agc-weight", ca.agc_weight)->check(CLI::IsMember({"weighted", "unweighted"}));
    compress->add_option("--agc-cluster", ca.agc_cluster)->check(CLI::IsMember({"on", "off"}));
    compress->add_option("--seed", ca.seed);
    compress->add_option("--pad-short", ca.pad_short, "Zero-pad documents shorter than the budget")
        ->check(CLI::IsMember({"zero"}));
    compress->add_option("--out", ca.out, "Output MVEC (meta JSON written alongside)")->required();
    compress->add_option("--threads", ca.threads, threads_help)->check(CLI::Range(1u, 4294967295u));

    IndexArgs ia;
    auto* index = app.add_subcommand("index", "Build a flat index from a (compressed) corpus");
    index->add_option("--in", ia.in, "Input MVEC")->required();
    index->add_option("--out", ia.out, "Index MVEC")->required();
    index->add_flag("--normalize", ia.normalize, "L2-normalize every vector");

    SearchArgs sa;
    auto* search = app.add_subcommand("search", "MaxSim search of every query against an index");
    search->add_option("--index", sa.index)->required();
    search->add_option("--queries", sa.queries, "Query MVEC")->required();
    search->add_option("--k", sa.k, "Results per query")->check(CLI::Range(1u, 4294967295u));
    search->add_option("--out", sa.out, "TREC run output")->required();
    search->add_option("--matches", sa.matches, "Match log output (JSON lines)");
    search->add_option("--qrels", sa.qrels, "Also log matches for judged-relevant docs");
    search->add_option("--tag", sa.tag, "Run tag");
    search->add_flag("--normalize", sa.normalize, "L2-normalize index and query vectors");
    search->add_option("--threads", sa.threads, threads_help)->check(CLI::Range(1u, 4294967295u));

    EvalArgs ea;
    auto* eval = app.add_subcommand("eval", "R@k, nDCG@k and MRR of a run");
    eval->add_option("--run", ea.run)->required();
    eval->add_option("--qrels", ea.qrels)->required();
    eval->add_option("--k", ea.ks, "Cutoffs")->check(CLI::Range(1u, 4294967295u))->delimiter(',');
    eval->add_option("--baseline", ea.baseline, "Baseline run for percent-of-baseline");
    eval->add_option("--out", ea.out, "Write a JSON report");

    AnalyzeArgs aa;
    auto* analyze = app.add_subcommand("analyze", "Matching strength, evenness and utilization");
    analyze->add_option("--matches", aa.matches, "Match log from search")->required();
    analyze->add_option("--index", aa.index)->required();
    analyze->add_option("--qrels", aa.qrels, "Keep only judged-relevant pairs");
    analyze->add_option("--strength-norm", aa.strength_norm)->check(CLI::IsMember({"global", "per-query"}));
    analyze->add_option("--metrics", aa.metrics, "eval --out report for this system");
    analyze->add_option("--peer", aa.peers, "summary.json of another system (repeatable)");
    analyze->add_option("--label", aa.label);
    analyze->add_option("--out-dir", aa.out_dir)->required();

    SynthArgs ga;
    mvp_synth_spec_init(&ga.spec);
    bool global_orthogonal = false;
    auto* synth = app.add_subcommand("gen-synth", "Write a synthetic corpus, queries, attention and qrels");
    synth->add_option("--docs", ga.spec.doc_count)->check(CLI::Range(1u, 4294967295u));
    synth->add_option("--concepts", ga.spec.concepts)->check(CLI::Range(1u, 4294967295u));
    synth->add_option("--redundancy", ga.spec.redundancy)->check(CLI::Range(1u, 4294967295u));
    synth->add_option("--sigma", ga.spec.sigma)->check(CLI::NonNegativeNumber);
    synth->add_option("--dim", ga.spec.dim)->check(CLI::Range(1u, 4294967295u));
    synth->add_option("--seed", ga.spec.seed);
    synth->add_flag("--global-orthogonal", global_orthogonal, "Concepts orthogonal across documents too");
    synth->add_option("--out", ga.out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*compress) return run_compress(ca);
        if (*index) return run_index(ia);
        if (*search) return run_search(sa);
        if (*eval) return run_eval(ea);
        if (*analyze) return run_analyze(aa);
        if (*synth) {
            ga.spec.global_orthogonal = global_orthogonal ? 1 : 0;
            return run_gen_synth(ga);
        }
    } catch (const UsageFailure& e) {
        std::cerr << "mvpress: usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "mvpress: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}
