#include "mvpress/metrics.hpp"

#include "mvpress/error.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

namespace mvpress {

namespace {

std::vector<std::string> evaluated_queries(const RunList& run, const Qrels& qrels) {
    std::vector<std::string> ids;
    std::set<std::string> seen;
    for (const auto& q : run.queries) {
        if (seen.insert(q.query_id).second) ids.push_back(q.query_id);
    }
    for (const auto& q : qrels.query_ids()) {
        if (seen.insert(q).second) ids.push_back(q);
    }
    return ids;
}

const std::vector<RankedResult>& results_for(const RunList& run, const std::string& qid) {
    static const std::vector<RankedResult> none;
    const auto* q = run.find(qid);
    return q ? q->results : none;
}

} // namespace

double recall_at_k(const RunList& run, const Qrels& qrels, std::size_t k) {
    require(k >= 1, "recall needs k >= 1");
    double total = 0.0;
    std::size_t counted = 0;
    for (const auto& qid : qrels.query_ids()) {
        std::size_t relevant = 0;
        for (const auto& [doc, grade] : qrels.judged(qid)) {
            if (grade >= 1) ++relevant;
        }
        if (relevant == 0) continue;
        const auto& results = results_for(run, qid);
        std::size_t hits = 0;
        for (std::size_t i = 0; i < std::min(k, results.size()); ++i) {
            if (qrels.grade(qid, results[i].doc_id) >= 1) ++hits;
        }
        total += static_cast<double>(hits) / static_cast<double>(relevant);
        ++counted;
    }
    if (counted == 0) {
        fail(ErrorKind::Evaluation, "recall is undefined: no query has a relevant document");
    }
    return total / static_cast<double>(counted);
}

double ndcg_at_k(const RunList& run, const Qrels& qrels, std::size_t k) {
    require(k >= 1, "nDCG needs k >= 1");
    const auto queries = evaluated_queries(run, qrels);
    if (queries.empty()) return 0.0;
    double total = 0.0;
    for (const auto& qid : queries) {
        const auto& results = results_for(run, qid);
        double dcg = 0.0;
        for (std::size_t i = 0; i < std::min(k, results.size()); ++i) {
            dcg += qrels.grade(qid, results[i].doc_id) / std::log2(static_cast<double>(i) + 2.0);
        }
        std::vector<int> grades;
        for (const auto& [doc, grade] : qrels.judged(qid)) grades.push_back(grade);
        std::sort(grades.begin(), grades.end(), std::greater<>());
        double idcg = 0.0;
        for (std::size_t i = 0; i < std::min(k, grades.size()); ++i) {
            idcg += grades[i] / std::log2(static_cast<double>(i) + 2.0);
        }
        total += idcg > 0.0 ? dcg / idcg : 0.0;
    }
    return total / static_cast<double>(queries.size());
}

double mrr(const RunList& run, const Qrels& qrels) {
    const auto queries = evaluated_queries(run, qrels);
    if (queries.empty()) return 0.0;
    double total = 0.0;
    for (const auto& qid : queries) {
        for (const auto& r : results_for(run, qid)) {
            if (qrels.grade(qid, r.doc_id) >= 1) {
                total += 1.0 / static_cast<double>(r.rank);
                break;
            }
        }
    }
    return total / static_cast<double>(queries.size());
}

double percent_of_baseline_raw(double score, double base) {
    if (!(base > 0.0)) {
        fail(ErrorKind::Computation, "percent of baseline needs a positive base score");
    }
    return 100.0 * score / base;
}

double percent_of_baseline(double score, double base) {
    const double raw = percent_of_baseline_raw(score, base);
    // The nudge keeps exact decimals such as 100.0 from landing on 99.9.
    return std::trunc(raw * 10.0 + (raw >= 0 ? 1e-9 : -1e-9)) / 10.0;
}

double compression_ratio(double m, double avg_tokens) {
    if (!(avg_tokens > 0.0)) {
        fail(ErrorKind::Computation, "compression ratio needs a positive average token count");
    }
    return std::round((1.0 - m / avg_tokens) * 1e4) / 1e4;
}

double cv(std::span<const double> samples) {
    if (samples.empty()) {
        fail(ErrorKind::Computation, "CV of an empty sample");
    }
    const double n = static_cast<double>(samples.size());
    double mean = 0.0;
    for (double x : samples) mean += x;
    mean /= n;
    if (mean == 0.0) {
        fail(ErrorKind::Computation, "CV is undefined for zero mean");
    }
    double var = 0.0;
    for (double x : samples) var += (x - mean) * (x - mean);
    var /= n;
    return std::sqrt(var) / std::abs(mean) * 100.0;
}

double gini(std::span<const double> samples) {
    if (samples.empty()) {
        fail(ErrorKind::Computation, "Gini of an empty sample");
    }
    std::vector<double> x(samples.begin(), samples.end());
    for (double v : x) {
        if (v < 0.0 || !std::isfinite(v)) {
            fail(ErrorKind::Computation, "Gini needs finite nonnegative samples");
        }
    }
    std::sort(x.begin(), x.end());
    double weighted = 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        weighted += static_cast<double>(i + 1) * x[i];
        sum += x[i];
    }
    if (sum == 0.0) return 0.0;
    const double n = static_cast<double>(x.size());
    return 2.0 * weighted / (n * sum) - (n + 1.0) / n;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        fail(ErrorKind::Computation, "Pearson needs two samples of equal length >= 2");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) {
        fail(ErrorKind::Computation, "Pearson is undefined when a sample has zero variance");
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

PearsonTest pearson_test(std::span<const double> x, std::span<const double> y) {
    if (x.size() < 3) {
        fail(ErrorKind::Computation, "a Pearson p-value needs at least 3 samples");
    }
    PearsonTest out;
    out.n = x.size();
    out.r = pearson(x, y);
    const double df = static_cast<double>(out.n) - 2.0;
    if (std::abs(out.r) >= 1.0) {
        out.p_value = 0.0;
        return out;
    }
    const double t = out.r * std::sqrt(df / (1.0 - out.r * out.r));
    const boost::math::students_t dist(df);
    out.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
    return out;
}

} // namespace mvpress
