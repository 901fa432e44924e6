#include "mvpress/synth.hpp"

#include "mvpress/error.hpp"
#include "mvpress/hash.hpp"
#include "mvpress/io.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

namespace mvpress {

void SynthSpec::validate() const {
    require(doc_count >= 1 && concepts >= 1 && redundancy >= 1 && dim >= 1 && psi >= 1 && heads >= 1,
            "synthetic spec counts must be >= 1");
    require(sigma >= 0.0 && std::isfinite(sigma), "synthetic sigma must be >= 0");
    require(dim >= concepts, "dim must be >= concepts per doc to keep them orthogonal");
    require(!global_orthogonal || dim >= doc_count * concepts,
            "global orthogonality needs dim >= doc_count * concepts");
}

namespace {

std::string padded(char prefix, std::size_t i, std::size_t count) {
    const auto width = std::to_string(count > 0 ? count - 1 : 0).size();
    auto digits = std::to_string(i);
    return std::string(1, prefix) + std::string(width - std::min(width, digits.size()), '0') + digits;
}

class Gaussian {
public:
    explicit Gaussian(std::uint64_t seed) : rng_(seed) {}

    // Box-Muller; std::normal_distribution is implementation-defined.
    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1;
        do {
            u1 = uniform_unit(rng_);
        } while (u1 <= 0.0);
        const double u2 = uniform_unit(rng_);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        spare_ = radius * std::sin(2.0 * std::numbers::pi * u2);
        have_spare_ = true;
        return radius * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Gram-Schmidt against `basis`, redrawing on (vanishingly rare) degeneracy.
std::vector<double> orthonormal_draw(Gaussian& g, std::size_t dim, const std::vector<std::vector<double>>& basis) {
    for (;;) {
        std::vector<double> v(dim);
        for (auto& x : v) x = g();
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& b : basis) {
                double proj = 0.0;
                for (std::size_t d = 0; d < dim; ++d) proj += v[d] * b[d];
                for (std::size_t d = 0; d < dim; ++d) v[d] -= proj * b[d];
            }
        }
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        if (norm > 1e-6) {
            for (auto& x : v) x /= norm;
            return v;
        }
    }
}

} // namespace

std::string synth_doc_id(std::size_t i, std::size_t doc_count) {
    return padded('d', i, doc_count);
}

std::string synth_query_id(std::size_t i, std::size_t doc_count) {
    return padded('q', i, doc_count);
}

SynthData generate_synthetic(const SynthSpec& spec) {
    spec.validate();
    const std::size_t h = spec.dim;
    const std::size_t k = spec.concepts;
    const std::size_t n = k * spec.redundancy;

    SynthData out{Corpus(h), Corpus(h), {}, {}, {}};
    std::vector<std::vector<double>> global_basis;
    Gaussian concept_rng(derive_seed(spec.seed, "concepts"));

    for (std::size_t doc = 0; doc < spec.doc_count; ++doc) {
        const auto doc_id = synth_doc_id(doc, spec.doc_count);
        std::vector<std::vector<double>> local_basis;
        auto& basis = spec.global_orthogonal ? global_basis : local_basis;
        std::vector<std::vector<float>> concepts;
        for (std::size_t c = 0; c < k; ++c) {
            basis.push_back(orthonormal_draw(concept_rng, h, basis));
            concepts.emplace_back(basis.back().begin(), basis.back().end());
        }

        Gaussian noise(derive_seed(spec.seed, "tokens/" + doc_id));
        // token t = (concept t / redundancy, copy t % redundancy); copy 0 is the anchor
        std::vector<std::size_t> order(n);
        for (std::size_t t = 0; t < n; ++t) order[t] = t;
        for (std::size_t t = n; t > 1; --t) {
            const auto j = static_cast<std::size_t>(uniform_below(noise.engine(), t));
            std::swap(order[t - 1], order[j]);
        }

        std::vector<float> data(n * h);
        std::vector<std::size_t> anchors(k);
        std::vector<char> is_anchor(n, 0);
        for (std::size_t pos = 0; pos < n; ++pos) {
            const std::size_t token = order[pos];
            const std::size_t c = token / spec.redundancy;
            if (token % spec.redundancy == 0) {
                anchors[c] = pos;
                is_anchor[pos] = 1;
            }
            for (std::size_t d = 0; d < h; ++d) {
                const double jitter = spec.sigma > 0.0 ? spec.sigma * noise() : 0.0;
                data[pos * h + d] = static_cast<float>(concepts[c][d] + jitter);
            }
        }
        out.corpus.add(doc_id, EmbeddingMatrix(n, h, std::move(data)));

        std::vector<float> query;
        for (const auto& c : concepts) query.insert(query.end(), c.begin(), c.end());
        const auto query_id = synth_query_id(doc, spec.doc_count);
        out.queries.add(query_id, EmbeddingMatrix(k, h, std::move(query)));
        out.qrels.add(query_id, doc_id, 1);

        AttentionSidecar att;
        att.doc_id = doc_id;
        att.psi = spec.psi;
        att.heads = spec.heads;
        att.n = static_cast<std::uint32_t>(n);
        const double anchor_w = 0.9 / static_cast<double>(k);
        const double other_w = n > k ? 0.1 / static_cast<double>(n - k) : 0.0;
        std::mt19937_64 att_rng(derive_seed(spec.seed, "attention/" + doc_id));
        att.weights.resize(static_cast<std::size_t>(spec.psi) * spec.heads * n);
        for (std::size_t row = 0; row < static_cast<std::size_t>(spec.psi) * spec.heads; ++row) {
            for (std::size_t pos = 0; pos < n; ++pos) {
                const double base = is_anchor[pos] ? anchor_w : other_w;
                const double jitter = 0.9 + 0.2 * uniform_unit(att_rng);
                att.weights[row * n + pos] = static_cast<float>(base * jitter);
            }
        }
        out.attention.push_back(std::move(att));
        out.anchors.push_back(std::move(anchors));
    }
    return out;
}

void write_synthetic(const SynthData& data, const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        fail(ErrorKind::Io, "cannot create directory '" + dir + "': " + ec.message());
    }
    const std::filesystem::path base(dir);
    write_mvec(data.corpus, (base / "corpus.mvec").string());
    write_mvec(data.queries, (base / "queries.mvec").string());
    write_attention(data.attention, (base / "corpus.matt").string());
    write_qrels(data.qrels, (base / "qrels.txt").string());
}

} // namespace mvpress
