#pragma once

#include "mvpress/corpus.hpp"
#include "mvpress/trec.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace mvpress {

/// Redundant, noisy documents built from a few unit-norm concepts. Every
/// document holds `concepts` orthonormal vectors, each repeated
/// `redundancy` times with isotropic Gaussian noise, then shuffled.
struct SynthSpec {
    std::size_t doc_count = 10;
    std::size_t concepts = 4;
    std::size_t redundancy = 10;
    double sigma = 0.05;
    std::size_t dim = 32;
    std::uint64_t seed = 0;
    /// Make concepts orthogonal across all documents (needs dim >= doc_count * concepts).
    bool global_orthogonal = false;
    std::uint32_t psi = 2;
    std::uint32_t heads = 2;

    void validate() const;
};

/// Ids of document i and of its concept query; zero padded so lexical and
/// numeric order agree.
std::string synth_doc_id(std::size_t i, std::size_t doc_count);
std::string synth_query_id(std::size_t i, std::size_t doc_count);

struct SynthData {
    Corpus corpus;
    Corpus queries; // one per document: its clean concept vectors
    std::vector<AttentionSidecar> attention;
    Qrels qrels;    // each query judges its own document grade 1
    /// Per document, the position of each concept's anchor copy.
    std::vector<std::vector<std::size_t>> anchors;
};

/// One anchor copy of each concept receives 0.9 of the attention mass
/// (split evenly); all other positions share 0.1. Each (query token, head)
/// row is the base profile with +/-10% multiplicative jitter.
SynthData generate_synthetic(const SynthSpec& spec);

/// Writes corpus.mvec, queries.mvec, corpus.matt and qrels.txt into dir.
void write_synthetic(const SynthData& data, const std::string& dir);

} // namespace mvpress
