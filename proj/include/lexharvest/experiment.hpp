#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lexharvest/affect_gate.hpp"
#include "lexharvest/corpus_io.hpp"
#include "lexharvest/lexicon.hpp"
#include "lexharvest/metrics.hpp"
#include "lexharvest/normalizer.hpp"

namespace lexharvest::experiment {

// Trains a task head, either from scratch or warm-started from `init`. A
// warm start adopts init's feature space wholesale; the head itself is always
// freshly seeded for the task's label set. config.feature conflicting with
// the adopted space is an error.
affect::ModelCheckpoint train_task(const corpus_io::Dataset& data,
                                   const affect::TrainConfig& config,
                                   const affect::ModelCheckpoint* init = nullptr,
                                   const corpus_io::Dataset* dev = nullptr);

// Argmax label per tweet; output order equals input order.
corpus_io::Dataset predict(const affect::ModelCheckpoint& checkpoint,
                           std::span<const normalizer::NormalizedTweet> corpus, int jobs = 0);

namespace serial {
corpus_io::Dataset predict(const affect::ModelCheckpoint& checkpoint,
                           std::span<const normalizer::NormalizedTweet> corpus);
}  // namespace serial

// Per-split label counts with whole-percent shares recomputed from the
// counts on demand (percentages are never stored).
struct DistributionReport {
    corpus_io::Task task = corpus_io::Task::offensive;
    struct Row {
        std::string name;
        std::uint64_t total = 0;
        std::map<std::string, std::uint64_t> counts;
    };
    std::vector<Row> rows;

    static int percent(std::uint64_t count, std::uint64_t total);
    std::string to_json() const;
    std::string to_table() const;
};

DistributionReport distribution_report(
    const std::vector<std::pair<std::string, const corpus_io::Dataset*>>& splits);

// Per-class polarity breakdown: how many records of each gold label the gate
// calls negative vs positive.
struct AffectReport {
    struct Row {
        std::uint64_t negative = 0;
        std::uint64_t positive = 0;
    };
    std::map<std::string, Row> per_label;

    std::string to_json() const;
    std::string to_table() const;
};

AffectReport affect_distribution(const corpus_io::Dataset& data, const affect::Gate& gate);

// Token frequencies over the positive-class records, with seeds and
// normalization placeholders excluded; top k by frequency then
// lexicographically.
std::vector<std::pair<std::string, std::uint64_t>> top_unigrams(
    const corpus_io::Dataset& data, const std::vector<const lexicon::SeedLexicon*>& exclude,
    std::size_t k);

}  // namespace lexharvest::experiment
