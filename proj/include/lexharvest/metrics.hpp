#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lexharvest/corpus_io.hpp"

namespace lexharvest::experiment {

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::uint64_t support = 0;
};

struct Metrics {
    double accuracy = 0.0;
    std::map<std::string, ClassMetrics> per_class;  // over the gold label set
    double macro_f1 = 0.0;

    std::string to_json_string() const;
    // Aligned text table: one row per class plus accuracy/macro summary.
    std::string to_table() const;
};

// Reconciles predictions to gold by id; throws DataError listing missing and
// extra ids. Zero-denominator precision/recall/F1 are 0 by convention, and
// macro F1 averages over labels present in gold.
Metrics evaluate(const corpus_io::Dataset& gold, const corpus_io::Dataset& predicted);

// Same computation over pre-aligned label vectors (used by the trainer's
// epoch selection; evaluate() delegates here after reconciling ids).
Metrics evaluate_labels(const std::vector<std::string>& gold,
                        const std::vector<std::string>& predicted);

}  // namespace lexharvest::experiment
