#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lexharvest/affect_gate.hpp"
#include "lexharvest/corpus_io.hpp"
#include "lexharvest/errors.hpp"
#include "lexharvest/lexicon.hpp"
#include "lexharvest/normalizer.hpp"

namespace lexharvest::augmentor {

// Why a tweet was emitted: the seeds that matched, the gate verdict, and the
// rule that fired. Enough to re-run the predicate and get the same answer.
struct Evidence {
    std::vector<std::string> offensive_seeds;  // occurrences in token order
    std::vector<std::string> hateful_seeds;
    affect::Polarity polarity = affect::Polarity::negative;
    double score = 0.0;
    std::string rule;  // "positive/offensive" | "positive/hate_speech" | "negative/clean"
};

struct HarvestRecord {
    normalizer::NormalizedTweet tweet;
    corpus_io::Task task = corpus_io::Task::offensive;
    std::string label;
    Evidence evidence;
};

// Funnel diagnostics for one harvest run. Counters are merged associatively
// across worker threads; derived fields are filled in by finalize().
struct HarvestReport {
    std::string mode;  // "positive" | "negative"
    std::uint64_t scanned = 0;
    std::uint64_t trigger_hits = 0;        // trigger present
    std::uint64_t seed_hits = 0;           // trigger present and >= 1 seed hit
    std::uint64_t gate_pass_negative = 0;  // mode-eligible records gated negative
    std::uint64_t gate_pass_positive = 0;  // mode-eligible records gated positive
    std::uint64_t below_threshold = 0;     // right polarity but score < threshold
    std::uint64_t duplicates_dropped = 0;  // same id emitted twice into one pool
    std::uint64_t emitted_tweets = 0;      // distinct tweets emitted (dual-pool counts once)
    std::map<std::string, std::uint64_t> emitted;  // pool key -> record count
    // Fraction of gated (mode-eligible) records the gate called negative; in
    // positive mode this is the share of seeded tweets with negative polarity.
    double negative_gate_rate = 0.0;

    void merge(const HarvestReport& other);
    void finalize();
    // Throws DataError if the funnel counters are mutually inconsistent.
    void validate() const;
    std::string to_json() const;
};

// Thrown when the gate cannot score an eligible record (external scorer
// protocol violation). Carries the funnel counters accumulated so far so the
// CLI can dump a partial report before exiting.
struct GateError : DataError {
    GateError(const std::string& message, HarvestReport partial_report)
        : DataError(message), partial(std::move(partial_report)) {}
    HarvestReport partial;
};

struct HarvestOutput {
    // Positive mode fills offensive/hateful; negative mode fills clean.
    // Clean records are stored under the offensive task's negative label;
    // balance() relabels them for whichever task consumes the pool.
    std::vector<HarvestRecord> offensive;
    std::vector<HarvestRecord> hateful;
    std::vector<HarvestRecord> clean;
    HarvestReport report;
};

// Positive-pool harvest: emit a record iff the trigger is present, at least
// one seed matches, and the gate calls the tweet negative with score >=
// threshold. A tweet matching both lexica is emitted into both pools.
HarvestOutput harvest_positive(std::span<const normalizer::NormalizedTweet> corpus,
                               const lexicon::Matcher& matcher, const affect::Gate& gate,
                               double threshold = 0.0, int jobs = 0);

// Clean-pool harvest: emit iff the trigger is present, no seed from either
// lexicon matches, and the gate calls the tweet positive with score >=
// threshold.
HarvestOutput harvest_negative(std::span<const normalizer::NormalizedTweet> corpus,
                               const lexicon::Matcher& matcher, const affect::Gate& gate,
                               double threshold = 0.0, int jobs = 0);

namespace serial {
HarvestOutput harvest_positive(std::span<const normalizer::NormalizedTweet> corpus,
                               const lexicon::Matcher& matcher, const affect::Gate& gate,
                               double threshold = 0.0);
HarvestOutput harvest_negative(std::span<const normalizer::NormalizedTweet> corpus,
                               const lexicon::Matcher& matcher, const affect::Gate& gate,
                               double threshold = 0.0);
}  // namespace serial

// Re-runs the emission predicate on one record. Returns true iff matcher and
// gate agree with the record's stored evidence and label.
bool revalidate(const HarvestRecord& record, const lexicon::Matcher& matcher,
                const affect::Gate& gate, double threshold = 0.0);

// Converts harvested records into a labeled dataset for `task`, relabeling
// clean records to the task's negative label. Ids must be unique.
corpus_io::Dataset materialize(std::span<const HarvestRecord> records, corpus_io::Task task);

// Draws round(|positives| / target_prevalence) - |positives| records from the
// negative pool uniformly without replacement (seeded), relabels them to the
// positives' task, and returns positives followed by the drawn negatives,
// each block sorted by id. Rounding is half-to-even on the total. If the pool
// is short, every pool record is taken and notes["achieved_prevalence"] and
// notes["pool_short"] record the shortfall.
corpus_io::Dataset balance(const corpus_io::Dataset& positives, const corpus_io::Dataset& negative_pool,
                           double target_prevalence, std::uint64_t rng_seed);

enum class MergeMode { augmented_only, concat };

// concat appends gold after augmented (id collisions are an error);
// augmented_only returns augmented unchanged. Tasks and label sets must match.
corpus_io::Dataset merge_with_gold(const corpus_io::Dataset& gold, const corpus_io::Dataset& augmented,
                                   MergeMode mode);

// Evidence sidecar: one JSON object per emitted record.
void write_evidence(std::span<const HarvestRecord> records, const std::string& path);

}  // namespace lexharvest::augmentor
