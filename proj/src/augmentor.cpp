#include "lexharvest/augmentor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lexharvest/rng.hpp"

namespace lexharvest::augmentor {

using nlohmann::json;

void HarvestReport::merge(const HarvestReport& other) {
    scanned += other.scanned;
    trigger_hits += other.trigger_hits;
    seed_hits += other.seed_hits;
    gate_pass_negative += other.gate_pass_negative;
    gate_pass_positive += other.gate_pass_positive;
    below_threshold += other.below_threshold;
    duplicates_dropped += other.duplicates_dropped;
    emitted_tweets += other.emitted_tweets;
    for (const auto& [key, count] : other.emitted) emitted[key] += count;
}

void HarvestReport::finalize() {
    const std::uint64_t gated = gate_pass_negative + gate_pass_positive;
    negative_gate_rate =
        gated ? static_cast<double>(gate_pass_negative) / static_cast<double>(gated) : 0.0;
}

void HarvestReport::validate() const {
    const auto fail = [](const std::string& what) {
        throw DataError("inconsistent harvest report: " + what);
    };
    if (trigger_hits > scanned) fail("trigger_hits > scanned");
    if (seed_hits > trigger_hits) fail("seed_hits > trigger_hits");
    const std::uint64_t gated = gate_pass_negative + gate_pass_positive;
    if (mode == "positive") {
        if (gated != seed_hits) fail("gated count != seed_hits in positive mode");
        if (emitted_tweets + below_threshold + duplicates_dropped != gate_pass_negative) {
            fail("emitted_tweets + below_threshold != negative gate passes");
        }
    } else if (mode == "negative") {
        if (gated != trigger_hits - seed_hits) {
            fail("gated count != unseeded trigger hits in negative mode");
        }
        if (emitted_tweets + below_threshold + duplicates_dropped != gate_pass_positive) {
            fail("emitted_tweets + below_threshold != positive gate passes");
        }
    } else {
        fail("unknown mode '" + mode + "'");
    }
    std::uint64_t emitted_records = 0;
    for (const auto& [key, count] : emitted) emitted_records += count;
    if (emitted_records < emitted_tweets) fail("emitted record count < emitted tweet count");
    if (emitted_records > 2 * emitted_tweets) fail("emitted record count > 2x emitted tweets");
}

std::string HarvestReport::to_json() const {
    json j;
    j["mode"] = mode;
    j["scanned"] = scanned;
    j["trigger_hits"] = trigger_hits;
    j["seed_hits"] = seed_hits;
    j["gate_pass"] = {{"negative", gate_pass_negative}, {"positive", gate_pass_positive}};
    j["below_threshold"] = below_threshold;
    j["duplicates_dropped"] = duplicates_dropped;
    j["emitted_tweets"] = emitted_tweets;
    j["emitted"] = emitted;
    j["negative_gate_rate"] = negative_gate_rate;
    return j.dump(2);
}

namespace {

constexpr const char* kOffPool = "offensive/OFF";
constexpr const char* kHsPool = "hate_speech/HS";
constexpr const char* kCleanPool = "clean";

enum class Mode { positive, negative };

// Per-record outcome, independent of threading.
struct Outcome {
    HarvestReport tally;  // counter deltas for this record only
    std::vector<HarvestRecord> records;
};

Outcome process_one(const normalizer::NormalizedTweet& tweet, const lexicon::Matcher& matcher,
                    const affect::Gate& gate, Mode mode, double threshold) {
    Outcome out;
    out.tally.scanned = 1;
    const lexicon::MatchResult match = matcher.match(tweet.tokens);
    if (!match.trigger_present) return out;
    out.tally.trigger_hits = 1;
    const bool seeded = !match.offensive_hits.empty() || !match.hateful_hits.empty();
    if (seeded) out.tally.seed_hits = 1;
    const bool eligible = mode == Mode::positive ? seeded : !seeded;
    if (!eligible) return out;

    const affect::PolarityLabel verdict = gate.score(tweet);
    if (verdict.polarity == affect::Polarity::negative) {
        out.tally.gate_pass_negative = 1;
    } else {
        out.tally.gate_pass_positive = 1;
    }
    const affect::Polarity wanted =
        mode == Mode::positive ? affect::Polarity::negative : affect::Polarity::positive;
    if (verdict.polarity != wanted) return out;
    if (verdict.score < threshold) {
        out.tally.below_threshold = 1;
        return out;
    }

    out.tally.emitted_tweets = 1;
    if (mode == Mode::positive) {
        if (!match.offensive_hits.empty()) {
            HarvestRecord rec;
            rec.tweet = tweet;
            rec.task = corpus_io::Task::offensive;
            rec.label = corpus_io::positive_label(corpus_io::Task::offensive);
            rec.evidence = {match.offensive_hits, match.hateful_hits, verdict.polarity,
                            verdict.score, "positive/offensive"};
            out.records.push_back(std::move(rec));
        }
        if (!match.hateful_hits.empty()) {
            HarvestRecord rec;
            rec.tweet = tweet;
            rec.task = corpus_io::Task::hate_speech;
            rec.label = corpus_io::positive_label(corpus_io::Task::hate_speech);
            rec.evidence = {match.offensive_hits, match.hateful_hits, verdict.polarity,
                            verdict.score, "positive/hate_speech"};
            out.records.push_back(std::move(rec));
        }
    } else {
        HarvestRecord rec;
        rec.tweet = tweet;
        rec.task = corpus_io::Task::offensive;
        rec.label = corpus_io::negative_label(corpus_io::Task::offensive);
        rec.evidence = {{}, {}, verdict.polarity, verdict.score, "negative/clean"};
        out.records.push_back(std::move(rec));
    }
    return out;
}

// Sort by id (ties by text for stability across thread interleavings), then
// drop records whose id already appeared in the same pool. Tweet-level
// duplicate accounting happens in finish(), over all pools at once.
void canonicalize_pool(std::vector<HarvestRecord>& pool) {
    std::sort(pool.begin(), pool.end(), [](const HarvestRecord& a, const HarvestRecord& b) {
        if (a.tweet.id != b.tweet.id) return a.tweet.id < b.tweet.id;
        return a.tweet.text < b.tweet.text;
    });
    const auto last = std::unique(pool.begin(), pool.end(),
                                  [](const HarvestRecord& a, const HarvestRecord& b) {
                                      return a.tweet.id == b.tweet.id;
                                  });
    pool.erase(last, pool.end());
}

void route(Outcome&& outcome, HarvestOutput& output) {
    output.report.merge(outcome.tally);
    for (auto& rec : outcome.records) {
        if (rec.evidence.rule == "negative/clean") {
            output.clean.push_back(std::move(rec));
        } else if (rec.task == corpus_io::Task::offensive) {
            output.offensive.push_back(std::move(rec));
        } else {
            output.hateful.push_back(std::move(rec));
        }
    }
}

void finish(HarvestOutput& output, Mode mode) {
    canonicalize_pool(output.offensive);
    canonicalize_pool(output.hateful);
    canonicalize_pool(output.clean);

    // A tweet dropped from one pool as a duplicate may survive in the other;
    // emitted_tweets counts distinct ids that remain anywhere.
    std::unordered_set<std::string> ids;
    for (const auto* pool : {&output.offensive, &output.hateful, &output.clean}) {
        for (const auto& rec : *pool) ids.insert(rec.tweet.id);
    }
    HarvestReport& r = output.report;
    r.duplicates_dropped += r.emitted_tweets - ids.size();
    r.emitted_tweets = ids.size();
    r.mode = mode == Mode::positive ? "positive" : "negative";
    r.emitted.clear();
    if (mode == Mode::positive) {
        r.emitted[kOffPool] = output.offensive.size();
        r.emitted[kHsPool] = output.hateful.size();
    } else {
        r.emitted[kCleanPool] = output.clean.size();
    }
    r.finalize();
    r.validate();
}

HarvestOutput harvest_serial(std::span<const normalizer::NormalizedTweet> corpus,
                             const lexicon::Matcher& matcher, const affect::Gate& gate, Mode mode,
                             double threshold) {
    HarvestOutput output;
    for (const auto& tweet : corpus) {
        try {
            route(process_one(tweet, matcher, gate, mode, threshold), output);
        } catch (const DataError& e) {
            output.report.mode = mode == Mode::positive ? "positive" : "negative";
            output.report.finalize();
            throw GateError(std::string("gate failure: ") + e.what(), output.report);
        }
    }
    finish(output, mode);
    return output;
}

HarvestOutput harvest_parallel(std::span<const normalizer::NormalizedTweet> corpus,
                               const lexicon::Matcher& matcher, const affect::Gate& gate, Mode mode,
                               double threshold, int jobs) {
#ifndef _OPENMP
    (void)jobs;
    return harvest_serial(corpus, matcher, gate, mode, threshold);
#else
    if (jobs == 1 || corpus.size() < 2) return harvest_serial(corpus, matcher, gate, mode, threshold);
    const int threads = jobs > 0 ? jobs : omp_get_max_threads();

    std::vector<HarvestOutput> locals(static_cast<std::size_t>(threads));
    std::atomic<bool> failed{false};
    std::string first_error;

    #pragma omp parallel num_threads(threads)
    {
        HarvestOutput& local = locals[static_cast<std::size_t>(omp_get_thread_num())];
        #pragma omp for schedule(dynamic, 256)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(corpus.size()); ++i) {
            if (failed.load(std::memory_order_relaxed)) continue;
            try {
                route(process_one(corpus[static_cast<std::size_t>(i)], matcher, gate, mode,
                                  threshold),
                      local);
            } catch (const DataError& e) {
                #pragma omp critical(lexharvest_harvest_error)
                {
                    if (!failed.load(std::memory_order_relaxed)) {
                        first_error = e.what();
                        failed.store(true, std::memory_order_relaxed);
                    }
                }
            }
        }
    }

    HarvestOutput output;
    for (auto& local : locals) {
        output.report.merge(local.report);
        for (auto* pool : {&local.offensive, &local.hateful, &local.clean}) {
            auto* dest = pool == &local.offensive ? &output.offensive
                         : pool == &local.hateful ? &output.hateful
                                                  : &output.clean;
            dest->insert(dest->end(), std::make_move_iterator(pool->begin()),
                         std::make_move_iterator(pool->end()));
        }
    }
    if (failed.load()) {
        output.report.mode = mode == Mode::positive ? "positive" : "negative";
        output.report.finalize();
        throw GateError("gate failure: " + first_error, output.report);
    }
    finish(output, mode);
    return output;
#endif
}

}  // namespace

HarvestOutput harvest_positive(std::span<const normalizer::NormalizedTweet> corpus,
                               const lexicon::Matcher& matcher, const affect::Gate& gate,
                               double threshold, int jobs) {
    return harvest_parallel(corpus, matcher, gate, Mode::positive, threshold, jobs);
}

HarvestOutput harvest_negative(std::span<const normalizer::NormalizedTweet> corpus,
                               const lexicon::Matcher& matcher, const affect::Gate& gate,
                               double threshold, int jobs) {
    return harvest_parallel(corpus, matcher, gate, Mode::negative, threshold, jobs);
}

namespace serial {

HarvestOutput harvest_positive(std::span<const normalizer::NormalizedTweet> corpus,
                               const lexicon::Matcher& matcher, const affect::Gate& gate,
                               double threshold) {
    return harvest_serial(corpus, matcher, gate, Mode::positive, threshold);
}

HarvestOutput harvest_negative(std::span<const normalizer::NormalizedTweet> corpus,
                               const lexicon::Matcher& matcher, const affect::Gate& gate,
                               double threshold) {
    return harvest_serial(corpus, matcher, gate, Mode::negative, threshold);
}

}  // namespace serial

bool revalidate(const HarvestRecord& record, const lexicon::Matcher& matcher,
                const affect::Gate& gate, double threshold) {
    const lexicon::MatchResult match = matcher.match(record.tweet.tokens);
    if (!match.trigger_present) return false;
    const affect::PolarityLabel verdict = gate.score(record.tweet);
    if (verdict.score < threshold) return false;

    const bool is_positive = record.label == corpus_io::positive_label(record.task);
    if (is_positive) {
        if (verdict.polarity != affect::Polarity::negative) return false;
        const auto& hits = record.task == corpus_io::Task::offensive ? match.offensive_hits
                                                                     : match.hateful_hits;
        return !hits.empty();
    }
    if (verdict.polarity != affect::Polarity::positive) return false;
    return match.offensive_hits.empty() && match.hateful_hits.empty();
}

corpus_io::Dataset materialize(std::span<const HarvestRecord> records, corpus_io::Task task) {
    std::vector<corpus_io::Dataset::Row> rows;
    rows.reserve(records.size());
    for (const auto& rec : records) {
        std::string label = rec.label;
        if (rec.evidence.rule == "negative/clean") {
            label = corpus_io::negative_label(task);
        } else if (rec.task != task) {
            throw DataError("cannot materialize a " +
                            std::string(corpus_io::task_name(rec.task)) + " record into a " +
                            std::string(corpus_io::task_name(task)) + " dataset (id " +
                            rec.tweet.id + ")");
        }
        rows.push_back({{rec.tweet.id, rec.tweet.text}, std::move(label)});
    }
    return corpus_io::make_dataset(task, std::move(rows));
}

corpus_io::Dataset balance(const corpus_io::Dataset& positives,
                           const corpus_io::Dataset& negative_pool, double target_prevalence,
                           std::uint64_t rng_seed) {
    if (!(target_prevalence > 0.0 && target_prevalence < 1.0)) {
        throw UsageError("target prevalence must lie in (0,1), got " +
                         std::to_string(target_prevalence));
    }
    if (positives.records.empty()) throw DataError("balance: positive set is empty");

    const corpus_io::Task task = positives.task;
    const std::string pos_label{corpus_io::positive_label(task)};
    const std::string neg_label{corpus_io::negative_label(task)};
    for (const auto& row : positives.records) {
        if (row.label != pos_label) {
            throw DataError("balance: positive set contains non-positive label '" + row.label +
                            "' (id " + row.tweet.id + ")");
        }
    }

    const auto n_pos = positives.records.size();
    const double exact_total = static_cast<double>(n_pos) / target_prevalence;
    const auto total = static_cast<std::uint64_t>(std::nearbyint(exact_total));
    const std::uint64_t required = total > n_pos ? total - n_pos : 0;

    std::vector<corpus_io::Dataset::Row> drawn;
    const auto pool_size = negative_pool.records.size();
    if (required >= pool_size) {
        drawn.reserve(pool_size);
        for (const auto& row : negative_pool.records) drawn.push_back(row);
    } else {
        Rng rng(rng_seed);
        const auto picks = sample_without_replacement(pool_size, static_cast<std::size_t>(required), rng);
        drawn.reserve(picks.size());
        for (const auto idx : picks) drawn.push_back(negative_pool.records[idx]);
    }
    for (auto& row : drawn) row.label = neg_label;

    const auto by_id = [](const corpus_io::Dataset::Row& a, const corpus_io::Dataset::Row& b) {
        return a.tweet.id < b.tweet.id;
    };
    std::vector<corpus_io::Dataset::Row> rows(positives.records.begin(), positives.records.end());
    std::sort(rows.begin(), rows.end(), by_id);
    std::sort(drawn.begin(), drawn.end(), by_id);
    rows.insert(rows.end(), std::make_move_iterator(drawn.begin()),
                std::make_move_iterator(drawn.end()));

    corpus_io::Dataset out = corpus_io::make_dataset(task, std::move(rows));
    {
        std::ostringstream target;
        target << target_prevalence;
        out.notes["target_prevalence"] = target.str();
    }
    out.notes["required_negatives"] = std::to_string(required);
    out.notes["drawn_negatives"] = std::to_string(out.records.size() - n_pos);
    if (required > pool_size) {
        out.notes["pool_short"] = "true";
        std::ostringstream achieved;
        achieved << n_pos << "/" << out.records.size();
        out.notes["achieved_prevalence"] = achieved.str();
    }
    return out;
}

corpus_io::Dataset merge_with_gold(const corpus_io::Dataset& gold,
                                   const corpus_io::Dataset& augmented, MergeMode mode) {
    if (gold.task != augmented.task) {
        throw DataError("merge: task mismatch (" + std::string(corpus_io::task_name(gold.task)) +
                        " vs " + std::string(corpus_io::task_name(augmented.task)) + ")");
    }
    if (corpus_io::has_open_label_set(gold.task)) {
        std::set<std::string> gold_labels, aug_labels;
        for (const auto& row : gold.records) gold_labels.insert(row.label);
        for (const auto& row : augmented.records) aug_labels.insert(row.label);
        if (gold_labels != aug_labels) throw DataError("merge: label sets differ between sources");
    }
    if (mode == MergeMode::augmented_only) {
        corpus_io::Dataset out = augmented;
        out.notes["merge_mode"] = "augmented_only";
        return out;
    }

    std::unordered_set<std::string> seen;
    seen.reserve(augmented.records.size());
    for (const auto& row : augmented.records) seen.insert(row.tweet.id);
    std::vector<corpus_io::Dataset::Row> rows(augmented.records.begin(), augmented.records.end());
    for (const auto& row : gold.records) {
        if (!seen.insert(row.tweet.id).second) {
            throw DataError("merge: id '" + row.tweet.id + "' appears in both sources");
        }
        rows.push_back(row);
    }
    corpus_io::Dataset out = corpus_io::make_dataset(gold.task, std::move(rows));
    out.notes["merge_mode"] = "concat";
    return out;
}

void write_evidence(std::span<const HarvestRecord> records, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path);
    for (const auto& rec : records) {
        json j;
        j["id"] = rec.tweet.id;
        j["task"] = std::string(corpus_io::task_name(rec.task));
        j["label"] = rec.label;
        j["offensive_seeds"] = rec.evidence.offensive_seeds;
        j["hateful_seeds"] = rec.evidence.hateful_seeds;
        j["polarity"] = std::string(affect::polarity_name(rec.evidence.polarity));
        j["score"] = rec.evidence.score;
        j["rule"] = rec.evidence.rule;
        out << j.dump() << '\n';
    }
    if (!out) throw DataError("write failed: " + path);
}

}  // namespace lexharvest::augmentor
