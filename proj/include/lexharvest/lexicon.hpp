#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lexharvest/normalizer.hpp"

namespace lexharvest::lexicon {

struct CandidateSeed {
    std::string surface;            // single normalized token, never the trigger
    std::uint64_t frequency = 0;    // trigger-adjacent occurrences
    std::vector<std::string> sample_ids;  // up to 5 evidencing tweet ids
};

enum class SeedCategory { offensive, hateful };
std::string_view category_name(SeedCategory c);

enum class Provenance { extracted, manually_added };

struct SeedLexicon {
    SeedCategory category = SeedCategory::offensive;
    std::map<std::string, Provenance> entries;  // sorted for determinism

    bool contains(std::string_view token) const {
        return entries.find(std::string(token)) != entries.end();
    }
    std::size_t size() const { return entries.size(); }

    // Plain UTF-8 file, one token per line, '#'-prefixed comments ignored.
    // Entries must already be normalized; loading marks them manually_added.
    static SeedLexicon load(const std::string& path, SeedCategory category);
    void save(const std::string& path) const;
};

struct ExtractionStats {
    std::uint64_t trigger_occurrences_with_successor = 0;
    std::uint64_t excluded_placeholder = 0;  // successor was USER/URL/HASH/NUM
    std::uint64_t excluded_trigger = 0;      // successor was the trigger itself
};

// Collects the token immediately following each trigger occurrence, ranked
// by frequency descending then surface ascending. Placeholder tokens and the
// trigger itself are excluded as candidates (tallied in stats instead).
std::vector<CandidateSeed> extract_candidates(
    std::span<const normalizer::NormalizedTweet> corpus, const std::string& trigger,
    ExtractionStats* stats = nullptr, int jobs = 1);

namespace serial {
std::vector<CandidateSeed> extract_candidates(
    std::span<const normalizer::NormalizedTweet> corpus, const std::string& trigger,
    ExtractionStats* stats = nullptr);
}  // namespace serial

// Candidate table: surface \t frequency \t comma-joined sample ids.
void write_candidates(const std::vector<CandidateSeed>& candidates, const std::string& path);
std::vector<CandidateSeed> read_candidates(const std::string& path);

enum class Verdict { offensive, hateful, drop, pending };
std::string_view verdict_name(Verdict v);
Verdict verdict_from_name(std::string_view name);

// Decision file: surface \t verdict, replayable and resumable.
using DecisionMap = std::map<std::string, Verdict>;
DecisionMap read_decisions(const std::string& path);
void write_decisions(const DecisionMap& decisions, const std::string& path);

struct CurationResult {
    SeedLexicon offensive;
    SeedLexicon hateful;
    std::vector<std::string> pending;  // unresolved surfaces, sorted
    bool complete = false;
};

// Pure replay of a decision map over a candidate list. Decisions naming a
// surface absent from the candidates are an error.
CurationResult curate(const std::vector<CandidateSeed>& candidates, const DecisionMap& decisions);

struct MatchResult {
    std::vector<std::string> offensive_hits;  // occurrences in token order
    std::vector<std::string> hateful_hits;
    bool trigger_present = false;
};

// Immutable token-exact matcher over the trigger and one or two lexica,
// resolved with a single hash lookup per token. Safe to share across threads.
class Matcher {
public:
    Matcher(std::optional<SeedLexicon> offensive, std::optional<SeedLexicon> hateful,
            std::string trigger);

    MatchResult match(std::span<const std::string> tokens) const;

    std::size_t offensive_size() const { return offensive_size_; }
    std::size_t hateful_size() const { return hateful_size_; }
    const std::string& trigger() const { return trigger_; }
    bool has_offensive() const { return has_offensive_; }
    bool has_hateful() const { return has_hateful_; }

private:
    enum : std::uint8_t { kTrigger = 1, kOffensive = 2, kHateful = 4 };
    std::unordered_map<std::string, std::uint8_t> table_;
    std::string trigger_;
    std::size_t offensive_size_ = 0;
    std::size_t hateful_size_ = 0;
    bool has_offensive_ = false;
    bool has_hateful_ = false;
};

}  // namespace lexharvest::lexicon
