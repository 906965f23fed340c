#include "lexharvest/lexicon.hpp"

#include <algorithm>
#include <fstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lexharvest/errors.hpp"

namespace lexharvest::lexicon {

std::string_view category_name(SeedCategory c) {
    return c == SeedCategory::offensive ? "offensive" : "hateful";
}

SeedLexicon SeedLexicon::load(const std::string& path, SeedCategory category) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open lexicon file: " + path);
    SeedLexicon lex;
    lex.category = category;
    std::string line;
    std::uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        // trim ASCII whitespace at both ends
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t");
        std::string token = line.substr(first, last - first + 1);
        if (token[0] == '#') continue;
        if (normalizer::normalize(token) != token) {
            throw DataError(path + ": line " + std::to_string(line_no) + ": entry '" + token +
                            "' is not in normalized form");
        }
        if (token.find(' ') != std::string::npos) {
            throw DataError(path + ": line " + std::to_string(line_no) +
                            ": entry must be a single token");
        }
        lex.entries.emplace(std::move(token), Provenance::manually_added);
    }
    return lex;
}

void SeedLexicon::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << "# " << category_name(category) << " seed lexicon, " << entries.size()
        << " entries\n";
    for (const auto& [token, prov] : entries) {
        (void)prov;
        out << token << '\n';
    }
    if (!out) throw DataError("write failed: " + path);
}

namespace {

struct CandidateAccumulator {
    // surface -> (frequency, up to 5 (record_index, id) samples kept by
    // smallest record index so parallel merges stay deterministic)
    struct Entry {
        std::uint64_t frequency = 0;
        std::vector<std::pair<std::size_t, std::string>> samples;
    };
    std::unordered_map<std::string, Entry> by_surface;
    ExtractionStats stats;

    void add(const std::string& surface, std::size_t record_index, const std::string& id) {
        auto& e = by_surface[surface];
        ++e.frequency;
        e.samples.emplace_back(record_index, id);
        std::sort(e.samples.begin(), e.samples.end());
        e.samples.erase(std::unique(e.samples.begin(), e.samples.end()), e.samples.end());
        if (e.samples.size() > 5) e.samples.resize(5);
    }

    void merge(CandidateAccumulator&& other) {
        for (auto& [surface, entry] : other.by_surface) {
            auto& e = by_surface[surface];
            e.frequency += entry.frequency;
            e.samples.insert(e.samples.end(), entry.samples.begin(), entry.samples.end());
            std::sort(e.samples.begin(), e.samples.end());
            e.samples.erase(std::unique(e.samples.begin(), e.samples.end()), e.samples.end());
            if (e.samples.size() > 5) e.samples.resize(5);
        }
        stats.trigger_occurrences_with_successor += other.stats.trigger_occurrences_with_successor;
        stats.excluded_placeholder += other.stats.excluded_placeholder;
        stats.excluded_trigger += other.stats.excluded_trigger;
    }

    void scan(const normalizer::NormalizedTweet& tweet, std::size_t record_index,
              const std::string& trigger) {
        const auto& toks = tweet.tokens;
        for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
            if (toks[i] != trigger) continue;
            ++stats.trigger_occurrences_with_successor;
            const std::string& successor = toks[i + 1];
            if (normalizer::is_placeholder(successor)) {
                ++stats.excluded_placeholder;
                continue;
            }
            if (successor == trigger) {
                ++stats.excluded_trigger;
                continue;
            }
            add(successor, record_index, tweet.id);
        }
    }

    std::vector<CandidateSeed> ranked() const {
        std::vector<CandidateSeed> out;
        out.reserve(by_surface.size());
        for (const auto& [surface, entry] : by_surface) {
            CandidateSeed c;
            c.surface = surface;
            c.frequency = entry.frequency;
            for (const auto& [idx, id] : entry.samples) {
                (void)idx;
                c.sample_ids.push_back(id);
            }
            out.push_back(std::move(c));
        }
        std::sort(out.begin(), out.end(), [](const CandidateSeed& a, const CandidateSeed& b) {
            if (a.frequency != b.frequency) return a.frequency > b.frequency;
            return a.surface < b.surface;
        });
        return out;
    }
};

}  // namespace

namespace serial {

std::vector<CandidateSeed> extract_candidates(
    std::span<const normalizer::NormalizedTweet> corpus, const std::string& trigger,
    ExtractionStats* stats) {
    CandidateAccumulator acc;
    for (std::size_t i = 0; i < corpus.size(); ++i) acc.scan(corpus[i], i, trigger);
    if (stats) *stats = acc.stats;
    return acc.ranked();
}

}  // namespace serial

std::vector<CandidateSeed> extract_candidates(
    std::span<const normalizer::NormalizedTweet> corpus, const std::string& trigger,
    ExtractionStats* stats, int jobs) {
    if (jobs <= 1) return serial::extract_candidates(corpus, trigger, stats);

    CandidateAccumulator total;
#ifdef _OPENMP
#pragma omp parallel num_threads(jobs)
    {
        CandidateAccumulator local;
#pragma omp for schedule(static) nowait
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(corpus.size()); ++i) {
            local.scan(corpus[static_cast<std::size_t>(i)], static_cast<std::size_t>(i), trigger);
        }
#pragma omp critical
        total.merge(std::move(local));
    }
#else
    for (std::size_t i = 0; i < corpus.size(); ++i) total.scan(corpus[i], i, trigger);
#endif
    if (stats) *stats = total.stats;
    return total.ranked();
}

void write_candidates(const std::vector<CandidateSeed>& candidates, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << "surface\tfrequency\tsample_ids\n";
    for (const auto& c : candidates) {
        out << c.surface << '\t' << c.frequency << '\t';
        for (std::size_t i = 0; i < c.sample_ids.size(); ++i) {
            if (i > 0) out << ',';
            out << c.sample_ids[i];
        }
        out << '\n';
    }
    if (!out) throw DataError("write failed: " + path);
}

std::vector<CandidateSeed> read_candidates(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open candidates file: " + path);
    std::vector<CandidateSeed> out;
    std::string line;
    std::uint64_t line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (first) {
            first = false;
            if (line == "surface\tfrequency\tsample_ids") continue;
        }
        if (line.empty()) continue;
        const auto tab1 = line.find('\t');
        const auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
        if (tab1 == std::string::npos || tab2 == std::string::npos) {
            throw DataError(path + ": line " + std::to_string(line_no) + ": expected 3 columns");
        }
        CandidateSeed c;
        c.surface = line.substr(0, tab1);
        try {
            c.frequency = std::stoull(line.substr(tab1 + 1, tab2 - tab1 - 1));
        } catch (const std::exception&) {
            throw DataError(path + ": line " + std::to_string(line_no) + ": bad frequency");
        }
        std::string ids = line.substr(tab2 + 1);
        std::size_t start = 0;
        while (start < ids.size()) {
            const auto comma = ids.find(',', start);
            const auto end = comma == std::string::npos ? ids.size() : comma;
            if (end > start) c.sample_ids.push_back(ids.substr(start, end - start));
            start = end + 1;
        }
        out.push_back(std::move(c));
    }
    return out;
}

std::string_view verdict_name(Verdict v) {
    switch (v) {
        case Verdict::offensive: return "offensive";
        case Verdict::hateful: return "hateful";
        case Verdict::drop: return "drop";
        case Verdict::pending: return "pending";
    }
    return "?";
}

Verdict verdict_from_name(std::string_view name) {
    if (name == "offensive") return Verdict::offensive;
    if (name == "hateful") return Verdict::hateful;
    if (name == "drop") return Verdict::drop;
    if (name == "pending") return Verdict::pending;
    throw DataError("unknown verdict: '" + std::string(name) + "'");
}

DecisionMap read_decisions(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open decisions file: " + path);
    DecisionMap out;
    std::string line;
    std::uint64_t line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (first) {
            first = false;
            if (line == "surface\tverdict") continue;
        }
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
            throw DataError(path + ": line " + std::to_string(line_no) + ": expected 2 columns");
        }
        std::string surface = line.substr(0, tab);
        Verdict v;
        try {
            v = verdict_from_name(line.substr(tab + 1));
        } catch (const DataError& e) {
            throw DataError(path + ": line " + std::to_string(line_no) + ": " + e.what());
        }
        out[std::move(surface)] = v;
    }
    return out;
}

void write_decisions(const DecisionMap& decisions, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << "surface\tverdict\n";
    for (const auto& [surface, verdict] : decisions) {
        out << surface << '\t' << verdict_name(verdict) << '\n';
    }
    if (!out) throw DataError("write failed: " + path);
}

CurationResult curate(const std::vector<CandidateSeed>& candidates, const DecisionMap& decisions) {
    std::unordered_map<std::string, bool> known;
    known.reserve(candidates.size());
    for (const auto& c : candidates) known.emplace(c.surface, true);
    for (const auto& [surface, verdict] : decisions) {
        (void)verdict;
        if (known.find(surface) == known.end()) {
            throw DataError("decision references unknown surface: '" + surface + "'");
        }
    }

    CurationResult result;
    result.offensive.category = SeedCategory::offensive;
    result.hateful.category = SeedCategory::hateful;
    for (const auto& c : candidates) {
        const auto it = decisions.find(c.surface);
        const Verdict v = it == decisions.end() ? Verdict::pending : it->second;
        switch (v) {
            case Verdict::offensive:
                result.offensive.entries.emplace(c.surface, Provenance::extracted);
                break;
            case Verdict::hateful:
                result.hateful.entries.emplace(c.surface, Provenance::extracted);
                break;
            case Verdict::drop:
                break;
            case Verdict::pending:
                result.pending.push_back(c.surface);
                break;
        }
    }
    std::sort(result.pending.begin(), result.pending.end());
    result.complete = result.pending.empty();
    return result;
}

Matcher::Matcher(std::optional<SeedLexicon> offensive, std::optional<SeedLexicon> hateful,
                 std::string trigger)
    : trigger_(std::move(trigger)) {
    if (trigger_.empty()) throw UsageError("matcher trigger must be a non-empty token");
    if (!offensive && !hateful) throw UsageError("matcher needs at least one lexicon");
    if (offensive && offensive->entries.empty()) {
        throw DataError("empty lexicon: offensive");
    }
    if (hateful && hateful->entries.empty()) {
        throw DataError("empty lexicon: hateful");
    }
    table_[trigger_] |= kTrigger;
    if (offensive) {
        has_offensive_ = true;
        offensive_size_ = offensive->entries.size();
        for (const auto& [token, prov] : offensive->entries) {
            (void)prov;
            table_[token] |= kOffensive;
        }
    }
    if (hateful) {
        has_hateful_ = true;
        hateful_size_ = hateful->entries.size();
        for (const auto& [token, prov] : hateful->entries) {
            (void)prov;
            table_[token] |= kHateful;
        }
    }
}

MatchResult Matcher::match(std::span<const std::string> tokens) const {
    MatchResult result;
    for (const auto& token : tokens) {
        const auto it = table_.find(token);
        if (it == table_.end()) continue;
        const std::uint8_t flags = it->second;
        if (flags & kTrigger) result.trigger_present = true;
        if (flags & kOffensive) result.offensive_hits.push_back(token);
        if (flags & kHateful) result.hateful_hits.push_back(token);
    }
    return result;
}

}  // namespace lexharvest::lexicon
