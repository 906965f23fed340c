#include "lexharvest/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lexharvest/errors.hpp"

namespace lexharvest::experiment {

using nlohmann::json;

affect::ModelCheckpoint train_task(const corpus_io::Dataset& data,
                                   const affect::TrainConfig& config,
                                   const affect::ModelCheckpoint* init,
                                   const corpus_io::Dataset* dev) {
    if (!init) return affect::train_model(data, config, "scratch", std::nullopt, dev);

    if (config.feature && *config.feature != init->feature_spec) {
        throw UsageError(
            "explicit feature configuration conflicts with the warm-start checkpoint's "
            "feature space; drop the override or retrain the source model");
    }
    const std::string tag = "warm:" + std::string(corpus_io::task_name(init->task));
    return affect::train_model(data, config, tag, init->feature_spec, dev);
}

namespace {

corpus_io::Dataset rows_to_dataset(corpus_io::Task task,
                                   std::vector<corpus_io::Dataset::Row> rows) {
    corpus_io::Dataset out = corpus_io::make_dataset(task, std::move(rows));
    return out;
}

}  // namespace

corpus_io::Dataset predict(const affect::ModelCheckpoint& checkpoint,
                           std::span<const normalizer::NormalizedTweet> corpus, int jobs) {
    if (checkpoint.label_set.size() < 2) throw UsageError("checkpoint has fewer than 2 labels");
    std::vector<corpus_io::Dataset::Row> rows(corpus.size());
#ifdef _OPENMP
    #pragma omp parallel for schedule(dynamic, 256) num_threads(jobs > 0 ? jobs : omp_get_max_threads())
#endif
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(corpus.size()); ++i) {
        const auto& tweet = corpus[static_cast<std::size_t>(i)];
        const auto features = affect::featurize(checkpoint.feature_spec, tweet.text);
        rows[static_cast<std::size_t>(i)] = {{tweet.id, tweet.text},
                                             checkpoint.predict_label(features)};
    }
    (void)jobs;
    return rows_to_dataset(checkpoint.task, std::move(rows));
}

namespace serial {

corpus_io::Dataset predict(const affect::ModelCheckpoint& checkpoint,
                           std::span<const normalizer::NormalizedTweet> corpus) {
    if (checkpoint.label_set.size() < 2) throw UsageError("checkpoint has fewer than 2 labels");
    std::vector<corpus_io::Dataset::Row> rows;
    rows.reserve(corpus.size());
    for (const auto& tweet : corpus) {
        const auto features = affect::featurize(checkpoint.feature_spec, tweet.text);
        rows.push_back({{tweet.id, tweet.text}, checkpoint.predict_label(features)});
    }
    return rows_to_dataset(checkpoint.task, std::move(rows));
}

}  // namespace serial

int DistributionReport::percent(std::uint64_t count, std::uint64_t total) {
    if (total == 0) return 0;
    return static_cast<int>(
        std::llround(100.0 * static_cast<double>(count) / static_cast<double>(total)));
}

std::string DistributionReport::to_json() const {
    json j;
    j["task"] = std::string(corpus_io::task_name(task));
    json splits = json::array();
    for (const auto& row : rows) {
        json r;
        r["split"] = row.name;
        r["total"] = row.total;
        json labels = json::object();
        for (const auto& [label, count] : row.counts) {
            labels[label] = {{"count", count}, {"percent", percent(count, row.total)}};
        }
        r["labels"] = labels;
        splits.push_back(r);
    }
    j["splits"] = splits;
    return j.dump(2);
}

std::string DistributionReport::to_table() const {
    // Column per label over the union of labels across splits.
    std::set<std::string> labels;
    for (const auto& row : rows) {
        for (const auto& [label, count] : row.counts) labels.insert(label);
    }
    std::size_t name_width = 5;
    for (const auto& row : rows) name_width = std::max(name_width, row.name.size());

    std::ostringstream out;
    out << std::left << std::setw(static_cast<int>(name_width)) << "split" << "  total";
    for (const auto& label : labels) out << "  " << label << " (count, %)";
    out << '\n';
    for (const auto& row : rows) {
        out << std::left << std::setw(static_cast<int>(name_width)) << row.name << "  "
            << row.total;
        for (const auto& label : labels) {
            const auto it = row.counts.find(label);
            const std::uint64_t count = it == row.counts.end() ? 0 : it->second;
            out << "  " << count << " (" << percent(count, row.total) << "%)";
        }
        out << '\n';
    }
    return out.str();
}

DistributionReport distribution_report(
    const std::vector<std::pair<std::string, const corpus_io::Dataset*>>& splits) {
    if (splits.empty()) throw UsageError("distribution report needs at least one split");
    DistributionReport report;
    report.task = splits.front().second->task;
    for (const auto& [name, data] : splits) {
        if (data->task != report.task) {
            throw UsageError("distribution report splits must share a task; '" + name +
                             "' has task " + std::string(corpus_io::task_name(data->task)));
        }
        if (data->records.empty()) throw DataError("empty split: " + name);
        DistributionReport::Row row;
        row.name = name;
        row.total = data->records.size();
        for (const auto& rec : data->records) row.counts[rec.label] += 1;
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::string AffectReport::to_json() const {
    json j = json::object();
    for (const auto& [label, row] : per_label) {
        const std::uint64_t total = row.negative + row.positive;
        j[label] = {{"negative", row.negative},
                    {"positive", row.positive},
                    {"negative_percent", DistributionReport::percent(row.negative, total)},
                    {"positive_percent", DistributionReport::percent(row.positive, total)}};
    }
    return j.dump(2);
}

std::string AffectReport::to_table() const {
    std::size_t width = 5;
    for (const auto& [label, row] : per_label) width = std::max(width, label.size());
    std::ostringstream out;
    out << std::left << std::setw(static_cast<int>(width)) << "label"
        << "  negative (count, %)  positive (count, %)\n";
    for (const auto& [label, row] : per_label) {
        const std::uint64_t total = row.negative + row.positive;
        out << std::left << std::setw(static_cast<int>(width)) << label << "  " << row.negative
            << " (" << DistributionReport::percent(row.negative, total) << "%)  " << row.positive
            << " (" << DistributionReport::percent(row.positive, total) << "%)\n";
    }
    return out.str();
}

AffectReport affect_distribution(const corpus_io::Dataset& data, const affect::Gate& gate) {
    AffectReport report;
    for (const auto& rec : data.records) {
        // normalize() is idempotent, so pre-normalized rows pass through.
        const normalizer::NormalizedTweet tweet =
            normalizer::NormalizedTweet::from_raw(rec.tweet);
        auto& row = report.per_label[rec.label];
        if (gate.score(tweet).polarity == affect::Polarity::negative) {
            row.negative += 1;
        } else {
            row.positive += 1;
        }
    }
    return report;
}

std::vector<std::pair<std::string, std::uint64_t>> top_unigrams(
    const corpus_io::Dataset& data, const std::vector<const lexicon::SeedLexicon*>& exclude,
    std::size_t k) {
    const std::string positive{corpus_io::positive_label(data.task)};
    std::unordered_map<std::string, std::uint64_t> counts;
    for (const auto& rec : data.records) {
        if (rec.label != positive) continue;
        for (const auto& token : normalizer::tokenize(rec.tweet.text)) {
            if (normalizer::is_placeholder(token)) continue;
            bool excluded = false;
            for (const auto* lex : exclude) {
                if (lex && lex->contains(token)) {
                    excluded = true;
                    break;
                }
            }
            if (!excluded) counts[token] += 1;
        }
    }
    std::vector<std::pair<std::string, std::uint64_t>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ranked.size() > k) ranked.resize(k);
    return ranked;
}

}  // namespace lexharvest::experiment
