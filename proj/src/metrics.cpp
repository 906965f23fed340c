#include "lexharvest/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "lexharvest/errors.hpp"

namespace lexharvest::experiment {

using nlohmann::json;

std::string Metrics::to_json_string() const {
    json j;
    j["accuracy"] = accuracy;
    j["macro_f1"] = macro_f1;
    json per = json::object();
    for (const auto& [label, m] : per_class) {
        json row;
        row["precision"] = m.precision;
        row["recall"] = m.recall;
        row["f1"] = m.f1;
        row["support"] = m.support;
        per[label] = row;
    }
    j["per_class"] = per;
    return j.dump(2);
}

std::string Metrics::to_table() const {
    std::size_t width = 8;  // fits the "accuracy" summary row
    for (const auto& [label, m] : per_class) width = std::max(width, label.size());

    std::ostringstream out;
    out << std::fixed << std::setprecision(4);
    out << std::left << std::setw(static_cast<int>(width)) << "label"
        << "  precision  recall  f1      support\n";
    for (const auto& [label, m] : per_class) {
        out << std::left << std::setw(static_cast<int>(width)) << label << "  "
            << std::setw(9) << m.precision << "  " << std::setw(6) << m.recall << "  "
            << std::setw(6) << m.f1 << "  " << m.support << '\n';
    }
    out << std::left << std::setw(static_cast<int>(width)) << "macro-F1" << "  " << macro_f1
        << '\n';
    out << std::left << std::setw(static_cast<int>(width)) << "accuracy" << "  " << accuracy
        << '\n';
    return out.str();
}

namespace {

std::string join_sample(const std::vector<std::string>& ids) {
    std::ostringstream out;
    const std::size_t shown = std::min<std::size_t>(ids.size(), 5);
    for (std::size_t i = 0; i < shown; ++i) {
        if (i) out << ", ";
        out << ids[i];
    }
    if (ids.size() > shown) out << ", ... (" << ids.size() - shown << " more)";
    return out.str();
}

}  // namespace

Metrics evaluate_labels(const std::vector<std::string>& gold,
                        const std::vector<std::string>& predicted) {
    if (gold.size() != predicted.size()) {
        throw UsageError("evaluate_labels: gold and predicted lengths differ");
    }
    if (gold.empty()) throw DataError("cannot evaluate an empty dataset");

    Metrics metrics;
    std::uint64_t correct = 0;
    std::map<std::string, std::uint64_t> tp, fp, fn;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        metrics.per_class[gold[i]].support += 1;
        if (gold[i] == predicted[i]) {
            ++correct;
            ++tp[gold[i]];
        } else {
            ++fn[gold[i]];
            ++fp[predicted[i]];
        }
    }
    metrics.accuracy = static_cast<double>(correct) / static_cast<double>(gold.size());

    double f1_sum = 0.0;
    for (auto& [label, m] : metrics.per_class) {
        const auto t = tp[label];
        const auto predicted_as = t + fp[label];
        const auto actual = t + fn[label];
        m.precision = predicted_as ? static_cast<double>(t) / static_cast<double>(predicted_as) : 0.0;
        m.recall = actual ? static_cast<double>(t) / static_cast<double>(actual) : 0.0;
        m.f1 = (m.precision + m.recall) > 0.0
                   ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                   : 0.0;
        f1_sum += m.f1;
    }
    metrics.macro_f1 = f1_sum / static_cast<double>(metrics.per_class.size());
    return metrics;
}

Metrics evaluate(const corpus_io::Dataset& gold, const corpus_io::Dataset& predicted) {
    std::unordered_map<std::string, const std::string*> predicted_by_id;
    predicted_by_id.reserve(predicted.records.size());
    for (const auto& row : predicted.records) predicted_by_id.emplace(row.tweet.id, &row.label);

    std::vector<std::string> gold_labels, pred_labels, missing;
    gold_labels.reserve(gold.records.size());
    pred_labels.reserve(gold.records.size());
    std::unordered_map<std::string, bool> seen;
    for (const auto& row : gold.records) {
        const auto it = predicted_by_id.find(row.tweet.id);
        if (it == predicted_by_id.end()) {
            missing.push_back(row.tweet.id);
            continue;
        }
        seen.emplace(row.tweet.id, true);
        gold_labels.push_back(row.label);
        pred_labels.push_back(*it->second);
    }
    std::vector<std::string> extra;
    for (const auto& row : predicted.records) {
        if (!seen.count(row.tweet.id)) extra.push_back(row.tweet.id);
    }
    if (!missing.empty() || !extra.empty()) {
        std::sort(missing.begin(), missing.end());
        std::sort(extra.begin(), extra.end());
        std::string msg = "prediction/gold id mismatch:";
        if (!missing.empty()) msg += " missing predictions for [" + join_sample(missing) + "]";
        if (!missing.empty() && !extra.empty()) msg += ";";
        if (!extra.empty()) msg += " predictions for unknown ids [" + join_sample(extra) + "]";
        throw DataError(msg);
    }
    return evaluate_labels(gold_labels, pred_labels);
}

}  // namespace lexharvest::experiment
