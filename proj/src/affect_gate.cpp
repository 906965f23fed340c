#include "lexharvest/affect_gate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "lexharvest/errors.hpp"
#include "lexharvest/hash.hpp"
#include "lexharvest/metrics.hpp"
#include "lexharvest/rng.hpp"
#include "lexharvest/utf8.hpp"

namespace lexharvest::affect {

using nlohmann::json;

std::string_view polarity_name(Polarity p) {
    return p == Polarity::negative ? "negative" : "positive";
}

namespace {

constexpr char32_t kWordStart = 0x02;
constexpr char32_t kWordEnd = 0x03;

void validate_spec(const FeatureSpec& spec) {
    if (spec.orders.empty()) throw UsageError("feature_spec.orders must be non-empty");
    for (int k : spec.orders) {
        if (k < 1) throw UsageError("feature_spec.orders entries must be >= 1");
    }
    if (spec.dimension == 0) throw UsageError("feature_spec.dimension must be > 0");
    if (spec.hash_name != "fnv1a64/v1") {
        throw UsageError("unsupported feature hash: " + spec.hash_name);
    }
}

}  // namespace

SparseVec featurize(const FeatureSpec& spec, std::string_view normalized_text) {
    validate_spec(spec);
    std::unordered_map<std::uint32_t, double> counts;

    std::vector<char32_t> padded;
    std::string bytes;
    std::size_t pos = 0;
    const std::size_t n = normalized_text.size();
    while (pos <= n) {
        // collect one whitespace-delimited word
        padded.clear();
        padded.push_back(kWordStart);
        while (pos < n) {
            const auto d = utf8::decode(normalized_text, pos);
            if (utf8::is_whitespace(d.cp)) break;
            padded.push_back(d.cp);
            pos += static_cast<std::size_t>(d.length);
        }
        // skip the delimiter (or end)
        if (pos < n) {
            pos += static_cast<std::size_t>(utf8::decode(normalized_text, pos).length);
        } else {
            ++pos;  // loop exit after the final word
        }
        if (padded.size() == 1) continue;  // empty word (leading/duplicate spaces)
        padded.push_back(kWordEnd);

        for (int order : spec.orders) {
            const auto k = static_cast<std::size_t>(order);
            if (padded.size() < k) continue;
            for (std::size_t start = 0; start + k <= padded.size(); ++start) {
                bytes.clear();
                for (std::size_t j = 0; j < k; ++j) utf8::append(bytes, padded[start + j]);
                const std::uint64_t h = fnv1a64(bytes, spec.hash_seed);
                counts[static_cast<std::uint32_t>(h % spec.dimension)] += 1.0;
            }
        }
    }

    SparseVec out(counts.begin(), counts.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> ModelCheckpoint::logits(const SparseVec& features) const {
    const std::size_t classes = label_set.size();
    const std::size_t dim = feature_spec.dimension;
    std::vector<double> z(classes, 0.0);
    for (std::size_t c = 0; c < classes; ++c) {
        const double* w = weights.data() + c * dim;
        double acc = 0.0;
        for (const auto& [idx, val] : features) acc += w[idx] * val;
        z[c] = acc;
    }
    return z;
}

std::vector<double> ModelCheckpoint::probabilities(const SparseVec& features) const {
    std::vector<double> z = logits(features);
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - zmax);
        sum += v;
    }
    for (double& v : z) v /= sum;
    return z;
}

std::string ModelCheckpoint::predict_label(const SparseVec& features) const {
    const std::vector<double> z = logits(features);
    std::size_t best = 0;
    for (std::size_t c = 1; c < z.size(); ++c) {
        if (z[c] > z[best]) best = c;
    }
    return label_set[best];
}

namespace {

json spec_to_json(const FeatureSpec& spec) {
    json j;
    j["orders"] = spec.orders;
    j["dimension"] = spec.dimension;
    j["hash_seed"] = spec.hash_seed;
    j["hash"] = spec.hash_name;
    return j;
}

FeatureSpec spec_from_json(const json& j) {
    FeatureSpec spec;
    spec.orders = j.at("orders").get<std::vector<int>>();
    spec.dimension = j.at("dimension").get<std::uint32_t>();
    spec.hash_seed = j.at("hash_seed").get<std::uint64_t>();
    spec.hash_name = j.at("hash").get<std::string>();
    validate_spec(spec);
    return spec;
}

}  // namespace

void ModelCheckpoint::save(const std::string& path) const {
    json j;
    j["format"] = "lexharvest-checkpoint";
    j["version"] = 1;
    j["task"] = std::string(corpus_io::task_name(task));
    j["feature_spec"] = spec_to_json(feature_spec);
    j["label_set"] = label_set;
    j["weights"] = weights;
    json meta;
    meta["epochs"] = this->meta.epochs;
    meta["learning_rate"] = this->meta.learning_rate;
    meta["data_fingerprint"] = this->meta.data_fingerprint;
    meta["init"] = this->meta.init;
    meta["best_epoch"] = this->meta.best_epoch;
    j["training_meta"] = meta;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw DataError("write failed: " + path);
}

ModelCheckpoint ModelCheckpoint::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError(path + ": malformed checkpoint JSON: " + std::string(e.what()));
    }
    try {
        if (j.at("format").get<std::string>() != "lexharvest-checkpoint") {
            throw DataError(path + ": not a checkpoint file");
        }
        if (j.at("version").get<int>() != 1) {
            throw DataError(path + ": unsupported checkpoint version");
        }
        ModelCheckpoint ckpt;
        ckpt.task = corpus_io::task_from_name(j.at("task").get<std::string>());
        ckpt.feature_spec = spec_from_json(j.at("feature_spec"));
        ckpt.label_set = j.at("label_set").get<std::vector<std::string>>();
        ckpt.weights = j.at("weights").get<std::vector<double>>();
        const auto& meta = j.at("training_meta");
        ckpt.meta.epochs = meta.at("epochs").get<int>();
        ckpt.meta.learning_rate = meta.at("learning_rate").get<double>();
        ckpt.meta.data_fingerprint = meta.at("data_fingerprint").get<std::string>();
        ckpt.meta.init = meta.at("init").get<std::string>();
        ckpt.meta.best_epoch = meta.at("best_epoch").get<int>();
        if (ckpt.label_set.size() < 2) throw DataError(path + ": label_set must have >= 2 classes");
        const std::size_t expected =
            static_cast<std::size_t>(ckpt.feature_spec.dimension) * ckpt.label_set.size();
        if (ckpt.weights.size() != expected) {
            throw DataError(path + ": weight vector length " + std::to_string(ckpt.weights.size()) +
                            " does not match dimension x classes = " + std::to_string(expected));
        }
        return ckpt;
    } catch (const json::exception& e) {
        throw DataError(path + ": invalid checkpoint: " + std::string(e.what()));
    }
}

namespace {

std::string dataset_fingerprint(const corpus_io::Dataset& data) {
    std::string blob;
    for (const auto& row : data.records) {
        blob += row.tweet.id;
        blob += '\t';
        blob += row.tweet.text;
        blob += '\t';
        blob += row.label;
        blob += '\n';
    }
    return fingerprint_hex(blob);
}

}  // namespace

ModelCheckpoint train_model(const corpus_io::Dataset& data, const TrainConfig& config,
                            const std::string& init_tag,
                            const std::optional<FeatureSpec>& feature_override,
                            const corpus_io::Dataset* dev) {
    if (config.epochs < 0) throw UsageError("epochs must be >= 0");
    if (!(config.learning_rate > 0.0)) throw UsageError("learning_rate must be > 0");

    ModelCheckpoint ckpt;
    ckpt.task = data.task;
    ckpt.feature_spec = feature_override ? *feature_override
                                         : config.feature.value_or(FeatureSpec{});
    validate_spec(ckpt.feature_spec);

    std::set<std::string> labels;
    for (const auto& row : data.records) labels.insert(row.label);
    if (labels.size() < 2) {
        throw DataError("training data must contain >= 2 classes, found " +
                        std::to_string(labels.size()));
    }
    ckpt.label_set.assign(labels.begin(), labels.end());
    const std::size_t classes = ckpt.label_set.size();
    const std::size_t dim = ckpt.feature_spec.dimension;

    std::unordered_map<std::string, std::size_t> label_index;
    for (std::size_t c = 0; c < classes; ++c) label_index.emplace(ckpt.label_set[c], c);

    // Head init: seeded uniform noise in [-0.01, 0.01). The stream is salted
    // with init_tag so scratch and warm heads differ for the same seed.
    Rng rng(fnv1a64(init_tag, config.seed));
    ckpt.weights.resize(dim * classes);
    for (double& w : ckpt.weights) w = (unit_real(rng) - 0.5) * 0.02;

    ckpt.meta.epochs = config.epochs;
    ckpt.meta.learning_rate = config.learning_rate;
    ckpt.meta.data_fingerprint = dataset_fingerprint(data);
    ckpt.meta.init = init_tag;
    ckpt.meta.best_epoch = 0;

    // Featurization is cached; examples are visited strictly in dataset
    // order every epoch so runs are reproducible.
    std::vector<SparseVec> features;
    features.reserve(data.records.size());
    for (const auto& row : data.records) features.push_back(featurize(ckpt.feature_spec, row.tweet.text));
    std::vector<std::size_t> targets;
    targets.reserve(data.records.size());
    for (const auto& row : data.records) targets.push_back(label_index.at(row.label));

    std::vector<SparseVec> dev_features;
    std::vector<std::string> dev_gold;
    if (dev) {
        dev_features.reserve(dev->records.size());
        for (const auto& row : dev->records) {
            dev_features.push_back(featurize(ckpt.feature_spec, row.tweet.text));
            dev_gold.push_back(row.label);
        }
    }

    std::vector<double> best_weights;
    double best_dev_f1 = -1.0;
    int best_epoch = 0;

    std::vector<double> probs(classes);
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        for (std::size_t i = 0; i < features.size(); ++i) {
            const SparseVec& x = features[i];
            // forward
            double zmax = -1e300;
            for (std::size_t c = 0; c < classes; ++c) {
                const double* w = ckpt.weights.data() + c * dim;
                double acc = 0.0;
                for (const auto& [idx, val] : x) acc += w[idx] * val;
                probs[c] = acc;
                if (acc > zmax) zmax = acc;
            }
            double sum = 0.0;
            for (std::size_t c = 0; c < classes; ++c) {
                probs[c] = std::exp(probs[c] - zmax);
                sum += probs[c];
            }
            for (std::size_t c = 0; c < classes; ++c) probs[c] /= sum;

            const double loss = -std::log(probs[targets[i]]);
            if (!std::isfinite(loss)) {
                throw DataError("NaN/inf loss at epoch " + std::to_string(epoch) + ", example " +
                                std::to_string(i) + " (id=" + data.records[i].tweet.id +
                                "); try a lower learning rate");
            }

            // backward: one SGD step
            for (std::size_t c = 0; c < classes; ++c) {
                const double coef = probs[c] - (c == targets[i] ? 1.0 : 0.0);
                if (coef == 0.0) continue;
                double* w = ckpt.weights.data() + c * dim;
                const double step = config.learning_rate * coef;
                for (const auto& [idx, val] : x) w[idx] -= step * val;
            }
        }

        if (dev) {
            std::vector<std::string> predicted;
            predicted.reserve(dev_features.size());
            for (const auto& x : dev_features) predicted.push_back(ckpt.predict_label(x));
            const double f1 = experiment::evaluate_labels(dev_gold, predicted).macro_f1;
            if (f1 > best_dev_f1) {
                best_dev_f1 = f1;
                best_weights = ckpt.weights;
                best_epoch = epoch;
            }
        }
    }

    if (dev && best_epoch > 0) {
        ckpt.weights = std::move(best_weights);
        ckpt.meta.best_epoch = best_epoch;
    } else {
        ckpt.meta.best_epoch = config.epochs;
    }
    return ckpt;
}

ModelCheckpoint train_affect(const corpus_io::Dataset& data, const TrainConfig& config,
                             const corpus_io::Dataset* dev) {
    if (data.task != corpus_io::Task::sentiment && data.task != corpus_io::Task::emotion) {
        throw UsageError("train_affect expects sentiment or emotion data, got " +
                         std::string(corpus_io::task_name(data.task)));
    }
    return train_model(data, config, "scratch", std::nullopt, dev);
}

namespace {

void require_sentiment_binary(const ModelCheckpoint& ckpt) {
    if (ckpt.task != corpus_io::Task::sentiment) {
        throw UsageError("polarity scoring requires a sentiment checkpoint, got task " +
                         std::string(corpus_io::task_name(ckpt.task)));
    }
    if (ckpt.label_set != std::vector<std::string>{"NEG", "POS"}) {
        throw UsageError("polarity scoring requires label set {NEG, POS}");
    }
}

}  // namespace

PolarityLabel score_text(const ModelCheckpoint& checkpoint, std::string_view normalized_text) {
    require_sentiment_binary(checkpoint);
    const auto probs = checkpoint.probabilities(featurize(checkpoint.feature_spec, normalized_text));
    const double p_neg = probs[0];  // label_set is sorted: NEG before POS
    const double p_pos = probs[1];
    if (p_neg >= p_pos) return {Polarity::negative, p_neg};
    return {Polarity::positive, p_pos};
}

CheckpointGate::CheckpointGate(ModelCheckpoint checkpoint) : checkpoint_(std::move(checkpoint)) {
    require_sentiment_binary(checkpoint_);
}

PolarityLabel CheckpointGate::score(const normalizer::NormalizedTweet& tweet) const {
    return score_text(checkpoint_, tweet.text);
}

ExternalGate ExternalGate::load(const std::string& scores_path) {
    std::ifstream in(scores_path, std::ios::binary);
    if (!in) throw DataError("cannot open external scorer output: " + scores_path);
    ExternalGate gate;
    gate.path_ = scores_path;
    std::string line;
    std::uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto where = scores_path + ": line " + std::to_string(line_no);
        const auto tab1 = line.find('\t');
        const auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
        if (tab1 == std::string::npos || tab2 == std::string::npos ||
            line.find('\t', tab2 + 1) != std::string::npos) {
            throw DataError(where + ": expected id\\tPOS|NEG\\tscore");
        }
        const std::string id = line.substr(0, tab1);
        const std::string label = line.substr(tab1 + 1, tab2 - tab1 - 1);
        if (id.empty()) throw DataError(where + ": empty id");
        PolarityLabel pl;
        if (label == "POS") {
            pl.polarity = Polarity::positive;
        } else if (label == "NEG") {
            pl.polarity = Polarity::negative;
        } else {
            throw DataError(where + ": record id '" + id + "': non-polarity label '" + label +
                            "' (expected POS or NEG)");
        }
        try {
            pl.score = std::stod(line.substr(tab2 + 1));
        } catch (const std::exception&) {
            throw DataError(where + ": record id '" + id + "': bad score");
        }
        if (!(pl.score >= 0.0 && pl.score <= 1.0)) {
            throw DataError(where + ": record id '" + id + "': score out of [0,1]");
        }
        if (!gate.by_id_.emplace(id, pl).second) {
            throw DataError(where + ": record id '" + id + "' appears more than once");
        }
    }
    return gate;
}

PolarityLabel ExternalGate::score(const normalizer::NormalizedTweet& tweet) const {
    const auto it = by_id_.find(tweet.id);
    if (it == by_id_.end()) {
        throw DataError("external scorer output " + path_ + " is missing record id '" + tweet.id +
                        "'");
    }
    return it->second;
}

void write_batch_input(std::span<const normalizer::NormalizedTweet> tweets,
                       const std::string& path) {
    std::vector<corpus_io::RawTweet> records;
    records.reserve(tweets.size());
    for (const auto& t : tweets) records.push_back({t.id, t.text});
    corpus_io::write_jsonl(records, path);
}

}  // namespace lexharvest::affect
