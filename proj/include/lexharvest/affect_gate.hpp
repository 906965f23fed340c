#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lexharvest/corpus_io.hpp"
#include "lexharvest/normalizer.hpp"

namespace lexharvest::affect {

// Character n-gram featurization recipe. Two checkpoints with equal specs
// share a feature space. hash_name pins the bucket function; "fnv1a64/v1"
// is seeded FNV-1a over the n-gram's UTF-8 bytes with STX/ETX (0x02/0x03)
// word-boundary padding, bucket = hash % dimension.
struct FeatureSpec {
    std::vector<int> orders = {2, 3, 4, 5};
    std::uint32_t dimension = 1u << 18;
    std::uint64_t hash_seed = 0x5eed;
    std::string hash_name = "fnv1a64/v1";

    friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

// Sparse count vector, sorted by bucket index.
using SparseVec = std::vector<std::pair<std::uint32_t, double>>;

SparseVec featurize(const FeatureSpec& spec, std::string_view normalized_text);

enum class Polarity { positive, negative };
std::string_view polarity_name(Polarity p);

struct PolarityLabel {
    Polarity polarity = Polarity::negative;
    double score = 0.0;  // confidence of the emitted polarity, in [0, 1]
};

struct TrainingMeta {
    int epochs = 0;
    double learning_rate = 0.0;
    std::string data_fingerprint;
    std::string init;  // "scratch" or "warm:<source-task>"
    int best_epoch = 0;
};

// Multinomial logistic regression over hashed character n-grams.
// weights are row-major per class: weights[c * dimension + bucket].
struct ModelCheckpoint {
    corpus_io::Task task = corpus_io::Task::sentiment;
    FeatureSpec feature_spec;
    std::vector<std::string> label_set;  // sorted class names
    std::vector<double> weights;
    TrainingMeta meta;

    std::vector<double> logits(const SparseVec& features) const;
    std::vector<double> probabilities(const SparseVec& features) const;
    // argmax label, ties resolved toward the lowest class index
    std::string predict_label(const SparseVec& features) const;

    void save(const std::string& path) const;
    static ModelCheckpoint load(const std::string& path);
};

struct TrainConfig {
    int epochs = 20;
    double learning_rate = 0.1;
    std::uint64_t seed = 42;
    // When absent, the trainer uses FeatureSpec defaults (or the init
    // checkpoint's spec for warm starts).
    std::optional<FeatureSpec> feature;
};

// Deterministic trainer: seeded head init, examples visited in dataset order,
// one SGD update per example. When dev is given, the checkpoint with the best
// dev macro F1 (earliest epoch on ties) is returned, else the final epoch.
// init_tag distinguishes scratch from warm head seeding; feature_override
// is set by warm starts to the source checkpoint's spec.
ModelCheckpoint train_model(const corpus_io::Dataset& data, const TrainConfig& config,
                            const std::string& init_tag,
                            const std::optional<FeatureSpec>& feature_override,
                            const corpus_io::Dataset* dev);

// Affect baseline: sentiment or emotion data only.
ModelCheckpoint train_affect(const corpus_io::Dataset& data, const TrainConfig& config,
                             const corpus_io::Dataset* dev = nullptr);

// Binary polarity verdict from a sentiment checkpoint; exact ties go to
// negative so the clean pool stays conservative.
PolarityLabel score_text(const ModelCheckpoint& checkpoint, std::string_view normalized_text);

// Sentiment gate over normalized tweets.
class Gate {
public:
    virtual ~Gate() = default;
    virtual PolarityLabel score(const normalizer::NormalizedTweet& tweet) const = 0;
};

class CheckpointGate : public Gate {
public:
    explicit CheckpointGate(ModelCheckpoint checkpoint);
    PolarityLabel score(const normalizer::NormalizedTweet& tweet) const override;
    const ModelCheckpoint& checkpoint() const { return checkpoint_; }

private:
    ModelCheckpoint checkpoint_;
};

// Batch-file protocol: the pipeline writes {"id","text"} JSONL, the external
// scorer answers with id \t POS|NEG \t score. Every queried id must be
// present exactly once; violations name the offending record.
class ExternalGate : public Gate {
public:
    static ExternalGate load(const std::string& scores_path);
    PolarityLabel score(const normalizer::NormalizedTweet& tweet) const override;
    std::size_t size() const { return by_id_.size(); }

private:
    std::string path_;
    std::unordered_map<std::string, PolarityLabel> by_id_;
};

void write_batch_input(std::span<const normalizer::NormalizedTweet> tweets,
                       const std::string& path);

}  // namespace lexharvest::affect
