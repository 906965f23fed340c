#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lexharvest/affect_gate.hpp"
#include "lexharvest/corpus_io.hpp"

namespace lexharvest::pipeline {

// One manifest drives the whole run: every input path, seed, and target is
// explicit so two runs of the same manifest produce byte-identical artifacts.
struct PipelineManifest {
    std::string path;  // where the manifest was loaded from (for fingerprinting)

    std::string trigger;
    int jobs = 0;  // 0 = library default
    std::string out_dir;

    std::string seeded_corpus;  // harvested for positive pools
    std::string clean_corpus;   // harvested for the clean pool

    // Pre-curated lexica; when absent, the extract block below must supply
    // candidates and decisions instead.
    std::string offensive_lexicon;
    std::string hateful_lexicon;

    struct ExtractSpec {
        std::string labeled;         // gold TSV whose positive class seeds extraction
        std::string task;            // task name for the labeled TSV
        std::string positive_label;  // which label counts as positive
        std::string decisions;       // complete curation decisions
    };
    std::optional<ExtractSpec> extract;

    struct GateSpec {
        std::string kind;  // "checkpoint" | "external"
        double threshold = 0.0;
        std::string checkpoint;  // pre-trained polarity model
        // Alternative to `checkpoint`: train the gate in-run.
        struct TrainSpec {
            std::string data;
            std::string dev;
            int epochs = 10;
            double learning_rate = 0.1;
            std::optional<std::uint64_t> rng_seed;
        };
        std::optional<TrainSpec> train;
        // kind == "external": pre-computed scores per corpus.
        std::string scores_seeded;
        std::string scores_clean;
    };
    GateSpec gate;

    struct BalanceSpec {
        double prevalence = 0.0;
        std::optional<std::uint64_t> rng_seed;
    };
    std::map<std::string, BalanceSpec> balance;  // keyed by task name

    struct TrainSpec {
        std::string gold;  // optional gold TSV merged with the augmented set
        std::string dev;
        int epochs = 10;
        double learning_rate = 0.1;
        std::optional<std::uint64_t> rng_seed;
        std::string init;   // "", "gate", or a checkpoint path
        std::string merge = "augmented_only";  // or "concat"
        std::optional<affect::FeatureSpec> feature;
    };
    std::map<std::string, TrainSpec> train;  // keyed by task name

    std::map<std::string, std::string> eval_gold;  // task name -> gold TSV

    static PipelineManifest parse(const std::string& manifest_path);
};

// Empty iff the manifest is runnable; otherwise one "field: problem" line per
// defect, every missing path named.
std::vector<std::string> validate_manifest(const PipelineManifest& manifest);

struct RunResult {
    // (stage, status) in execution order; status is "ok", "skipped (...)", or
    // "failed: ...".
    std::vector<std::pair<std::string, std::string>> stages;
    std::map<std::string, std::string> artifacts;  // relative path -> fingerprint
};

// Executes normalize -> lexica -> gate -> harvest -> balance -> train ->
// eval -> reports, writing artifacts under manifest.out_dir and a run.json
// recording input/artifact fingerprints. Throws with the failing stage's name
// prefixed; artifacts written before the failure are preserved.
RunResult run_pipeline(const PipelineManifest& manifest);

}  // namespace lexharvest::pipeline
