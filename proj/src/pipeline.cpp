#include "lexharvest/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "lexharvest/augmentor.hpp"
#include "lexharvest/errors.hpp"
#include "lexharvest/experiment.hpp"
#include "lexharvest/hash.hpp"
#include "lexharvest/lexicon.hpp"
#include "lexharvest/normalizer.hpp"

namespace lexharvest::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void bad_manifest(const std::string& what) { throw UsageError("manifest: " + what); }

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const char* a : allowed) {
            if (key == a) {
                known = true;
                break;
            }
        }
        if (!known) bad_manifest("unknown key '" + key + "' in " + where);
    }
}

std::string req_string(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) bad_manifest(where + "." + key + " is required");
    if (!j.at(key).is_string()) bad_manifest(where + "." + key + " must be a string");
    return j.at(key).get<std::string>();
}

std::string opt_string(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) return {};
    if (!j.at(key).is_string()) bad_manifest(where + "." + key + " must be a string");
    return j.at(key).get<std::string>();
}

std::optional<std::uint64_t> opt_seed(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) return std::nullopt;
    if (!j.at(key).is_number_unsigned()) {
        bad_manifest(where + "." + key + " must be a non-negative integer");
    }
    return j.at(key).get<std::uint64_t>();
}

int opt_int(const json& j, const char* key, int fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer()) bad_manifest(where + "." + key + " must be an integer");
    return j.at(key).get<int>();
}

double opt_double(const json& j, const char* key, double fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) bad_manifest(where + "." + key + " must be a number");
    return j.at(key).get<double>();
}

std::optional<affect::FeatureSpec> opt_feature(const json& j, const std::string& where) {
    if (!j.contains("feature")) return std::nullopt;
    const json& f = j.at("feature");
    if (!f.is_object()) bad_manifest(where + ".feature must be an object");
    check_keys(f, where + ".feature", {"orders", "dimension", "hash_seed"});
    affect::FeatureSpec spec;
    if (f.contains("orders")) spec.orders = f.at("orders").get<std::vector<int>>();
    if (f.contains("dimension")) spec.dimension = f.at("dimension").get<std::uint32_t>();
    if (f.contains("hash_seed")) spec.hash_seed = f.at("hash_seed").get<std::uint64_t>();
    return spec;
}

corpus_io::Task parse_task_key(const std::string& name, const std::string& where) {
    try {
        return corpus_io::task_from_name(name);
    } catch (const Error&) {
        bad_manifest(where + ": unknown task '" + name + "'");
    }
}

}  // namespace

PipelineManifest PipelineManifest::parse(const std::string& manifest_path) {
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in) throw UsageError("cannot open manifest: " + manifest_path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        bad_manifest("malformed JSON in " + manifest_path + ": " + e.what());
    }
    if (!j.is_object()) bad_manifest("top level must be an object");
    check_keys(j, "top level",
               {"trigger", "jobs", "out_dir", "corpora", "lexica", "extract", "gate", "balance",
                "train", "eval"});

    PipelineManifest m;
    m.path = manifest_path;
    m.trigger = opt_string(j, "trigger", "top level");
    m.jobs = opt_int(j, "jobs", 0, "top level");
    m.out_dir = opt_string(j, "out_dir", "top level");

    if (j.contains("corpora")) {
        const json& c = j.at("corpora");
        check_keys(c, "corpora", {"seeded", "clean"});
        m.seeded_corpus = opt_string(c, "seeded", "corpora");
        m.clean_corpus = opt_string(c, "clean", "corpora");
    }
    if (j.contains("lexica")) {
        const json& l = j.at("lexica");
        check_keys(l, "lexica", {"offensive", "hateful"});
        m.offensive_lexicon = opt_string(l, "offensive", "lexica");
        m.hateful_lexicon = opt_string(l, "hateful", "lexica");
    }
    if (j.contains("extract")) {
        const json& e = j.at("extract");
        check_keys(e, "extract", {"labeled", "task", "positive_label", "decisions"});
        ExtractSpec spec;
        spec.labeled = req_string(e, "labeled", "extract");
        spec.task = req_string(e, "task", "extract");
        spec.positive_label = req_string(e, "positive_label", "extract");
        spec.decisions = req_string(e, "decisions", "extract");
        m.extract = std::move(spec);
    }
    if (j.contains("gate")) {
        const json& g = j.at("gate");
        check_keys(g, "gate", {"kind", "threshold", "checkpoint", "train", "scores"});
        m.gate.kind = req_string(g, "kind", "gate");
        m.gate.threshold = opt_double(g, "threshold", 0.0, "gate");
        m.gate.checkpoint = opt_string(g, "checkpoint", "gate");
        if (g.contains("train")) {
            const json& t = g.at("train");
            check_keys(t, "gate.train", {"data", "dev", "epochs", "learning_rate", "rng_seed"});
            GateSpec::TrainSpec spec;
            spec.data = req_string(t, "data", "gate.train");
            spec.dev = opt_string(t, "dev", "gate.train");
            spec.epochs = opt_int(t, "epochs", 10, "gate.train");
            spec.learning_rate = opt_double(t, "learning_rate", 0.1, "gate.train");
            spec.rng_seed = opt_seed(t, "rng_seed", "gate.train");
            m.gate.train = std::move(spec);
        }
        if (g.contains("scores")) {
            const json& s = g.at("scores");
            check_keys(s, "gate.scores", {"seeded", "clean"});
            m.gate.scores_seeded = opt_string(s, "seeded", "gate.scores");
            m.gate.scores_clean = opt_string(s, "clean", "gate.scores");
        }
    }
    if (j.contains("balance")) {
        for (const auto& [task_name, b] : j.at("balance").items()) {
            parse_task_key(task_name, "balance");
            check_keys(b, "balance." + task_name, {"prevalence", "rng_seed"});
            BalanceSpec spec;
            spec.prevalence = opt_double(b, "prevalence", 0.0, "balance." + task_name);
            spec.rng_seed = opt_seed(b, "rng_seed", "balance." + task_name);
            m.balance.emplace(task_name, spec);
        }
    }
    if (j.contains("train")) {
        for (const auto& [task_name, t] : j.at("train").items()) {
            parse_task_key(task_name, "train");
            const std::string where = "train." + task_name;
            check_keys(t, where,
                       {"gold", "dev", "epochs", "learning_rate", "rng_seed", "init", "merge",
                        "feature"});
            TrainSpec spec;
            spec.gold = opt_string(t, "gold", where);
            spec.dev = opt_string(t, "dev", where);
            spec.epochs = opt_int(t, "epochs", 10, where);
            spec.learning_rate = opt_double(t, "learning_rate", 0.1, where);
            spec.rng_seed = opt_seed(t, "rng_seed", where);
            spec.init = opt_string(t, "init", where);
            spec.merge = t.contains("merge") ? req_string(t, "merge", where)
                                             : std::string("augmented_only");
            spec.feature = opt_feature(t, where);
            m.train.emplace(task_name, std::move(spec));
        }
    }
    if (j.contains("eval")) {
        for (const auto& [task_name, e] : j.at("eval").items()) {
            parse_task_key(task_name, "eval");
            check_keys(e, "eval." + task_name, {"gold"});
            m.eval_gold.emplace(task_name, req_string(e, "gold", "eval." + task_name));
        }
    }
    return m;
}

std::vector<std::string> validate_manifest(const PipelineManifest& m) {
    std::vector<std::string> out;
    const auto missing = [&](const std::string& field, const std::string& path) {
        if (path.empty()) {
            out.push_back(field + ": required");
        } else if (!fs::exists(path)) {
            out.push_back(field + ": path does not exist: " + path);
        }
    };

    if (m.trigger.empty()) {
        out.push_back("trigger: required");
    } else {
        const auto tokens = normalizer::tokenize(normalizer::normalize(m.trigger));
        if (tokens.size() != 1 || tokens[0] != m.trigger) {
            out.push_back("trigger: must be a single normalized token");
        }
    }
    if (m.out_dir.empty()) out.push_back("out_dir: required");
    if (m.jobs < 0) out.push_back("jobs: must be >= 0");
    missing("corpora.seeded", m.seeded_corpus);
    missing("corpora.clean", m.clean_corpus);

    const bool lexica_provided = !m.offensive_lexicon.empty() || !m.hateful_lexicon.empty();
    if (lexica_provided) {
        if (!m.offensive_lexicon.empty()) missing("lexica.offensive", m.offensive_lexicon);
        if (!m.hateful_lexicon.empty()) missing("lexica.hateful", m.hateful_lexicon);
    } else if (!m.extract) {
        out.push_back("lexica/extract: provide curated lexica or an extract block");
    } else {
        missing("extract.labeled", m.extract->labeled);
        missing("extract.decisions", m.extract->decisions);
        if (m.extract->positive_label.empty()) out.push_back("extract.positive_label: required");
        try {
            corpus_io::task_from_name(m.extract->task);
        } catch (const Error&) {
            out.push_back("extract.task: unknown task '" + m.extract->task + "'");
        }
    }

    if (m.gate.kind.empty()) {
        out.push_back("gate.kind: required (checkpoint or external)");
    } else if (m.gate.kind == "checkpoint") {
        const bool has_path = !m.gate.checkpoint.empty();
        const bool has_train = m.gate.train.has_value();
        if (has_path == has_train) {
            out.push_back("gate: provide exactly one of gate.checkpoint and gate.train");
        } else if (has_path) {
            missing("gate.checkpoint", m.gate.checkpoint);
        } else {
            missing("gate.train.data", m.gate.train->data);
            if (!m.gate.train->dev.empty()) missing("gate.train.dev", m.gate.train->dev);
            if (!m.gate.train->rng_seed) out.push_back("gate.train.rng_seed: rng_seed required");
            if (m.gate.train->epochs < 0) out.push_back("gate.train.epochs: must be >= 0");
            if (!(m.gate.train->learning_rate > 0)) {
                out.push_back("gate.train.learning_rate: must be > 0");
            }
        }
    } else if (m.gate.kind == "external") {
        missing("gate.scores.seeded", m.gate.scores_seeded);
        missing("gate.scores.clean", m.gate.scores_clean);
    } else {
        out.push_back("gate.kind: must be checkpoint or external, got '" + m.gate.kind + "'");
    }

    for (const auto& [task_name, spec] : m.balance) {
        const std::string where = "balance." + task_name;
        if (task_name != "offensive" && task_name != "hate_speech") {
            out.push_back(where + ": only offensive and hate_speech pools are harvested");
        }
        if (!(spec.prevalence > 0.0 && spec.prevalence < 1.0)) {
            out.push_back(where + ".prevalence: out of (0,1)");
        }
        if (!spec.rng_seed) out.push_back(where + ".rng_seed: rng_seed required");
    }
    for (const auto& [task_name, spec] : m.train) {
        const std::string where = "train." + task_name;
        if (task_name != "offensive" && task_name != "hate_speech") {
            out.push_back(where + ": only offensive and hate_speech heads are trained");
        }
        if (!spec.gold.empty()) missing(where + ".gold", spec.gold);
        if (!spec.dev.empty()) missing(where + ".dev", spec.dev);
        if (!spec.rng_seed) out.push_back(where + ".rng_seed: rng_seed required");
        if (spec.epochs < 0) out.push_back(where + ".epochs: must be >= 0");
        if (!(spec.learning_rate > 0)) out.push_back(where + ".learning_rate: must be > 0");
        if (spec.merge != "augmented_only" && spec.merge != "concat") {
            out.push_back(where + ".merge: must be augmented_only or concat");
        }
        if (!m.balance.count(task_name) && spec.gold.empty()) {
            out.push_back(where + ": no augmented pool (no balance entry) and no gold data");
        }
        if (spec.init == "gate") {
            if (m.gate.kind != "checkpoint") {
                out.push_back(where + ".init: 'gate' requires a checkpoint gate");
            }
        } else if (!spec.init.empty()) {
            missing(where + ".init", spec.init);
        }
    }
    for (const auto& [task_name, gold] : m.eval_gold) {
        const std::string where = "eval." + task_name;
        missing(where + ".gold", gold);
        if (!m.train.count(task_name)) {
            out.push_back(where + ": no train entry for this task, nothing to evaluate");
        }
    }
    return out;
}

namespace {

struct Context {
    explicit Context(const PipelineManifest& manifest) : m(manifest) {}

    const PipelineManifest& m;
    fs::path out;
    RunResult result;
    std::map<std::string, std::string> inputs;  // path -> fingerprint

    std::vector<normalizer::NormalizedTweet> seeded;
    std::vector<normalizer::NormalizedTweet> clean;
    std::optional<lexicon::SeedLexicon> off_lex;
    std::optional<lexicon::SeedLexicon> hs_lex;
    std::optional<lexicon::Matcher> matcher;
    std::optional<affect::ModelCheckpoint> gate_ckpt;
    std::unique_ptr<affect::Gate> gate_seeded;
    std::unique_ptr<affect::Gate> gate_clean;
    augmentor::HarvestOutput pos;
    augmentor::HarvestOutput neg;
    std::map<std::string, corpus_io::Dataset> augmented;   // task name -> dataset
    std::map<std::string, corpus_io::Dataset> train_sets;  // task name -> dataset
    std::map<std::string, affect::ModelCheckpoint> models;
};

void note_input(Context& ctx, const std::string& path) {
    if (!path.empty()) ctx.inputs.emplace(path, fingerprint_file(path));
}

void note_artifact(Context& ctx, const std::string& rel) {
    ctx.result.artifacts[rel] = fingerprint_file((ctx.out / rel).string());
}

std::string artifact_path(Context& ctx, const std::string& rel) {
    return (ctx.out / rel).string();
}

void write_text_artifact(Context& ctx, const std::string& rel, const std::string& content) {
    const std::string path = artifact_path(ctx, rel);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << content;
    if (!content.empty() && content.back() != '\n') out << '\n';
    if (!out) throw DataError("write failed: " + path);
    note_artifact(ctx, rel);
}

void write_run_json(Context& ctx) {
    json j;
    j["manifest"] = {{"path", ctx.m.path}, {"fingerprint", fingerprint_file(ctx.m.path)}};
    j["inputs"] = ctx.inputs;
    j["artifacts"] = ctx.result.artifacts;
    json stages = json::array();
    for (const auto& [name, status] : ctx.result.stages) {
        stages.push_back({{"stage", name}, {"status", status}});
    }
    j["stages"] = stages;
    std::ofstream out(artifact_path(ctx, "run.json"), std::ios::binary);
    out << j.dump(2) << '\n';
}

using StageBody = std::function<void()>;

void run_stage(Context& ctx, const std::string& name, const StageBody& body) {
    try {
        body();
        ctx.result.stages.emplace_back(name, "ok");
    } catch (const UsageError& e) {
        ctx.result.stages.emplace_back(name, std::string("failed: ") + e.what());
        write_run_json(ctx);
        throw UsageError("stage " + name + ": " + e.what());
    } catch (const DataError& e) {
        ctx.result.stages.emplace_back(name, std::string("failed: ") + e.what());
        write_run_json(ctx);
        throw DataError("stage " + name + ": " + e.what());
    } catch (const std::exception& e) {
        ctx.result.stages.emplace_back(name, std::string("failed: ") + e.what());
        write_run_json(ctx);
        throw Error("stage " + name + ": " + e.what());
    }
}

void skip_stage(Context& ctx, const std::string& name, const std::string& reason) {
    ctx.result.stages.emplace_back(name, "skipped (" + reason + ")");
}

std::vector<normalizer::NormalizedTweet> normalized_rows(const corpus_io::Dataset& data,
                                                         int jobs) {
    std::vector<corpus_io::RawTweet> raw;
    raw.reserve(data.records.size());
    for (const auto& row : data.records) raw.push_back(row.tweet);
    return normalizer::normalize_records(raw, jobs);
}

// Replaces each row's text with its canonical normalized form.
corpus_io::Dataset normalize_dataset(const corpus_io::Dataset& data, int jobs) {
    const auto normalized = normalized_rows(data, jobs);
    corpus_io::Dataset out = data;
    for (std::size_t i = 0; i < out.records.size(); ++i) {
        out.records[i].tweet.text = normalized[i].text;
    }
    return out;
}

void stage_normalize(Context& ctx) {
    note_input(ctx, ctx.m.seeded_corpus);
    note_input(ctx, ctx.m.clean_corpus);
    const auto seeded_raw = corpus_io::read_jsonl(ctx.m.seeded_corpus);
    const auto clean_raw = corpus_io::read_jsonl(ctx.m.clean_corpus);
    ctx.seeded = normalizer::normalize_records(seeded_raw, ctx.m.jobs);
    ctx.clean = normalizer::normalize_records(clean_raw, ctx.m.jobs);

    std::vector<corpus_io::RawTweet> out;
    out.reserve(ctx.seeded.size());
    for (const auto& t : ctx.seeded) out.push_back({t.id, t.text});
    corpus_io::write_jsonl(out, artifact_path(ctx, "norm_seeded.jsonl"));
    note_artifact(ctx, "norm_seeded.jsonl");

    out.clear();
    for (const auto& t : ctx.clean) out.push_back({t.id, t.text});
    corpus_io::write_jsonl(out, artifact_path(ctx, "norm_clean.jsonl"));
    note_artifact(ctx, "norm_clean.jsonl");
}

void stage_extract(Context& ctx, std::vector<lexicon::CandidateSeed>& candidates) {
    const auto& spec = *ctx.m.extract;
    note_input(ctx, spec.labeled);
    const auto task = corpus_io::task_from_name(spec.task);
    const auto labeled = corpus_io::read_labeled_tsv(spec.labeled, task);
    std::vector<corpus_io::RawTweet> positives;
    for (const auto& row : labeled.records) {
        if (row.label == spec.positive_label) positives.push_back(row.tweet);
    }
    const auto normalized = normalizer::normalize_records(positives, ctx.m.jobs);
    candidates = lexicon::extract_candidates(normalized, ctx.m.trigger, nullptr, ctx.m.jobs);
    lexicon::write_candidates(candidates, artifact_path(ctx, "candidates.tsv"));
    note_artifact(ctx, "candidates.tsv");
}

void stage_curate(Context& ctx, const std::vector<lexicon::CandidateSeed>& candidates) {
    const auto& spec = *ctx.m.extract;
    note_input(ctx, spec.decisions);
    const auto decisions = lexicon::read_decisions(spec.decisions);
    auto curated = lexicon::curate(candidates, decisions);
    if (!curated.complete) {
        throw DataError("curation incomplete: " + std::to_string(curated.pending.size()) +
                        " candidates still pending");
    }
    ctx.off_lex = std::move(curated.offensive);
    ctx.hs_lex = std::move(curated.hateful);
    ctx.off_lex->save(artifact_path(ctx, "off_lexicon.txt"));
    note_artifact(ctx, "off_lexicon.txt");
    ctx.hs_lex->save(artifact_path(ctx, "hs_lexicon.txt"));
    note_artifact(ctx, "hs_lexicon.txt");
}

void stage_lexica(Context& ctx) {
    if (!ctx.m.offensive_lexicon.empty()) {
        note_input(ctx, ctx.m.offensive_lexicon);
        ctx.off_lex = lexicon::SeedLexicon::load(ctx.m.offensive_lexicon,
                                                 lexicon::SeedCategory::offensive);
    }
    if (!ctx.m.hateful_lexicon.empty()) {
        note_input(ctx, ctx.m.hateful_lexicon);
        ctx.hs_lex =
            lexicon::SeedLexicon::load(ctx.m.hateful_lexicon, lexicon::SeedCategory::hateful);
    }
    // Curated-but-empty lexica are dropped rather than compiled: an empty
    // lexicon means "no seeds of this kind", not a matcher error.
    std::optional<lexicon::SeedLexicon> off =
        ctx.off_lex && ctx.off_lex->size() > 0 ? ctx.off_lex : std::nullopt;
    std::optional<lexicon::SeedLexicon> hs =
        ctx.hs_lex && ctx.hs_lex->size() > 0 ? ctx.hs_lex : std::nullopt;
    if (!off && !hs) throw DataError("both lexica are empty; nothing to harvest");
    ctx.matcher.emplace(std::move(off), std::move(hs), ctx.m.trigger);
}

void stage_gate(Context& ctx) {
    if (ctx.m.gate.kind == "external") {
        note_input(ctx, ctx.m.gate.scores_seeded);
        note_input(ctx, ctx.m.gate.scores_clean);
        ctx.gate_seeded = std::make_unique<affect::ExternalGate>(
            affect::ExternalGate::load(ctx.m.gate.scores_seeded));
        ctx.gate_clean = std::make_unique<affect::ExternalGate>(
            affect::ExternalGate::load(ctx.m.gate.scores_clean));
        return;
    }
    if (!ctx.m.gate.checkpoint.empty()) {
        note_input(ctx, ctx.m.gate.checkpoint);
        ctx.gate_ckpt = affect::ModelCheckpoint::load(ctx.m.gate.checkpoint);
    } else {
        const auto& t = *ctx.m.gate.train;
        note_input(ctx, t.data);
        const auto data = normalize_dataset(
            corpus_io::read_labeled_tsv(t.data, corpus_io::Task::sentiment), ctx.m.jobs);
        affect::TrainConfig config;
        config.epochs = t.epochs;
        config.learning_rate = t.learning_rate;
        config.seed = *t.rng_seed;
        std::optional<corpus_io::Dataset> dev;
        if (!t.dev.empty()) {
            note_input(ctx, t.dev);
            dev = normalize_dataset(corpus_io::read_labeled_tsv(t.dev, corpus_io::Task::sentiment),
                                    ctx.m.jobs);
        }
        ctx.gate_ckpt = affect::train_affect(data, config, dev ? &*dev : nullptr);
        ctx.gate_ckpt->save(artifact_path(ctx, "affect_gate.ckpt"));
        note_artifact(ctx, "affect_gate.ckpt");
    }
    ctx.gate_seeded = std::make_unique<affect::CheckpointGate>(*ctx.gate_ckpt);
    ctx.gate_clean = std::make_unique<affect::CheckpointGate>(*ctx.gate_ckpt);
}

void dump_partial(Context& ctx, const std::string& rel, const augmentor::GateError& e) {
    // Best effort: the partial report helps diagnose scorer protocol faults.
    try {
        write_text_artifact(ctx, rel, e.partial.to_json());
    } catch (...) {
    }
}

void stage_harvest_positive(Context& ctx) {
    try {
        ctx.pos = augmentor::harvest_positive(ctx.seeded, *ctx.matcher, *ctx.gate_seeded,
                                              ctx.m.gate.threshold, ctx.m.jobs);
    } catch (const augmentor::GateError& e) {
        dump_partial(ctx, "harvest_positive_partial.json", e);
        throw;
    }
    corpus_io::write_dataset(augmentor::materialize(ctx.pos.offensive, corpus_io::Task::offensive),
                             artifact_path(ctx, "pool_offensive.tsv"));
    note_artifact(ctx, "pool_offensive.tsv");
    corpus_io::write_dataset(
        augmentor::materialize(ctx.pos.hateful, corpus_io::Task::hate_speech),
        artifact_path(ctx, "pool_hate_speech.tsv"));
    note_artifact(ctx, "pool_hate_speech.tsv");
    write_text_artifact(ctx, "harvest_positive.json", ctx.pos.report.to_json());

    std::vector<augmentor::HarvestRecord> evidence(ctx.pos.offensive.begin(),
                                                   ctx.pos.offensive.end());
    evidence.insert(evidence.end(), ctx.pos.hateful.begin(), ctx.pos.hateful.end());
    augmentor::write_evidence(evidence, artifact_path(ctx, "evidence_positive.jsonl"));
    note_artifact(ctx, "evidence_positive.jsonl");
}

void stage_harvest_negative(Context& ctx) {
    try {
        ctx.neg = augmentor::harvest_negative(ctx.clean, *ctx.matcher, *ctx.gate_clean,
                                              ctx.m.gate.threshold, ctx.m.jobs);
    } catch (const augmentor::GateError& e) {
        dump_partial(ctx, "harvest_negative_partial.json", e);
        throw;
    }
    corpus_io::write_dataset(augmentor::materialize(ctx.neg.clean, corpus_io::Task::offensive),
                             artifact_path(ctx, "pool_clean.tsv"));
    note_artifact(ctx, "pool_clean.tsv");
    write_text_artifact(ctx, "harvest_negative.json", ctx.neg.report.to_json());
    augmentor::write_evidence(ctx.neg.clean, artifact_path(ctx, "evidence_negative.jsonl"));
    note_artifact(ctx, "evidence_negative.jsonl");
}

void stage_balance(Context& ctx) {
    for (const auto& [task_name, spec] : ctx.m.balance) {
        const auto task = corpus_io::task_from_name(task_name);
        const auto& pool =
            task == corpus_io::Task::offensive ? ctx.pos.offensive : ctx.pos.hateful;
        const auto positives = augmentor::materialize(pool, task);
        const auto negatives = augmentor::materialize(ctx.neg.clean, task);
        auto balanced = augmentor::balance(positives, negatives, spec.prevalence, *spec.rng_seed);

        const std::string rel = "aug_train_" + task_name + ".tsv";
        corpus_io::write_dataset(balanced, artifact_path(ctx, rel));
        note_artifact(ctx, rel);

        json report;
        report["task"] = task_name;
        report["counts"] = balanced.counts;
        report["notes"] = balanced.notes;
        write_text_artifact(ctx, "balance_" + task_name + ".json", report.dump(2));
        ctx.augmented.emplace(task_name, std::move(balanced));
    }
}

void stage_train(Context& ctx) {
    for (const auto& [task_name, spec] : ctx.m.train) {
        const auto task = corpus_io::task_from_name(task_name);
        corpus_io::Dataset train_set;
        const auto aug_it = ctx.augmented.find(task_name);
        if (!spec.gold.empty()) {
            note_input(ctx, spec.gold);
            const auto gold =
                normalize_dataset(corpus_io::read_labeled_tsv(spec.gold, task), ctx.m.jobs);
            if (aug_it != ctx.augmented.end()) {
                const auto mode = spec.merge == "concat" ? augmentor::MergeMode::concat
                                                         : augmentor::MergeMode::augmented_only;
                train_set = augmentor::merge_with_gold(gold, aug_it->second, mode);
            } else {
                train_set = gold;
            }
        } else {
            train_set = aug_it->second;
        }
        const std::string rel = "train_set_" + task_name + ".tsv";
        corpus_io::write_dataset(train_set, artifact_path(ctx, rel));
        note_artifact(ctx, rel);

        affect::TrainConfig config;
        config.epochs = spec.epochs;
        config.learning_rate = spec.learning_rate;
        config.seed = *spec.rng_seed;
        config.feature = spec.feature;

        std::optional<affect::ModelCheckpoint> init;
        if (spec.init == "gate") {
            init = *ctx.gate_ckpt;
        } else if (!spec.init.empty()) {
            note_input(ctx, spec.init);
            init = affect::ModelCheckpoint::load(spec.init);
        }
        std::optional<corpus_io::Dataset> dev;
        if (!spec.dev.empty()) {
            note_input(ctx, spec.dev);
            dev = normalize_dataset(corpus_io::read_labeled_tsv(spec.dev, task), ctx.m.jobs);
        }

        auto model = experiment::train_task(train_set, config, init ? &*init : nullptr,
                                            dev ? &*dev : nullptr);
        const std::string ckpt_rel = "model_" + task_name + ".ckpt";
        model.save(artifact_path(ctx, ckpt_rel));
        note_artifact(ctx, ckpt_rel);
        ctx.train_sets.emplace(task_name, std::move(train_set));
        ctx.models.emplace(task_name, std::move(model));
    }
}

void stage_eval(Context& ctx) {
    for (const auto& [task_name, gold_path] : ctx.m.eval_gold) {
        const auto task = corpus_io::task_from_name(task_name);
        note_input(ctx, gold_path);
        const auto gold = corpus_io::read_labeled_tsv(gold_path, task);
        const auto probes = normalized_rows(gold, ctx.m.jobs);
        const auto& model = ctx.models.at(task_name);
        const auto predicted = experiment::predict(model, probes, ctx.m.jobs);

        const std::string pred_rel = "pred_" + task_name + ".tsv";
        corpus_io::write_dataset(predicted, artifact_path(ctx, pred_rel));
        note_artifact(ctx, pred_rel);

        const auto metrics = experiment::evaluate(gold, predicted);
        write_text_artifact(ctx, "metrics_" + task_name + ".json", metrics.to_json_string());
        write_text_artifact(ctx, "metrics_" + task_name + ".txt", metrics.to_table());
    }
}

void stage_reports(Context& ctx) {
    for (const auto& [task_name, aug] : ctx.augmented) {
        std::vector<std::pair<std::string, const corpus_io::Dataset*>> splits;
        splits.emplace_back("augmented", &aug);
        const auto train_it = ctx.train_sets.find(task_name);
        if (train_it != ctx.train_sets.end()) splits.emplace_back("train_set", &train_it->second);
        const auto report = experiment::distribution_report(splits);
        write_text_artifact(ctx, "dist_" + task_name + ".json", report.to_json());

        std::vector<const lexicon::SeedLexicon*> exclude;
        if (ctx.off_lex) exclude.push_back(&*ctx.off_lex);
        if (ctx.hs_lex) exclude.push_back(&*ctx.hs_lex);
        const auto unigrams = experiment::top_unigrams(aug, exclude, 20);
        std::ostringstream table;
        table << "token\tfrequency\n";
        for (const auto& [token, count] : unigrams) table << token << '\t' << count << '\n';
        write_text_artifact(ctx, "unigrams_" + task_name + ".tsv", table.str());
    }
}

}  // namespace

RunResult run_pipeline(const PipelineManifest& manifest) {
    const auto diagnostics = validate_manifest(manifest);
    if (!diagnostics.empty()) {
        std::string msg = "manifest validation failed:";
        for (const auto& d : diagnostics) msg += "\n  " + d;
        throw UsageError(msg);
    }

    Context ctx(manifest);
    ctx.out = manifest.out_dir;
    fs::create_directories(ctx.out);

    const bool lexica_provided =
        !manifest.offensive_lexicon.empty() || !manifest.hateful_lexicon.empty();
    std::vector<lexicon::CandidateSeed> candidates;

    run_stage(ctx, "normalize", [&] { stage_normalize(ctx); });
    if (lexica_provided) {
        skip_stage(ctx, "extract", "lexica provided");
        skip_stage(ctx, "curate", "lexica provided");
    } else {
        run_stage(ctx, "extract", [&] { stage_extract(ctx, candidates); });
        run_stage(ctx, "curate", [&] { stage_curate(ctx, candidates); });
    }
    run_stage(ctx, "lexica", [&] { stage_lexica(ctx); });
    run_stage(ctx, "gate", [&] { stage_gate(ctx); });
    run_stage(ctx, "harvest_positive", [&] { stage_harvest_positive(ctx); });
    run_stage(ctx, "harvest_negative", [&] { stage_harvest_negative(ctx); });
    if (manifest.balance.empty()) {
        skip_stage(ctx, "balance", "no balance targets");
    } else {
        run_stage(ctx, "balance", [&] { stage_balance(ctx); });
    }
    if (manifest.train.empty()) {
        skip_stage(ctx, "train", "no train targets");
    } else {
        run_stage(ctx, "train", [&] { stage_train(ctx); });
    }
    if (manifest.eval_gold.empty()) {
        skip_stage(ctx, "eval", "no eval targets");
    } else {
        run_stage(ctx, "eval", [&] { stage_eval(ctx); });
    }
    if (ctx.augmented.empty()) {
        skip_stage(ctx, "reports", "no augmented datasets");
    } else {
        run_stage(ctx, "reports", [&] { stage_reports(ctx); });
    }

    write_run_json(ctx);
    return ctx.result;
}

}  // namespace lexharvest::pipeline
