// lexharvest: weak-supervision corpus tooling for Arabic offensive/hate
// speech data. Subcommands cover each pipeline stage; `run` executes a whole
// manifest. Exit codes: 0 success, 1 usage/validation, 2 data error, 3
// internal error.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lexharvest/affect_gate.hpp"
#include "lexharvest/augmentor.hpp"
#include "lexharvest/corpus_io.hpp"
#include "lexharvest/errors.hpp"
#include "lexharvest/experiment.hpp"
#include "lexharvest/lexicon.hpp"
#include "lexharvest/metrics.hpp"
#include "lexharvest/normalizer.hpp"
#include "lexharvest/pipeline.hpp"

namespace {

using namespace lexharvest;

std::vector<normalizer::NormalizedTweet> load_normalized(const std::string& path, int jobs,
                                                         bool skip_bad) {
    const auto policy = skip_bad ? corpus_io::BadLinePolicy::skip : corpus_io::BadLinePolicy::fail;
    const auto raw = corpus_io::read_jsonl(path, policy);
    return normalizer::normalize_records(raw, jobs);
}

corpus_io::Dataset load_normalized_tsv(const std::string& path, corpus_io::Task task, int jobs) {
    auto data = corpus_io::read_labeled_tsv(path, task);
    std::vector<corpus_io::RawTweet> raw;
    raw.reserve(data.records.size());
    for (const auto& row : data.records) raw.push_back(row.tweet);
    const auto normalized = normalizer::normalize_records(raw, jobs);
    for (std::size_t i = 0; i < data.records.size(); ++i) {
        data.records[i].tweet.text = normalized[i].text;
    }
    return data;
}

// pool.tsv -> pool.offensive.tsv / pool.hate_speech.tsv
std::string pool_variant(const std::string& base, const std::string& tag) {
    const std::filesystem::path p(base);
    std::filesystem::path out = p.parent_path() / p.stem();
    out += "." + tag;
    out += p.extension();
    return out.string();
}

struct NormalizeArgs {
    std::string in = "-";
    std::string out = "-";
    int jobs = 0;
    bool skip_bad = false;
};

void cmd_normalize(const NormalizeArgs& args) {
    std::vector<corpus_io::RawTweet> raw;
    const auto policy =
        args.skip_bad ? corpus_io::BadLinePolicy::skip : corpus_io::BadLinePolicy::fail;
    if (args.in == "-") {
        corpus_io::JsonlReader reader(std::cin, "<stdin>", policy);
        while (auto t = reader.next()) raw.push_back(std::move(*t));
    } else {
        raw = corpus_io::read_jsonl(args.in, policy);
    }
    const auto normalized = normalizer::normalize_records(raw, args.jobs);
    std::vector<corpus_io::RawTweet> out;
    out.reserve(normalized.size());
    for (const auto& t : normalized) out.push_back({t.id, t.text});
    if (args.out == "-") {
        corpus_io::write_jsonl(out, std::cout, "<stdout>");
    } else {
        corpus_io::write_jsonl(out, args.out);
    }
}

struct ExtractArgs {
    std::string trigger = "يا";
    std::string in;
    std::string labels;
    std::string task = "offensive";
    std::string positive_label;
    std::string out;
    int jobs = 0;
};

void cmd_extract(const ExtractArgs& args) {
    std::vector<corpus_io::RawTweet> raw;
    if (!args.labels.empty()) {
        const auto task = corpus_io::task_from_name(args.task);
        const auto labeled = corpus_io::read_labeled_tsv(args.labels, task);
        const std::string positive =
            args.positive_label.empty() ? corpus_io::positive_label(task) : args.positive_label;
        if (args.in.empty()) {
            // Labels file doubles as the corpus.
            for (const auto& row : labeled.records) {
                if (row.label == positive) raw.push_back(row.tweet);
            }
        } else {
            std::unordered_map<std::string, const std::string*> label_by_id;
            for (const auto& row : labeled.records) {
                label_by_id.emplace(row.tweet.id, &row.label);
            }
            for (auto& t : corpus_io::read_jsonl(args.in)) {
                const auto it = label_by_id.find(t.id);
                if (it != label_by_id.end() && *it->second == positive) raw.push_back(std::move(t));
            }
        }
    } else {
        if (args.in.empty()) throw UsageError("extract-seeds needs --in or --labels");
        raw = corpus_io::read_jsonl(args.in);
    }

    const auto normalized = normalizer::normalize_records(raw, args.jobs);
    lexicon::ExtractionStats stats;
    const auto candidates =
        lexicon::extract_candidates(normalized, args.trigger, &stats, args.jobs);
    lexicon::write_candidates(candidates, args.out);
    std::cout << "candidates: " << candidates.size() << "\n"
              << "trigger occurrences with a successor: "
              << stats.trigger_occurrences_with_successor << "\n"
              << "excluded (placeholder successor): " << stats.excluded_placeholder << "\n"
              << "excluded (trigger successor): " << stats.excluded_trigger << "\n";
}

struct CurateArgs {
    std::string candidates;
    std::string decisions;
    std::string off_out = "off_lexicon.txt";
    std::string hs_out = "hs_lexicon.txt";
    bool interactive = false;
};

void curation_summary(const lexicon::CurationResult& result) {
    std::cout << "offensive seeds: " << result.offensive.size() << "\n"
              << "hateful seeds: " << result.hateful.size() << "\n"
              << "pending: " << result.pending.size() << "\n"
              << (result.complete ? "curation complete\n" : "curation incomplete\n");
}

void cmd_curate(const CurateArgs& args) {
    const auto candidates = lexicon::read_candidates(args.candidates);
    lexicon::DecisionMap decisions;
    if (std::filesystem::exists(args.decisions)) {
        decisions = lexicon::read_decisions(args.decisions);
    } else if (!args.interactive) {
        throw DataError("decisions file not found: " + args.decisions);
    }

    if (args.interactive) {
        auto pending_of = [&] {
            std::vector<std::string> out;
            for (const auto& c : candidates) {
                const auto it = decisions.find(c.surface);
                if (it == decisions.end() || it->second == lexicon::Verdict::pending) {
                    out.push_back(c.surface);
                }
            }
            return out;
        };
        std::unordered_map<std::string, const lexicon::CandidateSeed*> by_surface;
        for (const auto& c : candidates) by_surface.emplace(c.surface, &c);

        std::vector<std::string> todo = pending_of();
        std::vector<std::string> history;
        std::size_t i = 0;
        while (i < todo.size()) {
            const auto& c = *by_surface.at(todo[i]);
            std::cout << c.surface << "  (frequency " << c.frequency << ", e.g.";
            for (const auto& id : c.sample_ids) std::cout << " " << id;
            std::cout << ")\n[o]ffensive [h]ateful [d]rop [u]ndo [q]uit-and-save: " << std::flush;
            std::string line;
            if (!std::getline(std::cin, line)) break;
            if (line == "o") {
                decisions[c.surface] = lexicon::Verdict::offensive;
            } else if (line == "h") {
                decisions[c.surface] = lexicon::Verdict::hateful;
            } else if (line == "d") {
                decisions[c.surface] = lexicon::Verdict::drop;
            } else if (line == "u") {
                if (!history.empty()) {
                    decisions[history.back()] = lexicon::Verdict::pending;
                    history.pop_back();
                    if (i > 0) --i;
                }
                continue;
            } else if (line == "q") {
                break;
            } else {
                std::cout << "unrecognized key\n";
                continue;
            }
            history.push_back(c.surface);
            ++i;
        }
        // Every candidate gets a verdict line so the file is self-contained.
        for (const auto& c : candidates) {
            decisions.emplace(c.surface, lexicon::Verdict::pending);
        }
        lexicon::write_decisions(decisions, args.decisions);
        std::cout << "decisions saved to " << args.decisions << "\n";
    }

    const auto result = lexicon::curate(candidates, decisions);
    if (result.complete) {
        result.offensive.save(args.off_out);
        result.hateful.save(args.hs_out);
        std::cout << "lexica written to " << args.off_out << " and " << args.hs_out << "\n";
    }
    curation_summary(result);
}

struct HarvestArgs {
    std::string corpus;
    std::string off_lexicon;
    std::string hs_lexicon;
    std::string trigger = "يا";
    std::string mode;
    std::string gate;
    std::string checkpoint;
    std::string scores;
    std::string emit_batch;
    double threshold = 0.0;
    std::string out;
    std::string report;
    std::string evidence;
    int jobs = 0;
    bool skip_bad = false;
};

void cmd_harvest(const HarvestArgs& args) {
    const auto corpus = load_normalized(args.corpus, args.jobs, args.skip_bad);

    std::optional<lexicon::SeedLexicon> off;
    std::optional<lexicon::SeedLexicon> hs;
    if (!args.off_lexicon.empty()) {
        off = lexicon::SeedLexicon::load(args.off_lexicon, lexicon::SeedCategory::offensive);
    }
    if (!args.hs_lexicon.empty()) {
        hs = lexicon::SeedLexicon::load(args.hs_lexicon, lexicon::SeedCategory::hateful);
    }
    const lexicon::Matcher matcher(std::move(off), std::move(hs), args.trigger);
    const bool positive_mode = args.mode == "positive";

    if (!args.emit_batch.empty()) {
        // External-gate protocol, step one: write the records the gate will
        // be asked about. A scorer fills in batch_out.tsv; rerun with
        // --scores to finish the harvest.
        std::vector<normalizer::NormalizedTweet> eligible;
        for (const auto&t : corpus) {
            const auto m = matcher.match(t.tokens);
            if (!m.trigger_present) continue;
            const bool seeded = !m.offensive_hits.empty() || !m.hateful_hits.empty();
            if (seeded == positive_mode) eligible.push_back(t);
        }
        affect::write_batch_input(eligible, args.emit_batch);
        std::cout << "wrote " << eligible.size() << " records to " << args.emit_batch << "\n";
        return;
    }

    if (args.out.empty()) throw UsageError("--out is required unless --emit-batch is given");
    std::unique_ptr<affect::Gate> gate;
    if (args.gate == "checkpoint") {
        if (args.checkpoint.empty()) throw UsageError("--gate checkpoint needs --checkpoint");
        gate = std::make_unique<affect::CheckpointGate>(
            affect::ModelCheckpoint::load(args.checkpoint));
    } else if (args.gate == "external") {
        if (args.scores.empty()) throw UsageError("--gate external needs --scores");
        gate = std::make_unique<affect::ExternalGate>(affect::ExternalGate::load(args.scores));
    } else {
        throw UsageError("--gate must be checkpoint or external");
    }

    augmentor::HarvestOutput result;
    try {
        result = positive_mode
                     ? augmentor::harvest_positive(corpus, matcher, *gate, args.threshold, args.jobs)
                     : augmentor::harvest_negative(corpus, matcher, *gate, args.threshold, args.jobs);
    } catch (const augmentor::GateError& e) {
        if (!args.report.empty()) {
            std::ofstream out(args.report, std::ios::binary);
            out << e.partial.to_json() << '\n';
            std::cerr << "partial report written to " << args.report << "\n";
        }
        throw;
    }

    if (positive_mode) {
        const bool both = matcher.has_offensive() && matcher.has_hateful();
        if (matcher.has_offensive()) {
            const auto path = both ? pool_variant(args.out, "offensive") : args.out;
            corpus_io::write_dataset(
                augmentor::materialize(result.offensive, corpus_io::Task::offensive), path);
            std::cout << "offensive pool: " << result.offensive.size() << " -> " << path << "\n";
        }
        if (matcher.has_hateful()) {
            const auto path = both ? pool_variant(args.out, "hate_speech") : args.out;
            corpus_io::write_dataset(
                augmentor::materialize(result.hateful, corpus_io::Task::hate_speech), path);
            std::cout << "hateful pool: " << result.hateful.size() << " -> " << path << "\n";
        }
    } else {
        corpus_io::write_dataset(augmentor::materialize(result.clean, corpus_io::Task::offensive),
                                 args.out);
        std::cout << "clean pool: " << result.clean.size() << " -> " << args.out << "\n";
    }

    if (!args.report.empty()) {
        std::ofstream out(args.report, std::ios::binary);
        if (!out) throw DataError("cannot open for writing: " + args.report);
        out << result.report.to_json() << '\n';
    }
    if (!args.evidence.empty()) {
        std::vector<augmentor::HarvestRecord> all(result.offensive.begin(),
                                                  result.offensive.end());
        all.insert(all.end(), result.hateful.begin(), result.hateful.end());
        all.insert(all.end(), result.clean.begin(), result.clean.end());
        augmentor::write_evidence(all, args.evidence);
    }
    std::cout << "scanned " << result.report.scanned << ", trigger " << result.report.trigger_hits
              << ", seeded " << result.report.seed_hits << ", emitted "
              << result.report.emitted_tweets << "\n";
}

struct BalanceArgs {
    std::string pos;
    std::string neg;
    std::string task;
    double prevalence = 0.0;
    std::uint64_t seed = 0;
    std::string out;
    std::string report;
};

void cmd_balance(const BalanceArgs& args) {
    const auto task = corpus_io::task_from_name(args.task);
    auto pos_rows = corpus_io::read_pool_tsv(args.pos);
    auto neg_rows = corpus_io::read_pool_tsv(args.neg);
    // The clean pool's label column is informational; relabel for this task.
    for (auto& row : neg_rows) row.label = corpus_io::negative_label(task);
    const auto positives = corpus_io::make_dataset(task, std::move(pos_rows));
    const auto negatives = corpus_io::make_dataset(task, std::move(neg_rows));

    const auto balanced = augmentor::balance(positives, negatives, args.prevalence, args.seed);
    corpus_io::write_dataset(balanced, args.out);

    if (!args.report.empty()) {
        nlohmann::json j;
        j["task"] = args.task;
        j["counts"] = balanced.counts;
        j["notes"] = balanced.notes;
        std::ofstream out(args.report, std::ios::binary);
        if (!out) throw DataError("cannot open for writing: " + args.report);
        out << j.dump(2) << '\n';
    }
    std::cout << "balanced dataset: " << balanced.records.size() << " records";
    for (const auto& [label, count] : balanced.counts) std::cout << ", " << label << "=" << count;
    std::cout << " -> " << args.out << "\n";
    const auto it = balanced.notes.find("achieved_prevalence");
    if (it != balanced.notes.end()) {
        std::cout << "pool short: achieved prevalence " << it->second << "\n";
    }
}

struct TrainArgs {
    std::string data;
    std::string task;
    std::string dev;
    std::string init;
    std::string out;
    std::uint64_t seed = 42;
    int epochs = 20;
    double lr = 0.1;
    std::vector<int> orders;
    std::uint32_t dim = 0;
    std::uint64_t hash_seed = 0;
    bool hash_seed_set = false;
    int jobs = 0;
};

void cmd_train(const TrainArgs& args) {
    const auto task = corpus_io::task_from_name(args.task);
    const auto data = load_normalized_tsv(args.data, task, args.jobs);
    std::optional<corpus_io::Dataset> dev;
    if (!args.dev.empty()) dev = load_normalized_tsv(args.dev, task, args.jobs);

    affect::TrainConfig config;
    config.epochs = args.epochs;
    config.learning_rate = args.lr;
    config.seed = args.seed;
    if (!args.orders.empty() || args.dim != 0 || args.hash_seed_set) {
        affect::FeatureSpec spec;
        if (!args.orders.empty()) spec.orders = args.orders;
        if (args.dim != 0) spec.dimension = args.dim;
        if (args.hash_seed_set) spec.hash_seed = args.hash_seed;
        config.feature = spec;
    }

    std::optional<affect::ModelCheckpoint> init;
    if (!args.init.empty()) init = affect::ModelCheckpoint::load(args.init);

    const auto model =
        experiment::train_task(data, config, init ? &*init : nullptr, dev ? &*dev : nullptr);
    model.save(args.out);
    std::cout << "trained " << args.task << " model (" << model.meta.init << " init, best epoch "
              << model.meta.best_epoch << ") -> " << args.out << "\n";
}

struct PredictArgs {
    std::string model;
    std::string in;
    std::string out;
    int jobs = 0;
    bool skip_bad = false;
};

void cmd_predict(const PredictArgs& args) {
    const auto checkpoint = affect::ModelCheckpoint::load(args.model);
    const auto corpus = load_normalized(args.in, args.jobs, args.skip_bad);
    const auto predicted = experiment::predict(checkpoint, corpus, args.jobs);
    corpus_io::write_dataset(predicted, args.out);
    std::cout << "predicted " << predicted.records.size() << " records -> " << args.out << "\n";
}

struct EvalArgs {
    std::string gold;
    std::string pred;
    std::string task;
    std::string json_out;
};

void cmd_eval(const EvalArgs& args) {
    const auto task = corpus_io::task_from_name(args.task);
    const auto gold = corpus_io::read_labeled_tsv(args.gold, task);
    const auto pred = corpus_io::read_labeled_tsv(args.pred, task);
    const auto metrics = experiment::evaluate(gold, pred);
    if (!args.json_out.empty()) {
        std::ofstream out(args.json_out, std::ios::binary);
        if (!out) throw DataError("cannot open for writing: " + args.json_out);
        out << metrics.to_json_string() << '\n';
    }
    std::cout << metrics.to_table();
}

struct ReportDistArgs {
    std::vector<std::string> splits;  // name=path
    std::string task;
    std::string json_out;
};

void cmd_report_dist(const ReportDistArgs& args) {
    const auto task = corpus_io::task_from_name(args.task);
    std::vector<corpus_io::Dataset> datasets;
    std::vector<std::pair<std::string, const corpus_io::Dataset*>> splits;
    datasets.reserve(args.splits.size());
    for (const auto& spec : args.splits) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
            throw UsageError("--split expects name=path, got '" + spec + "'");
        }
        datasets.push_back(corpus_io::read_labeled_tsv(spec.substr(eq + 1), task));
    }
    for (std::size_t i = 0; i < args.splits.size(); ++i) {
        splits.emplace_back(args.splits[i].substr(0, args.splits[i].find('=')), &datasets[i]);
    }
    const auto report = experiment::distribution_report(splits);
    if (!args.json_out.empty()) {
        std::ofstream out(args.json_out, std::ios::binary);
        if (!out) throw DataError("cannot open for writing: " + args.json_out);
        out << report.to_json() << '\n';
    }
    std::cout << report.to_table();
}

struct ReportAffectArgs {
    std::string data;
    std::string task;
    std::string checkpoint;
    std::string scores;
    std::string json_out;
    int jobs = 0;
};

void cmd_report_affect(const ReportAffectArgs& args) {
    const auto task = corpus_io::task_from_name(args.task);
    const auto data = load_normalized_tsv(args.data, task, args.jobs);
    std::unique_ptr<affect::Gate> gate;
    if (!args.checkpoint.empty()) {
        gate = std::make_unique<affect::CheckpointGate>(
            affect::ModelCheckpoint::load(args.checkpoint));
    } else if (!args.scores.empty()) {
        gate = std::make_unique<affect::ExternalGate>(affect::ExternalGate::load(args.scores));
    } else {
        throw UsageError("report affect needs --checkpoint or --scores");
    }
    const auto report = experiment::affect_distribution(data, *gate);
    if (!args.json_out.empty()) {
        std::ofstream out(args.json_out, std::ios::binary);
        if (!out) throw DataError("cannot open for writing: " + args.json_out);
        out << report.to_json() << '\n';
    }
    std::cout << report.to_table();
}

struct ReportUnigramsArgs {
    std::string data;
    std::string task;
    std::vector<std::string> exclude;
    std::size_t k = 20;
    std::string out;
    int jobs = 0;
};

void cmd_report_unigrams(const ReportUnigramsArgs& args) {
    const auto task = corpus_io::task_from_name(args.task);
    const auto data = load_normalized_tsv(args.data, task, args.jobs);
    std::vector<lexicon::SeedLexicon> lexica;
    std::vector<const lexicon::SeedLexicon*> exclude;
    lexica.reserve(args.exclude.size());
    for (const auto& path : args.exclude) {
        lexica.push_back(lexicon::SeedLexicon::load(path, lexicon::SeedCategory::offensive));
    }
    for (const auto& lex : lexica) exclude.push_back(&lex);
    const auto ranked = experiment::top_unigrams(data, exclude, args.k);

    std::ostringstream table;
    table << "token\tfrequency\n";
    for (const auto& [token, count] : ranked) table << token << '\t' << count << '\n';
    if (!args.out.empty()) {
        std::ofstream out(args.out, std::ios::binary);
        if (!out) throw DataError("cannot open for writing: " + args.out);
        out << table.str();
    } else {
        std::cout << table.str();
    }
}

struct RunArgs {
    std::string manifest;
    bool validate_only = false;
};

void cmd_run(const RunArgs& args) {
    const auto manifest = pipeline::PipelineManifest::parse(args.manifest);
    if (args.validate_only) {
        const auto diagnostics = pipeline::validate_manifest(manifest);
        if (diagnostics.empty()) {
            std::cout << "manifest ok\n";
            return;
        }
        for (const auto& d : diagnostics) std::cout << d << "\n";
        throw UsageError("manifest validation failed (" + std::to_string(diagnostics.size()) +
                         " problems)");
    }
    const auto result = pipeline::run_pipeline(manifest);
    for (const auto& [stage, status] : result.stages) {
        std::cout << stage << ": " << status << "\n";
    }
    std::cout << result.artifacts.size() << " artifacts under " << manifest.out_dir << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"weak-supervision corpus toolkit for Arabic offensive/hate speech data"};
    app.require_subcommand(1);

    NormalizeArgs normalize_args;
    auto* normalize = app.add_subcommand("normalize", "normalize a JSONL corpus (stdin/stdout filter)");
    normalize->add_option("--in", normalize_args.in, "input JSONL ('-' for stdin)");
    normalize->add_option("--out", normalize_args.out, "output JSONL ('-' for stdout)");
    normalize->add_option("--jobs", normalize_args.jobs, "worker threads (0 = auto)");
    normalize->add_flag("--skip-bad", normalize_args.skip_bad, "skip malformed lines");
    normalize->callback([&] { cmd_normalize(normalize_args); });

    ExtractArgs extract_args;
    auto* extract = app.add_subcommand("extract-seeds", "collect trigger-adjacent seed candidates");
    extract->add_option("--trigger", extract_args.trigger, "trigger token");
    extract->add_option("--in", extract_args.in, "JSONL corpus");
    extract->add_option("--labels", extract_args.labels, "labeled TSV restricting extraction");
    extract->add_option("--task", extract_args.task, "task of the labels file");
    extract->add_option("--positive-label", extract_args.positive_label,
                        "label whose records seed extraction (default: the task's positive label)");
    extract->add_option("--out", extract_args.out, "candidates TSV")->required();
    extract->add_option("--jobs", extract_args.jobs, "worker threads (0 = auto)");
    extract->callback([&] { cmd_extract(extract_args); });

    CurateArgs curate_args;
    auto* curate = app.add_subcommand("curate", "turn candidate verdicts into seed lexica");
    curate->add_option("--candidates", curate_args.candidates, "candidates TSV")->required();
    curate->add_option("--decisions", curate_args.decisions, "decision TSV (read and updated)")
        ->required();
    curate->add_option("--off-out", curate_args.off_out, "offensive lexicon output");
    curate->add_option("--hs-out", curate_args.hs_out, "hateful lexicon output");
    curate->add_flag("--interactive", curate_args.interactive, "review pending candidates on the terminal");
    curate->callback([&] { cmd_curate(curate_args); });

    HarvestArgs harvest_args;
    auto* harvest = app.add_subcommand("harvest", "gate trigger/seed matches into labeled pools");
    harvest->add_option("--corpus", harvest_args.corpus, "JSONL corpus")->required();
    harvest->add_option("--off-lexicon", harvest_args.off_lexicon, "offensive seed lexicon");
    harvest->add_option("--hs-lexicon", harvest_args.hs_lexicon, "hateful seed lexicon");
    harvest->add_option("--trigger", harvest_args.trigger, "trigger token");
    harvest->add_option("--mode", harvest_args.mode, "positive | negative")
        ->required()
        ->check(CLI::IsMember({"positive", "negative"}));
    harvest->add_option("--gate", harvest_args.gate, "checkpoint | external");
    harvest->add_option("--checkpoint", harvest_args.checkpoint, "polarity model checkpoint");
    harvest->add_option("--scores", harvest_args.scores, "external scorer output TSV");
    harvest->add_option("--emit-batch", harvest_args.emit_batch,
                        "write the gate's input batch and exit (external protocol step 1)");
    harvest->add_option("--threshold", harvest_args.threshold, "minimum gate score");
    harvest->add_option("--out", harvest_args.out, "pool TSV (positive mode with two lexica tags the name: pool.tsv -> pool.offensive.tsv / pool.hate_speech.tsv)");
    harvest->add_option("--report", harvest_args.report, "funnel report JSON");
    harvest->add_option("--evidence", harvest_args.evidence, "evidence JSONL sidecar");
    harvest->add_option("--jobs", harvest_args.jobs, "worker threads (0 = auto)");
    harvest->add_flag("--skip-bad", harvest_args.skip_bad, "skip malformed corpus lines");
    harvest->callback([&] { cmd_harvest(harvest_args); });

    BalanceArgs balance_args;
    auto* balance = app.add_subcommand("balance", "draw negatives to hit a target prevalence");
    balance->add_option("--pos", balance_args.pos, "positive pool TSV")->required();
    balance->add_option("--neg", balance_args.neg, "negative pool TSV")->required();
    balance->add_option("--task", balance_args.task, "offensive | hate_speech")->required();
    balance->add_option("--prevalence", balance_args.prevalence, "target positive share in (0,1)")
        ->required();
    balance->add_option("--seed", balance_args.seed, "RNG seed")->required();
    balance->add_option("--out", balance_args.out, "balanced dataset TSV")->required();
    balance->add_option("--report", balance_args.report, "balance report JSON");
    balance->callback([&] { cmd_balance(balance_args); });

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "train a task classifier");
    train->add_option("--data", train_args.data, "labeled TSV")->required();
    train->add_option("--task", train_args.task, "task name")->required();
    train->add_option("--dev", train_args.dev, "dev TSV for best-epoch selection");
    train->add_option("--init", train_args.init, "warm-start checkpoint");
    train->add_option("--out", train_args.out, "checkpoint output")->required();
    train->add_option("--seed", train_args.seed, "RNG seed");
    train->add_option("--epochs", train_args.epochs, "training epochs");
    train->add_option("--lr", train_args.lr, "learning rate");
    train->add_option("--orders", train_args.orders, "character n-gram orders")->delimiter(',');
    train->add_option("--dim", train_args.dim, "hashed feature dimension");
    auto* hash_seed_opt = train->add_option("--hash-seed", train_args.hash_seed, "feature hash seed");
    train->add_option("--jobs", train_args.jobs, "worker threads (0 = auto)");
    train->callback([&] {
        train_args.hash_seed_set = hash_seed_opt->count() > 0;
        cmd_train(train_args);
    });

    PredictArgs predict_args;
    auto* predict = app.add_subcommand("predict", "label a corpus with a trained checkpoint");
    predict->add_option("--model", predict_args.model, "checkpoint")->required();
    predict->add_option("--in", predict_args.in, "JSONL corpus")->required();
    predict->add_option("--out", predict_args.out, "predictions TSV")->required();
    predict->add_option("--jobs", predict_args.jobs, "worker threads (0 = auto)");
    predict->add_flag("--skip-bad", predict_args.skip_bad, "skip malformed corpus lines");
    predict->callback([&] { cmd_predict(predict_args); });

    EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval", "score predictions against gold labels");
    eval->add_option("--gold", eval_args.gold, "gold TSV")->required();
    eval->add_option("--pred", eval_args.pred, "predictions TSV")->required();
    eval->add_option("--task", eval_args.task, "task name")->required();
    eval->add_option("--json", eval_args.json_out, "also write metrics JSON here");
    eval->callback([&] { cmd_eval(eval_args); });

    auto* report = app.add_subcommand("report", "dataset diagnostics");
    report->require_subcommand(1);

    ReportDistArgs dist_args;
    auto* dist = report->add_subcommand("dist", "label distribution per split");
    dist->add_option("--split", dist_args.splits, "name=path labeled TSV (repeatable)")
        ->required();
    dist->add_option("--task", dist_args.task, "task name")->required();
    dist->add_option("--json", dist_args.json_out, "also write JSON here");
    dist->callback([&] { cmd_report_dist(dist_args); });

    ReportAffectArgs affect_args;
    auto* affect_report = report->add_subcommand("affect", "gate polarity per gold label");
    affect_report->add_option("--data", affect_args.data, "labeled TSV")->required();
    affect_report->add_option("--task", affect_args.task, "task name")->required();
    affect_report->add_option("--checkpoint", affect_args.checkpoint, "polarity checkpoint");
    affect_report->add_option("--scores", affect_args.scores, "external scorer output");
    affect_report->add_option("--json", affect_args.json_out, "also write JSON here");
    affect_report->add_option("--jobs", affect_args.jobs, "worker threads (0 = auto)");
    affect_report->callback([&] { cmd_report_affect(affect_args); });

    ReportUnigramsArgs unigrams_args;
    auto* unigrams = report->add_subcommand("unigrams", "top tokens of the positive class");
    unigrams->add_option("--data", unigrams_args.data, "labeled TSV")->required();
    unigrams->add_option("--task", unigrams_args.task, "task name")->required();
    unigrams->add_option("--exclude", unigrams_args.exclude, "seed lexicon to exclude (repeatable)");
    unigrams->add_option("-k,--top", unigrams_args.k, "how many tokens");
    unigrams->add_option("--out", unigrams_args.out, "write TSV here instead of stdout");
    unigrams->add_option("--jobs", unigrams_args.jobs, "worker threads (0 = auto)");
    unigrams->callback([&] { cmd_report_unigrams(unigrams_args); });

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "execute a pipeline manifest");
    run->add_option("--manifest", run_args.manifest, "manifest JSON")->required();
    run->add_flag("--validate-only", run_args.validate_only, "check the manifest and exit");
    run->callback([&] { cmd_run(run_args); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 1;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
