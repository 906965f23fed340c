// Release gate: nine acceptance criteria, each printing exactly one PASS or
// FAIL line with its wall time. The process exits nonzero if any criterion
// fails or overruns its time budget. Criteria are independent; a failure in
// one never hides the others.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "lexharvest/affect_gate.hpp"
#include "lexharvest/augmentor.hpp"
#include "lexharvest/corpus_io.hpp"
#include "lexharvest/experiment.hpp"
#include "lexharvest/lexicon.hpp"
#include "lexharvest/metrics.hpp"
#include "lexharvest/normalizer.hpp"
#include "helpers.hpp"

namespace fs = std::filesystem;
using namespace lexharvest;
using testutil::MapGate;
using testutil::TempDir;
using testutil::norm;
using testutil::read_file;
using testutil::write_file;

namespace {

// ---------------------------------------------------------------------------
// Tiny check harness. Criteria throw CheckFailure with a human-readable
// reason; anything else escaping a criterion is reported as unexpected.

struct CheckFailure {
    std::string message;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw CheckFailure{what};
}

template <typename T>
void require_eq(const T& got, const T& want, const std::string& what) {
    if (!(got == want)) {
        std::ostringstream msg;
        msg << what << ": expected " << want << ", got " << got;
        throw CheckFailure{msg.str()};
    }
}

void require_eq_u64(std::uint64_t got, std::uint64_t want, const std::string& what) {
    require_eq<std::uint64_t>(got, want, what);
}

void require_close(double got, double want, double tol, const std::string& what) {
    if (!(std::fabs(got - want) <= tol)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << what << ": |" << got << " - " << want << "| > " << tol;
        throw CheckFailure{msg.str()};
    }
}

// ---------------------------------------------------------------------------
// Criterion 1: balance arithmetic at the published scale. 10,489 positives at
// 5% prevalence must request exactly 199,291 negatives for a 209,780-record
// dataset, with the drawn rows relabeled to the positives' task.

void criterion_balance_arithmetic() {
    corpus_io::Dataset positives;
    positives.task = corpus_io::Task::hate_speech;
    positives.records.reserve(10489);
    for (int i = 0; i < 10489; ++i) {
        positives.records.push_back({{"p" + std::to_string(i), "نص مسيء"}, "HS"});
    }
    positives.recount();

    corpus_io::Dataset pool;
    pool.task = corpus_io::Task::offensive;
    pool.records.reserve(200000);
    for (int i = 0; i < 200000; ++i) {
        pool.records.push_back({{"n" + std::to_string(i), "نص عادي"}, "NOT_OFF"});
    }
    pool.recount();

    const auto out = augmentor::balance(positives, pool, 0.05, 7);
    require_eq_u64(out.records.size(), 209780, "balanced record count");
    require_eq_u64(out.counts.at("HS"), 10489, "positive count");
    require_eq_u64(out.counts.at("NOT_HS"), 199291, "drawn negative count");
    require_eq<std::string>(out.notes.at("required_negatives"), "199291", "required_negatives");
    require_eq<std::string>(out.notes.at("drawn_negatives"), "199291", "drawn_negatives");
    require(out.notes.find("pool_short") == out.notes.end(), "pool was large enough");
    require(out.task == corpus_io::Task::hate_speech, "task follows the positives");
}

// ---------------------------------------------------------------------------
// Criterion 2: whole-percent distribution shares on a fixture with the
// published split shape: 6,994 records with 1,409 and 361 positives must
// report 20% and 5%.

void criterion_distribution_percent() {
    using experiment::DistributionReport;

    corpus_io::Dataset off;
    off.task = corpus_io::Task::offensive;
    for (int i = 0; i < 6994; ++i) {
        off.records.push_back({{"a" + std::to_string(i), "نص"}, i < 1409 ? "OFF" : "NOT_OFF"});
    }
    off.recount();

    corpus_io::Dataset hs;
    hs.task = corpus_io::Task::hate_speech;
    for (int i = 0; i < 6994; ++i) {
        hs.records.push_back({{"b" + std::to_string(i), "نص"}, i < 361 ? "HS" : "NOT_HS"});
    }
    hs.recount();

    const auto rep_off = experiment::distribution_report({{"TRAIN", &off}});
    require_eq<std::size_t>(rep_off.rows.size(), 1, "row count");
    require_eq_u64(rep_off.rows[0].total, 6994, "offensive split total");
    require_eq<int>(DistributionReport::percent(rep_off.rows[0].counts.at("OFF"),
                                                rep_off.rows[0].total),
                    20, "offensive share");

    const auto rep_hs = experiment::distribution_report({{"TRAIN", &hs}});
    require_eq_u64(rep_hs.rows[0].total, 6994, "hate-speech split total");
    require_eq<int>(DistributionReport::percent(rep_hs.rows[0].counts.at("HS"),
                                                rep_hs.rows[0].total),
                    5, "hate-speech share");

    require_eq<int>(DistributionReport::percent(1409, 6994), 20, "percent(1409, 6994)");
    require_eq<int>(DistributionReport::percent(361, 6994), 5, "percent(361, 6994)");
}

// ---------------------------------------------------------------------------
// Criterion 3: the hash-table matcher agrees with a naive membership scan on
// 10,000 randomized token lists, for two-lexicon and one-lexicon setups.

lexicon::MatchResult naive_match(const std::vector<std::string>& tokens,
                                 const std::set<std::string>* offensive,
                                 const std::set<std::string>* hateful,
                                 const std::string& trigger) {
    lexicon::MatchResult r;
    for (const auto& tok : tokens) {
        if (offensive && offensive->count(tok)) r.offensive_hits.push_back(tok);
        if (hateful && hateful->count(tok)) r.hateful_hits.push_back(tok);
        if (tok == trigger) r.trigger_present = true;
    }
    return r;
}

void criterion_matcher_oracle() {
    const std::set<std::string> off_words = {"كلب", "حمار", "قذر", "غبي"};
    const std::set<std::string> hate_words = {"حقير", "خسيس", "كلب"};  // overlap on purpose

    lexicon::SeedLexicon off;
    off.category = lexicon::SeedCategory::offensive;
    for (const auto& w : off_words) off.entries.emplace(w, lexicon::Provenance::extracted);
    lexicon::SeedLexicon hate;
    hate.category = lexicon::SeedCategory::hateful;
    for (const auto& w : hate_words) hate.entries.emplace(w, lexicon::Provenance::manually_added);

    const std::string trigger = "يا";
    const lexicon::Matcher both(off, hate, trigger);
    const lexicon::Matcher off_only(off, std::nullopt, trigger);
    const lexicon::Matcher hate_only(std::nullopt, hate, trigger);
    require_eq<std::size_t>(both.offensive_size(), off_words.size(), "offensive lexicon size");
    require_eq<std::size_t>(both.hateful_size(), hate_words.size(), "hateful lexicon size");

    std::vector<std::string> vocab = {"يا",   "كلب",  "حمار", "قذر",  "غبي",  "حقير",
                                      "خسيس", "يوم",  "باب",  "نور",  "شمس",  "قمر",
                                      "بحر",  "صديق", "USER", "URL",  "HASH", "NUM",
                                      ".",    "!",    "انت",  "جدا"};
    std::mt19937_64 rng(314159);
    const auto agree = [](const lexicon::MatchResult& a, const lexicon::MatchResult& b) {
        return a.offensive_hits == b.offensive_hits && a.hateful_hits == b.hateful_hits &&
               a.trigger_present == b.trigger_present;
    };

    std::uint64_t mismatches = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t len = rng() % 13;
        std::vector<std::string> tokens;
        tokens.reserve(len);
        for (std::size_t i = 0; i < len; ++i) tokens.push_back(vocab[rng() % vocab.size()]);

        if (!agree(both.match(tokens), naive_match(tokens, &off_words, &hate_words, trigger)) ||
            !agree(off_only.match(tokens), naive_match(tokens, &off_words, nullptr, trigger)) ||
            !agree(hate_only.match(tokens), naive_match(tokens, nullptr, &hate_words, trigger))) {
            ++mismatches;
        }
    }
    require_eq_u64(mismatches, 0, "matcher/naive disagreements over 10,000 lists");
}

// ---------------------------------------------------------------------------
// Criterion 4: normalization golden suite (every cleaning rule represented)
// plus idempotence over 1,000 fuzzed Unicode strings.

void criterion_normalization() {
    struct Case {
        const char* in;
        const char* want;
    };
    const Case goldens[] = {
        {"@sami شاهد https://t.co/x #قدس 123 يا كلب", "USER شاهد URL HASH NUM يا كلب"},
        {"أَحمد ذهب إلى المستشفى", "احمد ذهب الي المستشفي"},
        {"USER URL", "USER URL"},
        {"شاهد https://example.com/path?q=x الان", "شاهد URL الان"},
        {"http://foo.bar", "URL"},
        {"t.co/abc", "URL"},
        {"www.example.com", "URL"},
        {"HTTPS://T.CO/ABC", "URL"},
        {"@user_name هلا", "USER هلا"},
        {"@محمد هلا", "USER هلا"},
        {"#القدس_لنا", "HASH"},
        {"#123", "HASH"},
        {"عام 2023 جديد", "عام NUM جديد"},
        {"٢٠٢٣", "NUM"},
        {"12٣4", "NUM"},
        {"مُحَمَّد", "محمد"},
        {"العـــرب", "العرب"},
        {"آمين", "امين"},
        {"إسلام", "اسلام"},
        {"ٱلله", "الله"},
        {"مصطفى", "مصطفي"},
        {"مؤمن", "مؤمن"},
        {"  يا   كلب  ", "يا كلب"},
        {"يا\tكلب\nانت", "يا كلب انت"},
        {"", ""},
        {"   ", ""},
        {"يا كلب!", "يا كلب!"},
        {"يا كلب 😀", "يا كلب 😀"},
    };
    require(std::size(goldens) >= 20, "golden suite has at least 20 cases");
    for (const auto& c : goldens) {
        const std::string got = normalizer::normalize(c.in);
        if (got != c.want) {
            throw CheckFailure{"golden mismatch on \"" + std::string(c.in) + "\": expected \"" +
                               c.want + "\", got \"" + got + "\""};
        }
    }

    const std::vector<std::string> pieces = {
        "ا",  "ب",   "ت",  "س",  "ك",  "ل",   "م",  "ي",  "أ",  "إ",   "آ",  "ٱ",  "ى",
        "ً",   "ٌ",    "ٍ",   "َ",   "ُ",   "ِ",    "ّ",   "ْ",   "ـ",  "0",  "9",   "٣",  "٧",
        "a",  "Z",   "@",  "#",  "_",  "!",   ".",  "؟",  ",",  " ",   "\t", "\n", "  ",
        "يا", "كلب", "😀", "\xC2\xA0", "https://t.co/", "http://", "www.", "t.co/", "@user",
        "#tag"};
    std::mt19937_64 rng(424242);
    std::uint64_t violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::string s;
        const std::size_t n = rng() % 41;
        for (std::size_t i = 0; i < n; ++i) s += pieces[rng() % pieces.size()];
        const std::string once = normalizer::normalize(s);
        if (normalizer::normalize(once) != once) ++violations;
    }
    require_eq_u64(violations, 0, "idempotence violations over 1,000 fuzzed strings");
}

// ---------------------------------------------------------------------------
// Criterion 5: metrics against a brute-force confusion-matrix oracle, plus
// the two hand-computed worked examples.

struct RefClass {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::uint64_t support = 0;
};

struct RefMetrics {
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    std::map<std::string, RefClass> per_class;
};

RefMetrics ref_metrics(const std::vector<std::string>& gold,
                       const std::vector<std::string>& pred) {
    RefMetrics out;
    const std::set<std::string> labels(gold.begin(), gold.end());
    std::uint64_t hits = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) hits += gold[i] == pred[i] ? 1 : 0;
    out.accuracy = gold.empty() ? 0.0 : static_cast<double>(hits) / gold.size();

    double f1_sum = 0.0;
    for (const auto& label : labels) {
        std::uint64_t tp = 0, fp = 0, fn = 0, support = 0;
        for (std::size_t i = 0; i < gold.size(); ++i) {
            if (gold[i] == label) ++support;
            if (pred[i] == label && gold[i] == label) ++tp;
            if (pred[i] == label && gold[i] != label) ++fp;
            if (pred[i] != label && gold[i] == label) ++fn;
        }
        RefClass c;
        c.support = support;
        c.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp);
        c.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn);
        c.f1 = c.precision + c.recall == 0.0 ? 0.0
                                             : 2.0 * c.precision * c.recall /
                                                   (c.precision + c.recall);
        f1_sum += c.f1;
        out.per_class.emplace(label, c);
    }
    out.macro_f1 = labels.empty() ? 0.0 : f1_sum / static_cast<double>(labels.size());
    return out;
}

void compare_to_oracle(const std::vector<std::string>& gold,
                       const std::vector<std::string>& pred, const std::string& what) {
    const auto got = experiment::evaluate_labels(gold, pred);
    const auto want = ref_metrics(gold, pred);
    constexpr double kTol = 1e-12;
    require_close(got.accuracy, want.accuracy, kTol, what + ": accuracy");
    require_close(got.macro_f1, want.macro_f1, kTol, what + ": macro F1");
    require_eq<std::size_t>(got.per_class.size(), want.per_class.size(),
                            what + ": class count");
    for (const auto& [label, w] : want.per_class) {
        const auto it = got.per_class.find(label);
        require(it != got.per_class.end(), what + ": missing class " + label);
        require_close(it->second.precision, w.precision, kTol, what + ": precision " + label);
        require_close(it->second.recall, w.recall, kTol, what + ": recall " + label);
        require_close(it->second.f1, w.f1, kTol, what + ": f1 " + label);
        require_eq_u64(it->second.support, w.support, what + ": support " + label);
    }
}

void criterion_metric_oracle() {
    {
        const std::vector<std::string> gold = {"O", "O", "N", "N"};
        const std::vector<std::string> pred = {"O", "N", "O", "N"};
        const auto m = experiment::evaluate_labels(gold, pred);
        require_close(m.per_class.at("O").f1, 0.5, 1e-12, "worked example 1: O f1");
        require_close(m.per_class.at("N").f1, 0.5, 1e-12, "worked example 1: N f1");
        require_close(m.macro_f1, 0.5, 1e-12, "worked example 1: macro F1");
        require_close(m.accuracy, 0.5, 1e-12, "worked example 1: accuracy");
        compare_to_oracle(gold, pred, "worked example 1");
    }
    {
        const std::vector<std::string> gold = {"O", "N", "N", "N"};
        const std::vector<std::string> pred = {"N", "N", "N", "N"};
        const auto m = experiment::evaluate_labels(gold, pred);
        require_close(m.per_class.at("N").f1, 6.0 / 7.0, 1e-12, "worked example 2: N f1");
        require_close(m.per_class.at("O").f1, 0.0, 1e-12, "worked example 2: O f1");
        require_close(m.macro_f1, 3.0 / 7.0, 1e-12, "worked example 2: macro F1");
        require_close(m.accuracy, 0.75, 1e-12, "worked example 2: accuracy");
        compare_to_oracle(gold, pred, "worked example 2");
    }

    std::mt19937_64 rng(271828);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t len = 1 + rng() % 200;
        const std::size_t classes = 2 + rng() % 3;
        std::vector<std::string> names;
        for (std::size_t c = 0; c < classes; ++c) names.push_back("L" + std::to_string(c));

        std::vector<std::string> gold, pred;
        gold.reserve(len);
        pred.reserve(len);
        for (std::size_t i = 0; i < len; ++i) {
            gold.push_back(names[rng() % classes]);
            // one in eight predictions falls outside the gold label set
            pred.push_back(rng() % 8 == 0 ? "ZZ" : names[rng() % classes]);
        }
        compare_to_oracle(gold, pred, "trial " + std::to_string(trial));
    }
}

// ---------------------------------------------------------------------------
// Criterion 6: end-to-end determinism. The CLI `run` command, applied twice
// to a 5,000-line synthetic corpus with a precomputed-score gate, must write
// byte-identical artifact trees; every pooled record must re-validate its
// trigger/seed/gate predicate, and positive pools must be id-disjoint from
// the clean pool.

int run_cli(const std::string& args, const std::string& stdout_path = "/dev/null") {
    const std::string cmd =
        std::string("\"") + LEXHARVEST_CLI_PATH + "\" " + args + " > \"" + stdout_path + "\" 2>&1";
    const int rc = std::system(cmd.c_str());
    require(rc != -1, "std::system failed to spawn the CLI");
    return WEXITSTATUS(rc);
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        files[fs::relative(entry.path(), root).string()] = read_file(entry.path().string());
    }
    return files;
}

void criterion_pipeline_determinism() {
    TempDir tmp;

    const std::vector<std::string> fillers = {"صديقي", "اليوم",  "جميل", "الطقس", "حار",
                                              "بارد",  "نذهب",  "السوق", "قهوة",  "شاي",
                                              "كتاب",  "مدرسة", "عمل",  "بيت"};
    const std::vector<std::string> off_seeds = {"كلب", "قذر"};
    const std::string hate_seed = "حقير";
    const std::string trigger = "يا";

    // 5,000-line corpus with planted trigger/seed structure plus raw-text
    // noise (mentions, tags, links, digits, diacritics) for the normalizer.
    std::mt19937_64 rng(20260816);
    const auto coin = [&rng](int percent) {
        return static_cast<int>(rng() % 100) < percent;
    };
    std::ostringstream corpus;
    std::vector<std::string> ids;
    for (int i = 0; i < 5000; ++i) {
        char id[16];
        std::snprintf(id, sizeof id, "t%04d", i);
        ids.emplace_back(id);

        std::vector<std::string> words;
        if (coin(60)) {
            words.push_back(trigger);
            if (coin(45)) words.push_back(off_seeds[rng() % off_seeds.size()]);
            if (coin(25)) words.push_back(hate_seed);
        }
        const std::size_t extra = 2 + rng() % 5;
        for (std::size_t w = 0; w < extra; ++w) words.push_back(fillers[rng() % fillers.size()]);
        if (coin(20)) words.push_back("@user" + std::to_string(rng() % 90));
        if (coin(15)) words.push_back("#وسم");
        if (coin(15)) words.push_back("https://t.co/x" + std::to_string(rng() % 90));
        if (coin(10)) words.push_back(std::to_string(rng() % 9000));
        if (coin(10)) words.push_back("مُحَمَّد");
        if (coin(5)) words.push_back("العـــرب");

        std::string text;
        for (std::size_t w = 0; w < words.size(); ++w) {
            if (w > 0) text += coin(10) ? "  " : " ";
            text += words[w];
        }
        nlohmann::json line;
        line["id"] = ids.back();
        line["text"] = text;
        corpus << line.dump() << '\n';
    }
    const std::string corpus_path = tmp.file("corpus.jsonl");
    write_file(corpus_path, corpus.str());

    // One polarity verdict per id, shared by both harvests.
    std::ostringstream scores;
    for (const auto& id : ids) {
        char value[8];
        std::snprintf(value, sizeof value, "%.2f", 0.50 + static_cast<double>(rng() % 50) / 100.0);
        scores << id << '\t' << (coin(55) ? "NEG" : "POS") << '\t' << value << '\n';
    }
    const std::string scores_path = tmp.file("scores.tsv");
    write_file(scores_path, scores.str());

    lexicon::SeedLexicon off;
    off.category = lexicon::SeedCategory::offensive;
    for (const auto& w : off_seeds) off.entries.emplace(w, lexicon::Provenance::extracted);
    lexicon::SeedLexicon hate;
    hate.category = lexicon::SeedCategory::hateful;
    hate.entries.emplace(hate_seed, lexicon::Provenance::extracted);
    const std::string off_path = tmp.file("off.txt");
    const std::string hate_path = tmp.file("hate.txt");
    off.save(off_path);
    hate.save(hate_path);

    std::ostringstream gold;
    gold << "id\ttext\tlabel\n";
    for (int i = 0; i < 40; ++i) {
        const bool bad = i % 2 == 0;
        gold << "g" << i << '\t' << (bad ? "يا كلب قذر" : "يوم جميل هادئ") << " "
             << fillers[static_cast<std::size_t>(i) % fillers.size()] << '\t'
             << (bad ? "OFF" : "NOT_OFF") << '\n';
    }
    const std::string gold_path = tmp.file("gold.tsv");
    write_file(gold_path, gold.str());

    const auto manifest_for = [&](const std::string& out_dir) {
        nlohmann::json j;
        j["trigger"] = trigger;
        j["out_dir"] = out_dir;
        j["corpora"] = {{"seeded", corpus_path}, {"clean", corpus_path}};
        j["lexica"] = {{"offensive", off_path}, {"hateful", hate_path}};
        j["gate"] = {{"kind", "external"},
                     {"scores", {{"seeded", scores_path}, {"clean", scores_path}}}};
        j["balance"] = {{"offensive", {{"prevalence", 0.25}, {"rng_seed", 11}}},
                        {"hate_speech", {{"prevalence", 0.10}, {"rng_seed", 12}}}};
        j["train"] = {{"offensive",
                       {{"epochs", 2},
                        {"learning_rate", 0.2},
                        {"rng_seed", 13},
                        {"feature", {{"orders", {2}}, {"dimension", 4096}}}}}};
        j["eval"] = {{"offensive", {{"gold", gold_path}}}};
        return j;
    };

    const std::string out1 = tmp.file("out1");
    const std::string out2 = tmp.file("out2");
    const std::string manifest1 = tmp.file("run1.json");
    const std::string manifest2 = tmp.file("run2.json");
    write_file(manifest1, manifest_for(out1).dump(2) + "\n");
    write_file(manifest2, manifest_for(out2).dump(2) + "\n");

    require_eq<int>(run_cli("run --manifest \"" + manifest1 + "\"", tmp.file("log1.txt")), 0,
                    "first run exit code");
    require_eq<int>(run_cli("run --manifest \"" + manifest2 + "\"", tmp.file("log2.txt")), 0,
                    "second run exit code");

    // Byte-identical trees. run.json embeds the out_dir-specific manifest
    // fingerprint, so it is compared through its artifact digests instead.
    const auto tree1 = read_tree(out1);
    const auto tree2 = read_tree(out2);
    require_eq<std::size_t>(tree1.size(), tree2.size(), "artifact file count");
    for (const auto& [rel, bytes] : tree1) {
        const auto it = tree2.find(rel);
        require(it != tree2.end(), "second run is missing artifact " + rel);
        if (rel == "run.json") continue;
        require(bytes == it->second, "artifact differs between runs: " + rel);
    }
    const auto run1 = nlohmann::json::parse(tree1.at("run.json"));
    const auto run2 = nlohmann::json::parse(tree2.at("run.json"));
    require(run1.at("artifacts") == run2.at("artifacts"),
            "artifact fingerprint maps differ between runs");
    for (const auto& stage : run1.at("stages")) {
        const auto status = stage.at("status").get<std::string>();
        require(status.rfind("failed", 0) != 0,
                "stage " + stage.at("stage").get<std::string>() + " failed: " + status);
    }

    // Every pooled record re-validates its predicate against the same
    // matcher and gate the run used.
    std::unordered_map<std::string, normalizer::NormalizedTweet> tweets;
    for (const auto& raw : corpus_io::read_jsonl((fs::path(out1) / "norm_seeded.jsonl").string())) {
        tweets.emplace(raw.id, normalizer::NormalizedTweet::from_raw(raw));
    }
    const lexicon::Matcher matcher(
        lexicon::SeedLexicon::load(off_path, lexicon::SeedCategory::offensive),
        lexicon::SeedLexicon::load(hate_path, lexicon::SeedCategory::hateful), trigger);
    const auto gate = affect::ExternalGate::load(scores_path);

    const auto check_pool = [&](const std::string& rel, corpus_io::Task task) {
        const auto rows = corpus_io::read_pool_tsv((fs::path(out1) / rel).string());
        require(!rows.empty(), rel + " is unexpectedly empty");
        std::set<std::string> pool_ids;
        for (const auto& row : rows) {
            const auto it = tweets.find(row.tweet.id);
            require(it != tweets.end(), rel + ": unknown id " + row.tweet.id);
            augmentor::HarvestRecord rec;
            rec.tweet = it->second;
            rec.task = task;
            rec.label = row.label;
            require(augmentor::revalidate(rec, matcher, gate),
                    rel + ": record " + row.tweet.id + " fails revalidation");
            pool_ids.insert(row.tweet.id);
        }
        return pool_ids;
    };
    const auto off_ids = check_pool("pool_offensive.tsv", corpus_io::Task::offensive);
    const auto hs_ids = check_pool("pool_hate_speech.tsv", corpus_io::Task::hate_speech);
    const auto clean_ids = check_pool("pool_clean.tsv", corpus_io::Task::offensive);

    for (const auto& id : clean_ids) {
        require(off_ids.count(id) == 0 && hs_ids.count(id) == 0,
                "id " + id + " appears in both a positive pool and the clean pool");
    }
}

// ---------------------------------------------------------------------------
// Criterion 7: the harvest funnel report reproduces planted rates exactly.
// 225 tweets: 50 without the trigger, 55 trigger-only, 45 offensive-seeded
// (30 gated negative), 30 hateful-seeded (20 negative), 45 dual-seeded
// (30 negative). Expected: 175 trigger hits, 120 seed hits, 80 negative
// verdicts, rate 80/120, pools of 60 and 50, 80 distinct emissions.

void criterion_funnel_rates() {
    const std::vector<std::string> fillers = {"صاحبي", "اليوم", "الان", "مساء", "صباح"};
    std::vector<normalizer::NormalizedTweet> corpus;
    MapGate gate;
    gate.fallback = {affect::Polarity::positive, 0.9};
    int serial = 0;

    const auto add = [&](const std::string& body, bool negative) {
        const std::string id = "f" + std::to_string(serial);
        const std::string text = body + " " + fillers[static_cast<std::size_t>(serial) %
                                                      fillers.size()];
        corpus.push_back(norm(id, text));
        gate.verdicts[id] = {negative ? affect::Polarity::negative : affect::Polarity::positive,
                             0.9};
        ++serial;
    };

    for (int i = 0; i < 50; ++i) add("كلام عادي", false);
    for (int i = 0; i < 55; ++i) add("يا صديقي", false);
    for (int i = 0; i < 45; ++i) add("يا كلب", i < 30);
    for (int i = 0; i < 30; ++i) add("يا حقير", i < 20);
    for (int i = 0; i < 45; ++i) add("يا كلب حقير", i < 30);

    lexicon::SeedLexicon off;
    off.category = lexicon::SeedCategory::offensive;
    off.entries.emplace("كلب", lexicon::Provenance::extracted);
    lexicon::SeedLexicon hate;
    hate.category = lexicon::SeedCategory::hateful;
    hate.entries.emplace("حقير", lexicon::Provenance::extracted);
    const lexicon::Matcher matcher(off, hate, "يا");

    const auto out = augmentor::harvest_positive(corpus, matcher, gate);
    const auto& r = out.report;
    require_eq<std::string>(r.mode, "positive", "mode");
    require_eq_u64(r.scanned, 225, "scanned");
    require_eq_u64(r.trigger_hits, 175, "trigger_hits");
    require_eq_u64(r.seed_hits, 120, "seed_hits");
    require_eq_u64(r.gate_pass_negative, 80, "gate_pass_negative");
    require_eq_u64(r.gate_pass_positive, 40, "gate_pass_positive");
    require_eq_u64(r.below_threshold, 0, "below_threshold");
    require_eq_u64(r.duplicates_dropped, 0, "duplicates_dropped");
    require_eq_u64(r.emitted_tweets, 80, "emitted_tweets");
    require_eq_u64(r.emitted.at("offensive/OFF"), 60, "offensive pool count");
    require_eq_u64(r.emitted.at("hate_speech/HS"), 50, "hate_speech pool count");
    require(r.negative_gate_rate == 80.0 / 120.0, "negative_gate_rate is exactly 80/120");
    r.validate();
    require_eq<std::size_t>(out.offensive.size(), 60, "offensive pool records");
    require_eq<std::size_t>(out.hateful.size(), 50, "hateful pool records");

    const auto serial_out = augmentor::serial::harvest_positive(corpus, matcher, gate);
    require(serial_out.report.to_json() == r.to_json(),
            "parallel and serial funnel reports differ");
}

// ---------------------------------------------------------------------------
// Criterion 8: warm starts beat scratch training on a transfer fixture whose
// class signal lives only in 3-4 character grams, and both macro-F1 scores
// match an independent dense reference trainer to 1e-9.
//
// The discriminative words share identical padded-bigram count vectors
// ("ااباب" and "ابااب" walk the same bigram multiset in different orders),
// so a bigram-only scratch model cannot separate the classes while the
// adopted trigram space can.

namespace reference {

std::uint64_t fnv(std::string_view data, std::uint64_t seed) {
    std::uint64_t h = 14695981039346656037ULL;
    const auto mix = [&h](std::uint64_t byte) { h = (h ^ byte) * 1099511628211ULL; };
    for (int i = 0; i < 8; ++i) mix((seed >> (8 * i)) & 0xFF);
    for (const unsigned char c : data) mix(c);
    return h;
}

struct Model {
    affect::FeatureSpec spec;
    std::vector<std::string> labels;
    std::vector<std::vector<double>> weights;  // dense, one row per class
};

Model train(const corpus_io::Dataset& data, const affect::FeatureSpec& spec, int epochs,
            double lr, std::uint64_t seed, const std::string& init_tag) {
    Model m;
    m.spec = spec;
    std::set<std::string> labels;
    for (const auto& row : data.records) labels.insert(row.label);
    m.labels.assign(labels.begin(), labels.end());
    const std::size_t classes = m.labels.size();
    const std::size_t dim = spec.dimension;

    std::mt19937_64 rng(fnv(init_tag, seed));
    m.weights.assign(classes, std::vector<double>(dim, 0.0));
    for (std::size_t c = 0; c < classes; ++c) {
        for (std::size_t d = 0; d < dim; ++d) {
            const double u = static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
            m.weights[c][d] = (u - 0.5) * 0.02;
        }
    }

    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t c = 0; c < classes; ++c) index.emplace(m.labels[c], c);
    std::vector<affect::SparseVec> xs;
    std::vector<std::size_t> ys;
    for (const auto& row : data.records) {
        xs.push_back(affect::featurize(spec, row.tweet.text));
        ys.push_back(index.at(row.label));
    }

    std::vector<double> probs(classes);
    for (int epoch = 1; epoch <= epochs; ++epoch) {
        for (std::size_t i = 0; i < xs.size(); ++i) {
            double zmax = -1e300;
            for (std::size_t c = 0; c < classes; ++c) {
                double acc = 0.0;
                for (const auto& [idx, val] : xs[i]) acc += m.weights[c][idx] * val;
                probs[c] = acc;
                if (acc > zmax) zmax = acc;
            }
            double sum = 0.0;
            for (std::size_t c = 0; c < classes; ++c) {
                probs[c] = std::exp(probs[c] - zmax);
                sum += probs[c];
            }
            for (std::size_t c = 0; c < classes; ++c) probs[c] /= sum;
            for (std::size_t c = 0; c < classes; ++c) {
                const double coef = probs[c] - (c == ys[i] ? 1.0 : 0.0);
                if (coef == 0.0) continue;
                const double step = lr * coef;
                for (const auto& [idx, val] : xs[i]) m.weights[c][idx] -= step * val;
            }
        }
    }
    return m;
}

std::string predict(const Model& m, const std::string& text) {
    const auto x = affect::featurize(m.spec, text);
    std::size_t best = 0;
    double best_z = -1e300;
    for (std::size_t c = 0; c < m.labels.size(); ++c) {
        double acc = 0.0;
        for (const auto& [idx, val] : x) acc += m.weights[c][idx] * val;
        if (c == 0 || acc > best_z) {
            best = c;
            best_z = acc;
        }
    }
    return m.labels[best];
}

}  // namespace reference

void criterion_warm_start_transfer() {
    const std::vector<std::string> fillers = {"يوم", "باب", "نور", "شمس",
                                              "بحر", "قمر", "ريح", "ورد"};
    const std::string neg_word = "ااباب";  // identical bigram counts,
    const std::string pos_word = "ابااب";  // distinct trigrams

    const auto rows = [&](int pairs, const std::string& prefix, const std::string& pos_label,
                          const std::string& neg_label, int salt) {
        std::vector<corpus_io::Dataset::Row> out;
        for (int i = 0; i < pairs; ++i) {
            const auto& f1 = fillers[static_cast<std::size_t>(i * 3 + salt) % fillers.size()];
            const auto& f2 = fillers[static_cast<std::size_t>(i * 5 + salt + 1) % fillers.size()];
            out.push_back({{prefix + std::to_string(2 * i), neg_word + " " + f1 + " " + f2},
                           neg_label});
            out.push_back({{prefix + std::to_string(2 * i + 1), pos_word + " " + f1 + " " + f2},
                           pos_label});
        }
        return out;
    };

    corpus_io::Dataset senti = corpus_io::make_dataset(
        corpus_io::Task::sentiment, rows(20, "s", "POS", "NEG", 0));
    corpus_io::Dataset task_train = corpus_io::make_dataset(
        corpus_io::Task::offensive, rows(25, "tr", "NOT_OFF", "OFF", 2));
    corpus_io::Dataset task_eval = corpus_io::make_dataset(
        corpus_io::Task::offensive, rows(15, "ev", "NOT_OFF", "OFF", 5));

    affect::FeatureSpec source_spec;
    source_spec.orders = {2, 3, 4};
    source_spec.dimension = 1u << 16;
    affect::FeatureSpec scratch_spec;
    scratch_spec.orders = {2};
    scratch_spec.dimension = 1u << 10;

    affect::TrainConfig source_cfg;
    source_cfg.epochs = 12;
    source_cfg.learning_rate = 0.5;
    source_cfg.seed = 7;
    source_cfg.feature = source_spec;
    const auto source = experiment::train_task(senti, source_cfg);

    affect::TrainConfig scratch_cfg;
    scratch_cfg.epochs = 12;
    scratch_cfg.learning_rate = 0.5;
    scratch_cfg.seed = 9;
    scratch_cfg.feature = scratch_spec;
    const auto scratch = experiment::train_task(task_train, scratch_cfg);

    affect::TrainConfig warm_cfg;
    warm_cfg.epochs = 12;
    warm_cfg.learning_rate = 0.5;
    warm_cfg.seed = 9;
    const auto warm = experiment::train_task(task_train, warm_cfg, &source);
    require_eq<std::string>(warm.meta.init, "warm:sentiment", "warm init tag");
    require(warm.feature_spec == source.feature_spec, "warm start adopts the source space");

    std::vector<normalizer::NormalizedTweet> probes;
    std::vector<std::string> gold;
    for (const auto& row : task_eval.records) {
        probes.push_back(norm(row.tweet.id, row.tweet.text));
        gold.push_back(row.label);
    }
    const auto macro_of = [&](const affect::ModelCheckpoint& ckpt) {
        const auto predicted = experiment::predict(ckpt, probes);
        return experiment::evaluate(task_eval, predicted).macro_f1;
    };
    const double lib_scratch = macro_of(scratch);
    const double lib_warm = macro_of(warm);

    const auto ref_scratch_model =
        reference::train(task_train, scratch_spec, 12, 0.5, 9, "scratch");
    const auto ref_warm_model =
        reference::train(task_train, source.feature_spec, 12, 0.5, 9, "warm:sentiment");
    const auto ref_macro = [&](const reference::Model& m) {
        std::vector<std::string> pred;
        for (const auto& probe : probes) pred.push_back(reference::predict(m, probe.text));
        return ref_metrics(gold, pred).macro_f1;
    };
    const double ref_scratch = ref_macro(ref_scratch_model);
    const double ref_warm = ref_macro(ref_warm_model);

    require_close(lib_scratch, ref_scratch, 1e-9, "scratch macro F1 vs reference trainer");
    require_close(lib_warm, ref_warm, 1e-9, "warm macro F1 vs reference trainer");
    require(lib_warm >= lib_scratch, "warm start must not lose to scratch (warm " +
                                         std::to_string(lib_warm) + ", scratch " +
                                         std::to_string(lib_scratch) + ")");
    require(lib_warm > 0.9, "warm start failed to learn the trigram signal");
}

// ---------------------------------------------------------------------------
// Criterion 9: a zero-epoch warm start leaves the feature space bit-identical
// to its source checkpoint, verified on a 100-string probe set.

void criterion_zero_epoch_identity() {
    std::vector<corpus_io::Dataset::Row> senti_rows;
    for (int i = 0; i < 4; ++i) {
        senti_rows.push_back({{"sn" + std::to_string(i), "سيء جدا " + std::to_string(i)}, "NEG"});
        senti_rows.push_back({{"sp" + std::to_string(i), "جميل جدا " + std::to_string(i)}, "POS"});
    }
    const auto senti = corpus_io::make_dataset(corpus_io::Task::sentiment, std::move(senti_rows));

    affect::FeatureSpec spec;
    spec.orders = {2, 3};
    spec.dimension = 1u << 12;
    affect::TrainConfig source_cfg;
    source_cfg.epochs = 3;
    source_cfg.learning_rate = 0.5;
    source_cfg.seed = 3;
    source_cfg.feature = spec;
    const auto source = experiment::train_task(senti, source_cfg);

    const auto task_tiny = corpus_io::make_dataset(
        corpus_io::Task::offensive, {{{"a1", "يا كلب قذر"}, "OFF"},
                                     {{"a2", "يوم جميل"}, "NOT_OFF"},
                                     {{"a3", "يا حقير غبي"}, "OFF"},
                                     {{"a4", "مساء الخير"}, "NOT_OFF"}});
    affect::TrainConfig warm_cfg;
    warm_cfg.epochs = 0;
    warm_cfg.learning_rate = 0.1;
    warm_cfg.seed = 5;
    const auto warm = experiment::train_task(task_tiny, warm_cfg, &source);

    require(warm.feature_spec == source.feature_spec, "zero-epoch warm start keeps the spec");
    require_eq<int>(warm.meta.best_epoch, 0, "best_epoch");
    for (const double w : warm.weights) {
        require(w >= -0.01 && w < 0.01, "untouched head weight outside the init range");
    }

    const std::vector<std::string> words = {"يا",  "كلب", "حقير", "جميل", "سيء",
                                            "يوم", "باب", "شمس",  "قمر",  "نور"};
    std::mt19937_64 rng(999);
    std::vector<std::string> probe_set = {"", "ا", "يا"};
    while (probe_set.size() < 100) {
        std::string s;
        const std::size_t n = 1 + rng() % 6;
        for (std::size_t i = 0; i < n; ++i) {
            if (i > 0) s += ' ';
            s += words[rng() % words.size()];
        }
        probe_set.push_back(s);
    }
    for (const auto& probe : probe_set) {
        require(affect::featurize(warm.feature_spec, probe) ==
                    affect::featurize(source.feature_spec, probe),
                "feature vectors diverge on probe \"" + probe + "\"");
    }
}

// ---------------------------------------------------------------------------

struct Criterion {
    int id;
    std::string name;
    double budget_seconds;
    std::function<void()> body;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "balance arithmetic reproduces the published dataset size", 1.0,
         criterion_balance_arithmetic},
        {2, "distribution report yields whole-percent shares of 20 and 5", 1.0,
         criterion_distribution_percent},
        {3, "matcher agrees with a naive membership scan on 10,000 lists", 5.0,
         criterion_matcher_oracle},
        {4, "normalization goldens pass and fuzzed idempotence holds", 5.0,
         criterion_normalization},
        {5, "metrics match a brute-force confusion-matrix oracle", 1.0,
         criterion_metric_oracle},
        {6, "pipeline runs are byte-identical and pools re-validate", 30.0,
         criterion_pipeline_determinism},
        {7, "harvest funnel report reproduces planted rates exactly", 5.0,
         criterion_funnel_rates},
        {8, "warm start beats scratch and matches the reference trainer", 10.0,
         criterion_warm_start_transfer},
        {9, "zero-epoch warm start preserves the source feature space", 1.0,
         criterion_zero_epoch_identity},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string error;
        try {
            c.body();
        } catch (const CheckFailure& f) {
            error = f.message;
        } catch (const std::exception& e) {
            error = std::string("unexpected exception: ") + e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (error.empty() && elapsed > c.budget_seconds) {
            std::ostringstream over;
            over.precision(2);
            over << std::fixed << "exceeded time budget (" << elapsed << "s > "
                 << c.budget_seconds << "s)";
            error = over.str();
        }

        std::ostringstream line;
        line.precision(2);
        line << std::fixed << (error.empty() ? "PASS" : "FAIL") << "  criterion " << c.id << " ("
             << elapsed << "s): " << c.name;
        if (!error.empty()) line << "  [" << error << "]";
        std::cout << line.str() << '\n';
        if (!error.empty()) ++failures;
    }

    if (failures > 0) {
        std::cout << failures << " of " << criteria.size() << " criteria failed\n";
        return 1;
    }
    std::cout << "all " << criteria.size() << " criteria passed\n";
    return 0;
}
