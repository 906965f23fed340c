// Serial reference vs OpenMP kernels on a synthetic corpus. The parallel
// paths must win on large inputs and always produce identical bytes; the
// consistency tests pin the latter, this target measures the former.
#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "lexharvest/affect_gate.hpp"
#include "lexharvest/augmentor.hpp"
#include "lexharvest/corpus_io.hpp"
#include "lexharvest/experiment.hpp"
#include "lexharvest/lexicon.hpp"
#include "lexharvest/normalizer.hpp"

namespace {

using namespace lexharvest;

const std::vector<std::string>& vocab() {
    static const std::vector<std::string> v = {
        "يا",    "كلب",    "حمار",  "قذر",   "حقير",  "فنان",   "حبيبي", "صديقي",
        "اليوم", "الوقت",  "ذهب",   "قال",   "شاهد",  "الدوري", "مباراة", "جميل",
        "كبير",  "صغير",   "بلد",   "ناس",   "واحد",  "@user",  "#tag",   "123",
        "http://x.io/a",   "أَحمد", "إلى",   "مدرسة", "يوم",    "عمل"};
    return v;
}

std::vector<corpus_io::RawTweet> synth_corpus(std::size_t n) {
    std::mt19937_64 rng(7);
    std::vector<corpus_io::RawTweet> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::string text;
        const std::size_t len = 6 + rng() % 12;
        for (std::size_t j = 0; j < len; ++j) {
            if (j) text += ' ';
            text += vocab()[rng() % vocab().size()];
        }
        out.push_back({"t" + std::to_string(i), std::move(text)});
    }
    return out;
}

lexicon::Matcher make_matcher() {
    lexicon::SeedLexicon off{lexicon::SeedCategory::offensive};
    for (const auto* s : {"كلب", "حمار", "قذر"}) {
        off.entries.emplace(s, lexicon::Provenance::manually_added);
    }
    lexicon::SeedLexicon hs{lexicon::SeedCategory::hateful};
    hs.entries.emplace("حقير", lexicon::Provenance::manually_added);
    return lexicon::Matcher(std::move(off), std::move(hs), "يا");
}

// Deterministic stand-in for a polarity model: negative iff the text carries
// an even number of codepoints.
struct StubGate : affect::Gate {
    affect::PolarityLabel score(const normalizer::NormalizedTweet& tweet) const override {
        const bool neg = tweet.text.size() % 2 == 0;
        return {neg ? affect::Polarity::negative : affect::Polarity::positive, 0.9};
    }
};

affect::ModelCheckpoint make_checkpoint() {
    affect::ModelCheckpoint ckpt;
    ckpt.task = corpus_io::Task::offensive;
    ckpt.feature_spec.orders = {2, 3, 4};
    ckpt.feature_spec.dimension = 1u << 16;
    ckpt.label_set = {"NOT_OFF", "OFF"};
    ckpt.weights.resize(static_cast<std::size_t>(ckpt.feature_spec.dimension) * 2);
    std::mt19937_64 rng(11);
    for (double& w : ckpt.weights) {
        w = (static_cast<double>(rng() >> 11) * 0x1p-53 - 0.5) * 0.02;
    }
    return ckpt;
}

void BM_normalize_serial(benchmark::State& state) {
    const auto corpus = synth_corpus(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(normalizer::serial::normalize_records(corpus));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_normalize_parallel(benchmark::State& state) {
    const auto corpus = synth_corpus(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(normalizer::normalize_records(corpus, 0));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_extract_serial(benchmark::State& state) {
    const auto corpus =
        normalizer::normalize_records(synth_corpus(static_cast<std::size_t>(state.range(0))), 0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(lexicon::serial::extract_candidates(corpus, "يا"));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_extract_parallel(benchmark::State& state) {
    const auto corpus =
        normalizer::normalize_records(synth_corpus(static_cast<std::size_t>(state.range(0))), 0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(lexicon::extract_candidates(corpus, "يا", nullptr, 0));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_harvest_serial(benchmark::State& state) {
    const auto corpus =
        normalizer::normalize_records(synth_corpus(static_cast<std::size_t>(state.range(0))), 0);
    const auto matcher = make_matcher();
    const StubGate gate;
    for (auto _ : state) {
        benchmark::DoNotOptimize(augmentor::serial::harvest_positive(corpus, matcher, gate));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_harvest_parallel(benchmark::State& state) {
    const auto corpus =
        normalizer::normalize_records(synth_corpus(static_cast<std::size_t>(state.range(0))), 0);
    const auto matcher = make_matcher();
    const StubGate gate;
    for (auto _ : state) {
        benchmark::DoNotOptimize(augmentor::harvest_positive(corpus, matcher, gate, 0.0, 0));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_predict_serial(benchmark::State& state) {
    const auto corpus =
        normalizer::normalize_records(synth_corpus(static_cast<std::size_t>(state.range(0))), 0);
    const auto ckpt = make_checkpoint();
    for (auto _ : state) {
        benchmark::DoNotOptimize(experiment::serial::predict(ckpt, corpus));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_predict_parallel(benchmark::State& state) {
    const auto corpus =
        normalizer::normalize_records(synth_corpus(static_cast<std::size_t>(state.range(0))), 0);
    const auto ckpt = make_checkpoint();
    for (auto _ : state) {
        benchmark::DoNotOptimize(experiment::predict(ckpt, corpus, 0));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_normalize_serial)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_normalize_parallel)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_extract_serial)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_extract_parallel)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_harvest_serial)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_harvest_parallel)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_predict_serial)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_predict_parallel)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
