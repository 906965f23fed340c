#pragma once

#include <unistd.h>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lexharvest/affect_gate.hpp"
#include "lexharvest/corpus_io.hpp"
#include "lexharvest/normalizer.hpp"

namespace testutil {

// Self-deleting scratch directory, unique per instance.
class TempDir {
public:
    TempDir() {
        static std::atomic<unsigned> counter{0};
        const auto base = std::filesystem::temp_directory_path();
        path_ = base / ("lexharvest_test_" + std::to_string(::getpid()) + "_" +
                        std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline lexharvest::normalizer::NormalizedTweet norm(const std::string& id,
                                                    const std::string& text) {
    return lexharvest::normalizer::NormalizedTweet::from_raw({id, text});
}

// Gate with a fixed verdict per tweet id; unknown ids default to positive.
struct MapGate : lexharvest::affect::Gate {
    std::map<std::string, lexharvest::affect::PolarityLabel> verdicts;
    lexharvest::affect::PolarityLabel fallback{lexharvest::affect::Polarity::positive, 1.0};

    lexharvest::affect::PolarityLabel score(
        const lexharvest::normalizer::NormalizedTweet& tweet) const override {
        const auto it = verdicts.find(tweet.id);
        return it == verdicts.end() ? fallback : it->second;
    }
};

// Gate keyed on a planted token: negative iff the token occurs in the text.
struct TokenGate : lexharvest::affect::Gate {
    std::string negative_token;
    explicit TokenGate(std::string token) : negative_token(std::move(token)) {}

    lexharvest::affect::PolarityLabel score(
        const lexharvest::normalizer::NormalizedTweet& tweet) const override {
        for (const auto& tok : tweet.tokens) {
            if (tok == negative_token) return {lexharvest::affect::Polarity::negative, 0.95};
        }
        return {lexharvest::affect::Polarity::positive, 0.85};
    }
};

}  // namespace testutil
