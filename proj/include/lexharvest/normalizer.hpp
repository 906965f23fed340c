#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lexharvest/corpus_io.hpp"

namespace lexharvest::normalizer {

inline constexpr std::string_view kUrlToken = "URL";
inline constexpr std::string_view kUserToken = "USER";
inline constexpr std::string_view kHashToken = "HASH";
inline constexpr std::string_view kNumToken = "NUM";

bool is_placeholder(std::string_view token);

// Twitter cleaning followed by Arabic normalization, applied in this order:
//   1. URLs (http://, https://, bare t.co/ and www. forms)   -> URL
//   2. mentions (@ + word characters)                        -> USER
//   3. hashtags (# + word characters)                        -> HASH
//   4. digit runs (ASCII 0-9 and Arabic-Indic U+0660-0669)   -> NUM
//   5. harakat U+064B-U+0652 and tatweel U+0640 removed
//   6. Alef variants U+0623/U+0625/U+0622/U+0671 -> U+0627, U+0649 -> U+064A
//   7. whitespace runs collapsed to single spaces, ends trimmed
// Total function: any byte string is accepted and the result is idempotent.
std::string normalize(std::string_view text);

// Splits normalized text on whitespace and detaches punctuation characters
// as single-character tokens. Empty input yields an empty list.
std::vector<std::string> tokenize(std::string_view normalized);

struct NormalizedTweet {
    std::string id;
    std::string text;  // canonical form: tokens joined by single spaces
    std::vector<std::string> tokens;

    static NormalizedTweet from_raw(const corpus_io::RawTweet& raw);
};

// Corpus-level kernel. jobs > 1 runs the OpenMP path; output is positionally
// identical to the serial reference either way.
std::vector<NormalizedTweet> normalize_records(std::span<const corpus_io::RawTweet> records,
                                               int jobs = 1);

namespace serial {
// Reference implementation: plain loop, kept for differential tests and the
// kernel benchmark.
std::vector<NormalizedTweet> normalize_records(std::span<const corpus_io::RawTweet> records);
}  // namespace serial

}  // namespace lexharvest::normalizer
