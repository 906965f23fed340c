#include "lexharvest/normalizer.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lexharvest/utf8.hpp"

namespace lexharvest::normalizer {

namespace u8 = lexharvest::utf8;

bool is_placeholder(std::string_view token) {
    return token == kUrlToken || token == kUserToken || token == kHashToken ||
           token == kNumToken;
}

namespace {

using CpVec = std::vector<char32_t>;

void append_ascii(CpVec& out, std::string_view s) {
    for (char c : s) out.push_back(static_cast<char32_t>(c));
}

bool ascii_ieq(char32_t cp, char c) {
    if (cp >= U'A' && cp <= U'Z') cp += 32;
    return cp == static_cast<char32_t>(c);
}

bool matches_at(const CpVec& cps, std::size_t i, std::string_view pat) {
    if (i + pat.size() > cps.size()) return false;
    for (std::size_t k = 0; k < pat.size(); ++k) {
        if (!ascii_ieq(cps[i + k], pat[k])) return false;
    }
    return true;
}

// Pass 1: scheme-prefixed URLs anywhere, bare t.co/ and www. forms at a
// token boundary. The match consumes everything up to the next whitespace.
CpVec replace_urls(const CpVec& in) {
    CpVec out;
    out.reserve(in.size());
    std::size_t i = 0;
    while (i < in.size()) {
        bool hit = matches_at(in, i, "http://") || matches_at(in, i, "https://");
        if (!hit) {
            const bool boundary = out.empty() || !u8::is_word_char(out.back());
            if (boundary && matches_at(in, i, "t.co/")) hit = true;
            if (boundary && matches_at(in, i, "www.") && i + 4 < in.size() &&
                !u8::is_whitespace(in[i + 4])) {
                hit = true;
            }
        }
        if (hit) {
            append_ascii(out, kUrlToken);
            while (i < in.size() && !u8::is_whitespace(in[i])) ++i;
            continue;
        }
        out.push_back(in[i++]);
    }
    return out;
}

// Passes 2 and 3: a sigil run ([@#]+) followed by at least one word character
// collapses to a single placeholder chosen by the pass's own sigil. Allowing
// mixed runs keeps the output free of residual sigil+letter sequences
// regardless of pass order.
CpVec replace_sigil(const CpVec& in, char32_t sigil, std::string_view token) {
    CpVec out;
    out.reserve(in.size());
    std::size_t i = 0;
    while (i < in.size()) {
        if (in[i] == sigil) {
            std::size_t j = i;
            while (j < in.size() && (in[j] == U'@' || in[j] == U'#')) ++j;
            std::size_t k = j;
            while (k < in.size() && u8::is_word_char(in[k])) ++k;
            if (k > j) {
                append_ascii(out, token);
                i = k;
                continue;
            }
        }
        out.push_back(in[i++]);
    }
    return out;
}

// Pass 4: maximal digit runs (ASCII and Arabic-Indic mixed) -> NUM.
CpVec replace_digits(const CpVec& in) {
    CpVec out;
    out.reserve(in.size());
    std::size_t i = 0;
    while (i < in.size()) {
        if (u8::is_digit(in[i])) {
            append_ascii(out, kNumToken);
            while (i < in.size() && u8::is_digit(in[i])) ++i;
            continue;
        }
        out.push_back(in[i++]);
    }
    return out;
}

bool is_harakah(char32_t cp) { return cp >= 0x064B && cp <= 0x0652; }

// Pass 5: Arabic character normalization plus whitespace collapse and trim.
CpVec normalize_chars(const CpVec& in) {
    CpVec out;
    out.reserve(in.size());
    bool pending_space = false;
    for (char32_t cp : in) {
        if (is_harakah(cp) || cp == 0x0640) continue;  // harakat, tatweel
        if (cp == 0x0623 || cp == 0x0625 || cp == 0x0622 || cp == 0x0671) {
            cp = 0x0627;  // Alef variants -> bare Alef
        } else if (cp == 0x0649) {
            cp = 0x064A;  // Alef Maqsura -> Yeh
        }
        if (u8::is_whitespace(cp)) {
            pending_space = true;
            continue;
        }
        if (pending_space && !out.empty()) out.push_back(U' ');
        pending_space = false;
        out.push_back(cp);
    }
    return out;
}

std::string normalize_once(std::string_view text) {
    CpVec cps = u8::decode_all(text);
    cps = replace_urls(cps);
    cps = replace_sigil(cps, U'@', kUserToken);
    cps = replace_sigil(cps, U'#', kHashToken);
    cps = replace_digits(cps);
    cps = normalize_chars(cps);
    return u8::encode_all(cps);
}

}  // namespace

std::string normalize(std::string_view text) {
    // Character cleanup can uncover forms the replacement rules would have
    // caught (stripping tatweel can fuse "www" with "."), so the pass repeats
    // until the text is a fixpoint. Every extra pass consumes at least one
    // sigil, separator, or digit, which bounds the iteration.
    std::string out = normalize_once(text);
    for (;;) {
        std::string next = normalize_once(out);
        if (next == out) return out;
        out = std::move(next);
    }
}

std::vector<std::string> tokenize(std::string_view normalized) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    };
    std::size_t pos = 0;
    while (pos < normalized.size()) {
        const auto d = u8::decode(normalized, pos);
        pos += static_cast<std::size_t>(d.length);
        if (u8::is_whitespace(d.cp)) {
            flush();
            continue;
        }
        if (u8::is_punctuation(d.cp)) {
            flush();
            std::string punct;
            u8::append(punct, d.cp);
            tokens.push_back(std::move(punct));
            continue;
        }
        u8::append(current, d.cp);
    }
    flush();
    return tokens;
}

NormalizedTweet NormalizedTweet::from_raw(const corpus_io::RawTweet& raw) {
    NormalizedTweet t;
    t.id = raw.id;
    t.tokens = tokenize(normalize(raw.text));
    t.text.clear();
    for (std::size_t i = 0; i < t.tokens.size(); ++i) {
        if (i > 0) t.text += ' ';
        t.text += t.tokens[i];
    }
    return t;
}

namespace serial {

std::vector<NormalizedTweet> normalize_records(std::span<const corpus_io::RawTweet> records) {
    std::vector<NormalizedTweet> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(NormalizedTweet::from_raw(r));
    return out;
}

}  // namespace serial

std::vector<NormalizedTweet> normalize_records(std::span<const corpus_io::RawTweet> records,
                                               int jobs) {
    if (jobs <= 1) return serial::normalize_records(records);
    std::vector<NormalizedTweet> out(records.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 256) num_threads(jobs)
#endif
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(records.size()); ++i) {
        out[static_cast<std::size_t>(i)] =
            NormalizedTweet::from_raw(records[static_cast<std::size_t>(i)]);
    }
    return out;
}

}  // namespace lexharvest::normalizer
