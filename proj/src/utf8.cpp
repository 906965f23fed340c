#include "lexharvest/utf8.hpp"

namespace lexharvest::utf8 {

namespace {

inline bool is_continuation(unsigned char b) { return (b & 0xC0) == 0x80; }

}  // namespace

Decoded decode(std::string_view s, std::size_t pos) {
    const auto b0 = static_cast<unsigned char>(s[pos]);
    if (b0 < 0x80) return {b0, 1};

    int need = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        need = 1;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        need = 2;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        need = 3;
        cp = b0 & 0x07;
    } else {
        return {kEscapeBase + b0 - 0x80, 1};
    }

    if (pos + static_cast<std::size_t>(need) >= s.size()) {
        return {kEscapeBase + b0 - 0x80, 1};
    }
    for (int i = 1; i <= need; ++i) {
        const auto bi = static_cast<unsigned char>(s[pos + i]);
        if (!is_continuation(bi)) return {kEscapeBase + b0 - 0x80, 1};
        cp = (cp << 6) | (bi & 0x3F);
    }
    // reject overlong encodings, surrogates, and out-of-range values
    static constexpr char32_t kMin[4] = {0, 0x80, 0x800, 0x10000};
    if (cp < kMin[need] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        return {kEscapeBase + b0 - 0x80, 1};
    }
    return {cp, need + 1};
}

void append(std::string& out, char32_t cp) {
    if (cp >= kEscapeBase && cp <= kEscapeBase + 0x7F) {
        out.push_back(static_cast<char>(cp - kEscapeBase + 0x80));
        return;
    }
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::vector<char32_t> decode_all(std::string_view s) {
    std::vector<char32_t> cps;
    cps.reserve(s.size());
    std::size_t pos = 0;
    while (pos < s.size()) {
        const Decoded d = decode(s, pos);
        cps.push_back(d.cp);
        pos += static_cast<std::size_t>(d.length);
    }
    return cps;
}

std::string encode_all(const std::vector<char32_t>& cps) {
    std::string out;
    out.reserve(cps.size() * 2);
    for (char32_t cp : cps) append(out, cp);
    return out;
}

bool is_whitespace(char32_t cp) {
    switch (cp) {
        case U' ':
        case U'\t':
        case U'\n':
        case U'\r':
        case 0x0B:
        case 0x0C:
        case 0x00A0:
        case 0x1680:
        case 0x2028:
        case 0x2029:
        case 0x202F:
        case 0x205F:
        case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

bool is_digit(char32_t cp) {
    return (cp >= U'0' && cp <= U'9') || (cp >= 0x0660 && cp <= 0x0669);
}

namespace {

bool is_letter(char32_t cp) {
    if ((cp >= U'A' && cp <= U'Z') || (cp >= U'a' && cp <= U'z')) return true;
    if (cp >= 0x00C0 && cp <= 0x024F) return true;  // Latin extensions
    if (cp >= 0x0370 && cp <= 0x03FF) return true;  // Greek
    if (cp >= 0x0400 && cp <= 0x04FF) return true;  // Cyrillic
    if (cp >= 0x05D0 && cp <= 0x05EA) return true;  // Hebrew
    if (cp >= 0x0620 && cp <= 0x064A) return true;  // Arabic letters
    if (cp >= 0x066E && cp <= 0x066F) return true;
    if (cp >= 0x0671 && cp <= 0x06D3) return true;  // Arabic extended letters
    if (cp == 0x06D5) return true;
    if (cp >= 0x06EE && cp <= 0x06EF) return true;
    if (cp >= 0x06FA && cp <= 0x06FF) return true;
    if (cp >= 0x0750 && cp <= 0x077F) return true;  // Arabic supplement
    if (cp >= 0xFB50 && cp <= 0xFDFF) return true;  // presentation forms A
    if (cp >= 0xFE70 && cp <= 0xFEFF) return true;  // presentation forms B
    if (cp >= 0x3040 && cp <= 0x30FF) return true;  // kana
    if (cp >= 0x4E00 && cp <= 0x9FFF) return true;  // CJK
    return false;
}

bool is_combining_mark(char32_t cp) {
    return (cp >= 0x064B && cp <= 0x065F) || cp == 0x0670 || cp == 0x0640;
}

}  // namespace

bool is_word_char(char32_t cp) {
    return is_letter(cp) || is_digit(cp) || (cp >= 0x06F0 && cp <= 0x06F9) ||
           cp == U'_' || is_combining_mark(cp);
}

bool is_punctuation(char32_t cp) {
    if (cp < 0x80) {
        const bool alnum = (cp >= U'0' && cp <= U'9') || (cp >= U'A' && cp <= U'Z') ||
                           (cp >= U'a' && cp <= U'z');
        return cp > U' ' && !alnum && cp != U'_' && cp != 0x7F;
    }
    switch (cp) {
        case 0x060C:  // Arabic comma
        case 0x061B:  // Arabic semicolon
        case 0x061F:  // Arabic question mark
        case 0x06D4:  // Arabic full stop
        case 0x00AB:
        case 0x00BB:
        case 0x2013:
        case 0x2014:
        case 0x2018:
        case 0x2019:
        case 0x201C:
        case 0x201D:
        case 0x2022:
        case 0x2026:
            return true;
        default:
            return false;
    }
}

}  // namespace lexharvest::utf8
