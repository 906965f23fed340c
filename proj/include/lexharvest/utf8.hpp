#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace lexharvest::utf8 {

// Invalid bytes are surfaced as lone code points in the surrogate-escape
// range 0xDC80..0xDCFF so that decode/encode round-trips arbitrary byte
// strings. Every caller treats escaped bytes as opaque "other" characters.
inline constexpr char32_t kEscapeBase = 0xDC80;

struct Decoded {
    char32_t cp = 0;
    int length = 0;  // bytes consumed, >= 1
};

// Decodes the code point starting at s[pos]. pos must be < s.size().
Decoded decode(std::string_view s, std::size_t pos);

// Appends cp to out as UTF-8; surrogate-escaped values emit the original byte.
void append(std::string& out, char32_t cp);

std::vector<char32_t> decode_all(std::string_view s);
std::string encode_all(const std::vector<char32_t>& cps);

bool is_whitespace(char32_t cp);
bool is_digit(char32_t cp);        // ASCII 0-9 and Arabic-Indic U+0660-0669
bool is_word_char(char32_t cp);    // letters, digits, underscore, combining marks
bool is_punctuation(char32_t cp);  // detached by the tokenizer

}  // namespace lexharvest::utf8
