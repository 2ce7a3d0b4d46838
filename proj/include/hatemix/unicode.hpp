// Copyright 2026 The hatemix Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// Minimal UTF-8 and code point classification helpers. Only the ranges the
// pipeline needs are classified; there is no dependency on ICU.
namespace hatemix::unicode {

inline constexpr char32_t kReplacement = 0xFFFD;

// Invalid or truncated sequences decode to U+FFFD, one per offending byte.
std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view cps);
void append(std::string& out, char32_t cp);

std::size_t code_point_count(std::string_view utf8);

bool is_whitespace(char32_t cp);
bool is_punctuation(char32_t cp);
// Emoji, pictographs, arrows, dingbats and similar non-letter symbols.
bool is_symbol(char32_t cp);
// Combining marks and invisible formatting characters (ZWJ, variation selectors).
bool is_format_or_combining(char32_t cp);
bool is_decimal_digit(char32_t cp);
// Characters that continue a hashtag or word token.
bool is_word_char(char32_t cp);

inline bool is_ascii_alpha(char32_t cp) {
    return (cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z');
}

// ASCII-only lower-casing plus the Latin-1 and Latin Extended-A upper-case
// letters that occur in Spanish and neighbouring languages.
char32_t to_lower(char32_t cp);

// Unicode block family of a letter code point; `none` for anything that is
// not a letter (digits, punctuation, whitespace, marks outside Indic blocks,
// symbols).
enum class LetterScript {
    none,
    latin,
    devanagari,
    bengali,
    gurmukhi,
    gujarati,
    oriya,
    tamil,
    telugu,
    kannada,
    malayalam,
    arabic,
    cyrillic,
    greek,
    other
};

LetterScript letter_script(char32_t cp);

// U+0900..U+0D7F, the Devanagari through Malayalam blocks.
inline bool is_indic_block(char32_t cp) { return cp >= 0x0900 && cp <= 0x0D7F; }

// Letters (general category L*) of the Indic blocks: excludes vowel signs,
// viramas and other combining marks, digits, dandas and numeric symbols.
// Exact for Devanagari, Tamil and Malayalam; the other blocks follow the
// shared layout of the Brahmic blocks.
bool is_indic_letter(char32_t cp);

}  // namespace hatemix::unicode
