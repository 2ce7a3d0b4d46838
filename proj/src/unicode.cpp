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


#include "hatemix/unicode.hpp"

namespace hatemix::unicode {

namespace {

bool in(char32_t cp, char32_t lo, char32_t hi) { return cp >= lo && cp <= hi; }

}  // namespace

std::u32string decode(std::string_view utf8) {
    std::u32string out;
    out.reserve(utf8.size());
    std::size_t i = 0;
    const std::size_t n = utf8.size();
    while (i < n) {
        const auto b0 = static_cast<unsigned char>(utf8[i]);
        if (b0 < 0x80) {
            out.push_back(b0);
            ++i;
            continue;
        }
        std::size_t len = 0;
        char32_t cp = 0;
        char32_t min = 0;
        if ((b0 & 0xE0) == 0xC0) {
            len = 2;
            cp = b0 & 0x1F;
            min = 0x80;
        } else if ((b0 & 0xF0) == 0xE0) {
            len = 3;
            cp = b0 & 0x0F;
            min = 0x800;
        } else if ((b0 & 0xF8) == 0xF0) {
            len = 4;
            cp = b0 & 0x07;
            min = 0x10000;
        } else {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        if (i + len > n) {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        bool ok = true;
        for (std::size_t k = 1; k < len; ++k) {
            const auto b = static_cast<unsigned char>(utf8[i + k]);
            if ((b & 0xC0) != 0x80) {
                ok = false;
                break;
            }
            cp = (cp << 6) | (b & 0x3F);
        }
        if (!ok || cp < min || cp > 0x10FFFF || in(cp, 0xD800, 0xDFFF)) {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

void append(std::string& out, char32_t cp) {
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

std::string encode(std::u32string_view cps) {
    std::string out;
    out.reserve(cps.size());
    for (char32_t cp : cps) append(out, cp);
    return out;
}

std::size_t code_point_count(std::string_view utf8) { return decode(utf8).size(); }

bool is_whitespace(char32_t cp) {
    return cp == U' ' || in(cp, 0x09, 0x0D) || cp == 0x85 || cp == 0xA0 || cp == 0x1680 ||
           in(cp, 0x2000, 0x200A) || cp == 0x2028 || cp == 0x2029 || cp == 0x202F ||
           cp == 0x205F || cp == 0x3000;
}

bool is_punctuation(char32_t cp) {
    if (cp < 0x80) {
        return in(cp, 0x21, 0x2F) || in(cp, 0x3A, 0x40) || in(cp, 0x5B, 0x60) ||
               in(cp, 0x7B, 0x7E);
    }
    return cp == 0xA1 || cp == 0xA7 || cp == 0xAB || cp == 0xB6 || cp == 0xB7 ||
           cp == 0xBB || cp == 0xBF || in(cp, 0x2010, 0x2027) || in(cp, 0x2030, 0x205E) ||
           cp == 0x0964 || cp == 0x0965 || in(cp, 0x3001, 0x3003) || in(cp, 0x3008, 0x3011) ||
           in(cp, 0xFF01, 0xFF0F) || in(cp, 0xFF1A, 0xFF20) || in(cp, 0xFF3B, 0xFF40) ||
           in(cp, 0xFF5B, 0xFF65);
}

bool is_symbol(char32_t cp) {
    return in(cp, 0x20A0, 0x20CF) || in(cp, 0x2100, 0x2BFF) || in(cp, 0x2E00, 0x2E7F) ||
           in(cp, 0x3000, 0x303F) || in(cp, 0xE000, 0xF8FF) || in(cp, 0xFFF0, 0xFFFF) ||
           in(cp, 0x1F000, 0x1FAFF) || in(cp, 0xE0000, 0xE007F);
}

bool is_format_or_combining(char32_t cp) {
    return in(cp, 0x0300, 0x036F) || in(cp, 0x1AB0, 0x1AFF) || in(cp, 0x1DC0, 0x1DFF) ||
           in(cp, 0x200B, 0x200F) || in(cp, 0x2060, 0x206F) || in(cp, 0x20D0, 0x20FF) ||
           in(cp, 0xFE00, 0xFE0F) || in(cp, 0xFE20, 0xFE2F) || cp == 0xFEFF;
}

bool is_decimal_digit(char32_t cp) {
    if (in(cp, U'0', U'9')) return true;
    // Digit blocks of the scripts the pipeline handles (Devanagari..Malayalam,
    // Arabic-Indic, fullwidth).
    for (char32_t base : {0x0966, 0x09E6, 0x0A66, 0x0AE6, 0x0B66, 0x0BE6, 0x0C66, 0x0CE6,
                          0x0D66, 0x0660, 0x06F0, 0xFF10}) {
        if (in(cp, base, base + 9)) return true;
    }
    return false;
}

bool is_word_char(char32_t cp) {
    if (cp < 0x80) return is_ascii_alpha(cp) || in(cp, U'0', U'9') || cp == U'_';
    if (in(cp, 0x80, 0xBF) || cp == 0xD7 || cp == 0xF7) return false;
    if (cp == kReplacement) return false;
    return !is_whitespace(cp) && !is_punctuation(cp) && !is_symbol(cp) &&
           !in(cp, 0x200B, 0x200F) && !in(cp, 0x2060, 0x206F) && !in(cp, 0xFE00, 0xFE0F);
}

char32_t to_lower(char32_t cp) {
    if (in(cp, U'A', U'Z')) return cp + 32;
    if (in(cp, 0xC0, 0xDE) && cp != 0xD7) return cp + 32;
    const bool even_upper = in(cp, 0x100, 0x137) || in(cp, 0x14A, 0x177);
    const bool odd_upper = in(cp, 0x139, 0x148) || in(cp, 0x179, 0x17E);
    if ((even_upper && cp % 2 == 0 && cp != 0x130) || (odd_upper && cp % 2 == 1)) return cp + 1;
    return cp;
}

bool is_indic_letter(char32_t cp) {
    if (!is_indic_block(cp)) return false;
    const char32_t o = cp & 0x7F;
    const char32_t blk = (cp - 0x0900) / 0x80;  // 0 Devanagari, 5 Tamil, 8 Malayalam
    if (cp == 0x0964 || cp == 0x0965 || in(o, 0x66, 0x6F)) return false;
    if (blk == 0 && o == 0x70) return false;
    if (blk == 5 && in(o, 0x70, 0x7A)) return false;
    if (blk == 8 && (in(o, 0x58, 0x5E) || in(o, 0x70, 0x79) || o == 0x4F)) return false;
    // Letters at offsets that are combining marks in the other blocks.
    if (blk == 5 && o == 0x03) return true;
    if (blk == 8 && (o == 0x3A || o == 0x4E || in(o, 0x54, 0x56))) return true;
    const bool mark = o <= 0x03 || in(o, 0x3A, 0x3C) || in(o, 0x3E, 0x4F) || in(o, 0x51, 0x57) ||
                      in(o, 0x62, 0x63);
    return !mark;
}

LetterScript letter_script(char32_t cp) {
    if (is_decimal_digit(cp)) return LetterScript::none;
    if (cp < 0x80) return is_ascii_alpha(cp) ? LetterScript::latin : LetterScript::none;
    if (in(cp, 0xC0, 0x24F) && cp != 0xD7 && cp != 0xF7) return LetterScript::latin;
    if (in(cp, 0x250, 0x2AF) || in(cp, 0x1E00, 0x1EFF) || in(cp, 0x2C60, 0x2C7F) ||
        in(cp, 0xA720, 0xA7FF) || in(cp, 0xFF21, 0xFF3A) || in(cp, 0xFF41, 0xFF5A)) {
        return LetterScript::latin;
    }
    if (is_indic_block(cp)) {
        if (!is_indic_letter(cp)) return LetterScript::none;
        switch ((cp - 0x0900) / 0x80) {
            case 0: return LetterScript::devanagari;
            case 1: return LetterScript::bengali;
            case 2: return LetterScript::gurmukhi;
            case 3: return LetterScript::gujarati;
            case 4: return LetterScript::oriya;
            case 5: return LetterScript::tamil;
            case 6: return LetterScript::telugu;
            case 7: return LetterScript::kannada;
            default: return LetterScript::malayalam;
        }
    }
    if (in(cp, 0xA8E0, 0xA8FF)) return LetterScript::devanagari;  // Devanagari Extended
    if (in(cp, 0x0600, 0x06FF) || in(cp, 0x0750, 0x077F)) return LetterScript::arabic;
    if (in(cp, 0x0400, 0x052F)) return LetterScript::cyrillic;
    if (in(cp, 0x0370, 0x03FF)) return LetterScript::greek;
    if (is_format_or_combining(cp)) return LetterScript::none;
    return is_word_char(cp) ? LetterScript::other : LetterScript::none;
}

}  // namespace hatemix::unicode
