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


#include "hatemix/language_detector.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

#include "hatemix/unicode.hpp"

namespace hatemix {

namespace uc = unicode;

namespace {

struct WordList {
    const char* code;
    std::vector<std::string_view> words;
};

const std::vector<WordList>& latin_lists() {
    static const std::vector<WordList> lists = {
        {"en",
         {"the", "be", "to", "of", "and", "a", "in", "that", "have", "i", "it", "for", "not",
          "on", "with", "he", "as", "you", "do", "at", "this", "but", "his", "by", "from",
          "they", "we", "say", "her", "she", "or", "an", "will", "my", "one", "all", "would",
          "there", "their", "what", "so", "up", "out", "if", "about", "who", "get", "which",
          "go", "me", "is", "are", "was", "were", "been", "has", "had", "very", "just", "your",
          "our", "how", "why", "people", "can", "no", "yes", "should", "these", "those",
          "than", "them", "then", "when", "where", "because", "its", "it's", "don't", "i'm"}},
        {"es",
         {"el", "la", "de", "que", "y", "a", "en", "un", "ser", "se", "no", "por", "con",
          "su", "para", "como", "estar", "tener", "le", "lo", "todo", "pero", "más", "hacer",
          "o", "poder", "decir", "este", "ir", "otro", "ese", "si", "me", "ya", "ver",
          "porque", "dar", "cuando", "muy", "sin", "vez", "mucho", "saber", "qué", "sobre",
          "mi", "yo", "también", "hasta", "año", "entre", "así", "es", "los", "las", "del",
          "al", "una", "son", "está", "están", "esta", "hay", "nos", "eso", "ñ", "¿", "¡"}},
        {"pt",
         {"o", "a", "de", "que", "e", "do", "da", "em", "um", "para", "é", "com", "não",
          "uma", "os", "no", "se", "na", "por", "mais", "as", "dos", "como", "mas", "foi",
          "ao", "ele", "das", "tem", "à", "seu", "sua", "ou", "ser", "quando", "muito", "há",
          "nos", "já", "está", "eu", "também", "só", "pelo", "pela", "até", "isso", "ela",
          "entre", "era", "depois", "sem", "mesmo", "aos", "ter", "seus", "quem", "nas",
          "me", "esse", "eles", "estão", "você", "ç", "ã", "õ"}},
        {"fr",
         {"le", "la", "les", "de", "des", "du", "un", "une", "et", "est", "en", "que", "qui",
          "dans", "pour", "pas", "sur", "au", "avec", "ce", "il", "elle", "ne", "se", "plus",
          "par", "je", "tu", "nous", "vous", "ils", "mais", "ou", "son", "sa", "ses", "cette",
          "être", "avoir", "fait", "sont", "été", "aussi", "comme", "très", "où", "à", "ç",
          "è", "ê", "œ"}},
        {"de",
         {"der", "die", "das", "und", "ist", "nicht", "ein", "eine", "zu", "den", "von",
          "mit", "sich", "des", "auf", "für", "im", "dem", "auch", "es", "an", "als", "wie",
          "wir", "ich", "du", "er", "sie", "aber", "noch", "nach", "bei", "aus", "wenn",
          "nur", "oder", "war", "haben", "sein", "sind", "werden", "hat", "kann", "ß", "ä",
          "ö", "ü"}},
        {"it",
         {"il", "di", "che", "e", "la", "per", "un", "in", "è", "non", "una", "sono", "mi",
          "si", "ho", "lo", "ma", "ha", "le", "con", "ti", "cosa", "se", "io", "come", "da",
          "ci", "questo", "qui", "bene", "gli", "del", "della", "nel", "anche", "più",
          "molto", "sempre", "ancora", "perché", "tutto", "ù", "ò"}},
    };
    return lists;
}

const std::vector<WordList>& devanagari_lists() {
    static const std::vector<WordList> lists = {
        {"hi",
         {"है", "हैं", "के", "का", "की", "को", "में", "से", "और", "यह", "वह", "नहीं", "पर",
          "भी", "तो", "ही", "था", "थी", "थे", "हो", "कि", "एक", "इस", "उस", "जो", "कर",
          "रहे", "गया", "क्या", "लिए", "अपने", "मैं", "हम", "आप", "तुम", "ये", "वो",
          "बहुत", "ने", "हुए", "सकते", "जाता", "होता"}},
        {"mr",
         {"आहे", "आणि", "च्या", "ची", "चा", "चे", "या", "हे", "ते", "नाही", "मी", "आम्ही",
          "तुम्ही", "आपण", "होते", "झाले", "करून", "म्हणून", "पण", "तर", "काय", "ला", "ने",
          "आहेत", "केले", "होता", "त्या", "त्यांनी"}},
        {"ne",
         {"छ", "छन्", "हो", "र", "को", "मा", "ले", "लाई", "पनि", "गर्न", "भएको", "यो",
          "त्यो", "हुन्छ", "थियो", "छैन", "म", "हामी", "तपाईं", "के", "गरेको", "भने",
          "हुने", "गर्ने", "रहेको"}},
    };
    return lists;
}

// Naive Bayes posterior over the lists in `lists` for the given tokens.
std::vector<LanguageGuess> posterior(const std::vector<WordList>& lists,
                                     const std::vector<std::string>& tokens, double scale) {
    constexpr double kEpsilon = 0.05;
    std::set<std::string_view> vocab;
    for (const auto& l : lists) vocab.insert(l.words.begin(), l.words.end());
    const double floor = kEpsilon / static_cast<double>(vocab.size());

    std::vector<double> loglik(lists.size(), 0.0);
    for (const auto& tok : tokens) {
        if (!vocab.count(tok)) continue;
        for (std::size_t k = 0; k < lists.size(); ++k) {
            const auto& words = lists[k].words;
            const bool hit = std::find(words.begin(), words.end(), tok) != words.end();
            const double p = hit ? (1.0 - kEpsilon) / static_cast<double>(words.size()) + floor
                                 : floor;
            loglik[k] += std::log(p);
        }
    }
    const double best = *std::max_element(loglik.begin(), loglik.end());
    double z = 0.0;
    for (double l : loglik) z += std::exp(l - best);
    std::vector<LanguageGuess> out;
    for (std::size_t k = 0; k < lists.size(); ++k) {
        out.push_back({lists[k].code, scale * std::exp(loglik[k] - best) / z});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.confidence > b.confidence; });
    return out;
}

// Lower-cased word tokens plus single-character cue tokens (ñ, ß, ...).
std::vector<std::string> tokenize(const std::u32string& cps) {
    std::vector<std::string> tokens;
    std::u32string cur;
    auto flush = [&] {
        if (!cur.empty()) tokens.push_back(uc::encode(cur));
        cur.clear();
    };
    for (char32_t cp : cps) {
        const char32_t lower = uc::to_lower(cp);
        if (cp == U'\'' && !cur.empty()) {
            cur.push_back(cp);
        } else if (uc::is_word_char(cp) || (uc::is_indic_block(cp) && cp != 0x0964 && cp != 0x0965)) {
            cur.push_back(lower);
        } else {
            flush();
        }
        if (cp >= 0xA1 && cp <= 0x24F) tokens.push_back(uc::encode(std::u32string(1, lower)));
    }
    flush();
    return tokens;
}

const char* single_language_code(uc::LetterScript s) {
    switch (s) {
        case uc::LetterScript::malayalam: return "ml";
        case uc::LetterScript::tamil: return "ta";
        case uc::LetterScript::bengali: return "bn";
        case uc::LetterScript::gurmukhi: return "pa";
        case uc::LetterScript::gujarati: return "gu";
        case uc::LetterScript::oriya: return "or";
        case uc::LetterScript::telugu: return "te";
        case uc::LetterScript::kannada: return "kn";
        case uc::LetterScript::arabic: return "ar";
        case uc::LetterScript::cyrillic: return "ru";
        case uc::LetterScript::greek: return "el";
        default: return "und";
    }
}

}  // namespace

std::vector<LanguageGuess> BuiltinLanguageDetector::candidates(std::string_view text) const {
    const auto cps = uc::decode(text);
    std::map<uc::LetterScript, std::size_t> counts;
    std::size_t letters = 0;
    for (char32_t cp : cps) {
        const auto s = uc::letter_script(cp);
        if (s == uc::LetterScript::none) continue;
        ++counts[s];
        ++letters;
    }
    if (letters == 0) return {};
    const auto dominant = std::max_element(counts.begin(), counts.end(), [](auto& a, auto& b) {
        return a.second < b.second;
    });
    const double share = static_cast<double>(dominant->second) / static_cast<double>(letters);
    if (dominant->first == uc::LetterScript::latin) {
        return posterior(latin_lists(), tokenize(cps), share);
    }
    if (dominant->first == uc::LetterScript::devanagari) {
        return posterior(devanagari_lists(), tokenize(cps), share);
    }
    return {{single_language_code(dominant->first), share}};
}

}  // namespace hatemix
