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


#include "hatemix/scriptmix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hatemix/error.hpp"
#include "hatemix/rng.hpp"
#include "hatemix/unicode.hpp"

#ifndef HATEMIX_DATA_DIR
#define HATEMIX_DATA_DIR "data"
#endif

namespace hatemix {

namespace uc = unicode;

std::string_view to_string(ScriptTag tag) {
    switch (tag) {
        case ScriptTag::devanagari: return "devanagari";
        case ScriptTag::malayalam: return "malayalam";
        case ScriptTag::tamil: return "tamil";
        case ScriptTag::latin: return "latin";
        case ScriptTag::mixed: return "mixed";
        case ScriptTag::other: return "other";
    }
    return "other";
}

bool is_indic(ScriptTag tag) {
    return tag == ScriptTag::devanagari || tag == ScriptTag::malayalam || tag == ScriptTag::tamil;
}

ScriptTag classify_script(std::string_view text) {
    std::map<uc::LetterScript, std::size_t> counts;
    std::size_t letters = 0;
    for (char32_t cp : uc::decode(text)) {
        const auto s = uc::letter_script(cp);
        if (s == uc::LetterScript::none) continue;
        ++counts[s];
        ++letters;
    }
    if (letters == 0) return ScriptTag::other;
    const auto top = std::max_element(counts.begin(), counts.end(),
                                      [](auto& a, auto& b) { return a.second < b.second; });
    if (static_cast<double>(top->second) <= kScriptMajority * static_cast<double>(letters)) {
        return ScriptTag::mixed;
    }
    switch (top->first) {
        case uc::LetterScript::latin: return ScriptTag::latin;
        case uc::LetterScript::devanagari: return ScriptTag::devanagari;
        case uc::LetterScript::malayalam: return ScriptTag::malayalam;
        case uc::LetterScript::tamil: return ScriptTag::tamil;
        default: return ScriptTag::other;
    }
}

ScriptTag script_for(LanguageCondition language) {
    switch (language) {
        case LanguageCondition::hindi: return ScriptTag::devanagari;
        case LanguageCondition::malayalam: return ScriptTag::malayalam;
        case LanguageCondition::tamil: return ScriptTag::tamil;
        default: break;
    }
    throw ConfigError("language condition " + std::string(to_string(language)) +
                      " is not written in an Indic script");
}

// ---------------------------------------------------------------------------
// Tables

namespace {

std::string trim_copy(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

char32_t parse_hex(std::string_view hex, const std::string& origin, std::size_t line) {
    char32_t value = 0;
    if (hex.empty() || hex.size() > 6) {
        throw ConfigError(origin + ":" + std::to_string(line) + ": bad code point '" +
                          std::string(hex) + "'");
    }
    for (char c : hex) {
        value <<= 4;
        if (c >= '0' && c <= '9') value |= static_cast<char32_t>(c - '0');
        else if (c >= 'A' && c <= 'F') value |= static_cast<char32_t>(c - 'A' + 10);
        else if (c >= 'a' && c <= 'f') value |= static_cast<char32_t>(c - 'a' + 10);
        else throw ConfigError(origin + ":" + std::to_string(line) + ": bad hex digit");
    }
    return value;
}

EntryClass parse_class(std::string_view name, const std::string& origin, std::size_t line) {
    if (name == "consonant") return EntryClass::consonant;
    if (name == "vowel") return EntryClass::vowel;
    if (name == "vowel_sign") return EntryClass::vowel_sign;
    if (name == "virama") return EntryClass::virama;
    if (name == "nukta") return EntryClass::nukta;
    if (name == "other") return EntryClass::other;
    throw ConfigError(origin + ":" + std::to_string(line) + ": unknown entry class '" +
                      std::string(name) + "'");
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto tab = line.find('\t', start);
        out.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
        if (tab == std::string_view::npos) break;
        start = tab + 1;
    }
    return out;
}

}  // namespace

RomanizationTable RomanizationTable::parse(std::istream& in, const std::string& origin) {
    RomanizationTable table;
    std::string line;
    std::size_t line_no = 0;
    bool have_block = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto colon = line.find(':');
            if (colon == std::string::npos) continue;
            const auto key = trim_copy(std::string_view(line).substr(1, colon - 1));
            const auto value = trim_copy(std::string_view(line).substr(colon + 1));
            if (key == "scheme") {
                table.scheme_ = value;
            } else if (key == "version") {
                table.version_ = std::atoi(value.c_str());
            } else if (key == "block") {
                const auto dash = value.find('-');
                if (dash == std::string::npos) throw ConfigError(origin + ": bad block header");
                table.block_first_ = parse_hex(value.substr(0, dash), origin, line_no);
                table.block_last_ = parse_hex(value.substr(dash + 1), origin, line_no);
                have_block = true;
            }
            continue;
        }
        const auto cols = split_tabs(line);
        if (cols.size() != 3) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected 3 columns");
        }
        RomanizationEntry entry;
        std::istringstream hexes{std::string(cols[0])};
        std::string hex;
        while (hexes >> hex) entry.source.push_back(parse_hex(hex, origin, line_no));
        if (entry.source.empty()) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty source");
        }
        entry.target = std::string(cols[1]);
        entry.cls = parse_class(cols[2], origin, line_no);
        for (char32_t cp : uc::decode(entry.target)) {
            if (uc::is_indic_block(cp)) {
                throw ConfigError(origin + ":" + std::to_string(line_no) +
                                  ": target contains an Indic code point");
            }
        }
        if (entry.cls == EntryClass::consonant &&
            (entry.target.empty() || entry.target.back() != 'a')) {
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": consonant target must end in the inherent vowel 'a'");
        }
        if (!table.index_.emplace(entry.source, table.entries_.size()).second) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate source");
        }
        table.max_len_ = std::max(table.max_len_, entry.source.size());
        table.entries_.push_back(std::move(entry));
    }
    if (table.scheme_.empty() || !have_block) {
        throw ConfigError(origin + ": missing scheme or block header");
    }
    if (table.in_block(0x0915)) table.script_ = ScriptTag::devanagari;
    else if (table.in_block(0x0D15)) table.script_ = ScriptTag::malayalam;
    else if (table.in_block(0x0B95)) table.script_ = ScriptTag::tamil;
    return table;
}

RomanizationTable RomanizationTable::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open romanization table: " + path.string());
    return parse(in, path.string());
}

bool RomanizationTable::starts_entry(char32_t cp) const {
    auto it = index_.lower_bound(std::u32string(1, cp));
    return it != index_.end() && !it->first.empty() && it->first[0] == cp;
}

const RomanizationEntry* RomanizationTable::match(std::u32string_view text,
                                                  std::size_t pos) const {
    const std::size_t longest = std::min(max_len_, text.size() - pos);
    for (std::size_t len = longest; len > 0; --len) {
        auto it = index_.find(std::u32string(text.substr(pos, len)));
        if (it != index_.end()) return &entries_[it->second];
    }
    return nullptr;
}

// ---------------------------------------------------------------------------
// Transliterator

Transliterator::Transliterator(std::vector<RomanizationTable> tables) {
    for (auto& t : tables) {
        auto scheme = t.scheme();
        tables_.emplace(std::move(scheme), std::move(t));
    }
}

Transliterator Transliterator::from_directory(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw ConfigError("romanization table directory not found: " + dir.string());
    }
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.path().extension() == ".tsv") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<RomanizationTable> tables;
    for (const auto& f : files) tables.push_back(RomanizationTable::load(f));
    return Transliterator(std::move(tables));
}

std::filesystem::path Transliterator::default_table_dir() {
    if (const char* env = std::getenv("HATEMIX_DATA_DIR"); env && *env) {
        return std::filesystem::path(env) / "translit";
    }
    return std::filesystem::path(HATEMIX_DATA_DIR) / "translit";
}

const Transliterator& Transliterator::shared() {
    static const Transliterator instance = from_directory(default_table_dir());
    return instance;
}

const RomanizationTable& Transliterator::table(std::string_view scheme) const {
    auto it = tables_.find(scheme);
    if (it == tables_.end()) throw ConfigError("unknown romanization scheme: " + std::string(scheme));
    return it->second;
}

const RomanizationTable& Transliterator::table_for(ScriptTag script) const {
    for (const auto& [_, t] : tables_) {
        if (t.script() == script) return t;
    }
    throw ConfigError("no romanization table for script " + std::string(to_string(script)));
}

std::vector<std::string> Transliterator::schemes() const {
    std::vector<std::string> out;
    for (const auto& [k, _] : tables_) out.push_back(k);
    return out;
}

std::string Transliterator::transliterate(std::string_view text, std::string_view scheme) const {
    const auto& t = table(scheme);
    const std::u32string cps = uc::decode(text);

    bool covered = false;
    for (char32_t cp : cps) {
        if (t.in_block(cp) || t.starts_entry(cp)) {
            covered = true;
        } else if (uc::is_indic_block(cp)) {
            throw UnsupportedScript("code point U+" + [cp] {
                char buf[8];
                std::snprintf(buf, sizeof buf, "%04X", static_cast<unsigned>(cp));
                return std::string(buf);
            }() + " is outside scheme " + std::string(scheme));
        }
    }
    if (!covered) {
        throw UnsupportedScript("text has no " + std::string(to_string(t.script())) +
                                " code points for scheme " + std::string(scheme));
    }

    std::string out;
    bool pending_inherent = false;
    auto flush = [&] {
        if (pending_inherent) out.push_back('a');
        pending_inherent = false;
    };
    std::size_t i = 0;
    while (i < cps.size()) {
        const char32_t cp = cps[i];
        if (!t.in_block(cp) && !t.starts_entry(cp)) {
            flush();
            uc::append(out, cp);
            ++i;
            continue;
        }
        const RomanizationEntry* e = t.match(cps, i);
        if (e == nullptr) {
            // Unassigned or unmapped code point of the block: dropped.
            flush();
            ++i;
            continue;
        }
        i += e->source.size();
        switch (e->cls) {
            case EntryClass::consonant:
                flush();
                out.append(e->target, 0, e->target.size() - 1);
                pending_inherent = true;
                break;
            case EntryClass::vowel_sign:
                pending_inherent = false;
                out += e->target;
                break;
            case EntryClass::virama:
                pending_inherent = false;
                out += e->target;
                break;
            case EntryClass::nukta:
                out += e->target;
                break;
            case EntryClass::vowel:
            case EntryClass::other:
                flush();
                out += e->target;
                break;
        }
    }
    flush();
    return out;
}

// ---------------------------------------------------------------------------
// Mixing

std::size_t mix_count(double ratio, std::size_t n) {
    // nearbyint honours the default round-to-nearest-even mode.
    return static_cast<std::size_t>(std::nearbyint(ratio * static_cast<double>(n)));
}

RetrainCorpus MixedCorpus::as_corpus() const {
    RetrainCorpus c;
    if (base) {
        c.language = base->language;
        c.provenance = base->provenance;
    }
    c.texts = texts;
    c.seed = seed;
    std::ostringstream prov;
    prov << c.provenance << "; script-mix ratio=" << ratio << " seed=" << seed
         << " scheme=" << scheme << " transliterated=" << transliterated_indices.size();
    c.provenance = prov.str();
    return c;
}

MixedCorpus simulate_mix(std::shared_ptr<const RetrainCorpus> corpus, double ratio,
                         std::uint64_t seed, const Transliterator& transliterator) {
    if (!corpus) throw ConfigError("simulate_mix: null corpus");
    if (!is_indic(corpus->language)) {
        throw ConfigError("script mixing requires an Indic language condition, got " +
                          std::string(to_string(corpus->language)));
    }
    if (!(ratio >= 0.0 && ratio <= 1.0)) throw ConfigError("mix ratio must lie in [0, 1]");

    const ScriptTag native = script_for(corpus->language);
    const auto& table = transliterator.table_for(native);
    const std::size_t required = mix_count(ratio, corpus->texts.size());

    MixedCorpus mixed;
    mixed.base = corpus;
    mixed.texts = corpus->texts;
    mixed.ratio = ratio;
    mixed.seed = seed;
    mixed.scheme = table.scheme();
    if (required == 0) return mixed;

    std::vector<std::size_t> eligible;
    std::map<std::size_t, std::string> romanized;
    for (std::size_t i = 0; i < corpus->texts.size(); ++i) {
        const auto& text = corpus->texts[i];
        if (classify_script(text) != native) continue;
        std::string latin;
        try {
            latin = transliterator.transliterate(text, table.scheme());
        } catch (const UnsupportedScript&) {
            continue;
        }
        // The replacement must still satisfy the corpus text invariants.
        if (classify_script(latin) != ScriptTag::latin || contains_doubled_punctuation(latin) ||
            !length_filter(latin, std::min(kDefaultMinChars, uc::code_point_count(text)))) {
            continue;
        }
        eligible.push_back(i);
        romanized.emplace(i, std::move(latin));
    }
    if (eligible.size() < required) throw InsufficientIndicTexts(eligible.size(), required);

    Rng rng = make_rng(seed);
    for (auto pick : sample_without_replacement(eligible.size(), required, rng)) {
        mixed.transliterated_indices.push_back(eligible[pick]);
    }
    std::sort(mixed.transliterated_indices.begin(), mixed.transliterated_indices.end());
    for (auto idx : mixed.transliterated_indices) mixed.texts[idx] = std::move(romanized[idx]);
    return mixed;
}

void write_mixed_corpus(const MixedCorpus& mixed, const std::filesystem::path& text_path) {
    nlohmann::json extra = {{"mix_ratio", mixed.ratio},
                            {"mix_seed", mixed.seed},
                            {"scheme", mixed.scheme},
                            {"transliterated_count", mixed.transliterated_indices.size()},
                            {"transliterated_indices", mixed.transliterated_indices}};
    if (mixed.base) {
        extra["base_seed"] = mixed.base->seed;
        extra["base_provenance"] = mixed.base->provenance;
    }
    write_corpus(mixed.as_corpus(), text_path, extra);
}

}  // namespace hatemix
