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
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hatemix/corpus_ingest.hpp"

namespace hatemix {

enum class ScriptTag { devanagari, malayalam, tamil, latin, mixed, other };

std::string_view to_string(ScriptTag tag);
bool is_indic(ScriptTag tag);

// Share of letters a block must exceed for a single-script tag.
inline constexpr double kScriptMajority = 0.80;

// Majority Unicode-block membership of letter code points. Marks, digits,
// punctuation and whitespace are not counted. Letterless text is `other`, as
// is text dominated by a script outside the enumeration.
ScriptTag classify_script(std::string_view text);

// Native script of an Indic language condition. Throws ConfigError otherwise.
ScriptTag script_for(LanguageCondition language);

enum class EntryClass { consonant, vowel, vowel_sign, virama, nukta, other };

struct RomanizationEntry {
    std::u32string source;
    std::string target;
    EntryClass cls = EntryClass::other;
};

// A versioned code-point-sequence → Latin mapping, matched longest-first.
class RomanizationTable {
public:
    // Reads the TSV format shipped under data/translit. Throws ConfigError.
    static RomanizationTable parse(std::istream& in, const std::string& origin);
    static RomanizationTable load(const std::filesystem::path& path);

    const std::string& scheme() const { return scheme_; }
    int version() const { return version_; }
    ScriptTag script() const { return script_; }
    char32_t block_first() const { return block_first_; }
    char32_t block_last() const { return block_last_; }
    const std::vector<RomanizationEntry>& entries() const { return entries_; }

    bool in_block(char32_t cp) const { return cp >= block_first_ && cp <= block_last_; }
    // True when some entry's source begins with `cp`.
    bool starts_entry(char32_t cp) const;
    // Longest entry whose source matches `text` at `pos`, if any.
    const RomanizationEntry* match(std::u32string_view text, std::size_t pos) const;

private:
    std::string scheme_;
    int version_ = 0;
    ScriptTag script_ = ScriptTag::other;
    char32_t block_first_ = 0;
    char32_t block_last_ = 0;
    std::vector<RomanizationEntry> entries_;
    std::map<std::u32string, std::size_t> index_;
    std::size_t max_len_ = 0;
};

// Deterministic ISO 15919 romanization of Indic text. Runs of the scheme's
// script are mapped through its table; everything outside the Indic blocks is
// copied through verbatim.
class Transliterator {
public:
    Transliterator() = default;
    explicit Transliterator(std::vector<RomanizationTable> tables);

    // Loads every *.tsv table in `dir`.
    static Transliterator from_directory(const std::filesystem::path& dir);
    // Tables from $HATEMIX_DATA_DIR/translit, else the source tree's data dir.
    static const Transliterator& shared();
    static std::filesystem::path default_table_dir();

    const RomanizationTable& table(std::string_view scheme) const;
    // Scheme for an Indic script tag, e.g. "tamil-iso15919".
    const RomanizationTable& table_for(ScriptTag script) const;
    std::vector<std::string> schemes() const;

    // Throws UnsupportedScript when the text holds no code point of the
    // scheme, or holds Indic code points the scheme cannot map.
    std::string transliterate(std::string_view text, std::string_view scheme) const;

private:
    std::map<std::string, RomanizationTable, std::less<>> tables_;
};

inline constexpr double kDefaultMixRatio = 0.20;

// A retraining corpus in which a seeded subset of Indic-script texts has been
// replaced by its romanization.
struct MixedCorpus {
    std::shared_ptr<const RetrainCorpus> base;
    std::vector<std::string> texts;
    std::vector<std::size_t> transliterated_indices;  // sorted ascending
    double ratio = 0.0;
    std::uint64_t seed = 0;
    std::string scheme;

    RetrainCorpus as_corpus() const;
};

// round-half-to-even(ratio × n).
std::size_t mix_count(double ratio, std::size_t n);

// Replaces exactly mix_count(ratio, N) texts, drawn uniformly by seed from
// the texts written in the corpus language's script whose romanization
// classifies as Latin. Throws InsufficientIndicTexts, or ConfigError for a
// non-Indic corpus or a ratio outside [0, 1].
MixedCorpus simulate_mix(std::shared_ptr<const RetrainCorpus> corpus, double ratio,
                         std::uint64_t seed,
                         const Transliterator& transliterator = Transliterator::shared());

void write_mixed_corpus(const MixedCorpus& mixed, const std::filesystem::path& text_path);

}  // namespace hatemix
