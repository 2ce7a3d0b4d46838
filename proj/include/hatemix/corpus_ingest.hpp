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

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hatemix/language.hpp"
#include "json.hpp"

namespace hatemix {

using Timestamp = std::chrono::sys_seconds;

// Parses "YYYY-MM-DD", "YYYY-MM-DDTHH:MM[:SS[.fff]]" with an optional "Z" or
// "+HH:MM" offset, normalised to UTC. Throws ConfigError on bad input.
Timestamp parse_timestamp(std::string_view text);
std::chrono::year_month_day parse_date(std::string_view text);
std::string format_date(std::chrono::year_month_day date);

// One raw social-media message.
class TweetRecord {
public:
    // Throws ConfigError when text is empty.
    TweetRecord(std::string id, std::string text, Timestamp timestamp,
                std::optional<std::string> country);

    const std::string& id() const { return id_; }
    const std::string& text() const { return text_; }
    Timestamp timestamp() const { return timestamp_; }
    const std::optional<std::string>& country() const { return country_; }
    const std::optional<std::string>& lang() const { return lang_; }
    std::optional<double> lang_confidence() const { return lang_confidence_; }

    // Returns a copy with replaced text (after cleaning). Throws when empty.
    TweetRecord with_text(std::string text) const;
    // Language and confidence are always set together. Confidence must lie in [0, 1].
    TweetRecord with_language(std::string lang, double confidence) const;

private:
    std::string id_;
    std::string text_;
    Timestamp timestamp_;
    std::optional<std::string> country_;
    std::optional<std::string> lang_;
    std::optional<double> lang_confidence_;
};

// Parses one JSON-lines record {id, text, timestamp, country}. Throws
// ConfigError for anything malformed.
TweetRecord parse_tweet_json(std::string_view line);

struct CleaningReport {
    std::size_t input_count = 0;
    std::size_t removed_short = 0;
    std::size_t removed_empty_after_clean = 0;
    std::size_t retained = 0;

    bool conserved() const {
        return retained + removed_short + removed_empty_after_clean == input_count;
    }
};

void to_json(nlohmann::json& j, const CleaningReport& r);

// Applied in order: hyperlinks, hashtag tokens, runs of one repeated
// punctuation character, whitespace runs, trim. The rules are re-applied until
// nothing changes so that the result is a fixed point.
std::string clean_text(std::string_view raw);

inline constexpr std::size_t kDefaultMinChars = 50;

// True iff the text has at least `min_chars` code points.
bool length_filter(std::string_view text, std::size_t min_chars = kDefaultMinChars);

// Inclusive UTC date window plus an origin country.
struct SpatioTemporalWindow {
    std::string country = "IN";
    std::chrono::year_month_day start{std::chrono::year{2019}, std::chrono::January,
                                      std::chrono::day{1}};
    std::chrono::year_month_day end{std::chrono::year{2019}, std::chrono::December,
                                    std::chrono::day{31}};
};

bool spatiotemporal_filter(const TweetRecord& record, const SpatioTemporalWindow& window = {});

// Checks the invariants every retraining text satisfies: minimum length, no
// hyperlink, no hashtag, no doubled punctuation or whitespace.
bool is_corpus_clean(std::string_view text, std::size_t min_chars = kDefaultMinChars);
bool contains_hyperlink(std::string_view text);
bool contains_hashtag(std::string_view text);
bool contains_doubled_punctuation(std::string_view text);
bool contains_doubled_whitespace(std::string_view text);

struct LanguageGuess {
    std::string code;
    double confidence = 0.0;
};

// Pluggable language identification backend.
class LanguageDetector {
public:
    virtual ~LanguageDetector() = default;
    virtual std::string id() const = 0;
    // Candidates in descending confidence order; empty when no decision is
    // possible.
    virtual std::vector<LanguageGuess> candidates(std::string_view text) const = 0;
};

// Most probable language. Throws DetectorUnavailable for a null detector and
// UndecidableText for empty text or when the detector has no candidate.
LanguageGuess detect_language(const LanguageDetector* detector, std::string_view text);

inline constexpr double kDefaultLanguageConfidence = 0.90;
inline constexpr std::size_t kDefaultSampleSize = 50000;

// Cleaned, sampled text collection for masked-language-model retraining.
struct RetrainCorpus {
    LanguageCondition language = LanguageCondition::english;
    std::vector<std::string> texts;
    std::uint64_t seed = 0;
    std::string provenance;
};

// Uniform sample of exactly `n` texts, without replacement, from the records
// whose detected language belongs to `language`. Throws InsufficientData.
RetrainCorpus sample_corpus(std::span<const TweetRecord> records, LanguageCondition language,
                            std::size_t n, std::uint64_t seed);

// Counts for everything dropped outside the cleaning stage.
struct IngestReport {
    std::size_t lines = 0;
    std::size_t malformed = 0;
    std::size_t outside_window = 0;
    std::size_t undecidable = 0;
    std::size_t unsupported_language = 0;
    std::size_t low_confidence = 0;
    std::size_t duplicates = 0;
    std::map<std::string, std::size_t> qualifying;  // per condition
};

void to_json(nlohmann::json& j, const IngestReport& r);

struct BuildOptions {
    std::vector<LanguageCondition> languages{kAllConditions.begin(), kAllConditions.end()};
    std::map<LanguageCondition, SpatioTemporalWindow> windows;  // missing → default window
    std::size_t min_chars = kDefaultMinChars;
    double min_confidence = kDefaultLanguageConfidence;
    std::size_t sample_size = kDefaultSampleSize;
    std::uint64_t seed = 0;
    bool drop_exact_duplicates = true;
};

struct BuildResult {
    std::map<LanguageCondition, RetrainCorpus> corpora;
    CleaningReport cleaning;
    IngestReport ingest;
};

// clean → length filter → spatio-temporal filter → language detection →
// exact-duplicate removal → per-language sampling. Malformed lines are counted
// and skipped.
BuildResult build_corpora(std::istream& jsonl, const LanguageDetector& detector,
                          const BuildOptions& options);

// Persists texts one per line and a sidecar "<stem>.meta.json".
std::filesystem::path corpus_metadata_path(const std::filesystem::path& text_path);
void write_corpus(const RetrainCorpus& corpus, const std::filesystem::path& text_path,
                  const nlohmann::json& extra_metadata = nlohmann::json::object());
RetrainCorpus read_corpus(const std::filesystem::path& text_path);

}  // namespace hatemix
