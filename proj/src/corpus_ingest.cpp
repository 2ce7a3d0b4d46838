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


#include "hatemix/corpus_ingest.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "hatemix/error.hpp"
#include "hatemix/rng.hpp"
#include "hatemix/unicode.hpp"

namespace hatemix {

namespace chr = std::chrono;
namespace uc = unicode;

namespace {

int parse_int(std::string_view text, std::size_t pos, std::size_t len, std::string_view whole) {
    int value = 0;
    if (pos + len > text.size()) throw ConfigError("bad timestamp: " + std::string(whole));
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, value);
    if (ec != std::errc{} || ptr != text.data() + pos + len) {
        throw ConfigError("bad timestamp: " + std::string(whole));
    }
    return value;
}

}  // namespace

chr::year_month_day parse_date(std::string_view text) {
    if (text.size() < 10 || text[4] != '-' || text[7] != '-') {
        throw ConfigError("bad date: " + std::string(text));
    }
    const chr::year_month_day ymd{chr::year{parse_int(text, 0, 4, text)},
                                  chr::month{static_cast<unsigned>(parse_int(text, 5, 2, text))},
                                  chr::day{static_cast<unsigned>(parse_int(text, 8, 2, text))}};
    if (!ymd.ok()) throw ConfigError("invalid calendar date: " + std::string(text));
    return ymd;
}

std::string format_date(chr::year_month_day date) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

Timestamp parse_timestamp(std::string_view text) {
    const auto ymd = parse_date(text);
    Timestamp ts = chr::sys_days{ymd};
    if (text.size() == 10) return ts;
    if (text[10] != 'T' && text[10] != ' ') throw ConfigError("bad timestamp: " + std::string(text));
    std::size_t pos = 11;
    const int hh = parse_int(text, pos, 2, text);
    if (pos + 2 >= text.size() || text[pos + 2] != ':') {
        throw ConfigError("bad timestamp: " + std::string(text));
    }
    const int mm = parse_int(text, pos + 3, 2, text);
    pos += 5;
    int ss = 0;
    if (pos < text.size() && text[pos] == ':') {
        ss = parse_int(text, pos + 1, 2, text);
        pos += 3;
        if (pos < text.size() && text[pos] == '.') {
            ++pos;
            while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
        }
    }
    if (hh > 23 || mm > 59 || ss > 60) throw ConfigError("bad time of day: " + std::string(text));
    ts += chr::hours{hh} + chr::minutes{mm} + chr::seconds{ss};
    if (pos == text.size()) return ts;
    if (text[pos] == 'Z' && pos + 1 == text.size()) return ts;
    if ((text[pos] == '+' || text[pos] == '-') && text.size() == pos + 6 && text[pos + 3] == ':') {
        const int oh = parse_int(text, pos + 1, 2, text);
        const int om = parse_int(text, pos + 4, 2, text);
        const auto offset = chr::hours{oh} + chr::minutes{om};
        return text[pos] == '+' ? ts - offset : ts + offset;
    }
    throw ConfigError("bad timezone designator: " + std::string(text));
}

TweetRecord::TweetRecord(std::string id, std::string text, Timestamp timestamp,
                         std::optional<std::string> country)
    : id_(std::move(id)), text_(std::move(text)), timestamp_(timestamp),
      country_(std::move(country)) {
    if (text_.empty()) throw ConfigError("tweet " + id_ + " has empty text");
}

TweetRecord TweetRecord::with_text(std::string text) const {
    if (text.empty()) throw ConfigError("tweet " + id_ + " has empty text");
    TweetRecord copy = *this;
    copy.text_ = std::move(text);
    return copy;
}

TweetRecord TweetRecord::with_language(std::string lang, double confidence) const {
    if (!(confidence >= 0.0 && confidence <= 1.0)) {
        throw ConfigError("language confidence outside [0,1]");
    }
    TweetRecord copy = *this;
    copy.lang_ = std::move(lang);
    copy.lang_confidence_ = confidence;
    return copy;
}

TweetRecord parse_tweet_json(std::string_view line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("record is not a JSON object");
    auto text_it = j.find("text");
    auto ts_it = j.find("timestamp");
    if (text_it == j.end() || !text_it->is_string()) throw ConfigError("missing string field text");
    if (ts_it == j.end() || !ts_it->is_string()) throw ConfigError("missing string field timestamp");
    std::string id;
    if (auto it = j.find("id"); it != j.end()) {
        if (it->is_string()) {
            id = it->get<std::string>();
        } else if (it->is_number_integer()) {
            id = std::to_string(it->get<long long>());
        } else {
            throw ConfigError("id must be a string or integer");
        }
    }
    std::optional<std::string> country;
    if (auto it = j.find("country"); it != j.end() && !it->is_null()) {
        if (!it->is_string()) throw ConfigError("country must be a string or null");
        country = it->get<std::string>();
    }
    return TweetRecord(std::move(id), text_it->get<std::string>(),
                       parse_timestamp(ts_it->get<std::string>()), std::move(country));
}

void to_json(nlohmann::json& j, const CleaningReport& r) {
    j = {{"input_count", r.input_count},
         {"removed_short", r.removed_short},
         {"removed_empty_after_clean", r.removed_empty_after_clean},
         {"retained", r.retained}};
}

void to_json(nlohmann::json& j, const IngestReport& r) {
    j = {{"lines", r.lines},
         {"malformed", r.malformed},
         {"outside_window", r.outside_window},
         {"undecidable", r.undecidable},
         {"unsupported_language", r.unsupported_language},
         {"low_confidence", r.low_confidence},
         {"duplicates", r.duplicates},
         {"qualifying", r.qualifying}};
}

// ---------------------------------------------------------------------------
// Cleaning

namespace {

bool starts_with_ci(const std::u32string& s, std::size_t i, std::u32string_view prefix) {
    if (i + prefix.size() > s.size()) return false;
    for (std::size_t k = 0; k < prefix.size(); ++k) {
        if (uc::to_lower(s[i + k]) != prefix[k]) return false;
    }
    return true;
}

// A hyperlink starts at a token boundary with one of the three prefixes.
bool hyperlink_at(const std::u32string& s, std::size_t i, char32_t prev) {
    if (prev != 0 && uc::is_word_char(prev)) return false;
    return starts_with_ci(s, i, U"http://") || starts_with_ci(s, i, U"https://") ||
           starts_with_ci(s, i, U"www.");
}

bool hashtag_at(const std::u32string& s, std::size_t i, char32_t prev) {
    return s[i] == U'#' && (prev == 0 || !uc::is_word_char(prev)) && i + 1 < s.size() &&
           uc::is_word_char(s[i + 1]);
}

std::u32string remove_hyperlinks(const std::u32string& s) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (hyperlink_at(s, i, out.empty() ? 0 : out.back())) {
            while (i < s.size() && !uc::is_whitespace(s[i])) ++i;
            continue;
        }
        out.push_back(s[i++]);
    }
    return out;
}

std::u32string remove_hashtags(const std::u32string& s) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (hashtag_at(s, i, out.empty() ? 0 : out.back())) {
            ++i;
            while (i < s.size() && uc::is_word_char(s[i])) ++i;
            continue;
        }
        out.push_back(s[i++]);
    }
    return out;
}

std::u32string collapse_punctuation(const std::u32string& s) {
    std::u32string out;
    out.reserve(s.size());
    for (char32_t cp : s) {
        if (uc::is_punctuation(cp) && !out.empty() && out.back() == cp) continue;
        out.push_back(cp);
    }
    return out;
}

std::u32string collapse_whitespace(const std::u32string& s) {
    std::u32string out;
    out.reserve(s.size());
    for (char32_t cp : s) {
        if (uc::is_whitespace(cp)) {
            if (!out.empty() && out.back() == U' ') continue;
            out.push_back(U' ');
        } else {
            out.push_back(cp);
        }
    }
    return out;
}

std::u32string trim(const std::u32string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && uc::is_whitespace(s[b])) ++b;
    while (e > b && uc::is_whitespace(s[e - 1])) --e;
    return s.substr(b, e - b);
}

}  // namespace

std::string clean_text(std::string_view raw) {
    std::u32string cur = uc::decode(raw);
    // Each pass is length non-increasing and only a whitespace normalisation
    // can keep the length unchanged, so the loop terminates quickly.
    for (;;) {
        std::u32string next =
            trim(collapse_whitespace(collapse_punctuation(remove_hashtags(remove_hyperlinks(cur)))));
        if (next == cur) break;
        cur = std::move(next);
    }
    return uc::encode(cur);
}

bool length_filter(std::string_view text, std::size_t min_chars) {
    return uc::code_point_count(text) >= min_chars;
}

bool contains_hyperlink(std::string_view text) {
    const auto s = uc::decode(text);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (hyperlink_at(s, i, i == 0 ? 0 : s[i - 1])) return true;
    }
    return false;
}

bool contains_hashtag(std::string_view text) {
    const auto s = uc::decode(text);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (hashtag_at(s, i, i == 0 ? 0 : s[i - 1])) return true;
    }
    return false;
}

bool contains_doubled_punctuation(std::string_view text) {
    const auto s = uc::decode(text);
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (s[i] == s[i - 1] && uc::is_punctuation(s[i])) return true;
    }
    return false;
}

bool contains_doubled_whitespace(std::string_view text) {
    const auto s = uc::decode(text);
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (uc::is_whitespace(s[i]) && uc::is_whitespace(s[i - 1])) return true;
    }
    return false;
}

bool is_corpus_clean(std::string_view text, std::size_t min_chars) {
    return length_filter(text, min_chars) && !contains_hyperlink(text) &&
           !contains_hashtag(text) && !contains_doubled_punctuation(text) &&
           !contains_doubled_whitespace(text);
}

bool spatiotemporal_filter(const TweetRecord& record, const SpatioTemporalWindow& window) {
    if (!record.country() || *record.country() != window.country) return false;
    const chr::year_month_day date{chr::floor<chr::days>(record.timestamp())};
    return window.start <= date && date <= window.end;
}

LanguageGuess detect_language(const LanguageDetector* detector, std::string_view text) {
    if (detector == nullptr) throw DetectorUnavailable();
    if (text.empty()) throw UndecidableText("empty text");
    auto guesses = detector->candidates(text);
    if (guesses.empty()) throw UndecidableText("detector returned no candidate");
    return guesses.front();
}

// ---------------------------------------------------------------------------
// Sampling and the build pipeline

RetrainCorpus sample_corpus(std::span<const TweetRecord> records, LanguageCondition language,
                            std::size_t n, std::uint64_t seed) {
    if (n == 0) throw ConfigError("sample size must be positive");
    std::vector<const TweetRecord*> pool;
    for (const auto& r : records) {
        if (r.lang() && *r.lang() == iso_code(language)) pool.push_back(&r);
    }
    if (pool.size() < n) throw InsufficientData(pool.size(), n);
    Rng rng = make_rng(seed);
    const auto picks = sample_without_replacement(pool.size(), n, rng);
    RetrainCorpus corpus;
    corpus.language = language;
    corpus.seed = seed;
    corpus.texts.reserve(n);
    for (auto idx : picks) corpus.texts.push_back(pool[idx]->text());
    corpus.provenance = "uniform sample without replacement: " + std::to_string(n) + " of " +
                        std::to_string(pool.size()) + " qualifying records";
    return corpus;
}

BuildResult build_corpora(std::istream& jsonl, const LanguageDetector& detector,
                          const BuildOptions& options) {
    BuildResult result;
    std::map<LanguageCondition, std::vector<TweetRecord>> buckets;
    std::map<LanguageCondition, std::unordered_set<std::string>> seen;
    auto wanted = [&](LanguageCondition c) {
        return std::find(options.languages.begin(), options.languages.end(), c) !=
               options.languages.end();
    };
    auto window_for = [&](LanguageCondition c) {
        auto it = options.windows.find(c);
        return it == options.windows.end() ? SpatioTemporalWindow{} : it->second;
    };

    std::string line;
    while (std::getline(jsonl, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ++result.ingest.lines;
        std::optional<TweetRecord> record;
        try {
            record.emplace(parse_tweet_json(line));
        } catch (const ConfigError&) {
            ++result.ingest.malformed;
            continue;
        }

        ++result.cleaning.input_count;
        std::string cleaned = clean_text(record->text());
        if (cleaned.empty()) {
            ++result.cleaning.removed_empty_after_clean;
            continue;
        }
        if (!length_filter(cleaned, options.min_chars)) {
            ++result.cleaning.removed_short;
            continue;
        }
        ++result.cleaning.retained;

        LanguageGuess guess;
        try {
            guess = detect_language(&detector, cleaned);
        } catch (const UndecidableText&) {
            ++result.ingest.undecidable;
            continue;
        }
        const auto condition = condition_for_iso(guess.code);
        if (!condition || !wanted(*condition)) {
            ++result.ingest.unsupported_language;
            continue;
        }
        if (guess.confidence < options.min_confidence) {
            ++result.ingest.low_confidence;
            continue;
        }
        TweetRecord tagged = record->with_text(cleaned).with_language(guess.code, guess.confidence);
        if (!spatiotemporal_filter(tagged, window_for(*condition))) {
            ++result.ingest.outside_window;
            continue;
        }
        if (options.drop_exact_duplicates && !seen[*condition].insert(cleaned).second) {
            ++result.ingest.duplicates;
            continue;
        }
        buckets[*condition].push_back(std::move(tagged));
    }

    for (auto language : options.languages) {
        const auto& bucket = buckets[language];
        result.ingest.qualifying[std::string(to_string(language))] = bucket.size();
        RetrainCorpus corpus = sample_corpus(bucket, language, options.sample_size, options.seed);
        const auto window = window_for(language);
        std::ostringstream prov;
        prov << "clean_text(links,hashtags,punct,whitespace,trim); min_chars=" << options.min_chars
             << "; country=" << window.country << "; window=" << format_date(window.start) << ".."
             << format_date(window.end) << "; detector=" << detector.id()
             << "; min_confidence=" << options.min_confidence
             << "; dedup=" << (options.drop_exact_duplicates ? "exact" : "none") << "; "
             << corpus.provenance;
        corpus.provenance = prov.str();
        result.corpora.emplace(language, std::move(corpus));
    }
    return result;
}

std::filesystem::path corpus_metadata_path(const std::filesystem::path& text_path) {
    auto meta = text_path;
    meta.replace_extension(".meta.json");
    return meta;
}

void write_corpus(const RetrainCorpus& corpus, const std::filesystem::path& text_path,
                  const nlohmann::json& extra_metadata) {
    if (text_path.has_parent_path()) std::filesystem::create_directories(text_path.parent_path());
    {
        std::ofstream out(text_path, std::ios::binary);
        if (!out) throw ConfigError("cannot write corpus: " + text_path.string());
        for (const auto& t : corpus.texts) {
            if (t.find('\n') != std::string::npos) {
                throw ConfigError("corpus text contains a newline");
            }
            out << t << '\n';
        }
    }
    nlohmann::json meta = {{"language", std::string(to_string(corpus.language))},
                           {"seed", corpus.seed},
                           {"size", corpus.texts.size()},
                           {"provenance", corpus.provenance}};
    for (auto it = extra_metadata.begin(); it != extra_metadata.end(); ++it) meta[it.key()] = *it;
    std::ofstream out(corpus_metadata_path(text_path), std::ios::binary);
    out << meta.dump(2) << '\n';
}

RetrainCorpus read_corpus(const std::filesystem::path& text_path) {
    std::ifstream in(text_path, std::ios::binary);
    if (!in) throw ConfigError("cannot read corpus: " + text_path.string());
    RetrainCorpus corpus;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) corpus.texts.push_back(line);
    }
    std::ifstream meta_in(corpus_metadata_path(text_path));
    if (meta_in) {
        try {
            const auto meta = nlohmann::json::parse(meta_in);
            corpus.language = require_condition(meta.at("language").get<std::string>());
            corpus.seed = meta.value("seed", std::uint64_t{0});
            corpus.provenance = meta.value("provenance", std::string{});
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("bad corpus metadata for " + text_path.string() + ": " + e.what());
        }
    }
    return corpus;
}

}  // namespace hatemix
