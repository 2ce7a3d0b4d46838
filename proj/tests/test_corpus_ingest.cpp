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


#include <regex>
#include <set>
#include <sstream>

#include "doctest.h"
#include "hatemix/corpus_ingest.hpp"
#include "hatemix/error.hpp"
#include "hatemix/language_detector.hpp"
#include "hatemix/rng.hpp"
#include "hatemix/unicode.hpp"
#include "support/fixtures.hpp"

using namespace hatemix;

namespace {

TweetRecord tweet(const std::string& text, const std::string& ts, std::optional<std::string> country) {
    return TweetRecord("id", text, parse_timestamp(ts), std::move(country));
}

// Random text from tokens that exercise every cleaning rule.
std::string random_ascii_text(Rng& rng) {
    static const std::vector<std::string> pieces = {
        "word", "Pride", "x", "_", "42", "http://a.b/c", "HTTPS://X.Y", "www.site.org/p?q=1",
        "wwwx", "http:", "#tag", "#", "##deep", "#_", "a#b", "!", "!!", "?", "...", ",", "'",
        "-", "--", "(", ")", ":", ";", " ", "  ", "\t", "\n", "email@x.io", "#1st", "ok!?"};
    std::string s;
    const auto n = 1 + uniform_index(rng, 14);
    for (std::uint64_t i = 0; i < n; ++i) s += pieces[uniform_index(rng, pieces.size())];
    return s;
}

std::string random_unicode_text(Rng& rng) {
    static const std::vector<std::string> pieces = {
        "नमस्ते", "मैं", "#भारत", "।", "।।", "தமிழ்", "#தமிழ்", "മലയാളം", "¡¡", "¿", "español",
        "ñ", "“", "”", "…", "——", "\xE2\x80\x8B", "😀", "😀😀", " ", "\xC2\xA0", "#x", "https://ex.in",
        "!!", "www.a.in"};
    std::string s;
    const auto n = 1 + uniform_index(rng, 12);
    for (std::uint64_t i = 0; i < n; ++i) s += pieces[uniform_index(rng, pieces.size())];
    return s;
}

// Oracle for ASCII output, independent of the library's scanners.
void check_ascii_oracle(const std::string& out) {
    static const std::regex link(R"((^|[^A-Za-z0-9_])(https?://|www\.))", std::regex::icase);
    static const std::regex hashtag(R"((^|[^A-Za-z0-9_])#[A-Za-z0-9_])");
    static const std::regex doubled_punct(R"(([[:punct:]])\1)");
    static const std::regex doubled_space(R"(\s\s)");
    static const std::regex edge_space(R"(^\s|\s$)");
    CHECK_FALSE(std::regex_search(out, link));
    CHECK_FALSE(std::regex_search(out, hashtag));
    CHECK_FALSE(std::regex_search(out, doubled_punct));
    CHECK_FALSE(std::regex_search(out, doubled_space));
    CHECK_FALSE(std::regex_search(out, edge_space));
}

}  // namespace

TEST_SUITE("corpus_ingest") {

TEST_CASE("cleaning fixtures") {
    CHECK(clean_text("Check https://t.co/abc now") == "Check now");
    CHECK(clean_text("see www.example.com/x?y=1 today") == "see today");
    CHECK(clean_text("#Pride month is here") == "month is here");
    CHECK(clean_text("love #LoveIsLove, always") == "love , always");
    CHECK(clean_text("wow!!! really??") == "wow! really?");
    CHECK(clean_text("a   b\t\tc\n") == "a b c");
    CHECK(clean_text("   padded   ") == "padded");
    CHECK(clean_text("mail me at me#home") == "mail me at me#home");
    CHECK(clean_text("# alone") == "# alone");
    CHECK(clean_text("नमस्ते #भारत ।। ठीक") == "नमस्ते । ठीक");
    CHECK(clean_text("x#https://a.b") == "x#");
    CHECK(clean_text("https://a.b#tag") == "");
    CHECK(clean_text("") == "");
}

TEST_CASE("cleaning reaches a fixed point") {
    // Removing a hashtag can bring two punctuation marks together.
    const auto once = clean_text("hi !#tag! there");
    CHECK(once == "hi ! there");
    CHECK(clean_text(once) == once);
    CHECK(clean_text("a , #x , b") == "a , , b");
}

TEST_CASE("cleaning properties over 10,000 random texts") {
    Rng rng = make_rng(20240611);
    for (int i = 0; i < 10000; ++i) {
        const bool ascii = i % 2 == 0;
        const std::string raw = ascii ? random_ascii_text(rng) : random_unicode_text(rng);
        const std::string out = clean_text(raw);
        CAPTURE(raw);
        CHECK(clean_text(out) == out);
        CHECK_FALSE(contains_hyperlink(out));
        CHECK_FALSE(contains_hashtag(out));
        CHECK_FALSE(contains_doubled_punctuation(out));
        CHECK_FALSE(contains_doubled_whitespace(out));
        if (ascii) check_ascii_oracle(out);
    }
}

TEST_CASE("length filter boundary at 50 code points") {
    CHECK_FALSE(length_filter(std::string(49, 'a')));
    CHECK(length_filter(std::string(50, 'a')));
    CHECK(length_filter(std::string(51, 'a')));
    std::string deva49, deva50;
    for (int i = 0; i < 49; ++i) deva49 += "क";
    deva50 = deva49 + "क";
    CHECK(deva49.size() == 147);
    CHECK_FALSE(length_filter(deva49));
    CHECK(length_filter(deva50));
    CHECK(length_filter("abc", 3));
    CHECK_FALSE(length_filter("", 1));
}

TEST_CASE("spatio-temporal window is inclusive") {
    const SpatioTemporalWindow w;
    CHECK(spatiotemporal_filter(tweet("x", "2019-01-01T00:00:00Z", "IN"), w));
    CHECK(spatiotemporal_filter(tweet("x", "2019-12-31T23:59:59Z", "IN"), w));
    CHECK_FALSE(spatiotemporal_filter(tweet("x", "2020-01-01T00:00:00Z", "IN"), w));
    CHECK_FALSE(spatiotemporal_filter(tweet("x", "2018-12-31T23:59:59Z", "IN"), w));
    CHECK_FALSE(spatiotemporal_filter(tweet("x", "2019-06-01T00:00:00Z", "US"), w));
    CHECK_FALSE(spatiotemporal_filter(tweet("x", "2019-06-01T00:00:00Z", std::nullopt), w));
    // 02:00 in India on New Year's Day is still 2018 in UTC.
    CHECK_FALSE(spatiotemporal_filter(tweet("x", "2019-01-01T02:00:00+05:30", "IN"), w));
}

TEST_CASE("timestamps") {
    CHECK(parse_timestamp("2019-03-04") == parse_timestamp("2019-03-04T00:00:00Z"));
    CHECK(parse_timestamp("2019-03-04T10:00:00+02:00") == parse_timestamp("2019-03-04T08:00:00Z"));
    CHECK_THROWS_AS(parse_timestamp("2019-13-01"), ConfigError);
    CHECK_THROWS_AS(parse_timestamp("yesterday"), ConfigError);
    CHECK(format_date(parse_date("2019-02-28")) == "2019-02-28");
}

TEST_CASE("tweet records validate their fields") {
    CHECK_THROWS_AS(TweetRecord("1", "", parse_timestamp("2019-01-01"), "IN"), ConfigError);
    const auto t = tweet("hello", "2019-01-01", "IN");
    CHECK_THROWS_AS(t.with_language("en", 1.5), ConfigError);
    CHECK_THROWS_AS(t.with_text(""), ConfigError);
    const auto l = t.with_language("en", 0.95);
    CHECK(*l.lang() == "en");
    CHECK(*l.lang_confidence() == doctest::Approx(0.95));
    CHECK_THROWS_AS(parse_tweet_json("{\"text\": 3}"), ConfigError);
    CHECK_THROWS_AS(parse_tweet_json("nope"), ConfigError);
    const auto p = parse_tweet_json(
        R"({"id": 7, "text": "hi", "timestamp": "2019-05-05T05:05:05Z", "country": null})");
    CHECK(p.id() == "7");
    CHECK_FALSE(p.country().has_value());
}

TEST_CASE("language detection") {
    const BuiltinLanguageDetector det;
    CHECK_THROWS_AS(detect_language(nullptr, "text"), DetectorUnavailable);
    CHECK_THROWS_AS(detect_language(&det, ""), UndecidableText);
    CHECK_THROWS_AS(detect_language(&det, "12345 !!!"), UndecidableText);
    const std::vector<std::pair<LanguageCondition, std::string>> cases = {
        {LanguageCondition::english, "en"}, {LanguageCondition::spanish, "es"},
        {LanguageCondition::hindi, "hi"},   {LanguageCondition::malayalam, "ml"},
        {LanguageCondition::tamil, "ta"}};
    for (const auto& [lang, code] : cases) {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto text = testing::synthetic_message(lang, seed);
            const auto g = detect_language(&det, text);
            CAPTURE(text);
            CHECK(g.code == code);
            CHECK(g.confidence >= kDefaultLanguageConfidence);
            CHECK(g.confidence <= 1.0);
        }
    }
    CHECK(detect_language(&det, "this is what they would have said about the people").code == "en");
    CHECK(detect_language(&det, "pero los chicos del barrio están muy contentos porque hay fiesta")
              .code == "es");
}

TEST_CASE("sampling is exact, seeded and without replacement") {
    std::vector<TweetRecord> records;
    for (int i = 0; i < 300; ++i) {
        const auto lang = i % 3 == 0 ? "ta" : "en";
        records.push_back(tweet("text " + std::to_string(i), "2019-02-02", "IN").with_language(lang, 0.99));
    }
    const auto a = sample_corpus(records, LanguageCondition::english, 150, 11);
    const auto b = sample_corpus(records, LanguageCondition::english, 150, 11);
    const auto c = sample_corpus(records, LanguageCondition::english, 150, 12);
    CHECK(a.texts.size() == 150);
    CHECK(a.texts == b.texts);
    CHECK(a.texts != c.texts);
    CHECK(std::set<std::string>(a.texts.begin(), a.texts.end()).size() == 150);
    CHECK(sample_corpus(records, LanguageCondition::english, 200, 1).texts.size() == 200);
    try {
        sample_corpus(records, LanguageCondition::english, 201, 1);
        FAIL("expected InsufficientData");
    } catch (const InsufficientData& e) {
        CHECK(e.available == 200);
        CHECK(e.requested == 201);
    }
    CHECK_THROWS_AS(sample_corpus(records, LanguageCondition::hindi, 1, 1), InsufficientData);
}

TEST_CASE("building corpora from a raw dump") {
    std::istringstream in(testing::synthetic_raw_dump(30, 5));
    BuildOptions opts;
    opts.sample_size = 25;
    opts.seed = 3;
    const BuiltinLanguageDetector det;
    const auto result = build_corpora(in, det, opts);
    CHECK(result.corpora.size() == 5);
    for (const auto& [lang, corpus] : result.corpora) {
        CHECK(corpus.language == lang);
        CHECK(corpus.texts.size() == 25);
        for (const auto& t : corpus.texts) {
            CAPTURE(t);
            CHECK(is_corpus_clean(t));
        }
        CHECK(std::set<std::string>(corpus.texts.begin(), corpus.texts.end()).size() == 25);
    }
    CHECK(result.cleaning.conserved());
    CHECK(result.cleaning.removed_short == 5);
    CHECK(result.ingest.malformed == 2);
    CHECK(result.ingest.outside_window == 10);
    CHECK(result.ingest.duplicates == 20);
    for (auto lang : kAllConditions) {
        CHECK(result.ingest.qualifying.at(std::string(to_string(lang))) == 30);
    }

    std::istringstream again(testing::synthetic_raw_dump(30, 5));
    const auto second = build_corpora(again, det, opts);
    CHECK(second.corpora.at(LanguageCondition::tamil).texts ==
          result.corpora.at(LanguageCondition::tamil).texts);
}

TEST_CASE("insufficient qualifying texts") {
    std::istringstream in(testing::synthetic_raw_dump(10, 5));
    BuildOptions opts;
    opts.sample_size = 11;
    const BuiltinLanguageDetector det;
    CHECK_THROWS_AS(build_corpora(in, det, opts), InsufficientData);
}

TEST_CASE("corpus persistence round trip") {
    testing::TempDir dir;
    RetrainCorpus c{LanguageCondition::malayalam, {"ഒന്ന്", "രണ്ട്"}, 9, "unit"};
    write_corpus(c, dir / "c.txt");
    const auto back = read_corpus(dir / "c.txt");
    CHECK(back.language == c.language);
    CHECK(back.texts == c.texts);
    CHECK(back.seed == 9);
    CHECK(back.provenance == "unit");
    CHECK_THROWS_AS(read_corpus(dir / "missing.txt"), ConfigError);
}

}  // TEST_SUITE
