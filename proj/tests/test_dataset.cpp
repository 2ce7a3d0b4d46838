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


#include <algorithm>
#include <fstream>
#include <map>

#include "doctest.h"
#include "hatemix/error.hpp"
#include "hatemix/dataset.hpp"
#include "hatemix/rng.hpp"
#include "support/fixtures.hpp"

using namespace hatemix;

namespace {

void write_file(const std::filesystem::path& p, const std::string& s) {
    std::ofstream(p, std::ios::binary) << s;
}

LabeledDataset dataset_with(const TaskSchema& schema, const std::vector<std::size_t>& counts) {
    LabeledDataset d;
    d.schema = schema;
    for (std::size_t c = 0; c < counts.size(); ++c) {
        for (std::size_t i = 0; i < counts[c]; ++i) {
            d.rows.push_back({schema.labels()[c] + " row " + std::to_string(i), schema.labels()[c]});
        }
    }
    return d;
}

// Multiset inclusion of `sub` in `super`.
bool sub_multiset(const std::vector<LabeledRow>& sub, const std::vector<LabeledRow>& super) {
    std::map<std::pair<std::string, std::string>, long> count;
    for (const auto& r : super) ++count[{r.text, r.label}];
    for (const auto& r : sub) {
        if (--count[{r.text, r.label}] < 0) return false;
    }
    return true;
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("canonical label sets") {
    CHECK(TaskSchema::task_a().labels() ==
          std::vector<std::string>{"homophobia", "non-anti-LGBT+", "transphobia"});
    CHECK(TaskSchema::task_b().labels().size() == 7);
    CHECK(TaskSchema::for_task(Task::B).contains("hope-speech"));
    CHECK_THROWS_AS(TaskSchema(Task::A, {"homophobia", "other"}, {}), ConfigError);
    CHECK_THROWS_AS(parse_task("C"), ConfigError);
    CHECK(parse_task("b") == Task::B);
}

TEST_CASE("label normalisation") {
    const auto& a = TaskSchema::task_a();
    CHECK(a.normalize("homophobia") == "homophobia");
    CHECK(a.normalize("  Homophobia ") == "homophobia");
    CHECK(a.normalize("H") == "homophobia");
    CHECK(a.normalize("Non-anti-LGBT+ content") == "non-anti-LGBT+");
    CHECK_FALSE(a.normalize("racism").has_value());
    CHECK(a.index_of("transphobia") == 2);
    CHECK_THROWS_AS(a.index_of("racism"), UnknownLabel);
    const auto& b = TaskSchema::task_b();
    CHECK(b.normalize("TD") == "transphobic-derogation");
    CHECK(b.normalize("None of the above") == "none-of-the-above");
}

TEST_CASE("schema files match the built-in schemas") {
    const auto dir = default_data_dir() / "schemas";
    CHECK(TaskSchema::load(dir / "task_a.json").same_labels(TaskSchema::task_a()));
    CHECK(TaskSchema::load(dir / "task_b.json").same_labels(TaskSchema::task_b()));
    CHECK_FALSE(TaskSchema::task_a().same_labels(TaskSchema::task_b()));
}

TEST_CASE("loading labelled CSV files") {
    testing::TempDir dir;
    write_file(dir / "ok.csv",
               "\xEF\xBB\xBFtext,category\n"
               "\"hello, world\",N\n"
               "\"two\nlines\",Homophobia\n"
               "\n"
               "plain,transphobia\n");
    const auto ds = load_labeled_csv(dir / "ok.csv", TaskSchema::task_a(), LanguageCondition::tamil);
    REQUIRE(ds.rows.size() == 3);
    CHECK(ds.rows[0] == LabeledRow{"hello, world", "non-anti-LGBT+"});
    CHECK(ds.rows[1] == LabeledRow{"two\nlines", "homophobia"});
    CHECK(ds.language == LanguageCondition::tamil);

    write_file(dir / "bad.csv", "text,category\na,N\nb,H\nc,racism\n");
    try {
        load_labeled_csv(dir / "bad.csv", TaskSchema::task_a(), LanguageCondition::english);
        FAIL("expected UnknownLabel");
    } catch (const UnknownLabel& e) {
        CHECK(e.raw == "racism");
        CHECK(e.row == 3);
    }

    write_file(dir / "cols.csv", "comment,label\na,N\n");
    CHECK_THROWS_AS(load_labeled_csv(dir / "cols.csv", TaskSchema::task_a(), LanguageCondition::english),
                    ConfigError);
    const auto custom = load_labeled_csv(dir / "cols.csv", TaskSchema::task_a(),
                                         LanguageCondition::english, Split::train, {"comment", "label"});
    CHECK(custom.rows.size() == 1);

    write_file(dir / "quote.csv", "text,category\n\"open,N\n");
    CHECK_THROWS_AS(load_labeled_csv(dir / "quote.csv", TaskSchema::task_a(), LanguageCondition::english),
                    MalformedCsv);
    write_file(dir / "empty.csv", "text,category\n");
    CHECK_THROWS_AS(load_labeled_csv(dir / "empty.csv", TaskSchema::task_a(), LanguageCondition::english),
                    ConfigError);
    CHECK_THROWS_AS(load_labeled_csv(dir / "none.csv", TaskSchema::task_a(), LanguageCondition::english),
                    ConfigError);
}

TEST_CASE("oversampling English task A") {
    const auto d = dataset_with(TaskSchema::task_a(), {179, 2978, 7});
    const auto o = oversample(d, 1);
    const auto c = class_counts(o);
    CHECK(c.at("homophobia") == 2978);
    CHECK(c.at("non-anti-LGBT+") == 2978);
    CHECK(c.at("transphobia") == 2978);
    CHECK(c.total == 8934);
    CHECK(std::equal(d.rows.begin(), d.rows.end(), o.rows.begin()));
    CHECK(sub_multiset(d.rows, o.rows));
    CHECK(oversample(d, 1).rows == o.rows);
    CHECK(oversample(d, 2).rows != o.rows);
}

TEST_CASE("oversampling balance property over random schemas") {
    Rng rng = make_rng(99);
    for (int i = 0; i < 100; ++i) {
        const auto& schema = i % 2 ? TaskSchema::task_b() : TaskSchema::task_a();
        std::vector<std::size_t> counts;
        for (std::size_t k = 0; k < schema.labels().size(); ++k) {
            counts.push_back(1 + uniform_index(rng, 60));
        }
        const auto d = dataset_with(schema, counts);
        const auto o = oversample(d, static_cast<std::uint64_t>(i));
        const auto max = *std::max_element(counts.begin(), counts.end());
        const auto c = class_counts(o);
        for (const auto& l : schema.labels()) CHECK(c.at(l) == max);
        CHECK(c.total == max * schema.labels().size());
        CHECK(std::equal(d.rows.begin(), d.rows.end(), o.rows.begin()));
        // Every added row copies an original row of the same class.
        CHECK(sub_multiset(std::vector<LabeledRow>(o.rows.begin() + static_cast<long>(d.rows.size()), o.rows.end()),
                           [&] {
                               std::vector<LabeledRow> many;
                               for (int rep = 0; rep < 60; ++rep) {
                                   many.insert(many.end(), d.rows.begin(), d.rows.end());
                               }
                               return many;
                           }()));
    }
}

TEST_CASE("oversampling edge cases") {
    const auto one = dataset_with(TaskSchema::task_a(), {0, 4, 0});
    try {
        oversample(one, 1);
        FAIL("expected EmptyClass");
    } catch (const EmptyClass& e) {
        CHECK(e.label == "homophobia");
    }
    const auto balanced = dataset_with(TaskSchema::task_a(), {3, 3, 3});
    CHECK(oversample(balanced, 5).rows == balanced.rows);
}

TEST_CASE("count validation") {
    const auto expected = load_expected_counts(default_data_dir() / "expected_counts.json");
    CHECK(expected.size() == 8);
    const auto& en = expected.at({Task::A, LanguageCondition::english});
    CHECK(en.at("homophobia") == 179);
    CHECK(en.total == 3164);

    auto counts = class_counts(dataset_with(TaskSchema::task_a(), {179, 2978, 7}));
    CHECK(validate_totals(counts, en).ok());
    counts = class_counts(dataset_with(TaskSchema::task_a(), {179, 2977, 7}));
    const auto r = validate_totals(counts, en);
    CHECK_FALSE(r.ok());
    REQUIRE(r.mismatches.size() == 2);
    CHECK(r.mismatches[0].label == "non-anti-LGBT+");
    CHECK(r.mismatches[0].expected == 2978);
    CHECK(r.mismatches[0].actual == 2977);
    CHECK(r.mismatches[1].label == "total");

    const auto b = validate_totals(counts, expected.at({Task::B, LanguageCondition::english}));
    CHECK(b.incomparable);
    CHECK_FALSE(b.ok());
}

TEST_CASE("dataset JSON-lines round trip") {
    testing::TempDir dir;
    auto d = dataset_with(TaskSchema::task_b(), {1, 2, 1, 1, 1, 1, 3});
    d.language = LanguageCondition::malayalam;
    d.split = Split::validation;
    write_dataset_jsonl(d, dir / "d.jsonl");
    const auto back = read_dataset_jsonl(dir / "d.jsonl", TaskSchema::task_b());
    CHECK(back.rows == d.rows);
    CHECK(back.language == d.language);
    CHECK(back.split == Split::validation);
}

}  // TEST_SUITE
