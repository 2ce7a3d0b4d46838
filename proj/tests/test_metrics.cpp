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


#include <cmath>
#include <fstream>

#include "doctest.h"
#include "hatemix/error.hpp"
#include "hatemix/metrics.hpp"
#include "hatemix/pipeline.hpp"
#include "hatemix/rng.hpp"
#include "support/fixtures.hpp"

using namespace hatemix;

namespace {

// Independent scorer: counts straight from the label pairs with the F1 form
// 2tp / (2tp + fp + fn).
double oracle_weighted_f1(const std::vector<std::string>& gold, const std::vector<std::string>& pred,
                          const std::vector<std::string>& labels) {
    long double total = 0;
    for (const auto& c : labels) {
        long tp = 0, fp = 0, fn = 0, support = 0;
        for (std::size_t i = 0; i < gold.size(); ++i) {
            if (gold[i] == c) ++support;
            if (gold[i] == c && pred[i] == c) ++tp;
            if (gold[i] != c && pred[i] == c) ++fp;
            if (gold[i] == c && pred[i] != c) ++fn;
        }
        if (support == 0) continue;
        const long double f1 = 2.0L * tp / (2.0L * tp + fp + fn);
        total += f1 * support / static_cast<long double>(gold.size());
    }
    return static_cast<double>(total);
}

void write_file(const std::filesystem::path& p, const std::string& s) {
    std::ofstream(p, std::ios::binary) << s;
}

const std::string H = "homophobia", N = "non-anti-LGBT+", T = "transphobia";

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("worked example") {
    const std::vector<std::string> gold = {N, N, H, T, N};
    const std::vector<std::string> pred = {N, H, H, T, N};
    const auto m = confusion_matrix(gold, pred, TaskSchema::task_a());
    CHECK(m.n == 5);
    CHECK(m.cells[1][0] == 1);
    const auto per = per_class_prf(m);
    CHECK(std::abs(per[0].f1 - 2.0 / 3.0) < 1e-12);
    CHECK(std::abs(per[1].f1 - 0.8) < 1e-12);
    CHECK(std::abs(per[2].f1 - 1.0) < 1e-12);
    CHECK(per[0].precision == doctest::Approx(0.5));
    CHECK(per[1].recall == doctest::Approx(2.0 / 3.0));
    // (1/5)(2/3) + (3/5)(4/5) + (1/5)(1) = 61/75
    CHECK(std::abs(weighted_macro_f1(m) - 61.0 / 75.0) < 1e-12);
}

TEST_CASE("weighted F1 agrees with a brute-force oracle") {
    Rng rng = make_rng(1234);
    for (int i = 0; i < 1000; ++i) {
        const auto& schema = i % 2 ? TaskSchema::task_b() : TaskSchema::task_a();
        const auto& labels = schema.labels();
        const auto n = 1 + uniform_index(rng, 200);
        std::vector<std::string> gold, pred;
        for (std::uint64_t k = 0; k < n; ++k) {
            gold.push_back(labels[uniform_index(rng, labels.size())]);
            // Mostly correct predictions with some noise.
            pred.push_back(uniform_index(rng, 3) ? gold.back()
                                                 : labels[uniform_index(rng, labels.size())]);
        }
        CHECK(std::abs(weighted_macro_f1(gold, pred, schema) -
                       oracle_weighted_f1(gold, pred, labels)) <= 1e-12);
    }
}

TEST_CASE("degenerate inputs") {
    const auto& a = TaskSchema::task_a();
    CHECK(weighted_macro_f1(std::vector<std::string>{N, N}, std::vector<std::string>{N, N}, a) == 1.0);
    CHECK(weighted_macro_f1(std::vector<std::string>{N, N}, std::vector<std::string>{H, T}, a) == 0.0);
    // A class predicted but absent from gold has zero weight ...
    const std::vector<std::string> gold = {N, N, N, H};
    const std::vector<std::string> pred = {N, N, T, H};
    const auto m = confusion_matrix(gold, pred, a);
    CHECK(weighted_macro_f1(m) == doctest::Approx(0.75 * 0.8 + 0.25 * 1.0));
    // ... but counts in the unweighted mean.
    CHECK(unweighted_macro_f1(m) == doctest::Approx((1.0 + 0.8 + 0.0) / 3.0));
    CHECK_THROWS_AS(confusion_matrix(std::vector<std::string>{N}, std::vector<std::string>{}, a),
                    LengthMismatch);
    CHECK_THROWS_AS(weighted_macro_f1(std::vector<std::string>{}, std::vector<std::string>{}, a),
                    EmptyInput);
    try {
        confusion_matrix(std::vector<std::string>{N, N}, std::vector<std::string>{N, "spam"}, a);
        FAIL("expected UnknownLabel");
    } catch (const UnknownLabel& e) {
        CHECK(e.row == 2);
    }
}

TEST_CASE("evaluation reports") {
    const std::vector<std::string> gold = {N, N, H, T, N};
    const std::vector<std::string> pred = {N, H, H, T, N};
    RunProvenance prov{ExperimentCondition::retrained, LanguageCondition::tamil, Task::A, "r1"};
    const auto r = evaluate(gold, pred, TaskSchema::task_a(), prov);
    CHECK(r.weighted_macro_f1 == doctest::Approx(61.0 / 75.0));
    const auto back = eval_report_from_json(to_json(r));
    CHECK(back.weighted_macro_f1 == r.weighted_macro_f1);
    CHECK(back.provenance.condition == ExperimentCondition::retrained);
    CHECK(back.provenance.run_id == "r1");
    CHECK(to_json(back) == to_json(r));
}

TEST_CASE("comparison tables") {
    std::vector<EvalReport> reports;
    auto add = [&](LanguageCondition l, ExperimentCondition c, double v) {
        reports.push_back(report_from_score({c, l, Task::B, ""}, v));
    };
    add(LanguageCondition::tamil, ExperimentCondition::baseline, 0.771);
    add(LanguageCondition::english, ExperimentCondition::retrained, 0.5449);
    add(LanguageCondition::english, ExperimentCondition::baseline, 0.15);
    TableAnnotations ann;
    ann.submitted[LanguageCondition::english] = ExperimentCondition::retrained;
    const auto t = comparison_table(reports, ann);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0].language == LanguageCondition::english);
    CHECK(t.columns == std::vector<ExperimentCondition>{ExperimentCondition::baseline,
                                                        ExperimentCondition::retrained});
    bool bold = false;
    CHECK(t.display(t.rows[0], ExperimentCondition::retrained, &bold) == "0.54");
    CHECK(bold);
    CHECK(t.display(t.rows[1], ExperimentCondition::retrained, &bold) == "-");
    CHECK(t.to_json()["rows"][0]["scores"]["retrained"].get<double>() == 0.5449);
    CHECK(t.to_csv().find("english,0.15,0.54,retrained,false,") != std::string::npos);

    add(LanguageCondition::english, ExperimentCondition::baseline, 0.2);
    CHECK_THROWS_AS(comparison_table(reports), DuplicateCell);
    CHECK_THROWS_AS(comparison_table(std::vector<EvalReport>{}), ConfigError);
    std::vector<EvalReport> mixed = {
        report_from_score({ExperimentCondition::baseline, LanguageCondition::tamil, Task::A, ""}, 0.5),
        report_from_score({ExperimentCondition::baseline, LanguageCondition::hindi, Task::B, ""}, 0.5)};
    CHECK_THROWS_AS(comparison_table(mixed), ConfigError);
}

TEST_CASE("published scores render as published") {
    const auto pub = load_published_scores(default_data_dir() / "published" / "task_a.json");
    const auto t = comparison_table(pub.reports, pub.annotations);
    const std::string expected =
        "\\begin{tabular}{lcccc}\n\\hline\n"
        "\\textbf{Language Condition} & \\textbf{Baseline} & \\textbf{Retrained} & "
        "\\textbf{Script-Mixed} & \\textbf{Rank}\\\\\n\\hline\n"
        "English & 0.93 & \\textbf{0.94} & - & 7 \\\\\n"
        "Hindi & 0.93 & 0.92 & \\textbf{0.97} & 3 \\\\\n"
        "Malayalam & 0.93 & 0.95 & \\textbf{0.94} & 4 \\\\\n"
        "Spanish & 0.83 & (0.86) & - & - \\\\\n"
        "Tamil & 0.70 & 0.93 & \\textbf{0.93} & 3 \\\\\n"
        "\\hline\n\\end{tabular}\n";
    CHECK(t.to_latex() == expected);
}

TEST_CASE("submission validation") {
    testing::TempDir dir;
    const auto& a = TaskSchema::task_a();
    write_submission(dir / "ok.csv", std::vector<std::string>{N, H, T});
    auto r = validate_submission(dir / "ok.csv", a, 3);
    CHECK(r.ok());
    CHECK(r.rows == 3);
    CHECK(read_submission(dir / "ok.csv", a) == std::vector<std::string>{N, H, T});

    write_file(dir / "bad.csv", "id,label\n1,N\n2,Homophobic\n3,T\n");
    r = validate_submission(dir / "bad.csv", a, 3);
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].line == 3);
    CHECK(r.violations[0].kind == "unknown_label");
    CHECK(r.to_text().find("line 3: [unknown_label]") != std::string::npos);
    CHECK_THROWS_AS(read_submission(dir / "bad.csv", a), ConfigError);

    r = validate_submission(dir / "ok.csv", a, 4);
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].kind == "row_count");
    CHECK(r.violations[0].line == 5);
    r = validate_submission(dir / "ok.csv", a, 2);
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].line == 4);

    write_file(dir / "gaps.csv", "id,label\n1,N\n\n3,a,b\n");
    r = validate_submission(dir / "gaps.csv", a, 1);
    REQUIRE(r.violations.size() == 2);
    CHECK(r.violations[0].line == 3);
    CHECK(r.violations[0].kind == "empty_row");
    CHECK(r.violations[1].line == 4);
    CHECK(r.violations[1].kind == "malformed");

    write_submission(dir / "list.txt", std::vector<std::string>{T, T}, SubmissionFormat::label_list);
    CHECK(validate_submission(dir / "list.txt", a, 2, SubmissionFormat::label_list).ok());

    r = validate_submission(dir / "missing.csv", a, 2);
    REQUIRE_FALSE(r.ok());
    CHECK(r.violations[0].line == 0);
}

}  // TEST_SUITE
