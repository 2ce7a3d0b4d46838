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
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "hatemix/dataset.hpp"
#include "hatemix/language.hpp"
#include "json.hpp"

namespace hatemix {

// cells[i][j] counts rows with gold label i predicted as label j.
struct ConfusionMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<std::size_t>> cells;
    std::size_t n = 0;

    std::size_t row_sum(std::size_t i) const;
    std::size_t col_sum(std::size_t j) const;
};

// Throws LengthMismatch, or UnknownLabel (1-based position) for a label
// outside the schema.
ConfusionMatrix confusion_matrix(std::span<const std::string> gold,
                                 std::span<const std::string> pred, const TaskSchema& schema);

struct ClassScore {
    std::string label;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
};

// 0/0 is taken as 0 for precision, recall and F1. Support is the gold count.
std::vector<ClassScore> per_class_prf(const ConfusionMatrix& matrix);

// Σ_c (support_c / n) · F1_c over classes with non-zero gold support.
// Throws EmptyInput when the matrix is empty.
double weighted_macro_f1(const ConfusionMatrix& matrix);
double weighted_macro_f1(std::span<const std::string> gold, std::span<const std::string> pred,
                         const TaskSchema& schema);

// Unweighted mean F1 over labels that occur in gold or predictions.
double unweighted_macro_f1(const ConfusionMatrix& matrix);

struct RunProvenance {
    ExperimentCondition condition = ExperimentCondition::baseline;
    LanguageCondition language = LanguageCondition::english;
    Task task = Task::A;
    std::string run_id;
};

struct EvalReport {
    RunProvenance provenance;
    std::vector<ClassScore> per_class;
    double weighted_macro_f1 = 0.0;
    double macro_f1 = 0.0;
    ConfusionMatrix matrix;
    // Built from a reported score alone (no predictions): per_class and matrix
    // are empty.
    bool summary_only = false;
};

EvalReport evaluate(std::span<const std::string> gold, std::span<const std::string> pred,
                    const TaskSchema& schema, RunProvenance provenance);
EvalReport report_from_score(RunProvenance provenance, double weighted_macro_f1);

nlohmann::json to_json(const EvalReport& report);
EvalReport eval_report_from_json(const nlohmann::json& j);

// Submission and display annotations that do not come from the scores.
struct TableAnnotations {
    std::map<LanguageCondition, ExperimentCondition> submitted;
    std::set<LanguageCondition> invalid;  // submitted run rejected by the organisers
    std::map<LanguageCondition, int> rank;
};

struct ComparisonRow {
    LanguageCondition language = LanguageCondition::english;
    std::map<ExperimentCondition, double> scores;
    std::optional<ExperimentCondition> submitted;
    bool invalid = false;
    std::optional<int> rank;
};

struct ComparisonTable {
    Task task = Task::A;
    std::vector<ExperimentCondition> columns;
    std::vector<ComparisonRow> rows;  // alphabetical by language name

    // Two-decimal display string for a cell: "-" when absent, "(x.xx)" for an
    // invalid submission; `bold` is set for the submitted condition.
    std::string display(const ComparisonRow& row, ExperimentCondition column, bool* bold) const;

    std::string to_text() const;
    std::string to_csv() const;
    std::string to_latex() const;
    nlohmann::json to_json() const;  // full precision
};

// Throws DuplicateCell, or ConfigError when reports mix tasks or are empty.
ComparisonTable comparison_table(std::span<const EvalReport> reports,
                                 const TableAnnotations& annotations = {});

enum class SubmissionFormat { id_label_csv, label_list };

SubmissionFormat parse_submission_format(std::string_view name);

struct SubmissionViolation {
    // 1-based line. A row-count problem points at the first surplus row or
    // just past the end of the file; 0 means the file could not be read.
    std::size_t line = 0;
    std::string kind;      // "row_count", "unknown_label", "empty_row", "malformed"
    std::string message;
};

struct SubmissionReport {
    std::size_t rows = 0;
    std::vector<SubmissionViolation> violations;

    bool ok() const { return violations.empty(); }
    std::string to_text() const;
};

// Never throws on content problems; a missing file is reported as a violation.
SubmissionReport validate_submission(const std::filesystem::path& pred_file,
                                     const TaskSchema& schema, std::size_t expected_n,
                                     SubmissionFormat format = SubmissionFormat::id_label_csv);

// Canonical labels of a valid submission. Throws ConfigError if invalid.
std::vector<std::string> read_submission(const std::filesystem::path& pred_file,
                                         const TaskSchema& schema,
                                         SubmissionFormat format = SubmissionFormat::id_label_csv);

void write_submission(const std::filesystem::path& path, std::span<const std::string> labels,
                      SubmissionFormat format = SubmissionFormat::id_label_csv);

}  // namespace hatemix
