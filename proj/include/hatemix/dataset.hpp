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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hatemix/language.hpp"
#include "json.hpp"

namespace hatemix {

enum class Task { A, B };

std::string_view to_string(Task task);
Task parse_task(std::string_view name);  // "A"/"B", case-insensitive; throws ConfigError

// Label set of a task plus the raw-string aliases accepted in data files.
class TaskSchema {
public:
    // Validates that the label set is the fixed canonical set of the task.
    TaskSchema(Task task, std::vector<std::string> labels,
               std::map<std::string, std::string> aliases);

    static const TaskSchema& task_a();
    static const TaskSchema& task_b();
    static const TaskSchema& for_task(Task task);
    // Reads {"task", "labels", "aliases"} from a JSON config file.
    static TaskSchema load(const std::filesystem::path& path);
    static TaskSchema from_json(const nlohmann::json& j);

    Task task() const { return task_; }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::map<std::string, std::string>& aliases() const { return aliases_; }

    bool contains(std::string_view canonical) const;
    std::size_t index_of(std::string_view canonical) const;  // throws UnknownLabel
    // Canonical label for a raw string: exact alias, then a case-insensitive
    // match, after trimming surrounding whitespace.
    std::optional<std::string> normalize(std::string_view raw) const;

    bool same_labels(const TaskSchema& other) const {
        return task_ == other.task_ && labels_ == other.labels_;
    }

private:
    Task task_;
    std::vector<std::string> labels_;
    std::map<std::string, std::string> aliases_;
};

enum class Split { train, validation, test };

std::string_view to_string(Split split);
Split parse_split(std::string_view name);

struct LabeledRow {
    std::string text;
    std::string label;  // canonical

    bool operator==(const LabeledRow&) const = default;
};

struct LabeledDataset {
    LanguageCondition language = LanguageCondition::english;
    TaskSchema schema = TaskSchema::task_a();
    Split split = Split::train;
    std::vector<LabeledRow> rows;
};

struct CsvColumns {
    std::string text = "text";
    std::string label = "category";
};

// Loads a labelled CSV, normalising every label through the schema's aliases.
// Throws UnknownLabel (row numbers are 1-based data rows), MalformedCsv, or
// ConfigError when the file is missing, lacks a column, or has no rows.
LabeledDataset load_labeled_csv(const std::filesystem::path& path, const TaskSchema& schema,
                                LanguageCondition language, Split split = Split::train,
                                const CsvColumns& columns = {});

struct ClassCounts {
    Task task = Task::A;
    std::vector<std::string> labels;  // schema order
    std::map<std::string, std::size_t> counts;
    std::size_t total = 0;

    std::size_t at(const std::string& label) const;
};

ClassCounts class_counts(const LabeledDataset& dataset);

// Random oversampling with replacement until every class has as many rows as
// the largest one. The output holds the original rows in order, followed by
// the drawn duplicates grouped by class in schema order. Throws EmptyClass.
LabeledDataset oversample(const LabeledDataset& dataset, std::uint64_t seed);

struct CountMismatch {
    std::string label;  // "total" for the grand total
    std::size_t expected = 0;
    std::size_t actual = 0;
};

struct TotalsReport {
    bool incomparable = false;
    std::string note;
    std::vector<CountMismatch> mismatches;

    bool ok() const { return !incomparable && mismatches.empty(); }
};

TotalsReport validate_totals(const ClassCounts& counts, const ClassCounts& expected);

// Expected per-label counts keyed by (task, language), as shipped in
// data/expected_counts.json.
using ExpectedCounts = std::map<std::pair<Task, LanguageCondition>, ClassCounts>;
ExpectedCounts load_expected_counts(const std::filesystem::path& path);
std::filesystem::path default_data_dir();

void write_dataset_jsonl(const LabeledDataset& dataset, const std::filesystem::path& path);
LabeledDataset read_dataset_jsonl(const std::filesystem::path& path, const TaskSchema& schema);

}  // namespace hatemix
