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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hatemix/corpus_ingest.hpp"
#include "hatemix/dataset.hpp"
#include "hatemix/language.hpp"
#include "hatemix/metrics.hpp"
#include "hatemix/scriptmix.hpp"
#include "hatemix/trainer.hpp"
#include "json.hpp"

namespace hatemix {

struct Seeds {
    std::uint64_t sampling = 0;
    std::uint64_t mixing = 0;
    std::uint64_t oversampling = 0;
    std::uint64_t training = 0;
};

// Everything a pipeline command needs. Values come from the defaults below,
// then a flat JSON config file, then environment variables, then flags.
//
// Run directory layout:
//   corpora/<language>.txt (+ .meta.json), corpora/<language>.mixed.txt
//   corpora/build_report.json
//   runs/task-<x>/<language>/<condition>/{config.json, run_log.jsonl,
//       retrain/, finetune/, predictions.csv, eval_report.json}
//   reports/task-<x>/table.{txt,csv,tex,json}
// Labelled data is read from <labeled_dir>/<language>/task-<x>/<split>.csv.
struct PipelineConfig {
    std::vector<LanguageCondition> languages{kAllConditions.begin(), kAllConditions.end()};
    Task task = Task::A;
    std::vector<ExperimentCondition> conditions{ExperimentCondition::baseline};
    Seeds seeds;

    std::filesystem::path raw_corpus;
    std::filesystem::path labeled_dir = "data/labeled";
    std::filesystem::path run_dir = "hatemix-run";
    std::filesystem::path schema_file;  // empty: built-in schema of the task
    std::string backend = "reference";

    std::size_t min_chars = kDefaultMinChars;
    double min_confidence = kDefaultLanguageConfidence;
    std::size_t sample_size = kDefaultSampleSize;
    double mix_ratio = kDefaultMixRatio;
    std::string country = "IN";
    std::string window_start = "2019-01-01";
    std::string window_end = "2019-12-31";
    bool drop_duplicates = true;

    RetrainConfig retrain;
    FinetuneConfig finetune;

    std::string text_column = "text";
    std::string label_column = "category";
    std::string eval_split = "test";
    SubmissionFormat submission_format = SubmissionFormat::id_label_csv;
    int jobs = 1;

    // Throws ConfigError. Script-mixed needs every language to be Indic.
    void validate() const;
    nlohmann::json to_json() const;
    TaskSchema schema() const;
};

// A settable configuration key; every key is also a command-line flag.
struct ConfigField {
    std::string name;
    std::string help;
    std::function<void(PipelineConfig&, const nlohmann::json&)> set;
    std::function<nlohmann::json(const PipelineConfig&)> get;
};

const std::vector<ConfigField>& config_fields();

// Applies a flat JSON object. Unknown keys are a ConfigError.
void apply_config_json(PipelineConfig& config, const nlohmann::json& flat);
void apply_config_file(PipelineConfig& config, const std::filesystem::path& path);
// HATEMIX_RUN_DIR and HATEMIX_BACKEND.
void apply_environment(PipelineConfig& config);

std::filesystem::path corpus_path(const PipelineConfig& config, LanguageCondition language);
std::filesystem::path mixed_corpus_path(const PipelineConfig& config, LanguageCondition language);
std::filesystem::path labeled_path(const PipelineConfig& config, LanguageCondition language,
                                   Split split);
std::filesystem::path job_dir(const PipelineConfig& config, LanguageCondition language,
                              ExperimentCondition condition);
std::filesystem::path report_dir(const PipelineConfig& config);

struct BuildCorpusOutcome {
    BuildResult result;
    std::map<LanguageCondition, std::filesystem::path> corpora;
    std::map<LanguageCondition, std::filesystem::path> mixed;
};

// clean → filter → detect → sample, then writes the corpora and a build
// report. With `mix_ratio`, also writes a mixed corpus for each Indic language.
BuildCorpusOutcome cmd_build_corpus(const PipelineConfig& config,
                                    std::optional<double> mix_ratio, std::ostream& log);

// Mixed corpora from previously built corpora of the configured languages.
std::map<LanguageCondition, std::filesystem::path> cmd_mix(const PipelineConfig& config,
                                                           std::ostream& log);

struct TrainedRun {
    LanguageCondition language = LanguageCondition::english;
    ExperimentCondition condition = ExperimentCondition::baseline;
    std::filesystem::path dir;
    ClassifierHandle classifier;
};

// One job per (language, condition); up to `config.jobs` run concurrently.
// The baseline condition fine-tunes the pretrained encoder directly. Only the
// train split is oversampled.
std::vector<TrainedRun> cmd_train(const PipelineConfig& config, std::ostream& log);

struct EvaluateOutcome {
    std::vector<EvalReport> reports;
    ComparisonTable table;
};

// Predicts, validates and scores every trained run of the task, then writes
// the comparison table. Throws ConfigError("nothing to evaluate ...") when no
// run exists.
EvaluateOutcome cmd_evaluate(const PipelineConfig& config, std::ostream& log);

// Published or externally computed scores:
//   {"task": "A", "scores": {"english": {"baseline": 0.93, ...}},
//    "submitted": {"english": "retrained"}, "invalid": ["spanish"],
//    "rank": {"english": 7}}
struct PublishedScores {
    std::vector<EvalReport> reports;
    TableAnnotations annotations;
};

PublishedScores load_published_scores(const std::filesystem::path& path);

// Table from a published-scores file, or from the eval reports in the run
// directory when `scores_file` is empty.
ComparisonTable cmd_report(const PipelineConfig& config,
                           const std::filesystem::path& scores_file);

enum class TableFormat { text, csv, latex, json };
TableFormat parse_table_format(std::string_view name);
std::string render(const ComparisonTable& table, TableFormat format);

}  // namespace hatemix
