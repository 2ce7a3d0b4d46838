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
#include <string>
#include <vector>

#include "hatemix/dataset.hpp"
#include "hatemix/trainer.hpp"

namespace hatemix::testing {

// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

// One message that the built-in detector assigns to `language` with high
// confidence: at least 60 code points, no links, hashtags or repeated
// punctuation.
std::string synthetic_message(LanguageCondition language, std::uint64_t seed);

// JSON-lines dump with `per_language` distinct qualifying messages for each
// of the five conditions (India, 2019), mixed with messages that every stage
// of the build must drop: too short, outside the window, foreign country,
// duplicates and malformed lines. Qualifying messages carry links and
// hashtags that cleaning removes.
std::string synthetic_raw_dump(std::size_t per_language, std::uint64_t seed);

// Native-script texts long enough to survive transliteration checks.
std::vector<std::string> synthetic_indic_texts(LanguageCondition language, std::size_t n,
                                               std::uint64_t seed);

struct SeparableSplits {
    LabeledDataset train;
    LabeledDataset validation;
    LabeledDataset test;
};

// Task A rows whose class is fixed by disjoint class vocabularies; shared
// filler words carry no signal. `total` rows are split 70/15/15 and the train
// split is imbalanced.
SeparableSplits separable_task_a(std::size_t total, std::uint64_t seed,
                                 LanguageCondition language = LanguageCondition::english);

void write_labeled_csv(const LabeledDataset& dataset, const std::filesystem::path& path);

// Writes train/validation/test CSVs in the pipeline's labelled-data layout.
SeparableSplits write_separable_fixture(const std::filesystem::path& labeled_dir,
                                        LanguageCondition language, std::size_t total,
                                        std::uint64_t seed);

// Backend with canned, seed-independent losses and placeholder artifacts.
class StubBackend : public TrainerBackend {
public:
    std::string id() const override { return "stub"; }
    bool supports_mlm() const override { return supports_mlm_; }
    ModelHandle pretrained() const override;
    void retrain_mlm(const ModelHandle& base, std::span<const std::string> texts,
                     const RetrainConfig& config, const std::filesystem::path& work_dir,
                     const EvalSink& sink) override;
    void finetune_classifier(const ModelHandle& encoder, std::span<const LabeledRow> train,
                             std::span<const LabeledRow> validation,
                             std::span<const std::string> labels, const FinetuneConfig& config,
                             const std::filesystem::path& work_dir,
                             const EvalSink& sink) override;
    std::vector<std::size_t> predict(const ClassifierHandle& classifier,
                                     std::span<const std::string> texts) override;

    bool supports_mlm_ = true;
    // Report a failure after this many eval records (negative: never).
    int fail_after = -1;
};

// Path of the built command-line tool.
std::filesystem::path cli_path();

// Runs the CLI with `args` (already shell-quoted) and returns its exit code.
// Output is captured into `output` when given.
int run_cli(const std::string& args, std::string* output = nullptr);

}  // namespace hatemix::testing
