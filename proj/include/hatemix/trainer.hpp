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
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hatemix/corpus_ingest.hpp"
#include "hatemix/dataset.hpp"
#include "hatemix/language.hpp"
#include "hatemix/scriptmix.hpp"
#include "json.hpp"

namespace hatemix {

// Domain-adaptive masked-language-model retraining.
struct RetrainConfig {
    int epochs = 4;
    int eval_every_steps = 500;
    std::uint64_t seed = 0;
    std::string backend = "reference";
    int batch_size = 8;
    int max_seq_length = 512;
    double learning_rate = 4e-5;
    double mlm_probability = 0.15;

    // Throws ConfigError when epochs < 1, eval_every_steps < 1, or another
    // field is out of range.
    void validate() const;
    nlohmann::json to_json() const;
    // Missing keys keep their defaults; the result is validated.
    static RetrainConfig from_json(const nlohmann::json& j);
};

// Classifier fine-tuning. The optimiser is always AdamW (Adam moments with
// weight decay decoupled from the gradient step).
struct FinetuneConfig {
    int epochs = 8;
    int eval_every_steps = 500;
    std::string optimizer = "adamw";
    double learning_rate = 4e-5;
    double weight_decay = 0.01;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    int batch_size = 8;
    int max_seq_length = 512;
    std::uint64_t seed = 0;
    std::string backend = "reference";

    void validate() const;
    nlohmann::json to_json() const;
    static FinetuneConfig from_json(const nlohmann::json& j);
};

struct CheckpointRecord {
    std::int64_t step = 0;
    double eval_loss = 0.0;
    std::string artifact_uri;

    bool operator==(const CheckpointRecord&) const = default;
};

nlohmann::json to_json(const CheckpointRecord& r);
CheckpointRecord checkpoint_from_json(const nlohmann::json& j);

// Minimum eval_loss; ties go to the earliest step. Throws EmptyRunLog.
CheckpointRecord select_best_checkpoint(std::span<const CheckpointRecord> records);

// Pretrained or retrained encoder. `artifact_uri` is owned by the backend and
// is either "pretrained:<name>" or a path relative to `base_dir`.
struct ModelHandle {
    std::string backend_id;
    std::string artifact_uri;
    std::filesystem::path base_dir;
    ExperimentCondition provenance = ExperimentCondition::baseline;
    std::string source_corpus_id;
    std::optional<CheckpointRecord> best;

    bool is_pretrained() const { return artifact_uri.rfind("pretrained:", 0) == 0; }
    std::filesystem::path resolved() const { return base_dir / artifact_uri; }
};

struct ClassifierHandle {
    std::string backend_id;
    std::string artifact_uri;
    std::filesystem::path base_dir;
    ExperimentCondition provenance = ExperimentCondition::baseline;
    std::string source_corpus_id;
    LanguageCondition language = LanguageCondition::english;
    Task task = Task::A;
    std::vector<std::string> labels;
    ModelHandle encoder;
    std::optional<CheckpointRecord> best;

    std::filesystem::path resolved() const { return base_dir / artifact_uri; }
};

nlohmann::json to_json(const ModelHandle& h);
ModelHandle model_handle_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
nlohmann::json to_json(const ClassifierHandle& h);
ClassifierHandle classifier_handle_from_json(const nlohmann::json& j,
                                             const std::filesystem::path& base_dir);

// Called by a backend after every evaluation. `artifact_uri` is relative to
// the work directory the backend was given.
using EvalSink = std::function<void(std::int64_t step, double eval_loss,
                                    const std::string& artifact_uri)>;

// Contract every training backend implements. Backends own their artifacts;
// the orchestrator only stores the URIs they report.
class TrainerBackend {
public:
    virtual ~TrainerBackend() = default;

    virtual std::string id() const = 0;
    virtual bool supports_mlm() const = 0;
    // Handle of the untouched pretrained encoder (the baseline condition).
    virtual ModelHandle pretrained() const = 0;

    virtual void retrain_mlm(const ModelHandle& base, std::span<const std::string> texts,
                             const RetrainConfig& config, const std::filesystem::path& work_dir,
                             const EvalSink& sink) = 0;

    virtual void finetune_classifier(const ModelHandle& encoder,
                                     std::span<const LabeledRow> train,
                                     std::span<const LabeledRow> validation,
                                     std::span<const std::string> labels,
                                     const FinetuneConfig& config,
                                     const std::filesystem::path& work_dir,
                                     const EvalSink& sink) = 0;

    // One label index per text.
    virtual std::vector<std::size_t> predict(const ClassifierHandle& classifier,
                                             std::span<const std::string> texts) = 0;
};

// Creates a backend by id: "reference", or "subprocess:<command>". Throws
// ConfigError for anything else.
std::unique_ptr<TrainerBackend> make_backend(const std::string& id);

// Deterministic CPU backend: hashed bag-of-words features and multinomial
// logistic regression. Its "retraining" fits token statistics on the corpus.
std::unique_ptr<TrainerBackend> make_reference_backend();

// Runs `command <request.json>` for every operation and reads JSON-lines
// events from the child's stdout (see tools/hf_backend.py).
std::unique_ptr<TrainerBackend> make_subprocess_backend(std::string command);

// Files written in every stage directory.
inline constexpr const char* kConfigSnapshot = "config.json";
inline constexpr const char* kCheckpointLog = "checkpoints.jsonl";
inline constexpr const char* kHandleManifest = "handle.json";

std::vector<CheckpointRecord> read_checkpoint_log(const std::filesystem::path& path);

// Retrains `base` on the corpus inside `stage_dir` and returns the handle of
// the lowest-loss checkpoint. The config snapshot is written before training
// starts and every checkpoint record is flushed as soon as it is reported, so
// the log survives a BackendFailure. Throws EmptyCorpus.
ModelHandle retrain(TrainerBackend& backend, const RetrainCorpus& corpus, std::string corpus_id,
                    const RetrainConfig& config, const std::filesystem::path& stage_dir,
                    ExperimentCondition provenance = ExperimentCondition::retrained);
ModelHandle retrain(TrainerBackend& backend, const MixedCorpus& corpus, std::string corpus_id,
                    const RetrainConfig& config, const std::filesystem::path& stage_dir);

// Fine-tunes a classifier; the best checkpoint is chosen by validation loss.
// Throws SchemaMismatch when train and validation schemas differ.
ClassifierHandle finetune(TrainerBackend& backend, const ModelHandle& model,
                          const LabeledDataset& train, const LabeledDataset& validation,
                          const FinetuneConfig& config, const std::filesystem::path& stage_dir);

// Canonical labels, one per text.
std::vector<std::string> predict(TrainerBackend& backend, const ClassifierHandle& classifier,
                                 std::span<const std::string> texts);

}  // namespace hatemix
