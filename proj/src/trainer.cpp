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


#include "hatemix/trainer.hpp"

#include <fstream>
#include <utility>

#include "hatemix/error.hpp"

namespace hatemix {

namespace fs = std::filesystem;

namespace {

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string("bad value for \"") + key + "\": " + j.at(key).dump());
    }
}

void require_positive(int value, const char* name) {
    if (value < 1) {
        throw ConfigError(std::string(name) + " must be >= 1, got " + std::to_string(value));
    }
}

void write_json_file(const fs::path& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

// Appends every reported checkpoint to the log and flushes it at once, so a
// crash leaves all earlier records on disk.
class CheckpointLogWriter {
public:
    explicit CheckpointLogWriter(const fs::path& path)
        : out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw ConfigError("cannot write " + path.string());
    }

    void append(std::int64_t step, double eval_loss, const std::string& uri) {
        if (!records_.empty() && step <= records_.back().step) {
            throw BackendFailure("checkpoint steps must increase: " + std::to_string(step) +
                                 " after " + std::to_string(records_.back().step));
        }
        if (step < 1) throw BackendFailure("checkpoint step must be positive");
        if (!(eval_loss >= 0.0)) {
            throw BackendFailure("eval loss must be a non-negative number at step " +
                                 std::to_string(step));
        }
        CheckpointRecord r{step, eval_loss, uri};
        out_ << to_json(r).dump() << '\n';
        out_.flush();
        records_.push_back(std::move(r));
    }

    const std::vector<CheckpointRecord>& records() const { return records_; }

private:
    std::ofstream out_;
    std::vector<CheckpointRecord> records_;
};

// Runs a backend call, turning stray exceptions into BackendFailure while
// letting library errors through unchanged.
template <typename F>
void run_backend(F&& f) {
    try {
        f();
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw BackendFailure(e.what());
    }
}

fs::path absolute_dir(const fs::path& p) { return fs::weakly_canonical(fs::absolute(p)); }

}  // namespace

void RetrainConfig::validate() const {
    require_positive(epochs, "epochs");
    require_positive(eval_every_steps, "eval_every_steps");
    require_positive(batch_size, "batch_size");
    require_positive(max_seq_length, "max_seq_length");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (!(mlm_probability > 0.0 && mlm_probability < 1.0)) {
        throw ConfigError("mlm_probability must lie in (0, 1)");
    }
    if (backend.empty()) throw ConfigError("backend id is empty");
}

nlohmann::json RetrainConfig::to_json() const {
    return {{"epochs", epochs},
            {"eval_every_steps", eval_every_steps},
            {"seed", seed},
            {"backend", backend},
            {"batch_size", batch_size},
            {"max_seq_length", max_seq_length},
            {"learning_rate", learning_rate},
            {"mlm_probability", mlm_probability}};
}

RetrainConfig RetrainConfig::from_json(const nlohmann::json& j) {
    RetrainConfig c;
    read_field(j, "epochs", c.epochs);
    read_field(j, "eval_every_steps", c.eval_every_steps);
    read_field(j, "seed", c.seed);
    read_field(j, "backend", c.backend);
    read_field(j, "batch_size", c.batch_size);
    read_field(j, "max_seq_length", c.max_seq_length);
    read_field(j, "learning_rate", c.learning_rate);
    read_field(j, "mlm_probability", c.mlm_probability);
    c.validate();
    return c;
}

void FinetuneConfig::validate() const {
    require_positive(epochs, "epochs");
    require_positive(eval_every_steps, "eval_every_steps");
    require_positive(batch_size, "batch_size");
    require_positive(max_seq_length, "max_seq_length");
    if (optimizer != "adamw") throw ConfigError("unsupported optimizer: " + optimizer);
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (!(weight_decay >= 0.0)) throw ConfigError("weight_decay must be non-negative");
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
        throw ConfigError("adam betas must lie in [0, 1)");
    }
    if (!(adam_epsilon > 0.0)) throw ConfigError("adam_epsilon must be positive");
    if (backend.empty()) throw ConfigError("backend id is empty");
}

nlohmann::json FinetuneConfig::to_json() const {
    return {{"epochs", epochs},
            {"eval_every_steps", eval_every_steps},
            {"optimizer", optimizer},
            {"learning_rate", learning_rate},
            {"weight_decay", weight_decay},
            {"adam_beta1", adam_beta1},
            {"adam_beta2", adam_beta2},
            {"adam_epsilon", adam_epsilon},
            {"batch_size", batch_size},
            {"max_seq_length", max_seq_length},
            {"seed", seed},
            {"backend", backend}};
}

FinetuneConfig FinetuneConfig::from_json(const nlohmann::json& j) {
    FinetuneConfig c;
    read_field(j, "epochs", c.epochs);
    read_field(j, "eval_every_steps", c.eval_every_steps);
    read_field(j, "optimizer", c.optimizer);
    read_field(j, "learning_rate", c.learning_rate);
    read_field(j, "weight_decay", c.weight_decay);
    read_field(j, "adam_beta1", c.adam_beta1);
    read_field(j, "adam_beta2", c.adam_beta2);
    read_field(j, "adam_epsilon", c.adam_epsilon);
    read_field(j, "batch_size", c.batch_size);
    read_field(j, "max_seq_length", c.max_seq_length);
    read_field(j, "seed", c.seed);
    read_field(j, "backend", c.backend);
    c.validate();
    return c;
}

nlohmann::json to_json(const CheckpointRecord& r) {
    return {{"step", r.step}, {"eval_loss", r.eval_loss}, {"artifact_uri", r.artifact_uri}};
}

CheckpointRecord checkpoint_from_json(const nlohmann::json& j) {
    try {
        return {j.at("step").get<std::int64_t>(), j.at("eval_loss").get<double>(),
                j.at("artifact_uri").get<std::string>()};
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad checkpoint record: ") + e.what());
    }
}

CheckpointRecord select_best_checkpoint(std::span<const CheckpointRecord> records) {
    if (records.empty()) throw EmptyRunLog();
    const CheckpointRecord* best = &records.front();
    for (const auto& r : records) {
        if (r.eval_loss < best->eval_loss ||
            (r.eval_loss == best->eval_loss && r.step < best->step)) {
            best = &r;
        }
    }
    return *best;
}

std::vector<CheckpointRecord> read_checkpoint_log(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read checkpoint log " + path.string());
    std::vector<CheckpointRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            out.push_back(checkpoint_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("bad checkpoint log line in " + path.string() + ": " + e.what());
        }
    }
    return out;
}

nlohmann::json to_json(const ModelHandle& h) {
    nlohmann::json j = {{"backend", h.backend_id},
                        {"artifact_uri", h.artifact_uri},
                        {"provenance", std::string(to_string(h.provenance))},
                        {"source_corpus_id", h.source_corpus_id}};
    if (h.best) j["best_checkpoint"] = to_json(*h.best);
    return j;
}

ModelHandle model_handle_from_json(const nlohmann::json& j, const fs::path& base_dir) {
    try {
        ModelHandle h;
        h.backend_id = j.at("backend").get<std::string>();
        h.artifact_uri = j.at("artifact_uri").get<std::string>();
        h.base_dir = base_dir;
        h.provenance = parse_experiment_condition(j.at("provenance").get<std::string>());
        h.source_corpus_id = j.value("source_corpus_id", std::string{});
        if (j.contains("best_checkpoint")) h.best = checkpoint_from_json(j["best_checkpoint"]);
        return h;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad model handle: ") + e.what());
    }
}

nlohmann::json to_json(const ClassifierHandle& h) {
    nlohmann::json encoder = to_json(h.encoder);
    // The encoder lives in another stage directory; keep the link relative
    // so that a run directory can be moved as a whole.
    if (!h.encoder.is_pretrained() && !h.encoder.base_dir.empty() && !h.base_dir.empty()) {
        encoder["base"] =
            absolute_dir(h.encoder.base_dir).lexically_relative(absolute_dir(h.base_dir)).generic_string();
    }
    nlohmann::json j = {{"backend", h.backend_id},
                        {"artifact_uri", h.artifact_uri},
                        {"provenance", std::string(to_string(h.provenance))},
                        {"source_corpus_id", h.source_corpus_id},
                        {"language", std::string(to_string(h.language))},
                        {"task", std::string(to_string(h.task))},
                        {"labels", h.labels},
                        {"encoder", encoder}};
    if (h.best) j["best_checkpoint"] = to_json(*h.best);
    return j;
}

ClassifierHandle classifier_handle_from_json(const nlohmann::json& j, const fs::path& base_dir) {
    try {
        ClassifierHandle h;
        h.backend_id = j.at("backend").get<std::string>();
        h.artifact_uri = j.at("artifact_uri").get<std::string>();
        h.base_dir = base_dir;
        h.provenance = parse_experiment_condition(j.at("provenance").get<std::string>());
        h.source_corpus_id = j.value("source_corpus_id", std::string{});
        h.language = require_condition(j.at("language").get<std::string>());
        h.task = parse_task(j.at("task").get<std::string>());
        h.labels = j.at("labels").get<std::vector<std::string>>();
        const auto& enc = j.at("encoder");
        fs::path enc_base = base_dir;
        if (enc.contains("base")) enc_base = base_dir / enc["base"].get<std::string>();
        h.encoder = model_handle_from_json(enc, enc_base.lexically_normal());
        if (j.contains("best_checkpoint")) h.best = checkpoint_from_json(j["best_checkpoint"]);
        return h;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad classifier handle: ") + e.what());
    }
}

std::unique_ptr<TrainerBackend> make_backend(const std::string& id) {
    if (id == "reference") return make_reference_backend();
    const std::string prefix = "subprocess:";
    if (id.rfind(prefix, 0) == 0 && id.size() > prefix.size()) {
        return make_subprocess_backend(id.substr(prefix.size()));
    }
    throw ConfigError("unknown backend: \"" + id + "\"");
}

ModelHandle retrain(TrainerBackend& backend, const RetrainCorpus& corpus, std::string corpus_id,
                    const RetrainConfig& config, const fs::path& stage_dir,
                    ExperimentCondition provenance) {
    config.validate();
    if (corpus.texts.empty()) throw EmptyCorpus();
    if (provenance == ExperimentCondition::baseline) {
        throw ConfigError("a retrained model cannot carry baseline provenance");
    }
    if (!backend.supports_mlm()) {
        throw ConfigError("backend " + backend.id() + " has no masked-language-model objective");
    }
    fs::create_directories(stage_dir);
    const ModelHandle base = backend.pretrained();
    write_json_file(stage_dir / kConfigSnapshot,
                    {{"stage", "retrain"},
                     {"backend", backend.id()},
                     {"base_model", base.artifact_uri},
                     {"provenance", std::string(to_string(provenance))},
                     {"source_corpus_id", corpus_id},
                     {"corpus_language", std::string(to_string(corpus.language))},
                     {"corpus_size", corpus.texts.size()},
                     {"corpus_seed", corpus.seed},
                     {"config", config.to_json()}});

    CheckpointLogWriter log(stage_dir / kCheckpointLog);
    run_backend([&] {
        backend.retrain_mlm(base, corpus.texts, config, stage_dir,
                            [&](std::int64_t step, double loss, const std::string& uri) {
                                log.append(step, loss, uri);
                            });
    });

    const CheckpointRecord best = select_best_checkpoint(log.records());
    ModelHandle handle;
    handle.backend_id = backend.id();
    handle.artifact_uri = best.artifact_uri;
    handle.base_dir = stage_dir;
    handle.provenance = provenance;
    handle.source_corpus_id = std::move(corpus_id);
    handle.best = best;
    write_json_file(stage_dir / kHandleManifest, to_json(handle));
    return handle;
}

ModelHandle retrain(TrainerBackend& backend, const MixedCorpus& corpus, std::string corpus_id,
                    const RetrainConfig& config, const fs::path& stage_dir) {
    return retrain(backend, corpus.as_corpus(), std::move(corpus_id), config, stage_dir,
                   ExperimentCondition::script_mixed);
}

ClassifierHandle finetune(TrainerBackend& backend, const ModelHandle& model,
                          const LabeledDataset& train, const LabeledDataset& validation,
                          const FinetuneConfig& config, const fs::path& stage_dir) {
    config.validate();
    if (!train.schema.same_labels(validation.schema)) {
        throw SchemaMismatch("train schema (task " + std::string(to_string(train.schema.task())) +
                             ") differs from validation schema (task " +
                             std::string(to_string(validation.schema.task())) + ")");
    }
    if (train.language != validation.language) {
        throw SchemaMismatch("train and validation sets are for different languages");
    }
    if (train.rows.empty()) throw ConfigError("training set is empty");
    if (validation.rows.empty()) throw ConfigError("validation set is empty");
    if (model.backend_id != backend.id()) {
        throw ConfigError("model was produced by backend " + model.backend_id + ", not " +
                          backend.id());
    }
    fs::create_directories(stage_dir);
    const auto& labels = train.schema.labels();
    write_json_file(stage_dir / kConfigSnapshot,
                    {{"stage", "finetune"},
                     {"backend", backend.id()},
                     {"encoder", to_json(model)},
                     {"language", std::string(to_string(train.language))},
                     {"task", std::string(to_string(train.schema.task()))},
                     {"labels", labels},
                     {"train_rows", train.rows.size()},
                     {"validation_rows", validation.rows.size()},
                     {"config", config.to_json()}});

    CheckpointLogWriter log(stage_dir / kCheckpointLog);
    run_backend([&] {
        backend.finetune_classifier(model, train.rows, validation.rows, labels, config, stage_dir,
                                    [&](std::int64_t step, double loss, const std::string& uri) {
                                        log.append(step, loss, uri);
                                    });
    });

    const CheckpointRecord best = select_best_checkpoint(log.records());
    ClassifierHandle handle;
    handle.backend_id = backend.id();
    handle.artifact_uri = best.artifact_uri;
    handle.base_dir = stage_dir;
    handle.provenance = model.provenance;
    handle.source_corpus_id = model.source_corpus_id;
    handle.language = train.language;
    handle.task = train.schema.task();
    handle.labels = labels;
    handle.encoder = model;
    handle.best = best;
    write_json_file(stage_dir / kHandleManifest, to_json(handle));
    return handle;
}

std::vector<std::string> predict(TrainerBackend& backend, const ClassifierHandle& classifier,
                                 std::span<const std::string> texts) {
    if (texts.empty()) return {};
    if (classifier.labels.empty()) throw ConfigError("classifier has no labels");
    std::vector<std::size_t> idx;
    run_backend([&] { idx = backend.predict(classifier, texts); });
    if (idx.size() != texts.size()) {
        throw BackendFailure("backend returned " + std::to_string(idx.size()) +
                             " predictions for " + std::to_string(texts.size()) + " texts");
    }
    std::vector<std::string> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) {
        if (i >= classifier.labels.size()) {
            throw BackendFailure("backend predicted label index " + std::to_string(i) +
                                 " outside the schema");
        }
        out.push_back(classifier.labels[i]);
    }
    return out;
}

}  // namespace hatemix
