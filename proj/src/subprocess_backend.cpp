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


// Backend that delegates every operation to an external worker process.
//
// For each call a request document is written to the work directory and the
// worker is started as `<command> <request.json>`. The worker reports on
// stdout, one JSON object per line:
//   {"event": "eval", "step": 500, "eval_loss": 1.23, "artifact_uri": "ckpt-500"}
//   {"event": "predictions", "indices": [0, 2, 1]}
//   {"event": "log", "message": "..."}
//   {"event": "error", "message": "..."}
// Other lines are copied to stderr. A non-zero exit status is a
// BackendFailure.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sys/wait.h>

#include "hatemix/error.hpp"
#include "hatemix/trainer.hpp"

namespace hatemix {

namespace fs = std::filesystem;

namespace {

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') {
            out += "'\\''";
        } else {
            out += c;
        }
    }
    return out + "'";
}

std::string resolve_uri(const ModelHandle& h) {
    return h.is_pretrained() ? h.artifact_uri : fs::absolute(h.resolved()).string();
}

void write_rows(const fs::path& path, std::span<const LabeledRow> rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw BackendFailure("cannot write " + path.string());
    for (const auto& r : rows) out << nlohmann::json{{"text", r.text}, {"label", r.label}}.dump() << '\n';
}

void write_texts(const fs::path& path, std::span<const std::string> texts) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw BackendFailure("cannot write " + path.string());
    for (const auto& t : texts) out << nlohmann::json(t).dump() << '\n';
}

class SubprocessBackend final : public TrainerBackend {
public:
    explicit SubprocessBackend(std::string command) : command_(std::move(command)) {
        if (const char* m = std::getenv("HATEMIX_HF_MODEL"); m && *m) model_ = m;
    }

    std::string id() const override { return "subprocess:" + command_; }
    bool supports_mlm() const override { return true; }

    ModelHandle pretrained() const override {
        ModelHandle h;
        h.backend_id = id();
        h.artifact_uri = "pretrained:" + model_;
        h.provenance = ExperimentCondition::baseline;
        return h;
    }

    void retrain_mlm(const ModelHandle& base, std::span<const std::string> texts,
                     const RetrainConfig& config, const fs::path& work_dir,
                     const EvalSink& sink) override {
        const fs::path dir = fs::absolute(work_dir);
        write_texts(dir / "mlm-texts.jsonl", texts);
        run(dir / "request-retrain.json",
            {{"op", "retrain_mlm"},
             {"base_model", resolve_uri(base)},
             {"work_dir", dir.string()},
             {"texts_file", "mlm-texts.jsonl"},
             {"config", config.to_json()}},
            &sink, nullptr);
    }

    void finetune_classifier(const ModelHandle& encoder, std::span<const LabeledRow> train,
                             std::span<const LabeledRow> validation,
                             std::span<const std::string> labels, const FinetuneConfig& config,
                             const fs::path& work_dir, const EvalSink& sink) override {
        const fs::path dir = fs::absolute(work_dir);
        write_rows(dir / "train.jsonl", train);
        write_rows(dir / "validation.jsonl", validation);
        run(dir / "request-finetune.json",
            {{"op", "finetune"},
             {"encoder", resolve_uri(encoder)},
             {"work_dir", dir.string()},
             {"train_file", "train.jsonl"},
             {"validation_file", "validation.jsonl"},
             {"labels", std::vector<std::string>(labels.begin(), labels.end())},
             {"config", config.to_json()}},
            &sink, nullptr);
    }

    std::vector<std::size_t> predict(const ClassifierHandle& classifier,
                                     std::span<const std::string> texts) override {
        const fs::path dir = fs::absolute(classifier.base_dir);
        write_texts(dir / "predict-texts.jsonl", texts);
        std::vector<std::size_t> out;
        run(dir / "request-predict.json",
            {{"op", "predict"},
             {"classifier", fs::absolute(classifier.resolved()).string()},
             {"work_dir", dir.string()},
             {"texts_file", "predict-texts.jsonl"},
             {"labels", classifier.labels}},
            nullptr, &out);
        return out;
    }

private:
    void run(const fs::path& request_path, const nlohmann::json& request, const EvalSink* sink,
             std::vector<std::size_t>* predictions) {
        {
            std::ofstream out(request_path, std::ios::binary | std::ios::trunc);
            if (!out) throw BackendFailure("cannot write " + request_path.string());
            out << request.dump(2) << '\n';
        }
        const std::string cmd = command_ + " " + shell_quote(request_path.string());
        FILE* pipe = popen(cmd.c_str(), "r");
        if (!pipe) throw BackendFailure("cannot start backend: " + cmd);

        std::string last_error;
        bool got_predictions = false;
        std::string line;
        char buf[4096];
        try {
            while (std::fgets(buf, sizeof buf, pipe)) {
                line += buf;
                if (line.empty() || line.back() != '\n') continue;
                line.pop_back();
                handle_line(line, sink, predictions, last_error, got_predictions);
                line.clear();
            }
            if (!line.empty()) handle_line(line, sink, predictions, last_error, got_predictions);
        } catch (...) {
            pclose(pipe);
            throw;
        }
        const int status = pclose(pipe);
        const int code = status == -1 ? -1 : (WIFEXITED(status) ? WEXITSTATUS(status) : 128);
        if (code != 0) {
            throw BackendFailure("backend exited with status " + std::to_string(code) +
                                 (last_error.empty() ? "" : ": " + last_error));
        }
        if (predictions && !got_predictions) {
            throw BackendFailure("backend reported no predictions");
        }
    }

    static void handle_line(const std::string& line, const EvalSink* sink,
                            std::vector<std::size_t>* predictions, std::string& last_error,
                            bool& got_predictions) {
        if (line.empty() || line.front() != '{') {
            std::cerr << line << '\n';
            return;
        }
        const auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            std::cerr << line << '\n';
            return;
        }
        const std::string event = j.value("event", std::string{});
        try {
            if (event == "eval") {
                if (!sink) throw BackendFailure("unexpected eval event");
                (*sink)(j.at("step").get<std::int64_t>(), j.at("eval_loss").get<double>(),
                        j.at("artifact_uri").get<std::string>());
            } else if (event == "predictions") {
                if (!predictions) throw BackendFailure("unexpected predictions event");
                *predictions = j.at("indices").get<std::vector<std::size_t>>();
                got_predictions = true;
            } else if (event == "error") {
                last_error = j.value("message", std::string{"unknown error"});
            } else if (event == "log") {
                std::cerr << j.value("message", std::string{}) << '\n';
            }
        } catch (const nlohmann::json::exception& e) {
            throw BackendFailure("bad backend event: " + line + " (" + e.what() + ")");
        }
    }

    std::string command_;
    std::string model_ = "xlm-roberta-base";
};

}  // namespace

std::unique_ptr<TrainerBackend> make_subprocess_backend(std::string command) {
    if (command.empty()) throw ConfigError("subprocess backend needs a command");
    return std::make_unique<SubprocessBackend>(std::move(command));
}

}  // namespace hatemix
