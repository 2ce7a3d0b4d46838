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


#include "hatemix/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "hatemix/error.hpp"
#include "hatemix/language_detector.hpp"

namespace hatemix {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// Flag values arrive as strings, config files carry typed JSON; the
// converters accept both.
std::string as_string(const json& j, const std::string& key) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number() || j.is_boolean()) return j.dump();
    throw ConfigError("\"" + key + "\" must be a string");
}

long long as_integer(const json& j, const std::string& key) {
    if (j.is_number_integer() || j.is_number_unsigned()) return j.get<long long>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        std::size_t pos = 0;
        try {
            const long long v = std::stoll(s, &pos);
            if (pos == s.size()) return v;
        } catch (const std::exception&) {
        }
    }
    throw ConfigError("\"" + key + "\" must be an integer, got " + j.dump());
}

std::uint64_t as_seed(const json& j, const std::string& key) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    const long long v = as_integer(j, key);
    if (v < 0) throw ConfigError("\"" + key + "\" must be non-negative");
    return static_cast<std::uint64_t>(v);
}

std::size_t as_count(const json& j, const std::string& key) {
    const long long v = as_integer(j, key);
    if (v < 0) throw ConfigError("\"" + key + "\" must be non-negative");
    return static_cast<std::size_t>(v);
}

int as_int(const json& j, const std::string& key) {
    const long long v = as_integer(j, key);
    if (v < INT32_MIN || v > INT32_MAX) throw ConfigError("\"" + key + "\" is out of range");
    return static_cast<int>(v);
}

double as_real(const json& j, const std::string& key) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        std::size_t pos = 0;
        try {
            const double v = std::stod(s, &pos);
            if (pos == s.size()) return v;
        } catch (const std::exception&) {
        }
    }
    throw ConfigError("\"" + key + "\" must be a number, got " + j.dump());
}

bool as_bool(const json& j, const std::string& key) {
    if (j.is_boolean()) return j.get<bool>();
    if (j.is_string()) {
        const auto s = lower(j.get<std::string>());
        if (s == "true" || s == "1" || s == "yes") return true;
        if (s == "false" || s == "0" || s == "no") return false;
    }
    throw ConfigError("\"" + key + "\" must be true or false, got " + j.dump());
}

std::vector<std::string> as_list(const json& j, const std::string& key) {
    std::vector<std::string> out;
    if (j.is_array()) {
        for (const auto& e : j) out.push_back(as_string(e, key));
    } else {
        std::stringstream ss(as_string(j, key));
        std::string item;
        while (std::getline(ss, item, ',')) {
            item.erase(0, item.find_first_not_of(" \t"));
            item.erase(item.find_last_not_of(" \t") + 1);
            if (!item.empty()) out.push_back(item);
        }
    }
    if (out.empty()) throw ConfigError("\"" + key + "\" must not be empty");
    return out;
}

template <typename T>
void dedupe(std::vector<T>& v) {
    std::vector<T> out;
    for (const auto& x : v) {
        if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
    }
    v = std::move(out);
}

std::string format_name(SubmissionFormat f) {
    return f == SubmissionFormat::id_label_csv ? "id_label_csv" : "label_list";
}

std::string task_dir_name(Task t) { return "task-" + lower(std::string(to_string(t))); }

std::vector<ConfigField> build_fields() {
    std::vector<ConfigField> f;
    auto add = [&](std::string name, std::string help, auto set, auto get) {
        f.push_back({std::move(name), std::move(help), set, get});
    };
    using C = PipelineConfig;

    add("languages", "language conditions, comma separated",
        [](C& c, const json& j) {
            c.languages.clear();
            for (const auto& s : as_list(j, "languages")) c.languages.push_back(require_condition(s));
            dedupe(c.languages);
        },
        [](const C& c) {
            json a = json::array();
            for (auto l : c.languages) a.push_back(std::string(to_string(l)));
            return a;
        });
    add("task", "A or B", [](C& c, const json& j) { c.task = parse_task(as_string(j, "task")); },
        [](const C& c) { return json(std::string(to_string(c.task))); });
    add("conditions", "baseline, retrained, script-mixed (comma separated)",
        [](C& c, const json& j) {
            c.conditions.clear();
            for (const auto& s : as_list(j, "conditions")) {
                c.conditions.push_back(parse_experiment_condition(s));
            }
            dedupe(c.conditions);
        },
        [](const C& c) {
            json a = json::array();
            for (auto x : c.conditions) a.push_back(std::string(to_string(x)));
            return a;
        });
    add("seed", "sets all four seeds",
        [](C& c, const json& j) {
            const auto s = as_seed(j, "seed");
            c.seeds = {s, s, s, s};
        },
        [](const C&) { return json(); });
    add("sampling_seed", "corpus sampling seed",
        [](C& c, const json& j) { c.seeds.sampling = as_seed(j, "sampling_seed"); },
        [](const C& c) { return json(c.seeds.sampling); });
    add("mixing_seed", "script-mix seed",
        [](C& c, const json& j) { c.seeds.mixing = as_seed(j, "mixing_seed"); },
        [](const C& c) { return json(c.seeds.mixing); });
    add("oversampling_seed", "oversampling seed",
        [](C& c, const json& j) { c.seeds.oversampling = as_seed(j, "oversampling_seed"); },
        [](const C& c) { return json(c.seeds.oversampling); });
    add("training_seed", "retraining and fine-tuning seed",
        [](C& c, const json& j) { c.seeds.training = as_seed(j, "training_seed"); },
        [](const C& c) { return json(c.seeds.training); });
    add("raw_corpus", "raw JSON-lines message dump",
        [](C& c, const json& j) { c.raw_corpus = as_string(j, "raw_corpus"); },
        [](const C& c) { return json(c.raw_corpus.generic_string()); });
    add("labeled_dir", "directory of labelled CSV splits",
        [](C& c, const json& j) { c.labeled_dir = as_string(j, "labeled_dir"); },
        [](const C& c) { return json(c.labeled_dir.generic_string()); });
    add("run_dir", "run directory",
        [](C& c, const json& j) { c.run_dir = as_string(j, "run_dir"); },
        [](const C& c) { return json(c.run_dir.generic_string()); });
    add("schema_file", "task schema JSON (default: built-in)",
        [](C& c, const json& j) { c.schema_file = as_string(j, "schema_file"); },
        [](const C& c) { return json(c.schema_file.generic_string()); });
    add("backend", "training backend: reference or subprocess:<command>",
        [](C& c, const json& j) { c.backend = as_string(j, "backend"); },
        [](const C& c) { return json(c.backend); });
    add("min_chars", "minimum text length in code points",
        [](C& c, const json& j) { c.min_chars = as_count(j, "min_chars"); },
        [](const C& c) { return json(c.min_chars); });
    add("min_confidence", "minimum language-detection confidence",
        [](C& c, const json& j) { c.min_confidence = as_real(j, "min_confidence"); },
        [](const C& c) { return json(c.min_confidence); });
    add("sample_size", "texts sampled per language",
        [](C& c, const json& j) { c.sample_size = as_count(j, "sample_size"); },
        [](const C& c) { return json(c.sample_size); });
    add("mix_ratio", "share of texts transliterated by script mixing",
        [](C& c, const json& j) { c.mix_ratio = as_real(j, "mix_ratio"); },
        [](const C& c) { return json(c.mix_ratio); });
    add("country", "origin country code of the corpus",
        [](C& c, const json& j) { c.country = as_string(j, "country"); },
        [](const C& c) { return json(c.country); });
    add("window_start", "first day of the corpus window (YYYY-MM-DD)",
        [](C& c, const json& j) { c.window_start = as_string(j, "window_start"); },
        [](const C& c) { return json(c.window_start); });
    add("window_end", "last day of the corpus window (YYYY-MM-DD)",
        [](C& c, const json& j) { c.window_end = as_string(j, "window_end"); },
        [](const C& c) { return json(c.window_end); });
    add("drop_duplicates", "drop exact duplicate texts",
        [](C& c, const json& j) { c.drop_duplicates = as_bool(j, "drop_duplicates"); },
        [](const C& c) { return json(c.drop_duplicates); });
    add("retrain_epochs", "retraining epochs",
        [](C& c, const json& j) { c.retrain.epochs = as_int(j, "retrain_epochs"); },
        [](const C& c) { return json(c.retrain.epochs); });
    add("retrain_eval_every_steps", "retraining evaluation interval",
        [](C& c, const json& j) {
            c.retrain.eval_every_steps = as_int(j, "retrain_eval_every_steps");
        },
        [](const C& c) { return json(c.retrain.eval_every_steps); });
    add("retrain_batch_size", "retraining batch size",
        [](C& c, const json& j) { c.retrain.batch_size = as_int(j, "retrain_batch_size"); },
        [](const C& c) { return json(c.retrain.batch_size); });
    add("retrain_learning_rate", "retraining learning rate",
        [](C& c, const json& j) { c.retrain.learning_rate = as_real(j, "retrain_learning_rate"); },
        [](const C& c) { return json(c.retrain.learning_rate); });
    add("mlm_probability", "masking probability of the retraining objective",
        [](C& c, const json& j) { c.retrain.mlm_probability = as_real(j, "mlm_probability"); },
        [](const C& c) { return json(c.retrain.mlm_probability); });
    add("finetune_epochs", "fine-tuning epochs",
        [](C& c, const json& j) { c.finetune.epochs = as_int(j, "finetune_epochs"); },
        [](const C& c) { return json(c.finetune.epochs); });
    add("finetune_eval_every_steps", "fine-tuning evaluation interval",
        [](C& c, const json& j) {
            c.finetune.eval_every_steps = as_int(j, "finetune_eval_every_steps");
        },
        [](const C& c) { return json(c.finetune.eval_every_steps); });
    add("optimizer", "fine-tuning optimizer (adamw)",
        [](C& c, const json& j) { c.finetune.optimizer = lower(as_string(j, "optimizer")); },
        [](const C& c) { return json(c.finetune.optimizer); });
    add("learning_rate", "fine-tuning learning rate",
        [](C& c, const json& j) { c.finetune.learning_rate = as_real(j, "learning_rate"); },
        [](const C& c) { return json(c.finetune.learning_rate); });
    add("weight_decay", "decoupled weight decay",
        [](C& c, const json& j) { c.finetune.weight_decay = as_real(j, "weight_decay"); },
        [](const C& c) { return json(c.finetune.weight_decay); });
    add("batch_size", "fine-tuning batch size",
        [](C& c, const json& j) { c.finetune.batch_size = as_int(j, "batch_size"); },
        [](const C& c) { return json(c.finetune.batch_size); });
    add("max_seq_length", "maximum tokens per text",
        [](C& c, const json& j) {
            c.finetune.max_seq_length = c.retrain.max_seq_length = as_int(j, "max_seq_length");
        },
        [](const C& c) { return json(c.finetune.max_seq_length); });
    add("text_column", "CSV column holding the text",
        [](C& c, const json& j) { c.text_column = as_string(j, "text_column"); },
        [](const C& c) { return json(c.text_column); });
    add("label_column", "CSV column holding the label",
        [](C& c, const json& j) { c.label_column = as_string(j, "label_column"); },
        [](const C& c) { return json(c.label_column); });
    add("eval_split", "split scored by evaluate (test or validation)",
        [](C& c, const json& j) {
            c.eval_split = std::string(to_string(parse_split(as_string(j, "eval_split"))));
        },
        [](const C& c) { return json(c.eval_split); });
    add("submission_format", "id_label_csv or label_list",
        [](C& c, const json& j) {
            c.submission_format = parse_submission_format(as_string(j, "submission_format"));
        },
        [](const C& c) { return json(format_name(c.submission_format)); });
    add("jobs", "concurrent training jobs",
        [](C& c, const json& j) { c.jobs = as_int(j, "jobs"); },
        [](const C& c) { return json(c.jobs); });
    return f;
}

void write_json(const fs::path& path, const json& j) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
}

json read_json(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("bad JSON in " + path.string() + ": " + e.what());
    }
}

SpatioTemporalWindow window_of(const PipelineConfig& c) {
    SpatioTemporalWindow w;
    w.country = c.country;
    w.start = parse_date(c.window_start);
    w.end = parse_date(c.window_end);
    return w;
}

// Append-only stage log of one training job.
class RunLog {
public:
    explicit RunLog(const fs::path& path) : out_(path, std::ios::binary | std::ios::app) {
        if (!out_) throw ConfigError("cannot write " + path.string());
    }
    void write(const json& entry) {
        out_ << entry.dump() << '\n';
        out_.flush();
    }

private:
    std::ofstream out_;
};

json counts_json(const ClassCounts& c) {
    json j = json::object();
    for (const auto& l : c.labels) j[l] = c.at(l);
    return j;
}

TrainedRun train_job(const PipelineConfig& config, LanguageCondition language,
                     ExperimentCondition condition) {
    const fs::path dir = job_dir(config, language, condition);
    fs::remove_all(dir);
    fs::create_directories(dir);
    json snapshot = config.to_json();
    snapshot["job"] = {{"language", std::string(to_string(language))},
                       {"condition", std::string(to_string(condition))},
                       {"task", std::string(to_string(config.task))}};
    write_json(dir / "config.json", snapshot);
    RunLog log(dir / "run_log.jsonl");

    const TaskSchema schema = config.schema();
    const CsvColumns columns{config.text_column, config.label_column};
    const auto train = load_labeled_csv(labeled_path(config, language, Split::train), schema,
                                        language, Split::train, columns);
    const auto validation = load_labeled_csv(labeled_path(config, language, Split::validation),
                                             schema, language, Split::validation, columns);
    log.write({{"stage", "load"},
               {"train_rows", train.rows.size()},
               {"validation_rows", validation.rows.size()}});

    auto backend = make_backend(config.backend);
    RetrainConfig rcfg = config.retrain;
    rcfg.seed = config.seeds.training;
    rcfg.backend = config.backend;
    FinetuneConfig fcfg = config.finetune;
    fcfg.seed = config.seeds.training;
    fcfg.backend = config.backend;

    ModelHandle encoder;
    if (condition == ExperimentCondition::baseline) {
        encoder = backend->pretrained();
        log.write({{"stage", "pretrained"}, {"model", encoder.artifact_uri}});
    } else {
        const bool mixed = condition == ExperimentCondition::script_mixed;
        const fs::path cpath =
            mixed ? mixed_corpus_path(config, language) : corpus_path(config, language);
        if (!fs::exists(cpath)) {
            throw ConfigError("missing corpus " + cpath.string() + " (run " +
                              (mixed ? "mix" : "build-corpus") + " first)");
        }
        const RetrainCorpus corpus = read_corpus(cpath);
        const std::string corpus_id =
            cpath.lexically_relative(config.run_dir).generic_string();
        log.write({{"stage", "retrain"},
                   {"event", "start"},
                   {"corpus", corpus_id},
                   {"corpus_size", corpus.texts.size()}});
        encoder = retrain(*backend, corpus, corpus_id, rcfg, dir / "retrain", condition);
        log.write({{"stage", "retrain"},
                   {"event", "done"},
                   {"best_checkpoint", to_json(*encoder.best)}});
    }

    const auto balanced = oversample(train, config.seeds.oversampling);
    log.write({{"stage", "oversample"},
               {"before", counts_json(class_counts(train))},
               {"after", counts_json(class_counts(balanced))}});

    log.write({{"stage", "finetune"}, {"event", "start"}});
    auto classifier = finetune(*backend, encoder, balanced, validation, fcfg, dir / "finetune");
    log.write({{"stage", "finetune"},
               {"event", "done"},
               {"best_checkpoint", to_json(*classifier.best)}});
    return {language, condition, dir, std::move(classifier)};
}

std::vector<fs::path> trained_job_dirs(const PipelineConfig& config) {
    std::vector<fs::path> out;
    const fs::path root = config.run_dir / "runs" / task_dir_name(config.task);
    if (!fs::is_directory(root)) return out;
    for (const auto& lang : fs::directory_iterator(root)) {
        if (!lang.is_directory()) continue;
        for (const auto& cond : fs::directory_iterator(lang.path())) {
            if (fs::exists(cond.path() / "finetune" / kHandleManifest)) out.push_back(cond.path());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string run_id(const PipelineConfig& config, LanguageCondition l, ExperimentCondition c) {
    return task_dir_name(config.task) + "/" + std::string(to_string(l)) + "/" +
           std::string(to_string(c));
}

}  // namespace

void PipelineConfig::validate() const {
    if (languages.empty()) throw ConfigError("no language conditions configured");
    if (conditions.empty()) throw ConfigError("no experiment conditions configured");
    for (auto c : conditions) {
        if (c != ExperimentCondition::script_mixed) continue;
        for (auto l : languages) {
            if (!is_indic(l)) {
                throw ConfigError("script-mixed condition requires an Indic language, got " +
                                  std::string(to_string(l)));
            }
        }
    }
    if (!(min_confidence >= 0.0 && min_confidence <= 1.0)) {
        throw ConfigError("min_confidence must lie in [0, 1]");
    }
    if (!(mix_ratio >= 0.0 && mix_ratio <= 1.0)) throw ConfigError("mix_ratio must lie in [0, 1]");
    if (sample_size == 0) throw ConfigError("sample_size must be positive");
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
    if (parse_date(window_end) < parse_date(window_start)) {
        throw ConfigError("window_end is before window_start");
    }
    retrain.validate();
    finetune.validate();
    make_backend(backend);
}

json PipelineConfig::to_json() const {
    json j = json::object();
    for (const auto& f : config_fields()) {
        auto v = f.get(*this);
        if (!v.is_null()) j[f.name] = std::move(v);
    }
    return j;
}

TaskSchema PipelineConfig::schema() const {
    if (schema_file.empty()) return TaskSchema::for_task(task);
    TaskSchema s = TaskSchema::load(schema_file);
    if (s.task() != task) {
        throw ConfigError("schema file " + schema_file.string() + " is for task " +
                          std::string(to_string(s.task())));
    }
    return s;
}

const std::vector<ConfigField>& config_fields() {
    static const std::vector<ConfigField> fields = build_fields();
    return fields;
}

void apply_config_json(PipelineConfig& config, const json& flat) {
    if (!flat.is_object()) throw ConfigError("config must be a JSON object");
    const auto& fields = config_fields();
    auto field = [&](const std::string& key) -> const ConfigField& {
        auto f = std::find_if(fields.begin(), fields.end(),
                              [&](const ConfigField& x) { return x.name == key; });
        if (f == fields.end()) throw ConfigError("unknown config key \"" + key + "\"");
        return *f;
    };
    // "seed" first so that specific seeds in the same document win.
    if (flat.contains("seed")) field("seed").set(config, flat["seed"]);
    for (auto it = flat.begin(); it != flat.end(); ++it) {
        if (it.key() != "seed") field(it.key()).set(config, it.value());
    }
}

void apply_config_file(PipelineConfig& config, const fs::path& path) {
    apply_config_json(config, read_json(path));
}

void apply_environment(PipelineConfig& config) {
    if (const char* v = std::getenv("HATEMIX_RUN_DIR"); v && *v) config.run_dir = v;
    if (const char* v = std::getenv("HATEMIX_BACKEND"); v && *v) config.backend = v;
}

fs::path corpus_path(const PipelineConfig& config, LanguageCondition language) {
    return config.run_dir / "corpora" / (std::string(to_string(language)) + ".txt");
}

fs::path mixed_corpus_path(const PipelineConfig& config, LanguageCondition language) {
    return config.run_dir / "corpora" / (std::string(to_string(language)) + ".mixed.txt");
}

fs::path labeled_path(const PipelineConfig& config, LanguageCondition language, Split split) {
    return config.labeled_dir / std::string(to_string(language)) / task_dir_name(config.task) /
           (std::string(to_string(split)) + ".csv");
}

fs::path job_dir(const PipelineConfig& config, LanguageCondition language,
                 ExperimentCondition condition) {
    return config.run_dir / "runs" / task_dir_name(config.task) /
           std::string(to_string(language)) / std::string(to_string(condition));
}

fs::path report_dir(const PipelineConfig& config) {
    return config.run_dir / "reports" / task_dir_name(config.task);
}

BuildCorpusOutcome cmd_build_corpus(const PipelineConfig& config, std::optional<double> mix_ratio,
                                    std::ostream& log) {
    config.validate();
    if (config.raw_corpus.empty()) throw ConfigError("no raw corpus given (--raw-corpus)");
    if (!fs::is_regular_file(config.raw_corpus)) {
        throw ConfigError("raw corpus not found: " + config.raw_corpus.string());
    }
    if (mix_ratio && !(*mix_ratio >= 0.0 && *mix_ratio <= 1.0)) {
        throw ConfigError("mix ratio must lie in [0, 1]");
    }
    if (mix_ratio && std::none_of(config.languages.begin(), config.languages.end(),
                                  [](LanguageCondition l) { return is_indic(l); })) {
        throw ConfigError("--mix needs at least one Indic language");
    }
    std::ifstream in(config.raw_corpus, std::ios::binary);
    if (!in) throw ConfigError("cannot read raw corpus: " + config.raw_corpus.string());

    BuildOptions opts;
    opts.languages = config.languages;
    for (auto l : config.languages) opts.windows[l] = window_of(config);
    opts.min_chars = config.min_chars;
    opts.min_confidence = config.min_confidence;
    opts.sample_size = config.sample_size;
    opts.seed = config.seeds.sampling;
    opts.drop_exact_duplicates = config.drop_duplicates;

    const BuiltinLanguageDetector detector;
    BuildCorpusOutcome out;
    out.result = build_corpora(in, detector, opts);

    for (auto& [lang, corpus] : out.result.corpora) {
        const auto path = corpus_path(config, lang);
        write_corpus(corpus, path, {{"detector", detector.id()}});
        out.corpora[lang] = path;
        log << "corpus " << to_string(lang) << ": " << corpus.texts.size() << " texts -> "
            << path.generic_string() << '\n';
        if (mix_ratio && is_indic(lang)) {
            auto base = std::make_shared<const RetrainCorpus>(corpus);
            const auto mixed = simulate_mix(base, *mix_ratio, config.seeds.mixing);
            const auto mpath = mixed_corpus_path(config, lang);
            write_mixed_corpus(mixed, mpath);
            out.mixed[lang] = mpath;
            log << "mixed corpus " << to_string(lang) << ": "
                << mixed.transliterated_indices.size() << " transliterated, "
                << mixed.texts.size() - mixed.transliterated_indices.size() << " untouched -> "
                << mpath.generic_string() << '\n';
        }
    }
    json report = {{"cleaning", out.result.cleaning},
                   {"ingest", out.result.ingest},
                   {"detector", detector.id()},
                   {"config", config.to_json()}};
    write_json(config.run_dir / "corpora" / "build_report.json", report);
    return out;
}

std::map<LanguageCondition, fs::path> cmd_mix(const PipelineConfig& config, std::ostream& log) {
    if (!(config.mix_ratio >= 0.0 && config.mix_ratio <= 1.0)) {
        throw ConfigError("mix_ratio must lie in [0, 1]");
    }
    std::map<LanguageCondition, fs::path> out;
    for (auto lang : config.languages) {
        if (!is_indic(lang)) {
            throw ConfigError("script mixing requires an Indic language, got " +
                              std::string(to_string(lang)));
        }
        const auto path = corpus_path(config, lang);
        if (!fs::exists(path)) {
            throw ConfigError("missing corpus " + path.string() + " (run build-corpus first)");
        }
        auto base = std::make_shared<const RetrainCorpus>(read_corpus(path));
        const auto mixed = simulate_mix(base, config.mix_ratio, config.seeds.mixing);
        const auto mpath = mixed_corpus_path(config, lang);
        write_mixed_corpus(mixed, mpath);
        out[lang] = mpath;
        log << "mixed corpus " << to_string(lang) << ": " << mixed.transliterated_indices.size()
            << " transliterated, " << mixed.texts.size() - mixed.transliterated_indices.size()
            << " untouched -> " << mpath.generic_string() << '\n';
    }
    return out;
}

std::vector<TrainedRun> cmd_train(const PipelineConfig& config, std::ostream& log) {
    config.validate();
    config.schema();
    struct Job {
        LanguageCondition language;
        ExperimentCondition condition;
    };
    std::vector<Job> jobs;
    for (auto l : config.languages) {
        for (auto c : config.conditions) jobs.push_back({l, c});
    }

    std::vector<std::optional<TrainedRun>> results(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    std::mutex log_mu;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            const auto& job = jobs[i];
            const std::string name = run_id(config, job.language, job.condition);
            {
                std::lock_guard lock(log_mu);
                log << "train " << name << ": start\n";
            }
            try {
                results[i] = train_job(config, job.language, job.condition);
                std::lock_guard lock(log_mu);
                log << "train " << name << ": best checkpoint step "
                    << results[i]->classifier.best->step << ", validation loss "
                    << results[i]->classifier.best->eval_loss << '\n';
            } catch (const std::exception& e) {
                errors[i] = std::current_exception();
                std::lock_guard lock(log_mu);
                log << "train " << name << ": failed: " << e.what() << '\n';
            }
        }
    };
    const std::size_t n_threads =
        std::min<std::size_t>(static_cast<std::size_t>(config.jobs), jobs.size());
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // A backend failure outranks configuration errors so that the exit code
    // reflects it.
    std::exception_ptr first;
    for (const auto& e : errors) {
        if (!e) continue;
        try {
            std::rethrow_exception(e);
        } catch (const BackendFailure&) {
            std::rethrow_exception(e);
        } catch (...) {
            if (!first) first = e;
        }
    }
    if (first) std::rethrow_exception(first);

    std::vector<TrainedRun> out;
    for (auto& r : results) out.push_back(std::move(*r));
    return out;
}

EvaluateOutcome cmd_evaluate(const PipelineConfig& config, std::ostream& log) {
    const auto dirs = trained_job_dirs(config);
    if (dirs.empty()) {
        throw ConfigError("nothing to evaluate: no trained runs for task " +
                          std::string(to_string(config.task)) + " in " + config.run_dir.string());
    }
    const TaskSchema schema = config.schema();
    const CsvColumns columns{config.text_column, config.label_column};
    const Split split = parse_split(config.eval_split);
    std::map<std::string, std::unique_ptr<TrainerBackend>> backends;

    EvaluateOutcome out;
    for (const auto& dir : dirs) {
        const fs::path fdir = dir / "finetune";
        const auto handle = classifier_handle_from_json(read_json(fdir / kHandleManifest), fdir);
        if (handle.task != config.task || handle.labels != schema.labels()) {
            throw SchemaMismatch("classifier in " + dir.string() + " does not match task " +
                                 std::string(to_string(config.task)));
        }
        auto& backend = backends[handle.backend_id];
        if (!backend) backend = make_backend(handle.backend_id);

        const auto gold =
            load_labeled_csv(labeled_path(config, handle.language, split), schema,
                             handle.language, split, columns);
        std::vector<std::string> texts, gold_labels;
        for (const auto& r : gold.rows) {
            texts.push_back(r.text);
            gold_labels.push_back(r.label);
        }
        const auto pred = predict(*backend, handle, texts);

        const fs::path pred_file = dir / "predictions.csv";
        write_submission(pred_file, pred, config.submission_format);
        const auto check =
            validate_submission(pred_file, schema, texts.size(), config.submission_format);
        if (!check.ok()) throw ConfigError("invalid predictions in " + pred_file.string() + ":\n" +
                                           check.to_text());
        const auto submitted = read_submission(pred_file, schema, config.submission_format);

        RunProvenance prov{handle.provenance, handle.language, config.task,
                           run_id(config, handle.language, handle.provenance)};
        auto report = evaluate(gold_labels, submitted, schema, prov);
        write_json(dir / "eval_report.json", to_json(report));
        log << "evaluate " << prov.run_id << ": weighted macro F1 " << report.weighted_macro_f1
            << '\n';
        out.reports.push_back(std::move(report));
    }
    out.table = comparison_table(out.reports);
    const fs::path rdir = report_dir(config);
    write_text(rdir / "table.txt", out.table.to_text());
    write_text(rdir / "table.csv", out.table.to_csv());
    write_text(rdir / "table.tex", out.table.to_latex());
    write_json(rdir / "table.json", out.table.to_json());
    return out;
}

PublishedScores load_published_scores(const fs::path& path) {
    const json j = read_json(path);
    PublishedScores out;
    try {
        const Task task = parse_task(j.at("task").get<std::string>());
        for (auto it = j.at("scores").begin(); it != j.at("scores").end(); ++it) {
            const auto lang = require_condition(it.key());
            for (auto c = it.value().begin(); c != it.value().end(); ++c) {
                const auto cond = parse_experiment_condition(c.key());
                RunProvenance prov{cond, lang, task,
                                   "published/" + it.key() + "/" + std::string(to_string(cond))};
                out.reports.push_back(report_from_score(prov, c.value().get<double>()));
            }
        }
        if (j.contains("submitted")) {
            for (auto it = j["submitted"].begin(); it != j["submitted"].end(); ++it) {
                out.annotations.submitted[require_condition(it.key())] =
                    parse_experiment_condition(it.value().get<std::string>());
            }
        }
        if (j.contains("invalid")) {
            for (const auto& l : j["invalid"]) {
                out.annotations.invalid.insert(require_condition(l.get<std::string>()));
            }
        }
        if (j.contains("rank")) {
            for (auto it = j["rank"].begin(); it != j["rank"].end(); ++it) {
                out.annotations.rank[require_condition(it.key())] = it.value().get<int>();
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError("bad scores file " + path.string() + ": " + e.what());
    }
    return out;
}

ComparisonTable cmd_report(const PipelineConfig& config, const fs::path& scores_file) {
    if (!scores_file.empty()) {
        const auto published = load_published_scores(scores_file);
        return comparison_table(published.reports, published.annotations);
    }
    std::vector<EvalReport> reports;
    for (const auto& dir : trained_job_dirs(config)) {
        if (fs::exists(dir / "eval_report.json")) {
            reports.push_back(eval_report_from_json(read_json(dir / "eval_report.json")));
        }
    }
    if (reports.empty()) {
        throw ConfigError("nothing to report: no evaluated runs for task " +
                          std::string(to_string(config.task)) + " in " + config.run_dir.string());
    }
    return comparison_table(reports);
}

TableFormat parse_table_format(std::string_view name) {
    if (name == "text" || name == "txt") return TableFormat::text;
    if (name == "csv") return TableFormat::csv;
    if (name == "latex" || name == "tex") return TableFormat::latex;
    if (name == "json") return TableFormat::json;
    throw ConfigError("unknown table format: " + std::string(name));
}

std::string render(const ComparisonTable& table, TableFormat format) {
    switch (format) {
        case TableFormat::text: return table.to_text();
        case TableFormat::csv: return table.to_csv();
        case TableFormat::latex: return table.to_latex();
        case TableFormat::json: return table.to_json().dump(2) + "\n";
    }
    return table.to_text();
}

}  // namespace hatemix
