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


// hatemix command-line entry point.
//
// Exit codes: 0 success, 1 configuration or validation error, 2 backend
// failure.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hatemix/error.hpp"
#include "hatemix/pipeline.hpp"

namespace {

using hatemix::PipelineConfig;

// Flags shared by the pipeline subcommands: --config plus one flag per
// config key.
struct ConfigFlags {
    std::string config_file;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
};

std::string flag_names(const std::string& key) {
    std::string dashed = key;
    for (char& c : dashed) {
        if (c == '_') c = '-';
    }
    std::string names = "--" + dashed;
    if (key == "languages") names += ",--language";
    if (key == "conditions") names += ",--condition";
    if (key == "raw_corpus") names += ",--input";
    return names;
}

void add_config_flags(CLI::App* cmd, ConfigFlags& flags) {
    cmd->add_option("--config", flags.config_file, "flat JSON config file")
        ->check(CLI::ExistingFile);
    for (const auto& f : hatemix::config_fields()) {
        flags.options[f.name] = cmd->add_option(flag_names(f.name), flags.values[f.name], f.help);
    }
}

PipelineConfig resolve(const ConfigFlags& flags) {
    PipelineConfig config;
    if (!flags.config_file.empty()) hatemix::apply_config_file(config, flags.config_file);
    hatemix::apply_environment(config);
    nlohmann::json given = nlohmann::json::object();
    for (const auto& [name, opt] : flags.options) {
        if (opt->count() > 0) given[name] = flags.values.at(name);
    }
    hatemix::apply_config_json(config, given);
    return config;
}

std::size_t count_gold_rows(const PipelineConfig& config) {
    if (config.languages.size() != 1) {
        throw hatemix::ConfigError("give --expected-rows or exactly one --language");
    }
    const auto gold = hatemix::load_labeled_csv(
        hatemix::labeled_path(config, config.languages.front(),
                              hatemix::parse_split(config.eval_split)),
        config.schema(), config.languages.front(), hatemix::parse_split(config.eval_split),
        {config.text_column, config.label_column});
    return gold.rows.size();
}

int validate_file(const PipelineConfig& config, const std::string& predictions,
                  std::optional<std::size_t> expected_rows) {
    const std::size_t n = expected_rows ? *expected_rows : count_gold_rows(config);
    const auto report =
        hatemix::validate_submission(predictions, config.schema(), n, config.submission_format);
    std::cout << report.to_text();
    return report.ok() ? 0 : 1;
}

void emit(const std::string& text, const std::string& output) {
    if (output.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(output, std::ios::binary | std::ios::trunc);
    if (!out) throw hatemix::ConfigError("cannot write " + output);
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multilingual homophobia/transphobia detection pipeline"};
    app.require_subcommand(1);

    ConfigFlags build_flags, mix_flags, train_flags, eval_flags, validate_flags, report_flags;

    auto* build = app.add_subcommand("build-corpus", "clean, filter, detect and sample corpora");
    add_config_flags(build, build_flags);
    std::optional<double> mix_ratio;
    build->add_option("--mix", mix_ratio, "also write script-mixed corpora with this ratio");

    auto* mix = app.add_subcommand("mix", "simulate script mixing on built corpora");
    add_config_flags(mix, mix_flags);

    auto* train = app.add_subcommand("train", "retrain and fine-tune classifiers");
    add_config_flags(train, train_flags);

    auto* eval = app.add_subcommand("evaluate", "predict, validate and score trained runs");
    add_config_flags(eval, eval_flags);
    bool validate_only = false;
    std::string eval_predictions;
    std::optional<std::size_t> eval_expected;
    eval->add_flag("--validate-only", validate_only, "only validate --predictions");
    eval->add_option("--predictions", eval_predictions, "prediction file to validate");
    eval->add_option("--expected-rows", eval_expected, "expected number of predictions");

    auto* validate = app.add_subcommand("validate-submission", "check a prediction file");
    add_config_flags(validate, validate_flags);
    std::string predictions;
    std::optional<std::size_t> expected_rows;
    validate->add_option("--predictions", predictions, "prediction file")->required();
    validate->add_option("--expected-rows", expected_rows,
                         "expected number of predictions (default: rows of the gold split)");

    auto* report = app.add_subcommand("report", "render a comparison table");
    add_config_flags(report, report_flags);
    std::string scores_file, table_format = "text", output;
    report->add_option("--scores", scores_file, "published scores JSON")
        ->check(CLI::ExistingFile);
    report->add_option("--format", table_format, "text, csv, latex or json");
    report->add_option("--output", output, "write to a file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*build) {
            hatemix::cmd_build_corpus(resolve(build_flags), mix_ratio, std::cerr);
        } else if (*mix) {
            hatemix::cmd_mix(resolve(mix_flags), std::cerr);
        } else if (*train) {
            hatemix::cmd_train(resolve(train_flags), std::cerr);
        } else if (*eval) {
            const auto config = resolve(eval_flags);
            if (validate_only) {
                if (eval_predictions.empty()) {
                    throw hatemix::ConfigError("--validate-only needs --predictions");
                }
                return validate_file(config, eval_predictions, eval_expected);
            }
            const auto outcome = hatemix::cmd_evaluate(config, std::cerr);
            std::cout << outcome.table.to_text();
        } else if (*validate) {
            return validate_file(resolve(validate_flags), predictions, expected_rows);
        } else if (*report) {
            const auto table = hatemix::cmd_report(resolve(report_flags), scores_file);
            emit(hatemix::render(table, hatemix::parse_table_format(table_format)), output);
        }
    } catch (const hatemix::BackendFailure& e) {
        std::cerr << "error: " << e.kind() << ": " << e.what() << '\n';
        return 2;
    } catch (const hatemix::Error& e) {
        std::cerr << "error: " << e.kind() << ": " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
