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


#include "hatemix/dataset.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>

#include "hatemix/csv.hpp"
#include "hatemix/error.hpp"
#include "hatemix/rng.hpp"

#ifndef HATEMIX_DATA_DIR
#define HATEMIX_DATA_DIR "data"
#endif

namespace hatemix {

namespace {

const std::vector<std::string> kTaskALabels = {"homophobia", "non-anti-LGBT+", "transphobia"};
const std::vector<std::string> kTaskBLabels = {
    "counter-speech",     "homophobic-threatening",  "homophobic-derogation",
    "hope-speech",        "none-of-the-above",       "transphobic-threatening",
    "transphobic-derogation"};

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    for (auto& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::string_view to_string(Task task) { return task == Task::A ? "A" : "B"; }

Task parse_task(std::string_view name) {
    if (name == "A" || name == "a") return Task::A;
    if (name == "B" || name == "b") return Task::B;
    throw ConfigError("unknown task: " + std::string(name));
}

std::string_view to_string(Split split) {
    switch (split) {
        case Split::train: return "train";
        case Split::validation: return "validation";
        case Split::test: return "test";
    }
    return "train";
}

Split parse_split(std::string_view name) {
    if (name == "train") return Split::train;
    if (name == "validation" || name == "dev") return Split::validation;
    if (name == "test") return Split::test;
    throw ConfigError("unknown split: " + std::string(name));
}

TaskSchema::TaskSchema(Task task, std::vector<std::string> labels,
                       std::map<std::string, std::string> aliases)
    : task_(task), labels_(std::move(labels)), aliases_(std::move(aliases)) {
    const auto& expected = task_ == Task::A ? kTaskALabels : kTaskBLabels;
    if (std::set<std::string>(labels_.begin(), labels_.end()) !=
            std::set<std::string>(expected.begin(), expected.end()) ||
        labels_.size() != expected.size()) {
        throw ConfigError("task " + std::string(to_string(task_)) + " requires exactly " +
                          std::to_string(expected.size()) + " canonical labels");
    }
    for (const auto& [raw, canonical] : aliases_) {
        if (!contains(canonical)) {
            throw ConfigError("alias \"" + raw + "\" maps to non-schema label \"" + canonical + "\"");
        }
    }
}

const TaskSchema& TaskSchema::task_a() {
    static const TaskSchema schema(Task::A, kTaskALabels,
                                   {{"Homophobia", "homophobia"},
                                    {"Non-anti-LGBT+ content", "non-anti-LGBT+"},
                                    {"None of the categories", "non-anti-LGBT+"},
                                    {"Transphobia", "transphobia"},
                                    {"H", "homophobia"},
                                    {"N", "non-anti-LGBT+"},
                                    {"T", "transphobia"}});
    return schema;
}

const TaskSchema& TaskSchema::task_b() {
    static const TaskSchema schema(Task::B, kTaskBLabels,
                                   {{"Counter-speech", "counter-speech"},
                                    {"Homophobic-Threatening", "homophobic-threatening"},
                                    {"Homophobic-derogation", "homophobic-derogation"},
                                    {"Hope-Speech", "hope-speech"},
                                    {"None-of-the-above", "none-of-the-above"},
                                    {"None of the above", "none-of-the-above"},
                                    {"Transphobic-Threatening", "transphobic-threatening"},
                                    {"Transphobic-derogation", "transphobic-derogation"},
                                    {"CS", "counter-speech"},
                                    {"HT", "homophobic-threatening"},
                                    {"HD", "homophobic-derogation"},
                                    {"HS", "hope-speech"},
                                    {"NO", "none-of-the-above"},
                                    {"TT", "transphobic-threatening"},
                                    {"TD", "transphobic-derogation"}});
    return schema;
}

const TaskSchema& TaskSchema::for_task(Task task) {
    return task == Task::A ? task_a() : task_b();
}

TaskSchema TaskSchema::from_json(const nlohmann::json& j) {
    try {
        return TaskSchema(parse_task(j.at("task").get<std::string>()),
                          j.at("labels").get<std::vector<std::string>>(),
                          j.value("aliases", std::map<std::string, std::string>{}));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad schema config: ") + e.what());
    }
}

TaskSchema TaskSchema::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open schema config: " + path.string());
    try {
        return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("bad schema config " + path.string() + ": " + e.what());
    }
}

bool TaskSchema::contains(std::string_view canonical) const {
    return std::find(labels_.begin(), labels_.end(), canonical) != labels_.end();
}

std::size_t TaskSchema::index_of(std::string_view canonical) const {
    auto it = std::find(labels_.begin(), labels_.end(), canonical);
    if (it == labels_.end()) throw UnknownLabel(std::string(canonical), 0);
    return static_cast<std::size_t>(it - labels_.begin());
}

std::optional<std::string> TaskSchema::normalize(std::string_view raw) const {
    const auto t = trim(raw);
    if (contains(t)) return std::string(t);
    if (auto it = aliases_.find(std::string(t)); it != aliases_.end()) return it->second;
    const auto lowered = lower_ascii(t);
    for (const auto& l : labels_) {
        if (lower_ascii(l) == lowered) return l;
    }
    for (const auto& [alias, canonical] : aliases_) {
        if (lower_ascii(alias) == lowered) return canonical;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------

LabeledDataset load_labeled_csv(const std::filesystem::path& path, const TaskSchema& schema,
                                LanguageCondition language, Split split,
                                const CsvColumns& columns) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open labelled data: " + path.string());
    const auto records = csv::read(in);
    if (records.empty()) throw MalformedCsv("missing header row", 1);

    const auto& header = records.front().fields;
    auto column = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (trim(header[i]) == name) return i;
        }
        throw ConfigError(path.string() + ": no column named \"" + name + "\"");
    };
    const std::size_t text_col = column(columns.text);
    const std::size_t label_col = column(columns.label);

    LabeledDataset ds;
    ds.language = language;
    ds.schema = schema;
    ds.split = split;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.fields.size() != header.size()) {
            throw MalformedCsv("expected " + std::to_string(header.size()) + " fields, got " +
                                   std::to_string(rec.fields.size()),
                               rec.line);
        }
        const auto& raw = rec.fields[label_col];
        auto label = schema.normalize(raw);
        if (!label) throw UnknownLabel(raw, r);
        ds.rows.push_back({rec.fields[text_col], std::move(*label)});
    }
    if (ds.rows.empty()) throw ConfigError(path.string() + ": no data rows");
    return ds;
}

std::size_t ClassCounts::at(const std::string& label) const {
    auto it = counts.find(label);
    return it == counts.end() ? 0 : it->second;
}

ClassCounts class_counts(const LabeledDataset& dataset) {
    ClassCounts c;
    c.task = dataset.schema.task();
    c.labels = dataset.schema.labels();
    for (const auto& l : c.labels) c.counts[l] = 0;
    for (const auto& row : dataset.rows) {
        ++c.counts[row.label];
        ++c.total;
    }
    return c;
}

LabeledDataset oversample(const LabeledDataset& dataset, std::uint64_t seed) {
    const auto& labels = dataset.schema.labels();
    std::map<std::string, std::vector<std::size_t>> members;
    for (const auto& l : labels) members[l];
    for (std::size_t i = 0; i < dataset.rows.size(); ++i) {
        members[dataset.rows[i].label].push_back(i);
    }
    std::size_t majority = 0;
    for (const auto& l : labels) {
        if (members[l].empty()) throw EmptyClass(l);
        majority = std::max(majority, members[l].size());
    }

    LabeledDataset out = dataset;
    out.rows.reserve(majority * labels.size());
    Rng rng = make_rng(seed);
    for (const auto& l : labels) {
        const auto& idx = members[l];
        for (std::size_t k = idx.size(); k < majority; ++k) {
            out.rows.push_back(dataset.rows[idx[uniform_index(rng, idx.size())]]);
        }
    }
    return out;
}

TotalsReport validate_totals(const ClassCounts& counts, const ClassCounts& expected) {
    TotalsReport report;
    if (counts.task != expected.task || counts.labels != expected.labels) {
        report.incomparable = true;
        report.note = "incomparable schemas: task " + std::string(to_string(counts.task)) +
                      " vs task " + std::string(to_string(expected.task));
        return report;
    }
    for (const auto& l : expected.labels) {
        if (counts.at(l) != expected.at(l)) report.mismatches.push_back({l, expected.at(l), counts.at(l)});
    }
    if (counts.total != expected.total) {
        report.mismatches.push_back({"total", expected.total, counts.total});
    }
    return report;
}

std::filesystem::path default_data_dir() {
    if (const char* env = std::getenv("HATEMIX_DATA_DIR"); env && *env) return env;
    return HATEMIX_DATA_DIR;
}

ExpectedCounts load_expected_counts(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open expected counts: " + path.string());
    ExpectedCounts out;
    try {
        const auto j = nlohmann::json::parse(in);
        for (auto task_it = j.at("tasks").begin(); task_it != j.at("tasks").end(); ++task_it) {
            const Task task = parse_task(task_it.key());
            const auto& schema = TaskSchema::for_task(task);
            for (auto lang_it = task_it->begin(); lang_it != task_it->end(); ++lang_it) {
                ClassCounts c;
                c.task = task;
                c.labels = schema.labels();
                for (const auto& l : c.labels) c.counts[l] = 0;
                for (auto cell = lang_it->at("counts").begin(); cell != lang_it->at("counts").end();
                     ++cell) {
                    auto canonical = schema.normalize(cell.key());
                    if (!canonical) throw UnknownLabel(cell.key(), 0);
                    c.counts[*canonical] = cell->get<std::size_t>();
                }
                c.total = lang_it->at("total").get<std::size_t>();
                out.emplace(std::make_pair(task, require_condition(lang_it.key())), std::move(c));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("bad expected counts file " + path.string() + ": " + e.what());
    }
    return out;
}

void write_dataset_jsonl(const LabeledDataset& dataset, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write dataset: " + path.string());
    for (const auto& row : dataset.rows) {
        const nlohmann::json j = {{"language", std::string(to_string(dataset.language))},
                                  {"task", std::string(to_string(dataset.schema.task()))},
                                  {"split", std::string(to_string(dataset.split))},
                                  {"text", row.text},
                                  {"label", row.label}};
        out << j.dump() << '\n';
    }
}

LabeledDataset read_dataset_jsonl(const std::filesystem::path& path, const TaskSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open dataset: " + path.string());
    LabeledDataset ds;
    ds.schema = schema;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++n;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
            ds.language = require_condition(j.at("language").get<std::string>());
            ds.split = parse_split(j.at("split").get<std::string>());
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(path.string() + ":" + std::to_string(n) + ": " + e.what());
        }
        const auto raw = j.value("label", std::string{});
        auto label = schema.normalize(raw);
        if (!label) throw UnknownLabel(raw, n);
        ds.rows.push_back({j.value("text", std::string{}), *label});
    }
    if (ds.rows.empty()) throw ConfigError(path.string() + ": no rows");
    return ds;
}

}  // namespace hatemix
