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


#include "hatemix/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "hatemix/csv.hpp"
#include "hatemix/error.hpp"

namespace hatemix {

std::size_t ConfusionMatrix::row_sum(std::size_t i) const {
    std::size_t s = 0;
    for (auto v : cells[i]) s += v;
    return s;
}

std::size_t ConfusionMatrix::col_sum(std::size_t j) const {
    std::size_t s = 0;
    for (const auto& row : cells) s += row[j];
    return s;
}

ConfusionMatrix confusion_matrix(std::span<const std::string> gold,
                                 std::span<const std::string> pred, const TaskSchema& schema) {
    if (gold.size() != pred.size()) throw LengthMismatch(gold.size(), pred.size());
    ConfusionMatrix m;
    m.labels = schema.labels();
    const std::size_t k = m.labels.size();
    m.cells.assign(k, std::vector<std::size_t>(k, 0));
    auto index = [&](const std::string& label, std::size_t pos) {
        auto it = std::find(m.labels.begin(), m.labels.end(), label);
        if (it == m.labels.end()) throw UnknownLabel(label, pos + 1);
        return static_cast<std::size_t>(it - m.labels.begin());
    };
    for (std::size_t i = 0; i < gold.size(); ++i) {
        ++m.cells[index(gold[i], i)][index(pred[i], i)];
    }
    m.n = gold.size();
    return m;
}

namespace {

double safe_div(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

}  // namespace

std::vector<ClassScore> per_class_prf(const ConfusionMatrix& matrix) {
    std::vector<ClassScore> out;
    for (std::size_t c = 0; c < matrix.labels.size(); ++c) {
        const double tp = static_cast<double>(matrix.cells[c][c]);
        const double support = static_cast<double>(matrix.row_sum(c));
        const double predicted = static_cast<double>(matrix.col_sum(c));
        ClassScore s;
        s.label = matrix.labels[c];
        s.precision = safe_div(tp, predicted);
        s.recall = safe_div(tp, support);
        s.f1 = safe_div(2.0 * s.precision * s.recall, s.precision + s.recall);
        s.support = matrix.row_sum(c);
        out.push_back(std::move(s));
    }
    return out;
}

double weighted_macro_f1(const ConfusionMatrix& matrix) {
    if (matrix.n == 0) throw EmptyInput();
    double acc = 0.0;
    for (const auto& s : per_class_prf(matrix)) {
        if (s.support == 0) continue;
        acc += static_cast<double>(s.support) * s.f1;
    }
    return acc / static_cast<double>(matrix.n);
}

double weighted_macro_f1(std::span<const std::string> gold, std::span<const std::string> pred,
                         const TaskSchema& schema) {
    return weighted_macro_f1(confusion_matrix(gold, pred, schema));
}

double unweighted_macro_f1(const ConfusionMatrix& matrix) {
    if (matrix.n == 0) throw EmptyInput();
    double acc = 0.0;
    std::size_t present = 0;
    const auto scores = per_class_prf(matrix);
    for (std::size_t c = 0; c < scores.size(); ++c) {
        if (matrix.row_sum(c) == 0 && matrix.col_sum(c) == 0) continue;
        acc += scores[c].f1;
        ++present;
    }
    return present == 0 ? 0.0 : acc / static_cast<double>(present);
}

EvalReport evaluate(std::span<const std::string> gold, std::span<const std::string> pred,
                    const TaskSchema& schema, RunProvenance provenance) {
    EvalReport r;
    r.provenance = std::move(provenance);
    r.provenance.task = schema.task();
    r.matrix = confusion_matrix(gold, pred, schema);
    r.per_class = per_class_prf(r.matrix);
    r.weighted_macro_f1 = weighted_macro_f1(r.matrix);
    r.macro_f1 = unweighted_macro_f1(r.matrix);
    return r;
}

EvalReport report_from_score(RunProvenance provenance, double score) {
    if (!(score >= 0.0 && score <= 1.0)) throw ConfigError("score outside [0, 1]");
    EvalReport r;
    r.provenance = std::move(provenance);
    r.weighted_macro_f1 = score;
    r.macro_f1 = score;
    r.summary_only = true;
    return r;
}

nlohmann::json to_json(const EvalReport& report) {
    nlohmann::json per_class = nlohmann::json::array();
    for (const auto& s : report.per_class) {
        per_class.push_back({{"label", s.label},
                             {"precision", s.precision},
                             {"recall", s.recall},
                             {"f1", s.f1},
                             {"support", s.support}});
    }
    return {{"provenance",
             {{"condition", std::string(to_string(report.provenance.condition))},
              {"language", std::string(to_string(report.provenance.language))},
              {"task", std::string(to_string(report.provenance.task))},
              {"run_id", report.provenance.run_id}}},
            {"weighted_macro_f1", report.weighted_macro_f1},
            {"macro_f1", report.macro_f1},
            {"summary_only", report.summary_only},
            {"per_class", per_class},
            {"confusion_matrix",
             {{"labels", report.matrix.labels},
              {"cells", report.matrix.cells},
              {"n", report.matrix.n}}}};
}

EvalReport eval_report_from_json(const nlohmann::json& j) {
    try {
        EvalReport r;
        const auto& p = j.at("provenance");
        r.provenance.condition = parse_experiment_condition(p.at("condition").get<std::string>());
        r.provenance.language = require_condition(p.at("language").get<std::string>());
        r.provenance.task = parse_task(p.at("task").get<std::string>());
        r.provenance.run_id = p.value("run_id", std::string{});
        r.weighted_macro_f1 = j.at("weighted_macro_f1").get<double>();
        r.macro_f1 = j.value("macro_f1", r.weighted_macro_f1);
        r.summary_only = j.value("summary_only", false);
        for (const auto& s : j.value("per_class", nlohmann::json::array())) {
            r.per_class.push_back({s.at("label").get<std::string>(), s.at("precision").get<double>(),
                                   s.at("recall").get<double>(), s.at("f1").get<double>(),
                                   s.at("support").get<std::size_t>()});
        }
        if (auto it = j.find("confusion_matrix"); it != j.end()) {
            r.matrix.labels = it->at("labels").get<std::vector<std::string>>();
            r.matrix.cells = it->at("cells").get<std::vector<std::vector<std::size_t>>>();
            r.matrix.n = it->at("n").get<std::size_t>();
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad eval report: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Comparison tables

namespace {

std::string two_decimals(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string column_title(ExperimentCondition c) {
    switch (c) {
        case ExperimentCondition::baseline: return "Baseline";
        case ExperimentCondition::retrained: return "Retrained";
        case ExperimentCondition::script_mixed: return "Script-Mixed";
    }
    return "";
}

std::string row_title(LanguageCondition l) {
    std::string s(to_string(l));
    s[0] = static_cast<char>(s[0] - 'a' + 'A');
    return s;
}

bool has_rank(const ComparisonTable& t) {
    return std::any_of(t.rows.begin(), t.rows.end(), [](const auto& r) { return r.rank.has_value(); });
}

}  // namespace

ComparisonTable comparison_table(std::span<const EvalReport> reports,
                                 const TableAnnotations& annotations) {
    if (reports.empty()) throw ConfigError("no reports to tabulate");
    ComparisonTable table;
    table.task = reports.front().provenance.task;
    std::map<LanguageCondition, ComparisonRow> rows;
    std::set<ExperimentCondition> columns;
    for (const auto& r : reports) {
        if (r.provenance.task != table.task) {
            throw ConfigError("reports mix task A and task B");
        }
        auto& row = rows[r.provenance.language];
        row.language = r.provenance.language;
        if (!row.scores.emplace(r.provenance.condition, r.weighted_macro_f1).second) {
            throw DuplicateCell(std::string(to_string(r.provenance.language)),
                                std::string(to_string(r.provenance.condition)));
        }
        columns.insert(r.provenance.condition);
    }
    for (auto c : kAllExperimentConditions) {
        if (columns.count(c)) table.columns.push_back(c);
    }
    for (auto& [lang, row] : rows) {
        if (auto it = annotations.submitted.find(lang); it != annotations.submitted.end()) {
            row.submitted = it->second;
        }
        row.invalid = annotations.invalid.count(lang) > 0;
        if (auto it = annotations.rank.find(lang); it != annotations.rank.end()) row.rank = it->second;
        table.rows.push_back(std::move(row));
    }
    std::sort(table.rows.begin(), table.rows.end(), [](const auto& a, const auto& b) {
        return to_string(a.language) < to_string(b.language);
    });
    return table;
}

std::string ComparisonTable::display(const ComparisonRow& row, ExperimentCondition column,
                                     bool* bold) const {
    if (bold) *bold = false;
    auto it = row.scores.find(column);
    if (it == row.scores.end()) return "-";
    const bool is_submitted = row.submitted && *row.submitted == column;
    if (is_submitted && row.invalid) return "(" + two_decimals(it->second) + ")";
    if (bold) *bold = is_submitted;
    return two_decimals(it->second);
}

std::string ComparisonTable::to_text() const {
    std::vector<std::vector<std::string>> grid;
    std::vector<std::string> header = {"Language Condition"};
    for (auto c : columns) header.push_back(column_title(c));
    const bool ranks = has_rank(*this);
    if (ranks) header.push_back("Rank");
    grid.push_back(header);
    for (const auto& row : rows) {
        std::vector<std::string> line = {row_title(row.language)};
        for (auto c : columns) {
            bool bold = false;
            auto cell = display(row, c, &bold);
            line.push_back(bold ? "*" + cell + "*" : cell);
        }
        if (ranks) line.push_back(row.rank ? std::to_string(*row.rank) : "-");
        grid.push_back(line);
    }
    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& line : grid) {
        for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
    }
    std::ostringstream out;
    out << "Task " << to_string(task) << " weighted macro F1 (*submitted*, (invalid))\n";
    for (const auto& line : grid) {
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (i) out << "  ";
            if (i == 0) out << std::left; else out << std::right;
            out << std::setw(static_cast<int>(width[i])) << line[i];
        }
        out << '\n';
    }
    return out.str();
}

std::string ComparisonTable::to_csv() const {
    std::ostringstream out;
    std::vector<std::string> header = {"language"};
    for (auto c : columns) header.emplace_back(to_string(c));
    header.emplace_back("submitted");
    header.emplace_back("invalid");
    header.emplace_back("rank");
    csv::write_row(out, header);
    for (const auto& row : rows) {
        std::vector<std::string> line = {std::string(to_string(row.language))};
        for (auto c : columns) {
            auto it = row.scores.find(c);
            line.push_back(it == row.scores.end() ? "" : two_decimals(it->second));
        }
        line.push_back(row.submitted ? std::string(to_string(*row.submitted)) : "");
        line.push_back(row.invalid ? "true" : "false");
        line.push_back(row.rank ? std::to_string(*row.rank) : "");
        csv::write_row(out, line);
    }
    return out.str();
}

std::string ComparisonTable::to_latex() const {
    const bool ranks = has_rank(*this);
    std::ostringstream out;
    out << "\\begin{tabular}{l" << std::string(columns.size() + (ranks ? 1 : 0), 'c') << "}\n\\hline\n";
    out << "\\textbf{Language Condition}";
    for (auto c : columns) out << " & \\textbf{" << column_title(c) << "}";
    if (ranks) out << " & \\textbf{Rank}";
    out << "\\\\\n\\hline\n";
    for (const auto& row : rows) {
        out << row_title(row.language);
        for (auto c : columns) {
            bool bold = false;
            auto cell = display(row, c, &bold);
            out << " & " << (bold ? "\\textbf{" + cell + "}" : cell);
        }
        if (ranks) out << " & " << (row.rank ? std::to_string(*row.rank) : "-");
        out << " \\\\\n";
    }
    out << "\\hline\n\\end{tabular}\n";
    return out.str();
}

nlohmann::json ComparisonTable::to_json() const {
    nlohmann::json j;
    j["task"] = std::string(hatemix::to_string(task));
    j["columns"] = nlohmann::json::array();
    for (auto c : columns) j["columns"].push_back(std::string(hatemix::to_string(c)));
    j["rows"] = nlohmann::json::array();
    for (const auto& row : rows) {
        nlohmann::json r;
        r["language"] = std::string(hatemix::to_string(row.language));
        nlohmann::json scores = nlohmann::json::object();
        for (const auto& [c, v] : row.scores) scores[std::string(hatemix::to_string(c))] = v;
        r["scores"] = scores;
        r["submitted"] = row.submitted ? nlohmann::json(std::string(hatemix::to_string(*row.submitted)))
                                       : nlohmann::json(nullptr);
        r["invalid"] = row.invalid;
        r["rank"] = row.rank ? nlohmann::json(*row.rank) : nlohmann::json(nullptr);
        j["rows"].push_back(r);
    }
    return j;
}

// ---------------------------------------------------------------------------
// Submissions

SubmissionFormat parse_submission_format(std::string_view name) {
    if (name == "csv" || name == "id_label_csv") return SubmissionFormat::id_label_csv;
    if (name == "labels" || name == "label_list") return SubmissionFormat::label_list;
    throw ConfigError("unknown submission format: " + std::string(name));
}

std::string SubmissionReport::to_text() const {
    std::ostringstream out;
    if (ok()) {
        out << "OK: " << rows << " rows\n";
        return out.str();
    }
    out << "INVALID: " << violations.size() << " violation(s)\n";
    for (const auto& v : violations) {
        out << (v.line ? "line " + std::to_string(v.line) : std::string("file")) << ": [" << v.kind
            << "] " << v.message << '\n';
    }
    return out.str();
}

namespace {

struct ParsedSubmission {
    SubmissionReport report;
    std::vector<std::string> labels;
};

ParsedSubmission parse_submission(const std::filesystem::path& pred_file, const TaskSchema& schema,
                                  std::size_t expected_n, bool check_count,
                                  SubmissionFormat format) {
    ParsedSubmission parsed;
    auto& report = parsed.report;
    std::ifstream in(pred_file, std::ios::binary);
    if (!in) {
        report.violations.push_back({0, "malformed", "cannot open " + pred_file.string()});
        return parsed;
    }
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::size_t> row_lines;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
        std::string raw;
        if (format == SubmissionFormat::id_label_csv) {
            if (line_no == 1) {
                std::istringstream hs(line);
                auto header = csv::read(hs);
                if (header.empty() || header[0].fields.size() != 2) {
                    report.violations.push_back(
                        {line_no, "malformed", "expected header with columns id,label"});
                }
                continue;
            }
            if (line.find_first_not_of(" \t") == std::string::npos) {
                report.violations.push_back({line_no, "empty_row", "empty row"});
                continue;
            }
            std::istringstream ls(line);
            std::vector<csv::Record> recs;
            try {
                recs = csv::read(ls);
            } catch (const MalformedCsv& e) {
                report.violations.push_back({line_no, "malformed", e.what()});
                continue;
            }
            if (recs.size() != 1 || recs[0].fields.size() != 2) {
                report.violations.push_back({line_no, "malformed", "expected 2 fields (id,label)"});
                continue;
            }
            raw = recs[0].fields[1];
        } else {
            raw = line;
        }
        if (raw.find_first_not_of(" \t") == std::string::npos) {
            report.violations.push_back({line_no, "empty_row", "empty label"});
            continue;
        }
        ++report.rows;
        row_lines.push_back(line_no);
        auto label = schema.normalize(raw);
        if (!label) {
            report.violations.push_back(
                {line_no, "unknown_label",
                 "label \"" + raw + "\" is not in the task " +
                     std::string(to_string(schema.task())) + " schema"});
            continue;
        }
        parsed.labels.push_back(*label);
    }
    if (check_count && report.rows != expected_n) {
        // Point at the first surplus row, or just past the last line when
        // rows are missing.
        const std::size_t at = report.rows > expected_n ? row_lines[expected_n] : line_no + 1;
        report.violations.push_back(
            {at, "row_count",
             "expected " + std::to_string(expected_n) + " rows, found " +
                 std::to_string(report.rows) +
                 (report.rows > expected_n ? " (first surplus row)" : " (missing from here)")});
    }
    return parsed;
}

}  // namespace

SubmissionReport validate_submission(const std::filesystem::path& pred_file,
                                     const TaskSchema& schema, std::size_t expected_n,
                                     SubmissionFormat format) {
    return parse_submission(pred_file, schema, expected_n, true, format).report;
}

std::vector<std::string> read_submission(const std::filesystem::path& pred_file,
                                         const TaskSchema& schema, SubmissionFormat format) {
    auto parsed = parse_submission(pred_file, schema, 0, false, format);
    if (!parsed.report.ok()) {
        throw ConfigError("invalid submission " + pred_file.string() + ":\n" +
                          parsed.report.to_text());
    }
    return std::move(parsed.labels);
}

void write_submission(const std::filesystem::path& path, std::span<const std::string> labels,
                      SubmissionFormat format) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write predictions: " + path.string());
    if (format == SubmissionFormat::id_label_csv) out << "id,label\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (format == SubmissionFormat::id_label_csv) {
            csv::write_row(out, {std::to_string(i + 1), labels[i]});
        } else {
            out << labels[i] << '\n';
        }
    }
}

}  // namespace hatemix
