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


#include "hatemix/csv.hpp"

#include <iterator>

#include "hatemix/error.hpp"

namespace hatemix::csv {

std::vector<Record> read(std::istream& in) {
    const std::string data{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    std::vector<Record> records;
    std::size_t i = 0;
    if (data.compare(0, 3, "\xEF\xBB\xBF") == 0) i = 3;
    std::size_t line = 1;

    while (i < data.size()) {
        Record rec;
        rec.line = line;
        std::string field;
        bool in_quotes = false;
        bool field_was_quoted = false;
        bool done = false;
        while (!done) {
            if (i >= data.size()) {
                if (in_quotes) throw MalformedCsv("unterminated quoted field", rec.line);
                rec.fields.push_back(std::move(field));
                break;
            }
            const char c = data[i];
            if (in_quotes) {
                if (c == '"') {
                    if (i + 1 < data.size() && data[i + 1] == '"') {
                        field.push_back('"');
                        i += 2;
                    } else {
                        in_quotes = false;
                        ++i;
                    }
                } else {
                    if (c == '\n') ++line;
                    field.push_back(c);
                    ++i;
                }
                continue;
            }
            switch (c) {
                case '"':
                    if (!field.empty() || field_was_quoted) {
                        throw MalformedCsv("quote inside unquoted field", line);
                    }
                    in_quotes = true;
                    field_was_quoted = true;
                    ++i;
                    break;
                case ',':
                    rec.fields.push_back(std::move(field));
                    field.clear();
                    field_was_quoted = false;
                    ++i;
                    break;
                case '\r':
                    ++i;
                    if (i < data.size() && data[i] != '\n') {
                        throw MalformedCsv("bare carriage return", line);
                    }
                    break;
                case '\n':
                    rec.fields.push_back(std::move(field));
                    ++line;
                    ++i;
                    done = true;
                    break;
                default:
                    if (field_was_quoted) {
                        throw MalformedCsv("text after closing quote", line);
                    }
                    field.push_back(c);
                    ++i;
            }
        }
        // Skip blank lines.
        if (rec.fields.size() == 1 && rec.fields[0].empty()) continue;
        records.push_back(std::move(rec));
    }
    return records;
}

std::string quote(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << quote(fields[i]);
    }
    out << '\n';
}

}  // namespace hatemix::csv
