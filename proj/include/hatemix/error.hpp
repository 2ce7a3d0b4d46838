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
#include <stdexcept>
#include <string>

namespace hatemix {

// Base for every error raised by the library. `kind()` is a stable name
// used by the CLI to choose an exit code and by tests to match errors.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

// Configuration and input validation errors (CLI exit code 1).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message) : Error("ConfigError", message) {}
};

// Failures inside a training backend (CLI exit code 2).
class BackendFailure : public Error {
public:
    explicit BackendFailure(const std::string& message)
        : Error("BackendFailure", message) {}
};

class DetectorUnavailable : public Error {
public:
    DetectorUnavailable() : Error("DetectorUnavailable", "no language detector configured") {}
};

class UndecidableText : public Error {
public:
    explicit UndecidableText(const std::string& message)
        : Error("UndecidableText", message) {}
};

class InsufficientData : public Error {
public:
    InsufficientData(std::size_t available, std::size_t requested)
        : Error("InsufficientData", "insufficient data: " + std::to_string(available) +
                                        " available, " + std::to_string(requested) +
                                        " requested"),
          available(available), requested(requested) {}

    std::size_t available;
    std::size_t requested;
};

class UnsupportedScript : public Error {
public:
    explicit UnsupportedScript(const std::string& message)
        : Error("UnsupportedScript", message) {}
};

class InsufficientIndicTexts : public Error {
public:
    InsufficientIndicTexts(std::size_t available, std::size_t required)
        : Error("InsufficientIndicTexts",
                "only " + std::to_string(available) + " Indic-script texts, " +
                    std::to_string(required) + " required"),
          available(available), required(required) {}

    std::size_t available;
    std::size_t required;
};

class UnknownLabel : public Error {
public:
    UnknownLabel(std::string raw, std::size_t row)
        : Error("UnknownLabel",
                "unknown label \"" + raw + "\" at row " + std::to_string(row)),
          raw(std::move(raw)), row(row) {}

    std::string raw;
    std::size_t row;  // 1-based data row; 0 when not applicable
};

class MalformedCsv : public Error {
public:
    MalformedCsv(const std::string& message, std::size_t line)
        : Error("MalformedCsv", message + " (line " + std::to_string(line) + ")"),
          line(line) {}

    std::size_t line;
};

class EmptyClass : public Error {
public:
    explicit EmptyClass(std::string label)
        : Error("EmptyClass", "class \"" + label + "\" has no rows"), label(std::move(label)) {}

    std::string label;
};

class EmptyCorpus : public Error {
public:
    EmptyCorpus() : Error("EmptyCorpus", "retraining corpus is empty") {}
};

class EmptyRunLog : public Error {
public:
    EmptyRunLog() : Error("EmptyRunLog", "checkpoint log is empty") {}
};

class SchemaMismatch : public Error {
public:
    explicit SchemaMismatch(const std::string& message) : Error("SchemaMismatch", message) {}
};

class LengthMismatch : public Error {
public:
    LengthMismatch(std::size_t gold, std::size_t pred)
        : Error("LengthMismatch", "gold has " + std::to_string(gold) + " labels, pred has " +
                                      std::to_string(pred)) {}
};

class EmptyInput : public Error {
public:
    EmptyInput() : Error("EmptyInput", "no labels to score") {}
};

class DuplicateCell : public Error {
public:
    DuplicateCell(const std::string& language, const std::string& condition)
        : Error("DuplicateCell", "more than one report for (" + language + ", " + condition + ")") {}
};

}  // namespace hatemix
