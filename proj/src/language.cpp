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


#include "hatemix/language.hpp"

#include "hatemix/error.hpp"

namespace hatemix {

std::string_view to_string(LanguageCondition c) {
    switch (c) {
        case LanguageCondition::english: return "english";
        case LanguageCondition::spanish: return "spanish";
        case LanguageCondition::hindi: return "hindi";
        case LanguageCondition::malayalam: return "malayalam";
        case LanguageCondition::tamil: return "tamil";
    }
    return "unknown";
}

std::optional<LanguageCondition> parse_condition(std::string_view name) {
    for (auto c : kAllConditions) {
        if (to_string(c) == name) return c;
    }
    return std::nullopt;
}

LanguageCondition require_condition(std::string_view name) {
    if (auto c = parse_condition(name)) return *c;
    throw ConfigError("unknown language condition: " + std::string(name));
}

std::string_view iso_code(LanguageCondition c) {
    switch (c) {
        case LanguageCondition::english: return "en";
        case LanguageCondition::spanish: return "es";
        case LanguageCondition::hindi: return "hi";
        case LanguageCondition::malayalam: return "ml";
        case LanguageCondition::tamil: return "ta";
    }
    return "";
}

std::optional<LanguageCondition> condition_for_iso(std::string_view code) {
    for (auto c : kAllConditions) {
        if (iso_code(c) == code) return c;
    }
    return std::nullopt;
}

bool is_indic(LanguageCondition c) {
    return c == LanguageCondition::hindi || c == LanguageCondition::malayalam ||
           c == LanguageCondition::tamil;
}

std::string_view to_string(ExperimentCondition c) {
    switch (c) {
        case ExperimentCondition::baseline: return "baseline";
        case ExperimentCondition::retrained: return "retrained";
        case ExperimentCondition::script_mixed: return "script-mixed";
    }
    return "baseline";
}

ExperimentCondition parse_experiment_condition(std::string_view name) {
    for (auto c : kAllExperimentConditions) {
        if (to_string(c) == name) return c;
    }
    if (name == "script_mixed") return ExperimentCondition::script_mixed;
    throw ConfigError("unknown condition: " + std::string(name));
}

}  // namespace hatemix
