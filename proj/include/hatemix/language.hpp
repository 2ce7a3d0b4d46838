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

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace hatemix {

// The five shared-task language conditions.
enum class LanguageCondition { english, spanish, hindi, malayalam, tamil };

inline constexpr std::array<LanguageCondition, 5> kAllConditions = {
    LanguageCondition::english, LanguageCondition::spanish, LanguageCondition::hindi,
    LanguageCondition::malayalam, LanguageCondition::tamil};

std::string_view to_string(LanguageCondition c);
std::optional<LanguageCondition> parse_condition(std::string_view name);
// Throws ConfigError on an unknown name.
LanguageCondition require_condition(std::string_view name);

// ISO 639-1 code the language detector reports for the condition.
std::string_view iso_code(LanguageCondition c);
std::optional<LanguageCondition> condition_for_iso(std::string_view code);

// Hindi, Malayalam and Tamil are written in Indic scripts.
bool is_indic(LanguageCondition c);

// Experimental conditions compared in the result tables.
enum class ExperimentCondition { baseline, retrained, script_mixed };

inline constexpr std::array<ExperimentCondition, 3> kAllExperimentConditions = {
    ExperimentCondition::baseline, ExperimentCondition::retrained,
    ExperimentCondition::script_mixed};

std::string_view to_string(ExperimentCondition c);
// Accepts "baseline", "retrained", "script-mixed". Throws ConfigError.
ExperimentCondition parse_experiment_condition(std::string_view name);

}  // namespace hatemix
