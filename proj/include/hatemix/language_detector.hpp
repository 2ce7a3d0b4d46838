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

#include <string>
#include <string_view>
#include <vector>

#include "hatemix/corpus_ingest.hpp"

namespace hatemix {

// Dependency-free language identifier.
//
// The dominant letter script decides the candidate set. Scripts used by a
// single language of interest (Malayalam, Tamil, ...) map straight to it.
// Latin and Devanagari text is disambiguated with a naive Bayes posterior
// over per-language function-word lists; tokens outside every list carry no
// evidence, so text without function words gets a flat posterior and a low
// confidence. The reported confidence is
//   (share of letters in the dominant script) x (posterior of the language).
class BuiltinLanguageDetector : public LanguageDetector {
public:
    std::string id() const override { return "builtin-stopword-nb-v1"; }
    std::vector<LanguageGuess> candidates(std::string_view text) const override;
};

}  // namespace hatemix
