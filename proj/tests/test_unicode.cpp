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


#include "doctest.h"
#include "hatemix/unicode.hpp"

namespace uc = hatemix::unicode;

TEST_SUITE("unicode") {

TEST_CASE("decode and encode round trip") {
    const std::string s = "abc \xC3\xB1 \xE0\xA4\x95 \xF0\x9F\x98\x80";  // ñ क 😀
    const auto cps = uc::decode(s);
    CHECK(cps == std::u32string{U'a', U'b', U'c', U' ', 0xF1, U' ', 0x915, U' ', 0x1F600});
    CHECK(uc::encode(cps) == s);
    CHECK(uc::code_point_count(s) == 9);
}

TEST_CASE("invalid bytes decode to the replacement character") {
    CHECK(uc::decode("a\xFF" "b") == std::u32string{U'a', uc::kReplacement, U'b'});
    CHECK(uc::decode("\xE0\xA4") == std::u32string{uc::kReplacement, uc::kReplacement});
}

TEST_CASE("lower-casing") {
    CHECK(uc::to_lower(U'Q') == U'q');
    CHECK(uc::to_lower(0xD1) == 0xF1);    // Ñ
    CHECK(uc::to_lower(0xD7) == 0xD7);    // ×
    CHECK(uc::to_lower(0x100) == 0x101);  // Ā
    CHECK(uc::to_lower(0x139) == 0x13A);  // Ĺ
    CHECK(uc::to_lower(0x17D) == 0x17E);  // Ž
    CHECK(uc::to_lower(0x915) == 0x915);
}

TEST_CASE("Indic letters exclude marks, digits and dandas") {
    CHECK(uc::is_indic_letter(0x0915));   // क
    CHECK(uc::is_indic_letter(0x0905));   // अ
    CHECK_FALSE(uc::is_indic_letter(0x093E));  // ा
    CHECK_FALSE(uc::is_indic_letter(0x094D));  // virama
    CHECK_FALSE(uc::is_indic_letter(0x0966));  // ०
    CHECK_FALSE(uc::is_indic_letter(0x0964));  // ।
    CHECK(uc::is_indic_letter(0x0D3A));   // Malayalam TTTA
    CHECK(uc::is_indic_letter(0x0B95));   // க
    CHECK_FALSE(uc::is_indic_letter(0x0BCD));
}

TEST_CASE("letter scripts") {
    CHECK(uc::letter_script(U'a') == uc::LetterScript::latin);
    CHECK(uc::letter_script(0x1E6D) == uc::LetterScript::latin);  // ṭ
    CHECK(uc::letter_script(0x0915) == uc::LetterScript::devanagari);
    CHECK(uc::letter_script(0x0D15) == uc::LetterScript::malayalam);
    CHECK(uc::letter_script(0x0B95) == uc::LetterScript::tamil);
    CHECK(uc::letter_script(0x0431) == uc::LetterScript::cyrillic);
    CHECK(uc::letter_script(U'7') == uc::LetterScript::none);
    CHECK(uc::letter_script(0x093E) == uc::LetterScript::none);
}

}  // TEST_SUITE
