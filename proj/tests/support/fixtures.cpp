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


#include "support/fixtures.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sys/wait.h>

#include "hatemix/csv.hpp"
#include "hatemix/error.hpp"
#include "hatemix/rng.hpp"
#include "hatemix/unicode.hpp"
#include "json.hpp"

namespace hatemix::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "hatemix-test-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

namespace {

template <typename T>
const T& pick(const std::vector<T>& v, Rng& rng) {
    return v[uniform_index(rng, v.size())];
}

// Pronounceable Latin filler that is in no detector word list.
std::string latin_word(Rng& rng) {
    static const std::vector<std::string> onsets = {"br", "k", "st", "pl", "m", "v", "gr",
                                                    "t", "dr", "fl", "sn", "z"};
    static const std::vector<std::string> nuclei = {"a", "o", "u", "ea", "oi", "e"};
    std::string w;
    const auto syllables = 2 + uniform_index(rng, 2);
    for (std::uint64_t i = 0; i < syllables; ++i) w += pick(onsets, rng) + pick(nuclei, rng);
    return w + "x";
}

std::string syllables(Rng& rng, const std::vector<char32_t>& consonants,
                      const std::vector<char32_t>& signs, int count) {
    std::u32string out;
    for (int i = 0; i < count; ++i) {
        out += pick(consonants, rng);
        if (uniform_index(rng, 3) != 0) out += pick(signs, rng);
    }
    return unicode::encode(out);
}

std::vector<char32_t> range(char32_t a, char32_t b) {
    std::vector<char32_t> v;
    for (char32_t c = a; c <= b; ++c) v.push_back(c);
    return v;
}

std::string indic_word(LanguageCondition language, Rng& rng) {
    static const auto deva_c = range(0x0915, 0x0928);
    static const std::vector<char32_t> deva_s = {0x093E, 0x093F, 0x0940, 0x0941, 0x0947, 0x094B};
    static const auto mal_c = range(0x0D15, 0x0D28);
    static const std::vector<char32_t> mal_s = {0x0D3E, 0x0D3F, 0x0D40, 0x0D41, 0x0D46, 0x0D47};
    static const std::vector<char32_t> tam_c = {0x0B95, 0x0B99, 0x0B9A, 0x0B9E, 0x0B9F, 0x0BA3,
                                                0x0BA4, 0x0BA8, 0x0BAA, 0x0BAE, 0x0BAF, 0x0BB0,
                                                0x0BB2, 0x0BB5, 0x0BB4, 0x0BB3, 0x0BB1, 0x0BA9};
    static const std::vector<char32_t> tam_s = {0x0BBE, 0x0BBF, 0x0BC0, 0x0BC1, 0x0BC6, 0x0BCA};
    const int n = 2 + static_cast<int>(uniform_index(rng, 3));
    switch (language) {
        case LanguageCondition::hindi: return syllables(rng, deva_c, deva_s, n);
        case LanguageCondition::malayalam: return syllables(rng, mal_c, mal_s, n);
        case LanguageCondition::tamil: return syllables(rng, tam_c, tam_s, n);
        default: return latin_word(rng);
    }
}

const std::vector<std::string>& function_words(LanguageCondition language) {
    static const std::vector<std::string> en = {"the", "this", "have", "with", "they", "would",
                                                "there", "which", "about", "people", "should"};
    static const std::vector<std::string> es = {"los", "las", "del", "está", "pero", "porque",
                                                "cuando", "hay", "eso", "también", "muy"};
    static const std::vector<std::string> hi = {"है", "में", "और", "नहीं", "भी", "था",
                                                "क्या", "लिए", "बहुत", "हम", "आप"};
    static const std::vector<std::string> none;
    switch (language) {
        case LanguageCondition::english: return en;
        case LanguageCondition::spanish: return es;
        case LanguageCondition::hindi: return hi;
        default: return none;
    }
}

std::string compose(LanguageCondition language, Rng& rng, std::size_t min_cps) {
    const auto& fw = function_words(language);
    std::string text;
    std::size_t words = 0;
    while (unicode::code_point_count(text) < min_cps || words < 8) {
        if (!text.empty()) text += ' ';
        if (!fw.empty() && words % 2 == 0) {
            text += pick(fw, rng);
        } else {
            text += indic_word(language, rng);
        }
        ++words;
    }
    return text;
}

std::string iso_timestamp(int month, int day, int hour) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "2019-%02d-%02dT%02d:15:00Z", month, day, hour);
    return buf;
}

std::string record(const std::string& id, const std::string& text, const std::string& ts,
                   const std::string& country) {
    return nlohmann::json{{"id", id}, {"text", text}, {"timestamp", ts}, {"country", country}}
        .dump();
}

}  // namespace

std::string synthetic_message(LanguageCondition language, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    return compose(language, rng, 60);
}

std::string synthetic_raw_dump(std::size_t per_language, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    std::string out;
    std::size_t id = 0;
    auto next_id = [&] { return "t" + std::to_string(++id); };
    std::set<std::string> seen;
    for (auto lang : kAllConditions) {
        for (std::size_t i = 0; i < per_language; ++i) {
            std::string text;
            do {
                text = compose(lang, rng, 60);
            } while (!seen.insert(text).second);
            const int month = 1 + static_cast<int>(uniform_index(rng, 12));
            const int day = 1 + static_cast<int>(uniform_index(rng, 28));
            const std::string ts = iso_timestamp(month, day, static_cast<int>(uniform_index(rng, 24)));
            // Decorations removed by cleaning.
            std::string raw = text;
            if (i % 3 == 0) raw = "https://example.org/p/" + std::to_string(i) + " " + raw;
            if (i % 4 == 1) raw += " #tag" + std::to_string(i);
            if (i % 5 == 2) raw += "!!!";
            out += record(next_id(), raw, ts, "IN") + '\n';
            // An exact duplicate after cleaning.
            if (i % 7 == 0 && i % 5 != 2) out += record(next_id(), text, ts, "IN") + '\n';
        }
        // Dropped: too short, wrong year, wrong country.
        out += record(next_id(), indic_word(lang, rng), iso_timestamp(3, 3, 3), "IN") + '\n';
        out += record(next_id(), compose(lang, rng, 60), "2018-06-01T00:00:00Z", "IN") + '\n';
        out += record(next_id(), compose(lang, rng, 60), iso_timestamp(6, 1, 0), "US") + '\n';
    }
    out += "{not json\n";
    out += "{\"id\": 1}\n";
    return out;
}

std::vector<std::string> synthetic_indic_texts(LanguageCondition language, std::size_t n,
                                               std::uint64_t seed) {
    Rng rng = make_rng(seed);
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(compose(language, rng, 60));
    return out;
}

SeparableSplits separable_task_a(std::size_t total, std::uint64_t seed, LanguageCondition language) {
    static const std::vector<std::vector<std::string>> vocab = {
        {"slurx", "mockx", "vilex", "sickx", "grossx", "shamex", "hatex", "sneerx"},
        {"sunnyx", "picnicx", "footballx", "coffeex", "gardenx", "moviex", "musicx", "bookx"},
        {"fakeidx", "pretendx", "costumex", "wrongbodyx", "deludedx", "phasex", "trickx",
         "imposterx"}};
    static const std::vector<std::string> filler = {"the", "a", "is", "this", "really", "today",
                                                    "people", "so", "very", "and", "what", "just"};
    const auto& schema = TaskSchema::task_a();
    // Schema order: homophobia, non-anti-LGBT+, transphobia.
    const std::vector<std::size_t> train_mix = {3, 5, 2};  // weights per class
    Rng rng = make_rng(seed);
    auto make_row = [&](std::size_t cls) {
        std::vector<std::string> words;
        for (int i = 0; i < 3; ++i) words.push_back(pick(vocab[cls], rng));
        for (int i = 0; i < 6; ++i) words.push_back(pick(filler, rng));
        for (std::size_t i = words.size(); i > 1; --i) {
            std::swap(words[i - 1], words[uniform_index(rng, i)]);
        }
        std::string text;
        for (const auto& w : words) text += (text.empty() ? "" : " ") + w;
        return LabeledRow{text, schema.labels()[cls]};
    };

    const std::size_t n_train = total * 70 / 100;
    const std::size_t n_val = (total - n_train) / 2;
    const std::size_t n_test = total - n_train - n_val;
    SeparableSplits s;
    for (auto* ds : {&s.train, &s.validation, &s.test}) {
        ds->language = language;
        ds->schema = schema;
    }
    s.train.split = Split::train;
    s.validation.split = Split::validation;
    s.test.split = Split::test;
    for (std::size_t i = 0; i < n_train; ++i) {
        const std::size_t r = i % 10;
        const std::size_t cls = r < train_mix[0] ? 0 : (r < train_mix[0] + train_mix[1] ? 1 : 2);
        s.train.rows.push_back(make_row(cls));
    }
    for (std::size_t i = 0; i < n_val; ++i) s.validation.rows.push_back(make_row(i % 3));
    for (std::size_t i = 0; i < n_test; ++i) s.test.rows.push_back(make_row(i % 3));
    return s;
}

void write_labeled_csv(const LabeledDataset& dataset, const fs::path& path) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    csv::write_row(out, {"text", "category"});
    for (const auto& r : dataset.rows) csv::write_row(out, {r.text, r.label});
}

SeparableSplits write_separable_fixture(const fs::path& labeled_dir, LanguageCondition language,
                                        std::size_t total, std::uint64_t seed) {
    auto s = separable_task_a(total, seed, language);
    const fs::path dir = labeled_dir / std::string(to_string(language)) / "task-a";
    write_labeled_csv(s.train, dir / "train.csv");
    write_labeled_csv(s.validation, dir / "validation.csv");
    write_labeled_csv(s.test, dir / "test.csv");
    return s;
}

ModelHandle StubBackend::pretrained() const {
    ModelHandle h;
    h.backend_id = "stub";
    h.artifact_uri = "pretrained:stub";
    return h;
}

namespace {

void stub_run(int epochs, int eval_every, std::size_t rows, int batch,
              const fs::path& work_dir, const char* prefix, int fail_after, const EvalSink& sink) {
    fs::create_directories(work_dir / "checkpoints");
    const std::size_t per_epoch = (rows + static_cast<std::size_t>(batch) - 1) / static_cast<std::size_t>(batch);
    std::int64_t step = 0;
    int reported = 0;
    for (int e = 0; e < epochs; ++e) {
        for (std::size_t b = 0; b < per_epoch; ++b) {
            ++step;
            if (step % eval_every == 0 || b + 1 == per_epoch) {
                if (fail_after >= 0 && reported == fail_after) {
                    throw BackendFailure("stub backend failure");
                }
                const std::string uri =
                    std::string("checkpoints/") + prefix + "-" + std::to_string(step);
                std::ofstream(work_dir / uri) << step << '\n';
                sink(step, 1.0 + 1.0 / static_cast<double>(step), uri);
                ++reported;
            }
        }
    }
}

}  // namespace

void StubBackend::retrain_mlm(const ModelHandle&, std::span<const std::string> texts,
                              const RetrainConfig& config, const fs::path& work_dir,
                              const EvalSink& sink) {
    stub_run(config.epochs, config.eval_every_steps, texts.size(), config.batch_size, work_dir,
             "mlm", fail_after, sink);
}

void StubBackend::finetune_classifier(const ModelHandle&, std::span<const LabeledRow> train,
                                      std::span<const LabeledRow>, std::span<const std::string>,
                                      const FinetuneConfig& config, const fs::path& work_dir,
                                      const EvalSink& sink) {
    stub_run(config.epochs, config.eval_every_steps, train.size(), config.batch_size, work_dir,
             "clf", fail_after, sink);
}

std::vector<std::size_t> StubBackend::predict(const ClassifierHandle&,
                                              std::span<const std::string> texts) {
    return std::vector<std::size_t>(texts.size(), 0);
}

fs::path cli_path() { return HATEMIX_CLI_PATH; }

int run_cli(const std::string& args, std::string* output) {
    const std::string cmd = "'" + cli_path().string() + "' " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed");
    std::string text;
    char buf[4096];
    while (std::fgets(buf, sizeof buf, pipe)) text += buf;
    const int status = pclose(pipe);
    if (output) *output = text;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace hatemix::testing
