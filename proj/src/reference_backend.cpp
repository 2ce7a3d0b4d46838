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


// Deterministic CPU training backend.
//
// "Retraining" fits unigram token statistics (counts and document
// frequencies) on the corpus; its eval loss is the negative log-likelihood of
// held-out masked tokens under an add-one unigram model. A checkpoint only
// records its step: loading it replays the seeded schedule up to that step.
//
// Fine-tuning trains softmax regression over hashed unigram features with
// AdamW. When the encoder was retrained, features are weighted by the
// inverse document frequencies it learned.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <mutex>
#include <set>
#include <unordered_map>

#include "hatemix/error.hpp"
#include "hatemix/rng.hpp"
#include "hatemix/trainer.hpp"
#include "hatemix/unicode.hpp"

namespace hatemix {

namespace fs = std::filesystem;

namespace {

static_assert(std::endian::native == std::endian::little,
              "classifier checkpoints are stored little-endian");

constexpr const char* kBackendId = "reference";
constexpr const char* kPretrainedUri = "pretrained:reference-hash-v1";
constexpr std::uint32_t kBuckets = 1u << 14;
constexpr char kWeightsMagic[8] = {'H', 'M', 'X', 'L', 'R', '0', '0', '1'};

std::vector<std::string> tokenize(std::string_view text, int max_tokens) {
    std::vector<std::string> out;
    std::string cur;
    for (char32_t cp : unicode::decode(text)) {
        if (unicode::is_word_char(cp)) {
            unicode::append(cur, unicode::to_lower(cp));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    if (max_tokens > 0 && out.size() > static_cast<std::size_t>(max_tokens)) {
        out.resize(static_cast<std::size_t>(max_tokens));
    }
    return out;
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string step_name(const char* prefix, std::int64_t step, const char* ext) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "checkpoints/%s-step-%07lld%s", prefix,
                  static_cast<long long>(step), ext);
    return buf;
}

struct TokenStats {
    struct Entry {
        std::uint64_t count = 0;
        std::uint64_t df = 0;
    };
    std::unordered_map<std::string, Entry> vocab;
    std::uint64_t total = 0;
    std::uint64_t docs = 0;

    double idf(const std::string& token) const {
        auto it = vocab.find(token);
        const double df = it == vocab.end() ? 0.0 : static_cast<double>(it->second.df);
        return std::log((1.0 + static_cast<double>(docs)) / (1.0 + df)) + 1.0;
    }
};

struct MlmPlan {
    std::vector<std::string> texts;
    std::uint64_t seed = 0;
    int epochs = 1;
    int eval_every_steps = 1;
    int batch_size = 1;
    int max_seq_length = 512;
    double mlm_probability = 0.15;

    nlohmann::json to_json() const {
        return {{"format", "reference-mlm-plan"},
                {"seed", seed},
                {"epochs", epochs},
                {"eval_every_steps", eval_every_steps},
                {"batch_size", batch_size},
                {"max_seq_length", max_seq_length},
                {"mlm_probability", mlm_probability},
                {"texts", texts}};
    }

    static MlmPlan from_json(const nlohmann::json& j) {
        MlmPlan p;
        p.seed = j.at("seed").get<std::uint64_t>();
        p.epochs = j.at("epochs").get<int>();
        p.eval_every_steps = j.at("eval_every_steps").get<int>();
        p.batch_size = j.at("batch_size").get<int>();
        p.max_seq_length = j.at("max_seq_length").get<int>();
        p.mlm_probability = j.at("mlm_probability").get<double>();
        p.texts = j.at("texts").get<std::vector<std::string>>();
        return p;
    }
};

using MlmEval = std::function<void(std::int64_t step, double loss)>;

// Runs the seeded schedule. Stops after `stop_step` when it is positive and
// returns the statistics at that point.
TokenStats run_mlm(const MlmPlan& plan, std::int64_t stop_step, const MlmEval& on_eval) {
    const std::size_t n = plan.texts.size();
    Rng rng = make_rng(plan.seed);
    std::vector<std::size_t> eval_idx;
    std::vector<std::size_t> train_idx;
    if (n == 1) {
        eval_idx = {0};
        train_idx = {0};
    } else {
        eval_idx = sample_without_replacement(n, std::max<std::size_t>(1, n / 10), rng);
        std::sort(eval_idx.begin(), eval_idx.end());
        for (std::size_t i = 0, e = 0; i < n; ++i) {
            if (e < eval_idx.size() && eval_idx[e] == i) {
                ++e;
            } else {
                train_idx.push_back(i);
            }
        }
    }

    std::vector<std::string> masked;
    for (std::size_t i : eval_idx) {
        const auto toks = tokenize(plan.texts[i], plan.max_seq_length);
        if (toks.empty()) continue;
        bool any = false;
        for (const auto& t : toks) {
            if (uniform_unit(rng) < plan.mlm_probability) {
                masked.push_back(t);
                any = true;
            }
        }
        if (!any) masked.push_back(toks[uniform_index(rng, toks.size())]);
    }

    std::vector<std::vector<std::string>> train_tokens;
    train_tokens.reserve(train_idx.size());
    for (std::size_t i : train_idx) train_tokens.push_back(tokenize(plan.texts[i], plan.max_seq_length));

    TokenStats stats;
    auto eval_loss = [&] {
        if (masked.empty()) return 0.0;
        const double denom = static_cast<double>(stats.total + stats.vocab.size() + 1);
        double sum = 0.0;
        for (const auto& t : masked) {
            auto it = stats.vocab.find(t);
            const double c = it == stats.vocab.end() ? 0.0 : static_cast<double>(it->second.count);
            sum -= std::log((c + 1.0) / denom);
        }
        return sum / static_cast<double>(masked.size());
    };

    const std::size_t m = train_tokens.size();
    const std::size_t bs = static_cast<std::size_t>(plan.batch_size);
    std::int64_t step = 0;
    for (int epoch = 0; epoch < plan.epochs; ++epoch) {
        const auto order = sample_without_replacement(m, m, rng);
        for (std::size_t start = 0; start < m; start += bs) {
            const std::size_t end = std::min(m, start + bs);
            for (std::size_t k = start; k < end; ++k) {
                const auto& toks = train_tokens[order[k]];
                std::set<std::string_view> seen;
                for (const auto& t : toks) {
                    auto& e = stats.vocab[t];
                    ++e.count;
                    ++stats.total;
                    if (epoch == 0 && seen.insert(t).second) ++e.df;
                }
                if (epoch == 0) ++stats.docs;
            }
            ++step;
            const bool epoch_end = end == m;
            if (on_eval && (step % plan.eval_every_steps == 0 || epoch_end)) {
                on_eval(step, eval_loss());
            }
            if (stop_step > 0 && step == stop_step) return stats;
        }
    }
    if (stop_step > 0 && step < stop_step) {
        throw BackendFailure("checkpoint step " + std::to_string(stop_step) +
                             " is past the end of the schedule");
    }
    return stats;
}

// Sparse L2-normalised feature vector, sorted by bucket.
using Features = std::vector<std::pair<std::uint32_t, double>>;

Features featurize(std::string_view text, const TokenStats* stats, int max_seq_length) {
    std::map<std::uint32_t, double> acc;
    for (const auto& t : tokenize(text, max_seq_length)) {
        const auto bucket = static_cast<std::uint32_t>(fnv1a(t) % kBuckets);
        acc[bucket] += stats ? stats->idf(t) : 1.0;
    }
    double norm = 0.0;
    for (const auto& [b, v] : acc) norm += v * v;
    norm = std::sqrt(norm);
    Features out;
    out.reserve(acc.size());
    for (const auto& [b, v] : acc) out.emplace_back(b, v / norm);
    return out;
}

struct Weights {
    std::uint32_t k = 0;
    std::vector<double> w;  // k × kBuckets, row-major
    std::vector<double> b;

    explicit Weights(std::uint32_t classes = 0)
        : k(classes), w(static_cast<std::size_t>(classes) * kBuckets, 0.0), b(classes, 0.0) {}

    void logits(const Features& x, std::vector<double>& z) const {
        z.assign(b.begin(), b.end());
        for (std::uint32_t c = 0; c < k; ++c) {
            const double* row = w.data() + static_cast<std::size_t>(c) * kBuckets;
            double s = 0.0;
            for (const auto& [j, v] : x) s += row[j] * v;
            z[c] += s;
        }
    }

    void save(const fs::path& path) const {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw BackendFailure("cannot write checkpoint " + path.string());
        const std::uint32_t dims[2] = {k, kBuckets};
        out.write(kWeightsMagic, sizeof kWeightsMagic);
        out.write(reinterpret_cast<const char*>(dims), sizeof dims);
        out.write(reinterpret_cast<const char*>(w.data()),
                  static_cast<std::streamsize>(w.size() * sizeof(double)));
        out.write(reinterpret_cast<const char*>(b.data()),
                  static_cast<std::streamsize>(b.size() * sizeof(double)));
        if (!out) throw BackendFailure("cannot write checkpoint " + path.string());
    }

    static Weights load(const fs::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw BackendFailure("missing checkpoint " + path.string());
        char magic[sizeof kWeightsMagic];
        std::uint32_t dims[2] = {0, 0};
        in.read(magic, sizeof magic);
        in.read(reinterpret_cast<char*>(dims), sizeof dims);
        if (!in || std::memcmp(magic, kWeightsMagic, sizeof magic) != 0 || dims[1] != kBuckets ||
            dims[0] == 0) {
            throw BackendFailure("not a reference classifier checkpoint: " + path.string());
        }
        Weights out(dims[0]);
        in.read(reinterpret_cast<char*>(out.w.data()),
                static_cast<std::streamsize>(out.w.size() * sizeof(double)));
        in.read(reinterpret_cast<char*>(out.b.data()),
                static_cast<std::streamsize>(out.b.size() * sizeof(double)));
        if (!in) throw BackendFailure("truncated checkpoint " + path.string());
        return out;
    }
};

void softmax(std::vector<double>& z) {
    const double mx = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - mx);
        sum += v;
    }
    for (double& v : z) v /= sum;
}

double mean_cross_entropy(const Weights& wts, const std::vector<Features>& xs,
                          const std::vector<std::size_t>& ys) {
    std::vector<double> z;
    double sum = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        wts.logits(xs[i], z);
        softmax(z);
        sum -= std::log(std::max(z[ys[i]], 1e-300));
    }
    return sum / static_cast<double>(xs.size());
}

std::vector<std::size_t> label_indices(std::span<const LabeledRow> rows,
                                       std::span<const std::string> labels) {
    std::vector<std::size_t> out;
    out.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        auto it = std::find(labels.begin(), labels.end(), rows[r].label);
        if (it == labels.end()) throw UnknownLabel(rows[r].label, r + 1);
        out.push_back(static_cast<std::size_t>(it - labels.begin()));
    }
    return out;
}

class ReferenceBackend final : public TrainerBackend {
public:
    std::string id() const override { return kBackendId; }
    bool supports_mlm() const override { return true; }

    ModelHandle pretrained() const override {
        ModelHandle h;
        h.backend_id = kBackendId;
        h.artifact_uri = kPretrainedUri;
        h.provenance = ExperimentCondition::baseline;
        return h;
    }

    void retrain_mlm(const ModelHandle& base, std::span<const std::string> texts,
                     const RetrainConfig& config, const fs::path& work_dir,
                     const EvalSink& sink) override {
        if (base.artifact_uri != kPretrainedUri) {
            throw BackendFailure("reference retraining starts from " + std::string(kPretrainedUri));
        }
        MlmPlan plan;
        plan.texts.assign(texts.begin(), texts.end());
        plan.seed = config.seed;
        plan.epochs = config.epochs;
        plan.eval_every_steps = config.eval_every_steps;
        plan.batch_size = config.batch_size;
        plan.max_seq_length = config.max_seq_length;
        plan.mlm_probability = config.mlm_probability;

        fs::create_directories(work_dir / "checkpoints");
        const std::string plan_name = "mlm-plan.json";
        {
            std::ofstream out(work_dir / plan_name, std::ios::binary | std::ios::trunc);
            if (!out) throw BackendFailure("cannot write " + (work_dir / plan_name).string());
            out << plan.to_json().dump() << '\n';
        }
        run_mlm(plan, 0, [&](std::int64_t step, double loss) {
            const std::string uri = step_name("mlm", step, ".json");
            std::ofstream out(work_dir / uri, std::ios::binary | std::ios::trunc);
            out << nlohmann::json{{"format", "reference-mlm-checkpoint"},
                                  {"plan", plan_name},
                                  {"step", step}}
                       .dump()
                << '\n';
            if (!out) throw BackendFailure("cannot write " + (work_dir / uri).string());
            sink(step, loss, uri);
        });
    }

    void finetune_classifier(const ModelHandle& encoder, std::span<const LabeledRow> train,
                             std::span<const LabeledRow> validation,
                             std::span<const std::string> labels, const FinetuneConfig& config,
                             const fs::path& work_dir, const EvalSink& sink) override {
        const auto stats = encoder_stats(encoder);
        const auto k = static_cast<std::uint32_t>(labels.size());
        std::vector<Features> xs, vxs;
        for (const auto& r : train) xs.push_back(featurize(r.text, stats.get(), config.max_seq_length));
        for (const auto& r : validation) {
            vxs.push_back(featurize(r.text, stats.get(), config.max_seq_length));
        }
        const auto ys = label_indices(train, labels);
        const auto vys = label_indices(validation, labels);

        fs::create_directories(work_dir / "checkpoints");
        Weights wts(k);
        std::vector<double> mw(wts.w.size(), 0.0), vw(wts.w.size(), 0.0);
        std::vector<double> mb(k, 0.0), vb(k, 0.0);
        std::vector<double> gw(wts.w.size(), 0.0), gb(k, 0.0);
        std::vector<double> z;
        const double lr = config.learning_rate;
        const double b1 = config.adam_beta1, b2 = config.adam_beta2, eps = config.adam_epsilon;
        const double decay = 1.0 - lr * config.weight_decay;

        Rng rng = make_rng(config.seed);
        const std::size_t n = xs.size();
        const std::size_t bs = static_cast<std::size_t>(config.batch_size);
        std::int64_t step = 0;
        for (int epoch = 0; epoch < config.epochs; ++epoch) {
            const auto order = sample_without_replacement(n, n, rng);
            for (std::size_t start = 0; start < n; start += bs) {
                const std::size_t end = std::min(n, start + bs);
                const double scale = 1.0 / static_cast<double>(end - start);
                std::fill(gw.begin(), gw.end(), 0.0);
                std::fill(gb.begin(), gb.end(), 0.0);
                for (std::size_t q = start; q < end; ++q) {
                    const auto i = order[q];
                    wts.logits(xs[i], z);
                    softmax(z);
                    z[ys[i]] -= 1.0;
                    for (std::uint32_t c = 0; c < k; ++c) {
                        const double g = z[c] * scale;
                        gb[c] += g;
                        double* row = gw.data() + static_cast<std::size_t>(c) * kBuckets;
                        for (const auto& [j, v] : xs[i]) row[j] += g * v;
                    }
                }
                ++step;
                const double c1 = 1.0 - std::pow(b1, static_cast<double>(step));
                const double c2 = 1.0 - std::pow(b2, static_cast<double>(step));
                for (std::size_t p = 0; p < wts.w.size(); ++p) {
                    mw[p] = b1 * mw[p] + (1.0 - b1) * gw[p];
                    vw[p] = b2 * vw[p] + (1.0 - b2) * gw[p] * gw[p];
                    wts.w[p] *= decay;
                    wts.w[p] -= lr * (mw[p] / c1) / (std::sqrt(vw[p] / c2) + eps);
                }
                // Biases are not decayed.
                for (std::uint32_t c = 0; c < k; ++c) {
                    mb[c] = b1 * mb[c] + (1.0 - b1) * gb[c];
                    vb[c] = b2 * vb[c] + (1.0 - b2) * gb[c] * gb[c];
                    wts.b[c] -= lr * (mb[c] / c1) / (std::sqrt(vb[c] / c2) + eps);
                }
                if (step % config.eval_every_steps == 0 || end == n) {
                    const std::string uri = step_name("clf", step, ".bin");
                    wts.save(work_dir / uri);
                    sink(step, mean_cross_entropy(wts, vxs, vys), uri);
                }
            }
        }
    }

    std::vector<std::size_t> predict(const ClassifierHandle& classifier,
                                     std::span<const std::string> texts) override {
        const auto stats = encoder_stats(classifier.encoder);
        const Weights wts = Weights::load(classifier.resolved());
        if (wts.k != classifier.labels.size()) {
            throw BackendFailure("checkpoint has " + std::to_string(wts.k) + " classes, handle has " +
                                 std::to_string(classifier.labels.size()));
        }
        int max_seq = 512;
        {
            std::ifstream in(classifier.base_dir / kConfigSnapshot);
            if (in) {
                const auto j = nlohmann::json::parse(in, nullptr, false);
                if (!j.is_discarded() && j.contains("config")) {
                    max_seq = j["config"].value("max_seq_length", max_seq);
                }
            }
        }
        std::vector<std::size_t> out;
        out.reserve(texts.size());
        std::vector<double> z;
        for (const auto& t : texts) {
            wts.logits(featurize(t, stats.get(), max_seq), z);
            out.push_back(static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin()));
        }
        return out;
    }

private:
    std::shared_ptr<const TokenStats> encoder_stats(const ModelHandle& encoder) {
        if (encoder.backend_id != kBackendId) {
            throw BackendFailure("encoder belongs to backend " + encoder.backend_id);
        }
        if (encoder.is_pretrained()) {
            if (encoder.artifact_uri != kPretrainedUri) {
                throw BackendFailure("unknown pretrained model " + encoder.artifact_uri);
            }
            return nullptr;
        }
        const fs::path ckpt = encoder.resolved().lexically_normal();
        std::lock_guard lock(mu_);
        if (auto it = cache_.find(ckpt.string()); it != cache_.end()) return it->second;
        nlohmann::json meta, plan_json;
        try {
            std::ifstream in(ckpt, std::ios::binary);
            if (!in) throw BackendFailure("missing checkpoint " + ckpt.string());
            meta = nlohmann::json::parse(in);
            std::ifstream pin(encoder.base_dir / meta.at("plan").get<std::string>(), std::ios::binary);
            if (!pin) throw BackendFailure("missing retraining plan for " + ckpt.string());
            plan_json = nlohmann::json::parse(pin);
            auto stats = std::make_shared<const TokenStats>(
                run_mlm(MlmPlan::from_json(plan_json), meta.at("step").get<std::int64_t>(), {}));
            cache_.emplace(ckpt.string(), stats);
            return stats;
        } catch (const nlohmann::json::exception& e) {
            throw BackendFailure("bad retraining checkpoint " + ckpt.string() + ": " + e.what());
        }
    }

    std::mutex mu_;
    std::map<std::string, std::shared_ptr<const TokenStats>> cache_;
};

}  // namespace

std::unique_ptr<TrainerBackend> make_reference_backend() {
    return std::make_unique<ReferenceBackend>();
}

}  // namespace hatemix
