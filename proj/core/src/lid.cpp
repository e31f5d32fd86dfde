#include "geocorpus/lid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

namespace geocorpus::lid {

bool is_valid_label(std::string_view code) noexcept {
    if (code.size() != 3) return false;
    for (char c : code) {
        if (c < 'a' || c > 'z') return false;
    }
    return true;
}

void ModelConfig::validate() const {
    if (feature_dim < (1u << 10)) throw Error("feature_dim must be >= 1024");
    if (hidden_dim == 0) throw Error("hidden_dim must be positive");
    if (min_chars < 3) throw Error("min_chars must be >= 3");
    if (epochs == 0) throw Error("epochs must be positive");
    if (learning_rate <= 0) throw Error("learning_rate must be positive");
    if (batch_size == 0) throw Error("batch_size must be positive");
}

FeatureVector featurize(const std::vector<char32_t>& cps,
                        const ModelConfig& config) {
    if (cps.size() < 3) {
        throw TooShort("featurize requires at least 3 code points, got " +
                       std::to_string(cps.size()));
    }
    std::map<std::uint32_t, std::uint32_t> buckets;
    std::string trigram;
    for (std::size_t i = 0; i + 3 <= cps.size(); ++i) {
        trigram.clear();
        utf8_append(trigram, cps[i]);
        utf8_append(trigram, cps[i + 1]);
        utf8_append(trigram, cps[i + 2]);
        auto bucket = static_cast<std::uint32_t>(fnv1a64(trigram) % config.feature_dim);
        ++buckets[bucket];
    }
    double sumsq = 0.0;
    for (const auto& [idx, count] : buckets) {
        sumsq += static_cast<double>(count) * count;
    }
    const double inv_norm = 1.0 / std::sqrt(sumsq);
    FeatureVector fv;
    fv.indices.reserve(buckets.size());
    fv.values.reserve(buckets.size());
    for (const auto& [idx, count] : buckets) {
        fv.indices.push_back(idx);
        fv.values.push_back(static_cast<float>(count * inv_norm));
    }
    return fv;
}

FeatureVector featurize(std::string_view text, const ModelConfig& config) {
    return featurize(utf8_decode(text), config);
}

namespace {

void softmax_inplace(std::vector<double>& z) {
    double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - zmax);
        sum += v;
    }
    for (double& v : z) v /= sum;
}

// Forward pass in double precision from f32 weights.
struct Forward {
    std::vector<double> z1;      // pre-activation hidden
    std::vector<double> hidden;  // relu(z1)
    std::vector<double> probs;   // softmax output
};

Forward forward_pass(const FeatureVector& x, std::uint32_t hidden_dim,
                     const std::vector<float>& w1_feature_major,
                     const std::vector<float>& b1,
                     const std::vector<float>& w2,
                     const std::vector<float>& b2) {
    const std::size_t H = hidden_dim;
    const std::size_t L = b2.size();
    Forward f;
    f.z1.assign(b1.begin(), b1.end());
    for (std::size_t k = 0; k < x.nnz(); ++k) {
        const float* col = &w1_feature_major[static_cast<std::size_t>(x.indices[k]) * H];
        const double v = x.values[k];
        for (std::size_t h = 0; h < H; ++h) f.z1[h] += v * col[h];
    }
    f.hidden.resize(H);
    for (std::size_t h = 0; h < H; ++h) f.hidden[h] = f.z1[h] > 0 ? f.z1[h] : 0.0;
    f.probs.resize(L);
    for (std::size_t l = 0; l < L; ++l) {
        double z = b2[l];
        const float* row = &w2[l * H];
        for (std::size_t h = 0; h < H; ++h) z += row[h] * f.hidden[h];
        f.probs[l] = z;
    }
    softmax_inplace(f.probs);
    return f;
}

}  // namespace

std::vector<double> LidModel::probabilities(const FeatureVector& features) const {
    return forward_pass(features, config_.hidden_dim, w1_, b1_, w2_, b2_).probs;
}

std::pair<LanguageLabel, double> LidModel::predict(std::string_view text) const {
    auto cps = utf8_decode(text);
    if (cps.size() < config_.min_chars) {
        throw BelowMinChars("text has " + std::to_string(cps.size()) +
                            " code points, model requires " +
                            std::to_string(config_.min_chars));
    }
    auto probs = probabilities(featurize(cps, config_));
    std::size_t best = 0;
    for (std::size_t l = 1; l < probs.size(); ++l) {
        if (probs[l] > probs[best]) best = l;  // ties keep earlier label
    }
    return {labels_[best], probs[best]};
}

std::vector<float> LidModel::w1_row_major() const {
    const std::size_t H = config_.hidden_dim;
    const std::size_t F = config_.feature_dim;
    std::vector<float> out(w1_.size());
    for (std::size_t f = 0; f < F; ++f) {
        for (std::size_t h = 0; h < H; ++h) {
            out[h * F + f] = w1_[f * H + h];
        }
    }
    return out;
}

bool LidModel::operator==(const LidModel& other) const {
    // Serialized identity: exactly the fields the model file carries.
    return config_.feature_dim == other.config_.feature_dim &&
           config_.hidden_dim == other.config_.hidden_dim &&
           labels_ == other.labels_ && w1_ == other.w1_ && b1_ == other.b1_ &&
           w2_ == other.w2_ && b2_ == other.b2_;
}

LidModel train(const std::vector<std::pair<std::string, LanguageLabel>>& samples,
               const ModelConfig& config) {
    config.validate();
    if (samples.empty()) throw EmptyDataset("no training samples");

    std::set<LanguageLabel> label_set;
    for (const auto& [text, label] : samples) label_set.insert(label);
    if (label_set.size() < 2) {
        throw SingleClass("training data contains a single label");
    }

    std::vector<FeatureVector> features;
    features.reserve(samples.size());
    std::vector<std::size_t> targets;
    targets.reserve(samples.size());

    LidModel model;
    model.config_ = config;
    model.labels_.assign(label_set.begin(), label_set.end());

    std::map<LanguageLabel, std::size_t> label_index;
    for (std::size_t i = 0; i < model.labels_.size(); ++i) {
        label_index[model.labels_[i]] = i;
    }

    for (std::size_t i = 0; i < samples.size(); ++i) {
        auto cps = utf8_decode(samples[i].first);
        if (cps.size() < config.min_chars) {
            throw SampleTooShort(i, "sample " + std::to_string(i) + " has " +
                                        std::to_string(cps.size()) +
                                        " code points, need " +
                                        std::to_string(config.min_chars));
        }
        features.push_back(featurize(cps, config));
        targets.push_back(label_index.at(samples[i].second));
    }

    const std::size_t H = config.hidden_dim;
    const std::size_t F = config.feature_dim;
    const std::size_t L = model.labels_.size();

    Rng rng(config.seed);
    const double bound1 = 1.0 / std::sqrt(static_cast<double>(F));
    const double bound2 = 1.0 / std::sqrt(static_cast<double>(H));
    model.w1_.resize(F * H);
    for (auto& w : model.w1_) w = static_cast<float>(rng.next_double(-bound1, bound1));
    model.b1_.assign(H, 0.0f);
    model.w2_.resize(L * H);
    for (auto& w : model.w2_) w = static_cast<float>(rng.next_double(-bound2, bound2));
    model.b2_.assign(L, 0.0f);

    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), 0);

    std::vector<std::vector<double>> batch_dz1;
    std::vector<double> dw2(L * H), db2(L), dz2(L), da1(H);

    for (std::uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t end = std::min(order.size(),
                                             start + static_cast<std::size_t>(config.batch_size));
            const double inv_b = 1.0 / static_cast<double>(end - start);

            std::fill(dw2.begin(), dw2.end(), 0.0);
            std::fill(db2.begin(), db2.end(), 0.0);
            batch_dz1.clear();

            for (std::size_t s = start; s < end; ++s) {
                const std::size_t i = order[s];
                const FeatureVector& x = features[i];
                Forward f = forward_pass(x, config.hidden_dim, model.w1_,
                                         model.b1_, model.w2_, model.b2_);
                for (std::size_t l = 0; l < L; ++l) dz2[l] = f.probs[l];
                dz2[targets[i]] -= 1.0;

                for (std::size_t l = 0; l < L; ++l) {
                    db2[l] += dz2[l];
                    double* row = &dw2[l * H];
                    for (std::size_t h = 0; h < H; ++h) row[h] += dz2[l] * f.hidden[h];
                }
                std::fill(da1.begin(), da1.end(), 0.0);
                for (std::size_t l = 0; l < L; ++l) {
                    const float* row = &model.w2_[l * H];
                    for (std::size_t h = 0; h < H; ++h) da1[h] += dz2[l] * row[h];
                }
                std::vector<double> dz1(H);
                for (std::size_t h = 0; h < H; ++h) {
                    dz1[h] = f.z1[h] > 0 ? da1[h] : 0.0;
                }
                batch_dz1.push_back(std::move(dz1));
            }

            const double lr = config.learning_rate;
            for (std::size_t l = 0; l < L; ++l) {
                model.b2_[l] = static_cast<float>(model.b2_[l] - lr * inv_b * db2[l]);
                float* row = &model.w2_[l * H];
                const double* grow = &dw2[l * H];
                for (std::size_t h = 0; h < H; ++h) {
                    row[h] = static_cast<float>(row[h] - lr * inv_b * grow[h]);
                }
            }
            // Sparse first-layer update: only columns touched by the batch.
            for (std::size_t s = start; s < end; ++s) {
                const std::size_t i = order[s];
                const FeatureVector& x = features[i];
                const std::vector<double>& dz1 = batch_dz1[s - start];
                for (std::size_t k = 0; k < x.nnz(); ++k) {
                    float* col = &model.w1_[static_cast<std::size_t>(x.indices[k]) * H];
                    const double scale = lr * inv_b * x.values[k];
                    for (std::size_t h = 0; h < H; ++h) {
                        col[h] = static_cast<float>(col[h] - scale * dz1[h]);
                    }
                }
                for (std::size_t h = 0; h < H; ++h) {
                    model.b1_[h] = static_cast<float>(
                        model.b1_[h] - lr * inv_b * batch_dz1[s - start][h]);
                }
            }
        }
    }
    return model;
}

EvalReport evaluate(const LidModel& model,
                    const std::vector<std::pair<std::string, LanguageLabel>>& test) {
    if (test.empty()) throw EmptyTestSet("empty test set");

    std::map<LanguageLabel, std::uint64_t> tp, fp, fn;
    for (const auto& label : model.labels()) tp[label] = fp[label] = fn[label] = 0;

    EvalReport report;
    report.n_samples = test.size();
    for (const auto& [text, truth] : test) {
        auto [predicted, conf] = model.predict(text);
        if (predicted == truth) {
            ++tp[truth];
        } else {
            ++fp[predicted];
            ++fn[truth];
        }
    }

    double f1_sum = 0.0;
    std::size_t f1_n = 0;
    for (const auto& label : model.labels()) {
        LabelMetrics m;
        const auto t = tp[label];
        m.support = t + fn[label];
        const auto pred = t + fp[label];
        m.precision = pred > 0 ? static_cast<double>(t) / pred : 0.0;
        m.recall = m.support > 0 ? static_cast<double>(t) / m.support : 0.0;
        m.f1 = (m.precision + m.recall) > 0
                   ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                   : 0.0;
        if (m.support > 0) {
            f1_sum += m.f1;
            ++f1_n;
        }
        report.per_label[label] = m;
    }
    report.macro_f1 = f1_n > 0 ? f1_sum / f1_n : 0.0;
    return report;
}

namespace {

constexpr char kMagic[4] = {'G', 'L', 'I', 'D'};

void write_u32(std::ostream& out, std::uint32_t v) {
    char buf[4];
    buf[0] = static_cast<char>(v & 0xFF);
    buf[1] = static_cast<char>((v >> 8) & 0xFF);
    buf[2] = static_cast<char>((v >> 16) & 0xFF);
    buf[3] = static_cast<char>((v >> 24) & 0xFF);
    out.write(buf, 4);
}

std::uint32_t read_u32(std::istream& in) {
    unsigned char buf[4];
    in.read(reinterpret_cast<char*>(buf), 4);
    if (!in) throw TruncatedFile("unexpected end of model file");
    return static_cast<std::uint32_t>(buf[0]) |
           (static_cast<std::uint32_t>(buf[1]) << 8) |
           (static_cast<std::uint32_t>(buf[2]) << 16) |
           (static_cast<std::uint32_t>(buf[3]) << 24);
}

void write_f32_array(std::ostream& out, const std::vector<float>& v) {
    for (float x : v) {
        std::uint32_t bits;
        std::memcpy(&bits, &x, 4);
        write_u32(out, bits);
    }
}

void read_f32_array(std::istream& in, std::vector<float>& v, std::size_t n) {
    v.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t bits = read_u32(in);
        std::memcpy(&v[i], &bits, 4);
    }
}

}  // namespace

void save_model(const LidModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open model file for writing: " + path);
    out.write(kMagic, 4);
    write_u32(out, LidModel::kFormatVersion);
    write_u32(out, model.config_.feature_dim);
    write_u32(out, model.config_.hidden_dim);
    write_u32(out, static_cast<std::uint32_t>(model.labels_.size()));
    for (const auto& label : model.labels_) {
        write_u32(out, static_cast<std::uint32_t>(label.code.size()));
        out.write(label.code.data(), static_cast<std::streamsize>(label.code.size()));
    }
    write_f32_array(out, model.w1_row_major());
    write_f32_array(out, model.b1_);
    write_f32_array(out, model.w2_);
    write_f32_array(out, model.b2_);
    if (!out) throw IoError("write failed: " + path);
}

LidModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in) throw TruncatedFile("model file shorter than header");
    if (std::memcmp(magic, kMagic, 4) != 0) {
        throw BadMagic("not a model file: " + path);
    }
    const std::uint32_t version = read_u32(in);
    if (version != LidModel::kFormatVersion) {
        throw VersionMismatch("unsupported model format version " +
                              std::to_string(version));
    }
    LidModel model;
    model.config_ = ModelConfig{};
    model.config_.feature_dim = read_u32(in);
    model.config_.hidden_dim = read_u32(in);
    const std::uint32_t n_labels = read_u32(in);
    model.labels_.reserve(n_labels);
    for (std::uint32_t i = 0; i < n_labels; ++i) {
        const std::uint32_t len = read_u32(in);
        std::string code(len, '\0');
        in.read(code.data(), len);
        if (!in) throw TruncatedFile("truncated label table");
        model.labels_.push_back({std::move(code)});
    }
    const std::size_t F = model.config_.feature_dim;
    const std::size_t H = model.config_.hidden_dim;
    std::vector<float> w1_row_major;
    read_f32_array(in, w1_row_major, F * H);
    model.w1_.resize(F * H);
    for (std::size_t h = 0; h < H; ++h) {
        for (std::size_t f = 0; f < F; ++f) {
            model.w1_[f * H + h] = w1_row_major[h * F + f];
        }
    }
    read_f32_array(in, model.b1_, H);
    read_f32_array(in, model.w2_, n_labels * H);
    read_f32_array(in, model.b2_, n_labels);
    return model;
}

std::vector<std::pair<std::string, LanguageLabel>> load_tsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open training file: " + path);
    std::vector<std::pair<std::string, LanguageLabel>> samples;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw Error("line " + std::to_string(lineno) + ": expected label<TAB>text");
        }
        std::string label = line.substr(0, tab);
        if (!is_valid_label(label)) {
            throw Error("line " + std::to_string(lineno) + ": bad label '" + label + "'");
        }
        samples.emplace_back(line.substr(tab + 1), LanguageLabel{std::move(label)});
    }
    return samples;
}

GradientProbe::Gradients GradientProbe::loss_and_gradients(
    const std::vector<FeatureVector>& batch,
    const std::vector<std::size_t>& targets) const {
    const LidModel& m = model_;
    const std::size_t H = m.config_.hidden_dim;
    const std::size_t F = m.config_.feature_dim;
    const std::size_t L = m.labels_.size();
    Gradients g;
    g.w1.assign(F * H, 0.0);
    g.b1.assign(H, 0.0);
    g.w2.assign(L * H, 0.0);
    g.b2.assign(L, 0.0);
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    for (std::size_t s = 0; s < batch.size(); ++s) {
        Forward f = forward_pass(batch[s], m.config_.hidden_dim, m.w1_, m.b1_,
                                 m.w2_, m.b2_);
        g.loss += -std::log(f.probs[targets[s]]) * inv_b;
        std::vector<double> dz2(f.probs);
        dz2[targets[s]] -= 1.0;
        std::vector<double> da1(H, 0.0);
        for (std::size_t l = 0; l < L; ++l) {
            g.b2[l] += dz2[l] * inv_b;
            for (std::size_t h = 0; h < H; ++h) {
                g.w2[l * H + h] += dz2[l] * f.hidden[h] * inv_b;
                da1[h] += dz2[l] * m.w2_[l * H + h];
            }
        }
        for (std::size_t h = 0; h < H; ++h) {
            const double dz1 = f.z1[h] > 0 ? da1[h] : 0.0;
            g.b1[h] += dz1 * inv_b;
            for (std::size_t k = 0; k < batch[s].nnz(); ++k) {
                g.w1[static_cast<std::size_t>(batch[s].indices[k]) * H + h] +=
                    batch[s].values[k] * dz1 * inv_b;
            }
        }
    }
    return g;
}

double GradientProbe::loss_only(const std::vector<FeatureVector>& batch,
                                const std::vector<std::size_t>& targets) const {
    const LidModel& m = model_;
    double loss = 0.0;
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    for (std::size_t s = 0; s < batch.size(); ++s) {
        Forward f = forward_pass(batch[s], m.config_.hidden_dim, m.w1_, m.b1_,
                                 m.w2_, m.b2_);
        loss += -std::log(f.probs[targets[s]]) * inv_b;
    }
    return loss;
}

}  // namespace geocorpus::lid
