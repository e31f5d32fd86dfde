#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "geocorpus/util.hpp"

namespace geocorpus::lid {

struct TooShort : Error {
    using Error::Error;
};
struct BelowMinChars : Error {
    using Error::Error;
};
struct EmptyDataset : Error {
    using Error::Error;
};
struct SingleClass : Error {
    using Error::Error;
};
struct SampleTooShort : Error {
    SampleTooShort(std::size_t index, std::string msg)
        : Error(std::move(msg)), index(index) {}
    std::size_t index;
};
struct EmptyTestSet : Error {
    using Error::Error;
};
struct BadMagic : Error {
    using Error::Error;
};
struct VersionMismatch : Error {
    using Error::Error;
};
struct TruncatedFile : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};

// ISO 639-3 code, three lowercase letters.
struct LanguageLabel {
    std::string code;

    auto operator<=>(const LanguageLabel&) const = default;
};

bool is_valid_label(std::string_view code) noexcept;

struct ModelConfig {
    std::uint32_t feature_dim = 1u << 18;
    std::uint32_t hidden_dim = 256;
    std::uint32_t min_chars = 50;
    std::uint64_t seed = 42;
    std::uint32_t epochs = 5;
    double learning_rate = 0.5;
    std::uint32_t batch_size = 32;

    void validate() const;  // throws Error on violated bounds
};

// Sparse L2-normalized feature vector: strictly increasing bucket ids
// with positive values.
struct FeatureVector {
    std::vector<std::uint32_t> indices;
    std::vector<float> values;

    std::size_t nnz() const noexcept { return indices.size(); }
};

// Hashed character-trigram features. Sliding window of three consecutive
// code points; each trigram hashed with FNV-1a 64-bit over its UTF-8
// bytes, reduced modulo feature_dim; bucket counts L2-normalized.
// No padding at string boundaries. Throws TooShort for < 3 code points.
FeatureVector featurize(std::string_view text, const ModelConfig& config);
FeatureVector featurize(const std::vector<char32_t>& codepoints,
                        const ModelConfig& config);

// Single-hidden-layer MLP: ReLU hidden layer, softmax output.
// Immutable after training; safe for concurrent read-only prediction.
class LidModel {
public:
    static constexpr std::uint32_t kFormatVersion = 1;

    const ModelConfig& config() const noexcept { return config_; }
    const std::vector<LanguageLabel>& labels() const noexcept { return labels_; }

    // Softmax probabilities over labels(), in label order. Sums to 1.
    std::vector<double> probabilities(const FeatureVector& features) const;

    // Argmax label and its probability; ties broken by label order.
    // Throws BelowMinChars when text has fewer than min_chars code points.
    std::pair<LanguageLabel, double> predict(std::string_view text) const;

    // Weight accessors (row-major: w1 is hidden x feature, w2 is
    // labels x hidden). w1 is stored transposed internally for sparse
    // input; these materialize the row-major form.
    std::vector<float> w1_row_major() const;
    const std::vector<float>& w1_feature_major() const noexcept { return w1_; }
    const std::vector<float>& b1() const noexcept { return b1_; }
    const std::vector<float>& w2() const noexcept { return w2_; }
    const std::vector<float>& b2() const noexcept { return b2_; }

    bool operator==(const LidModel& other) const;

private:
    friend LidModel train(const std::vector<std::pair<std::string, LanguageLabel>>&,
                          const ModelConfig&);
    friend LidModel load_model(const std::string& path);
    friend void save_model(const LidModel&, const std::string& path);
    friend class GradientProbe;

    ModelConfig config_;
    std::vector<LanguageLabel> labels_;
    std::vector<float> w1_;  // feature-major: [f * hidden + h]
    std::vector<float> b1_;
    std::vector<float> w2_;  // row-major: [label * hidden + h]
    std::vector<float> b2_;
};

// Mini-batch SGD on softmax cross-entropy. Deterministic: weights are
// initialized and samples shuffled from a PRNG seeded by config.seed, so
// identical inputs and seed give bit-identical models.
LidModel train(const std::vector<std::pair<std::string, LanguageLabel>>& samples,
               const ModelConfig& config);

struct LabelMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::uint64_t support = 0;
};

struct EvalReport {
    std::map<LanguageLabel, LabelMetrics> per_label;
    double macro_f1 = 0.0;  // mean F1 over labels with support > 0
    std::uint64_t n_samples = 0;
};

EvalReport evaluate(const LidModel& model,
                    const std::vector<std::pair<std::string, LanguageLabel>>& test);

// Binary model format: magic "GLID" | u32 version | u32 feature_dim |
// u32 hidden_dim | u32 n_labels | length-prefixed UTF-8 labels |
// w1, b1, w2, b2 as little-endian f32, row-major. Round-trip bit-exact.
void save_model(const LidModel& model, const std::string& path);
LidModel load_model(const std::string& path);

// Training-data TSV: one `label<TAB>text` sample per line, UTF-8.
std::vector<std::pair<std::string, LanguageLabel>> load_tsv(const std::string& path);

// Test-only access to the loss and analytic gradient of one mini-batch,
// for finite-difference checks.
class GradientProbe {
public:
    explicit GradientProbe(LidModel& model) : model_(model) {}

    struct Gradients {
        double loss = 0.0;
        std::vector<double> w1;  // feature-major, matches model storage
        std::vector<double> b1;
        std::vector<double> w2;
        std::vector<double> b2;
    };

    // Mean cross-entropy over the batch plus analytic gradients.
    Gradients loss_and_gradients(const std::vector<FeatureVector>& batch,
                                 const std::vector<std::size_t>& targets) const;

    double loss_only(const std::vector<FeatureVector>& batch,
                     const std::vector<std::size_t>& targets) const;

    std::vector<float>& w1() { return model_.w1_; }
    std::vector<float>& b1() { return model_.b1_; }
    std::vector<float>& w2() { return model_.w2_; }
    std::vector<float>& b2() { return model_.b2_; }

private:
    LidModel& model_;
};

}  // namespace geocorpus::lid
