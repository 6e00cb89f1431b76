#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "vulnprio/triage.hpp"

namespace vulnprio::triage {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr std::string_view kFormatName = "vulnprio.linear_model";

struct Sample {
    FeatureVector x;
    double y = 0.0;
};

/// Binary SVM in Pegasos form. The weight vector is stored as scale * v so
/// the per-step shrink is O(1); the bias is the weight of a constant feature.
class BinarySvm {
public:
    explicit BinarySvm(std::size_t dimension) : v_(dimension, 0.0) {}

    double decision(const FeatureVector& x) const {
        double dot = bias_;
        for (const auto& [col, value] : x.entries) dot += v_[col] * value;
        return scale_ * dot;
    }

    void step(const Sample& s, double eta, double lambda) {
        const double raw = raw_dot(s.x);
        const double margin = s.y * scale_ * raw;

        const double shrink = 1.0 - eta * lambda;
        if (shrink <= 1e-12) {
            std::fill(v_.begin(), v_.end(), 0.0);
            bias_ = 0.0;
            scale_ = 1.0;
            sq_norm_ = 0.0;
        } else {
            scale_ *= shrink;
        }

        if (margin < 1.0) {
            const double c = eta * s.y / scale_;
            const double x_sq = s.x.norm() * s.x.norm() + 1.0;
            const double current = shrink <= 1e-12 ? 0.0 : raw;
            sq_norm_ += 2.0 * c * current + c * c * x_sq;
            for (const auto& [col, value] : s.x.entries) v_[col] += c * value;
            bias_ += c;
        }

        // Project onto the ball of radius 1/sqrt(lambda).
        const double norm = scale_ * std::sqrt(std::max(sq_norm_, 0.0));
        const double radius = 1.0 / std::sqrt(lambda);
        if (norm > radius) scale_ *= radius / norm;

        if (scale_ < 1e-9) fold();
    }

    double objective(std::span<const Sample> data, double lambda) const {
        double hinge = 0.0;
        for (const Sample& s : data) hinge += std::max(0.0, 1.0 - s.y * decision(s.x));
        const double w_sq = scale_ * scale_ * exact_sq_norm();
        return 0.5 * lambda * w_sq + hinge / static_cast<double>(data.size());
    }

    std::vector<double> weights() const {
        std::vector<double> out(v_.size());
        std::transform(v_.begin(), v_.end(), out.begin(), [this](double v) { return scale_ * v; });
        return out;
    }

    double bias() const { return scale_ * bias_; }

private:
    double raw_dot(const FeatureVector& x) const {
        double dot = bias_;
        for (const auto& [col, value] : x.entries) dot += v_[col] * value;
        return dot;
    }

    double exact_sq_norm() const {
        double sum = bias_ * bias_;
        for (double v : v_) sum += v * v;
        return sum;
    }

    void fold() {
        for (double& v : v_) v *= scale_;
        bias_ *= scale_;
        scale_ = 1.0;
        sq_norm_ = exact_sq_norm();
    }

    std::vector<double> v_;
    double bias_ = 0.0;
    double scale_ = 1.0;
    double sq_norm_ = 0.0;
};

void validate(const TrainConfig& config) {
    if (!(config.lambda > 0.0) || !std::isfinite(config.lambda)) {
        throw MlError(MlError::Kind::InvalidConfig, "lambda must be positive");
    }
    if (config.epochs < 1) throw MlError(MlError::Kind::InvalidConfig, "epochs must be at least 1");
    if (config.min_df < 1) throw MlError(MlError::Kind::InvalidConfig, "min_df must be at least 1");
}

[[noreturn]] void bad_format(const std::string& what) {
    throw MlError(MlError::Kind::ModelFormat, "malformed model file: " + what);
}

}  // namespace

TrainResult train(Task task, std::span<const LabeledDocument> documents, const Vocabulary& vocab,
                  const TrainConfig& config) {
    validate(config);
    if (documents.empty()) throw MlError(MlError::Kind::EmptyTrainingSet, "training set is empty");
    const auto classes = task_classes(task);
    for (const LabeledDocument& doc : documents) {
        if (std::find(classes.begin(), classes.end(), doc.label) == classes.end()) {
            throw MlError(MlError::Kind::InvalidLabel, "label " + std::to_string(doc.label) + " is not a " +
                                                           std::string(to_string(task)) + " category");
        }
    }

    TrainResult result;
    LinearModel& model = result.model;
    model.task = task;
    model.classes.assign(classes.begin(), classes.end());
    model.vocabulary = vocab;
    model.config = config;

    const int first = documents.front().label;
    const bool single_class = std::all_of(documents.begin(), documents.end(),
                                          [first](const LabeledDocument& d) { return d.label == first; });
    if (single_class) {
        model.constant_class = first;
        model.weights.assign(classes.size(), std::vector<double>(vocab.size(), 0.0));
        for (int c : classes) model.bias.push_back(c == first ? 1.0 : -1.0);
        result.warnings.push_back("degenerate " + std::string(to_string(task)) +
                                  " training set: every example is category " + std::to_string(first) +
                                  "; the model predicts it constantly");
        return result;
    }

    std::vector<FeatureVector> features;
    features.reserve(documents.size());
    for (const LabeledDocument& doc : documents) features.push_back(featurize(vocab, doc.text));

    result.epoch_objective.assign(static_cast<std::size_t>(config.epochs), 0.0);
    for (int category : classes) {
        std::vector<Sample> samples(documents.size());
        for (std::size_t i = 0; i < documents.size(); ++i) {
            samples[i] = Sample{features[i], documents[i].label == category ? 1.0 : -1.0};
        }
        // Each one-vs-rest problem draws its own shuffles from a seed stream
        // derived from (seed, category), so classifiers are independent of
        // training order.
        std::mt19937_64 rng(config.seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(category + 1)));
        std::vector<std::size_t> order(samples.size());
        std::iota(order.begin(), order.end(), std::size_t{0});

        // Pegasos iterates oscillate early on, so the epoch-end iterate with
        // the lowest objective is kept and returned.
        BinarySvm svm(vocab.size());
        std::vector<double> best_weights;
        double best_bias = 0.0;
        double best_objective = std::numeric_limits<double>::infinity();
        std::uint64_t t = 0;
        for (int epoch = 0; epoch < config.epochs; ++epoch) {
            seeded_shuffle(std::span<std::size_t>(order), rng);
            for (std::size_t i : order) {
                ++t;
                const double eta = 1.0 / (config.lambda * static_cast<double>(t));
                svm.step(samples[i], eta, config.lambda);
            }
            const double objective = svm.objective(samples, config.lambda);
            if (objective < best_objective) {
                best_objective = objective;
                best_weights = svm.weights();
                best_bias = svm.bias();
            }
            result.epoch_objective[static_cast<std::size_t>(epoch)] += best_objective;
        }
        model.weights.push_back(std::move(best_weights));
        model.bias.push_back(best_bias);
    }
    return result;
}

Prediction predict(const LinearModel& model, const FeatureVector& features) {
    if (features.dimension != model.dimension()) {
        throw MlError(MlError::Kind::DimensionMismatch,
                      "feature dimension " + std::to_string(features.dimension) + " does not match model dimension " +
                          std::to_string(model.dimension()));
    }
    Prediction p;
    p.decision_values.reserve(model.classes.size());
    std::size_t best = 0;
    for (std::size_t k = 0; k < model.classes.size(); ++k) {
        double value = model.bias[k];
        for (const auto& [col, x] : features.entries) value += model.weights[k][col] * x;
        p.decision_values.push_back(value);
        if (value > p.decision_values[best]) best = k;
    }
    p.category = model.classes[best];
    return p;
}

void save_model(const LinearModel& model, std::ostream& out) {
    ordered_json doc;
    doc["format"] = kFormatName;
    doc["version"] = kModelFormatVersion;
    doc["task"] = to_string(model.task);
    doc["classes"] = model.classes;
    doc["config"] = {{"lambda", model.config.lambda},
                     {"epochs", model.config.epochs},
                     {"seed", model.config.seed},
                     {"min_df", model.config.min_df}};
    doc["constant_class"] = model.constant_class ? json(*model.constant_class) : json(nullptr);
    doc["vocabulary"] = {{"num_documents", model.vocabulary.num_documents()},
                         {"tokens", model.vocabulary.tokens()},
                         {"df", model.vocabulary.document_frequency()}};
    doc["bias"] = model.bias;
    doc["weights"] = model.weights;
    out << doc.dump() << '\n';
}

LinearModel load_model(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        bad_format(e.what());
    }
    if (!doc.is_object() || doc.value("format", "") != kFormatName) bad_format("not a linear model file");
    if (!doc.contains("version") || !doc["version"].is_number_integer()) bad_format("missing version");
    const int version = doc["version"].get<int>();
    if (version != kModelFormatVersion) {
        throw MlError(MlError::Kind::VersionMismatch, "model format version " + std::to_string(version) +
                                                          " is not supported (expected " +
                                                          std::to_string(kModelFormatVersion) + ")");
    }
    try {
        LinearModel model;
        auto task = parse_task(doc.at("task").get<std::string>());
        if (!task) bad_format("unknown task");
        model.task = *task;
        model.classes = doc.at("classes").get<std::vector<int>>();
        const auto expected = task_classes(model.task);
        if (!std::equal(model.classes.begin(), model.classes.end(), expected.begin(), expected.end())) {
            bad_format("class list does not match task");
        }
        const json& cfg = doc.at("config");
        model.config.lambda = cfg.at("lambda").get<double>();
        model.config.epochs = cfg.at("epochs").get<int>();
        model.config.seed = cfg.at("seed").get<std::uint64_t>();
        model.config.min_df = cfg.at("min_df").get<std::size_t>();
        if (!doc.at("constant_class").is_null()) model.constant_class = doc["constant_class"].get<int>();
        const json& vocab = doc.at("vocabulary");
        model.vocabulary = Vocabulary(vocab.at("tokens").get<std::vector<std::string>>(),
                                      vocab.at("df").get<std::vector<std::size_t>>(),
                                      vocab.at("num_documents").get<std::size_t>());
        model.bias = doc.at("bias").get<std::vector<double>>();
        model.weights = doc.at("weights").get<std::vector<std::vector<double>>>();
        if (model.bias.size() != model.classes.size() || model.weights.size() != model.classes.size()) {
            bad_format("expected one weight vector and bias per class");
        }
        for (const auto& row : model.weights) {
            if (row.size() != model.vocabulary.size()) bad_format("weight dimension differs from vocabulary size");
        }
        return model;
    } catch (const json::exception& e) {
        bad_format(e.what());
    }
}

}  // namespace vulnprio::triage
