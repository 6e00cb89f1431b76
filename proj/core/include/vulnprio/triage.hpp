#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

// Text classification for the utility and opportune categories: tokenizer,
// tf-idf features, one-vs-rest linear SVM and multi-class F-scores.
namespace vulnprio::triage {

class MlError : public std::runtime_error {
public:
    enum class Kind {
        EmptyCorpus,
        CorpusTooSmall,
        InvalidFraction,
        InvalidLabel,
        EmptyTrainingSet,
        DimensionMismatch,
        EmptyTestSet,
        VersionMismatch,
        ModelFormat,
        InvalidConfig,
    };

    MlError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

enum class Task : std::uint8_t { Utility, Opportune };

std::string_view to_string(Task task);
std::optional<Task> parse_task(std::string_view text);
/// Category values in ascending order: {0,1,2} or {0,1}.
std::span<const int> task_classes(Task task);

// ---------------------------------------------------------------------------
// Text features

/// Lowercase, split on every non-ASCII-alphanumeric byte, drop tokens shorter
/// than two characters. No stemming, no stop words.
std::vector<std::string> tokenize(std::string_view text);

class Vocabulary {
public:
    Vocabulary() = default;
    /// Tokens must be strictly increasing; every df within [1, num_documents].
    Vocabulary(std::vector<std::string> tokens, std::vector<std::size_t> document_frequency,
               std::size_t num_documents);

    /// Keeps tokens with document frequency >= min_df; columns follow
    /// lexicographic token order.
    static Vocabulary fit(std::span<const std::string> corpus, std::size_t min_df);

    std::size_t size() const { return tokens_.size(); }
    std::size_t num_documents() const { return num_documents_; }
    std::optional<std::size_t> index_of(std::string_view token) const;
    const std::vector<std::string>& tokens() const { return tokens_; }
    const std::vector<std::size_t>& document_frequency() const { return df_; }
    /// Smoothed: ln((1 + N) / (1 + df)) + 1.
    double idf(std::size_t column) const;

    friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
        return a.tokens_ == b.tokens_ && a.df_ == b.df_ && a.num_documents_ == b.num_documents_;
    }

private:
    std::vector<std::string> tokens_;
    std::vector<std::size_t> df_;
    std::size_t num_documents_ = 0;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Sparse tf-idf vector; entries sorted by column.
struct FeatureVector {
    std::size_t dimension = 0;
    std::vector<std::pair<std::size_t, double>> entries;

    double norm() const;
    bool empty() const { return entries.empty(); }
};

/// Raw term counts times smoothed idf, L2-normalised. Unknown tokens are
/// ignored; a document without known tokens is the zero vector.
FeatureVector featurize(const Vocabulary& vocab, std::string_view text);

// ---------------------------------------------------------------------------
// Data split

/// Unbiased index draw in [0, bound) from a 64-bit Mersenne Twister.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

/// Fisher-Yates with `uniform_below`, identical on every platform.
template <typename T>
void seeded_shuffle(std::span<T> items, std::mt19937_64& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_below(rng, i));
        std::swap(items[i - 1], items[j]);
    }
}

struct SplitOptions {
    double train_fraction = 0.8;
    std::uint64_t seed = 42;
    bool stratified = false;
};

struct Partition {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Seeded shuffle then prefix split with train size floor(fraction * n).
/// `labels` is only consulted in stratified mode, where each class is
/// split separately. Requires n >= 5 and both sides non-empty.
Partition split_indices(std::span<const int> labels, const SplitOptions& options);

template <typename T>
std::pair<std::vector<T>, std::vector<T>> apply_partition(std::span<const T> items, const Partition& p) {
    std::pair<std::vector<T>, std::vector<T>> out;
    out.first.reserve(p.train.size());
    out.second.reserve(p.test.size());
    for (std::size_t i : p.train) out.first.push_back(items[i]);
    for (std::size_t i : p.test) out.second.push_back(items[i]);
    return out;
}

// ---------------------------------------------------------------------------
// Linear model

struct LabeledDocument {
    std::string text;
    int label = 0;
};

struct TrainConfig {
    double lambda = 1e-4;
    int epochs = 20;
    std::uint64_t seed = 42;
    std::size_t min_df = 2;

    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct LinearModel {
    Task task = Task::Utility;
    std::vector<int> classes;
    Vocabulary vocabulary;
    /// One row per class, vocabulary.size() columns.
    std::vector<std::vector<double>> weights;
    std::vector<double> bias;
    TrainConfig config;
    /// Set when the training data held a single class.
    std::optional<int> constant_class;

    std::size_t dimension() const { return vocabulary.size(); }
};

struct TrainResult {
    LinearModel model;
    std::vector<std::string> warnings;
    /// Regularised hinge objective of the kept iterate after each epoch,
    /// summed over the one-vs-rest classifiers.
    std::vector<double> epoch_objective;
};

/// One-vs-rest linear SVMs trained with Pegasos-style stochastic
/// sub-gradient steps (step 1/(lambda*t)) on the L2-regularised hinge loss.
/// The bias is an extra constant feature. Deterministic in (data, config).
TrainResult train(Task task, std::span<const LabeledDocument> documents, const Vocabulary& vocab,
                  const TrainConfig& config);

struct Prediction {
    int category = 0;
    std::vector<double> decision_values;
};

/// Argmax of the decision values; ties go to the lowest category.
Prediction predict(const LinearModel& model, const FeatureVector& features);

void save_model(const LinearModel& model, std::ostream& out);
/// Rejects any format version other than the current one.
LinearModel load_model(std::istream& in);

inline constexpr int kModelFormatVersion = 1;

// ---------------------------------------------------------------------------
// Evaluation

struct ClassMetrics {
    int category = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
    std::size_t predicted = 0;
};

struct EvalReport {
    std::vector<ClassMetrics> per_class;
    double micro_f = 0.0;
    double macro_f = 0.0;
    double weighted_f = 0.0;
    double accuracy = 0.0;
    std::size_t total = 0;
    /// confusion[true][predicted], rows and columns in per_class order.
    std::vector<std::vector<std::size_t>> confusion;
};

/// Metrics of a square confusion matrix. 0/0 ratios are 0. Macro and
/// weighted averages run over classes that occur as truth or prediction.
EvalReport report_from_confusion(std::span<const int> classes,
                                 const std::vector<std::vector<std::size_t>>& confusion);

EvalReport evaluate_predictions(std::span<const int> classes, std::span<const int> truth,
                                std::span<const int> predicted);

EvalReport evaluate(const LinearModel& model, std::span<const LabeledDocument> test_set);

}  // namespace vulnprio::triage
