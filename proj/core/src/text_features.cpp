#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "vulnprio/triage.hpp"

namespace vulnprio::triage {
namespace {

constexpr int kUtilityClasses[] = {0, 1, 2};
constexpr int kOpportuneClasses[] = {0, 1};

bool is_token_char(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

}  // namespace

std::string_view to_string(Task task) { return task == Task::Utility ? "utility" : "opportune"; }

std::optional<Task> parse_task(std::string_view text) {
    if (text == "utility") return Task::Utility;
    if (text == "opportune") return Task::Opportune;
    return std::nullopt;
}

std::span<const int> task_classes(Task task) {
    if (task == Task::Utility) return kUtilityClasses;
    return kOpportuneClasses;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (current.size() >= 2) tokens.push_back(current);
        current.clear();
    };
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (is_token_char(c)) {
            current += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

Vocabulary::Vocabulary(std::vector<std::string> tokens, std::vector<std::size_t> document_frequency,
                       std::size_t num_documents)
    : tokens_(std::move(tokens)), df_(std::move(document_frequency)), num_documents_(num_documents) {
    if (tokens_.size() != df_.size()) {
        throw MlError(MlError::Kind::ModelFormat, "vocabulary token and df lists differ in length");
    }
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        if (i > 0 && !(tokens_[i - 1] < tokens_[i])) {
            throw MlError(MlError::Kind::ModelFormat, "vocabulary tokens not strictly increasing");
        }
        if (df_[i] == 0 || df_[i] > num_documents_) {
            throw MlError(MlError::Kind::ModelFormat, "document frequency out of range for '" + tokens_[i] + "'");
        }
        index_.emplace(tokens_[i], i);
    }
}

Vocabulary Vocabulary::fit(std::span<const std::string> corpus, std::size_t min_df) {
    if (corpus.empty()) throw MlError(MlError::Kind::EmptyCorpus, "cannot fit a vocabulary on an empty corpus");
    if (min_df < 1) throw MlError(MlError::Kind::InvalidConfig, "min_df must be at least 1");

    std::map<std::string, std::size_t> df;
    for (const std::string& doc : corpus) {
        auto tokens = tokenize(doc);
        std::set<std::string> unique(std::make_move_iterator(tokens.begin()), std::make_move_iterator(tokens.end()));
        for (const auto& t : unique) ++df[t];
    }
    std::vector<std::string> tokens;
    std::vector<std::size_t> counts;
    for (auto& [token, n] : df) {
        if (n < min_df) continue;
        tokens.push_back(token);
        counts.push_back(n);
    }
    return Vocabulary(std::move(tokens), std::move(counts), corpus.size());
}

std::optional<std::size_t> Vocabulary::index_of(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

double Vocabulary::idf(std::size_t column) const {
    return std::log((1.0 + static_cast<double>(num_documents_)) / (1.0 + static_cast<double>(df_.at(column)))) + 1.0;
}

double FeatureVector::norm() const {
    double sum = 0.0;
    for (const auto& [col, w] : entries) sum += w * w;
    return std::sqrt(sum);
}

FeatureVector featurize(const Vocabulary& vocab, std::string_view text) {
    std::map<std::size_t, std::size_t> tf;
    for (const std::string& token : tokenize(text)) {
        if (auto col = vocab.index_of(token)) ++tf[*col];
    }
    FeatureVector fv;
    fv.dimension = vocab.size();
    fv.entries.reserve(tf.size());
    double sq = 0.0;
    for (const auto& [col, count] : tf) {
        const double w = static_cast<double>(count) * vocab.idf(col);
        fv.entries.emplace_back(col, w);
        sq += w * w;
    }
    if (sq > 0.0) {
        const double inv = 1.0 / std::sqrt(sq);
        for (auto& entry : fv.entries) entry.second *= inv;
    }
    return fv;
}

}  // namespace vulnprio::triage
